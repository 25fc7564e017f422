#include "adcs/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adcs/error.hpp"
#include "adcs/estimate.hpp"

namespace adcs {

namespace {

void check_bin_count(std::uint32_t bin_count) {
    if (bin_count < 3 || bin_count % 2 == 0)
        throw Error(ErrorCode::InvalidBound, "bin count must be odd and >= 3, got " + std::to_string(bin_count));
}

}  // namespace

QuantizerSpec QuantizerSpec::linear(double bin_width, std::uint32_t bin_count) {
    check_bin_count(bin_count);
    if (!(bin_width > 0.0) || !std::isfinite(bin_width))
        throw Error(ErrorCode::InvalidBound, "bin width must be positive");
    QuantizerSpec s;
    s.kind_ = QuantizerKind::Linear;
    s.bin_count_ = bin_count;
    s.width_ = bin_width;
    s.origin_ = static_cast<double>(s.half_count()) - 0.5;
    return s;
}

QuantizerSpec QuantizerSpec::from_boundaries(QuantizerKind kind, std::vector<double> boundaries) {
    if (boundaries.size() < 2) throw Error(ErrorCode::InvalidBound, "need at least two boundaries");
    for (std::size_t i = 1; i < boundaries.size(); ++i)
        if (!(boundaries[i] > boundaries[i - 1]))
            throw Error(ErrorCode::InvalidBound, "boundaries must be strictly increasing");
    QuantizerSpec s;
    s.kind_ = kind;
    s.bin_count_ = static_cast<std::uint32_t>(boundaries.size() - 1);
    s.boundaries_ = std::move(boundaries);
    return s;
}

double QuantizerSpec::boundary(std::size_t i) const {
    if (kind_ == QuantizerKind::Linear) return (static_cast<double>(i) - origin_) * width_;
    return boundaries_.at(i);
}

double QuantizerSpec::midpoint(std::size_t bin) const {
    if (kind_ == QuantizerKind::Linear) return (static_cast<double>(bin) - (origin_ - 0.5)) * width_;
    return 0.5 * (boundaries_[bin] + boundaries_[bin + 1]);
}

double QuantizerSpec::bin_size(std::size_t bin) const {
    if (kind_ == QuantizerKind::Linear) return width_;
    return boundaries_[bin + 1] - boundaries_[bin];
}

std::optional<std::size_t> QuantizerSpec::locate(double x) const {
    if (kind_ == QuantizerKind::Linear) {
        const double t = std::floor(x / width_ + origin_);
        if (!(t >= -1.0 && t <= static_cast<double>(bin_count_))) return std::nullopt;
        auto idx = static_cast<long long>(t);
        // Division can land one bin off near a boundary; settle against the boundaries.
        if (idx >= 0 && x < boundary(static_cast<std::size_t>(idx))) --idx;
        else if (idx + 1 <= static_cast<long long>(bin_count_) && x >= boundary(static_cast<std::size_t>(idx + 1)))
            ++idx;
        if (idx < 0 || idx >= static_cast<long long>(bin_count_)) return std::nullopt;
        return static_cast<std::size_t>(idx);
    }
    if (x < boundaries_.front() || x >= boundaries_.back()) return std::nullopt;
    auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), x);
    return static_cast<std::size_t>(it - boundaries_.begin()) - 1;
}

QuantizerSpec linear_spec(double eb_abs, std::uint32_t bin_count) {
    if (!(eb_abs > 0.0) || !std::isfinite(eb_abs))
        throw Error(ErrorCode::InvalidBound, "error bound must be positive and finite");
    return QuantizerSpec::linear(2.0 * eb_abs, bin_count);
}

QuantizerSpec log_spec_with_base(double base, std::uint32_t bin_count) {
    check_bin_count(bin_count);
    if (!(base > 1.0)) throw Error(ErrorCode::InvalidBound, "log base must exceed 1");
    const std::uint32_t n = (bin_count + 1) / 2;
    // Right-hand boundaries r_0 = b, r_i = r_{i-1} + b^i - b^(i-1).
    std::vector<double> right(n);
    right[0] = base;
    double power = 1.0;
    for (std::uint32_t i = 1; i < n; ++i) {
        const double next = power * base;
        right[i] = right[i - 1] + (next - power);
        power = next;
    }
    std::vector<double> b;
    b.reserve(2 * n);
    for (std::uint32_t i = n; i-- > 0;) b.push_back(-right[i]);
    for (std::uint32_t i = 0; i < n; ++i) b.push_back(right[i]);
    return QuantizerSpec::from_boundaries(QuantizerKind::Log, std::move(b));
}

QuantizerSpec log_spec(double max_abs, std::uint32_t bin_count) {
    check_bin_count(bin_count);
    if (!(max_abs > 0.0) || !std::isfinite(max_abs)) throw Error(ErrorCode::InvalidBound, "max_abs must be positive");
    const double n1 = static_cast<double>((bin_count + 1) / 2 - 1);
    // Half-width covered by base b: b + b^(n-1) - 1, increasing in b > 1.
    auto half_width = [&](double b) { return b + std::pow(b, n1) - 1.0; };
    // Ranges at or below 1 cannot be reached with b > 1; solve for 2 and rescale.
    const double target = max_abs > 1.0 ? max_abs : 2.0;
    double lo = 1.0, hi = std::max(2.0, target);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (half_width(mid) < target ? lo : hi) = mid;
    }
    QuantizerSpec base = log_spec_with_base(hi, bin_count);
    const double scale = max_abs > 1.0 ? 1.0 : max_abs / 2.0;
    std::vector<double> b(base.bin_count() + 1);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = base.boundary(i) * scale;
    // Keep ±max_abs inside the half-open range.
    b.back() = std::max(b.back(), std::nextafter(max_abs, INFINITY));
    b.front() = std::min(b.front(), -max_abs);
    return QuantizerSpec::from_boundaries(QuantizerKind::Log, std::move(b));
}

QuantizerSpec equalprob_spec(const ErrorHistogram &hist, std::uint32_t bin_count) {
    check_bin_count(bin_count);
    if (hist.total() == 0) throw Error(ErrorCode::EmptyHistogram, "histogram holds no samples");
    const auto &bins = hist.bins();
    if (hist.is_point_mass() || bins.size() < 2)
        throw Error(ErrorCode::EmptyHistogram, "histogram mass cannot be split into equal-probability bins");

    std::vector<double> b;
    b.reserve(bin_count + 1);
    b.push_back(hist.lower_edge(bins.front().index));
    const double total = static_cast<double>(hist.total());
    double cum = 0.0;
    std::size_t j = 0;
    for (std::uint32_t k = 1; k < bin_count; ++k) {
        const double level = total * static_cast<double>(k) / bin_count;
        while (j + 1 < bins.size() && cum + static_cast<double>(bins[j].count) < level)
            cum += static_cast<double>(bins[j++].count);
        const double frac = std::clamp((level - cum) / static_cast<double>(bins[j].count), 0.0, 1.0);
        b.push_back(hist.lower_edge(bins[j].index) + frac * hist.bin_width());
    }
    b.push_back(hist.lower_edge(bins.back().index + 1));
    for (std::size_t i = 1; i < b.size(); ++i)
        if (!(b[i] > b[i - 1]))
            throw Error(ErrorCode::EmptyHistogram, "histogram too concentrated for " + std::to_string(bin_count) + " bins");
    return QuantizerSpec::from_boundaries(QuantizerKind::EqualProb, std::move(b));
}

QuantizedField quantize(std::span<const double> values, const QuantizerSpec &spec) {
    QuantizedField q;
    q.codes.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (auto bin = spec.locate(values[i])) {
            q.codes[i] = static_cast<std::uint32_t>(*bin + 1);
        } else {
            q.codes[i] = kUnpredictableCode;
            q.unpredictable.emplace_back(i, values[i]);
        }
    }
    return q;
}

std::vector<double> dequantize(const QuantizedField &q, const QuantizerSpec &spec) {
    std::vector<double> out(q.codes.size());
    std::size_t next = 0;
    for (std::size_t i = 0; i < q.codes.size(); ++i) {
        if (q.codes[i] == kUnpredictableCode) {
            if (next >= q.unpredictable.size() || q.unpredictable[next].first != i)
                throw Error(ErrorCode::CorruptStream, "unpredictable list out of step at element " + std::to_string(i));
            out[i] = q.unpredictable[next++].second;
        } else {
            out[i] = spec.midpoint(q.codes[i] - 1);
        }
    }
    return out;
}

}  // namespace adcs
