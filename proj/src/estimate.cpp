#include "adcs/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adcs/embedded.hpp"
#include "adcs/error.hpp"

namespace adcs {

const char *family_name(CodecFamily f) { return f == CodecFamily::Predictor ? "predictor" : "transform"; }

ErrorHistogram::ErrorHistogram(double half_range, std::uint32_t bin_count, std::vector<Bin> bins)
    : half_range_(half_range), bin_count_(bin_count), bins_(std::move(bins)) {
    if (bin_count_ == 0) throw Error(ErrorCode::EmptyHistogram, "histogram needs at least one bin");
    if (!(half_range_ >= 0.0) || !std::isfinite(half_range_))
        throw Error(ErrorCode::EmptyHistogram, "histogram range must be finite and non-negative");
    for (std::size_t i = 0; i < bins_.size(); ++i) {
        if (bins_[i].index >= bin_count_ || (i && bins_[i].index <= bins_[i - 1].index))
            throw Error(ErrorCode::EmptyHistogram, "histogram bins out of order");
        total_ += bins_[i].count;
    }
}

std::uint64_t ErrorHistogram::count(std::size_t i) const {
    auto it = std::lower_bound(bins_.begin(), bins_.end(), i, [](const Bin &b, std::size_t v) { return b.index < v; });
    return it != bins_.end() && it->index == i ? it->count : 0;
}

std::vector<std::uint64_t> ErrorHistogram::counts() const {
    std::vector<std::uint64_t> out(bin_count_, 0);
    for (const auto &b : bins_) out[b.index] = b.count;
    return out;
}

double ErrorHistogram::mean() const {
    if (total_ == 0) return 0.0;
    double s = 0.0;
    for (const auto &b : bins_) s += static_cast<double>(b.count) * (lower_edge(b.index) + 0.5 * bin_width());
    return s / static_cast<double>(total_);
}

ErrorHistogram build_histogram(std::span<const double> samples, std::uint32_t n_pdf) {
    if (samples.empty()) throw Error(ErrorCode::EmptySample, "no samples to build a histogram from");
    if (n_pdf == 0) throw Error(ErrorCode::EmptyHistogram, "histogram needs at least one bin");
    double a = 0.0;
    for (double v : samples) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "non-finite histogram sample");
        a = std::max(a, std::abs(v));
    }
    std::vector<std::uint32_t> idx(samples.size());
    if (a == 0.0) {
        std::fill(idx.begin(), idx.end(), n_pdf / 2);
    } else {
        const double scale = n_pdf / (2.0 * a);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double t = std::floor((samples[i] + a) * scale);
            idx[i] = static_cast<std::uint32_t>(std::clamp(t, 0.0, static_cast<double>(n_pdf - 1)));
        }
    }
    std::sort(idx.begin(), idx.end());
    std::vector<ErrorHistogram::Bin> bins;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && idx[j] == idx[i]) ++j;
        bins.push_back({idx[i], j - i});
        i = j;
    }
    return ErrorHistogram(a, n_pdf, std::move(bins));
}

std::uint32_t adaptive_pdf_bins(std::span<const double> samples, std::uint32_t max_bins) {
    if (samples.size() < 4) return max_bins;
    std::vector<double> v(samples.begin(), samples.end());
    double a = 0.0;
    for (double x : v) a = std::max(a, std::abs(x));
    const std::size_t q1 = v.size() / 4, q3 = 3 * v.size() / 4;
    std::nth_element(v.begin(), v.begin() + q1, v.end());
    const double lo = v[q1];
    std::nth_element(v.begin(), v.begin() + q3, v.end());
    const double iqr = v[q3] - lo;
    if (!(iqr > 0.0) || !(a > 0.0)) return max_bins;
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(v.size()));
    const double bins = std::ceil(2.0 * a / width);
    if (bins >= max_bins) return max_bins;
    return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(bins) | 1u);
}

namespace {

// Walks quantizer bin masses in ascending bin order. emit(q, m, reps) gives
// mass m to each of bins q .. q+reps-1; single bins may repeat and must be
// merged by the caller, runs never overlap anything else.
template <class Emit>
void visit_bin_mass(const ErrorHistogram &hist, const QuantizerSpec &spec, Emit &&emit) {
    if (hist.total() == 0) return;
    const std::size_t last = spec.bin_count() - 1;
    const double lower = spec.lower(), upper = spec.upper();
    auto clamp_bin = [&](double x) -> std::size_t {
        if (x < lower) return 0;
        if (x >= upper) return last;
        return *spec.locate(x);
    };
    auto add = [&](std::size_t q, double m) {
        if (m > 0.0) emit(q, m, std::size_t{1});
    };
    const double total = static_cast<double>(hist.total());
    if (hist.is_point_mass()) {
        add(clamp_bin(0.0), 1.0);
        return;
    }
    const bool linear = spec.kind() == QuantizerKind::Linear;
    const double w = hist.bin_width();
    for (const auto &b : hist.bins()) {
        const double p = static_cast<double>(b.count) / total;
        double lo = hist.lower_edge(b.index);
        const double hi = lo + w;
        if (hi <= lower) {
            add(0, p);
            continue;
        }
        if (lo >= upper) {
            add(last, p);
            continue;
        }
        if (lo < lower) {
            add(0, p * (lower - lo) / w);
            lo = lower;
        }
        const double stop = std::min(hi, upper);
        std::size_t q = clamp_bin(lo);
        double x = lo;
        if (x < stop) {
            const double next = std::min(spec.boundary(q + 1), stop);
            add(q, p * (next - x) / w);
            x = next;
            ++q;
        }
        if (linear && x < stop && q <= last) {
            // Bins wholly inside [x, stop) share one mass.
            const std::size_t end = stop >= upper ? last + 1 : clamp_bin(stop);
            if (end > q) {
                emit(q, p * spec.bin_width() / w, end - q);
                x = spec.boundary(end);
                q = end;
            }
        }
        while (x < stop && q <= last) {
            const double next = std::min(spec.boundary(q + 1), stop);
            add(q, p * (next - x) / w);
            x = next;
            ++q;
        }
        if (hi > upper) add(last, p * (hi - upper) / w);
    }
}

}  // namespace

std::vector<std::pair<std::size_t, double>> quantizer_bin_mass(const ErrorHistogram &hist, const QuantizerSpec &spec) {
    std::vector<std::pair<std::size_t, double>> out;
    visit_bin_mass(hist, spec, [&](std::size_t q, double m, std::size_t reps) {
        for (std::size_t i = 0; i < reps; ++i) {
            if (!out.empty() && out.back().first == q + i) out.back().second += m;
            else out.emplace_back(q + i, m);
        }
    });
    return out;
}

double entropy_bits(std::span<const double> probabilities) {
    double h = 0.0;
    for (double p : probabilities)
        if (p > 0.0) h -= p * std::log2(p);
    return std::max(0.0, h);
}

double entropy_bitrate(const ErrorHistogram &hist, const QuantizerSpec &spec) {
    double h = 0.0;
    std::size_t pending_bin = 0;
    double pending = 0.0;
    auto flush = [&] {
        if (pending > 0.0) h -= pending * std::log2(pending);
        pending = 0.0;
    };
    visit_bin_mass(hist, spec, [&](std::size_t q, double m, std::size_t reps) {
        if (reps == 1 && pending > 0.0 && q == pending_bin) {
            pending += m;
            return;
        }
        flush();
        if (reps == 1) {
            pending_bin = q;
            pending = m;
        } else {
            h -= static_cast<double>(reps) * m * std::log2(m);
        }
    });
    flush();
    return std::clamp(h, 0.0, std::log2(static_cast<double>(spec.bin_count())));
}

double estimate_sz_bitrate(const ErrorHistogram &hist, double delta, std::uint32_t bin_count, double offset) {
    return entropy_bitrate(hist, QuantizerSpec::linear(delta, bin_count)) + offset;
}

double estimate_sz_psnr(double value_range, double delta) {
    if (!(delta > 0.0) || !(value_range > 0.0))
        throw Error(ErrorCode::InvalidBound, "PSNR estimate needs positive bin size and value range");
    return 20.0 * std::log10(value_range / delta) + 10.0 * std::log10(12.0);
}

double psnr_from_eb(double eb_rel) { return estimate_sz_psnr(1.0, 2.0 * eb_rel); }

double delta_from_psnr(double value_range, double psnr) {
    if (!std::isfinite(psnr) || !(value_range > 0.0))
        throw Error(ErrorCode::InvalidBound, "target PSNR must be finite and value range positive");
    return value_range * std::sqrt(12.0) * std::pow(10.0, -psnr / 20.0);
}

double psnr_from_mse(double mse, double value_range) {
    if (!(mse > 0.0)) return kPsnrSentinel;
    if (!(value_range > 0.0)) return -kPsnrSentinel;
    return -10.0 * std::log10(mse) + 20.0 * std::log10(value_range);
}

double estimate_mse_static(const ErrorHistogram &hist, const QuantizerSpec &spec) {
    double mse = 0.0;
    for (const auto &[bin, p] : quantizer_bin_mass(hist, spec)) {
        const double d = spec.bin_size(bin);
        mse += d * d * p;
    }
    return mse / 12.0;
}

QualityEstimate estimate_equalprob(const QuantizerSpec &spec, double value_range) {
    const double n = spec.half_count();
    const double bins = spec.bin_count();
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < spec.bin_count(); ++i) sum_sq += spec.bin_size(i) * spec.bin_size(i);
    QualityEstimate q;
    q.bit_rate = 1.0 + std::log2(n);
    q.mse = sum_sq / (12.0 * bins);
    q.psnr = psnr_from_mse(q.mse, value_range);
    q.nrmse = value_range > 0.0 ? std::sqrt(q.mse) / value_range : 0.0;
    return q;
}

std::vector<std::size_t> ec_sample_positions(std::size_t ndim, std::size_t count) {
    const std::size_t size = block_size(ndim);
    if (count == 0 || count > size) throw Error(ErrorCode::EmptySample, "per-block sample count out of range");
    // Defaults: the corners of the staircase plus, in 2D/3D, short runs so
    // that neighbouring-coefficient changes are observed directly.
    if (ndim == 1 && count == 3) return {0, 1, 3};
    if (ndim == 2 && count == 9) return {0, 1, 2, 6, 7, 8, 13, 14, 15};
    if (ndim == 3 && count == 16) return {0, 1, 9, 10, 18, 19, 27, 28, 35, 36, 44, 45, 53, 54, 62, 63};
    if (count == 1) return {0};
    std::vector<std::size_t> p(count);
    for (std::size_t i = 0; i < count; ++i) p[i] = i * (size - 1) / (count - 1);
    return p;
}

std::vector<double> interpolate_positions(std::span<const std::size_t> positions, std::span<const double> values,
                                          std::size_t size) {
    std::vector<double> out(size);
    if (positions.empty()) return out;
    std::size_t seg = 0;
    for (std::size_t p = 0; p < size; ++p) {
        if (p <= positions.front()) {
            out[p] = values.front();
        } else if (p >= positions.back()) {
            out[p] = values.back();
        } else {
            while (positions[seg + 1] < p) ++seg;
            const double x0 = static_cast<double>(positions[seg]), x1 = static_cast<double>(positions[seg + 1]);
            const double f = (static_cast<double>(p) - x0) / (x1 - x0);
            out[p] = values[seg] + f * (values[seg + 1] - values[seg]);
        }
    }
    return out;
}

EcEstimate estimate_ec(const std::vector<Block> &blocks, const SamplingConfig &cfg, double eb_abs,
                       double value_range, const BotMatrix &t) {
    cfg.validate();
    if (blocks.empty()) throw Error(ErrorCode::EmptySample, "no blocks sampled");
    if (!(eb_abs > 0.0)) throw Error(ErrorCode::InvalidBound, "error bound must be positive");
    const std::size_t ndim = blocks.front().ndim;
    const std::size_t size = block_size(ndim);
    const auto &order = sequency_order(ndim);

    EcEstimate est;
    EcStats &st = est.stats;
    st.positions = ec_sample_positions(ndim, cfg.ec_points_for(ndim));
    const auto &pos = st.positions;
    // Adjacent sampled pairs away from the DC coefficient, whose jump to the
    // first AC term is atypical.
    std::vector<std::size_t> pairs;
    std::vector<bool> sampled(size, false);
    for (std::size_t p : pos) sampled[p] = true;
    for (std::size_t j = 0; j + 1 < pos.size(); ++j)
        if (pos[j] != 0 && pos[j] + 1 == pos[j + 1]) pairs.push_back(j);

    const double tol = coefficient_tolerance(eb_abs, ndim, t);
    double nsb_sum = 0.0, delta_bits = 0.0, header = 0.0, err_sum = 0.0;
    std::vector<double> ns(pos.size());
    for (const Block &b : blocks) {
        if (b.ndim != ndim) throw Error(ErrorCode::InvalidParams, "sampled blocks differ in dimensionality");
        ++st.blocks;
        st.real_elements += b.real_count();
        header += 8.0;
        const BlockCoefficients bc = transform_block(b.values, ndim, t);
        if (!bc.e_max) continue;
        const int e_max = *bc.e_max;
        const unsigned k = planes_for_bound(e_max, tol);
        if (k == 0) {
            for (std::size_t p : pos) err_sum += bc.coeffs[order[p]] * bc.coeffs[order[p]];
            continue;
        }
        header += 1.0;
        for (std::size_t j = 0; j < pos.size(); ++j) {
            const std::size_t slot = order[pos[j]];
            ns[j] = coded_bits(bc.fixed[slot], k);
            const double e = bc.coeffs[slot] - truncated_value(bc.fixed[slot], e_max, k);
            err_sum += e * e;
        }
        const auto full = interpolate_positions(pos, ns, size);
        nsb_sum += std::accumulate(full.begin(), full.end(), 0.0);

        auto eg = [](double from, double to) {
            return static_cast<double>(exp_golomb_length(zigzag(std::llround(to) - std::llround(from))));
        };
        double step = 0.0;
        for (std::size_t j : pairs) step += eg(ns[j], ns[j + 1]);
        if (!pairs.empty()) step /= static_cast<double>(pairs.size());
        double cost = eg(static_cast<double>(k), full[0]);
        for (std::size_t p = 1; p < size; ++p) {
            if (sampled[p - 1] && sampled[p]) cost += eg(full[p - 1], full[p]);
            else cost += pairs.empty() ? eg(full[p - 1], full[p]) : step;
        }
        delta_bits += cost;
    }
    const double coeffs = static_cast<double>(st.blocks * size);
    const double real = static_cast<double>(st.real_elements);
    st.mean_nsb = nsb_sum / coeffs;
    st.mean_delta_bits = delta_bits / coeffs;
    st.header_bits = header / real;
    st.mse_sp = err_sum / static_cast<double>(st.blocks * pos.size());

    QualityEstimate &q = est.quality;
    q.family = CodecFamily::Transform;
    q.bit_rate = (nsb_sum + delta_bits + header) / real;
    q.mse = st.mse_sp;
    q.psnr = psnr_from_mse(q.mse, value_range);
    q.nrmse = value_range > 0.0 ? std::sqrt(q.mse) / value_range : 0.0;
    return est;
}

std::vector<double> sampled_prediction_errors(const Field &f, std::span<const std::size_t> block_indices,
                                              double delta) {
    const std::size_t ndim = f.ndim();
    const LorenzoStencil st(f.dims());
    const Dims grid = block_grid(f.dims());
    const std::array<std::size_t, 3> g{grid[0], ndim > 1 ? grid[1] : 1, ndim > 2 ? grid[2] : 1};
    const auto data = f.data();
    const double radius = static_cast<double>(kDefaultBinCount / 2);
    std::vector<double> out;
    out.reserve(block_indices.size() * block_size(ndim));
    std::array<double, 64> local{};

    for (std::size_t index : block_indices) {
        const std::array<std::size_t, 3> o{index / (g[1] * g[2]) * kBlockEdge, index / g[2] % g[1] * kBlockEdge,
                                           index % g[2] * kBlockEdge};
        const std::array<std::size_t, 3> ext{ndim > 0 ? kBlockEdge : 1, ndim > 1 ? kBlockEdge : 1,
                                             ndim > 2 ? kBlockEdge : 1};
        // Value of the point at block-local (a, b, c), which may lie one step
        // before the block (then the original value) or before the field (0).
        auto value = [&](long a, long b, long c) -> double {
            const long gi = static_cast<long>(o[0]) + a, gj = static_cast<long>(o[1]) + b,
                       gk = static_cast<long>(o[2]) + c;
            if (gi < 0 || gj < 0 || gk < 0) return 0.0;
            if (a >= 0 && b >= 0 && c >= 0) return local[(a * ext[1] + b) * ext[2] + c];
            return data[gi * st.stride[0] + gj * st.stride[1] + gk * st.stride[2]];
        };
        for (std::size_t a = 0; a < ext[0]; ++a)
            for (std::size_t b = 0; b < ext[1]; ++b)
                for (std::size_t c = 0; c < ext[2]; ++c) {
                    const std::size_t gi = o[0] + a, gj = o[1] + b, gk = o[2] + c;
                    if (gi >= st.dims[0] || gj >= st.dims[1] || gk >= st.dims[2]) continue;
                    const long la = static_cast<long>(a), lb = static_cast<long>(b), lc = static_cast<long>(c);
                    double pred;
                    switch (ndim) {
                        case 1: pred = value(la - 1, 0, 0); break;
                        case 2: pred = value(la - 1, lb, 0) + value(la, lb - 1, 0) - value(la - 1, lb - 1, 0); break;
                        default:
                            pred = value(la - 1, lb, lc) + value(la, lb - 1, lc) + value(la, lb, lc - 1) -
                                   value(la - 1, lb - 1, lc) - value(la - 1, lb, lc - 1) - value(la, lb - 1, lc - 1) +
                                   value(la - 1, lb - 1, lc - 1);
                    }
                    const double x = data[gi * st.stride[0] + gj * st.stride[1] + gk * st.stride[2]];
                    const double e = x - pred;
                    out.push_back(e);
                    double recon = x;
                    if (delta > 0.0) {
                        const double m = std::floor(e / delta + 0.5);
                        if (std::abs(m) < radius) {
                            const double r = round_to(f.dtype(), pred + m * delta);
                            if (std::abs(r - x) <= 0.5 * delta) recon = r;
                        }
                    }
                    local[(a * ext[1] + b) * ext[2] + c] = recon;
                }
    }
    return out;
}

namespace {

double plog(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

// Entropy of the quantized sample, read as exact atoms (values seen more
// than once, e.g. errors of exactly zero) plus a continuous remainder that
// goes through the histogram. Spreading an atom over a coarse histogram bin
// would smear it across many quantizer bins.
double mixed_entropy(std::span<const double> errors, const QuantizerSpec &spec) {
    std::vector<double> v(errors.begin(), errors.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    std::vector<std::pair<std::size_t, double>> atoms;
    std::vector<double> rest;
    const std::size_t last = spec.bin_count() - 1;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i + 1;
        while (j < v.size() && v[j] == v[i]) ++j;
        if (j - i > 1) {
            const auto b = spec.locate(v[i]);
            const std::size_t bin = b ? *b : (v[i] < 0.0 ? 0 : last);
            if (!atoms.empty() && atoms.back().first == bin) atoms.back().second += (j - i) / n;
            else atoms.emplace_back(bin, (j - i) / n);
        } else {
            rest.push_back(v[i]);
        }
        i = j;
    }
    if (rest.empty()) {
        double h = 0.0;
        for (auto &[bin, a] : atoms) h += plog(a);
        return h;
    }
    const double w = static_cast<double>(rest.size()) / n;
    const ErrorHistogram hist = build_histogram(rest, adaptive_pdf_bins(rest));
    double h = w * entropy_bitrate(hist, spec) + plog(w);
    if (atoms.empty()) return h;
    // Continuous mass landing in the atom bins, then merge.
    std::vector<double> share(atoms.size(), 0.0);
    visit_bin_mass(hist, spec, [&](std::size_t q, double m, std::size_t reps) {
        auto it = std::lower_bound(atoms.begin(), atoms.end(), q,
                                   [](const auto &a, std::size_t x) { return a.first < x; });
        for (; it != atoms.end() && it->first < q + reps; ++it) share[it - atoms.begin()] += m;
    });
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const double c = w * share[i];
        h += plog(c + atoms[i].second) - plog(c);
    }
    return h;
}

}  // namespace

PredictorEstimate estimate_predictor(const Field &f, std::span<const std::size_t> block_indices, double eb_abs,
                                     std::uint32_t bin_count, double offset) {
    if (!(eb_abs > 0.0)) throw Error(ErrorCode::InvalidBound, "predictor estimate needs a positive bound");
    const double delta = 2.0 * eb_abs;
    const auto errors = sampled_prediction_errors(f, block_indices, delta);
    const QuantizerSpec spec = QuantizerSpec::linear(delta, bin_count);
    PredictorEstimate out;
    out.entropy = mixed_entropy(errors, spec);
    // Errors beyond the quantizer range are stored raw with an index gap.
    const double reach = 0.5 * bin_count * delta;
    const auto outliers = std::count_if(errors.begin(), errors.end(), [&](double e) { return std::abs(e) > reach; });
    out.outlier_fraction = static_cast<double>(outliers) / static_cast<double>(errors.size());
    QualityEstimate &q = out.quality;
    q.family = CodecFamily::Predictor;
    q.bit_rate = out.entropy + offset + out.outlier_fraction * (element_bits(f.dtype()) + kOutlierIndexBits);
    const double vr = f.value_range();
    q.mse = eb_abs * eb_abs / 3.0;
    if (vr > 0.0) {
        q.psnr = estimate_sz_psnr(vr, delta);
        q.nrmse = std::sqrt(q.mse) / vr;
    } else {
        q.psnr = kPsnrSentinel;
    }
    return out;
}

}  // namespace adcs
