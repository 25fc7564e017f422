#include "adcs/embedded.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>

#include "adcs/error.hpp"

namespace adcs {

std::optional<int> block_exponent(std::span<const double> values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    if (m == 0.0) return std::nullopt;
    return std::ilogb(m);
}

std::int64_t to_fixed(double coeff, int e_max) {
    constexpr std::int64_t limit = (std::int64_t{1} << (kFixedPointBits + 1)) - 1;
    const auto v = static_cast<std::int64_t>(std::nearbyint(std::ldexp(coeff, kFixedPointBits - e_max)));
    return std::clamp(v, -limit, limit);
}

std::vector<std::int64_t> to_fixed(std::span<const double> coeffs, int e_max) {
    std::vector<std::int64_t> out(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) out[i] = to_fixed(coeffs[i], e_max);
    return out;
}

unsigned planes_for_bound(int e_max, double tolerance) {
    if (!(tolerance > 0.0) || !std::isfinite(tolerance))
        throw Error(ErrorCode::InvalidBound, "embedded coding needs a positive finite error bound");
    const long k = static_cast<long>(e_max) - std::ilogb(tolerance) + 1;
    return static_cast<unsigned>(std::clamp<long>(k, 0, kMaxPlanes));
}

unsigned coded_bits(std::int64_t fixed, unsigned planes) {
    return static_cast<unsigned>(std::bit_width(kept_magnitude(fixed, planes)));
}

unsigned significant_bits(std::int64_t fixed, unsigned planes) {
    const std::uint64_t m = kept_magnitude(fixed, planes);
    return m == 0 ? 0 : planes - static_cast<unsigned>(std::countr_zero(m));
}

double truncated_value(std::int64_t fixed, int e_max, unsigned planes) {
    const std::uint64_t m = kept_magnitude(fixed, planes);
    if (m == 0) return 0.0;
    const double v = std::ldexp(static_cast<double>(m) + 0.5, e_max + 1 - static_cast<int>(planes));
    return fixed < 0 ? -v : v;
}

const std::vector<std::size_t> &sequency_order(std::size_t ndim) {
    static const std::array<std::vector<std::size_t>, 4> orders = [] {
        std::array<std::vector<std::size_t>, 4> o;
        for (std::size_t n = 1; n <= 3; ++n) {
            const std::size_t size = block_size(n);
            std::vector<std::size_t> sum(size);
            for (std::size_t s = 0; s < size; ++s) {
                std::size_t rest = s;
                for (std::size_t a = 0; a < n; ++a) {
                    sum[s] += rest % kBlockEdge;
                    rest /= kBlockEdge;
                }
            }
            o[n].resize(size);
            std::iota(o[n].begin(), o[n].end(), 0);
            std::stable_sort(o[n].begin(), o[n].end(), [&](std::size_t a, std::size_t b) { return sum[a] < sum[b]; });
        }
        return o;
    }();
    if (ndim < 1 || ndim > 3) throw Error(ErrorCode::AxisOutOfRange, "block dimensionality must be 1-3");
    return orders[ndim];
}

namespace {

std::size_t ndim_of(std::size_t count) {
    for (std::size_t n = 1; n <= 3; ++n)
        if (block_size(n) == count) return n;
    throw Error(ErrorCode::InvalidParams, "block must hold 4, 16 or 64 coefficients");
}

}  // namespace

void ec_write_planes(BitWriter &out, std::span<const std::int64_t> fixed, unsigned planes) {
    const auto &order = sequency_order(ndim_of(fixed.size()));
    long prev = planes;
    for (std::size_t slot : order) {
        const std::uint64_t m = kept_magnitude(fixed[slot], planes);
        const long n = static_cast<long>(std::bit_width(m));
        out.put_exp_golomb(zigzag(n - prev));
        prev = n;
        if (n == 0) continue;
        out.put_bit(fixed[slot] < 0);
        out.put(m, static_cast<unsigned>(n - 1));
    }
}

void ec_read_planes(BitReader &in, int e_max, unsigned planes, std::span<double> out) {
    const auto &order = sequency_order(ndim_of(out.size()));
    long prev = planes;
    for (std::size_t slot : order) {
        const long n = prev + unzigzag(in.get_exp_golomb());
        if (n < 0 || n > static_cast<long>(planes)) throw Error(ErrorCode::CorruptStream, "significant bit count out of range");
        prev = n;
        if (n == 0) {
            out[slot] = 0.0;
            continue;
        }
        const bool negative = in.get_bit();
        const std::uint64_t m = (std::uint64_t{1} << (n - 1)) | in.get(static_cast<unsigned>(n - 1));
        const double v = std::ldexp(static_cast<double>(m) + 0.5, e_max + 1 - static_cast<int>(planes));
        out[slot] = negative ? -v : v;
    }
}

std::uint64_t ec_planes_cost(std::span<const std::int64_t> fixed, unsigned planes) {
    const auto &order = sequency_order(ndim_of(fixed.size()));
    long prev = planes;
    std::uint64_t bits = 0;
    for (std::size_t slot : order) {
        const long n = static_cast<long>(coded_bits(fixed[slot], planes));
        bits += exp_golomb_length(zigzag(n - prev)) + static_cast<std::uint64_t>(n);
        prev = n;
    }
    return bits;
}

EcBlockStream ec_encode_block(std::span<const std::int64_t> fixed, int e_max, double eb_abs) {
    EcBlockStream s;
    s.e_max = e_max;
    s.count = fixed.size();
    s.planes_kept = planes_for_bound(e_max, eb_abs);
    BitWriter w;
    ec_write_planes(w, fixed, s.planes_kept);
    s.bit_count = w.bit_count();
    s.bits = w.finish();
    return s;
}

std::vector<double> ec_decode_block(const EcBlockStream &s) {
    std::vector<double> out(s.count);
    BitReader r(s.bits, s.bit_count);
    ec_read_planes(r, s.e_max, s.planes_kept, out);
    return out;
}

BlockCoefficients transform_block(std::span<const double> values, std::size_t ndim, const BotMatrix &t) {
    BlockCoefficients b;
    b.coeffs.assign(values.size(), 0.0);
    const auto e_in = block_exponent(values);
    if (!e_in) return b;
    for (std::size_t i = 0; i < values.size(); ++i)
        b.coeffs[i] = std::nearbyint(std::ldexp(values[i], kFixedPointBits - *e_in));
    bot_forward(std::span<double>(b.coeffs), ndim, t);
    for (double &c : b.coeffs) c = std::ldexp(c, *e_in - kFixedPointBits);
    b.e_max = block_exponent(b.coeffs);
    if (b.e_max) b.fixed = to_fixed(b.coeffs, *b.e_max);
    return b;
}

double coefficient_tolerance(double eb_abs, std::size_t ndim, const BotMatrix &t) {
    return eb_abs / std::pow(t.column_gain(), static_cast<double>(ndim));
}

}  // namespace adcs
