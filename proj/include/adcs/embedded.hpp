#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adcs/bitstream.hpp"
#include "adcs/transform.hpp"

namespace adcs {

/// Fraction bits of the fixed-point representation. A coefficient equal to
/// 2^e_max maps to 2^kFixedPointBits, so bit 30 is the block's top plane.
inline constexpr int kFixedPointBits = 30;
inline constexpr unsigned kMaxPlanes = kFixedPointBits;

/// floor(log2 max|v|), or nullopt for an all-zero span.
std::optional<int> block_exponent(std::span<const double> values);

/// Scales `coeff` by 2^(q - e_max) and rounds to an integer.
std::int64_t to_fixed(double coeff, int e_max);
std::vector<std::int64_t> to_fixed(std::span<const double> coeffs, int e_max);

/// Planes kept so every coefficient's truncation error stays below `tolerance`:
/// max(0, e_max - floor(log2 tolerance) + 1), clamped to kMaxPlanes.
unsigned planes_for_bound(int e_max, double tolerance);

/// Kept magnitude of a fixed-point coefficient with `planes` top planes.
inline std::uint64_t kept_magnitude(std::int64_t fixed, unsigned planes) {
    const std::uint64_t mag = static_cast<std::uint64_t>(fixed < 0 ? -fixed : fixed);
    return planes == 0 ? 0 : mag >> (kFixedPointBits + 1 - static_cast<int>(planes));
}

/// Bits the coder spends on a coefficient's magnitude: positions from its
/// leading one down to the cut plane, 0 when nothing survives the cut. This
/// is the staircase quantity the rate estimate samples.
unsigned coded_bits(std::int64_t fixed, unsigned planes);

/// Positions from the block's top plane down to the coefficient's lowest
/// nonzero kept bit; 0 when nothing survives the cut.
unsigned significant_bits(std::int64_t fixed, unsigned planes);

/// Reconstruction of a truncated coefficient: midpoint of the last kept
/// plane interval, or 0 when no bit survives.
double truncated_value(std::int64_t fixed, int e_max, unsigned planes);

/// Coefficient visiting order: ascending index sum, ties by slot.
const std::vector<std::size_t> &sequency_order(std::size_t ndim);

/// Bit-plane coded coefficients of one block.
struct EcBlockStream {
    int e_max = 0;
    unsigned planes_kept = 0;
    std::size_t count = 0;
    std::vector<std::uint8_t> bits;
    std::uint64_t bit_count = 0;
};

/// Writes `fixed` (block layout) truncated to `planes`. Per coefficient, in
/// sequency order: Exp-Golomb coded change in significant bits, then sign and
/// the bits below the leading one.
void ec_write_planes(BitWriter &out, std::span<const std::int64_t> fixed, unsigned planes);
void ec_read_planes(BitReader &in, int e_max, unsigned planes, std::span<double> out);

/// Bits ec_write_planes would emit.
std::uint64_t ec_planes_cost(std::span<const std::int64_t> fixed, unsigned planes);

EcBlockStream ec_encode_block(std::span<const std::int64_t> fixed, int e_max, double eb_abs);
std::vector<double> ec_decode_block(const EcBlockStream &s);

/// Block after exponent alignment, fixed-point conversion of the inputs and
/// the forward transform.
struct BlockCoefficients {
    std::vector<double> coeffs;  // real units
    std::optional<int> e_max;    // nullopt for an all-zero block
    std::vector<std::int64_t> fixed;
};

BlockCoefficients transform_block(std::span<const double> values, std::size_t ndim, const BotMatrix &t);

/// Coefficient-domain tolerance that keeps the inverse transform's pointwise
/// error within eb_abs: eb_abs / gain^n.
double coefficient_tolerance(double eb_abs, std::size_t ndim, const BotMatrix &t);

}  // namespace adcs
