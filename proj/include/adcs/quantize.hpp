#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace adcs {

class ErrorHistogram;

enum class QuantizerKind : std::uint8_t { Linear, Log, EqualProb };

inline constexpr std::uint32_t kDefaultBinCount = 65535;

/// Code reserved for values that fall outside every bin.
inline constexpr std::uint32_t kUnpredictableCode = 0;

/**
 * Vector quantizer with 2n-1 half-open bins [s_i, s_{i+1}) reconstructed at
 * their midpoints. Bins are 0-based here; codes emitted by quantize() are
 * bin + 1 so that 0 stays free for unpredictable values.
 *
 * Linear specs are evaluated arithmetically and never materialise their
 * 65k-entry boundary table.
 */
class QuantizerSpec {
  public:
    static QuantizerSpec linear(double bin_width, std::uint32_t bin_count);
    static QuantizerSpec from_boundaries(QuantizerKind kind, std::vector<double> boundaries);

    QuantizerKind kind() const { return kind_; }
    std::uint32_t bin_count() const { return bin_count_; }
    /// n such that bin_count = 2n - 1.
    std::uint32_t half_count() const { return (bin_count_ + 1) / 2; }

    double boundary(std::size_t i) const;
    double midpoint(std::size_t bin) const;
    double bin_size(std::size_t bin) const;
    double lower() const { return boundary(0); }
    double upper() const { return boundary(bin_count_); }

    /// Bin holding x, or nullopt when x lies outside [s_1, s_2n).
    std::optional<std::size_t> locate(double x) const;

    /// Linear specs only.
    double bin_width() const { return width_; }

  private:
    QuantizerKind kind_ = QuantizerKind::Linear;
    std::uint32_t bin_count_ = 0;
    double width_ = 0.0;
    double origin_ = 0.0;
    std::vector<double> boundaries_;
};

/// δ = 2·eb_abs, bins centred on zero.
QuantizerSpec linear_spec(double eb_abs, std::uint32_t bin_count = kDefaultBinCount);

/// Log-scale bins δ_n = 2b, δ_{n±i} = b^i - b^(i-1) around zero.
QuantizerSpec log_spec_with_base(double base, std::uint32_t bin_count);

/// Picks the base so the outermost boundaries sit at ±max_abs.
QuantizerSpec log_spec(double max_abs, std::uint32_t bin_count);

/// Boundaries at quantiles of the histogram so each bin carries equal mass.
QuantizerSpec equalprob_spec(const ErrorHistogram &hist, std::uint32_t bin_count);

struct QuantizedField {
    std::vector<std::uint32_t> codes;
    std::vector<std::pair<std::size_t, double>> unpredictable;
};

QuantizedField quantize(std::span<const double> values, const QuantizerSpec &spec);
std::vector<double> dequantize(const QuantizedField &q, const QuantizerSpec &spec);

}  // namespace adcs
