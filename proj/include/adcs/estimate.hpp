#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "adcs/field.hpp"
#include "adcs/quantize.hpp"
#include "adcs/transform.hpp"

namespace adcs {

enum class CodecFamily : std::uint8_t { Predictor = 0, Transform = 1 };

const char *family_name(CodecFamily f);

inline constexpr std::uint32_t kDefaultPdfBins = 65535;

/// Bits/value added to the entropy estimate for the predictor codec to
/// cover Huffman, table and outlier overhead.
inline constexpr double kSzBitrateOffset = 0.5;

/// PSNR reported when the error is exactly zero.
inline constexpr double kPsnrSentinel = 999.0;

/**
 * Histogram of sampled values over [-A, A] with A = max |sample|. Stored
 * sparsely: only occupied bins are kept, in ascending bin order. When A is 0
 * all mass sits in the centre bin.
 */
class ErrorHistogram {
  public:
    struct Bin {
        std::uint32_t index;
        std::uint64_t count;
    };

    ErrorHistogram(double half_range, std::uint32_t bin_count, std::vector<Bin> bins);

    double half_range() const { return half_range_; }
    std::uint32_t bin_count() const { return bin_count_; }
    double bin_width() const { return 2.0 * half_range_ / bin_count_; }
    double lower_edge(std::size_t i) const { return -half_range_ + static_cast<double>(i) * bin_width(); }

    const std::vector<Bin> &bins() const { return bins_; }
    std::uint64_t total() const { return total_; }
    std::uint64_t count(std::size_t i) const;
    /// Dense copy of all bin counts.
    std::vector<std::uint64_t> counts() const;
    double probability(std::size_t i) const { return static_cast<double>(count(i)) / static_cast<double>(total_); }
    bool is_point_mass() const { return half_range_ == 0.0; }
    /// Mean using bin centres.
    double mean() const;

  private:
    double half_range_;
    std::uint32_t bin_count_;
    std::vector<Bin> bins_;
    std::uint64_t total_ = 0;
};

ErrorHistogram build_histogram(std::span<const double> samples, std::uint32_t n_pdf = kDefaultPdfBins);

/// Histogram resolution for a small sample: Freedman-Diaconis bin width
/// 2·IQR·N^(-1/3) over [-A, A], capped at max_bins (odd).
std::uint32_t adaptive_pdf_bins(std::span<const double> samples, std::uint32_t max_bins = kDefaultPdfBins);

/// Histogram mass per quantizer bin, spreading each histogram bin uniformly
/// over the quantizer bins it overlaps. Mass outside the quantizer range is
/// folded into the end bins. Returned sparse, ascending by quantizer bin.
std::vector<std::pair<std::size_t, double>> quantizer_bin_mass(const ErrorHistogram &hist, const QuantizerSpec &spec);

/// Shannon entropy of a probability vector (zeros ignored).
double entropy_bits(std::span<const double> probabilities);

double entropy_bitrate(const ErrorHistogram &hist, const QuantizerSpec &spec);

/// Entropy of a linear quantizer with bin width delta, plus `offset`.
double estimate_sz_bitrate(const ErrorHistogram &hist, double delta, std::uint32_t bin_count = kDefaultBinCount,
                           double offset = kSzBitrateOffset);

/// PSNR of uniform in-bin error at bin width delta: 20 log10(VR/δ) + 10 log10 12.
double estimate_sz_psnr(double value_range, double delta);
/// The same with δ = 2·eb_rel·VR.
double psnr_from_eb(double eb_rel);
/// Inverse of estimate_sz_psnr.
double delta_from_psnr(double value_range, double psnr);

/// -10 log10 MSE + 20 log10 VR, or kPsnrSentinel when MSE is 0.
double psnr_from_mse(double mse, double value_range);

/// (1/12) Σ δ_i² · mass_i.
double estimate_mse_static(const ErrorHistogram &hist, const QuantizerSpec &spec);

struct QualityEstimate {
    CodecFamily family = CodecFamily::Predictor;
    double bit_rate = 0.0;
    double psnr = 0.0;
    double mse = 0.0;
    double nrmse = 0.0;

    double compression_ratio(DType t) const {
        return bit_rate > 0.0 ? element_bits(t) / bit_rate : 0.0;
    }
};

/// Equal-probability bins: every code equally likely, so BR = 1 + log2 n and
/// MSE = Σ δ_i² / (12 (2n-1)).
QualityEstimate estimate_equalprob(const QuantizerSpec &spec, double value_range);

struct EcStats {
    /// Sampled positions in sequency order.
    std::vector<std::size_t> positions;
    std::size_t blocks = 0;
    std::size_t real_elements = 0;
    double mean_nsb = 0.0;
    double mean_delta_bits = 0.0;
    double header_bits = 0.0;
    double mse_sp = 0.0;
};

struct EcEstimate {
    QualityEstimate quality;
    EcStats stats;
};

/// Positions sampled per block, in sequency order, for `count` points.
std::vector<std::size_t> ec_sample_positions(std::size_t ndim, std::size_t count);

/// Piecewise-linear interpolation of values known at ascending `positions`
/// over [0, size); held constant beyond the end points.
std::vector<double> interpolate_positions(std::span<const std::size_t> positions, std::span<const double> values,
                                          std::size_t size);

/// Bit-rate and PSNR of the transform codec from raw (untransformed) sampled
/// blocks.
EcEstimate estimate_ec(const std::vector<Block> &blocks, const SamplingConfig &cfg, double eb_abs,
                       double value_range, const BotMatrix &t = BotMatrix());

/**
 * Lorenzo prediction errors at the non-padded points of the given blocks.
 * When delta > 0, predictions inside a block use values passed through a
 * linear quantizer of width delta, as the codec would;
 * neighbours outside it take their original values.
 */
std::vector<double> sampled_prediction_errors(const Field &f, std::span<const std::size_t> block_indices,
                                              double delta = 0.0);

/// Approximate cost of an outlier's index gap, on top of its raw value.
inline constexpr double kOutlierIndexBits = 8.0;

struct PredictorEstimate {
    QualityEstimate quality;
    double entropy = 0.0;
    /// Share of sampled errors outside the quantizer range.
    double outlier_fraction = 0.0;
};

/**
 * Predictor codec at bound eb_abs from the sampled blocks: entropy of the
 * simulated prediction errors at bin width 2·eb_abs, plus `offset`, plus raw
 * storage for errors the quantizer cannot reach. PSNR from the bin width.
 * Error values repeated exactly in the sample count as point masses; only
 * the rest goes through the histogram.
 */
PredictorEstimate estimate_predictor(const Field &f, std::span<const std::size_t> block_indices, double eb_abs,
                                     std::uint32_t bin_count = kDefaultBinCount,
                                     double offset = kSzBitrateOffset);

}  // namespace adcs
