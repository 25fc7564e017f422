#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace adcs {

enum class DType : std::uint8_t { F32 = 0, F64 = 1 };

constexpr std::size_t element_size(DType t) { return t == DType::F32 ? 4 : 8; }
constexpr unsigned element_bits(DType t) { return t == DType::F32 ? 32 : 64; }
constexpr const char *dtype_name(DType t) { return t == DType::F32 ? "f32" : "f64"; }

/// Rounds a double to the storage precision of `t`.
inline double round_to(DType t, double v) {
    return t == DType::F32 ? static_cast<double>(static_cast<float>(v)) : v;
}

using Dims = std::vector<std::size_t>;

std::size_t product(const Dims &dims);

/// Extents as "64x64x32".
std::string dims_to_string(const Dims &dims);
Dims parse_dims(const std::string &text);

/**
 * n-dimensional (1 <= n <= 3) floating-point array in row-major order.
 *
 * Values are held as doubles; for F32 fields every value is exactly
 * representable in single precision. Immutable once constructed.
 */
class Field {
  public:
    Field(std::string name, DType dtype, Dims dims, std::vector<double> data);

    const std::string &name() const { return name_; }
    DType dtype() const { return dtype_; }
    const Dims &dims() const { return dims_; }
    std::size_t ndim() const { return dims_.size(); }
    std::size_t size() const { return data_.size(); }
    std::span<const double> data() const { return data_; }
    double operator[](std::size_t i) const { return data_[i]; }

    double min() const { return min_; }
    double max() const { return max_; }
    double value_range() const { return max_ - min_; }

  private:
    std::string name_;
    DType dtype_;
    Dims dims_;
    std::vector<double> data_;
    double min_ = 0.0;
    double max_ = 0.0;
};

/// Decodes headerless little-endian IEEE-754 bytes.
Field ingest_raw(std::span<const std::uint8_t> bytes, const Dims &dims, DType dtype,
                 std::string name = "field");

/// Encodes a field in the same layout ingest_raw reads.
std::vector<std::uint8_t> to_raw(const Field &f);

inline constexpr std::size_t kBlockEdge = 4;

constexpr std::size_t block_size(std::size_t ndim) {
    std::size_t s = 1;
    for (std::size_t i = 0; i < ndim; ++i) s *= kBlockEdge;
    return s;
}

/**
 * A 4^n tile of a field. Slots falling outside the field are filled by edge
 * replication and flagged in `padded`; they carry no weight in error or
 * rate accounting.
 */
struct Block {
    std::size_t ndim = 1;
    std::array<std::size_t, 3> origin{};
    std::vector<double> values;
    std::vector<bool> padded;

    std::size_t size() const { return values.size(); }
    std::size_t real_count() const;
};

/// Block grid extents: ceil(dim / 4) per axis.
Dims block_grid(const Dims &dims);
std::size_t block_count(const Dims &dims);

/// Copies block number `index` (row-major over the block grid).
Block extract_block(const Field &f, std::size_t index);

/// Writes the non-padded slots of `values` (block layout) into `out`.
void scatter_block(const Dims &dims, std::size_t index, std::span<const double> values,
                   std::span<double> out);

struct SamplingConfig {
    double r_sp = 0.05;
    /// Points sampled per block for embedded-coding estimation, indexed by ndim.
    std::array<std::size_t, 4> ec_points{0, 3, 9, 16};

    std::size_t ec_points_for(std::size_t ndim) const { return ec_points.at(ndim); }
    void validate() const;
};

/// Indices of sampled blocks: ceil(B * r_sp) positions floor(i * B / count).
std::vector<std::size_t> sampled_block_indices(const Dims &dims, double r_sp);

std::vector<Block> sample_blocks(const Field &f, const SamplingConfig &cfg);

/// 4 x 4^(n-1) matrix, row-major (row = index along `axis`).
struct Unfolded {
    std::size_t cols = 1;
    std::vector<double> m;
    double at(std::size_t row, std::size_t col) const { return m[row * cols + col]; }
};

/// Column of element `index` (row-major block layout) when unfolded along
/// `axis` (1-based).
std::size_t unfold_column(std::size_t ndim, std::size_t axis, std::size_t index);

Unfolded unfold(std::span<const double> block, std::size_t ndim, std::size_t axis);
std::vector<double> fold(const Unfolded &m, std::size_t ndim, std::size_t axis);

}  // namespace adcs
