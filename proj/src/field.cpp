#include "adcs/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

#include "adcs/error.hpp"

namespace adcs {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::SizeMismatch: return "SizeMismatch";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::AxisOutOfRange: return "AxisOutOfRange";
        case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
        case ErrorCode::InvalidBound: return "InvalidBound";
        case ErrorCode::EmptyHistogram: return "EmptyHistogram";
        case ErrorCode::EmptySample: return "EmptySample";
        case ErrorCode::CorruptStream: return "CorruptStream";
        case ErrorCode::UnknownVersion: return "UnknownVersion";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Usage: return "Usage";
    }
    return "Unknown";
}

std::size_t product(const Dims &dims) {
    std::size_t p = 1;
    for (auto d : dims) p *= d;
    return p;
}

std::string dims_to_string(const Dims &dims) {
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(dims[i]);
    }
    return s;
}

Dims parse_dims(const std::string &text) {
    Dims dims;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, 'x')) {
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw Error(ErrorCode::Usage, "bad dims '" + text + "'");
        dims.push_back(std::stoull(tok));
    }
    if (dims.empty() || dims.size() > 3)
        throw Error(ErrorCode::Usage, "dims must have 1 to 3 extents: '" + text + "'");
    return dims;
}

Field::Field(std::string name, DType dtype, Dims dims, std::vector<double> data)
    : name_(std::move(name)), dtype_(dtype), dims_(std::move(dims)), data_(std::move(data)) {
    if (dims_.empty() || dims_.size() > 3)
        throw Error(ErrorCode::ShapeMismatch, "field must have 1 to 3 dimensions");
    for (auto d : dims_)
        if (d == 0) throw Error(ErrorCode::ShapeMismatch, "zero extent");
    if (product(dims_) != data_.size())
        throw Error(ErrorCode::SizeMismatch, "dims " + dims_to_string(dims_) + " do not match " +
                                                 std::to_string(data_.size()) + " elements");
    bool first = true;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        double v = data_[i];
        if (!std::isfinite(v))
            throw Error(ErrorCode::NonFiniteValue, "element " + std::to_string(i) + " of '" + name_ + "'");
        if (first) {
            min_ = max_ = v;
            first = false;
        } else {
            min_ = std::min(min_, v);
            max_ = std::max(max_, v);
        }
    }
}

namespace {

template <class U>
U load_le(const std::uint8_t *p) {
    U v{};
    std::memcpy(&v, p, sizeof(U));
    if constexpr (std::endian::native == std::endian::big) {
        auto *b = reinterpret_cast<std::uint8_t *>(&v);
        std::reverse(b, b + sizeof(U));
    }
    return v;
}

template <class U>
void store_le(U v, std::uint8_t *p) {
    std::memcpy(p, &v, sizeof(U));
    if constexpr (std::endian::native == std::endian::big) std::reverse(p, p + sizeof(U));
}

}  // namespace

Field ingest_raw(std::span<const std::uint8_t> bytes, const Dims &dims, DType dtype, std::string name) {
    const std::size_t n = product(dims);
    const std::size_t es = element_size(dtype);
    if (bytes.size() != n * es)
        throw Error(ErrorCode::SizeMismatch, "expected " + std::to_string(n * es) + " bytes for " +
                                                 dims_to_string(dims) + ", got " + std::to_string(bytes.size()));
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t *p = bytes.data() + i * es;
        data[i] = dtype == DType::F32 ? static_cast<double>(std::bit_cast<float>(load_le<std::uint32_t>(p)))
                                      : std::bit_cast<double>(load_le<std::uint64_t>(p));
    }
    return Field(std::move(name), dtype, dims, std::move(data));
}

std::vector<std::uint8_t> to_raw(const Field &f) {
    const std::size_t es = element_size(f.dtype());
    std::vector<std::uint8_t> out(f.size() * es);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f.dtype() == DType::F32)
            store_le(std::bit_cast<std::uint32_t>(static_cast<float>(f[i])), out.data() + i * es);
        else
            store_le(std::bit_cast<std::uint64_t>(f[i]), out.data() + i * es);
    }
    return out;
}

std::size_t Block::real_count() const {
    return static_cast<std::size_t>(std::count(padded.begin(), padded.end(), false));
}

Dims block_grid(const Dims &dims) {
    Dims g(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) g[i] = (dims[i] + kBlockEdge - 1) / kBlockEdge;
    return g;
}

std::size_t block_count(const Dims &dims) { return product(block_grid(dims)); }

namespace {

// Origin of block `index` and the row-major strides of the field.
struct BlockGeometry {
    std::size_t ndim;
    std::array<std::size_t, 3> origin{};
    std::array<std::size_t, 3> extent{};
    std::array<std::size_t, 3> stride{};

    BlockGeometry(const Dims &dims, std::size_t index) : ndim(dims.size()) {
        const Dims grid = block_grid(dims);
        for (std::size_t a = ndim; a-- > 0;) {
            origin[a] = (index % grid[a]) * kBlockEdge;
            index /= grid[a];
            extent[a] = dims[a];
        }
        std::size_t s = 1;
        for (std::size_t a = ndim; a-- > 0;) {
            stride[a] = s;
            s *= dims[a];
        }
    }

    // Field offset for in-block slot, with edge replication; `padded` set when clamped.
    std::size_t offset(std::size_t slot, bool &padded) const {
        std::size_t off = 0;
        padded = false;
        for (std::size_t a = ndim; a-- > 0;) {
            std::size_t local = slot % kBlockEdge;
            slot /= kBlockEdge;
            std::size_t g = origin[a] + local;
            if (g >= extent[a]) {
                g = extent[a] - 1;
                padded = true;
            }
            off += g * stride[a];
        }
        return off;
    }
};

}  // namespace

Block extract_block(const Field &f, std::size_t index) {
    BlockGeometry geo(f.dims(), index);
    Block b;
    b.ndim = f.ndim();
    b.origin = geo.origin;
    const std::size_t n = block_size(b.ndim);
    b.values.resize(n);
    b.padded.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        bool pad = false;
        b.values[s] = f[geo.offset(s, pad)];
        b.padded[s] = pad;
    }
    return b;
}

void scatter_block(const Dims &dims, std::size_t index, std::span<const double> values, std::span<double> out) {
    BlockGeometry geo(dims, index);
    for (std::size_t s = 0; s < values.size(); ++s) {
        bool pad = false;
        std::size_t off = geo.offset(s, pad);
        if (!pad) out[off] = values[s];
    }
}

void SamplingConfig::validate() const {
    if (!(r_sp > 0.0 && r_sp <= 1.0))
        throw Error(ErrorCode::ParameterOutOfRange, "r_sp must lie in (0, 1]");
    for (std::size_t n = 1; n <= 3; ++n)
        if (ec_points[n] == 0 || ec_points[n] > block_size(n))
            throw Error(ErrorCode::ParameterOutOfRange, "per-block sample count out of range");
}

std::vector<std::size_t> sampled_block_indices(const Dims &dims, double r_sp) {
    const std::size_t total = block_count(dims);
    // Guard against 0.05 * 260 landing a hair above 13.
    auto count = static_cast<std::size_t>(std::ceil(static_cast<double>(total) * r_sp - 1e-9));
    count = std::clamp<std::size_t>(count, 1, total);
    std::vector<std::size_t> idx(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = i * total / count;
    return idx;
}

std::vector<Block> sample_blocks(const Field &f, const SamplingConfig &cfg) {
    cfg.validate();
    std::vector<Block> blocks;
    for (auto i : sampled_block_indices(f.dims(), cfg.r_sp)) blocks.push_back(extract_block(f, i));
    return blocks;
}

std::size_t unfold_column(std::size_t ndim, std::size_t axis, std::size_t index) {
    if (axis < 1 || axis > ndim) throw Error(ErrorCode::AxisOutOfRange, "axis " + std::to_string(axis));
    // Row-major slot -> 0-based indices i_1..i_n (i_1 slowest).
    std::array<std::size_t, 3> i{};
    for (std::size_t a = ndim; a-- > 0;) {
        i[a] = index % kBlockEdge;
        index /= kBlockEdge;
    }
    std::size_t j = 0;
    std::size_t w = 1;
    for (std::size_t l = 1; l <= ndim; ++l) {
        if (l == axis) continue;
        j += w * i[l - 1];
        w *= kBlockEdge;
    }
    return j;
}

namespace {

std::size_t unfold_row(std::size_t ndim, std::size_t axis, std::size_t index) {
    for (std::size_t a = ndim; a-- > axis;) index /= kBlockEdge;
    return index % kBlockEdge;
}

}  // namespace

Unfolded unfold(std::span<const double> block, std::size_t ndim, std::size_t axis) {
    if (axis < 1 || axis > ndim) throw Error(ErrorCode::AxisOutOfRange, "axis " + std::to_string(axis));
    Unfolded u;
    u.cols = block_size(ndim) / kBlockEdge;
    u.m.resize(block.size());
    for (std::size_t s = 0; s < block.size(); ++s)
        u.m[unfold_row(ndim, axis, s) * u.cols + unfold_column(ndim, axis, s)] = block[s];
    return u;
}

std::vector<double> fold(const Unfolded &m, std::size_t ndim, std::size_t axis) {
    if (axis < 1 || axis > ndim) throw Error(ErrorCode::AxisOutOfRange, "axis " + std::to_string(axis));
    std::vector<double> out(m.m.size());
    for (std::size_t s = 0; s < out.size(); ++s)
        out[s] = m.m[unfold_row(ndim, axis, s) * m.cols + unfold_column(ndim, axis, s)];
    return out;
}

}  // namespace adcs
