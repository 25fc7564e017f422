#include "adcs/codec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <string>

#include "adcs/bitstream.hpp"
#include "adcs/embedded.hpp"
#include "adcs/error.hpp"
#include "adcs/huffman.hpp"

namespace adcs {

namespace {

constexpr char kMagic[4] = {'A', 'D', 'C', 'S'};
// Block codes reserved by the transform codec.
constexpr unsigned kZeroBlock = 0;
constexpr unsigned kRawBlock = 255;

void put_value(BitWriter &w, DType t, double v) {
    if (t == DType::F32) w.put(std::bit_cast<std::uint32_t>(static_cast<float>(v)), 32);
    else w.put(std::bit_cast<std::uint64_t>(v), 64);
}

double get_value(BitReader &r, DType t) {
    if (t == DType::F32) return std::bit_cast<float>(static_cast<std::uint32_t>(r.get(32)));
    return std::bit_cast<double>(r.get(64));
}

void put_value(ByteWriter &w, DType t, double v) {
    if (t == DType::F32) w.put(static_cast<float>(v));
    else w.put(v);
}

double get_value(ByteReader &r, DType t) {
    return t == DType::F32 ? static_cast<double>(r.get<float>()) : r.get<double>();
}

FieldRecord make_record(const Field &f, const CodecParams &p) {
    FieldRecord r;
    r.name = f.name();
    r.dtype = f.dtype();
    r.dims = f.dims();
    r.family = p.family;
    r.eb_abs = p.eb_abs;
    r.min = f.min();
    r.max = f.max();
    return r;
}

void expect_end(const ByteReader &in) {
    if (in.remaining() != 0) throw Error(ErrorCode::CorruptStream, "trailing bytes after payload");
}

std::vector<std::uint8_t> take_bits(ByteReader &in, std::uint64_t &bit_count) {
    bit_count = in.get_varint();
    const std::uint64_t bytes = (bit_count + 7) / 8;
    if (bytes > in.remaining()) throw Error(ErrorCode::CorruptStream, "bitstream truncated");
    auto s = in.get_bytes(static_cast<std::size_t>(bytes));
    return {s.begin(), s.end()};
}

}  // namespace

double ErrorBound::resolve(double value_range) const {
    if (!(value > 0.0) || !std::isfinite(value)) throw Error(ErrorCode::InvalidBound, "error bound must be positive");
    if (kind == Kind::Absolute) return value;
    return value_range > 0.0 ? value * value_range : value;
}

void CodecParams::validate() const {
    if (!(eb_abs > 0.0) || !std::isfinite(eb_abs)) throw Error(ErrorCode::InvalidParams, "eb_abs must be positive");
    if (!(bot_t >= 0.0 && bot_t <= 1.0)) throw Error(ErrorCode::InvalidParams, "transform parameter outside [0, 1]");
    if (bin_count < 3 || bin_count % 2 == 0) throw Error(ErrorCode::InvalidParams, "bin count must be odd and >= 3");
}

double FieldRecord::bit_rate() const {
    const std::size_t n = element_count();
    return n ? 8.0 * static_cast<double>(payload.size()) / static_cast<double>(n) : 0.0;
}

// Predictor payload: version, bin count, outliers (count, then index delta and
// raw value each), Huffman table, bit count, bits. Outliers carry no symbol.
FieldRecord compress_predictor(const Field &f, const CodecParams &p) {
    p.validate();
    if (p.family != CodecFamily::Predictor) throw Error(ErrorCode::InvalidParams, "params name the transform codec");
    const double eb = p.eb_abs;
    const double delta = 2.0 * eb;
    const long radius = static_cast<long>(p.bin_count / 2);
    const DType dt = f.dtype();
    const LorenzoStencil st(f.dims());
    const auto data = f.data();

    std::vector<double> recon(f.size());
    std::vector<std::uint32_t> symbols;
    symbols.reserve(f.size());
    std::vector<std::size_t> outliers;
    st.for_each([&](std::size_t i, std::size_t j, std::size_t k, std::size_t off) {
        const double pred = st.predict(recon.data(), i, j, k);
        const double x = data[off];
        const double m = std::floor((x - pred) / delta + 0.5);
        if (std::abs(m) <= static_cast<double>(radius)) {
            const double r = round_to(dt, pred + m * delta);
            if (std::abs(r - x) <= eb) {
                recon[off] = r;
                symbols.push_back(static_cast<std::uint32_t>(static_cast<long>(m) + radius + 1));
                return;
            }
        }
        recon[off] = x;
        outliers.push_back(off);
    });

    ByteWriter w;
    w.put<std::uint8_t>(kPayloadVersion);
    w.put<std::uint32_t>(p.bin_count);
    w.put_varint(outliers.size());
    std::size_t prev = 0;
    for (std::size_t off : outliers) {
        w.put_varint(off - prev);
        put_value(w, dt, data[off]);
        prev = off;
    }
    if (symbols.empty()) {
        HuffmanTable().serialize(w);
        w.put_varint(0);
    } else {
        const HuffmanStream hs = huffman_encode(symbols);
        hs.table.serialize(w);
        w.put_varint(hs.bit_count);
        w.put_bytes(hs.bits);
    }
    FieldRecord r = make_record(f, p);
    r.payload = w.take();
    return r;
}

namespace {

Field decompress_predictor(const FieldRecord &r) {
    ByteReader in(r.payload);
    if (in.get<std::uint8_t>() != kPayloadVersion) throw Error(ErrorCode::UnknownVersion, "predictor payload version");
    const auto bin_count = in.get<std::uint32_t>();
    if (bin_count < 3 || bin_count % 2 == 0) throw Error(ErrorCode::CorruptStream, "bad bin count");
    const std::size_t n = r.element_count();
    const std::uint64_t n_out = in.get_varint();
    if (n_out > n) throw Error(ErrorCode::CorruptStream, "outlier count exceeds field size");
    std::vector<std::size_t> out_index(static_cast<std::size_t>(n_out));
    std::vector<double> out_value(out_index.size());
    std::size_t pos = 0;
    for (std::size_t i = 0; i < out_index.size(); ++i) {
        pos += static_cast<std::size_t>(in.get_varint());
        if (pos >= n || (i && pos <= out_index[i - 1])) throw Error(ErrorCode::CorruptStream, "outlier index");
        out_index[i] = pos;
        out_value[i] = get_value(in, r.dtype);
    }
    const HuffmanTable table = HuffmanTable::deserialize(in);
    std::uint64_t bit_count = 0;
    const auto bits = take_bits(in, bit_count);
    expect_end(in);
    BitReader br(bits, bit_count);
    const auto symbols = table.decode(br, n - out_index.size());

    const double delta = 2.0 * r.eb_abs;
    const long radius = static_cast<long>(bin_count / 2);
    const LorenzoStencil st(r.dims);
    std::vector<double> recon(n);
    std::size_t next_out = 0, next_sym = 0;
    st.for_each([&](std::size_t i, std::size_t j, std::size_t k, std::size_t off) {
        if (next_out < out_index.size() && out_index[next_out] == off) {
            recon[off] = out_value[next_out++];
            return;
        }
        const std::uint32_t s = symbols[next_sym++];
        if (s == kUnpredictableCode || s > bin_count) throw Error(ErrorCode::CorruptStream, "bad quantization code");
        const double pred = st.predict(recon.data(), i, j, k);
        recon[off] = round_to(r.dtype, pred + static_cast<double>(static_cast<long>(s) - 1 - radius) * delta);
    });
    return Field(r.name, r.dtype, r.dims, std::move(recon));
}

bool within_bound(const Block &b, std::span<const double> decoded, DType dt, double eb) {
    for (std::size_t s = 0; s < decoded.size(); ++s)
        if (!b.padded[s] && !(std::abs(round_to(dt, decoded[s]) - b.values[s]) <= eb)) return false;
    return true;
}

}  // namespace

// Transform payload: version, transform parameter, bit count, bits. Per block:
// an 8-bit code b (0 = all zero, 255 = raw values, otherwise the block's top
// exponent relative to the tolerance exponent); coded blocks then carry the
// Exp-Golomb count of planes kept beyond the rule, then the planes.
FieldRecord compress_transform(const Field &f, const CodecParams &p) {
    p.validate();
    if (p.family != CodecFamily::Transform) throw Error(ErrorCode::InvalidParams, "params name the predictor codec");
    const BotMatrix t(p.bot_t);
    const std::size_t ndim = f.ndim();
    const std::size_t size = block_size(ndim);
    const double eb = p.eb_abs;
    const double tol = coefficient_tolerance(eb, ndim, t);
    const int base = std::ilogb(tol);
    const DType dt = f.dtype();

    BitWriter w;
    std::vector<double> decoded(size);
    const std::size_t blocks = block_count(f.dims());
    for (std::size_t bi = 0; bi < blocks; ++bi) {
        const Block b = extract_block(f, bi);
        const BlockCoefficients bc = transform_block(b.values, ndim, t);
        auto write_raw = [&] {
            w.put(kRawBlock, 8);
            for (std::size_t s = 0; s < size; ++s)
                if (!b.padded[s]) put_value(w, dt, b.values[s]);
        };
        if (!bc.e_max) {
            w.put(kZeroBlock, 8);
            continue;
        }
        const long code = static_cast<long>(*bc.e_max) - base + 1;
        if (code <= 0) {
            std::fill(decoded.begin(), decoded.end(), 0.0);
            if (within_bound(b, decoded, dt, eb)) w.put(kZeroBlock, 8);
            else write_raw();
            continue;
        }
        if (code >= static_cast<long>(kRawBlock)) {
            write_raw();
            continue;
        }
        bool done = false;
        for (unsigned planes = std::min<unsigned>(static_cast<unsigned>(code), kMaxPlanes); planes <= kMaxPlanes;
             ++planes) {
            for (std::size_t s = 0; s < size; ++s) decoded[s] = truncated_value(bc.fixed[s], *bc.e_max, planes);
            bot_inverse(std::span<double>(decoded), ndim, t);
            if (!within_bound(b, decoded, dt, eb)) continue;
            w.put(static_cast<std::uint64_t>(code), 8);
            w.put_exp_golomb(planes - std::min<unsigned>(static_cast<unsigned>(code), kMaxPlanes));
            ec_write_planes(w, bc.fixed, planes);
            done = true;
            break;
        }
        if (!done) write_raw();
    }

    ByteWriter out;
    out.put<std::uint8_t>(kPayloadVersion);
    out.put<double>(p.bot_t);
    out.put_varint(w.bit_count());
    out.put_bytes(w.finish());
    FieldRecord r = make_record(f, p);
    r.payload = out.take();
    return r;
}

namespace {

// Slots of block `index` that fall inside the field.
std::vector<bool> slots_inside(const Dims &dims, std::size_t index) {
    const std::size_t ndim = dims.size();
    const Dims grid = block_grid(dims);
    std::array<std::size_t, 3> origin{};
    for (std::size_t a = ndim; a-- > 0;) {
        origin[a] = (index % grid[a]) * kBlockEdge;
        index /= grid[a];
    }
    std::vector<bool> inside(block_size(ndim), true);
    for (std::size_t s = 0; s < inside.size(); ++s) {
        std::size_t slot = s;
        for (std::size_t a = ndim; a-- > 0;) {
            if (origin[a] + slot % kBlockEdge >= dims[a]) inside[s] = false;
            slot /= kBlockEdge;
        }
    }
    return inside;
}

Field decompress_transform(const FieldRecord &r) {
    ByteReader in(r.payload);
    if (in.get<std::uint8_t>() != kPayloadVersion) throw Error(ErrorCode::UnknownVersion, "transform payload version");
    const double bot_t = in.get<double>();
    if (!(bot_t >= 0.0 && bot_t <= 1.0)) throw Error(ErrorCode::CorruptStream, "transform parameter");
    if (!(r.eb_abs > 0.0) || !std::isfinite(r.eb_abs)) throw Error(ErrorCode::CorruptStream, "error bound");
    std::uint64_t bit_count = 0;
    const auto bits = take_bits(in, bit_count);
    expect_end(in);

    const BotMatrix t(bot_t);
    const std::size_t ndim = r.dims.size();
    const std::size_t size = block_size(ndim);
    const int base = std::ilogb(coefficient_tolerance(r.eb_abs, ndim, t));
    BitReader br(bits, bit_count);
    std::vector<double> out(r.element_count());
    std::vector<double> values(size);
    const std::size_t blocks = block_count(r.dims);
    for (std::size_t bi = 0; bi < blocks; ++bi) {
        const auto code = static_cast<unsigned>(br.get(8));
        if (code == kZeroBlock) {
            std::fill(values.begin(), values.end(), 0.0);
        } else if (code == kRawBlock) {
            const auto inside = slots_inside(r.dims, bi);
            std::fill(values.begin(), values.end(), 0.0);
            for (std::size_t s = 0; s < size; ++s)
                if (inside[s]) values[s] = get_value(br, r.dtype);
        } else {
            const unsigned rule = std::min<unsigned>(code, kMaxPlanes);
            const std::uint64_t extra = br.get_exp_golomb();
            if (rule + extra > kMaxPlanes) throw Error(ErrorCode::CorruptStream, "plane count out of range");
            const auto planes = static_cast<unsigned>(rule + extra);
            const int e_max = static_cast<int>(code) + base - 1;
            ec_read_planes(br, e_max, planes, values);
            bot_inverse(std::span<double>(values), ndim, t);
        }
        for (double &v : values) v = round_to(r.dtype, v);
        scatter_block(r.dims, bi, values, out);
    }
    if (br.remaining() >= 8) throw Error(ErrorCode::CorruptStream, "trailing block data");
    return Field(r.name, r.dtype, r.dims, std::move(out));
}

}  // namespace

FieldRecord compress(const Field &f, const CodecParams &p) {
    return p.family == CodecFamily::Predictor ? compress_predictor(f, p) : compress_transform(f, p);
}

Field decompress(const FieldRecord &r) {
    if (r.dims.empty() || r.dims.size() > 3) throw Error(ErrorCode::CorruptStream, "bad dimensionality");
    return r.family == CodecFamily::Predictor ? decompress_predictor(r) : decompress_transform(r);
}

std::size_t record_header_bytes(const FieldRecord &r) {
    return 2 + r.name.size() + 1 + 1 + 8 * r.dims.size() + 1 + 8 + 8 + 8 + 8;
}

std::vector<std::uint8_t> write_archive(const CompressedArchive &a) {
    ByteWriter w;
    for (char c : kMagic) w.put(static_cast<std::uint8_t>(c));
    w.put<std::uint16_t>(kArchiveVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(a.records.size()));
    for (const auto &r : a.records) {
        if (r.name.size() > 0xffff) throw Error(ErrorCode::InvalidParams, "field name too long");
        w.put<std::uint16_t>(static_cast<std::uint16_t>(r.name.size()));
        w.put_bytes({reinterpret_cast<const std::uint8_t *>(r.name.data()), r.name.size()});
        w.put<std::uint8_t>(static_cast<std::uint8_t>(r.dtype));
        w.put<std::uint8_t>(static_cast<std::uint8_t>(r.dims.size()));
        for (auto d : r.dims) w.put<std::uint64_t>(d);
        w.put<std::uint8_t>(r.selection_bit());
        w.put<double>(r.eb_abs);
        w.put<double>(r.min);
        w.put<double>(r.max);
        w.put<std::uint64_t>(r.payload.size());
        w.put_bytes(r.payload);
    }
    return w.take();
}

CompressedArchive read_archive(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.begin(),
                                        [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; }))
        throw Error(ErrorCode::UnknownVersion, "not an archive (bad magic)");
    in.get_bytes(4);
    const auto version = in.get<std::uint16_t>();
    if (version != kArchiveVersion)
        throw Error(ErrorCode::UnknownVersion, "archive version " + std::to_string(version));
    const auto count = in.get<std::uint32_t>();
    CompressedArchive a;
    for (std::uint32_t i = 0; i < count; ++i) {
        FieldRecord r;
        const auto name_len = in.get<std::uint16_t>();
        const auto name = in.get_bytes(name_len);
        r.name.assign(name.begin(), name.end());
        const auto dtype = in.get<std::uint8_t>();
        if (dtype > 1) throw Error(ErrorCode::CorruptStream, "dtype tag " + std::to_string(dtype));
        r.dtype = static_cast<DType>(dtype);
        const auto ndim = in.get<std::uint8_t>();
        if (ndim < 1 || ndim > 3) throw Error(ErrorCode::CorruptStream, "ndim " + std::to_string(ndim));
        for (unsigned d = 0; d < ndim; ++d) {
            const auto e = in.get<std::uint64_t>();
            if (e == 0 || e > (std::uint64_t{1} << 40)) throw Error(ErrorCode::CorruptStream, "extent out of range");
            r.dims.push_back(static_cast<std::size_t>(e));
        }
        const auto bit = in.get<std::uint8_t>();
        if (bit > 1) throw Error(ErrorCode::CorruptStream, "selection bit " + std::to_string(bit));
        r.family = static_cast<CodecFamily>(bit);
        r.eb_abs = in.get<double>();
        r.min = in.get<double>();
        r.max = in.get<double>();
        const auto len = in.get<std::uint64_t>();
        if (len > in.remaining()) throw Error(ErrorCode::CorruptStream, "payload of '" + r.name + "' truncated");
        const auto payload = in.get_bytes(static_cast<std::size_t>(len));
        r.payload.assign(payload.begin(), payload.end());
        a.records.push_back(std::move(r));
    }
    if (in.remaining() != 0) throw Error(ErrorCode::CorruptStream, "trailing bytes after last record");
    return a;
}

}  // namespace adcs
