#include "adcs/huffman.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace adcs {

HuffmanTable::HuffmanTable(std::vector<Entry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i && entries_[i].symbol <= entries_[i - 1].symbol)
            throw Error(ErrorCode::CorruptStream, "Huffman table symbols not strictly increasing");
        if (entries_[i].length > 64) throw Error(ErrorCode::CorruptStream, "Huffman code length above 64");
        if (entries_[i].length == 0 && entries_.size() > 1)
            throw Error(ErrorCode::CorruptStream, "zero-length code in multi-symbol table");
    }
    if (entries_.size() > 1 && kraft_sum() > 1.0 + 1e-12)
        throw Error(ErrorCode::CorruptStream, "Huffman code lengths violate the Kraft inequality");
    build_codes();
}

HuffmanTable HuffmanTable::from_counts(std::span<const std::uint32_t> symbols, std::span<const std::uint64_t> counts) {
    const std::size_t n = symbols.size();
    std::vector<Entry> entries(n);
    for (std::size_t i = 0; i < n; ++i) entries[i] = {symbols[i], 0};
    if (n <= 1) return HuffmanTable(std::move(entries));

    // Two-queue construction over leaves sorted by (count, symbol); ties
    // prefer leaves, which keeps the result deterministic.
    std::vector<std::size_t> leaves(n);
    std::iota(leaves.begin(), leaves.end(), 0);
    std::sort(leaves.begin(), leaves.end(), [&](std::size_t a, std::size_t b) {
        return counts[a] != counts[b] ? counts[a] < counts[b] : symbols[a] < symbols[b];
    });
    std::vector<std::uint64_t> weight(2 * n - 1);
    std::vector<std::size_t> parent(2 * n - 1, 0);
    for (std::size_t i = 0; i < n; ++i) weight[i] = counts[i];
    std::size_t leaf_pos = 0, node_pos = n, next_node = n;
    auto pop = [&]() {
        if (leaf_pos < n && (node_pos >= next_node || weight[leaves[leaf_pos]] <= weight[node_pos]))
            return leaves[leaf_pos++];
        return node_pos++;
    };
    while (next_node < 2 * n - 1) {
        const std::size_t a = pop();
        const std::size_t b = pop();
        weight[next_node] = weight[a] + weight[b];
        parent[a] = parent[b] = next_node;
        ++next_node;
    }
    // Parents always have larger ids, so walk down from the root.
    std::vector<std::uint8_t> depth(2 * n - 1, 0);
    for (std::size_t id = 2 * n - 2; id-- > 0;) depth[id] = static_cast<std::uint8_t>(depth[parent[id]] + 1);
    for (std::size_t i = 0; i < n; ++i) entries[i].length = depth[i];

    std::sort(entries.begin(), entries.end(), [](const Entry &a, const Entry &b) { return a.symbol < b.symbol; });
    return HuffmanTable(std::move(entries));
}

double HuffmanTable::kraft_sum() const {
    double s = 0.0;
    for (const auto &e : entries_) s += std::ldexp(1.0, -static_cast<int>(e.length));
    return s;
}

void HuffmanTable::build_codes() {
    reversed_.assign(entries_.size(), 0);
    first_code_.assign(66, 0);
    first_index_.assign(66, 0);
    count_.assign(66, 0);
    by_code_.clear();
    if (entries_.size() <= 1) return;

    for (const auto &e : entries_) ++count_[e.length];
    std::uint64_t code = 0;
    std::uint32_t index = 0;
    for (unsigned len = 1; len <= 64; ++len) {
        code = (code + count_[len - 1]) << 1;
        if (len == 1) code = 0;
        first_code_[len] = code;
        first_index_[len] = index;
        index += count_[len];
    }
    by_code_.resize(entries_.size());
    std::vector<std::uint32_t> next(66, 0);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const unsigned len = entries_[i].length;
        const std::uint32_t rank = next[len]++;
        by_code_[first_index_[len] + rank] = static_cast<std::uint32_t>(i);
        const std::uint64_t c = first_code_[len] + rank;
        std::uint64_t r = 0;
        for (unsigned b = 0; b < len; ++b) r |= ((c >> b) & 1u) << (len - 1 - b);
        reversed_[i] = r;
    }
}

std::size_t HuffmanTable::index_of(std::uint32_t symbol) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), symbol,
                               [](const Entry &e, std::uint32_t s) { return e.symbol < s; });
    if (it == entries_.end() || it->symbol != symbol)
        throw Error(ErrorCode::InvalidParams, "symbol " + std::to_string(symbol) + " not in Huffman table");
    return static_cast<std::size_t>(it - entries_.begin());
}

unsigned HuffmanTable::length_of(std::uint32_t symbol) const { return entries_[index_of(symbol)].length; }

// Table layout: entry count, then a bit block holding the first symbol
// (32 bits) and first length (7 bits) followed, per further entry, by
// Exp-Golomb gaps to the next symbol and zigzagged length changes.
void HuffmanTable::serialize(ByteWriter &out) const {
    out.put_varint(entries_.size());
    if (entries_.empty()) return;
    BitWriter w;
    w.put(entries_.front().symbol, 32);
    w.put(entries_.front().length, 7);
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        w.put_exp_golomb(entries_[i].symbol - entries_[i - 1].symbol - 1);
        w.put_exp_golomb(zigzag(static_cast<std::int64_t>(entries_[i].length) - entries_[i - 1].length));
    }
    out.put_varint(w.bit_count());
    out.put_bytes(w.finish());
}

HuffmanTable HuffmanTable::deserialize(ByteReader &in) {
    const std::uint64_t n = in.get_varint();
    if (n == 0) return HuffmanTable();
    if (n > (std::uint64_t{1} << 32)) throw Error(ErrorCode::CorruptStream, "Huffman table too large");
    const std::uint64_t bits = in.get_varint();
    if ((bits + 7) / 8 > in.remaining()) throw Error(ErrorCode::CorruptStream, "Huffman table truncated");
    BitReader r(in.get_bytes(static_cast<std::size_t>((bits + 7) / 8)), bits);
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, bits)));
    std::uint64_t symbol = r.get(32);
    std::int64_t length = static_cast<std::int64_t>(r.get(7));
    entries.push_back({static_cast<std::uint32_t>(symbol), static_cast<std::uint8_t>(length)});
    for (std::uint64_t i = 1; i < n; ++i) {
        symbol += r.get_exp_golomb() + 1;
        length += unzigzag(r.get_exp_golomb());
        if (symbol > 0xffffffffu || length < 0 || length > 64)
            throw Error(ErrorCode::CorruptStream, "Huffman table entry out of range");
        entries.push_back({static_cast<std::uint32_t>(symbol), static_cast<std::uint8_t>(length)});
    }
    return HuffmanTable(std::move(entries));
}

void HuffmanTable::encode(std::span<const std::uint32_t> symbols, BitWriter &out) const {
    if (entries_.size() <= 1) {
        for (auto s : symbols) index_of(s);
        return;
    }
    // Dense lookup when the alphabet is compact, binary search otherwise.
    const std::uint32_t max_symbol = entries_.back().symbol;
    if (max_symbol < (1u << 20)) {
        std::vector<std::int32_t> slot(max_symbol + 1, -1);
        for (std::size_t i = 0; i < entries_.size(); ++i) slot[entries_[i].symbol] = static_cast<std::int32_t>(i);
        for (auto s : symbols) {
            if (s > max_symbol || slot[s] < 0)
                throw Error(ErrorCode::InvalidParams, "symbol " + std::to_string(s) + " not in Huffman table");
            const auto i = static_cast<std::size_t>(slot[s]);
            out.put(reversed_[i], entries_[i].length);
        }
        return;
    }
    for (auto s : symbols) {
        const std::size_t i = index_of(s);
        out.put(reversed_[i], entries_[i].length);
    }
}

std::vector<std::uint32_t> HuffmanTable::decode(BitReader &in, std::size_t count) const {
    std::vector<std::uint32_t> out(count);
    if (count == 0) return out;
    if (entries_.empty()) throw Error(ErrorCode::CorruptStream, "empty Huffman table");
    if (entries_.size() == 1) {
        std::fill(out.begin(), out.end(), entries_.front().symbol);
        return out;
    }
    for (std::size_t k = 0; k < count; ++k) {
        std::uint64_t code = 0;
        unsigned len = 0;
        for (;;) {
            code = (code << 1) | (in.get_bit() ? 1u : 0u);
            if (++len > 64) throw Error(ErrorCode::CorruptStream, "invalid Huffman code");
            if (count_[len] && code >= first_code_[len] && code - first_code_[len] < count_[len]) {
                out[k] = entries_[by_code_[first_index_[len] + (code - first_code_[len])]].symbol;
                break;
            }
        }
    }
    return out;
}

namespace {

void count_symbols(std::span<const std::uint32_t> symbols, std::vector<std::uint32_t> &alphabet,
                   std::vector<std::uint64_t> &counts) {
    std::vector<std::uint32_t> sorted(symbols.begin(), symbols.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        alphabet.push_back(sorted[i]);
        counts.push_back(j - i);
        i = j;
    }
}

}  // namespace

HuffmanStream huffman_encode(std::span<const std::uint32_t> symbols) {
    if (symbols.empty()) throw Error(ErrorCode::InvalidParams, "cannot Huffman-code an empty sequence");
    std::vector<std::uint32_t> alphabet;
    std::vector<std::uint64_t> counts;
    count_symbols(symbols, alphabet, counts);
    HuffmanStream s;
    s.table = HuffmanTable::from_counts(alphabet, counts);
    BitWriter w;
    s.table.encode(symbols, w);
    s.bit_count = w.bit_count();
    s.bits = w.finish();
    s.symbol_count = symbols.size();
    return s;
}

std::vector<std::uint32_t> huffman_decode(std::span<const std::uint8_t> bits, std::uint64_t bit_count,
                                          const HuffmanTable &table, std::size_t count) {
    BitReader r(bits, bit_count);
    return table.decode(r, count);
}

double empirical_entropy(std::span<const std::uint32_t> symbols) {
    if (symbols.empty()) return 0.0;
    std::vector<std::uint32_t> alphabet;
    std::vector<std::uint64_t> counts;
    count_symbols(symbols, alphabet, counts);
    const double n = static_cast<double>(symbols.size());
    double h = 0.0;
    for (auto c : counts) {
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace adcs
