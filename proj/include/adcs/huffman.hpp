#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adcs/bitstream.hpp"

namespace adcs {

/**
 * Canonical Huffman code. Only code lengths are stored; codes are assigned
 * in (length, symbol) order. A stream with a single distinct symbol gets a
 * zero-length code and costs no payload bits.
 */
class HuffmanTable {
  public:
    struct Entry {
        std::uint32_t symbol;
        std::uint8_t length;
    };

    HuffmanTable() = default;
    /// Entries sorted by symbol, each length in [0, 64].
    explicit HuffmanTable(std::vector<Entry> entries);

    static HuffmanTable from_counts(std::span<const std::uint32_t> symbols, std::span<const std::uint64_t> counts);

    const std::vector<Entry> &entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// Code length for `symbol`; throws when absent.
    unsigned length_of(std::uint32_t symbol) const;

    /// Kraft sum Σ 2^-len (<= 1 for a valid prefix code).
    double kraft_sum() const;

    void serialize(ByteWriter &out) const;
    static HuffmanTable deserialize(ByteReader &in);

    void encode(std::span<const std::uint32_t> symbols, BitWriter &out) const;
    std::vector<std::uint32_t> decode(BitReader &in, std::size_t count) const;

  private:
    void build_codes();
    std::size_t index_of(std::uint32_t symbol) const;

    std::vector<Entry> entries_;
    // Bit-reversed canonical codes, parallel to entries_.
    std::vector<std::uint64_t> reversed_;
    // Canonical decode tables indexed by length.
    std::vector<std::uint64_t> first_code_;
    std::vector<std::uint32_t> first_index_;
    std::vector<std::uint32_t> count_;
    std::vector<std::uint32_t> by_code_;
};

struct HuffmanStream {
    HuffmanTable table;
    std::vector<std::uint8_t> bits;
    std::uint64_t bit_count = 0;
    std::size_t symbol_count = 0;

    double bits_per_symbol() const {
        return symbol_count ? static_cast<double>(bit_count) / static_cast<double>(symbol_count) : 0.0;
    }
};

HuffmanStream huffman_encode(std::span<const std::uint32_t> symbols);
std::vector<std::uint32_t> huffman_decode(std::span<const std::uint8_t> bits, std::uint64_t bit_count,
                                          const HuffmanTable &table, std::size_t count);

/// Shannon entropy (bits/symbol) of the empirical distribution of `symbols`.
double empirical_entropy(std::span<const std::uint32_t> symbols);

}  // namespace adcs
