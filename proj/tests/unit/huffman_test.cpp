#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "adcs/bitstream.hpp"
#include "adcs/huffman.hpp"
#include "helpers.hpp"

using namespace adcs;

namespace {

double reference_entropy(const std::vector<std::uint32_t> &s) {
    std::map<std::uint32_t, double> c;
    for (auto v : s) c[v] += 1.0;
    double h = 0.0;
    for (auto &[k, n] : c) h -= n / s.size() * std::log2(n / s.size());
    return h;
}

std::vector<std::uint32_t> roundtrip(const HuffmanStream &st) {
    // Table goes through serialization too.
    ByteWriter w;
    st.table.serialize(w);
    const auto bytes = w.take();
    ByteReader r(bytes);
    const HuffmanTable t = HuffmanTable::deserialize(r);
    CHECK(r.remaining() == 0);
    return huffman_decode(st.bits, st.bit_count, t, st.symbol_count);
}

}  // namespace

TEST_CASE("bit writer and reader") {
    BitWriter w;
    w.put(0b101, 3);
    w.put(0xdeadbeefcafef00dull, 64);
    for (std::uint64_t v : {0ull, 1ull, 2ull, 77ull, 1ull << 40}) w.put_exp_golomb(v);
    w.put_bit(true);
    const std::uint64_t n = w.bit_count();
    const auto bytes = w.finish();
    CHECK(bytes.size() == (n + 7) / 8);
    BitReader r(bytes, n);
    CHECK(r.get(3) == 0b101);
    CHECK(r.get(64) == 0xdeadbeefcafef00dull);
    for (std::uint64_t v : {0ull, 1ull, 2ull, 77ull, 1ull << 40}) CHECK(r.get_exp_golomb() == v);
    CHECK(r.get_bit());
    CHECK(r.remaining() == 0);
    CHECK_ERROR_CODE(r.get_bit(), ErrorCode::CorruptStream);
    CHECK(exp_golomb_length(0) == 1);
    CHECK(exp_golomb_length(1) == 3);
    CHECK(exp_golomb_length(6) == 5);
    for (std::int64_t v : {0ll, -1ll, 1ll, -1000ll, 123456789ll}) CHECK(unzigzag(zigzag(v)) == v);
    CHECK(zigzag(-1) == 1);
    CHECK(zigzag(2) == 4);
}

TEST_CASE("byte writer and reader") {
    ByteWriter w;
    w.put<std::uint16_t>(0x1234);
    w.put<double>(-2.5);
    w.put_varint(300);
    const auto b = w.take();
    CHECK(b[0] == 0x34);
    ByteReader r(b);
    CHECK(r.get<std::uint16_t>() == 0x1234);
    CHECK(r.get<double>() == -2.5);
    CHECK(r.get_varint() == 300);
    CHECK_ERROR_CODE(r.get<std::uint8_t>(), ErrorCode::CorruptStream);
}

TEST_CASE("Huffman examples") {
    SUBCASE("single symbol costs at most 1 bit per value") {
        const std::vector<std::uint32_t> s(1000, 42);
        const auto st = huffman_encode(s);
        CHECK(st.bits_per_symbol() <= 1.0);
        CHECK(roundtrip(st) == s);
    }
    SUBCASE("two equally likely symbols cost 1 bit") {
        std::vector<std::uint32_t> s;
        for (int i = 0; i < 1000; ++i) s.push_back(i % 2 ? 7 : 9);
        const auto st = huffman_encode(s);
        CHECK(st.bits_per_symbol() == 1.0);
        CHECK(roundtrip(st) == s);
    }
    SUBCASE("uniform over 8 symbols costs 3 to 3.05 bits") {
        std::mt19937_64 rng(3);
        std::vector<std::uint32_t> s(20000);
        for (auto &v : s) v = static_cast<std::uint32_t>(rng() % 8);
        const auto st = huffman_encode(s);
        CHECK(st.bits_per_symbol() >= 3.0);
        CHECK(st.bits_per_symbol() <= 3.05);
        CHECK(roundtrip(st) == s);
    }
    SUBCASE("empty input is rejected") {
        CHECK_ERROR_CODE(huffman_encode(std::vector<std::uint32_t>{}), ErrorCode::InvalidParams);
    }
}

TEST_CASE("Huffman rate is within one bit of the entropy") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::uint32_t> s(5000);
        const int kind = trial % 3;
        std::geometric_distribution<int> geo(0.05 + 0.03 * trial);
        std::normal_distribution<double> gauss(1000.0, 1.0 + trial * 10.0);
        for (auto &v : s) {
            if (kind == 0) v = static_cast<std::uint32_t>(geo(rng));
            else if (kind == 1) v = static_cast<std::uint32_t>(std::lround(gauss(rng)));
            else v = (rng() % 100 < 95) ? 5u : static_cast<std::uint32_t>(rng() % 1000000);
        }
        const auto st = huffman_encode(s);
        const double h = reference_entropy(s);
        CHECK(empirical_entropy(s) == doctest::Approx(h).epsilon(1e-12));
        CHECK(st.bits_per_symbol() >= h - 1e-12);
        CHECK(st.bits_per_symbol() < h + 1.0);
        CHECK(st.table.kraft_sum() <= 1.0 + 1e-12);
        CHECK(roundtrip(st) == s);
    }
}

TEST_CASE("corrupt Huffman input is rejected") {
    CHECK_ERROR_CODE(HuffmanTable({{1, 1}, {2, 1}, {3, 1}}), ErrorCode::CorruptStream);
    CHECK_ERROR_CODE(HuffmanTable({{2, 1}, {1, 1}}), ErrorCode::CorruptStream);
    std::vector<std::uint32_t> s{1, 2, 3, 1, 1};
    const auto st = huffman_encode(s);
    CHECK_ERROR_CODE(huffman_decode(st.bits, st.bit_count - 1, st.table, s.size()), ErrorCode::CorruptStream);
    CHECK_ERROR_CODE(st.table.length_of(99), ErrorCode::InvalidParams);
}
