#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "adcs/error.hpp"

namespace adcs {

/// LSB-first bit packer. Bits land in bytes starting at the least
/// significant position.
class BitWriter {
  public:
    void put(std::uint64_t bits, unsigned count) {
        while (count) {
            const unsigned room = 64 - fill_;
            const unsigned take = count < room ? count : room;
            const std::uint64_t chunk = take == 64 ? bits : bits & ((std::uint64_t{1} << take) - 1);
            acc_ |= chunk << fill_;
            fill_ += take;
            bits = take == 64 ? 0 : bits >> take;
            count -= take;
            if (fill_ == 64) flush_word();
        }
    }

    void put_bit(bool b) { put(b ? 1u : 0u, 1); }

    /// Order-0 Exp-Golomb code of v.
    void put_exp_golomb(std::uint64_t v) {
        const std::uint64_t x = v + 1;
        const unsigned len = static_cast<unsigned>(std::bit_width(x));
        put(0, len - 1);
        // Emit x MSB-first so the reader can accumulate left to right.
        for (unsigned i = len; i-- > 0;) put_bit((x >> i) & 1u);
    }

    std::uint64_t bit_count() const { return bytes_.size() * 8 + fill_; }

    std::vector<std::uint8_t> finish() {
        while (fill_ > 0) {
            bytes_.push_back(static_cast<std::uint8_t>(acc_));
            acc_ >>= 8;
            fill_ = fill_ >= 8 ? fill_ - 8 : 0;
        }
        return std::move(bytes_);
    }

  private:
    void flush_word() {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(acc_ >> (8 * i)));
        acc_ = 0;
        fill_ = 0;
    }

    std::vector<std::uint8_t> bytes_;
    std::uint64_t acc_ = 0;
    unsigned fill_ = 0;
};

class BitReader {
  public:
    BitReader(std::span<const std::uint8_t> bytes, std::uint64_t bit_count)
        : bytes_(bytes), limit_(bit_count) {
        if (bit_count > bytes.size() * 8) throw Error(ErrorCode::CorruptStream, "bit count exceeds buffer");
    }

    bool get_bit() {
        if (pos_ >= limit_) throw Error(ErrorCode::CorruptStream, "read past end of bitstream");
        const bool b = (bytes_[pos_ >> 3] >> (pos_ & 7)) & 1u;
        ++pos_;
        return b;
    }

    std::uint64_t get(unsigned count) {
        if (count > limit_ - pos_) throw Error(ErrorCode::CorruptStream, "read past end of bitstream");
        std::uint64_t v = 0;
        unsigned got = 0;
        while (got < count) {
            const unsigned offset = static_cast<unsigned>(pos_ & 7);
            const unsigned take = std::min(8 - offset, count - got);
            const std::uint64_t chunk = (bytes_[pos_ >> 3] >> offset) & ((1u << take) - 1);
            v |= chunk << got;
            got += take;
            pos_ += take;
        }
        return v;
    }

    std::uint64_t get_exp_golomb() {
        unsigned zeros = 0;
        while (!get_bit()) {
            if (++zeros > 63) throw Error(ErrorCode::CorruptStream, "malformed Exp-Golomb code");
        }
        std::uint64_t x = 1;
        for (unsigned i = 0; i < zeros; ++i) x = (x << 1) | (get_bit() ? 1u : 0u);
        return x - 1;
    }

    std::uint64_t position() const { return pos_; }
    std::uint64_t remaining() const { return limit_ - pos_; }

  private:
    std::span<const std::uint8_t> bytes_;
    std::uint64_t limit_;
    std::uint64_t pos_ = 0;
};

inline unsigned exp_golomb_length(std::uint64_t v) {
    return 2 * static_cast<unsigned>(std::bit_width(v + 1)) - 1;
}

/// 0, -1, 1, -2, 2, ... -> 0, 1, 2, 3, 4, ...
inline std::uint64_t zigzag(std::int64_t v) {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}
inline std::int64_t unzigzag(std::uint64_t v) {
    return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

/// Little-endian byte buffer helpers for container formats.
class ByteWriter {
  public:
    template <class T>
    void put(T v) {
        std::uint8_t b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
        bytes_.insert(bytes_.end(), b, b + sizeof(T));
    }
    void put_varint(std::uint64_t v) {
        while (v >= 0x80) {
            bytes_.push_back(static_cast<std::uint8_t>(v | 0x80));
            v >>= 7;
        }
        bytes_.push_back(static_cast<std::uint8_t>(v));
    }
    void put_bytes(std::span<const std::uint8_t> b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }

    std::vector<std::uint8_t> &bytes() { return bytes_; }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

  private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
  public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    template <class T>
    T get() {
        need(sizeof(T));
        std::uint8_t b[sizeof(T)];
        std::memcpy(b, bytes_.data() + pos_, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
        pos_ += sizeof(T);
        T v;
        std::memcpy(&v, b, sizeof(T));
        return v;
    }
    std::uint64_t get_varint() {
        std::uint64_t v = 0;
        for (unsigned shift = 0; shift < 64; shift += 7) {
            const auto b = get<std::uint8_t>();
            v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
            if (!(b & 0x80)) return v;
        }
        throw Error(ErrorCode::CorruptStream, "varint too long");
    }
    std::span<const std::uint8_t> get_bytes(std::size_t n) {
        need(n);
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

  private:
    void need(std::size_t n) const {
        if (n > bytes_.size() - pos_)
            throw Error(ErrorCode::CorruptStream, "truncated: need " + std::to_string(n) + " bytes, have " +
                                                      std::to_string(bytes_.size() - pos_));
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace adcs
