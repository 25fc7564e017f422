#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adcs/estimate.hpp"
#include "adcs/field.hpp"
#include "adcs/quantize.hpp"
#include "adcs/transform.hpp"

namespace adcs {

inline constexpr std::uint16_t kArchiveVersion = 1;
inline constexpr std::uint8_t kPayloadVersion = 1;

/// Absolute bound, or a fraction of the field's value range.
struct ErrorBound {
    enum class Kind { Absolute, Relative } kind = Kind::Relative;
    double value = 1e-4;

    static ErrorBound absolute(double v) { return {Kind::Absolute, v}; }
    static ErrorBound relative(double v) { return {Kind::Relative, v}; }

    /// eb_rel * VR for relative bounds; a zero range falls back to eb_rel.
    double resolve(double value_range) const;
};

struct CodecParams {
    CodecFamily family = CodecFamily::Predictor;
    double eb_abs = 0.0;
    double bot_t = kDefaultBotParameter;
    std::uint32_t bin_count = kDefaultBinCount;

    void validate() const;
};

struct FieldRecord {
    std::string name;
    DType dtype = DType::F32;
    Dims dims;
    CodecFamily family = CodecFamily::Predictor;
    double eb_abs = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::vector<std::uint8_t> payload;

    std::uint8_t selection_bit() const { return static_cast<std::uint8_t>(family); }
    std::size_t element_count() const { return product(dims); }
    /// Payload bits per element.
    double bit_rate() const;
};

struct CompressedArchive {
    std::vector<FieldRecord> records;
};

FieldRecord compress_predictor(const Field &f, const CodecParams &p);
FieldRecord compress_transform(const Field &f, const CodecParams &p);
/// Dispatches on p.family.
FieldRecord compress(const Field &f, const CodecParams &p);

Field decompress(const FieldRecord &r);

std::vector<std::uint8_t> write_archive(const CompressedArchive &a);
CompressedArchive read_archive(std::span<const std::uint8_t> bytes);

/// Bytes a record occupies in the archive outside its payload.
std::size_t record_header_bytes(const FieldRecord &r);

}  // namespace adcs
