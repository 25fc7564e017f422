#pragma once

#include <string>
#include <vector>

#include "adcs/codec.hpp"
#include "adcs/estimate.hpp"
#include "adcs/field.hpp"

namespace adcs {

enum class CodecChoice { Auto, Predictor, Transform };

CodecChoice parse_codec_choice(const std::string &text);

struct SelectOptions {
    ErrorBound bound;
    SamplingConfig sampling;
    CodecChoice codec = CodecChoice::Auto;
    double bot_t = kDefaultBotParameter;
    std::uint32_t bin_count = kDefaultBinCount;
    double sz_offset = kSzBitrateOffset;
};

/// Both codecs' estimates at matched PSNR for one field.
struct SelectionEstimate {
    double eb_abs = 0.0;
    double value_range = 0.0;
    std::size_t sampled_blocks = 0;
    QualityEstimate transform;
    EcStats ec;
    /// Predictor bin width giving the transform codec's estimated PSNR.
    double delta = 0.0;
    /// Predictor bound actually used: min(delta / 2, eb_abs).
    double predictor_eb = 0.0;
    double predictor_entropy = 0.0;
    /// Share of sampled errors outside the quantizer range.
    double outlier_fraction = 0.0;
    QualityEstimate predictor;
    CodecFamily chosen = CodecFamily::Transform;
};

SelectionEstimate estimate_selection(const Field &f, const SelectOptions &opt);

struct SelectionReport {
    std::string name;
    /// False when the codec was forced and no estimate ran.
    bool estimated = false;
    SelectionEstimate estimate;
    CodecFamily chosen = CodecFamily::Transform;
    double eb_used = 0.0;
    double estimate_seconds = 0.0;
    double compress_seconds = 0.0;
};

struct SelectionResult {
    FieldRecord record;
    SelectionReport report;
};

SelectionResult select_and_compress(const Field &f, const SelectOptions &opt);

struct ArchiveResult {
    CompressedArchive archive;
    std::vector<SelectionReport> reports;
};

/// Selects and compresses every field on up to `threads` workers; records
/// keep input order. Failures are collected and rethrown with field names.
ArchiveResult select_archive(const std::vector<Field> &fields, const SelectOptions &opt, unsigned threads);

}  // namespace adcs
