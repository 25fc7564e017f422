#include "adcs/select.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "adcs/error.hpp"
#include "adcs/parallel.hpp"

namespace adcs {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

CodecChoice parse_codec_choice(const std::string &text) {
    if (text == "auto") return CodecChoice::Auto;
    if (text == "predictor") return CodecChoice::Predictor;
    if (text == "transform") return CodecChoice::Transform;
    throw Error(ErrorCode::Usage, "codec must be auto, predictor or transform, got '" + text + "'");
}

SelectionEstimate estimate_selection(const Field &f, const SelectOptions &opt) {
    opt.sampling.validate();
    SelectionEstimate s;
    s.value_range = f.value_range();
    s.eb_abs = opt.bound.resolve(s.value_range);

    const auto indices = sampled_block_indices(f.dims(), opt.sampling.r_sp);
    std::vector<Block> blocks;
    blocks.reserve(indices.size());
    for (auto i : indices) blocks.push_back(extract_block(f, i));
    s.sampled_blocks = blocks.size();

    const EcEstimate ec = estimate_ec(blocks, opt.sampling, s.eb_abs, s.value_range, BotMatrix(opt.bot_t));
    s.transform = ec.quality;
    s.ec = ec.stats;

    // Bin width matching the transform codec's PSNR; without a finite target
    // fall back to the plain bound.
    s.delta = 2.0 * s.eb_abs;
    if (s.value_range > 0.0 && s.transform.psnr < kPsnrSentinel)
        s.delta = delta_from_psnr(s.value_range, s.transform.psnr);
    s.predictor_eb = std::min(0.5 * s.delta, s.eb_abs);

    const PredictorEstimate pe = estimate_predictor(f, indices, s.predictor_eb, opt.bin_count, opt.sz_offset);
    s.predictor = pe.quality;
    s.predictor_entropy = pe.entropy;
    s.outlier_fraction = pe.outlier_fraction;
    s.chosen = s.predictor.bit_rate < s.transform.bit_rate ? CodecFamily::Predictor : CodecFamily::Transform;
    return s;
}

SelectionResult select_and_compress(const Field &f, const SelectOptions &opt) {
    SelectionResult out;
    SelectionReport &rep = out.report;
    rep.name = f.name();
    CodecParams p;
    p.bot_t = opt.bot_t;
    p.bin_count = opt.bin_count;
    const double eb = opt.bound.resolve(f.value_range());

    if (opt.codec == CodecChoice::Auto) {
        const auto start = std::chrono::steady_clock::now();
        rep.estimate = estimate_selection(f, opt);
        rep.estimate_seconds = seconds_since(start);
        rep.estimated = true;
        rep.chosen = rep.estimate.chosen;
        rep.eb_used = rep.chosen == CodecFamily::Predictor ? rep.estimate.predictor_eb : eb;
    } else {
        rep.chosen = opt.codec == CodecChoice::Predictor ? CodecFamily::Predictor : CodecFamily::Transform;
        rep.eb_used = eb;
    }
    p.family = rep.chosen;
    p.eb_abs = rep.eb_used;
    const auto start = std::chrono::steady_clock::now();
    out.record = compress(f, p);
    rep.compress_seconds = seconds_since(start);
    return out;
}

ArchiveResult select_archive(const std::vector<Field> &fields, const SelectOptions &opt, unsigned threads) {
    if (fields.empty()) throw Error(ErrorCode::InvalidParams, "no fields to compress");
    std::vector<SelectionResult> results(fields.size());
    const auto errors =
        parallel_for(fields.size(), threads, [&](std::size_t i) { results[i] = select_and_compress(fields[i], opt); });

    std::string failures;
    ErrorCode first = ErrorCode::InvalidParams;
    bool failed = false;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const Error &e) {
            if (!failed) first = e.code();
            failures += "\n  " + fields[i].name() + ": " + e.what();
        } catch (const std::exception &e) {
            failures += "\n  " + fields[i].name() + ": " + e.what();
        }
        failed = true;
    }
    if (failed) throw Error(first, "compression failed for:" + failures);

    ArchiveResult out;
    for (auto &r : results) {
        out.archive.records.push_back(std::move(r.record));
        out.reports.push_back(std::move(r.report));
    }
    return out;
}

}  // namespace adcs
