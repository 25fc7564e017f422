#include "adcs/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "adcs/codec.hpp"
#include "adcs/error.hpp"
#include "adcs/metrics.hpp"
#include "adcs/parallel.hpp"
#include "adcs/select.hpp"
#include "adcs/synth.hpp"

namespace adcs {

namespace {

namespace fs = std::filesystem;

constexpr int kCsvSchema = 1;

std::vector<std::uint8_t> read_file(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::Io, "read failed for '" + path.string() + "'");
    return bytes;
}

void write_file(const fs::path &path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot create '" + path.string() + "'");
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

void write_text(const fs::path &path, const std::string &text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t *>(text.data()), text.size()));
}

DType parse_dtype(const std::string &s) {
    if (s == "f32" || s == "float32") return DType::F32;
    if (s == "f64" || s == "float64") return DType::F64;
    throw Error(ErrorCode::Usage, "dtype must be f32 or f64, got '" + s + "'");
}


std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Characters outside [A-Za-z0-9._-] become '_' so a field name is a safe file name.
std::string file_stem_for(const std::string &name) {
    std::string s = name.empty() ? "field" : name;
    for (char &c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '_' && c != '-') c = '_';
    return s;
}

struct InputSpec {
    std::string path;
    std::string name;
    DType dtype = DType::F32;
    Dims dims;
};

struct InputOptions {
    std::vector<std::string> files;
    std::string dims;
    std::string dtype = "f32";
    std::string manifest;

    void attach(CLI::App *cmd) {
        cmd->add_option("inputs", files, "Raw little-endian input files");
        cmd->add_option("--dims", dims, "Extents of every positional input, e.g. 64x64x32");
        cmd->add_option("--dtype", dtype, "Element type of positional inputs: f32 or f64");
        cmd->add_option("--manifest", manifest, "Text file with one 'name dtype dims path' line per field");
    }

    // Checks everything that does not need the inputs' contents.
    std::vector<InputSpec> resolve() const {
        std::vector<InputSpec> specs;
        if (!manifest.empty()) {
            std::ifstream in(manifest);
            if (!in) throw Error(ErrorCode::Io, "cannot open manifest '" + manifest + "'");
            const fs::path base = fs::path(manifest).parent_path();
            std::string line;
            std::size_t line_no = 0;
            while (std::getline(in, line)) {
                ++line_no;
                const auto hash = line.find('#');
                if (hash != std::string::npos) line.erase(hash);
                std::istringstream ss(line);
                std::string name, type, extents, path, extra;
                if (!(ss >> name)) continue;
                if (!(ss >> type >> extents >> path) || (ss >> extra))
                    throw Error(ErrorCode::Usage, manifest + ":" + std::to_string(line_no) +
                                                      ": expected 'name dtype dims path'");
                fs::path p(path);
                if (p.is_relative()) p = base / p;
                specs.push_back({p.string(), name, parse_dtype(type), parse_dims(extents)});
            }
        }
        if (!files.empty()) {
            if (dims.empty()) throw Error(ErrorCode::Usage, "--dims is required for positional inputs");
            const Dims d = parse_dims(dims);
            const DType t = parse_dtype(dtype);
            for (const auto &f : files) specs.push_back({f, fs::path(f).stem().string(), t, d});
        }
        if (specs.empty()) throw Error(ErrorCode::Usage, "no inputs: give raw files with --dims or --manifest");
        std::set<std::string> seen;
        for (const auto &s : specs)
            if (!seen.insert(s.name).second) throw Error(ErrorCode::Usage, "duplicate field name '" + s.name + "'");
        return specs;
    }
};

void throw_collected(const std::vector<std::exception_ptr> &errors, const std::vector<std::string> &labels,
                     const std::string &what) {
    std::string failures;
    std::optional<ErrorCode> first;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const Error &e) {
            if (!first) first = e.code();
            failures += "\n  " + labels[i] + ": " + e.what();
        } catch (const std::exception &e) {
            if (!first) first = ErrorCode::InvalidParams;
            failures += "\n  " + labels[i] + ": " + e.what();
        }
    }
    if (first) throw Error(*first, what + failures);
}

std::vector<Field> load_fields(const std::vector<InputSpec> &specs, unsigned threads) {
    std::vector<std::optional<Field>> slots(specs.size());
    const auto errors = parallel_for(specs.size(), threads, [&](std::size_t i) {
        const auto &s = specs[i];
        slots[i].emplace(ingest_raw(read_file(s.path), s.dims, s.dtype, s.name));
    });
    std::vector<std::string> labels;
    for (const auto &s : specs) labels.push_back(s.path);
    throw_collected(errors, labels, "could not read inputs:");
    std::vector<Field> fields;
    fields.reserve(slots.size());
    for (auto &f : slots) fields.push_back(std::move(*f));
    return fields;
}

struct BoundOptions {
    std::optional<double> eb_abs, eb_rel;

    void attach(CLI::App *cmd) {
        auto *a = cmd->add_option("--eb-abs", eb_abs, "Absolute pointwise error bound");
        auto *r = cmd->add_option("--eb-rel", eb_rel, "Error bound as a fraction of each field's value range");
        a->excludes(r);
    }

    ErrorBound get() const {
        if (eb_abs.has_value() == eb_rel.has_value())
            throw Error(ErrorCode::Usage, "give exactly one of --eb-abs and --eb-rel");
        return eb_abs ? ErrorBound::absolute(*eb_abs) : ErrorBound::relative(*eb_rel);
    }
};

// Writes to `path`, or to `out` when the path is empty.
void emit(const std::string &path, const std::string &text, std::ostream &out) {
    if (path.empty()) out << text;
    else write_text(path, text);
}

struct Context {
    unsigned threads = 1;
    std::ostream *out = nullptr;
};

// compress

struct CompressOptions {
    InputOptions inputs;
    BoundOptions bound;
    double rsp = 0.05;
    std::string codec = "auto";
    std::string out;
    std::string report;
    std::string timing;
    bool no_verify = false;
};

void cmd_compress(const CompressOptions &o, const Context &ctx) {
    SelectOptions opt;
    opt.bound = o.bound.get();
    opt.sampling.r_sp = o.rsp;
    opt.sampling.validate();
    opt.codec = parse_codec_choice(o.codec);
    if (o.out.empty()) throw Error(ErrorCode::Usage, "--out is required");
    const auto fields = load_fields(o.inputs.resolve(), ctx.threads);

    const ArchiveResult result = select_archive(fields, opt, ctx.threads);
    const auto &records = result.archive.records;

    std::vector<QualityReport> quality(records.size());
    if (!o.no_verify) {
        const auto errors = parallel_for(records.size(), ctx.threads, [&](std::size_t i) {
            quality[i] = compare(fields[i], decompress(records[i]), records[i].payload.size() * 8);
        });
        std::vector<std::string> labels;
        for (const auto &f : fields) labels.push_back(f.name());
        throw_collected(errors, labels, "verification failed for:");
    }
    write_file(o.out, write_archive(result.archive));

    std::string csv = "schema_version,name,dtype,dims,selection_bit,codec,eb_abs,eb_used,est_bitrate_predictor,"
                      "est_bitrate_transform,est_psnr_predictor,est_psnr_transform,bitrate,compression_ratio,psnr,"
                      "max_abs_error\n";
    std::string timing = "schema_version,name,estimate_seconds,compress_seconds\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto &r = records[i];
        const auto &rep = result.reports[i];
        const double eb = opt.bound.resolve(fields[i].value_range());
        const std::string na = "n/a";
        csv += std::to_string(kCsvSchema) + "," + r.name + "," + dtype_name(r.dtype) + "," + dims_to_string(r.dims) +
               "," + std::to_string(r.selection_bit()) + "," + family_name(r.family) + "," + num(eb) + "," +
               num(rep.eb_used) + ",";
        if (rep.estimated) {
            const auto &e = rep.estimate;
            csv += num(e.predictor.bit_rate) + "," + num(e.transform.bit_rate) + "," + num(e.predictor.psnr) + "," +
                   num(e.transform.psnr) + ",";
        } else {
            csv += na + "," + na + "," + na + "," + na + ",";
        }
        const double br = r.bit_rate();
        csv += num(br) + "," + num(br > 0.0 ? element_bits(r.dtype) / br : 0.0) + ",";
        csv += o.no_verify ? na + "," + na : num(quality[i].psnr) + "," + num(quality[i].max_abs_error);
        csv += "\n";
        timing += std::to_string(kCsvSchema) + "," + r.name + "," + num(rep.estimate_seconds) + "," +
                  num(rep.compress_seconds) + "\n";
    }
    emit(o.report, csv, *ctx.out);
    if (!o.timing.empty()) write_text(o.timing, timing);
}

// decompress

struct DecompressOptions {
    std::string archive;
    std::string out;
};

void cmd_decompress(const DecompressOptions &o, const Context &ctx) {
    const CompressedArchive a = read_archive(read_file(o.archive));
    if (a.records.empty()) return;
    std::vector<std::optional<Field>> fields(a.records.size());
    const auto errors = parallel_for(a.records.size(), ctx.threads,
                                     [&](std::size_t i) { fields[i].emplace(decompress(a.records[i])); });
    std::vector<std::string> labels;
    for (const auto &r : a.records) labels.push_back(r.name);
    throw_collected(errors, labels, "decompression failed for:");

    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create '" + o.out + "': " + ec.message());
    std::set<std::string> used;
    std::string manifest;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const Field &f = *fields[i];
        std::string stem = file_stem_for(f.name());
        for (std::size_t k = 1; !used.insert(stem).second; ++k) stem = file_stem_for(f.name()) + "_" + std::to_string(k);
        const std::string file = stem + ".raw";
        write_file(fs::path(o.out) / file, to_raw(f));
        manifest += stem + " " + dtype_name(f.dtype()) + " " + dims_to_string(f.dims()) + " " + file + "\n";
    }
    write_text(fs::path(o.out) / "manifest.txt", manifest);
}

// estimate

struct EstimateOptions {
    InputOptions inputs;
    BoundOptions bound;
    std::vector<double> rsp{0.05};
    std::string out;
    bool no_verify = false;
};

struct Measured {
    double bit_rate[2] = {0.0, 0.0};
    double psnr[2] = {0.0, 0.0};
};

void cmd_estimate(const EstimateOptions &o, const Context &ctx) {
    const ErrorBound bound = o.bound.get();
    if (o.rsp.empty()) throw Error(ErrorCode::Usage, "--rsp needs at least one rate");
    for (double r : o.rsp) SamplingConfig{r}.validate();
    const auto fields = load_fields(o.inputs.resolve(), ctx.threads);
    const std::size_t nf = fields.size(), nr = o.rsp.size();

    // One task per (rate, field) for estimates, one per field for the codec runs.
    std::vector<std::array<QualityEstimate, 2>> est(nr * nf);
    std::vector<Measured> measured(nf);
    const std::size_t verify_tasks = o.no_verify ? 0 : nf;
    const auto errors = parallel_for(nr * nf + verify_tasks, ctx.threads, [&](std::size_t t) {
        if (t < nr * nf) {
            const Field &f = fields[t % nf];
            const double eb = bound.resolve(f.value_range());
            const auto idx = sampled_block_indices(f.dims(), o.rsp[t / nf]);
            std::vector<Block> blocks;
            for (auto i : idx) blocks.push_back(extract_block(f, i));
            est[t][0] = estimate_predictor(f, idx, eb).quality;
            est[t][1] = estimate_ec(blocks, SamplingConfig{o.rsp[t / nf]}, eb, f.value_range()).quality;
            return;
        }
        const Field &f = fields[t - nr * nf];
        CodecParams p;
        p.eb_abs = bound.resolve(f.value_range());
        for (int c = 0; c < 2; ++c) {
            p.family = static_cast<CodecFamily>(c);
            const FieldRecord r = compress(f, p);
            const QualityReport q = compare(f, decompress(r), r.payload.size() * 8);
            measured[t - nr * nf].bit_rate[c] = q.bit_rate;
            measured[t - nr * nf].psnr[c] = q.psnr;
        }
    });
    std::vector<std::string> labels;
    for (std::size_t t = 0; t < nr * nf + verify_tasks; ++t) labels.push_back(fields[t % nf].name());
    throw_collected(errors, labels, "estimation failed for:");

    auto rel = [](double e, double m) { return m != 0.0 ? num((e - m) / m) : std::string("n/a"); };
    std::string csv = "schema_version,r_sp,name,codec,est_bitrate,est_psnr";
    if (!o.no_verify) csv += ",bitrate,psnr,bitrate_rel_error,psnr_rel_error";
    csv += "\n";
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t i = 0; i < nf; ++i)
            for (int c = 0; c < 2; ++c) {
                const QualityEstimate &e = est[r * nf + i][c];
                csv += std::to_string(kCsvSchema) + "," + num(o.rsp[r]) + "," + fields[i].name() + "," +
                       family_name(static_cast<CodecFamily>(c)) + "," + num(e.bit_rate) + "," + num(e.psnr);
                if (!o.no_verify) {
                    const Measured &m = measured[i];
                    csv += "," + num(m.bit_rate[c]) + "," + num(m.psnr[c]) + "," + rel(e.bit_rate, m.bit_rate[c]) +
                           "," + rel(e.psnr, m.psnr[c]);
                }
                csv += "\n";
            }
    emit(o.out, csv, *ctx.out);
}

// rdcurve

struct RdOptions {
    InputOptions inputs;
    std::vector<double> sweep{1e-2, 1e-3, 1e-4, 1e-6};
    double rsp = 0.05;
    std::string out;
};

void cmd_rdcurve(const RdOptions &o, const Context &ctx) {
    if (o.sweep.empty()) throw Error(ErrorCode::Usage, "--sweep needs at least one bound");
    for (double eb : o.sweep) ErrorBound::relative(eb).resolve(1.0);
    SamplingConfig{o.rsp}.validate();
    const auto fields = load_fields(o.inputs.resolve(), ctx.threads);
    const std::size_t nf = fields.size(), ns = o.sweep.size();
    constexpr CodecChoice kChoices[] = {CodecChoice::Predictor, CodecChoice::Transform, CodecChoice::Auto};
    constexpr const char *kNames[] = {"predictor", "transform", "auto"};

    struct Point {
        double bit_rate = 0.0, psnr = 0.0;
        int selection_bit = 0;
    };
    std::vector<Point> points(nf * 3 * ns);
    const auto errors = parallel_for(points.size(), ctx.threads, [&](std::size_t t) {
        const Field &f = fields[t / (3 * ns)];
        SelectOptions opt;
        opt.bound = ErrorBound::relative(o.sweep[t % ns]);
        opt.sampling.r_sp = o.rsp;
        opt.codec = kChoices[t / ns % 3];
        const SelectionResult res = select_and_compress(f, opt);
        const QualityReport q = compare(f, decompress(res.record), res.record.payload.size() * 8);
        points[t] = {q.bit_rate, q.psnr, res.record.selection_bit()};
    });
    std::vector<std::string> labels;
    for (std::size_t t = 0; t < points.size(); ++t) labels.push_back(fields[t / (3 * ns)].name());
    throw_collected(errors, labels, "rate-distortion sweep failed for:");

    std::string csv = "schema_version,name,codec,eb_rel,selection_bit,bitrate,psnr\n";
    for (std::size_t t = 0; t < points.size(); ++t)
        csv += std::to_string(kCsvSchema) + "," + fields[t / (3 * ns)].name() + "," + kNames[t / ns % 3] + "," +
               num(o.sweep[t % ns]) + "," + std::to_string(points[t].selection_bit) + "," +
               num(points[t].bit_rate) + "," + num(points[t].psnr) + "\n";
    emit(o.out, csv, *ctx.out);
}

// synth

struct SynthOptions {
    std::string kind;
    std::string dims;
    std::string dtype = "f32";
    std::uint64_t seed = 7;
    std::optional<std::uint64_t> corpus_seed;
    std::string name;
    std::string out;
};

void cmd_synth(const SynthOptions &o, const Context &) {
    if (o.out.empty()) throw Error(ErrorCode::Usage, "--out is required");
    if (o.kind == "corpus") {
        const auto corpus = synth_corpus(o.corpus_seed.value_or(2024));
        std::error_code ec;
        fs::create_directories(o.out, ec);
        if (ec) throw Error(ErrorCode::Io, "cannot create '" + o.out + "': " + ec.message());
        std::string manifest;
        for (const auto &f : corpus) {
            const std::string file = file_stem_for(f.name()) + ".raw";
            write_file(fs::path(o.out) / file, to_raw(f));
            manifest += f.name() + " " + dtype_name(f.dtype()) + " " + dims_to_string(f.dims()) + " " + file + "\n";
        }
        write_text(fs::path(o.out) / "manifest.txt", manifest);
        return;
    }
    if (o.dims.empty()) throw Error(ErrorCode::Usage, "--dims is required");
    const Field f = synthesize(parse_synth_kind(o.kind), parse_dims(o.dims), o.seed, parse_dtype(o.dtype), o.name);
    write_file(o.out, to_raw(f));
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Error-bounded lossy compression with online codec selection", "adcs"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: ADCS_THREADS or all cores)");

    CompressOptions co;
    auto *compress_cmd = app.add_subcommand("compress", "Select a codec per field and write an archive");
    co.inputs.attach(compress_cmd);
    co.bound.attach(compress_cmd);
    compress_cmd->add_option("--rsp", co.rsp, "Block sampling rate for the estimates");
    compress_cmd->add_option("--codec", co.codec, "auto, predictor or transform");
    compress_cmd->add_option("--out", co.out, "Archive path");
    compress_cmd->add_option("--report", co.report, "CSV report path (default: stdout)");
    compress_cmd->add_option("--timing", co.timing, "CSV of per-field estimation and compression seconds");
    compress_cmd->add_flag("--no-verify", co.no_verify, "Skip decompressing to measure quality");

    DecompressOptions dopt;
    auto *decompress_cmd = app.add_subcommand("decompress", "Write each field of an archive as a raw file");
    decompress_cmd->add_option("archive", dopt.archive, "Archive path")->required();
    decompress_cmd->add_option("--out", dopt.out, "Output directory")->required();

    EstimateOptions eo;
    auto *estimate_cmd = app.add_subcommand("estimate", "Estimated vs measured bit-rate and PSNR per codec");
    eo.inputs.attach(estimate_cmd);
    eo.bound.attach(estimate_cmd);
    estimate_cmd->add_option("--rsp", eo.rsp, "Comma-separated sampling rates")->delimiter(',');
    estimate_cmd->add_option("--out", eo.out, "CSV path (default: stdout)");
    estimate_cmd->add_flag("--no-verify", eo.no_verify, "Estimates only, no codec runs");

    RdOptions ro;
    auto *rd_cmd = app.add_subcommand("rdcurve", "Bit-rate and PSNR per codec over a sweep of relative bounds");
    ro.inputs.attach(rd_cmd);
    rd_cmd->add_option("--sweep", ro.sweep, "Comma-separated relative bounds")->delimiter(',');
    rd_cmd->add_option("--rsp", ro.rsp, "Block sampling rate for the auto codec");
    rd_cmd->add_option("--out", ro.out, "CSV path (default: stdout)");

    SynthOptions so;
    auto *synth_cmd = app.add_subcommand("synth", "Generate a synthetic field or the 20-field corpus");
    synth_cmd->add_option("--kind", so.kind, "smooth-sine, ramp, gaussian-noise, turbulence-mix, "
                                             "piecewise-constant or corpus")
        ->required();
    synth_cmd->add_option("--dims", so.dims, "Extents, e.g. 64x64");
    synth_cmd->add_option("--dtype", so.dtype, "f32 or f64");
    synth_cmd->add_option("--seed", so.seed, "Generator seed (default 7; corpus default 2024)");
    synth_cmd->add_option("--name", so.name, "Field name");
    synth_cmd->add_option("--out", so.out, "Output file, or directory for the corpus");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err);
    }

    try {
        Context ctx;
        ctx.out = &out;
        if (threads < 0) throw Error(ErrorCode::Usage, "--threads must be positive");
        ctx.threads = threads > 0 ? static_cast<unsigned>(threads) : default_threads();
        if (*compress_cmd) cmd_compress(co, ctx);
        else if (*decompress_cmd) cmd_decompress(dopt, ctx);
        else if (*estimate_cmd) cmd_estimate(eo, ctx);
        else if (*rd_cmd) cmd_rdcurve(ro, ctx);
        else if (*synth_cmd) {
            if (synth_cmd->count("--seed")) so.corpus_seed = so.seed;
            cmd_synth(so, ctx);
        }
    } catch (const Error &e) {
        err << "adcs: " << e.what() << "\n";
        return e.code() == ErrorCode::Usage ? 2 : 1;
    } catch (const std::exception &e) {
        err << "adcs: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace adcs
