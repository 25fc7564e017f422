#include <doctest.h>

#include <cmath>

#include "adcs/metrics.hpp"
#include "adcs/select.hpp"
#include "adcs/synth.hpp"
#include "helpers.hpp"

using namespace adcs;

namespace {

struct Point {
    double bit_rate, psnr;
};

Point run(const Field &f, CodecFamily fam, double eb) {
    CodecParams p;
    p.family = fam;
    p.eb_abs = eb;
    const FieldRecord r = compress(f, p);
    const auto q = compare(f, decompress(r), r.payload.size() * 8);
    return {q.bit_rate, q.psnr};
}

// Cheaper codec at the transform codec's measured PSNR; the predictor bound
// is bisected down until it reaches that PSNR.
CodecFamily oracle(const Field &f, double eb) {
    const Point t = run(f, CodecFamily::Transform, eb);
    Point p = run(f, CodecFamily::Predictor, eb);
    if (p.psnr < t.psnr) {
        double lo = eb * 1e-4, hi = eb;
        p = run(f, CodecFamily::Predictor, lo);
        for (int i = 0; i < 30; ++i) {
            const double mid = std::sqrt(lo * hi);
            const Point m = run(f, CodecFamily::Predictor, mid);
            if (m.psnr >= t.psnr) {
                lo = mid;
                p = m;
            } else {
                hi = mid;
            }
        }
    }
    return p.bit_rate < t.bit_rate ? CodecFamily::Predictor : CodecFamily::Transform;
}

SelectOptions options(double rel) {
    SelectOptions o;
    o.bound = ErrorBound::relative(rel);
    return o;
}

}  // namespace

TEST_CASE("constant field selects the predictor") {
    const Field f = testing::make_field({64, 64}, std::vector<double>(4096, 3.0));
    for (double rel : {1e-2, 1e-4}) {
        const auto r = select_and_compress(f, options(rel));
        CHECK(r.report.chosen == CodecFamily::Predictor);
        CHECK(r.record.selection_bit() == 0);
    }
}

TEST_CASE("decorrelating field selects the transform, as the oracle does") {
    const Field f = synthesize(SynthKind::GaussianNoise, {32, 32, 32}, 9);
    const double rel = 1e-4;
    REQUIRE(oracle(f, rel * f.value_range()) == CodecFamily::Transform);
    const auto r = select_and_compress(f, options(rel));
    CHECK(r.report.chosen == CodecFamily::Transform);
    CHECK(r.record.selection_bit() == 1);
    CodecParams p;
    p.family = CodecFamily::Transform;
    p.eb_abs = rel * f.value_range();
    CHECK(r.record.payload == compress(f, p).payload);
}

TEST_CASE("smooth field selects the predictor, as the oracle does") {
    const Field f = synthesize(SynthKind::SmoothSine, {128, 128}, 1);
    REQUIRE(oracle(f, 1e-4 * f.value_range()) == CodecFamily::Predictor);
    CHECK(select_and_compress(f, options(1e-4)).report.chosen == CodecFamily::Predictor);
}

TEST_CASE("selection estimate invariants") {
    for (int k = 0; k < 5; ++k)
        for (double rel : {1e-2, 1e-4, 1e-6}) {
            const Field f = synthesize(static_cast<SynthKind>(k), {40, 36}, 11 + k);
            const auto s = estimate_selection(f, options(rel));
            CHECK(s.predictor_eb <= s.eb_abs);
            CHECK(s.predictor_eb > 0.0);
            CHECK(s.chosen == (s.predictor.bit_rate < s.transform.bit_rate ? CodecFamily::Predictor
                                                                           : CodecFamily::Transform));
            const auto again = estimate_selection(f, options(rel));
            CHECK(again.chosen == s.chosen);
            CHECK(again.predictor.bit_rate == s.predictor.bit_rate);
            CHECK(again.transform.bit_rate == s.transform.bit_rate);

            const auto r = select_and_compress(f, options(rel));
            const Field g = decompress(r.record);
            double worst = 0.0;
            for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(f[i] - g[i]));
            CHECK(worst <= s.eb_abs);
        }
}

TEST_CASE("forced codec skips estimation") {
    const Field f = testing::smooth_field({20, 20}, 1);
    SelectOptions o = options(1e-3);
    o.codec = CodecChoice::Predictor;
    const auto r = select_and_compress(f, o);
    CHECK_FALSE(r.report.estimated);
    CHECK(r.record.selection_bit() == 0);
    CHECK(r.report.eb_used == doctest::Approx(1e-3 * f.value_range()));
    o.codec = CodecChoice::Transform;
    CHECK(select_and_compress(f, o).record.selection_bit() == 1);
    CHECK(parse_codec_choice("auto") == CodecChoice::Auto);
    CHECK_ERROR_CODE(parse_codec_choice("zfp"), ErrorCode::Usage);
}

TEST_CASE("archive selection") {
    std::vector<Field> fields;
    fields.push_back(testing::make_field({32, 32}, std::vector<double>(1024, 1.0), DType::F32, "flat"));
    fields.push_back(synthesize(SynthKind::GaussianNoise, {32, 32, 32}, 9, DType::F32, "noise"));
    fields.push_back(synthesize(SynthKind::SmoothSine, {128, 128}, 1, DType::F32, "sine"));
    const SelectOptions o = options(1e-4);

    SUBCASE("mixed bits, byte-identical across runs and thread counts") {
        const auto a = select_archive(fields, o, 1);
        const auto b = select_archive(fields, o, 4);
        REQUIRE(a.archive.records.size() == 3);
        CHECK(a.archive.records[0].selection_bit() == 0);
        CHECK(a.archive.records[1].selection_bit() == 1);
        CHECK(a.archive.records[2].selection_bit() == 0);
        for (std::size_t i = 0; i < 3; ++i) CHECK(a.archive.records[i].name == fields[i].name());
        CHECK(write_archive(a.archive) == write_archive(b.archive));
        CHECK(write_archive(a.archive) == write_archive(select_archive(fields, o, 4).archive));
    }
    SUBCASE("single field matches select_and_compress") {
        const auto a = select_archive({fields[2]}, o, 2);
        CHECK(a.archive.records.at(0).payload == select_and_compress(fields[2], o).record.payload);
    }
    SUBCASE("empty list") {
        CHECK_ERROR_CODE(select_archive({}, o, 1), ErrorCode::InvalidParams);
    }
    SUBCASE("failures name the field") {
        std::vector<Field> bad = fields;
        SelectOptions z = o;
        z.bound = ErrorBound::absolute(-1.0);
        try {
            select_archive(bad, z, 2);
            FAIL("no error");
        } catch (const Error &e) {
            CHECK(std::string(e.what()).find("noise") != std::string::npos);
        }
    }
}
