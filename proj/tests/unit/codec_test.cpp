#include <doctest.h>

#include <cmath>

#include "adcs/codec.hpp"
#include "adcs/estimate.hpp"
#include "adcs/metrics.hpp"
#include "adcs/synth.hpp"
#include "helpers.hpp"

using namespace adcs;

namespace {

double max_error(const Field &a, const Field &b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

CodecParams params(CodecFamily fam, double eb) {
    CodecParams p;
    p.family = fam;
    p.eb_abs = eb;
    return p;
}

Field ramp(const Dims &d) {
    std::vector<double> v(product(d));
    const std::size_t n1 = d.size() > 1 ? d[1] : 1, n2 = d.size() > 2 ? d[2] : 1;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.01 * (i / (n1 * n2)) + 0.02 * (i / n2 % n1) + 0.03 * (i % n2);
    return testing::make_field(d, v, DType::F32, "ramp");
}

}  // namespace

TEST_CASE("error bound resolution") {
    CHECK(ErrorBound::relative(1e-3).resolve(50.0) == doctest::Approx(0.05));
    CHECK(ErrorBound::absolute(0.2).resolve(50.0) == 0.2);
    CHECK(ErrorBound::relative(1e-3).resolve(0.0) == 1e-3);
    CHECK_ERROR_CODE(ErrorBound::absolute(0.0).resolve(1.0), ErrorCode::InvalidBound);
    CHECK_ERROR_CODE(params(CodecFamily::Predictor, -1.0).validate(), ErrorCode::InvalidParams);
}

TEST_CASE("predictor codec examples") {
    SUBCASE("constant field is tiny") {
        for (double eb : {1e-6, 1e-2, 10.0}) {
            const Field f = testing::make_field({64, 64}, std::vector<double>(4096, 3.25));
            const FieldRecord r = compress_predictor(f, params(CodecFamily::Predictor, eb));
            CHECK(r.payload.size() < 200);
            CHECK(max_error(f, decompress(r)) <= eb);
        }
    }
    SUBCASE("noise at a tight bound does not compress") {
        const Field f = synthesize(SynthKind::GaussianNoise, {64, 64}, 3);
        const FieldRecord r = compress_predictor(f, params(CodecFamily::Predictor, 1e-6 * f.value_range()));
        const double ratio = element_bits(f.dtype()) / r.bit_rate();
        MESSAGE("noise ratio " << ratio);
        CHECK(ratio <= 1.1);
        CHECK(max_error(f, decompress(r)) <= 1e-6 * f.value_range());
    }
    SUBCASE("ramp at a loose bound compresses well") {
        const Field f = ramp({32, 32, 16});
        const FieldRecord r = compress_predictor(f, params(CodecFamily::Predictor, 1e-3 * f.value_range()));
        CHECK(element_bits(f.dtype()) / r.bit_rate() > 10.0);
    }
}

TEST_CASE("transform codec examples") {
    SUBCASE("all-zero field") {
        const Field f = testing::make_field({9, 10}, std::vector<double>(90, 0.0));
        const FieldRecord r = compress_transform(f, params(CodecFamily::Transform, 1e-3));
        CHECK(r.payload.size() < 32);
        CHECK(decompress(r).data()[0] == 0.0);
        CHECK(max_error(f, decompress(r)) == 0.0);
    }
    SUBCASE("smooth field keeps the bound and grows with a tighter one") {
        const Field f = testing::smooth_field({30, 41}, 2);
        std::size_t prev = 0;
        for (double rel : {1e-2, 1e-3, 1e-4, 1e-6}) {
            const double eb = rel * f.value_range();
            const FieldRecord r = compress_transform(f, params(CodecFamily::Transform, eb));
            CHECK(max_error(f, decompress(r)) <= eb);
            CHECK(r.payload.size() > prev);
            prev = r.payload.size();
        }
    }
    SUBCASE("wrong family in params is rejected") {
        const Field f = testing::smooth_field({8}, 1);
        CHECK_ERROR_CODE(compress_transform(f, params(CodecFamily::Predictor, 0.1)), ErrorCode::InvalidParams);
        CHECK_ERROR_CODE(compress_predictor(f, params(CodecFamily::Transform, 0.1)), ErrorCode::InvalidParams);
    }
}

TEST_CASE("round trips keep the bound for every shape and precision") {
    for (const Dims &d : {Dims{1}, Dims{3}, Dims{101}, Dims{5, 7}, Dims{16, 16}, Dims{3, 5, 6}, Dims{8, 8, 8}})
        for (DType t : {DType::F32, DType::F64})
            for (CodecFamily fam : {CodecFamily::Predictor, CodecFamily::Transform})
                for (double rel : {1e-2, 1e-4, 1e-6}) {
                    const Field f = testing::random_field(d, product(d) + static_cast<int>(t), t);
                    const double eb = ErrorBound::relative(rel).resolve(f.value_range());
                    const FieldRecord r = compress(f, params(fam, eb));
                    const Field g = decompress(r);
                    CHECK(g.dims() == f.dims());
                    CHECK(g.dtype() == t);
                    CHECK(max_error(f, g) <= eb + 1e-12 * f.value_range());
                }
}

TEST_CASE("predictor PSNR is never below the uniform-error estimate") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Field f = synthesize(static_cast<SynthKind>(seed % 5), {64, 64}, seed);
        for (double rel : {1e-2, 1e-3, 1e-4}) {
            const double eb = rel * f.value_range();
            const FieldRecord r = compress_predictor(f, params(CodecFamily::Predictor, eb));
            const auto q = compare(f, decompress(r), r.payload.size() * 8);
            CHECK(q.psnr >= estimate_sz_psnr(f.value_range(), 2 * eb) - 0.2);
        }
    }
}

TEST_CASE("records are deterministic") {
    const Field f = testing::smooth_field({20, 20, 20}, 4);
    for (CodecFamily fam : {CodecFamily::Predictor, CodecFamily::Transform}) {
        const auto a = compress(f, params(fam, 1e-4));
        const auto b = compress(f, params(fam, 1e-4));
        CHECK(a.payload == b.payload);
    }
}

TEST_CASE("corrupt payloads are rejected") {
    const Field f = testing::smooth_field({32, 32}, 6);
    for (CodecFamily fam : {CodecFamily::Predictor, CodecFamily::Transform}) {
        FieldRecord r = compress(f, params(fam, 1e-4));
        FieldRecord cut = r;
        cut.payload.resize(r.payload.size() / 2);
        CHECK_ERROR_CODE(decompress(cut), ErrorCode::CorruptStream);
        FieldRecord bad = r;
        bad.payload[0] ^= 0xff;
        CHECK_ERROR_CODE(decompress(bad), ErrorCode::UnknownVersion);
    }
}

TEST_CASE("archive container") {
    const Field a = testing::smooth_field({10, 12}, 1, DType::F32);
    const Field b = testing::random_field({7}, 2, DType::F64);
    CompressedArchive arc;
    arc.records.push_back(compress(a, params(CodecFamily::Transform, 1e-3)));
    arc.records.push_back(compress(b, params(CodecFamily::Predictor, 1e-3)));
    arc.records[1].name = "second";
    const auto bytes = write_archive(arc);

    SUBCASE("layout starts with magic, version and count") {
        CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "ADCS");
        CHECK(bytes[4] == 1);
        CHECK(bytes[5] == 0);
        CHECK(bytes[6] == 2);
        std::size_t total = 10;
        for (const auto &r : arc.records) total += record_header_bytes(r) + r.payload.size();
        CHECK(bytes.size() == total);
    }
    SUBCASE("round trip") {
        const CompressedArchive back = read_archive(bytes);
        REQUIRE(back.records.size() == 2);
        for (std::size_t i = 0; i < 2; ++i) {
            const auto &x = arc.records[i], &y = back.records[i];
            CHECK(x.name == y.name);
            CHECK(x.dtype == y.dtype);
            CHECK(x.dims == y.dims);
            CHECK(x.family == y.family);
            CHECK(x.eb_abs == y.eb_abs);
            CHECK(x.min == y.min);
            CHECK(x.max == y.max);
            CHECK(x.payload == y.payload);
        }
        CHECK(write_archive(back) == bytes);
    }
    SUBCASE("tampered magic or version") {
        auto t = bytes;
        t[0] = 'X';
        CHECK_ERROR_CODE(read_archive(t), ErrorCode::UnknownVersion);
        t = bytes;
        t[4] = 9;
        CHECK_ERROR_CODE(read_archive(t), ErrorCode::UnknownVersion);
    }
    SUBCASE("truncation") {
        auto t = bytes;
        t.pop_back();
        CHECK_ERROR_CODE(read_archive(t), ErrorCode::CorruptStream);
    }
    SUBCASE("empty archive") {
        CHECK(read_archive(write_archive({})).records.empty());
    }
}
