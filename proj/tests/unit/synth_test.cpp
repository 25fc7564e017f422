#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include "adcs/codec.hpp"
#include "adcs/parallel.hpp"
#include "adcs/synth.hpp"
#include "helpers.hpp"

using namespace adcs;

TEST_CASE("synthetic fields are deterministic by seed") {
    for (int k = 0; k < 5; ++k) {
        const auto kind = static_cast<SynthKind>(k);
        CHECK(parse_synth_kind(synth_kind_name(kind)) == kind);
        for (const Dims &d : {Dims{100}, Dims{17, 9}, Dims{8, 9, 10}}) {
            const Field a = synthesize(kind, d, 7);
            CHECK(a.dims() == d);
            CHECK(a.dtype() == DType::F32);
            CHECK(to_raw(a) == to_raw(synthesize(kind, d, 7)));
            CHECK(to_raw(a) != to_raw(synthesize(kind, d, 8)));
            CHECK(a.value_range() > 0.0);
            for (double v : a.data()) CHECK(std::isfinite(v));
        }
    }
    CHECK_ERROR_CODE(parse_synth_kind("wavelet"), ErrorCode::Usage);
}

TEST_CASE("corpus") {
    const auto c = synth_corpus();
    CHECK(c.size() == 20);
    std::set<std::string> names;
    std::set<std::size_t> ndims;
    for (const auto &f : c) {
        names.insert(f.name());
        ndims.insert(f.ndim());
        CHECK(f.value_range() > 0.0);
    }
    CHECK(names.size() == 20);
    CHECK(ndims == std::set<std::size_t>{1, 2, 3});
    const auto again = synth_corpus();
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(to_raw(c[i]) == to_raw(again[i]));
}

TEST_CASE("noise does not compress at a tight bound") {
    const Field f = synthesize(SynthKind::GaussianNoise, {64, 64}, 7);
    CodecParams p;
    p.eb_abs = 1e-6 * f.value_range();
    const double ratio = element_bits(f.dtype()) / compress_predictor(f, p).bit_rate();
    CHECK(ratio < 1.1);
}

TEST_CASE("parallel_for") {
    for (unsigned threads : {1u, 3u, 16u}) {
        std::vector<std::atomic<int>> hits(101);
        const auto errs = parallel_for(hits.size(), threads, [&](std::size_t i) {
            hits[i]++;
            if (i % 10 == 3) throw std::runtime_error("boom");
        });
        REQUIRE(errs.size() == hits.size());
        for (std::size_t i = 0; i < hits.size(); ++i) {
            CHECK(hits[i] == 1);
            CHECK(static_cast<bool>(errs[i]) == (i % 10 == 3));
        }
    }
    CHECK(parallel_for(0, 4, [](std::size_t) {}).empty());
}

TEST_CASE("thread count from the environment") {
    ::setenv("ADCS_THREADS", "3", 1);
    CHECK(default_threads() == 3);
    ::setenv("ADCS_THREADS", "junk", 1);
    CHECK(default_threads() >= 1);
    ::unsetenv("ADCS_THREADS");
    CHECK(default_threads() >= 1);
}
