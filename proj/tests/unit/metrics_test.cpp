#include <doctest.h>

#include <cmath>

#include "adcs/metrics.hpp"
#include "helpers.hpp"

using namespace adcs;

TEST_CASE("compare") {
    const Field f = testing::random_field({40, 30}, 1, DType::F32);
    const double vr = f.value_range();
    SUBCASE("identical fields") {
        const auto q = compare(f, f, 0);
        CHECK(q.mse == 0.0);
        CHECK(q.psnr == 999.0);
        CHECK(q.max_abs_error == 0.0);
    }
    SUBCASE("constant offset of half a bin") {
        const double delta = 0.01 * vr;
        std::vector<double> v(f.data().begin(), f.data().end());
        for (auto &x : v) x += delta / 2;
        const Field g("g", DType::F32, f.dims(), v);
        const auto q = compare(f, g, 0);
        CHECK(q.psnr == doctest::Approx(20 * std::log10(vr / (delta / 2))).epsilon(1e-9));
        CHECK(q.max_abs_error == doctest::Approx(delta / 2));
        CHECK(q.rmse == doctest::Approx(delta / 2));
        CHECK(q.nrmse == doctest::Approx(0.005));
    }
    SUBCASE("8 bits per f32 value is ratio 4") {
        const auto q = compare(f, f, 8 * f.size());
        CHECK(q.bit_rate == 8.0);
        CHECK(q.compression_ratio == 4.0);
    }
    SUBCASE("MSE symmetric, range from the original") {
        const Field g = testing::random_field({40, 30}, 2, DType::F32);
        const auto a = compare(f, g, 0), b = compare(g, f, 0);
        CHECK(a.mse == doctest::Approx(b.mse).epsilon(1e-14));
        CHECK(a.psnr == doctest::Approx(-10 * std::log10(a.mse) + 20 * std::log10(vr)));
    }
    SUBCASE("PSNR falls as noise grows") {
        double prev = 1e9;
        for (double amp : {1e-5, 1e-4, 1e-3, 1e-2, 1e-1}) {
            auto noise = testing::uniform_values(f.size(), 3, -amp, amp);
            for (std::size_t i = 0; i < noise.size(); ++i) noise[i] += f[i];
            const auto q = compare(f, testing::make_field(f.dims(), noise, DType::F32), 0);
            CHECK(q.psnr < prev);
            prev = q.psnr;
        }
    }
    SUBCASE("shape mismatch") {
        CHECK_ERROR_CODE(compare(f, testing::random_field({30, 40}, 1, DType::F32), 0), ErrorCode::ShapeMismatch);
        CHECK_ERROR_CODE(compare(f, testing::random_field({40, 30}, 1, DType::F64), 0), ErrorCode::ShapeMismatch);
    }
}
