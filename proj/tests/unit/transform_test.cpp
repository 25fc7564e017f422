#include <doctest.h>

#include <cmath>
#include <numbers>

#include "adcs/error.hpp"
#include "adcs/transform.hpp"
#include "helpers.hpp"

using namespace adcs;

namespace {

using Mat = std::array<std::array<double, 4>, 4>;

Mat reference_matrix(double t) {
    const double s = std::sqrt(2.0) * std::sin(std::numbers::pi * t / 2), c = std::sqrt(2.0) * std::cos(std::numbers::pi * t / 2);
    Mat m{{{1, 1, 1, 1}, {c, s, -s, -c}, {1, -1, -1, 1}, {s, -c, c, -s}}};
    for (auto &r : m)
        for (auto &x : r) x *= 0.5;
    return m;
}

// Separable transform written out as nested sums.
std::vector<double> reference_forward(const std::vector<double> &x, std::size_t n, const Mat &m) {
    std::vector<double> y(x.size(), 0.0);
    if (n == 1) {
        for (int a = 0; a < 4; ++a)
            for (int i = 0; i < 4; ++i) y[a] += m[a][i] * x[i];
    } else if (n == 2) {
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j) y[a * 4 + b] += m[a][i] * m[b][j] * x[i * 4 + j];
    } else {
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    for (int i = 0; i < 4; ++i)
                        for (int j = 0; j < 4; ++j)
                            for (int k = 0; k < 4; ++k)
                                y[(a * 4 + b) * 4 + c] += m[a][i] * m[b][j] * m[c][k] * x[(i * 4 + j) * 4 + k];
    }
    return y;
}

double orthogonality_error(const BotMatrix &t) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += t.at(i, k) * t.at(j, k);
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

}  // namespace

TEST_CASE("transform matrix family") {
    SUBCASE("t = 0 is Haar-like") {
        const BotMatrix t(0.0);
        const double h = std::sqrt(2.0) / 2.0;
        CHECK(t.at(1, 0) == doctest::Approx(h));
        CHECK(t.at(1, 1) == doctest::Approx(0.0));
        CHECK(t.at(1, 2) == doctest::Approx(0.0));
        CHECK(t.at(1, 3) == doctest::Approx(-h));
    }
    SUBCASE("t = 1/2 has all entries +-1/2") {
        const BotMatrix t(0.5);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK(std::abs(t.at(i, j)) == doctest::Approx(0.5));
    }
    SUBCASE("matches the closed form and is orthogonal for any t") {
        for (double v = 0.0; v <= 1.0; v += 0.0625) {
            const BotMatrix t(v);
            const Mat ref = reference_matrix(v);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) CHECK(t.at(i, j) == doctest::Approx(ref[i][j]).epsilon(1e-15));
            CHECK(orthogonality_error(t) < 1e-12);
        }
    }
    SUBCASE("parameter outside [0, 1] is rejected") {
        for (double v : {-0.01, 1.01}) {
            try {
                make_bot_matrix(v);
                FAIL("accepted t");
            } catch (const Error &e) {
                CHECK(e.code() == ErrorCode::ParameterOutOfRange);
            }
        }
    }
}

TEST_CASE("forward transform") {
    SUBCASE("t = 0 maps [1,1,1,1] to [2,0,0,0]") {
        std::vector<double> b{1, 1, 1, 1};
        bot_forward(b, 1, BotMatrix(0.0));
        CHECK(b[0] == doctest::Approx(2.0));
        for (int i = 1; i < 4; ++i) CHECK(b[i] == doctest::Approx(0.0));
    }
    SUBCASE("zero block stays zero") {
        std::vector<double> b(64, 0.0);
        bot_forward(b, 3, BotMatrix());
        for (double x : b) CHECK(x == 0.0);
    }
    SUBCASE("agrees with the separable sum for n = 1..3") {
        for (std::size_t n = 1; n <= 3; ++n)
            for (double t : {0.0, 0.25, 0.4}) {
                auto x = testing::uniform_values(block_size(n), 7 * n);
                const auto want = reference_forward(x, n, reference_matrix(t));
                bot_forward(x, n, BotMatrix(t));
                for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(want[i]).epsilon(1e-12));
            }
    }
}

TEST_CASE("inverse, norm preservation and error equality") {
    for (std::size_t n = 1; n <= 3; ++n)
        for (int trial = 0; trial < 20; ++trial) {
            const BotMatrix t(trial / 19.0);
            const auto x = testing::uniform_values(block_size(n), 1000 + 31 * trial + n, -50, 50);
            auto y = x;
            bot_forward(y, n, t);
            CHECK(std::abs(testing::l2(y) / testing::l2(x) - 1.0) < 1e-10);
            auto z = y;
            bot_inverse(z, n, t);
            for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(z[i] - x[i]) <= 1e-10 * testing::l2(x));

            // Perturbing coefficients moves the block by the same L2 distance.
            const auto noise = testing::uniform_values(y.size(), 5000 + trial, -0.01, 0.01);
            auto yp = y;
            for (std::size_t i = 0; i < yp.size(); ++i) yp[i] += noise[i];
            auto xp = yp;
            bot_inverse(xp, n, t);
            std::vector<double> dx(x.size()), dy(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                dx[i] = x[i] - xp[i];
                dy[i] = y[i] - yp[i];
            }
            CHECK(std::abs(testing::l2(dx) / testing::l2(dy) - 1.0) < 1e-10);
        }
}

TEST_CASE("block overloads keep the padding flags") {
    Block b;
    b.ndim = 2;
    b.values = testing::uniform_values(16, 3);
    b.padded.assign(16, false);
    b.padded[15] = true;
    const Block f = bot_forward(b, BotMatrix());
    CHECK(f.padded == b.padded);
    const Block g = bot_inverse(f, BotMatrix());
    for (int i = 0; i < 16; ++i) CHECK(g.values[i] == doctest::Approx(b.values[i]));
}

namespace {

// Independent Lorenzo: predictions from a dense reconstructed array with
// zeros outside the field.
std::vector<double> reference_lorenzo(const Field &f, const std::function<double(double)> &rec) {
    const auto &d = f.dims();
    const std::size_t n0 = d[0], n1 = d.size() > 1 ? d[1] : 1, n2 = d.size() > 2 ? d[2] : 1;
    std::vector<double> r(f.size()), e(f.size());
    auto at = [&](long i, long j, long k) -> double {
        if (i < 0 || j < 0 || k < 0) return 0.0;
        return r[(i * n1 + j) * n2 + k];
    };
    for (long i = 0; i < long(n0); ++i)
        for (long j = 0; j < long(n1); ++j)
            for (long k = 0; k < long(n2); ++k) {
                double p;
                if (d.size() == 1) p = at(i - 1, 0, 0);
                else if (d.size() == 2) p = at(i - 1, j, 0) + at(i, j - 1, 0) - at(i - 1, j - 1, 0);
                else
                    p = at(i - 1, j, k) + at(i, j - 1, k) + at(i, j, k - 1) - at(i - 1, j - 1, k) -
                        at(i - 1, j, k - 1) - at(i, j - 1, k - 1) + at(i - 1, j - 1, k - 1);
                const std::size_t off = (i * n1 + j) * n2 + k;
                e[off] = f[off] - p;
                r[off] = p + rec(e[off]);
            }
    return e;
}

}  // namespace

TEST_CASE("Lorenzo prediction errors") {
    const auto lossless = [](double e) { return e; };
    SUBCASE("constant 1D field") {
        const Field f("c", DType::F64, {4}, {2.5, 2.5, 2.5, 2.5});
        CHECK(lorenzo_errors(f, lossless).values == std::vector<double>{2.5, 0, 0, 0});
    }
    SUBCASE("2D ramp is exact away from the first row and column") {
        std::vector<double> v;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 5; ++j) v.push_back(i + j);
        const Field f("r", DType::F64, {6, 5}, v);
        const auto e = lorenzo_errors(f, lossless).values;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 5; ++j) CHECK(e[i * 5 + j] == ((i == 0 && j == 0) ? 0.0 : (i == 0 || j == 0) ? 1.0 : 0.0));
    }
    SUBCASE("matches an independent implementation with a quantizing callback") {
        const double delta = 0.05;
        const auto quant = [&](double e) { return delta * std::floor(e / delta + 0.5); };
        for (const Dims &d : {Dims{37}, Dims{9, 11}, Dims{5, 6, 7}}) {
            const Field f = testing::random_field(d, product(d));
            const auto got = lorenzo_errors(f, quant).values;
            const auto want = reference_lorenzo(f, quant);
            for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-13));
        }
    }
}

TEST_CASE("Lorenzo reconstruction") {
    const double delta = 0.02;
    const auto quant = [&](double e) { return delta * std::floor(e / delta + 0.5); };
    for (const Dims &d : {Dims{50}, Dims{12, 9}, Dims{6, 5, 7}}) {
        const Field f = testing::random_field(d, 77 + product(d));
        SUBCASE("lossless errors give back the field") {
            const auto x = lorenzo_reconstruct(lorenzo_errors(f, [](double e) { return e; }).values, d);
            for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(f[i]).epsilon(1e-12));
        }
        SUBCASE("quantized errors: pointwise error equals error-domain error, at most delta/2") {
            const auto e = lorenzo_errors(f, quant).values;
            std::vector<double> eq(e.size());
            for (std::size_t i = 0; i < e.size(); ++i) eq[i] = quant(e[i]);
            const auto x = lorenzo_reconstruct(eq, d);
            for (std::size_t i = 0; i < x.size(); ++i) {
                CHECK(std::abs((f[i] - x[i]) - (e[i] - eq[i])) < 1e-9 * f.value_range());
                CHECK(std::abs(f[i] - x[i]) <= delta / 2 + 1e-12);
            }
        }
    }
    SUBCASE("zero errors give the pure prediction cascade (all zero)") {
        const auto x = lorenzo_reconstruct(std::vector<double>(24, 0.0), {2, 3, 4});
        for (double v : x) CHECK(v == 0.0);
    }
}
