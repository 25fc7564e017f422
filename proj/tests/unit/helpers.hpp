#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "adcs/error.hpp"
#include "adcs/field.hpp"

// Checks that expr throws adcs::Error carrying the given code.
#define CHECK_ERROR_CODE(expr, ec)                                   \
    do {                                                             \
        bool thrown_ = false;                                        \
        try {                                                        \
            (void)(expr);                                            \
        } catch (const adcs::Error &e_) {                            \
            thrown_ = true;                                          \
            CHECK(e_.code() == (ec));                                \
        }                                                            \
        CHECK_MESSAGE(thrown_, "expected adcs::Error from " #expr); \
    } while (0)

namespace testing {

inline std::vector<double> uniform_values(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto &x : v) x = u(rng);
    return v;
}

inline std::vector<double> gaussian_values(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    std::vector<double> v(n);
    for (auto &x : v) x = g(rng);
    return v;
}

inline adcs::Field make_field(const adcs::Dims &dims, std::vector<double> v, adcs::DType t = adcs::DType::F64,
                              const std::string &name = "f") {
    if (t == adcs::DType::F32)
        for (auto &x : v) x = static_cast<float>(x);
    return adcs::Field(name, t, dims, std::move(v));
}

inline adcs::Field random_field(const adcs::Dims &dims, std::uint64_t seed, adcs::DType t = adcs::DType::F64) {
    return make_field(dims, uniform_values(adcs::product(dims), seed), t);
}

// Smooth field: a few low-frequency sines.
inline adcs::Field smooth_field(const adcs::Dims &dims, std::uint64_t seed, adcs::DType t = adcs::DType::F32) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 3.0);
    const double a = u(rng), b = u(rng), c = u(rng);
    const std::size_t n0 = dims[0], n1 = dims.size() > 1 ? dims[1] : 1, n2 = dims.size() > 2 ? dims[2] : 1;
    std::vector<double> v;
    v.reserve(n0 * n1 * n2);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j)
            for (std::size_t k = 0; k < n2; ++k)
                v.push_back(std::sin(a * i / double(n0) * 6.28) * std::cos(b * j / double(n1) * 6.28) +
                            0.5 * std::sin(c * k / double(n2) * 6.28 + 0.3));
    return make_field(dims, std::move(v), t);
}

inline double l2(const std::vector<double> &v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace testing
