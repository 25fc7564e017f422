#include "adcs/synth.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "adcs/error.hpp"

namespace adcs {

namespace {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (spare_) {
            spare_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * std::numbers::pi * u2);
        spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    std::mt19937_64 gen_;
    bool spare_ = false;
    double cached_ = 0.0;
};

// Normalised coordinates in [0, 1) for every point, axis by axis.
template <class Fn>
std::vector<double> fill(const Dims &dims, Fn &&fn) {
    std::array<std::size_t, 3> d{1, 1, 1};
    for (std::size_t a = 0; a < dims.size(); ++a) d[a] = dims[a];
    std::vector<double> v;
    v.reserve(product(dims));
    for (std::size_t i = 0; i < d[0]; ++i)
        for (std::size_t j = 0; j < d[1]; ++j)
            for (std::size_t k = 0; k < d[2]; ++k)
                v.push_back(fn(std::array<double, 3>{static_cast<double>(i) / d[0], static_cast<double>(j) / d[1],
                                                     static_cast<double>(k) / d[2]}));
    return v;
}

Field finish(std::vector<double> v, const Dims &dims, DType dtype, const std::string &name) {
    for (double &x : v) x = round_to(dtype, x);
    return Field(name, dtype, dims, std::move(v));
}

struct Mode {
    std::array<double, 3> k{};
    double amp = 0.0;
    double phase = 0.0;
};

}  // namespace

SynthKind parse_synth_kind(const std::string &text) {
    if (text == "smooth-sine") return SynthKind::SmoothSine;
    if (text == "ramp") return SynthKind::Ramp;
    if (text == "gaussian-noise") return SynthKind::GaussianNoise;
    if (text == "turbulence-mix") return SynthKind::TurbulenceMix;
    if (text == "piecewise-constant") return SynthKind::PiecewiseConstant;
    throw Error(ErrorCode::Usage, "unknown synth kind '" + text + "'");
}

const char *synth_kind_name(SynthKind k) {
    switch (k) {
        case SynthKind::SmoothSine: return "smooth-sine";
        case SynthKind::Ramp: return "ramp";
        case SynthKind::GaussianNoise: return "gaussian-noise";
        case SynthKind::TurbulenceMix: return "turbulence-mix";
        case SynthKind::PiecewiseConstant: return "piecewise-constant";
    }
    return "?";
}

Field synthesize_mix(const Dims &dims, std::uint64_t seed, double slope, double noise, DType dtype,
                     const std::string &name) {
    Rng rng(seed);
    const std::size_t n = dims.size();
    std::vector<Mode> modes(32);
    double power = 0.0;
    for (auto &m : modes) {
        const double mag = rng.uniform(1.0, 12.0);
        std::array<double, 3> dir{};
        double norm = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            dir[a] = rng.normal();
            norm += dir[a] * dir[a];
        }
        norm = std::sqrt(norm) + 1e-12;
        for (std::size_t a = 0; a < n; ++a) m.k[a] = 2.0 * std::numbers::pi * mag * dir[a] / norm;
        m.amp = std::pow(mag, -slope);
        m.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        power += 0.5 * m.amp * m.amp;
    }
    const double sigma = noise * std::sqrt(power);
    auto v = fill(dims, [&](const std::array<double, 3> &u) {
        double s = 0.0;
        for (const auto &m : modes) s += m.amp * std::sin(m.k[0] * u[0] + m.k[1] * u[1] + m.k[2] * u[2] + m.phase);
        return s;
    });
    if (sigma > 0.0)
        for (double &x : v) x += sigma * rng.normal();
    return finish(std::move(v), dims, dtype, name);
}

Field synthesize(SynthKind kind, const Dims &dims, std::uint64_t seed, DType dtype, const std::string &name) {
    const std::string label = name.empty() ? synth_kind_name(kind) : name;
    Rng rng(seed);
    switch (kind) {
        case SynthKind::SmoothSine: {
            std::array<std::array<double, 3>, 3> freq{};
            std::array<double, 3> phase{}, amp{};
            for (std::size_t w = 0; w < 3; ++w) {
                for (std::size_t a = 0; a < dims.size(); ++a) freq[w][a] = rng.uniform(0.5, 3.0);
                phase[w] = rng.uniform(0.0, 2.0 * std::numbers::pi);
                amp[w] = rng.uniform(0.5, 2.0);
            }
            return finish(fill(dims,
                               [&](const std::array<double, 3> &u) {
                                   double s = 0.0;
                                   for (std::size_t w = 0; w < 3; ++w)
                                       s += amp[w] * std::sin(2.0 * std::numbers::pi *
                                                                  (freq[w][0] * u[0] + freq[w][1] * u[1] +
                                                                   freq[w][2] * u[2]) +
                                                              phase[w]);
                                   return s;
                               }),
                          dims, dtype, label);
        }
        case SynthKind::Ramp: {
            std::array<double, 3> c{};
            for (std::size_t a = 0; a < dims.size(); ++a) c[a] = rng.uniform(-10.0, 10.0);
            const double c0 = rng.uniform(-5.0, 5.0);
            return finish(fill(dims, [&](const std::array<double, 3> &u) { return c0 + c[0] * u[0] + c[1] * u[1] + c[2] * u[2]; }),
                          dims, dtype, label);
        }
        case SynthKind::GaussianNoise: {
            std::vector<double> v(product(dims));
            for (double &x : v) x = rng.normal();
            return finish(std::move(v), dims, dtype, label);
        }
        case SynthKind::TurbulenceMix:
            return synthesize_mix(dims, seed, 5.0 / 6.0, 0.02, dtype, label);
        case SynthKind::PiecewiseConstant: {
            constexpr std::size_t kSeeds = 12;
            std::array<std::array<double, 3>, kSeeds> at{};
            std::array<double, kSeeds> value{};
            for (std::size_t s = 0; s < kSeeds; ++s) {
                for (std::size_t a = 0; a < dims.size(); ++a) at[s][a] = rng.uniform();
                value[s] = std::round(rng.uniform(-8.0, 8.0));
            }
            return finish(fill(dims,
                               [&](const std::array<double, 3> &u) {
                                   std::size_t best = 0;
                                   double best_d = 1e300;
                                   for (std::size_t s = 0; s < kSeeds; ++s) {
                                       double d = 0.0;
                                       for (std::size_t a = 0; a < 3; ++a) d += (u[a] - at[s][a]) * (u[a] - at[s][a]);
                                       if (d < best_d) {
                                           best_d = d;
                                           best = s;
                                       }
                                   }
                                   return value[best];
                               }),
                          dims, dtype, label);
        }
    }
    throw Error(ErrorCode::Usage, "unknown synth kind");
}

std::vector<Field> synth_corpus(std::uint64_t seed) {
    std::vector<Field> c;
    auto s = [&](std::uint64_t k) { return seed * 1000003u + k; };
    const Dims d1{16384}, d2{128, 128}, d3{32, 32, 32};
    c.push_back(synthesize(SynthKind::SmoothSine, d2, s(1), DType::F32, "sine2d"));
    c.push_back(synthesize(SynthKind::SmoothSine, d3, s(2), DType::F32, "sine3d"));
    c.push_back(synthesize(SynthKind::SmoothSine, d1, s(3), DType::F64, "sine1d"));
    c.push_back(synthesize(SynthKind::Ramp, d2, s(4), DType::F32, "ramp2d"));
    c.push_back(synthesize(SynthKind::Ramp, d3, s(5), DType::F64, "ramp3d"));
    c.push_back(synthesize(SynthKind::PiecewiseConstant, d2, s(6), DType::F32, "pwc2d"));
    c.push_back(synthesize(SynthKind::PiecewiseConstant, d3, s(7), DType::F32, "pwc3d"));
    c.push_back(synthesize(SynthKind::GaussianNoise, d2, s(8), DType::F32, "noise2d"));
    c.push_back(synthesize(SynthKind::GaussianNoise, d3, s(9), DType::F32, "noise3d"));
    c.push_back(synthesize(SynthKind::TurbulenceMix, d2, s(10), DType::F32, "turb2d"));
    c.push_back(synthesize(SynthKind::TurbulenceMix, d3, s(11), DType::F32, "turb3d"));
    c.push_back(synthesize(SynthKind::TurbulenceMix, d1, s(12), DType::F32, "turb1d"));
    c.push_back(synthesize_mix(d2, s(13), 1.5, 0.0, DType::F32, "spectral2d"));
    c.push_back(synthesize_mix(d3, s(14), 1.5, 0.0, DType::F64, "spectral3d"));
    c.push_back(synthesize_mix(d2, s(15), 0.5, 0.1, DType::F32, "rough2d"));
    c.push_back(synthesize_mix(d3, s(16), 0.5, 0.1, DType::F32, "rough3d"));
    c.push_back(synthesize_mix(d2, s(17), 1.0, 0.005, DType::F32, "mild2d"));
    c.push_back(synthesize_mix(d3, s(18), 1.0, 0.005, DType::F32, "mild3d"));
    c.push_back(synthesize_mix({64, 64, 16}, s(19), 2.0, 0.001, DType::F32, "slab3d"));
    c.push_back(synthesize_mix({4096}, s(20), 1.0, 0.05, DType::F64, "signal1d"));
    return c;
}

}  // namespace adcs
