#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adcs/field.hpp"

namespace adcs {

enum class SynthKind { SmoothSine, Ramp, GaussianNoise, TurbulenceMix, PiecewiseConstant };

SynthKind parse_synth_kind(const std::string &text);
const char *synth_kind_name(SynthKind k);

/// Deterministic by seed on every platform: draws come straight from
/// mt19937_64 and are shaped here rather than by std distributions.
Field synthesize(SynthKind kind, const Dims &dims, std::uint64_t seed, DType dtype = DType::F32,
                 const std::string &name = "");

/// Spectral mix of random modes with power-law amplitudes plus white noise
/// at `noise` times the signal's standard deviation.
Field synthesize_mix(const Dims &dims, std::uint64_t seed, double slope, double noise, DType dtype = DType::F32,
                     const std::string &name = "");

/// Twenty mixed fields (1D-3D, smooth to noisy) used for corpus-level checks.
std::vector<Field> synth_corpus(std::uint64_t seed = 2024);

}  // namespace adcs
