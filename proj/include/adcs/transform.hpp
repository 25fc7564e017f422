#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "adcs/field.hpp"

namespace adcs {

inline constexpr double kDefaultBotParameter = 0.25;

/**
 * Orthogonal 4x4 block transform from the one-parameter family
 *
 *        | 1  1  1  1 |
 *  T = ½ | c  s -s -c |,  s = √2 sin(πt/2), c = √2 cos(πt/2).
 *        | 1 -1 -1  1 |
 *        | s -c  c -s |
 *
 * t = 0 is Haar-like, t = 1/4 DCT-II-like, t = 1/2 Walsh-Hadamard.
 */
class BotMatrix {
  public:
    explicit BotMatrix(double t = kDefaultBotParameter);

    double parameter() const { return t_; }
    double at(std::size_t r, std::size_t c) const { return m_[r][c]; }
    const std::array<std::array<double, 4>, 4> &entries() const { return m_; }

    /// Largest column L1 norm: bound on how much one axis pass can amplify a
    /// max-norm error when applying the transpose.
    double column_gain() const;

  private:
    double t_;
    std::array<std::array<double, 4>, 4> m_{};
};

inline BotMatrix make_bot_matrix(double t) { return BotMatrix(t); }

/// Applies T along axes 1..n (in place).
void bot_forward(std::span<double> block, std::size_t ndim, const BotMatrix &t);
/// Applies Tᵗ along axes n..1 (in place).
void bot_inverse(std::span<double> block, std::size_t ndim, const BotMatrix &t);

Block bot_forward(const Block &b, const BotMatrix &t);
Block bot_inverse(const Block &b, const BotMatrix &t);

/// Row-major strides and extents shared by the Lorenzo routines.
struct LorenzoStencil {
    std::size_t ndim = 1;
    std::array<std::size_t, 3> dims{1, 1, 1};
    std::array<std::size_t, 3> stride{0, 0, 0};

    explicit LorenzoStencil(const Dims &d);

    /// Inclusion-exclusion prediction from already-visited neighbours of
    /// (i, j, k); neighbours outside the field read as 0.
    double predict(const double *recon, std::size_t i, std::size_t j, std::size_t k) const {
        const std::size_t off = i * stride[0] + j * stride[1] + k * stride[2];
        switch (ndim) {
            case 1:
                return i ? recon[off - stride[0]] : 0.0;
            case 2: {
                const double a = i ? recon[off - stride[0]] : 0.0;
                const double b = j ? recon[off - stride[1]] : 0.0;
                const double c = (i && j) ? recon[off - stride[0] - stride[1]] : 0.0;
                return a + b - c;
            }
            default: {
                const std::size_t si = stride[0], sj = stride[1], sk = stride[2];
                auto at = [&](bool ok, std::size_t back) { return ok ? recon[off - back] : 0.0; };
                return at(i, si) + at(j, sj) + at(k, sk) - at(i && j, si + sj) - at(i && k, si + sk) -
                       at(j && k, sj + sk) + at(i && j && k, si + sj + sk);
            }
        }
    }

    template <class Fn>
    void for_each(Fn &&fn) const {
        std::size_t off = 0;
        for (std::size_t i = 0; i < dims[0]; ++i)
            for (std::size_t j = 0; j < dims[1]; ++j)
                for (std::size_t k = 0; k < dims[2]; ++k) fn(i, j, k, off++);
    }
};

struct PredictionErrors {
    std::vector<double> values;
};

/// Maps a prediction error to the value the decoder will see for it.
using ErrorReconstructor = std::function<double(double)>;

/// Prediction errors X - X_pred where predictions use reconstructed
/// neighbours (neighbour = prediction + reconstruct(error)).
PredictionErrors lorenzo_errors(const Field &f, const ErrorReconstructor &reconstruct);

/// Rebuilds the field from reconstructed prediction errors.
std::vector<double> lorenzo_reconstruct(std::span<const double> errors, const Dims &dims);

}  // namespace adcs
