#include "adcs/transform.hpp"

#include <cmath>
#include <numbers>

#include "adcs/error.hpp"

namespace adcs {

BotMatrix::BotMatrix(double t) : t_(t) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::ParameterOutOfRange, "transform parameter must lie in [0, 1]");
    const double angle = std::numbers::pi / 2.0 * t;
    const double s = std::numbers::sqrt2 * std::sin(angle);
    const double c = std::numbers::sqrt2 * std::cos(angle);
    m_ = {{{1, 1, 1, 1}, {c, s, -s, -c}, {1, -1, -1, 1}, {s, -c, c, -s}}};
    for (auto &row : m_)
        for (auto &v : row) v *= 0.5;
}

double BotMatrix::column_gain() const {
    double g = 0.0;
    for (std::size_t c = 0; c < 4; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < 4; ++r) sum += std::abs(m_[r][c]);
        g = std::max(g, sum);
    }
    return g;
}

namespace {

template <bool Transpose>
void apply_axis(std::span<double> block, std::size_t ndim, std::size_t axis, const BotMatrix &t) {
    std::size_t stride = 1;
    for (std::size_t a = axis; a < ndim; ++a) stride *= kBlockEdge;
    const std::size_t n = block.size();
    const auto &m = t.entries();
    for (std::size_t base = 0; base < n; ++base) {
        if ((base / stride) % kBlockEdge != 0) continue;
        const double x0 = block[base], x1 = block[base + stride], x2 = block[base + 2 * stride],
                     x3 = block[base + 3 * stride];
        for (std::size_t r = 0; r < 4; ++r) {
            block[base + r * stride] = Transpose
                                           ? m[0][r] * x0 + m[1][r] * x1 + m[2][r] * x2 + m[3][r] * x3
                                           : m[r][0] * x0 + m[r][1] * x1 + m[r][2] * x2 + m[r][3] * x3;
        }
    }
}

}  // namespace

void bot_forward(std::span<double> block, std::size_t ndim, const BotMatrix &t) {
    for (std::size_t axis = 1; axis <= ndim; ++axis) apply_axis<false>(block, ndim, axis, t);
}

void bot_inverse(std::span<double> block, std::size_t ndim, const BotMatrix &t) {
    for (std::size_t axis = ndim; axis >= 1; --axis) apply_axis<true>(block, ndim, axis, t);
}

Block bot_forward(const Block &b, const BotMatrix &t) {
    Block out = b;
    bot_forward(std::span<double>(out.values), out.ndim, t);
    return out;
}

Block bot_inverse(const Block &b, const BotMatrix &t) {
    Block out = b;
    bot_inverse(std::span<double>(out.values), out.ndim, t);
    return out;
}

LorenzoStencil::LorenzoStencil(const Dims &d) : ndim(d.size()) {
    for (std::size_t a = 0; a < ndim; ++a) dims[a] = d[a];
    std::size_t s = 1;
    for (std::size_t a = 3; a-- > 0;) {
        stride[a] = s;
        s *= dims[a];
    }
}

PredictionErrors lorenzo_errors(const Field &f, const ErrorReconstructor &reconstruct) {
    LorenzoStencil st(f.dims());
    std::vector<double> recon(f.size());
    PredictionErrors out;
    out.values.resize(f.size());
    st.for_each([&](std::size_t i, std::size_t j, std::size_t k, std::size_t off) {
        const double pred = st.predict(recon.data(), i, j, k);
        const double err = f[off] - pred;
        out.values[off] = err;
        recon[off] = pred + reconstruct(err);
    });
    return out;
}

std::vector<double> lorenzo_reconstruct(std::span<const double> errors, const Dims &dims) {
    if (errors.size() != product(dims)) throw Error(ErrorCode::SizeMismatch, "error buffer does not match dims");
    LorenzoStencil st(dims);
    std::vector<double> recon(errors.size());
    st.for_each([&](std::size_t i, std::size_t j, std::size_t k, std::size_t off) {
        recon[off] = st.predict(recon.data(), i, j, k) + errors[off];
    });
    return recon;
}

}  // namespace adcs
