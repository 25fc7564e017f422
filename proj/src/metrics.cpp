#include "adcs/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "adcs/error.hpp"
#include "adcs/estimate.hpp"

namespace adcs {

QualityReport compare(const Field &original, const Field &reconstructed, std::uint64_t payload_bits) {
    if (original.dims() != reconstructed.dims() || original.dtype() != reconstructed.dtype())
        throw Error(ErrorCode::ShapeMismatch, "'" + original.name() + "' " + dims_to_string(original.dims()) +
                                                  " " + dtype_name(original.dtype()) + " vs " +
                                                  dims_to_string(reconstructed.dims()) + " " +
                                                  dtype_name(reconstructed.dtype()));
    QualityReport q;
    const std::size_t n = original.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = original[i] - reconstructed[i];
        sum += e * e;
        q.max_abs_error = std::max(q.max_abs_error, std::abs(e));
    }
    const double vr = original.value_range();
    q.mse = sum / static_cast<double>(n);
    q.rmse = std::sqrt(q.mse);
    q.nrmse = vr > 0.0 ? q.rmse / vr : 0.0;
    q.psnr = psnr_from_mse(q.mse, vr);
    q.bit_rate = static_cast<double>(payload_bits) / static_cast<double>(n);
    q.compression_ratio = q.bit_rate > 0.0 ? element_bits(original.dtype()) / q.bit_rate : 0.0;
    return q;
}

}  // namespace adcs
