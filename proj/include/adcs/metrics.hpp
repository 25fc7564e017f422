#pragma once

#include <cstdint>

#include "adcs/field.hpp"

namespace adcs {

struct QualityReport {
    double mse = 0.0;
    double rmse = 0.0;
    double nrmse = 0.0;
    double psnr = 0.0;
    double max_abs_error = 0.0;
    double bit_rate = 0.0;
    double compression_ratio = 0.0;
};

/// Error statistics against `original` (whose value range is used) and rate
/// from the payload size alone.
QualityReport compare(const Field &original, const Field &reconstructed, std::uint64_t payload_bits);

}  // namespace adcs
