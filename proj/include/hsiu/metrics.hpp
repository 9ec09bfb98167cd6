#pragma once

#include <limits>

#include "hsiu/cube.hpp"

namespace hsiu {

/// Full-reference quality scores of a test cube against its reference.
struct MetricReport {
    double psnr = 0.0;   ///< dB; +infinity when the cubes are identical
    double ssim = 0.0;
    double ergas = 0.0;
};

inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// SSIM window parameters. The defaults are the usual Wang et al. constants.
struct SsimOptions {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
};

/// 10 log10(peak^2 / MSE) over all M*N*P elements. Returns kPsnrIdentical on zero MSE.
double psnr(const HsiCube& reference, const HsiCube& test, double peak = 1.0);

/// Mean SSIM: per band over all valid window positions (no padding), then averaged over bands.
double ssim(const HsiCube& reference, const HsiCube& test, double peak = 1.0,
            const SsimOptions& options = {});

/// 100 * ratio * sqrt(mean_b RMSE_b^2 / mean_b^2). Throws DegenerateInputError on a zero-mean
/// reference band.
double ergas(const HsiCube& reference, const HsiCube& test, double scale_ratio = 1.0);

MetricReport evaluate(const HsiCube& reference, const HsiCube& test, double peak = 1.0,
                      double scale_ratio = 1.0);

}  // namespace hsiu
