#include "hsiu/metrics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "hsiu/errors.hpp"

namespace hsiu {

namespace {

// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
std::vector<double> gaussian_taps(int size, double sigma) {
    std::vector<double> taps(size);
    const double centre = (size - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - centre;
        taps[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += taps[i];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

// Separable 'valid' filtering of a single plane.
std::vector<double> filter_valid(const std::vector<double>& plane, int height, int width,
                                 const std::vector<double>& taps) {
    const int k = static_cast<int>(taps.size());
    const int out_w = width - k + 1;
    const int out_h = height - k + 1;
    std::vector<double> rows(std::size_t(height) * out_w);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < out_w; ++c) {
            double acc = 0.0;
            for (int t = 0; t < k; ++t) acc += taps[t] * plane[std::size_t(r) * width + c + t];
            rows[std::size_t(r) * out_w + c] = acc;
        }
    }
    std::vector<double> out(std::size_t(out_h) * out_w);
    for (int r = 0; r < out_h; ++r) {
        for (int c = 0; c < out_w; ++c) {
            double acc = 0.0;
            for (int t = 0; t < k; ++t) acc += taps[t] * rows[std::size_t(r + t) * out_w + c];
            out[std::size_t(r) * out_w + c] = acc;
        }
    }
    return out;
}

double ssim_band(std::span<const float> ref, std::span<const float> tst, int height, int width,
                 const std::vector<double>& taps, double c1, double c2) {
    const std::size_t n = ref.size();
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = ref[i];
        y[i] = tst[i];
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, height, width, taps);
    const auto my = filter_valid(y, height, width, taps);
    const auto sxx = filter_valid(xx, height, width, taps);
    const auto syy = filter_valid(yy, height, width, taps);
    const auto sxy = filter_valid(xy, height, width, taps);

    double acc = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = sxx[i] - mx[i] * mx[i];
        const double vy = syy[i] - my[i] * my[i];
        const double cov = sxy[i] - mx[i] * my[i];
        const double num = (2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2);
        const double den = (mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2);
        acc += num / den;
    }
    return acc / static_cast<double>(mx.size());
}

}  // namespace

double psnr(const HsiCube& reference, const HsiCube& test, double peak) {
    require_conformable(reference, test, "psnr");
    if (!(peak > 0.0)) throw DomainError("psnr: peak must be positive");
    double sse = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double d = double(reference[i]) - double(test[i]);
        sse += d * d;
    }
    const double mse = sse / static_cast<double>(reference.size());
    if (mse == 0.0) return kPsnrIdentical;
    return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const HsiCube& reference, const HsiCube& test, double peak,
            const SsimOptions& options) {
    require_conformable(reference, test, "ssim");
    if (!(peak > 0.0)) throw DomainError("ssim: peak must be positive");
    const int h = static_cast<int>(reference.height());
    const int w = static_cast<int>(reference.width());
    if (h < options.window || w < options.window) {
        throw DegenerateInputError("ssim: cube " + std::to_string(h) + "x" + std::to_string(w) +
                                   " is smaller than the " + std::to_string(options.window) +
                                   "x" + std::to_string(options.window) + " window");
    }
    const auto taps = gaussian_taps(options.window, options.sigma);
    const double c1 = (options.k1 * peak) * (options.k1 * peak);
    const double c2 = (options.k2 * peak) * (options.k2 * peak);
    double acc = 0.0;
    for (std::uint32_t b = 0; b < reference.bands(); ++b) {
        acc += ssim_band(reference.band(b), test.band(b), h, w, taps, c1, c2);
    }
    return acc / reference.bands();
}

double ergas(const HsiCube& reference, const HsiCube& test, double scale_ratio) {
    require_conformable(reference, test, "ergas");
    if (!(scale_ratio > 0.0)) throw DomainError("ergas: scale ratio must be positive");
    constexpr double kMeanTolerance = 1e-12;
    double acc = 0.0;
    for (std::uint32_t b = 0; b < reference.bands(); ++b) {
        const auto ref = reference.band(b);
        const auto tst = test.band(b);
        double sum = 0.0;
        double sse = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            sum += ref[i];
            const double d = double(ref[i]) - double(tst[i]);
            sse += d * d;
        }
        const double mean = sum / static_cast<double>(ref.size());
        if (std::abs(mean) < kMeanTolerance) {
            throw DegenerateInputError("ergas: reference band " + std::to_string(b) +
                                       " has zero mean");
        }
        acc += (sse / static_cast<double>(ref.size())) / (mean * mean);
    }
    return 100.0 * scale_ratio * std::sqrt(acc / reference.bands());
}

MetricReport evaluate(const HsiCube& reference, const HsiCube& test, double peak,
                      double scale_ratio) {
    return {psnr(reference, test, peak), ssim(reference, test, peak),
            ergas(reference, test, scale_ratio)};
}

}  // namespace hsiu
