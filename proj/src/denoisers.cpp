#include "hsiu/denoiser.hpp"

#include <cmath>
#include <vector>

#include "hsiu/errors.hpp"

namespace hsiu {

namespace {

void require_noise_level(double noise_level) {
    if (!(noise_level >= 0.0) || !std::isfinite(noise_level)) {
        throw DomainError("denoiser: noise level must be finite and >= 0");
    }
}

// Reflect about the edge sample: -1 -> 1, n -> n - 2.
int mirror(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

}  // namespace

HsiCube IdentityDenoiser::denoise(const HsiCube& input, double noise_level) const {
    require_noise_level(noise_level);
    return input;
}

HsiCube QuadraticProxDenoiser::denoise(const HsiCube& input, double noise_level) const {
    require_noise_level(noise_level);
    const double shrink = 1.0 / (1.0 + noise_level * noise_level);
    HsiCube out(input.shape());
    for (std::size_t i = 0; i < input.size(); ++i) {
        out[i] = static_cast<float>(shrink * double(input[i]));
    }
    return out;
}

double QuadraticProxDenoiser::prior(const HsiCube& z) { return 0.5 * squared_norm(z); }

GaussianSmoothingDenoiser::GaussianSmoothingDenoiser(double gain) : gain_(gain) {
    if (!(gain > 0.0) || !std::isfinite(gain)) {
        throw DomainError("gaussian denoiser: gain must be positive");
    }
}

HsiCube GaussianSmoothingDenoiser::denoise(const HsiCube& input, double noise_level) const {
    require_noise_level(noise_level);
    const double sigma = gain_ * noise_level;
    if (sigma < 1e-3) return input;

    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(2 * radius + 1);
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        taps[t + radius] = std::exp(-double(t) * t / (2.0 * sigma * sigma));
        sum += taps[t + radius];
    }
    for (double& t : taps) t /= sum;

    const int h = static_cast<int>(input.height());
    const int w = static_cast<int>(input.width());
    HsiCube out(input.shape());
    std::vector<double> rows(std::size_t(h) * w);
    for (std::uint32_t b = 0; b < input.bands(); ++b) {
        const auto src = input.band(b);
        auto dst = out.band(b);
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                double acc = 0.0;
                for (int t = -radius; t <= radius; ++t) {
                    acc += taps[t + radius] * src[std::size_t(r) * w + mirror(c + t, w)];
                }
                rows[std::size_t(r) * w + c] = acc;
            }
        }
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                double acc = 0.0;
                for (int t = -radius; t <= radius; ++t) {
                    acc += taps[t + radius] * rows[std::size_t(mirror(r + t, h)) * w + c];
                }
                dst[std::size_t(r) * w + c] = static_cast<float>(acc);
            }
        }
    }
    return out;
}

}  // namespace hsiu
