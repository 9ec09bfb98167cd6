#pragma once

#include <string>

#include "hsiu/cube.hpp"

namespace hsiu {

/// Gaussian denoiser plugged into the Z-update.
///
/// Implementations must return a cube conformable with `input` and free of NaN/Inf.
/// Implementations used for convergence testing must reduce to the identity at
/// noise_level == 0.
class Denoiser {
public:
    virtual ~Denoiser() = default;
    virtual HsiCube denoise(const HsiCube& input, double noise_level) const = 0;
    virtual std::string name() const = 0;
};

/// Returns its input unchanged.
class IdentityDenoiser final : public Denoiser {
public:
    HsiCube denoise(const HsiCube& input, double noise_level) const override;
    std::string name() const override { return "identity"; }
};

/// Exact proximal map of the quadratic prior phi(Z) = 0.5 ||Z||^2.
///
/// With beta = 1 / noise_level^2 the Z-subproblem minimizer is X * beta / (beta + 1),
/// which equals X / (1 + noise_level^2).
class QuadraticProxDenoiser final : public Denoiser {
public:
    HsiCube denoise(const HsiCube& input, double noise_level) const override;
    std::string name() const override { return "prox-quadratic"; }

    /// The prior itself, for energy evaluation.
    static double prior(const HsiCube& z);
};

/// Per-band separable Gaussian blur with spatial sigma = gain * noise_level pixels.
/// Borders are mirrored (edge sample not repeated).
class GaussianSmoothingDenoiser final : public Denoiser {
public:
    explicit GaussianSmoothingDenoiser(double gain = 5.0);
    HsiCube denoise(const HsiCube& input, double noise_level) const override;
    std::string name() const override { return "gaussian"; }
    double gain() const noexcept { return gain_; }

private:
    double gain_;
};

}  // namespace hsiu
