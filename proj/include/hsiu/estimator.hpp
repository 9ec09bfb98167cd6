#pragma once

#include <cstdint>

#include "hsiu/cube.hpp"
#include "hsiu/solver.hpp"
#include "hsiu/weights.hpp"

namespace hsiu {

/// Layer widths of the hyperparameter estimation head.
struct EstimatorConfig {
    int conv_channels = 16;    ///< conv1x1 output, C0
    int strided_channels = 32; ///< strided conv3x3 output, C1
    int hidden1 = 64;
    int hidden2 = 64;
};

/// Lower bound added after softplus so every parameter is strictly positive.
inline constexpr double kEstimatorFloor = 1e-4;

/// Seeded fan-in uniform weights, names prefixed "estimator.".
///
/// Layers: conv1 (1x1, bands -> C0, no bias), conv2 (3x3 stride 2, C0 -> C1, bias),
/// fc1 (C1 -> F1), fc2 (F1 -> F2), fc3 (F2 -> 4K), all fully connected layers with bias.
WeightStore make_estimator_weights(int bands, int iterations, std::uint64_t seed,
                                   const EstimatorConfig& cfg = {});

/// Same layout with every weight and bias set to zero.
WeightStore make_zero_estimator_weights(int bands, int iterations,
                                        const EstimatorConfig& cfg = {});

/// Band count and iteration count implied by a set of estimator weights.
struct EstimatorShape {
    int bands = 0;
    int iterations = 0;
};
EstimatorShape estimator_shape(const WeightStore& weights);

/// Global average of the strided-conv activations (the only thing fc1..fc3 see).
std::vector<double> estimator_features(const HsiCube& y, const WeightStore& weights);

/// Maps the observation to (alpha, beta, gamma, lambda) for K iterations.
///
/// conv1x1 -> ReLU -> strided conv3x3 (circular padding) -> ReLU -> global average pool
/// -> fc -> ReLU -> fc -> ReLU -> fc -> softplus + floor. The 4K outputs are read as
/// [alpha_1..alpha_K, beta_1..beta_K, gamma_1..gamma_K, lambda_1..lambda_K].
/// The identity degradation operator carries no information for denoising and is not an
/// input. Throws ShapeError on a band or K mismatch.
HyperParams estimate(const HsiCube& y, int iterations, const WeightStore& weights);

/// Head applied to pooled features, exposed so identical features can be shown to give
/// identical parameters.
HyperParams estimate_from_features(const std::vector<double>& pooled, int iterations,
                                   const WeightStore& weights);

double softplus(double x);

}  // namespace hsiu
