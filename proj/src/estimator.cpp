#include "hsiu/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsiu/errors.hpp"

namespace hsiu {

namespace {

const std::string kConv1 = "estimator.conv1.weight";
const std::string kConv2 = "estimator.conv2.weight";
const std::string kConv2Bias = "estimator.conv2.bias";
const std::string kFc[3] = {"estimator.fc1", "estimator.fc2", "estimator.fc3"};

double relu(double x) { return x > 0.0 ? x : 0.0; }

int wrap(int i, int n) { return ((i % n) + n) % n; }

// out = in W + b with W stored [n_in][n_out].
std::vector<double> dense(const std::vector<double>& in, const WeightTensor& w,
                          const WeightTensor& b) {
    const std::size_t n_in = w.shape[0];
    const std::size_t n_out = w.shape[1];
    std::vector<double> out(n_out);
    for (std::size_t j = 0; j < n_out; ++j) {
        double acc = b.data[j];
        for (std::size_t i = 0; i < n_in; ++i) acc += in[i] * double(w.data[i * n_out + j]);
        out[j] = acc;
    }
    return out;
}

void build(WeightStore& store, int bands, int iterations, const EstimatorConfig& cfg,
           std::uint64_t seed, bool zero) {
    if (bands <= 0 || iterations <= 0) {
        throw DomainError("estimator: bands and iterations must be positive");
    }
    if (cfg.conv_channels <= 0 || cfg.strided_channels <= 0 || cfg.hidden1 <= 0 ||
        cfg.hidden2 <= 0) {
        throw DomainError("estimator: layer widths must be positive");
    }
    auto add = [&](const std::string& name, std::vector<std::uint32_t> shape,
                   std::uint32_t fan_in) {
        if (zero) {
            store.add_constant(name, std::move(shape), 0.0f);
        } else {
            store.add_uniform(name, std::move(shape), fan_in, seed);
        }
    };
    const auto p = std::uint32_t(bands);
    const auto c0 = std::uint32_t(cfg.conv_channels);
    const auto c1 = std::uint32_t(cfg.strided_channels);
    const std::uint32_t widths[4] = {c1, std::uint32_t(cfg.hidden1), std::uint32_t(cfg.hidden2),
                                     std::uint32_t(4 * iterations)};
    add(kConv1, {p, c0}, p);
    add(kConv2, {c1, c0, 3, 3}, c0 * 9);
    add(kConv2Bias, {c1}, c0 * 9);
    for (int l = 0; l < 3; ++l) {
        add(kFc[l] + ".weight", {widths[l], widths[l + 1]}, widths[l]);
        add(kFc[l] + ".bias", {widths[l + 1]}, widths[l]);
    }
}

void check_layout(const WeightStore& w) {
    const auto& c1 = w.get(kConv1);
    const auto& c2 = w.get(kConv2);
    const auto& b2 = w.get(kConv2Bias);
    if (c1.shape.size() != 2 || c2.shape.size() != 4 || c2.shape[1] != c1.shape[1] ||
        c2.shape[2] != 3 || c2.shape[3] != 3 ||
        b2.shape != std::vector<std::uint32_t>{c2.shape[0]}) {
        throw ShapeError("estimator: inconsistent conv layer shapes");
    }
    std::uint32_t width = c2.shape[0];
    for (const auto& fc : kFc) {
        const auto& fw = w.get(fc + ".weight");
        const auto& fb = w.get(fc + ".bias");
        if (fw.shape.size() != 2 || fw.shape[0] != width ||
            fb.shape != std::vector<std::uint32_t>{fw.shape[1]}) {
            throw ShapeError("estimator: inconsistent shapes in " + fc);
        }
        width = fw.shape[1];
    }
    if (width == 0 || width % 4 != 0) {
        throw ShapeError("estimator: output width " + std::to_string(width) +
                         " is not a positive multiple of 4");
    }
}

}  // namespace

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

WeightStore make_estimator_weights(int bands, int iterations, std::uint64_t seed,
                                   const EstimatorConfig& cfg) {
    WeightStore store;
    build(store, bands, iterations, cfg, seed, false);
    return store;
}

WeightStore make_zero_estimator_weights(int bands, int iterations, const EstimatorConfig& cfg) {
    WeightStore store;
    build(store, bands, iterations, cfg, 0, true);
    return store;
}

EstimatorShape estimator_shape(const WeightStore& weights) {
    check_layout(weights);
    return {int(weights.get(kConv1).shape[0]), int(weights.get(kFc[2] + ".weight").shape[1] / 4)};
}

std::vector<double> estimator_features(const HsiCube& y, const WeightStore& weights) {
    const auto shape = estimator_shape(weights);
    if (int(y.bands()) != shape.bands) {
        throw ShapeError("estimator: weights expect " + std::to_string(shape.bands) +
                         " bands, observation has " + std::to_string(y.bands()));
    }
    const auto& w1 = weights.get(kConv1);
    const auto& w2 = weights.get(kConv2);
    const auto& b2 = weights.get(kConv2Bias);
    const int h = int(y.height());
    const int w = int(y.width());
    const int p = shape.bands;
    const int c0 = int(w1.shape[1]);
    const int c1 = int(w2.shape[0]);

    // conv1x1 + ReLU, token-major.
    std::vector<double> f0(std::size_t(h) * w * c0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            for (int o = 0; o < c0; ++o) {
                double acc = 0.0;
                for (int b = 0; b < p; ++b) {
                    acc += double(y.at(r, c, b)) * double(w1.data[std::size_t(b) * c0 + o]);
                }
                f0[(std::size_t(r) * w + c) * c0 + o] = relu(acc);
            }
        }
    }

    // Strided conv3x3 with circular padding + ReLU, pooled on the fly. Output pixel (i, j)
    // is centred on input (2i, 2j), so a circular shift by the stride permutes the outputs.
    const int out_h = (h + 1) / 2;
    const int out_w = (w + 1) / 2;
    std::vector<double> pooled(c1, 0.0);
    for (int i = 0; i < out_h; ++i) {
        for (int j = 0; j < out_w; ++j) {
            for (int o = 0; o < c1; ++o) {
                double acc = b2.data[o];
                for (int kr = 0; kr < 3; ++kr) {
                    const int ir = wrap(2 * i + kr - 1, h);
                    for (int kc = 0; kc < 3; ++kc) {
                        const int ic = wrap(2 * j + kc - 1, w);
                        const double* in = &f0[(std::size_t(ir) * w + ic) * c0];
                        for (int c = 0; c < c0; ++c) {
                            acc += in[c] * double(w2.data[((std::size_t(o) * c0 + c) * 3 + kr) * 3 + kc]);
                        }
                    }
                }
                pooled[o] += relu(acc);
            }
        }
    }
    for (double& v : pooled) v /= double(out_h) * out_w;
    return pooled;
}

HyperParams estimate_from_features(const std::vector<double>& pooled, int iterations,
                                   const WeightStore& weights) {
    const auto shape = estimator_shape(weights);
    if (iterations != shape.iterations) {
        throw ShapeError("estimator: weights produce K = " + std::to_string(shape.iterations) +
                         ", requested K = " + std::to_string(iterations));
    }
    if (pooled.size() != weights.get(kFc[0] + ".weight").shape[0]) {
        throw ShapeError("estimator: pooled feature width mismatch");
    }
    std::vector<double> a = pooled;
    for (int l = 0; l < 3; ++l) {
        a = dense(a, weights.get(kFc[l] + ".weight"), weights.get(kFc[l] + ".bias"));
        if (l < 2) std::transform(a.begin(), a.end(), a.begin(), relu);
    }
    const std::size_t k = std::size_t(iterations);
    HyperParams hp;
    for (std::size_t i = 0; i < 4 * k; ++i) {
        const double v = softplus(a[i]) + kEstimatorFloor;
        switch (i / k) {
            case 0: hp.alpha.push_back(v); break;
            case 1: hp.beta.push_back(v); break;
            case 2: hp.gamma.push_back(v); break;
            default: hp.lambda.push_back(v); break;
        }
    }
    hp.validate();
    return hp;
}

HyperParams estimate(const HsiCube& y, int iterations, const WeightStore& weights) {
    return estimate_from_features(estimator_features(y, weights), iterations, weights);
}

}  // namespace hsiu
