#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsiu/denoiser.hpp"
#include "hsiu/ulnsa/kernels.hpp"
#include "hsiu/weights.hpp"

namespace hsiu::ulnsa {

/// Shape hyperparameters of the U-shaped network.
struct LnsaConfig {
    int window = 4;    ///< p, square window side
    int heads = 2;     ///< h, heads per attention branch
    int channels = 16; ///< C at the top level; doubles per level
    int levels = 2;    ///< U depth; levels - 1 downsampling steps
    int ffn_expansion = 2;

    int channels_at(int level) const noexcept { return channels << level; }
    int head_dim_at(int level) const noexcept { return channels_at(level) / (2 * heads); }

    /// Throws DomainError for nonpositive fields or C/2 not divisible by h, and ShapeError
    /// when height/width are not divisible by 2^(levels-1) * p.
    void validate(int height, int width) const;
};

/// How a parameter tensor is initialized.
enum class InitKind { uniform, ones, zeros };

struct ParamSpec {
    std::string name;
    std::vector<std::uint32_t> shape;
    std::uint32_t fan_in = 1;
    InitKind init = InitKind::uniform;
};

/// Parameters of one LNSA block at width C on an H x W map, names prefixed by `prefix`.
std::vector<ParamSpec> lnsa_block_params(const std::string& prefix, int channels, int height,
                                         int width, const LnsaConfig& cfg);

/// Full network for `bands`-band inputs of size height x width, names prefixed "ulnsa.".
std::vector<ParamSpec> ulnsa_params(const LnsaConfig& cfg, int bands, int height, int width);

/// Seeded fan-in uniform initialization (LayerNorm gains 1, shifts 0).
void add_params(WeightStore& store, const std::vector<ParamSpec>& specs, std::uint64_t seed);

WeightStore make_lnsa_block_weights(const std::string& prefix, int channels, int height,
                                    int width, const LnsaConfig& cfg, std::uint64_t seed);
WeightStore make_ulnsa_weights(const LnsaConfig& cfg, int bands, int height, int width,
                               std::uint64_t seed);

/// Zeroes the last projection of the attention and FFN sub-blocks of every LNSA block
/// under `prefix`, turning each block into the identity.
void zero_block_outputs(WeightStore& store, const std::string& prefix);

/// Names of the final residual conv of the network.
inline const std::string kHeadWeight = "ulnsa.head.weight";
inline const std::string kHeadBias = "ulnsa.head.bias";

// ---------------------------------------------------------------------------------------------

/// Local branch on the first half of the channels, shuffled non-local branch on the second
/// half, each returned at C/2 channels in the input layout.
template <class T>
std::pair<FeatureMap<T>, FeatureMap<T>> local_nonlocal_attention(
    const FeatureMap<T>& x, const WeightStore& w, const std::string& prefix, int head_dim,
    int window) {
    const int c = x.channels;
    const std::vector<std::uint32_t> square{std::uint32_t(c), std::uint32_t(c)};
    auto [q, k, v] = project_qkv(x, w.values(prefix + "attn.wq", square),
                                 w.values(prefix + "attn.wk", square),
                                 w.values(prefix + "attn.wv", square));
    auto [q1, q2] = split_half_channels(q);
    auto [k1, k2] = split_half_channels(k);
    auto [v1, v2] = split_half_channels(v);

    const auto local = windowed_attention(window_partition(q1, window), window_partition(k1, window),
                                          window_partition(v1, window),
                                          w.values(prefix + "attn.pos_local"), head_dim);
    const auto nonlocal = windowed_attention(
        shuffle_tokens(window_partition(q2, window)), shuffle_tokens(window_partition(k2, window)),
        shuffle_tokens(window_partition(v2, window)), w.values(prefix + "attn.pos_nonlocal"),
        head_dim);
    return {window_unpartition(local, x.height, x.width, window),
            window_unpartition(shuffle_tokens(nonlocal), x.height, x.width, window)};
}

/// LN -> conv1x1 -> {local/non-local, spectral} -> fusion, residual; LN -> FFN, residual.
template <class T>
FeatureMap<T> lnsa_block(const FeatureMap<T>& x, const WeightStore& w, const std::string& prefix,
                         const LnsaConfig& cfg) {
    const int c = x.channels;
    const auto uc = std::uint32_t(c);
    detail::require(c % (2 * cfg.heads) == 0, "lnsa_block: C/2 must be divisible by heads");
    const int head_dim = c / (2 * cfg.heads);
    const int hidden = c * cfg.ffn_expansion;
    const auto uh = std::uint32_t(hidden);

    auto h = layer_norm(x, w.values(prefix + "ln1.gamma", {uc}), w.values(prefix + "ln1.beta", {uc}));
    h = linear(h, w.values(prefix + "in_proj.weight", {uc, uc}), c,
               w.values(prefix + "in_proj.bias", {uc}));

    auto [a_local, a_nonlocal] = local_nonlocal_attention(h, w, prefix, head_dim, cfg.window);
    const auto fused = linear(concat_channels(a_local, a_nonlocal),
                              w.values(prefix + "fuse_ln.weight", {uc, uc}), c,
                              w.values(prefix + "fuse_ln.bias", {uc}));
    const auto spectral = spectral_attention(
        h, w.values(prefix + "spec.wq", {uc, uc}), w.values(prefix + "spec.wk", {uc, uc}),
        w.values(prefix + "spec.wv", {uc, uc}), w.values(prefix + "spec.proj", {uc, uc}), cfg.heads);
    const auto attn = linear(concat_channels(fused, spectral),
                             w.values(prefix + "fuse_out.weight", {2 * uc, uc}), c,
                             w.values(prefix + "fuse_out.bias", {uc}));
    const auto y = add(x, attn);

    auto f = layer_norm(y, w.values(prefix + "ln2.gamma", {uc}), w.values(prefix + "ln2.beta", {uc}));
    f = gelu(linear(f, w.values(prefix + "ffn.fc1.weight", {uc, uh}), hidden,
                    w.values(prefix + "ffn.fc1.bias", {uh})));
    f = gelu(depthwise_conv3x3(f, w.values(prefix + "ffn.dw.weight", {uh, 3, 3}),
                               w.values(prefix + "ffn.dw.bias", {uh})));
    f = linear(f, w.values(prefix + "ffn.fc2.weight", {uh, uc}), c,
               w.values(prefix + "ffn.fc2.bias", {uc}));
    return add(y, f);
}

/// Whole denoiser on token-major features: returns X + residual, same shape as `x`.
template <class T>
FeatureMap<T> ulnsa_features(const FeatureMap<T>& x, double beta, const WeightStore& w,
                             const LnsaConfig& cfg) {
    cfg.validate(x.height, x.width);
    const int bands = x.channels;
    const auto ub = std::uint32_t(bands);
    const auto c0 = std::uint32_t(cfg.channels);

    FeatureMap<T> beta_plane(x.height, x.width, 1);
    std::fill(beta_plane.data.begin(), beta_plane.data.end(), T(beta));
    auto feat = conv2d(concat_channels(x, beta_plane),
                       w.values("ulnsa.embed.weight", {c0, ub + 1, 3, 3}),
                       w.values("ulnsa.embed.bias", {c0}), cfg.channels, 3, 1, 1);

    std::vector<FeatureMap<T>> skips;
    for (int l = 0; l + 1 < cfg.levels; ++l) {
        const std::string lv = std::to_string(l);
        feat = lnsa_block(feat, w, "ulnsa.enc" + lv + ".", cfg);
        skips.push_back(feat);
        const auto ci = std::uint32_t(cfg.channels_at(l));
        const auto co = std::uint32_t(cfg.channels_at(l + 1));
        feat = conv2d(feat, w.values("ulnsa.down" + lv + ".weight", {co, ci, 4, 4}),
                      w.values("ulnsa.down" + lv + ".bias", {co}), int(co), 4, 2, 1);
    }
    feat = lnsa_block(feat, w, "ulnsa.bottleneck.", cfg);
    for (int l = cfg.levels - 2; l >= 0; --l) {
        const std::string lv = std::to_string(l);
        const auto ci = std::uint32_t(cfg.channels_at(l + 1));
        const auto co = std::uint32_t(cfg.channels_at(l));
        feat = deconv2x2(feat, w.values("ulnsa.up" + lv + ".weight", {ci, co, 2, 2}),
                         w.values("ulnsa.up" + lv + ".bias", {co}), int(co));
        feat = linear(concat_channels(feat, skips[l]),
                      w.values("ulnsa.merge" + lv + ".weight", {2 * co, co}), int(co),
                      w.values("ulnsa.merge" + lv + ".bias", {co}));
        feat = lnsa_block(feat, w, "ulnsa.dec" + lv + ".", cfg);
    }
    auto residual = conv2d(feat, w.values(kHeadWeight, {ub, c0, 3, 3}), w.values(kHeadBias, {ub}),
                           bands, 3, 1, 1);
    return add(std::move(residual), x);
}

/// Z = X + residual(concat(X, beta plane)). Output conformable with `x`.
HsiCube ulnsa_forward(const HsiCube& x, double beta, const WeightStore& weights,
                      const LnsaConfig& cfg);

/// The network behind the solver's denoiser interface, with beta = 1 / noise_level^2.
/// A zero noise level returns the input unchanged.
class UlnsaDenoiser final : public Denoiser {
public:
    UlnsaDenoiser(WeightStore weights, LnsaConfig cfg);

    HsiCube denoise(const HsiCube& input, double noise_level) const override;
    std::string name() const override { return "ulnsa"; }

    const WeightStore& weights() const noexcept { return weights_; }
    const LnsaConfig& config() const noexcept { return cfg_; }

private:
    WeightStore weights_;
    LnsaConfig cfg_;
};

}  // namespace hsiu::ulnsa
