#include "hsiu/ulnsa/network.hpp"

#include <cmath>

#include "hsiu/errors.hpp"

namespace hsiu::ulnsa {

void LnsaConfig::validate(int height, int width) const {
    if (window <= 0 || heads <= 0 || channels <= 0 || levels <= 0 || ffn_expansion <= 0) {
        throw DomainError("LNSA config fields must be positive");
    }
    if (channels % (2 * heads) != 0) {
        throw DomainError("LNSA config: C/2 = " + std::to_string(channels / 2.0) +
                          " is not divisible by " + std::to_string(heads) + " heads");
    }
    const long tile = long(window) << (levels - 1);
    if (height <= 0 || width <= 0 || height % tile != 0 || width % tile != 0) {
        throw ShapeError("LNSA config: " + std::to_string(height) + "x" + std::to_string(width) +
                         " is not divisible by 2^(levels-1)*p = " + std::to_string(tile));
    }
}

std::vector<ParamSpec> lnsa_block_params(const std::string& prefix, int channels, int height,
                                         int width, const LnsaConfig& cfg) {
    const auto c = std::uint32_t(channels);
    const auto hid = std::uint32_t(channels * cfg.ffn_expansion);
    const auto heads = std::uint32_t(cfg.heads);
    const auto local = std::uint32_t(cfg.window * cfg.window);
    const auto windows = std::uint32_t((height / cfg.window) * (width / cfg.window));
    return {
        {prefix + "ln1.gamma", {c}, 1, InitKind::ones},
        {prefix + "ln1.beta", {c}, 1, InitKind::zeros},
        {prefix + "in_proj.weight", {c, c}, c},
        {prefix + "in_proj.bias", {c}, c},
        {prefix + "attn.wq", {c, c}, c},
        {prefix + "attn.wk", {c, c}, c},
        {prefix + "attn.wv", {c, c}, c},
        {prefix + "attn.pos_local", {heads, local, local}, local},
        {prefix + "attn.pos_nonlocal", {heads, windows, windows}, windows},
        {prefix + "fuse_ln.weight", {c, c}, c},
        {prefix + "fuse_ln.bias", {c}, c},
        {prefix + "spec.wq", {c, c}, c},
        {prefix + "spec.wk", {c, c}, c},
        {prefix + "spec.wv", {c, c}, c},
        {prefix + "spec.proj", {c, c}, c},
        {prefix + "fuse_out.weight", {2 * c, c}, 2 * c},
        {prefix + "fuse_out.bias", {c}, 2 * c},
        {prefix + "ln2.gamma", {c}, 1, InitKind::ones},
        {prefix + "ln2.beta", {c}, 1, InitKind::zeros},
        {prefix + "ffn.fc1.weight", {c, hid}, c},
        {prefix + "ffn.fc1.bias", {hid}, c},
        {prefix + "ffn.dw.weight", {hid, 3, 3}, 9},
        {prefix + "ffn.dw.bias", {hid}, 9},
        {prefix + "ffn.fc2.weight", {hid, c}, hid},
        {prefix + "ffn.fc2.bias", {c}, hid},
    };
}

std::vector<ParamSpec> ulnsa_params(const LnsaConfig& cfg, int bands, int height, int width) {
    cfg.validate(height, width);
    if (bands <= 0) throw DomainError("ulnsa: band count must be positive");
    const auto ub = std::uint32_t(bands);
    const auto c0 = std::uint32_t(cfg.channels);
    std::vector<ParamSpec> specs{
        {"ulnsa.embed.weight", {c0, ub + 1, 3, 3}, (ub + 1) * 9},
        {"ulnsa.embed.bias", {c0}, (ub + 1) * 9},
    };
    auto append = [&specs](std::vector<ParamSpec> more) {
        specs.insert(specs.end(), std::make_move_iterator(more.begin()),
                     std::make_move_iterator(more.end()));
    };
    for (int l = 0; l + 1 < cfg.levels; ++l) {
        const std::string lv = std::to_string(l);
        const auto ci = std::uint32_t(cfg.channels_at(l));
        const auto co = std::uint32_t(cfg.channels_at(l + 1));
        append(lnsa_block_params("ulnsa.enc" + lv + ".", int(ci), height >> l, width >> l, cfg));
        specs.push_back({"ulnsa.down" + lv + ".weight", {co, ci, 4, 4}, ci * 16});
        specs.push_back({"ulnsa.down" + lv + ".bias", {co}, ci * 16});
    }
    const int deep = cfg.levels - 1;
    append(lnsa_block_params("ulnsa.bottleneck.", cfg.channels_at(deep), height >> deep,
                             width >> deep, cfg));
    for (int l = cfg.levels - 2; l >= 0; --l) {
        const std::string lv = std::to_string(l);
        const auto ci = std::uint32_t(cfg.channels_at(l + 1));
        const auto co = std::uint32_t(cfg.channels_at(l));
        specs.push_back({"ulnsa.up" + lv + ".weight", {ci, co, 2, 2}, ci * 4});
        specs.push_back({"ulnsa.up" + lv + ".bias", {co}, ci * 4});
        specs.push_back({"ulnsa.merge" + lv + ".weight", {2 * co, co}, 2 * co});
        specs.push_back({"ulnsa.merge" + lv + ".bias", {co}, 2 * co});
        append(lnsa_block_params("ulnsa.dec" + lv + ".", int(co), height >> l, width >> l, cfg));
    }
    specs.push_back({kHeadWeight, {ub, c0, 3, 3}, c0 * 9});
    specs.push_back({kHeadBias, {ub}, c0 * 9});
    return specs;
}

void add_params(WeightStore& store, const std::vector<ParamSpec>& specs, std::uint64_t seed) {
    for (const auto& s : specs) {
        switch (s.init) {
            case InitKind::uniform: store.add_uniform(s.name, s.shape, s.fan_in, seed); break;
            case InitKind::ones: store.add_constant(s.name, s.shape, 1.0f); break;
            case InitKind::zeros: store.add_constant(s.name, s.shape, 0.0f); break;
        }
    }
}

WeightStore make_lnsa_block_weights(const std::string& prefix, int channels, int height,
                                    int width, const LnsaConfig& cfg, std::uint64_t seed) {
    WeightStore store;
    add_params(store, lnsa_block_params(prefix, channels, height, width, cfg), seed);
    return store;
}

WeightStore make_ulnsa_weights(const LnsaConfig& cfg, int bands, int height, int width,
                               std::uint64_t seed) {
    WeightStore store;
    add_params(store, ulnsa_params(cfg, bands, height, width), seed);
    return store;
}

void zero_block_outputs(WeightStore& store, const std::string& prefix) {
    for (const auto& name : store.names()) {
        if (name.compare(0, prefix.size(), prefix) != 0) continue;
        const bool last = name.ends_with("fuse_out.weight") || name.ends_with("fuse_out.bias") ||
                          name.ends_with("ffn.fc2.weight") || name.ends_with("ffn.fc2.bias");
        if (last) {
            auto& t = store.get_mutable(name);
            std::fill(t.data.begin(), t.data.end(), 0.0f);
        }
    }
}

HsiCube ulnsa_forward(const HsiCube& x, double beta, const WeightStore& weights,
                      const LnsaConfig& cfg) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("ulnsa: beta must be positive");
    const auto z = ulnsa_features(to_features(x), beta, weights, cfg);
    return to_cube(z);
}

UlnsaDenoiser::UlnsaDenoiser(WeightStore weights, LnsaConfig cfg)
    : weights_(std::move(weights)), cfg_(cfg) {}

HsiCube UlnsaDenoiser::denoise(const HsiCube& input, double noise_level) const {
    if (!(noise_level >= 0.0) || !std::isfinite(noise_level)) {
        throw DomainError("ulnsa denoiser: noise level must be finite and >= 0");
    }
    if (noise_level == 0.0) return input;
    HsiCube out = ulnsa_forward(input, 1.0 / (noise_level * noise_level), weights_, cfg_);
    if (!out.all_finite()) throw DomainError("ulnsa denoiser produced non-finite output");
    return out;
}

}  // namespace hsiu::ulnsa
