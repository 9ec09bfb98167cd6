#include "hsiu/ulnsa/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hsiu/errors.hpp"
#include "hsiu/rng.hpp"
#include "hsiu/ulnsa/network.hpp"

namespace hsiu::ulnsa {

namespace {

constexpr double kStep = 1e-3;
constexpr double kFloor = 1e-6;
constexpr std::uint64_t kInputStream = 0x4752414443484bULL;

FeatureMap<double> random_input(int h, int w, int c, std::uint64_t seed) {
    FeatureMap<double> x(h, w, c);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        x.data[i] = 2.0 * rng::uniform(seed, kInputStream, i) - 1.0;
    }
    return x;
}

template <class T>
T sum_of(const FeatureMap<T>& y) {
    T acc(0.0);
    for (const T& v : y.data) acc += v;
    return acc;
}

// Runs the check for a generic forward `fn(FeatureMap<T>) -> FeatureMap<T>`.
template <class Fn>
GradCheckResult check(GradOp op, const FeatureMap<double>& x, Fn&& fn, std::uint64_t seed,
                      int max_coordinates) {
    auto& tape = ad::Tape::current();
    tape.clear();
    FeatureMap<ad::Var> xv(x.height, x.width, x.channels);
    for (std::size_t i = 0; i < x.data.size(); ++i) xv.data[i] = ad::Var::input(x.data[i]);
    const ad::Var out = sum_of(fn(xv));
    std::vector<double> analytic(x.data.size(), 0.0);
    if (out.id >= 0) {
        const auto adj = tape.backward(out.id);
        for (std::size_t i = 0; i < x.data.size(); ++i) analytic[i] = adj[xv.data[i].id];
    }
    tape.clear();

    std::vector<std::size_t> coords(x.data.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (coords.size() > std::size_t(max_coordinates)) {
        for (std::size_t j = 0; j < std::size_t(max_coordinates); ++j) {
            const auto pick = j + std::size_t(rng::uniform(seed, kInputStream + 1, j) *
                                              double(coords.size() - j));
            std::swap(coords[j], coords[std::min(pick, coords.size() - 1)]);
        }
        coords.resize(max_coordinates);
    }

    GradCheckResult res;
    res.op = op;
    res.threshold = gradcheck_threshold(op);
    FeatureMap<double> probe = x;
    for (std::size_t i : coords) {
        probe.data[i] = x.data[i] + kStep;
        const double up = sum_of(fn(probe));
        probe.data[i] = x.data[i] - kStep;
        const double down = sum_of(fn(probe));
        probe.data[i] = x.data[i];
        const double fd = (up - down) / (2.0 * kStep);
        const double a = analytic[i];
        const double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), kFloor});
        res.max_relative_error = std::max(res.max_relative_error, rel);
    }
    res.coordinates = static_cast<int>(coords.size());
    res.passed = res.max_relative_error < res.threshold;
    return res;
}

}  // namespace

GradOp parse_grad_op(const std::string& name) {
    if (name == "proj") return GradOp::projection;
    if (name == "local-attn") return GradOp::local_attention;
    if (name == "nonlocal-attn") return GradOp::nonlocal_attention;
    if (name == "spectral-attn") return GradOp::spectral_attention;
    if (name == "lnsa") return GradOp::lnsa_block;
    if (name == "ulnsa") return GradOp::ulnsa;
    throw DomainError("unsupported gradcheck op '" + name + "'");
}

std::string to_string(GradOp op) {
    switch (op) {
        case GradOp::projection: return "proj";
        case GradOp::local_attention: return "local-attn";
        case GradOp::nonlocal_attention: return "nonlocal-attn";
        case GradOp::spectral_attention: return "spectral-attn";
        case GradOp::lnsa_block: return "lnsa";
        case GradOp::ulnsa: return "ulnsa";
    }
    return "?";
}

double gradcheck_threshold(GradOp op) {
    switch (op) {
        case GradOp::projection: return 1e-8;
        case GradOp::local_attention:
        case GradOp::nonlocal_attention:
        case GradOp::spectral_attention: return 1e-4;
        case GradOp::lnsa_block:
        case GradOp::ulnsa: return 1e-3;
    }
    return 0.0;
}

GradCheckResult gradient_check(GradOp op, std::uint64_t seed, int max_coordinates) {
    switch (op) {
        case GradOp::projection: {
            WeightStore w;
            w.add_uniform("wq", {8, 8}, 8, seed);
            const auto x = random_input(4, 4, 8, seed);
            return check(op, x, [&](const auto& in) { return linear(in, w.values("wq"), 8); },
                         seed, max_coordinates);
        }
        case GradOp::local_attention:
        case GradOp::nonlocal_attention: {
            // 2 x 4 map with p = 2: two windows of four tokens, 2 heads of width 2 per branch.
            LnsaConfig cfg;
            cfg.window = 2;
            cfg.heads = 2;
            const auto w = make_lnsa_block_weights("", 8, 2, 4, cfg, seed);
            const auto x = random_input(2, 4, 8, seed);
            const bool local = op == GradOp::local_attention;
            return check(
                op, x,
                [&](const auto& in) {
                    auto branches = local_nonlocal_attention(in, w, "", 2, cfg.window);
                    return local ? branches.first : branches.second;
                },
                seed, max_coordinates);
        }
        case GradOp::spectral_attention: {
            const auto w = make_lnsa_block_weights("", 8, 4, 4, LnsaConfig{}, seed);
            const auto x = random_input(4, 4, 8, seed);
            return check(
                op, x,
                [&](const auto& in) {
                    return spectral_attention(in, w.values("spec.wq"), w.values("spec.wk"),
                                              w.values("spec.wv"), w.values("spec.proj"), 2);
                },
                seed, max_coordinates);
        }
        case GradOp::lnsa_block: {
            const LnsaConfig cfg;
            const auto w = make_lnsa_block_weights("blk.", cfg.channels, 16, 16, cfg, seed);
            const auto x = random_input(16, 16, cfg.channels, seed);
            return check(op, x, [&](const auto& in) { return lnsa_block(in, w, "blk.", cfg); },
                         seed, max_coordinates);
        }
        case GradOp::ulnsa: {
            const LnsaConfig cfg;
            const auto w = make_ulnsa_weights(cfg, 4, 16, 16, seed);
            FeatureMap<double> x = random_input(16, 16, 4, seed);
            for (double& v : x.data) v = 0.5 + 0.5 * v;
            return check(op, x, [&](const auto& in) { return ulnsa_features(in, 25.0, w, cfg); },
                         seed, max_coordinates);
        }
    }
    throw DomainError("unsupported gradcheck op");
}

}  // namespace hsiu::ulnsa
