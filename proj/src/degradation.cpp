#include "hsiu/degradation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

#include "hsiu/errors.hpp"
#include "hsiu/rng.hpp"

namespace hsiu {

namespace {

void require_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
    }
}

bool has_impulse(SparseKind k) { return k == SparseKind::impulse || k == SparseKind::both; }
bool has_stripes(SparseKind k) { return k == SparseKind::stripes || k == SparseKind::both; }

}  // namespace

std::string to_string(SparseKind kind) {
    switch (kind) {
        case SparseKind::impulse: return "impulse";
        case SparseKind::stripes: return "stripes";
        case SparseKind::both: return "both";
    }
    return "impulse";
}

SparseKind parse_sparse_kind(const std::string& text) {
    if (text == "impulse") return SparseKind::impulse;
    if (text == "stripes") return SparseKind::stripes;
    if (text == "both") return SparseKind::both;
    throw DomainError("unknown sparse kind '" + text + "'");
}

void NoiseSpec::validate() const {
    if (!(gaussian_sigma >= 0.0) || !std::isfinite(gaussian_sigma)) {
        throw DomainError("gaussian_sigma must be finite and >= 0");
    }
    require_probability(sparse_fraction, "sparse_fraction");
    require_probability(stripe_fraction, "stripe_fraction");
    if (!(stripe_amplitude >= 0.0) || !std::isfinite(stripe_amplitude)) {
        throw DomainError("stripe_amplitude must be finite and >= 0");
    }
}

std::string to_key_value(const NoiseSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    out << "gaussian_sigma=" << spec.gaussian_sigma << '\n'
        << "sparse_fraction=" << spec.sparse_fraction << '\n'
        << "sparse_kind=" << to_string(spec.sparse_kind) << '\n'
        << "stripe_fraction=" << spec.stripe_fraction << '\n'
        << "stripe_amplitude=" << spec.stripe_amplitude << '\n'
        << "seed=" << spec.seed << '\n';
    return out.str();
}

NoiseSpec parse_key_value(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("noise spec: malformed line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto take = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw FormatError(std::string("noise spec: missing key ") + key);
        return it->second;
    };
    NoiseSpec spec;
    try {
        spec.gaussian_sigma = std::stod(take("gaussian_sigma"));
        spec.sparse_fraction = std::stod(take("sparse_fraction"));
        spec.sparse_kind = parse_sparse_kind(take("sparse_kind"));
        spec.stripe_fraction = std::stod(take("stripe_fraction"));
        spec.stripe_amplitude = std::stod(take("stripe_amplitude"));
        spec.seed = std::stoull(take("seed"));
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const DomainError*>(&e)) throw;
        throw FormatError(std::string("noise spec: bad number: ") + e.what());
    }
    spec.validate();
    return spec;
}

HsiCube add_gaussian(const HsiCube& clean, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw DomainError("add_gaussian: sigma must be finite and >= 0");
    }
    HsiCube out = clean;
    if (sigma == 0.0) return out;
    // Element i (band-sequential index) always uses Gaussian draw i.
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<float>(double(clean[i]) +
                                    sigma * rng::normal(seed, rng::kGaussianStream, i));
    }
    return out;
}

HsiCube add_impulse(const HsiCube& clean, double p, std::uint64_t seed) {
    require_probability(p, "add_impulse: p");
    HsiCube out = clean;
    if (p == 0.0) return out;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (rng::uniform(seed, rng::kImpulseStream, 2 * i) < p) {
            out[i] = rng::uniform(seed, rng::kImpulseStream, 2 * i + 1) < 0.5 ? 0.0f : 1.0f;
        }
    }
    return out;
}

HsiCube add_stripes(const HsiCube& clean, double stripe_fraction, double amplitude,
                    std::uint64_t seed) {
    require_probability(stripe_fraction, "add_stripes: stripe_fraction");
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
        throw DomainError("add_stripes: amplitude must be finite and >= 0");
    }
    HsiCube out = clean;
    const std::uint32_t width = clean.width();
    const auto striped = static_cast<std::uint32_t>(std::lround(stripe_fraction * width));
    if (striped == 0) return out;

    std::vector<std::uint32_t> columns(width);
    for (std::uint32_t b = 0; b < clean.bands(); ++b) {
        // Partial Fisher-Yates; draws for band b start at counter b * 2N.
        std::iota(columns.begin(), columns.end(), 0u);
        const std::uint64_t base = std::uint64_t(b) * 2 * width;
        for (std::uint32_t j = 0; j < striped; ++j) {
            const double u = rng::uniform(seed, rng::kStripeStream, base + j);
            const auto pick =
                std::min(width - 1, j + static_cast<std::uint32_t>(u * (width - j)));
            std::swap(columns[j], columns[pick]);
            const double offset =
                amplitude * (2.0 * rng::uniform(seed, rng::kStripeStream, base + width + j) - 1.0);
            const std::uint32_t col = columns[j];
            for (std::uint32_t r = 0; r < clean.height(); ++r) {
                float& v = out.at(r, col, b);
                v = static_cast<float>(double(v) + offset);
            }
        }
    }
    return out;
}

HsiCube apply_noise(const HsiCube& clean, const NoiseSpec& spec) {
    spec.validate();
    HsiCube out = add_gaussian(clean, spec.gaussian_sigma, spec.seed);
    if (has_impulse(spec.sparse_kind)) out = add_impulse(out, spec.sparse_fraction, spec.seed);
    if (has_stripes(spec.sparse_kind)) {
        out = add_stripes(out, spec.stripe_fraction, spec.stripe_amplitude, spec.seed);
    }
    return out;
}

NoiseSpec case_spec(int case_id, std::uint64_t seed) {
    static constexpr double kImpulse[] = {0.0, 0.05, 0.1, 0.15};
    if (case_id < 1 || case_id > 4) {
        throw DomainError("unknown noise case " + std::to_string(case_id) + " (expected 1..4)");
    }
    NoiseSpec spec;
    spec.gaussian_sigma = 0.2;
    spec.sparse_fraction = kImpulse[case_id - 1];
    spec.sparse_kind = SparseKind::impulse;
    spec.seed = seed;
    return spec;
}

std::pair<HsiCube, NoiseSpec> synthesize_case(const HsiCube& clean, int case_id,
                                              std::uint64_t seed) {
    NoiseSpec spec = case_spec(case_id, seed);
    return {apply_noise(clean, spec), spec};
}

}  // namespace hsiu
