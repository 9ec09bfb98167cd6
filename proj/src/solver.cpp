#include "hsiu/solver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "hsiu/errors.hpp"

namespace hsiu {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be finite and > 0, got " + std::to_string(v));
    }
}

void check_finite(const HsiCube& c, int iteration, const char* update) {
    if (!c.all_finite()) throw DivergenceError(iteration, update);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

HyperParams HyperParams::constant(std::size_t k, double alpha, double beta, double gamma,
                                  double lambda) {
    return {std::vector<double>(k, alpha), std::vector<double>(k, beta),
            std::vector<double>(k, gamma), std::vector<double>(k, lambda)};
}

void HyperParams::validate() const {
    const std::size_t k = alpha.size();
    if (k == 0) throw DomainError("hyperparameters: iteration count K must be >= 1");
    if (beta.size() != k || gamma.size() != k || lambda.size() != k) {
        throw DomainError("hyperparameters: alpha/beta/gamma/lambda lengths differ (" +
                          std::to_string(alpha.size()) + "/" + std::to_string(beta.size()) +
                          "/" + std::to_string(gamma.size()) + "/" +
                          std::to_string(lambda.size()) + ")");
    }
    for (std::size_t i = 0; i < k; ++i) {
        require_positive(alpha[i], "alpha");
        require_positive(beta[i], "beta");
        require_positive(gamma[i], "gamma");
        require_positive(lambda[i], "lambda");
    }
}

HsiCube update_x(const HsiCube& y, const HsiCube& n, const HsiCube& s, const HsiCube& z,
                 double mu) {
    require_positive(mu, "update_x: mu");
    require_conformable(y, n, "update_x");
    require_conformable(y, s, "update_x");
    require_conformable(y, z, "update_x");
    HsiCube out(y.shape());
    const double scale = 1.0 / (1.0 + mu);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double num = double(y[i]) - double(n[i]) - double(s[i]) + mu * double(z[i]);
        out[i] = static_cast<float>(num * scale);
    }
    return out;
}

double soft_threshold(double x, double delta) {
    if (x > delta) return x - delta;
    if (x < -delta) return x + delta;
    return 0.0;
}

HsiCube soft_threshold(const HsiCube& x, double delta) {
    require_positive(delta, "soft_threshold: delta");
    HsiCube out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = static_cast<float>(soft_threshold(double(x[i]), delta));
    }
    return out;
}

HsiCube update_s(const HsiCube& y, const HsiCube& x, const HsiCube& n, double lambda) {
    require_positive(lambda, "update_s: lambda");
    require_conformable(y, x, "update_s");
    require_conformable(y, n, "update_s");
    HsiCube out(y.shape());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = double(y[i]) - double(x[i]) - double(n[i]);
        out[i] = static_cast<float>(soft_threshold(r, lambda));
    }
    return out;
}

HsiCube update_n(const HsiCube& y, const HsiCube& x, const HsiCube& s, double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw DomainError("update_n: gamma must be finite and >= 0");
    }
    require_conformable(y, x, "update_n");
    require_conformable(y, s, "update_n");
    HsiCube out(y.shape());
    const double scale = 1.0 / (1.0 + 2.0 * gamma);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = double(y[i]) - double(x[i]) - double(s[i]);
        out[i] = static_cast<float>(r * scale);
    }
    return out;
}

HsiCube update_z(const HsiCube& x, double beta, const Denoiser& denoiser) {
    require_positive(beta, "update_z: beta");
    HsiCube z = denoiser.denoise(x, 1.0 / std::sqrt(beta));
    require_conformable(x, z, "update_z: denoiser output");
    return z;
}

double energy(const HsiCube& y, const HsiCube& x, const HsiCube& z, const HsiCube& s,
              const HsiCube& n, const EnergyWeights& w, const Prior& prior) {
    require_conformable(y, x, "energy");
    require_conformable(y, z, "energy");
    require_conformable(y, s, "energy");
    require_conformable(y, n, "energy");
    double fidelity = 0.0;
    double sparse = 0.0;
    double gauss = 0.0;
    double coupling = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = double(y[i]) - double(x[i]) - double(n[i]) - double(s[i]);
        fidelity += r * r;
        sparse += std::abs(double(s[i]));
        gauss += double(n[i]) * double(n[i]);
        const double d = double(z[i]) - double(x[i]);
        coupling += d * d;
    }
    const double phi = prior ? prior(z) : 0.0;
    return 0.5 * fidelity + w.tau * phi + w.lambda * sparse + w.gamma * gauss +
           0.5 * w.mu * coupling;
}

SolverResult run(const HsiCube& y, const HyperParams& params, const Denoiser& denoiser,
                 const SolverOptions& options) {
    params.validate();
    if (!y.all_finite()) throw DomainError("run: observation contains NaN/Inf");

    SolverState st;
    st.x = y;
    st.z = options.init == InitPolicy::from_observation ? y : HsiCube(y.shape());
    st.s = HsiCube(y.shape());
    st.n = HsiCube(y.shape());

    std::vector<EnergyRecord> trace;
    trace.reserve(params.iterations());
    for (std::size_t k = 0; k < params.iterations(); ++k) {
        const int it = static_cast<int>(k) + 1;
        const EnergyWeights w{params.alpha[k], params.alpha[k] / params.beta[k],
                              params.lambda[k], params.gamma[k]};
        auto energy_now = [&] { return energy(y, st.x, st.z, st.s, st.n, w, options.prior); };
        EnergyRecord rec;
        rec.iteration = it;

        auto t0 = std::chrono::steady_clock::now();
        st.x = update_x(y, st.n, st.s, st.z, params.alpha[k]);
        rec.seconds_x = seconds_since(t0);
        check_finite(st.x, it, "X");
        rec.after_x = energy_now();

        t0 = std::chrono::steady_clock::now();
        st.z = update_z(st.x, params.beta[k], denoiser);
        rec.seconds_z = seconds_since(t0);
        check_finite(st.z, it, "Z");
        rec.after_z = energy_now();

        t0 = std::chrono::steady_clock::now();
        st.s = update_s(y, st.x, st.n, params.lambda[k]);
        rec.seconds_s = seconds_since(t0);
        check_finite(st.s, it, "S");
        rec.after_s = energy_now();

        t0 = std::chrono::steady_clock::now();
        st.n = update_n(y, st.x, st.s, params.gamma[k]);
        rec.seconds_n = seconds_since(t0);
        check_finite(st.n, it, "N");
        rec.after_n = energy_now();

        st.k = it;
        trace.push_back(rec);
    }
    HsiCube x_hat = st.x;
    return {std::move(x_hat), std::move(st), std::move(trace)};
}

std::string trace_csv(const std::vector<EnergyRecord>& trace) {
    std::ostringstream out;
    out.precision(12);
    out << "iteration,energy,energy_after_x,energy_after_z,energy_after_s,energy_after_n,"
           "seconds_x,seconds_z,seconds_s,seconds_n\n";
    for (const auto& r : trace) {
        out << r.iteration << ',' << r.energy() << ',' << r.after_x << ',' << r.after_z << ','
            << r.after_s << ',' << r.after_n << ',' << r.seconds_x << ',' << r.seconds_z << ','
            << r.seconds_s << ',' << r.seconds_n << '\n';
    }
    return out.str();
}

}  // namespace hsiu
