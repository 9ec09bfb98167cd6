#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hsiu/cube.hpp"
#include "hsiu/denoiser.hpp"

namespace hsiu {

/// Per-iteration parameters of the unfolded scheme.
///
/// alpha[k] is the penalty mu of iteration k, beta[k] = mu / tau drives the denoiser
/// (noise level 1 / sqrt(beta)), gamma[k] weights ||N||_F^2 and lambda[k] is the
/// soft-threshold level of the sparse term. tau itself is recovered as alpha / beta.
struct HyperParams {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> gamma;
    std::vector<double> lambda;

    std::size_t iterations() const noexcept { return alpha.size(); }

    /// Same values for all K iterations.
    static HyperParams constant(std::size_t k, double alpha, double beta, double gamma,
                                double lambda);

    /// Throws DomainError unless K >= 1, all lists have length K and every entry is
    /// finite and strictly positive.
    void validate() const;
};

struct SolverState {
    HsiCube x;  ///< signal estimate
    HsiCube z;  ///< auxiliary (denoised) variable
    HsiCube s;  ///< sparse noise estimate
    HsiCube n;  ///< Gaussian noise estimate
    int k = 0;  ///< completed iterations
};

enum class InitPolicy {
    from_observation,  ///< Z = Y, S = N = 0
    zeros,             ///< Z = S = N = 0
};

/// X = (Y - N - S + mu Z) / (1 + mu).
HsiCube update_x(const HsiCube& y, const HsiCube& n, const HsiCube& s, const HsiCube& z,
                 double mu);

/// Element-wise shrinkage toward zero by delta > 0.
HsiCube soft_threshold(const HsiCube& x, double delta);
double soft_threshold(double x, double delta);

/// S = soft_threshold(Y - X - N, lambda).
HsiCube update_s(const HsiCube& y, const HsiCube& x, const HsiCube& n, double lambda);

/// N = (Y - X - S) / (1 + 2 gamma), gamma >= 0.
HsiCube update_n(const HsiCube& y, const HsiCube& x, const HsiCube& s, double gamma);

/// Z = denoiser(X, 1 / sqrt(beta)).
HsiCube update_z(const HsiCube& x, double beta, const Denoiser& denoiser);

/// Image prior phi(Z); the solver never needs it, only energy evaluation does.
using Prior = std::function<double(const HsiCube&)>;

struct EnergyWeights {
    double mu = 1.0;
    double tau = 1.0;
    double lambda = 1.0;
    double gamma = 1.0;
};

/// 0.5||Y-X-N-S||^2 + tau phi(Z) + lambda ||S||_1 + gamma ||N||^2 + mu/2 ||Z-X||^2,
/// accumulated in double. A null prior counts as phi = 0.
double energy(const HsiCube& y, const HsiCube& x, const HsiCube& z, const HsiCube& s,
              const HsiCube& n, const EnergyWeights& w, const Prior& prior = {});

/// Energy and wall time after each of the four sub-updates of one iteration.
struct EnergyRecord {
    int iteration = 0;
    double after_x = 0.0;
    double after_z = 0.0;
    double after_s = 0.0;
    double after_n = 0.0;
    double seconds_x = 0.0;
    double seconds_z = 0.0;
    double seconds_s = 0.0;
    double seconds_n = 0.0;

    double energy() const noexcept { return after_n; }
};

struct SolverResult {
    HsiCube x_hat;
    SolverState state;
    std::vector<EnergyRecord> trace;
};

struct SolverOptions {
    InitPolicy init = InitPolicy::from_observation;
    /// Prior used for the energy trace; leave empty to count phi as zero.
    Prior prior;
};

/// K iterations of X -> Z -> S -> N. Throws DivergenceError on any non-finite iterate.
SolverResult run(const HsiCube& y, const HyperParams& params, const Denoiser& denoiser,
                 const SolverOptions& options = {});

/// Header line and rows for the per-iteration CSV trace.
std::string trace_csv(const std::vector<EnergyRecord>& trace);

}  // namespace hsiu
