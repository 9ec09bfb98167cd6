#include <doctest.h>

#include <cmath>
#include <random>

#include "hsiu/errors.hpp"
#include "hsiu/solver.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace hsiu;
using hsiu::testing::constant_cube;
using hsiu::testing::random_cube;

namespace {

HsiCube scalar(float v) { return constant_cube(1, 1, 1, v); }

class RecordingDenoiser final : public Denoiser {
public:
    mutable double last = -1.0;
    HsiCube denoise(const HsiCube& input, double noise_level) const override {
        last = noise_level;
        return input;
    }
    std::string name() const override { return "recording"; }
};

class PoisonDenoiser final : public Denoiser {
public:
    HsiCube denoise(const HsiCube& input, double) const override {
        HsiCube out = input;
        out[0] = std::numeric_limits<float>::quiet_NaN();
        return out;
    }
    std::string name() const override { return "poison"; }
};

}  // namespace

TEST_CASE("update_x") {
    CHECK(update_x(scalar(1.0f), scalar(0.2f), scalar(0.3f), scalar(0.0f), 1.0)[0] ==
          doctest::Approx(0.25).epsilon(1e-7));

    const HsiCube z = random_cube(4, 4, 3, 1);
    const HsiCube n = random_cube(4, 4, 3, 2);
    const HsiCube s = random_cube(4, 4, 3, 3);
    HsiCube y = axpy_combine(1.0, z, 1.0, axpy_combine(1.0, n, 1.0, s));
    for (double mu : {0.1, 1.0, 7.0}) {
        CHECK(max_abs_diff(update_x(y, n, s, z, mu), z) < 1e-6);
    }
    const HsiCube y2 = random_cube(4, 4, 3, 4);
    CHECK(max_abs_diff(update_x(y2, n, s, z, 1e12), z) < 1e-6);

    CHECK_THROWS_AS(update_x(y, n, s, z, 0.0), DomainError);
    CHECK_THROWS_AS(update_x(y, n, s, random_cube(4, 4, 2, 5), 1.0), ShapeError);
}

TEST_CASE("soft_threshold") {
    CHECK(soft_threshold(2.0, 1.0) == 1.0);
    CHECK(soft_threshold(0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-2.0, 1.0) == -1.0);
    CHECK(soft_threshold(-0.5, 1.0) == 0.0);
    CHECK(soft_threshold(1.0, 1.0) == 0.0);
    CHECK_THROWS_AS(soft_threshold(scalar(1.0f), 0.0), DomainError);
    CHECK_THROWS_AS(soft_threshold(scalar(1.0f), -1.0), DomainError);
}

TEST_CASE("update_s and update_n examples") {
    const HsiCube x = random_cube(3, 3, 2, 6);
    const HsiCube n = random_cube(3, 3, 2, 7);
    const HsiCube y = axpy_combine(1.0, x, 1.0, n);
    CHECK(count_nonzero(update_s(y, x, n, 0.01)) == 0);

    CHECK(update_s(scalar(0.3f), scalar(0.0f), scalar(0.0f), 0.1)[0] ==
          doctest::Approx(0.2).epsilon(1e-6));

    const HsiCube yy = random_cube(3, 3, 2, 8);
    const HsiCube s = random_cube(3, 3, 2, 9);
    const HsiCube r = axpy_combine(1.0, axpy_combine(1.0, yy, -1.0, x), -1.0, s);
    const HsiCube n0 = update_n(yy, x, s, 0.0);
    const HsiCube n_half = update_n(yy, x, s, 0.5);
    for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(n0[i] == float(double(yy[i]) - double(x[i]) - double(s[i])));
        CHECK(n_half[i] == doctest::Approx(0.5 * r[i]).epsilon(1e-6));
    }
    CHECK_THROWS_AS(update_n(yy, x, s, -0.1), DomainError);
    CHECK_THROWS_AS(update_s(yy, x, s, 0.0), DomainError);
}

TEST_CASE("prox updates match grid-search minimizers") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> par(0.05, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double y = val(gen), x = val(gen), other = val(gen);
        const double lambda = par(gen), gamma = par(gen);

        const double s = update_s(scalar(float(y)), scalar(float(x)), scalar(float(other)), lambda)[0];
        const double s_ref = oracle::grid_argmin(
            [&](double t) { return oracle::s_objective(t, float(y), float(x), float(other), lambda); },
            -3.0, 3.0, 1e-4);
        CHECK(std::abs(s - s_ref) < 2e-4);

        const double n = update_n(scalar(float(y)), scalar(float(x)), scalar(float(other)), gamma)[0];
        const double n_ref = oracle::grid_argmin(
            [&](double t) { return oracle::n_objective(t, float(y), float(x), float(other), gamma); },
            -3.0, 3.0, 1e-4);
        CHECK(std::abs(n - n_ref) < 2e-4);
    }
}

TEST_CASE("closed-form updates are first-order optimal") {
    constexpr double eps = 1e-3;
    for (std::uint64_t inst = 0; inst < 100; ++inst) {
        const HsiCube y = random_cube(3, 3, 2, 100 + inst, -1.0f, 1.0f);
        const HsiCube a = random_cube(3, 3, 2, 300 + inst, -1.0f, 1.0f);
        const HsiCube b = random_cube(3, 3, 2, 500 + inst, -1.0f, 1.0f);
        const HsiCube z = random_cube(3, 3, 2, 700 + inst, -1.0f, 1.0f);
        const double mu = 0.1 + 0.05 * double(inst);
        const double lambda = 0.05 + 0.004 * double(inst);
        const double gamma = 0.02 + 0.01 * double(inst);

        const HsiCube xs = update_x(y, a, b, z, mu);
        const HsiCube ss = update_s(y, a, b, lambda);
        const HsiCube ns = update_n(y, a, b, gamma);
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double fx = oracle::x_objective(xs[i], y[i], a[i], b[i], z[i], mu);
            const double fs = oracle::s_objective(ss[i], y[i], a[i], b[i], lambda);
            const double fn = oracle::n_objective(ns[i], y[i], a[i], b[i], gamma);
            for (double d : {-eps, eps}) {
                CHECK(oracle::x_objective(xs[i] + d, y[i], a[i], b[i], z[i], mu) >= fx);
                CHECK(oracle::s_objective(ss[i] + d, y[i], a[i], b[i], lambda) >= fs);
                CHECK(oracle::n_objective(ns[i] + d, y[i], a[i], b[i], gamma) >= fn);
            }
        }
    }
}

TEST_CASE("update_z") {
    const HsiCube x = random_cube(4, 4, 2, 10);
    RecordingDenoiser rec;
    CHECK(update_z(x, 4.0, rec) == x);
    CHECK(rec.last == 0.5);
    CHECK(update_z(x, 4.0, IdentityDenoiser{}) == x);

    const HsiCube z = update_z(x, 3.0, QuadraticProxDenoiser{});
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(z[i] == doctest::Approx(double(x[i]) * 3.0 / 4.0).epsilon(1e-6));
    }
    CHECK_THROWS_AS(update_z(x, 0.0, rec), DomainError);
}

TEST_CASE("denoisers are the identity at zero noise") {
    const HsiCube x = random_cube(9, 7, 3, 11);
    CHECK(IdentityDenoiser{}.denoise(x, 0.0) == x);
    CHECK(QuadraticProxDenoiser{}.denoise(x, 0.0) == x);
    CHECK(GaussianSmoothingDenoiser{}.denoise(x, 0.0) == x);
    CHECK_THROWS_AS(GaussianSmoothingDenoiser{}.denoise(x, -1.0), DomainError);
    CHECK_THROWS_AS(GaussianSmoothingDenoiser{0.0}, DomainError);
}

TEST_CASE("gaussian smoothing denoiser") {
    const GaussianSmoothingDenoiser g(5.0);
    const HsiCube flat = constant_cube(12, 10, 2, 0.4f);
    CHECK(max_abs_diff(g.denoise(flat, 0.2), flat) < 1e-6);

    const HsiCube x = random_cube(16, 16, 2, 12);
    const HsiCube y = g.denoise(x, 0.2);
    CHECK(y.shape() == x.shape());
    CHECK(squared_norm(y) < squared_norm(x));
    // Blurring acts per band: band 1 alone gives the same result.
    HsiCube b1(16, 16, 1);
    std::copy(x.band(1).begin(), x.band(1).end(), b1.band(0).begin());
    const HsiCube y1 = g.denoise(b1, 0.2);
    for (std::size_t i = 0; i < 256; ++i) CHECK(y1[i] == y.band(1)[i]);
}

TEST_CASE("energy") {
    const HsiCube zero(2, 2, 2);
    CHECK(energy(zero, zero, zero, zero, zero, {}) == 0.0);
    CHECK(energy(scalar(1.0f), scalar(0.0f), scalar(0.0f), scalar(0.0f), scalar(0.0f), {1, 1, 1, 1}) ==
          0.5);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const HsiCube y = random_cube(5, 6, 3, seed);
        const HsiCube x = random_cube(5, 6, 3, seed + 20);
        const HsiCube z = random_cube(5, 6, 3, seed + 40);
        const HsiCube s = random_cube(5, 6, 3, seed + 60, -1.0f, 1.0f);
        const HsiCube n = random_cube(5, 6, 3, seed + 80, -0.5f, 0.5f);
        const EnergyWeights w{0.7, 1.3, 0.2, 0.9};
        const double got = energy(y, x, z, s, n, w, QuadraticProxDenoiser::prior);
        double phi = 0.0;
        for (float v : z.data()) phi += 0.5 * double(v) * v;
        const double want = oracle::naive_energy(y, x, z, s, n, 0.7, 1.3, 0.2, 0.9, phi);
        CHECK(std::abs(got - want) <= 1e-10 * std::abs(want));
    }
    CHECK_THROWS_AS(energy(zero, scalar(0.0f), zero, zero, zero, {}), ShapeError);
}

TEST_CASE("hyperparameter validation") {
    CHECK_NOTHROW(HyperParams::constant(3, 1, 2, 3, 4).validate());
    CHECK_THROWS_AS(HyperParams::constant(0, 1, 1, 1, 1).validate(), DomainError);
    auto hp = HyperParams::constant(2, 1, 1, 1, 1);
    hp.gamma.push_back(1.0);
    CHECK_THROWS_AS(hp.validate(), DomainError);
    CHECK_THROWS_AS(HyperParams::constant(2, 1, 0, 1, 1).validate(), DomainError);
    CHECK_THROWS_AS(HyperParams::constant(2, 1, 1, -1, 1).validate(), DomainError);
    CHECK_THROWS_AS(HyperParams::constant(2, 1, 1, 1, std::nan("")).validate(), DomainError);
}

TEST_CASE("single iteration hand trace") {
    const HsiCube y = random_cube(4, 4, 2, 13);
    const double lambda = 0.2, gamma = 0.5;
    const auto res = run(y, HyperParams::constant(1, 1.0, 1.0, gamma, lambda), IdentityDenoiser{},
                         {InitPolicy::zeros, {}});
    REQUIRE(res.trace.size() == 1);
    CHECK(res.state.k == 1);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double x = 0.5 * double(y[i]);
        CHECK(res.x_hat[i] == doctest::Approx(x).epsilon(1e-7));
        CHECK(res.state.z[i] == res.x_hat[i]);
        const double r = double(y[i]) - x;
        const double s = r > lambda ? r - lambda : (r < -lambda ? r + lambda : 0.0);
        CHECK(res.state.s[i] == doctest::Approx(s).epsilon(1e-6));
        CHECK(res.state.n[i] == doctest::Approx((r - s) / (1.0 + 2.0 * gamma)).epsilon(1e-6));
    }
}

TEST_CASE("noiseless fixed point is recovered") {
    const HsiCube y = random_cube(8, 8, 3, 14);
    for (auto init : {InitPolicy::zeros, InitPolicy::from_observation}) {
        const auto res =
            run(y, HyperParams::constant(20, 1.0, 1.0, 10.0, 10.0), IdentityDenoiser{}, {init, {}});
        CHECK(max_abs_diff(res.x_hat, y) < 1e-3);
    }
}

TEST_CASE("energy descends with the exact quadratic prox") {
    const HsiCube y = random_cube(32, 32, 4, 15);
    const double alpha = 0.8, beta = 2.0, gamma = 0.3, lambda = 0.1;
    SolverOptions opt;
    opt.prior = QuadraticProxDenoiser::prior;
    const auto res =
        run(y, HyperParams::constant(10, alpha, beta, gamma, lambda), QuadraticProxDenoiser{}, opt);
    const HsiCube zero(y.shape());
    double prev = energy(y, y, y, zero, zero, {alpha, alpha / beta, lambda, gamma}, opt.prior);
    for (const auto& r : res.trace) {
        for (double e : {r.after_x, r.after_z, r.after_s, r.after_n}) {
            CHECK(e <= prev + 1e-8);
            prev = e;
        }
    }
    CHECK(res.trace.back().energy() < res.trace.front().after_x);
}

TEST_CASE("sparsity is monotone in lambda") {
    const HsiCube y = random_cube(8, 8, 2, 16, -1.0f, 1.0f);
    const HsiCube zero(y.shape());
    std::size_t prev = y.size() + 1;
    for (double lambda = 0.01; lambda < 1.2; lambda += 0.05) {
        const std::size_t nnz = count_nonzero(update_s(y, zero, zero, lambda));
        CHECK(nnz <= prev);
        prev = nnz;
    }
    CHECK(prev == 0);
}

TEST_CASE("N-update shrinkage and X-update scale covariance") {
    const HsiCube y = random_cube(6, 6, 2, 17);
    const HsiCube x = random_cube(6, 6, 2, 18);
    const HsiCube s = random_cube(6, 6, 2, 19);
    const HsiCube z = random_cube(6, 6, 2, 20);
    for (double gamma : {0.0, 0.25, 3.0}) {
        const double lhs = std::sqrt(squared_norm(update_n(y, x, s, gamma)));
        const HsiCube r = axpy_combine(1.0, axpy_combine(1.0, y, -1.0, x), -1.0, s);
        const double rhs = std::sqrt(squared_norm(r)) / (1.0 + 2.0 * gamma);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
    auto scaled = [](const HsiCube& c, double k) { return axpy_combine(k, c, 0.0, c); };
    for (double c : {2.0, -0.5}) {
        CHECK(update_x(scaled(y, c), scaled(x, c), scaled(s, c), scaled(z, c), 0.7) ==
              scaled(update_x(y, x, s, z, 0.7), c));
    }
    const HsiCube lhs = update_x(scaled(y, 3.0), scaled(x, 3.0), scaled(s, 3.0), scaled(z, 3.0), 0.7);
    CHECK(max_abs_diff(lhs, scaled(update_x(y, x, s, z, 0.7), 3.0)) < 1e-5);
}

TEST_CASE("divergence is reported with iteration and update") {
    const HsiCube y = random_cube(4, 4, 1, 21);
    try {
        run(y, HyperParams::constant(3, 1, 1, 1, 1), PoisonDenoiser{});
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.iteration() == 1);
        CHECK(e.update() == "Z");
    }
    HsiCube bad = y;
    bad[3] = std::numeric_limits<float>::infinity();
    CHECK_THROWS_AS(run(bad, HyperParams::constant(1, 1, 1, 1, 1), IdentityDenoiser{}), DomainError);
}

TEST_CASE("trace csv") {
    const auto res = run(random_cube(4, 4, 1, 22), HyperParams::constant(3, 1, 1, 1, 1),
                         IdentityDenoiser{});
    const std::string csv = trace_csv(res.trace);
    CHECK(csv.rfind("iteration,energy,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
