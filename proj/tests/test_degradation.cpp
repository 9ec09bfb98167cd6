#include <doctest.h>

#include <cmath>
#include <set>

#include "hsiu/degradation.hpp"
#include "hsiu/errors.hpp"
#include "test_support.hpp"

using namespace hsiu;
using hsiu::testing::constant_cube;
using hsiu::testing::random_cube;

namespace {

double replaced_fraction(const HsiCube& clean, const HsiCube& noisy) {
    std::size_t changed = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) changed += clean[i] != noisy[i];
    return double(changed) / double(clean.size());
}

const HsiCube& million_zeros() {
    static const HsiCube c(100, 100, 100);
    return c;
}

}  // namespace

TEST_CASE("add_gaussian") {
    const HsiCube clean = random_cube(8, 8, 4, 1);
    CHECK(add_gaussian(clean, 0.0, 3) == clean);
    CHECK_THROWS_AS(add_gaussian(clean, -0.1, 3), DomainError);

    SUBCASE("variance and mean at 1e6 samples") {
        const HsiCube noisy = add_gaussian(million_zeros(), 0.2, 11);
        double sum = 0.0, sq = 0.0;
        for (float v : noisy.data()) {
            sum += v;
            sq += double(v) * v;
        }
        const double n = double(noisy.size());
        const double mean = sum / n;
        const double var = sq / n - mean * mean;
        CHECK(var >= 0.039);
        CHECK(var <= 0.041);
        CHECK(std::abs(mean) < 3.0 * 0.2 / std::sqrt(n));
    }

    SUBCASE("different seeds give different fields") {
        const HsiCube a = add_gaussian(constant_cube(50, 50, 4, 0.5f), 0.2, 1);
        const HsiCube b = add_gaussian(constant_cube(50, 50, 4, 0.5f), 0.2, 2);
        std::size_t differ = 0;
        for (std::size_t i = 0; i < a.size(); ++i) differ += a[i] != b[i];
        CHECK(double(differ) / a.size() > 0.99);
    }

    SUBCASE("no clipping") {
        const HsiCube noisy = add_gaussian(constant_cube(32, 32, 4, 0.95f), 0.2, 5);
        float mx = 0.0f;
        for (float v : noisy.data()) mx = std::max(mx, v);
        CHECK(mx > 1.0f);
    }
}

TEST_CASE("add_impulse") {
    const HsiCube clean = constant_cube(16, 16, 4, 0.5f);
    CHECK(add_impulse(clean, 0.0, 1) == clean);
    CHECK_THROWS_AS(add_impulse(clean, -0.01, 1), DomainError);
    CHECK_THROWS_AS(add_impulse(clean, 1.01, 1), DomainError);

    const HsiCube full = add_impulse(clean, 1.0, 1);
    std::set<float> values(full.data().begin(), full.data().end());
    CHECK(values == std::set<float>{0.0f, 1.0f});

    const HsiCube half = constant_cube(100, 100, 100, 0.5f);
    const double frac = replaced_fraction(half, add_impulse(half, 0.1, 4));
    CHECK(frac >= 0.095);
    CHECK(frac <= 0.105);
}

TEST_CASE("add_stripes") {
    const HsiCube clean = random_cube(4, 4, 1, 2);
    CHECK(add_stripes(clean, 0.0, 0.3, 1) == clean);
    CHECK_THROWS_AS(add_stripes(clean, 1.5, 0.3, 1), DomainError);
    CHECK_THROWS_AS(add_stripes(clean, 0.5, -0.3, 1), DomainError);

    SUBCASE("a quarter of four columns stripes exactly one column") {
        const HsiCube striped = add_stripes(clean, 0.25, 0.3, 9);
        std::set<std::uint32_t> cols;
        int modified = 0;
        for (std::uint32_t r = 0; r < 4; ++r)
            for (std::uint32_t c = 0; c < 4; ++c)
                if (striped.at(r, c, 0) != clean.at(r, c, 0)) {
                    ++modified;
                    cols.insert(c);
                }
        CHECK(modified == 4);
        CHECK(cols.size() == 1);
    }

    SUBCASE("offset is constant down each striped column") {
        const HsiCube big = random_cube(32, 40, 3, 3);
        const HsiCube striped = add_stripes(big, 0.3, 0.2, 4);
        int striped_cols = 0;
        for (std::uint32_t b = 0; b < 3; ++b) {
            for (std::uint32_t c = 0; c < 40; ++c) {
                const double d0 = double(striped.at(0, c, b)) - big.at(0, c, b);
                if (d0 != 0.0) ++striped_cols;
                CHECK(std::abs(d0) <= 0.2 + 1e-6);
                for (std::uint32_t r = 1; r < 32; ++r) {
                    const double d = double(striped.at(r, c, b)) - big.at(r, c, b);
                    CHECK(std::abs(d - d0) < 1e-6);
                }
            }
        }
        CHECK(striped_cols == 3 * 12);
    }
}

TEST_CASE("synthesize_case parameters") {
    const HsiCube clean = random_cube(8, 8, 2, 6);
    const double expected_p[] = {0.0, 0.05, 0.1, 0.15};
    for (int c = 1; c <= 4; ++c) {
        const auto [noisy, spec] = synthesize_case(clean, c, 17);
        CHECK(spec.gaussian_sigma == 0.2);
        CHECK(spec.sparse_fraction == expected_p[c - 1]);
        CHECK(spec.seed == 17);
        CHECK(noisy == apply_noise(clean, spec));
    }
    CHECK_THROWS_AS(synthesize_case(clean, 0, 1), DomainError);
    CHECK_THROWS_AS(synthesize_case(clean, 5, 1), DomainError);
}

TEST_CASE("synthesize_case composes Gaussian then impulse") {
    const HsiCube clean = random_cube(16, 12, 3, 7);
    const auto [noisy, spec] = synthesize_case(clean, 3, 99);
    CHECK(noisy == add_impulse(add_gaussian(clean, 0.2, 99), 0.1, 99));
    CHECK(noisy == synthesize_case(clean, 3, 99).first);
}

TEST_CASE("case 4 replaces about 15 percent of elements") {
    const auto [noisy, spec] = synthesize_case(million_zeros(), 4, 23);
    // Gaussian values are never exactly 0 or 1, so the impulse positions are exact.
    std::size_t hits = 0;
    for (float v : noisy.data()) hits += (v == 0.0f || v == 1.0f);
    const double frac = double(hits) / noisy.size();
    CHECK(frac >= 0.145);
    CHECK(frac <= 0.155);
}

TEST_CASE("noise spec sidecar roundtrip") {
    NoiseSpec spec = case_spec(2, 123456789012345ULL);
    spec.sparse_kind = SparseKind::both;
    spec.stripe_fraction = 0.125;
    spec.stripe_amplitude = 0.3;
    const std::string text = to_key_value(spec);
    CHECK(text.find("sparse_kind=both\n") != std::string::npos);
    CHECK(parse_key_value(text) == spec);
    CHECK_THROWS_AS(parse_key_value("gaussian_sigma=0.2\n"), FormatError);
    CHECK_THROWS_AS(parse_sparse_kind("salt"), DomainError);
}

TEST_CASE("apply_noise with stripes") {
    const HsiCube clean = random_cube(8, 8, 2, 8);
    NoiseSpec spec;
    spec.sparse_kind = SparseKind::stripes;
    spec.stripe_fraction = 0.25;
    spec.stripe_amplitude = 0.1;
    spec.seed = 3;
    CHECK(apply_noise(clean, spec) == add_stripes(clean, 0.25, 0.1, 3));
    spec.sparse_fraction = 2.0;
    CHECK_THROWS_AS(apply_noise(clean, spec), DomainError);
}
