#include <doctest.h>

#include <cmath>

#include "estimator_oracle.hpp"
#include "golden.hpp"
#include "hsiu/cube_io.hpp"
#include "hsiu/errors.hpp"
#include "hsiu/estimator.hpp"
#include "test_support.hpp"

using namespace hsiu;
using hsiu::testing::random_cube;

namespace {

std::vector<double> flatten(const HyperParams& hp) {
    std::vector<double> out;
    for (const auto* v : {&hp.alpha, &hp.beta, &hp.gamma, &hp.lambda})
        out.insert(out.end(), v->begin(), v->end());
    return out;
}

HsiCube roll(const HsiCube& y, int dr, int dc) {
    HsiCube out(y.shape());
    const int h = int(y.height()), w = int(y.width());
    for (std::uint32_t b = 0; b < y.bands(); ++b)
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
                out.at((r + dr) % h, (c + dc) % w, b) = y.at(r, c, b);
    return out;
}

}  // namespace

TEST_CASE("zero weights give softplus(0) plus the floor") {
    const auto w = make_zero_estimator_weights(4, 5);
    const auto hp = estimate(random_cube(8, 8, 4, 1), 5, w);
    CHECK(hp.iterations() == 5);
    const double expected = std::log(2.0) + 1e-4;
    for (double v : flatten(hp)) CHECK(v == doctest::Approx(expected).epsilon(1e-7));
    CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("softplus is stable") {
    CHECK(softplus(800.0) == 800.0);
    CHECK(softplus(-800.0) == 0.0);
    CHECK(softplus(1.0) == doctest::Approx(std::log1p(std::exp(1.0))).epsilon(1e-15));
}

TEST_CASE("forward pass matches an independent straight-line oracle") {
    const auto w = make_estimator_weights(4, 3, 42);
    const HsiCube inputs[] = {HsiCube::filled({8, 8, 4}, 1.0f), oracle::wave_cube(8, 8, 4),
                              random_cube(10, 6, 4, 5), random_cube(7, 9, 4, 6)};
    for (const auto& y : inputs) {
        const auto got = flatten(estimate(y, 3, w));
        const auto want = oracle::estimator_forward(y, w);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-6);
    }
}

TEST_CASE("frozen golden outputs") {
    const auto w = make_estimator_weights(4, 3, 42);
    const auto ones = flatten(estimate(HsiCube::filled({8, 8, 4}, 1.0f), 3, w));
    const auto wave = flatten(estimate(oracle::wave_cube(8, 8, 4), 3, w));
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(std::abs(ones[i] - golden::kEstimatorOnes[i]) < 1e-6);
        CHECK(std::abs(wave[i] - golden::kEstimatorWave[i]) < 1e-6);
    }
}

TEST_CASE("shift by the stride leaves the output unchanged") {
    const auto w = make_estimator_weights(3, 2, 7);
    const HsiCube y = random_cube(12, 16, 3, 8);
    const auto base = flatten(estimate(y, 2, w));
    for (auto [dr, dc] : {std::pair{2, 0}, {0, 2}, {2, 2}, {4, 6}}) {
        const auto shifted = flatten(estimate(roll(y, dr, dc), 2, w));
        for (std::size_t i = 0; i < base.size(); ++i) CHECK(std::abs(base[i] - shifted[i]) < 1e-12);
    }
}

TEST_CASE("outputs are strictly positive and finite") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto w = make_estimator_weights(2, 4, seed);
        const float scale = seed % 2 ? 1e3f : 1.0f;
        const auto hp = estimate(random_cube(6, 6, 2, seed, -scale, scale), 4, w);
        CHECK_NOTHROW(hp.validate());
        for (double v : flatten(hp)) CHECK(v >= kEstimatorFloor);
    }
}

TEST_CASE("parameters depend only on pooled features") {
    const auto w = make_estimator_weights(4, 2, 9);
    const HsiCube y = random_cube(8, 8, 4, 10);
    // A stride-aligned roll changes every pixel but keeps the pooled features.
    const auto feats = estimator_features(y, w);
    const auto a = flatten(estimate_from_features(feats, 2, w));
    const auto b = flatten(estimate(y, 2, w));
    const auto c = flatten(estimate(roll(y, 2, 4), 2, w));
    CHECK(a == b);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - c[i]) < 1e-12);
    CHECK_THROWS_AS(estimate_from_features({1.0, 2.0}, 2, w), ShapeError);
}

TEST_CASE("determinism and seeds") {
    CHECK(make_estimator_weights(4, 3, 42) == make_estimator_weights(4, 3, 42));
    CHECK_FALSE(make_estimator_weights(4, 3, 42) == make_estimator_weights(4, 3, 43));
    const auto w = make_estimator_weights(4, 3, 42);
    const auto s = estimator_shape(w);
    CHECK(s.bands == 4);
    CHECK(s.iterations == 3);
    CHECK(w.get("estimator.fc3.weight").shape == std::vector<std::uint32_t>{64, 12});
}

TEST_CASE("estimator errors") {
    const auto w = make_estimator_weights(4, 3, 1);
    CHECK_THROWS_AS(estimate(random_cube(8, 8, 3, 1), 3, w), ShapeError);
    CHECK_THROWS_AS(estimate(random_cube(8, 8, 4, 1), 2, w), ShapeError);
    CHECK_THROWS_AS(make_estimator_weights(0, 3, 1), DomainError);
    CHECK_THROWS_AS(make_estimator_weights(4, 0, 1), DomainError);
    CHECK_THROWS_AS(estimate(random_cube(8, 8, 4, 1), 3, WeightStore{}), ShapeError);
}

TEST_CASE("UWT1 roundtrip") {
    const auto w = make_estimator_weights(5, 2, 3);
    CHECK(decode_weights(encode_weights(w)) == w);
    hsiu::testing::TempDir dir("uwt");
    write_weights(w, dir / "w.uwt");
    CHECK(read_weights(dir / "w.uwt") == w);
    CHECK(read_weights(dir / "w.uwt").names() == w.names());

    const auto bytes = encode_weights(w);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "UWT1");
    CHECK(le::get_u32(bytes.data() + 4) == w.size());
}

TEST_CASE("UWT1 malformed input") {
    WeightStore w;
    w.add_constant("a", {2, 3}, 1.5f);
    const auto good = encode_weights(w);
    CHECK(decode_weights(good) == w);

    SUBCASE("bad magic") {
        auto b = good;
        b[0] = 'X';
        CHECK_THROWS_AS(decode_weights(b), FormatError);
    }
    SUBCASE("truncated payload") {
        auto b = good;
        b.pop_back();
        CHECK_THROWS_AS(decode_weights(b), FormatError);
    }
    SUBCASE("trailing bytes") {
        auto b = good;
        b.push_back(0);
        CHECK_THROWS_AS(decode_weights(b), FormatError);
    }
    SUBCASE("truncated manifest") {
        CHECK_THROWS_AS(decode_weights({good.begin(), good.begin() + 10}), FormatError);
    }
    SUBCASE("empty") { CHECK_THROWS_AS(decode_weights({}), FormatError); }
    CHECK_THROWS_AS(read_weights("/nonexistent/w.uwt"), FormatError);
}

TEST_CASE("weight store") {
    WeightStore w;
    w.add_uniform("x", {4, 5}, 4, 1);
    for (float v : w.values("x")) CHECK(std::abs(v) <= 0.5f);
    CHECK_THROWS_AS(w.add_constant("x", {1}, 0.0f), DomainError);
    CHECK_THROWS_AS(w.get("x", {5, 4}), ShapeError);
    CHECK_THROWS_AS(w.get("y"), ShapeError);
    w.add_constant("pre.y", {3}, 2.0f);
    w.zero_prefix("pre.");
    for (float v : w.values("pre.y")) CHECK(v == 0.0f);
    CHECK(w.names() == std::vector<std::string>{"x", "pre.y"});
}
