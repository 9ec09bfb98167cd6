#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "hsiu/cube.hpp"

namespace hsiu::testing {

// Test-side randomness uses the standard library engine, independent of hsiu::rng.
inline HsiCube random_cube(std::uint32_t h, std::uint32_t w, std::uint32_t p, std::uint64_t seed,
                           float lo = 0.0f, float hi = 1.0f) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<float> dist(lo, hi);
    HsiCube c(h, w, p);
    for (auto& v : c.data()) v = dist(gen);
    return c;
}

inline HsiCube constant_cube(std::uint32_t h, std::uint32_t w, std::uint32_t p, float v) {
    return HsiCube::filled({h, w, p}, v);
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("hsiu_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace hsiu::testing
