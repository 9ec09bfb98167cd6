#include "hsiu/phantom.hpp"

#include <algorithm>

#include "hsiu/errors.hpp"
#include "hsiu/rng.hpp"

namespace hsiu {

namespace {
constexpr std::uint64_t kPhantomStream = 0x5048414e544f4dULL;
}

HsiCube make_phantom(std::uint32_t height, std::uint32_t width, std::uint32_t bands,
                     std::uint64_t seed, std::uint32_t block) {
    if (block == 0) throw DomainError("phantom: block size must be positive");
    HsiCube cube(height, width, bands);
    const std::uint32_t grid_w = (width + block - 1) / block;
    for (std::uint32_t r = 0; r < height; ++r) {
        for (std::uint32_t c = 0; c < width; ++c) {
            const std::uint64_t cell = std::uint64_t(r / block) * grid_w + c / block;
            const double base = 0.25 + 0.5 * rng::uniform(seed, kPhantomStream, 2 * cell);
            const double slope = 0.3 * (rng::uniform(seed, kPhantomStream, 2 * cell + 1) - 0.5);
            for (std::uint32_t b = 0; b < bands; ++b) {
                const double t = bands > 1 ? double(b) / (bands - 1) - 0.5 : 0.0;
                cube.at(r, c, b) = static_cast<float>(std::clamp(base + slope * t, 0.1, 0.9));
            }
        }
    }
    return cube;
}

}  // namespace hsiu
