#pragma once

#include <cstdint>

#include "hsiu/cube.hpp"

namespace hsiu {

/// Synthetic test scene: a grid of piecewise-constant blocks, each with its own smooth
/// linear spectral ramp, so neighbouring bands are strongly correlated and block edges
/// are sharp. Values stay inside [0.1, 0.9].
HsiCube make_phantom(std::uint32_t height = 64, std::uint32_t width = 64, std::uint32_t bands = 4,
                     std::uint64_t seed = 7, std::uint32_t block = 16);

}  // namespace hsiu
