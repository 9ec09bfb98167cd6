#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hsiu/cube.hpp"

namespace hsiu {

// HSIC v1 layout, all little-endian:
//   "HSIC" | u8 version = 1 | u32 M | u32 N | u32 P | M*N*P f32 (band-sequential)
inline constexpr char kHsicMagic[4] = {'H', 'S', 'I', 'C'};
inline constexpr std::uint8_t kHsicVersion = 1;
inline constexpr std::size_t kHsicHeaderBytes = 4 + 1 + 3 * 4;

std::vector<std::uint8_t> encode_cube(const HsiCube& cube);
HsiCube decode_cube(const std::vector<std::uint8_t>& bytes);

void write_cube(const HsiCube& cube, const std::filesystem::path& path);
HsiCube read_cube(const std::filesystem::path& path);

namespace le {

// Little-endian primitives shared by the HSIC and UWT1 codecs.
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_f32(std::vector<std::uint8_t>& out, float v);
std::uint32_t get_u32(const std::uint8_t* p);
float get_f32(const std::uint8_t* p);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace le

}  // namespace hsiu
