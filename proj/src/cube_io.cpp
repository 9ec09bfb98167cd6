#include "hsiu/cube_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "hsiu/errors.hpp"

namespace hsiu {

namespace le {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
    put_u32(out, std::bit_cast<std::uint32_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_u32(p)); }

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("short write to " + path.string());
}

}  // namespace le

std::vector<std::uint8_t> encode_cube(const HsiCube& cube) {
    if (!cube.all_finite()) throw FormatError("refusing to encode a cube with NaN/Inf values");
    std::vector<std::uint8_t> out;
    out.reserve(kHsicHeaderBytes + 4 * cube.size());
    out.insert(out.end(), std::begin(kHsicMagic), std::end(kHsicMagic));
    out.push_back(kHsicVersion);
    le::put_u32(out, cube.height());
    le::put_u32(out, cube.width());
    le::put_u32(out, cube.bands());
    for (float v : cube.data()) le::put_f32(out, v);
    return out;
}

HsiCube decode_cube(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kHsicHeaderBytes) {
        throw FormatError("HSIC: truncated header, expected " + std::to_string(kHsicHeaderBytes) +
                          " bytes, got " + std::to_string(bytes.size()));
    }
    if (std::memcmp(bytes.data(), kHsicMagic, 4) != 0) throw FormatError("HSIC: bad magic");
    if (bytes[4] != kHsicVersion) {
        throw FormatError("HSIC: unsupported version " + std::to_string(bytes[4]));
    }
    const std::uint32_t m = le::get_u32(bytes.data() + 5);
    const std::uint32_t n = le::get_u32(bytes.data() + 9);
    const std::uint32_t p = le::get_u32(bytes.data() + 13);
    if (m == 0 || n == 0 || p == 0) throw FormatError("HSIC: zero dimension in header");
    const std::uint64_t count = std::uint64_t(m) * n * p;
    const std::uint64_t expected = kHsicHeaderBytes + 4 * count;
    if (bytes.size() != expected) {
        throw FormatError("HSIC: size mismatch for " + std::to_string(m) + "x" +
                          std::to_string(n) + "x" + std::to_string(p) + ", expected " +
                          std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()));
    }
    std::vector<float> data(count);
    const std::uint8_t* payload = bytes.data() + kHsicHeaderBytes;
    for (std::uint64_t i = 0; i < count; ++i) {
        data[i] = le::get_f32(payload + 4 * i);
        if (!std::isfinite(data[i])) {
            throw FormatError("HSIC: non-finite value at element " + std::to_string(i));
        }
    }
    return HsiCube(m, n, p, std::move(data));
}

void write_cube(const HsiCube& cube, const std::filesystem::path& path) {
    le::write_file(path, encode_cube(cube));
}

HsiCube read_cube(const std::filesystem::path& path) { return decode_cube(le::read_file(path)); }

}  // namespace hsiu
