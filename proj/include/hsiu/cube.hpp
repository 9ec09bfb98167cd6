#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hsiu {

/// Shape of a hyperspectral cube: height x width spatial, bands spectral.
struct CubeShape {
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::uint32_t bands = 0;

    std::size_t plane() const noexcept { return std::size_t(height) * width; }
    std::size_t size() const noexcept { return plane() * bands; }

    friend bool operator==(const CubeShape&, const CubeShape&) = default;
};

/// Dense M x N x P cube of 32-bit radiance values.
///
/// Storage is band-sequential: each band's spatial plane is contiguous and
/// row-major inside the band, so element (row, col, band) lives at
/// band * M * N + row * N + col. All solver updates are element-wise and
/// ignore the layout; spectral code reads a pixel's spectrum with stride M * N.
class HsiCube {
public:
    HsiCube() = default;

    /// Zero-filled cube. Throws DomainError if any dimension is zero.
    HsiCube(std::uint32_t height, std::uint32_t width, std::uint32_t bands);
    explicit HsiCube(CubeShape shape) : HsiCube(shape.height, shape.width, shape.bands) {}

    /// Takes ownership of band-sequential data; throws ShapeError on a length mismatch.
    HsiCube(std::uint32_t height, std::uint32_t width, std::uint32_t bands,
            std::vector<float> data);

    static HsiCube filled(CubeShape shape, float value);

    std::uint32_t height() const noexcept { return shape_.height; }
    std::uint32_t width() const noexcept { return shape_.width; }
    std::uint32_t bands() const noexcept { return shape_.bands; }
    const CubeShape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::size_t index(std::uint32_t row, std::uint32_t col, std::uint32_t band) const noexcept {
        return std::size_t(band) * shape_.plane() + std::size_t(row) * shape_.width + col;
    }

    float& at(std::uint32_t row, std::uint32_t col, std::uint32_t band) noexcept {
        return data_[index(row, col, band)];
    }
    float at(std::uint32_t row, std::uint32_t col, std::uint32_t band) const noexcept {
        return data_[index(row, col, band)];
    }

    float& operator[](std::size_t i) noexcept { return data_[i]; }
    float operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<float> data() noexcept { return data_; }
    std::span<const float> data() const noexcept { return data_; }

    std::span<float> band(std::uint32_t b) noexcept {
        return std::span<float>(data_).subspan(std::size_t(b) * shape_.plane(), shape_.plane());
    }
    std::span<const float> band(std::uint32_t b) const noexcept {
        return std::span<const float>(data_).subspan(std::size_t(b) * shape_.plane(),
                                                     shape_.plane());
    }

    bool conformable(const HsiCube& other) const noexcept { return shape_ == other.shape_; }
    bool all_finite() const noexcept;

    friend bool operator==(const HsiCube&, const HsiCube&) = default;

private:
    CubeShape shape_{};
    std::vector<float> data_;
};

/// Throws ShapeError naming `what` unless both cubes have the same (M, N, P).
void require_conformable(const HsiCube& a, const HsiCube& b, const char* what);

/// Element-wise a*u + b*v, evaluated in double and stored as float.
HsiCube axpy_combine(double a, const HsiCube& u, double b, const HsiCube& v);

/// Frobenius norm squared with 64-bit accumulation.
double squared_norm(const HsiCube& u);
/// l1 norm with 64-bit accumulation.
double l1_norm(const HsiCube& u);
/// Number of nonzero entries.
std::size_t count_nonzero(const HsiCube& u);
/// max |u - v|.
double max_abs_diff(const HsiCube& u, const HsiCube& v);

}  // namespace hsiu
