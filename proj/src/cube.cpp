#include "hsiu/cube.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsiu/errors.hpp"

namespace hsiu {

namespace {

std::string shape_string(const CubeShape& s) {
    return std::to_string(s.height) + "x" + std::to_string(s.width) + "x" +
           std::to_string(s.bands);
}

}  // namespace

HsiCube::HsiCube(std::uint32_t height, std::uint32_t width, std::uint32_t bands)
    : shape_{height, width, bands} {
    if (height == 0 || width == 0 || bands == 0) {
        throw DomainError("cube dimensions must be positive, got " + shape_string(shape_));
    }
    data_.assign(shape_.size(), 0.0f);
}

HsiCube::HsiCube(std::uint32_t height, std::uint32_t width, std::uint32_t bands,
                 std::vector<float> data)
    : HsiCube(height, width, bands) {
    if (data.size() != shape_.size()) {
        throw ShapeError("cube " + shape_string(shape_) + " needs " +
                         std::to_string(shape_.size()) + " values, got " +
                         std::to_string(data.size()));
    }
    data_ = std::move(data);
}

HsiCube HsiCube::filled(CubeShape shape, float value) {
    HsiCube cube(shape);
    std::fill(cube.data_.begin(), cube.data_.end(), value);
    return cube;
}

bool HsiCube::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

void require_conformable(const HsiCube& a, const HsiCube& b, const char* what) {
    if (!a.conformable(b)) {
        throw ShapeError(std::string(what) + ": shape mismatch " + shape_string(a.shape()) +
                         " vs " + shape_string(b.shape()));
    }
}

HsiCube axpy_combine(double a, const HsiCube& u, double b, const HsiCube& v) {
    require_conformable(u, v, "axpy_combine");
    HsiCube out(u.shape());
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = static_cast<float>(a * double(u[i]) + b * double(v[i]));
    }
    return out;
}

double squared_norm(const HsiCube& u) {
    double acc = 0.0;
    for (float x : u.data()) acc += double(x) * double(x);
    return acc;
}

double l1_norm(const HsiCube& u) {
    double acc = 0.0;
    for (float x : u.data()) acc += std::abs(double(x));
    return acc;
}

std::size_t count_nonzero(const HsiCube& u) {
    return static_cast<std::size_t>(
        std::count_if(u.data().begin(), u.data().end(), [](float x) { return x != 0.0f; }));
}

double max_abs_diff(const HsiCube& u, const HsiCube& v) {
    require_conformable(u, v, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        m = std::max(m, std::abs(double(u[i]) - double(v[i])));
    }
    return m;
}

}  // namespace hsiu
