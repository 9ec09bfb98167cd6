#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hsiu/cube.hpp"
#include "hsiu/errors.hpp"
#include "hsiu/ulnsa/autodiff.hpp"

namespace hsiu::ulnsa {

/// H x W x C activations, channels fastest (token-major).
template <class T>
struct FeatureMap {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<T> data;

    FeatureMap() = default;
    FeatureMap(int h, int w, int c) : height(h), width(w), channels(c) {
        if (h <= 0 || w <= 0 || c <= 0) {
            throw DomainError("feature map dimensions must be positive");
        }
        data.assign(std::size_t(h) * w * c, T(0.0));
    }

    int tokens() const noexcept { return height * width; }
    std::size_t offset(int r, int c, int ch) const noexcept {
        return (std::size_t(r) * width + c) * channels + ch;
    }
    T& at(int r, int c, int ch) noexcept { return data[offset(r, c, ch)]; }
    const T& at(int r, int c, int ch) const noexcept { return data[offset(r, c, ch)]; }
    T* token(int t) noexcept { return data.data() + std::size_t(t) * channels; }
    const T* token(int t) const noexcept { return data.data() + std::size_t(t) * channels; }

    bool same_shape(const FeatureMap& o) const noexcept {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

/// (groups, tokens, dim) stack of token sequences; attention runs inside each group.
template <class T>
struct TokenGroups {
    int groups = 0;
    int tokens = 0;
    int dim = 0;
    std::vector<T> data;

    TokenGroups() = default;
    TokenGroups(int g, int t, int d) : groups(g), tokens(t), dim(d) {
        if (g <= 0 || t <= 0 || d <= 0) throw DomainError("token group dimensions must be positive");
        data.assign(std::size_t(g) * t * d, T(0.0));
    }

    std::size_t offset(int g, int t, int d) const noexcept {
        return (std::size_t(g) * tokens + t) * dim + d;
    }
    T& at(int g, int t, int d) noexcept { return data[offset(g, t, d)]; }
    const T& at(int g, int t, int d) const noexcept { return data[offset(g, t, d)]; }

    bool same_shape(const TokenGroups& o) const noexcept {
        return groups == o.groups && tokens == o.tokens && dim == o.dim;
    }
};

/// Band-sequential cube to token-major double features.
inline FeatureMap<double> to_features(const HsiCube& cube) {
    FeatureMap<double> fm(int(cube.height()), int(cube.width()), int(cube.bands()));
    for (std::uint32_t b = 0; b < cube.bands(); ++b)
        for (std::uint32_t r = 0; r < cube.height(); ++r)
            for (std::uint32_t c = 0; c < cube.width(); ++c)
                fm.at(int(r), int(c), int(b)) = cube.at(r, c, b);
    return fm;
}

template <class T>
HsiCube to_cube(const FeatureMap<T>& fm) {
    HsiCube cube(std::uint32_t(fm.height), std::uint32_t(fm.width), std::uint32_t(fm.channels));
    for (int b = 0; b < fm.channels; ++b)
        for (int r = 0; r < fm.height; ++r)
            for (int c = 0; c < fm.width; ++c)
                cube.at(r, c, b) = static_cast<float>(value_of(fm.at(r, c, b)));
    return cube;
}

}  // namespace hsiu::ulnsa
