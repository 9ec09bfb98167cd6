#pragma once

// Building blocks of the local / non-local / spectral attention denoiser.
//
// Everything is templated on the scalar so one code path serves the double
// forward pass and the ad::Var gradient checker. Parameters are float32 spans
// (as stored in a WeightStore) and enter the arithmetic as constants.
//
// Weight layouts:
//   linear / conv1x1   [c_in][c_out]          out = x W + b
//   conv kxk           [c_out][c_in][k][k]
//   depthwise 3x3      [c][3][3]
//   deconv 2x2         [c_in][c_out][2][2]    stride 2
//   positional tables  [heads][tokens][tokens]

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hsiu/errors.hpp"
#include "hsiu/ulnsa/autodiff.hpp"
#include "hsiu/ulnsa/tensor.hpp"

namespace hsiu::ulnsa {

namespace detail {

inline void require(bool ok, const std::string& message) {
    if (!ok) throw ShapeError(message);
}

/// Max-subtracted softmax over n entries spaced `stride` apart, in place.
template <class T>
void softmax_inplace(T* logits, int n, int stride = 1) {
    using std::exp;
    double m = value_of(logits[0]);
    for (int i = 1; i < n; ++i) m = std::max(m, value_of(logits[std::size_t(i) * stride]));
    T sum(0.0);
    for (int i = 0; i < n; ++i) {
        T& l = logits[std::size_t(i) * stride];
        l = exp(l - T(m));
        sum += l;
    }
    for (int i = 0; i < n; ++i) logits[std::size_t(i) * stride] /= sum;
}

}  // namespace detail

/// Per-token affine map, out = x W (+ b).
template <class T>
FeatureMap<T> linear(const FeatureMap<T>& x, std::span<const float> weight, int c_out,
                     std::span<const float> bias = {}) {
    detail::require(weight.size() == std::size_t(x.channels) * c_out,
                    "linear: weight size does not match " + std::to_string(x.channels) + "->" +
                        std::to_string(c_out));
    detail::require(bias.empty() || bias.size() == std::size_t(c_out), "linear: bias size");
    FeatureMap<T> out(x.height, x.width, c_out);
    for (int t = 0; t < x.tokens(); ++t) {
        const T* in = x.token(t);
        T* o = out.token(t);
        for (int j = 0; j < c_out; ++j) {
            T acc(bias.empty() ? 0.0 : double(bias[j]));
            for (int i = 0; i < x.channels; ++i) {
                acc += in[i] * T(double(weight[std::size_t(i) * c_out + j]));
            }
            o[j] = acc;
        }
    }
    return out;
}

/// Q = X W_q, K = X W_k, V = X W_v with C x C maps and no bias.
template <class T>
std::tuple<FeatureMap<T>, FeatureMap<T>, FeatureMap<T>> project_qkv(const FeatureMap<T>& x,
                                                                     std::span<const float> wq,
                                                                     std::span<const float> wk,
                                                                     std::span<const float> wv) {
    return {linear(x, wq, x.channels), linear(x, wk, x.channels), linear(x, wv, x.channels)};
}

/// First C/2 channels, then the remaining C/2.
template <class T>
std::pair<FeatureMap<T>, FeatureMap<T>> split_half_channels(const FeatureMap<T>& x) {
    if (x.channels % 2 != 0) {
        throw ShapeError("split_half_channels: channel count " + std::to_string(x.channels) +
                         " is odd");
    }
    const int half = x.channels / 2;
    FeatureMap<T> a(x.height, x.width, half), b(x.height, x.width, half);
    for (int t = 0; t < x.tokens(); ++t) {
        std::copy_n(x.token(t), half, a.token(t));
        std::copy_n(x.token(t) + half, half, b.token(t));
    }
    return {std::move(a), std::move(b)};
}

template <class T>
FeatureMap<T> concat_channels(const FeatureMap<T>& a, const FeatureMap<T>& b) {
    detail::require(a.height == b.height && a.width == b.width,
                    "concat_channels: spatial size mismatch");
    FeatureMap<T> out(a.height, a.width, a.channels + b.channels);
    for (int t = 0; t < a.tokens(); ++t) {
        std::copy_n(a.token(t), a.channels, out.token(t));
        std::copy_n(b.token(t), b.channels, out.token(t) + a.channels);
    }
    return out;
}

/// Non-overlapping p x p windows. Windows are numbered row-major over the window grid and
/// tokens row-major inside each window.
template <class T>
TokenGroups<T> window_partition(const FeatureMap<T>& x, int p) {
    if (p <= 0 || x.height % p != 0 || x.width % p != 0) {
        throw ShapeError("window_partition: " + std::to_string(x.height) + "x" +
                         std::to_string(x.width) + " is not divisible by window " +
                         std::to_string(p));
    }
    const int grid_w = x.width / p;
    TokenGroups<T> g((x.height / p) * grid_w, p * p, x.channels);
    for (int r = 0; r < x.height; ++r) {
        for (int c = 0; c < x.width; ++c) {
            const int w = (r / p) * grid_w + c / p;
            const int t = (r % p) * p + c % p;
            std::copy_n(&x.at(r, c, 0), x.channels, &g.at(w, t, 0));
        }
    }
    return g;
}

template <class T>
FeatureMap<T> window_unpartition(const TokenGroups<T>& g, int height, int width, int p) {
    detail::require(p > 0 && height % p == 0 && width % p == 0 &&
                        g.groups == (height / p) * (width / p) && g.tokens == p * p,
                    "window_unpartition: groups do not tile the requested map");
    const int grid_w = width / p;
    FeatureMap<T> x(height, width, g.dim);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const int w = (r / p) * grid_w + c / p;
            const int t = (r % p) * p + c % p;
            std::copy_n(&g.at(w, t, 0), g.dim, &x.at(r, c, 0));
        }
    }
    return x;
}

/// Swaps the group and token axes: (G, T, d) -> (T, G, d). An involution.
template <class T>
TokenGroups<T> shuffle_tokens(const TokenGroups<T>& g) {
    TokenGroups<T> out(g.tokens, g.groups, g.dim);
    for (int w = 0; w < g.groups; ++w)
        for (int t = 0; t < g.tokens; ++t) std::copy_n(&g.at(w, t, 0), g.dim, &out.at(t, w, 0));
    return out;
}

/// Per group and head: softmax(Q K^T / sqrt(d_h) + P) V. `positional` holds one
/// tokens x tokens table per head, or is empty for no positional bias.
template <class T>
TokenGroups<T> windowed_attention(const TokenGroups<T>& q, const TokenGroups<T>& k,
                                  const TokenGroups<T>& v, std::span<const float> positional,
                                  int head_dim) {
    detail::require(q.same_shape(k) && q.same_shape(v), "windowed_attention: Q/K/V shapes differ");
    detail::require(head_dim > 0 && q.dim % head_dim == 0,
                    "windowed_attention: head dim " + std::to_string(head_dim) +
                        " does not divide " + std::to_string(q.dim));
    const int heads = q.dim / head_dim;
    const int n = q.tokens;
    detail::require(positional.empty() || positional.size() == std::size_t(heads) * n * n,
                    "windowed_attention: positional table must be heads x " + std::to_string(n) +
                        " x " + std::to_string(n));
    const double scale = 1.0 / std::sqrt(double(head_dim));
    TokenGroups<T> out(q.groups, n, q.dim);
    std::vector<T> logits(std::size_t(n) * n);
    for (int g = 0; g < q.groups; ++g) {
        for (int h = 0; h < heads; ++h) {
            const int c0 = h * head_dim;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    T dot(0.0);
                    for (int d = 0; d < head_dim; ++d) dot += q.at(g, i, c0 + d) * k.at(g, j, c0 + d);
                    T l = dot * T(scale);
                    if (!positional.empty()) {
                        l += T(double(positional[(std::size_t(h) * n + i) * n + j]));
                    }
                    logits[std::size_t(i) * n + j] = l;
                }
                detail::softmax_inplace(&logits[std::size_t(i) * n], n);
            }
            for (int i = 0; i < n; ++i) {
                for (int d = 0; d < head_dim; ++d) {
                    T acc(0.0);
                    for (int j = 0; j < n; ++j) acc += logits[std::size_t(i) * n + j] * v.at(g, j, c0 + d);
                    out.at(g, i, c0 + d) = acc;
                }
            }
        }
    }
    return out;
}

/// Channel attention over whole-band descriptors.
///
/// For each head j of width d = C / heads: S = softmax over rows of K_j^T Q_j / sqrt(d)
/// (a d x d matrix whose columns sum to one), A_j = V_j S. Heads are concatenated and
/// mapped by `w_proj` (C x C).
template <class T>
FeatureMap<T> spectral_attention(const FeatureMap<T>& x, std::span<const float> wq,
                                 std::span<const float> wk, std::span<const float> wv,
                                 std::span<const float> w_proj, int heads) {
    if (heads <= 0 || x.channels % heads != 0) {
        throw ShapeError("spectral_attention: " + std::to_string(heads) +
                         " heads do not divide " + std::to_string(x.channels) + " channels");
    }
    auto [q, k, v] = project_qkv(x, wq, wk, wv);
    const int c = x.channels;
    const int d = c / heads;
    const int tokens = x.tokens();
    const double scale = 1.0 / std::sqrt(double(d));
    FeatureMap<T> heads_out(x.height, x.width, c);
    std::vector<T> s(std::size_t(d) * d);  // s[i * d + j]: key channel i, query channel j
    for (int h = 0; h < heads; ++h) {
        const int c0 = h * d;
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                T dot(0.0);
                for (int t = 0; t < tokens; ++t) dot += k.token(t)[c0 + i] * q.token(t)[c0 + j];
                s[std::size_t(i) * d + j] = dot * T(scale);
            }
        }
        for (int j = 0; j < d; ++j) detail::softmax_inplace(&s[j], d, d);
        for (int t = 0; t < tokens; ++t) {
            for (int j = 0; j < d; ++j) {
                T acc(0.0);
                for (int i = 0; i < d; ++i) acc += v.token(t)[c0 + i] * s[std::size_t(i) * d + j];
                heads_out.token(t)[c0 + j] = acc;
            }
        }
    }
    return linear(heads_out, w_proj, c);
}

/// LayerNorm over the channels of every token.
template <class T>
FeatureMap<T> layer_norm(const FeatureMap<T>& x, std::span<const float> gamma,
                         std::span<const float> beta, double eps = 1e-5) {
    using std::sqrt;
    detail::require(gamma.size() == std::size_t(x.channels) && beta.size() == gamma.size(),
                    "layer_norm: affine parameters do not match channel count");
    FeatureMap<T> out(x.height, x.width, x.channels);
    const double inv_c = 1.0 / x.channels;
    for (int t = 0; t < x.tokens(); ++t) {
        const T* in = x.token(t);
        T mean(0.0);
        for (int i = 0; i < x.channels; ++i) mean += in[i];
        mean *= T(inv_c);
        T var(0.0);
        for (int i = 0; i < x.channels; ++i) {
            const T d = in[i] - mean;
            var += d * d;
        }
        var *= T(inv_c);
        const T inv_std = T(1.0) / sqrt(var + T(eps));
        T* o = out.token(t);
        for (int i = 0; i < x.channels; ++i) {
            o[i] = (in[i] - mean) * inv_std * T(double(gamma[i])) + T(double(beta[i]));
        }
    }
    return out;
}

/// Exact GELU, x * Phi(x).
template <class T>
FeatureMap<T> gelu(FeatureMap<T> x) {
    using std::erf;
    for (T& v : x.data) v = v * T(0.5) * (T(1.0) + erf(v * T(1.0 / std::numbers::sqrt2)));
    return x;
}

/// Dense k x k convolution with zero padding.
template <class T>
FeatureMap<T> conv2d(const FeatureMap<T>& x, std::span<const float> weight,
                     std::span<const float> bias, int c_out, int kernel, int stride, int pad) {
    const int c_in = x.channels;
    detail::require(weight.size() == std::size_t(c_out) * c_in * kernel * kernel,
                    "conv2d: weight size mismatch");
    detail::require(bias.empty() || bias.size() == std::size_t(c_out), "conv2d: bias size");
    const int out_h = (x.height + 2 * pad - kernel) / stride + 1;
    const int out_w = (x.width + 2 * pad - kernel) / stride + 1;
    FeatureMap<T> out(out_h, out_w, c_out);
    for (int r = 0; r < out_h; ++r) {
        for (int c = 0; c < out_w; ++c) {
            for (int o = 0; o < c_out; ++o) {
                T acc(bias.empty() ? 0.0 : double(bias[o]));
                for (int kr = 0; kr < kernel; ++kr) {
                    const int ir = r * stride + kr - pad;
                    if (ir < 0 || ir >= x.height) continue;
                    for (int kc = 0; kc < kernel; ++kc) {
                        const int ic = c * stride + kc - pad;
                        if (ic < 0 || ic >= x.width) continue;
                        const T* in = &x.at(ir, ic, 0);
                        for (int i = 0; i < c_in; ++i) {
                            const float w =
                                weight[((std::size_t(o) * c_in + i) * kernel + kr) * kernel + kc];
                            acc += in[i] * T(double(w));
                        }
                    }
                }
                out.at(r, c, o) = acc;
            }
        }
    }
    return out;
}

/// Per-channel 3 x 3 convolution, zero padding 1.
template <class T>
FeatureMap<T> depthwise_conv3x3(const FeatureMap<T>& x, std::span<const float> weight,
                                std::span<const float> bias) {
    detail::require(weight.size() == std::size_t(x.channels) * 9, "depthwise_conv3x3: weight size");
    detail::require(bias.size() == std::size_t(x.channels), "depthwise_conv3x3: bias size");
    FeatureMap<T> out(x.height, x.width, x.channels);
    for (int r = 0; r < x.height; ++r) {
        for (int c = 0; c < x.width; ++c) {
            for (int ch = 0; ch < x.channels; ++ch) {
                T acc(double(bias[ch]));
                for (int kr = 0; kr < 3; ++kr) {
                    const int ir = r + kr - 1;
                    if (ir < 0 || ir >= x.height) continue;
                    for (int kc = 0; kc < 3; ++kc) {
                        const int ic = c + kc - 1;
                        if (ic < 0 || ic >= x.width) continue;
                        acc += x.at(ir, ic, ch) * T(double(weight[std::size_t(ch) * 9 + kr * 3 + kc]));
                    }
                }
                out.at(r, c, ch) = acc;
            }
        }
    }
    return out;
}

/// 2 x 2 transposed convolution with stride 2 (doubles the spatial size).
template <class T>
FeatureMap<T> deconv2x2(const FeatureMap<T>& x, std::span<const float> weight,
                        std::span<const float> bias, int c_out) {
    const int c_in = x.channels;
    detail::require(weight.size() == std::size_t(c_in) * c_out * 4, "deconv2x2: weight size");
    detail::require(bias.size() == std::size_t(c_out), "deconv2x2: bias size");
    FeatureMap<T> out(2 * x.height, 2 * x.width, c_out);
    for (int r = 0; r < out.height; ++r) {
        for (int c = 0; c < out.width; ++c) {
            const T* in = &x.at(r / 2, c / 2, 0);
            const int tap = (r % 2) * 2 + (c % 2);
            for (int o = 0; o < c_out; ++o) {
                T acc(double(bias[o]));
                for (int i = 0; i < c_in; ++i) {
                    acc += in[i] * T(double(weight[(std::size_t(i) * c_out + o) * 4 + tap]));
                }
                out.at(r, c, o) = acc;
            }
        }
    }
    return out;
}

template <class T>
FeatureMap<T> add(FeatureMap<T> a, const FeatureMap<T>& b) {
    detail::require(a.same_shape(b), "add: shape mismatch");
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
    return a;
}

}  // namespace hsiu::ulnsa
