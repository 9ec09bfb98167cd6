#pragma once

// Dense reference implementations of the attention kernels on nested vectors.

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "hsiu/ulnsa/tensor.hpp"

namespace hsiu::oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.size(), std::vector<double>(b[0].size(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

inline Matrix transpose(const Matrix& a) {
    Matrix t(a[0].size(), std::vector<double>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
    return t;
}

/// Row-wise softmax without max subtraction.
inline Matrix softmax_rows(Matrix m) {
    for (auto& row : m) {
        double s = 0.0;
        for (double& v : row) s += (v = std::exp(v));
        for (double& v : row) v /= s;
    }
    return m;
}

inline Matrix weight_matrix(std::span<const float> w, int rows, int cols) {
    Matrix m(rows, std::vector<double>(cols));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m[i][j] = w[std::size_t(i) * cols + j];
    return m;
}

/// Tokens x channels matrix of a feature map.
inline Matrix token_matrix(const ulnsa::FeatureMap<double>& x) {
    Matrix m(x.tokens(), std::vector<double>(x.channels));
    for (int t = 0; t < x.tokens(); ++t)
        for (int c = 0; c < x.channels; ++c) m[t][c] = x.token(t)[c];
    return m;
}

inline Matrix columns(const Matrix& m, int c0, int n) {
    Matrix out(m.size(), std::vector<double>(n));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (int j = 0; j < n; ++j) out[i][j] = m[i][c0 + j];
    return out;
}

/// One group of windowed attention: softmax(Q K^T / sqrt(d) + P_h) V for every head.
inline Matrix attention_group(const Matrix& q, const Matrix& k, const Matrix& v,
                              const std::vector<Matrix>& pos, int head_dim) {
    const int heads = int(q[0].size()) / head_dim;
    Matrix out(q.size(), std::vector<double>(q[0].size()));
    for (int h = 0; h < heads; ++h) {
        const int c0 = h * head_dim;
        Matrix logits = matmul(columns(q, c0, head_dim), transpose(columns(k, c0, head_dim)));
        for (std::size_t i = 0; i < logits.size(); ++i)
            for (std::size_t j = 0; j < logits.size(); ++j)
                logits[i][j] = logits[i][j] / std::sqrt(double(head_dim)) +
                               (pos.empty() ? 0.0 : pos[h][i][j]);
        const Matrix a = matmul(softmax_rows(logits), columns(v, c0, head_dim));
        for (std::size_t i = 0; i < a.size(); ++i)
            for (int d = 0; d < head_dim; ++d) out[i][c0 + d] = a[i][d];
    }
    return out;
}

/// Spectral attention: per head, S = softmax over key channels of K^T Q / sqrt(d),
/// A = V S, then the output projection.
inline Matrix spectral(const Matrix& x, const Matrix& wq, const Matrix& wk, const Matrix& wv,
                       const Matrix& wp, int heads) {
    const Matrix q = matmul(x, wq), k = matmul(x, wk), v = matmul(x, wv);
    const int c = int(x[0].size()), d = c / heads;
    Matrix cat(x.size(), std::vector<double>(c));
    for (int h = 0; h < heads; ++h) {
        // Rows of S^T are query channels, so a row softmax normalizes over key channels.
        Matrix st = matmul(transpose(columns(q, h * d, d)), columns(k, h * d, d));
        for (auto& row : st)
            for (double& e : row) e /= std::sqrt(double(d));
        const Matrix s = transpose(softmax_rows(st));
        const Matrix a = matmul(columns(v, h * d, d), s);
        for (std::size_t t = 0; t < x.size(); ++t)
            for (int j = 0; j < d; ++j) cat[t][h * d + j] = a[t][j];
    }
    return matmul(cat, wp);
}

inline std::vector<float> random_weights(std::size_t n, std::uint64_t seed, double scale = 0.5) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<float> w(n);
    for (float& v : w) v = float(u(gen));
    return w;
}

inline ulnsa::FeatureMap<double> random_features(int h, int w, int c, std::uint64_t seed,
                                                 double scale = 1.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    ulnsa::FeatureMap<double> x(h, w, c);
    for (double& v : x.data) v = u(gen);
    return x;
}

}  // namespace hsiu::oracle
