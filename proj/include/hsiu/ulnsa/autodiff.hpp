#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace hsiu::ad {

// Scalar reverse-mode differentiation on a thread-local tape.
//
// Every arithmetic result records at most two parents and the local partial
// derivatives. backward() sweeps the tape once in reverse. Only used by the
// gradient checker; the production forward pass runs on plain doubles.

struct Node {
    std::int32_t a = -1;
    std::int32_t b = -1;
    double da = 0.0;
    double db = 0.0;
};

class Tape {
public:
    std::int32_t push(std::int32_t a, double da, std::int32_t b, double db) {
        nodes_.push_back({a, b, da, db});
        return static_cast<std::int32_t>(nodes_.size() - 1);
    }
    std::int32_t leaf() { return push(-1, 0.0, -1, 0.0); }

    /// Adjoints of every node for d(output)/d(node).
    std::vector<double> backward(std::int32_t output) const {
        std::vector<double> adj(nodes_.size(), 0.0);
        adj[output] = 1.0;
        for (std::int32_t i = output; i >= 0; --i) {
            const double g = adj[i];
            if (g == 0.0) continue;
            const Node& n = nodes_[i];
            if (n.a >= 0) adj[n.a] += g * n.da;
            if (n.b >= 0) adj[n.b] += g * n.db;
        }
        return adj;
    }

    void clear() { nodes_.clear(); }
    std::size_t size() const noexcept { return nodes_.size(); }

    static Tape& current() {
        thread_local Tape tape;
        return tape;
    }

private:
    std::vector<Node> nodes_;
};

/// Differentiable scalar. index < 0 marks a constant.
struct Var {
    double v = 0.0;
    std::int32_t id = -1;

    Var() = default;
    Var(double value) : v(value) {}  // NOLINT: implicit constants keep the kernels generic
    Var(double value, std::int32_t index) : v(value), id(index) {}

    static Var input(double value) { return {value, Tape::current().leaf()}; }
};

namespace detail {

inline Var unary(double value, const Var& a, double da) {
    if (a.id < 0) return Var(value);
    return {value, Tape::current().push(a.id, da, -1, 0.0)};
}

inline Var binary(double value, const Var& a, double da, const Var& b, double db) {
    if (a.id < 0 && b.id < 0) return Var(value);
    if (a.id < 0) return {value, Tape::current().push(b.id, db, -1, 0.0)};
    if (b.id < 0) return {value, Tape::current().push(a.id, da, -1, 0.0)};
    return {value, Tape::current().push(a.id, da, b.id, db)};
}

}  // namespace detail

inline Var operator+(const Var& a, const Var& b) { return detail::binary(a.v + b.v, a, 1.0, b, 1.0); }
inline Var operator-(const Var& a, const Var& b) { return detail::binary(a.v - b.v, a, 1.0, b, -1.0); }
inline Var operator*(const Var& a, const Var& b) { return detail::binary(a.v * b.v, a, b.v, b, a.v); }
inline Var operator/(const Var& a, const Var& b) {
    const double q = a.v / b.v;
    return detail::binary(q, a, 1.0 / b.v, b, -q / b.v);
}
inline Var operator-(const Var& a) { return detail::unary(-a.v, a, -1.0); }

inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }
inline Var& operator/=(Var& a, const Var& b) { return a = a / b; }

inline Var exp(const Var& a) {
    const double e = std::exp(a.v);
    return detail::unary(e, a, e);
}
inline Var sqrt(const Var& a) {
    const double s = std::sqrt(a.v);
    return detail::unary(s, a, 0.5 / s);
}
inline Var erf(const Var& a) {
    return detail::unary(std::erf(a.v), a, 2.0 / std::sqrt(std::numbers::pi) * std::exp(-a.v * a.v));
}

inline double value_of(const Var& a) { return a.v; }

}  // namespace hsiu::ad

namespace hsiu {

/// Plain value of a kernel scalar (identity for double).
inline double value_of(double x) { return x; }
using ad::value_of;

}  // namespace hsiu
