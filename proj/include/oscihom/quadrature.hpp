#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "oscihom/errors.hpp"

namespace oscihom {

// Gauss-Legendre nodes/weights on [-1,1].
struct GaussRule {
    const double* nodes;
    const double* weights;
    int n;
};

GaussRule gauss_rule(int n); // n in {2,4,8}, throws DomainError otherwise

namespace detail {
// 7-point Gauss / 15-point Kronrod pair on [-1,1].
extern const double kKronrodX[15];
extern const double kKronrodW[15];
extern const double kGauss7W[7]; // weights matching kKronrodX[1,3,...,13]
} // namespace detail

// Deterministic pairwise summation; associativity is fixed by index order.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

// Gauss-Kronrod estimate of integral of f over [a,b]; err receives the
// usual |G7-K15| based error bound.
template <class F>
double gk15(F&& f, double a, double b, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double k15 = 0.0, g7 = 0.0;
    double fv[15];
    for (int i = 0; i < 15; ++i) {
        fv[i] = f(c + h * detail::kKronrodX[i]);
        k15 += detail::kKronrodW[i] * fv[i];
    }
    for (int i = 0; i < 7; ++i) g7 += detail::kGauss7W[i] * fv[2 * i + 1];
    k15 *= h;
    g7 *= h;
    double diff = std::fabs(k15 - g7);
    err = std::min(diff, std::pow(200.0 * diff, 1.5));
    return k15;
}

// Adaptive bisection built on gk15. Absolute tolerance; depth-limited.
// node_count, when non-null, is incremented by the number of f evaluations.
template <class F>
double adaptive_gk(F&& f, double a, double b, double abs_tol, int max_depth = 24,
                   std::int64_t* node_count = nullptr) {
    struct Item { double a, b, tol; int depth; };
    std::vector<Item> stack;
    stack.push_back({a, b, abs_tol, 0});
    double total = 0.0;
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        double err;
        double v = gk15(f, it.a, it.b, err);
        if (node_count) *node_count += 15;
        if (err <= it.tol || it.depth >= max_depth) {
            total += v;
        } else {
            double m = 0.5 * (it.a + it.b);
            stack.push_back({it.a, m, 0.5 * it.tol, it.depth + 1});
            stack.push_back({m, it.b, 0.5 * it.tol, it.depth + 1});
        }
    }
    return total;
}

} // namespace oscihom
