#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "oscihom/expr.hpp"

namespace oscihom {

// Closed geodesic of the 2-torus orthogonal to the rational direction
// m/|m|: the line {w . m/|m| = phase} traversed once, arclength |m|.
struct TorusLoop {
    TorusLoop(long long p, long long q, double phase);

    std::array<long long, 2> m;
    double phase;   // reduced into [0, 1/|m|)
    double length;  // sqrt(p^2+q^2)

    std::array<double, 2> normal() const;  // m/|m|
    std::array<double, 2> tangent() const; // (-q, p)/|m|
    std::array<double, 2> start() const;   // phase * normal
    std::array<double, 2> point(double t) const;
};

// Density g(x, y): arbitrary in the anchor x, 1-periodic in y. The fast
// variable is reduced mod 1 componentwise before evaluation; anchors never
// are.
class PeriodicField {
public:
    explicit PeriodicField(const std::string& source);
    static PeriodicField constant(double c);

    double eval(const double* x, const double* y) const;
    double eval2(double x1, double x2, double y1, double y2) const;

    bool depends_on_x() const { return expr_.x_mask() != 0; }
    unsigned y_mask() const { return expr_.y_mask(); }
    // number of y coordinates spanned (index of highest used y, min 1)
    int y_dim() const;
    const std::string& source() const { return expr_.source(); }

    // Mean of g(x, .) over the unit cell, tensor Gauss-Legendre with
    // grid panels per axis and 8 nodes per panel; the grid is doubled
    // until two consecutive levels agree to 1e-8 (grid <= 1024, else
    // AccuracyError).
    double cell_average(const double* x, int grid = 2) const;

    // Mean of g(x_anchor, .) along a closed torus geodesic; composite
    // Gauss-Kronrod with quad_per_unit base panels per unit arclength,
    // adaptively refined (the corpus densities have |.| kinks).
    double loop_average(const double* x_anchor, const TorusLoop& loop,
                        int quad_per_unit = 64) const;

private:
    Expr expr_;
};

} // namespace oscihom
