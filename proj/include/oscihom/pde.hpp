#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "oscihom/geometry.hpp"
#include "oscihom/periodic_field.hpp"

namespace oscihom {

// Dirichlet problem on a disk via the closed-form Poisson kernel, with an
// optional interior line measure handled through the disk Green function.
class DiskSolver {
public:
    DiskSolver(Vec2 center, double radius);

    Vec2 center() const { return center_; }
    double radius() const { return radius_; }

    // u(x) for boundary datum g(y, y/eps); non-oscillating data are fields
    // with empty y-mask (eps is then irrelevant).
    double solve(const PeriodicField& g, double epsilon, Vec2 x, int ppw = 16,
                 std::int64_t node_cap = 100000000) const;

    // contribution of a line source f(y, y/eps) dsigma on gamma0 (strictly
    // inside the disk) through the Green function
    double interior_term(const Curve& gamma0, const PeriodicField& f, double epsilon,
                         Vec2 x, int ppw = 16, std::int64_t node_cap = 100000000) const;

private:
    Vec2 center_;
    double radius_;
};

// Harmonic profile in the slab {-R1 < x.nu < R2} with constant datum M on
// the lower face and 1-periodic g(y1) on the upper face. For nu = e1 the
// limit is a one-parameter family u = M + (A - M)(x.nu + R1)/(R1 + R2);
// otherwise the unique limit uses A = mean of g.
enum class SlabLimit { Lower, Mean, Upper, EnergyMin };

class SlabSolver {
public:
    SlabSolver(const Direction& nu, double R1, double R2, double M,
               const PeriodicField& g);

    double g_min() const { return g_min_; }
    double g_max() const { return g_max_; }
    double g_mean() const { return g_mean_; }
    bool face_is_e1() const { return is_e1_; }

    // the constant A selected by the limit kind (Lower -> min g,
    // Upper -> max g, Mean -> mean, EnergyMin -> M clamped to [min, max];
    // all collapse to g(0) when R2 = 0, and to the mean when nu != e1)
    double boundary_constant(SlabLimit which) const;

    double solve(const double* x, SlabLimit which) const;
    double solve_with_constant(const double* x, double A) const;

private:
    Direction nu_;
    double R1_, R2_, M_;
    bool is_e1_ = false;
    double g_min_ = 0.0, g_max_ = 0.0, g_mean_ = 0.0, g_at0_ = 0.0;
};

// Interior Laplace Dirichlet solver on a closed C^1 curve: double-layer
// representation, midpoint Nystrom on a uniform arclength mesh, dense LU
// factored once. Curve normals must point outward.
class BemDirichlet {
public:
    BemDirichlet(const Curve& curve, int panels);

    int panels() const { return int(nodes_.size()); }
    double rcond() const { return rcond_; }

    // datum sampled pointwise on the boundary
    double solve(const std::function<double(Vec2)>& datum, Vec2 x) const;

    // datum g(y, y/eps); the oscillation enters only the right-hand side,
    // resolved on a fine auxiliary mesh, so the factored matrix is reused
    // across epsilon
    double solve_oscillating(const PeriodicField& g, double epsilon, Vec2 x,
                             int fine_ppw = 8, std::int64_t node_cap = 100000000) const;

    struct Node {
        Vec2 p, n;
        double kappa, w;
    };
    const std::vector<Node>& nodes() const { return nodes_; }

private:
    Eigen::VectorXd density_for(const Eigen::VectorXd& rhs) const;
    Curve curve_;
    std::vector<Node> nodes_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double rcond_ = 0.0;
};

// Interior Neumann problem via the single-layer ansatz and the deflated
// second-kind equation (I/2 + K*) phi = g; datum must be compatible
// (zero boundary integral); the solution is normalized to zero boundary
// mean.
class NeumannSolver {
public:
    NeumannSolver(const Curve& curve, int panels);

    int panels() const { return int(nodes_.size()); }

    double solve(const std::function<double(Vec2)>& datum, Vec2 x) const;
    double solve_oscillating(const PeriodicField& g, double epsilon, Vec2 x,
                             int fine_ppw = 8, std::int64_t node_cap = 100000000) const;

private:
    Curve curve_;
    std::vector<BemDirichlet::Node> nodes_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_; // deflated operator
    double total_len_ = 0.0;
    double boundary_mean(const Eigen::VectorXd& phi) const;
};

// fine oscillation-resolving boundary mesh shared by the solvers
struct FineNode {
    Vec2 p, n;
    double kappa, w;
};
std::vector<FineNode> fine_boundary_nodes(const Curve& c, double h_max,
                                          std::int64_t node_cap);

} // namespace oscihom
