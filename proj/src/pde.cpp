#include "oscihom/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oscihom/errors.hpp"
#include "oscihom/quadrature.hpp"

namespace oscihom {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInv2Pi = 1.0 / (2.0 * kPi);

// double-layer kernel dPhi/dnu_y with Phi = -(1/2pi) ln|x-y|; the removable
// y -> x limit is -kappa/(4 pi)
inline double dl_kernel(Vec2 x, Vec2 y, Vec2 ny, double kappa) {
    Vec2 r = y - x;
    double r2 = dot(r, r);
    if (r2 < 1e-28) return -kappa / (4.0 * kPi);
    return -kInv2Pi * dot(ny, r) / r2;
}

// adjoint kernel dPhi/dnu_x, same removable limit
inline double dl_kernel_adj(Vec2 x, Vec2 y, Vec2 nx, double kappa) {
    Vec2 r = x - y;
    double r2 = dot(r, r);
    if (r2 < 1e-28) return -kappa / (4.0 * kPi);
    return -kInv2Pi * dot(nx, r) / r2;
}

inline double sl_kernel(Vec2 x, Vec2 y) {
    double r = norm(x - y);
    return -kInv2Pi * std::log(r);
}

// map global arclength to (segment, local s)
struct ArcIndex {
    explicit ArcIndex(const Curve& c) : c_(&c) {
        cum_.push_back(0.0);
        for (std::size_t i = 0; i < c.size(); ++i)
            cum_.push_back(cum_.back() + c.segment(i).length());
    }
    void locate(double s, std::size_t* seg, double* local) const {
        auto it = std::upper_bound(cum_.begin() + 1, cum_.end() - 1, s);
        *seg = std::size_t(it - cum_.begin() - 1);
        *local = s - cum_[*seg];
    }
    const Curve* c_;
    std::vector<double> cum_;
};

std::vector<BemDirichlet::Node> uniform_nodes(const Curve& c, int panels) {
    if (panels < 16) throw DomainError("bem: need at least 16 panels");
    if (!c.closed()) throw DomainError("bem: curve must be closed");
    ArcIndex idx(c);
    double L = c.length();
    double h = L / panels;
    std::vector<BemDirichlet::Node> nodes;
    nodes.resize(std::size_t(panels));
    for (int i = 0; i < panels; ++i) {
        std::size_t seg;
        double s;
        idx.locate((i + 0.5) * h, &seg, &s);
        nodes[std::size_t(i)].p = c.segment(seg).point(s);
        nodes[std::size_t(i)].n = c.normal(seg, s);
        nodes[std::size_t(i)].kappa = c.curvature_signed(seg, s);
        nodes[std::size_t(i)].w = h;
    }
    // outward-normal check via the divergence theorem: integral of x.n
    // over the boundary equals 2*area > 0 for outward normals
    double two_area = 0.0;
    for (const auto& nd : nodes) two_area += nd.w * dot(nd.p, nd.n);
    if (two_area <= 0.0)
        throw DomainError("bem: curve normals must point outward");
    return nodes;
}

} // namespace

std::vector<FineNode> fine_boundary_nodes(const Curve& c, double h_max,
                                          std::int64_t node_cap) {
    GaussRule gl = gauss_rule(4);
    std::vector<FineNode> out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Segment& seg = c.segment(i);
        double len = seg.length();
        std::int64_t panels = std::max<std::int64_t>(1, std::int64_t(std::ceil(len / h_max)));
        if (std::int64_t(out.size()) + panels * gl.n > node_cap)
            throw BudgetError("fine boundary mesh exceeds node budget");
        double h = len / double(panels);
        for (std::int64_t k = 0; k < panels; ++k)
            for (int q = 0; q < gl.n; ++q) {
                FineNode fn;
                double s = (k + 0.5 * (1.0 + gl.nodes[q])) * h;
                fn.p = seg.point(s);
                fn.n = c.normal(i, s);
                fn.kappa = c.curvature_signed(i, s);
                fn.w = 0.5 * h * gl.weights[q];
                out.push_back(fn);
            }
    }
    return out;
}

// ---------------------------------------------------------------------------
// DiskSolver

DiskSolver::DiskSolver(Vec2 center, double radius) : center_(center), radius_(radius) {
    if (!(radius > 0.0)) throw DomainError("disk: radius must be positive");
}

double DiskSolver::solve(const PeriodicField& g, double epsilon, Vec2 x, int ppw,
                         std::int64_t node_cap) const {
    double rx = norm(x - center_);
    if (rx >= radius_ * (1.0 - 1e-6))
        throw SolverError("disk: evaluation point too close to the boundary");
    if (!(epsilon > 0.0)) throw DomainError("disk: epsilon must be positive");

    const double dist = radius_ - rx;
    double h = dist / 4.0;
    if (g.y_mask() != 0) h = std::min(h, epsilon / ppw);
    std::int64_t panels =
        std::max<std::int64_t>(16, std::int64_t(std::ceil(2.0 * kPi * radius_ / h)));
    if (panels * 15 > node_cap) throw BudgetError("disk: node budget exceeded");

    auto fn = [&](double th) {
        Vec2 y = center_ + Vec2{radius_ * std::cos(th), radius_ * std::sin(th)};
        double P = (radius_ * radius_ - rx * rx) /
                   (2.0 * kPi * radius_ * dot(x - y, x - y));
        return P * g.eval2(y.x, y.y, y.x / epsilon, y.y / epsilon) * radius_;
    };
    double dth = 2.0 * kPi / double(panels);
    std::vector<double> parts(static_cast<std::size_t>(panels), 0.0);
    std::int64_t nodes = 0;
    for (std::int64_t k = 0; k < panels; ++k)
        parts[std::size_t(k)] = adaptive_gk(fn, k * dth, (k + 1) * dth, 1e-13, 12, &nodes);
    return pairwise_sum(parts);
}

double DiskSolver::interior_term(const Curve& gamma0, const PeriodicField& f,
                                 double epsilon, Vec2 x, int ppw,
                                 std::int64_t node_cap) const {
    if (!(epsilon > 0.0)) throw DomainError("disk: epsilon must be positive");
    // gamma0 must be compactly inside; also keep x off gamma0
    double min_dist_x = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < gamma0.size(); ++i) {
        const Segment& seg = gamma0.segment(i);
        int samples = 64;
        for (int k = 0; k <= samples; ++k) {
            Vec2 p = seg.point(seg.length() * k / samples);
            if (norm(p - center_) >= radius_ * (1.0 - 1e-9))
                throw DomainError("disk: interior curve touches the boundary");
            min_dist_x = std::min(min_dist_x, norm(p - x));
        }
    }
    if (min_dist_x < 1e-6)
        throw SolverError("disk: evaluation point lies on the interior curve");

    double h = std::min(min_dist_x / 2.0, 1.0);
    if (f.y_mask() != 0) h = std::min(h, epsilon / ppw);

    auto green = [&](Vec2 y) {
        Vec2 yc = y - center_;
        double ry = norm(yc);
        if (ry < 1e-14) {
            // y at the center: G = (1/2pi) ln(R/|x-y|)
            return kInv2Pi * std::log(radius_ / norm(x - y));
        }
        Vec2 ystar = center_ + (radius_ * radius_ / (ry * ry)) * yc;
        return kInv2Pi *
               std::log(norm(x - ystar) * ry / (radius_ * norm(x - y)));
    };

    std::vector<double> parts;
    std::int64_t nodes = 0;
    for (std::size_t i = 0; i < gamma0.size(); ++i) {
        const Segment& seg = gamma0.segment(i);
        double len = seg.length();
        std::int64_t panels = std::max<std::int64_t>(1, std::int64_t(std::ceil(len / h)));
        if (nodes + panels * 15 > node_cap)
            throw BudgetError("disk: node budget exceeded (interior term)");
        double ph = len / double(panels);
        auto fn = [&](double s) {
            Vec2 p = seg.point(s);
            return green(p) * f.eval2(p.x, p.y, p.x / epsilon, p.y / epsilon);
        };
        for (std::int64_t k = 0; k < panels; ++k)
            parts.push_back(adaptive_gk(fn, k * ph, (k + 1) * ph, 1e-13, 20, &nodes));
    }
    return pairwise_sum(parts);
}

// ---------------------------------------------------------------------------
// SlabSolver

SlabSolver::SlabSolver(const Direction& nu, double R1, double R2, double M,
                       const PeriodicField& g)
    : nu_(nu), R1_(R1), R2_(R2), M_(M) {
    if (!(R1 + R2 > 0.0)) throw DomainError("slab: R1 + R2 must be positive");
    if ((g.y_mask() & ~1u) != 0)
        throw DomainError("slab: datum must depend on y1 only");
    is_e1_ = std::fabs(std::fabs(nu.nu[0]) - 1.0) < 1e-15;

    double zero[3] = {0, 0, 0};
    g_mean_ = g.cell_average(zero);
    double y0[3] = {0, 0, 0};
    g_at0_ = g.eval(zero, y0);

    // extremes of g over one period: dense scan + golden refinement
    const int n = 8192;
    g_min_ = g_max_ = g_at0_;
    int imin = 0, imax = 0;
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) {
        double y[3] = {double(i) / n, 0, 0};
        vals[i] = g.eval(zero, y);
        if (vals[i] < g_min_) { g_min_ = vals[i]; imin = i; }
        if (vals[i] > g_max_) { g_max_ = vals[i]; imax = i; }
    }
    auto val_at = [&](double t) {
        double y[3] = {t, 0, 0};
        return g.eval(zero, y);
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int pass = 0; pass < 2; ++pass) {
        bool mx = pass == 1;
        double a = double((mx ? imax : imin) - 1) / n;
        double b = double((mx ? imax : imin) + 1) / n;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = val_at(c), fd = val_at(d);
        while (b - a > 1e-12) {
            bool keep_left = mx ? fc > fd : fc < fd;
            if (keep_left) {
                b = d; d = c; fd = fc;
                c = b - gr * (b - a);
                fc = val_at(c);
            } else {
                a = c; c = d; fc = fd;
                d = a + gr * (b - a);
                fd = val_at(d);
            }
        }
        double v = val_at(0.5 * (a + b));
        if (mx) g_max_ = std::max(g_max_, v);
        else g_min_ = std::min(g_min_, v);
    }
}

double SlabSolver::boundary_constant(SlabLimit which) const {
    if (!is_e1_) return g_mean_; // unique limit for nu != e1
    if (R2_ == 0.0) return g_at0_;
    switch (which) {
        case SlabLimit::Lower: return g_min_;
        case SlabLimit::Mean: return g_mean_;
        case SlabLimit::Upper: return g_max_;
        case SlabLimit::EnergyMin: return std::clamp(M_, g_min_, g_max_);
    }
    return g_mean_;
}

double SlabSolver::solve(const double* x, SlabLimit which) const {
    return solve_with_constant(x, boundary_constant(which));
}

double SlabSolver::solve_with_constant(const double* x, double A) const {
    double t = 0.0;
    for (int i = 0; i < nu_.dim; ++i) t += x[i] * nu_.nu[std::size_t(i)];
    if (t <= -R1_ - 1e-12 || t >= R2_ + 1e-12)
        throw DomainError("slab: point outside the slab");
    if (!is_e1_ && A != g_mean_)
        throw DomainError("slab: nu != e1 admits only the mean-datum limit");
    return M_ + (A - M_) * (t + R1_) / (R1_ + R2_);
}

// ---------------------------------------------------------------------------
// BemDirichlet

BemDirichlet::BemDirichlet(const Curve& curve, int panels) : curve_(curve) {
    nodes_ = uniform_nodes(curve, panels);
    const int n = int(nodes_.size());
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double k = (i == j) ? -nodes_[std::size_t(j)].kappa / (4.0 * kPi)
                                : dl_kernel(nodes_[std::size_t(i)].p, nodes_[std::size_t(j)].p,
                                            nodes_[std::size_t(j)].n, 0.0);
            A(i, j) = nodes_[std::size_t(j)].w * k;
        }
    A.diagonal().array() -= 0.5;
    lu_.compute(A);
    rcond_ = lu_.rcond();
    if (!(rcond_ > 1e-12))
        throw SolverError("bem: boundary operator ill-conditioned, rcond = " +
                          std::to_string(rcond_));
}

Eigen::VectorXd BemDirichlet::density_for(const Eigen::VectorXd& rhs) const {
    return lu_.solve(rhs);
}

double BemDirichlet::solve(const std::function<double(Vec2)>& datum, Vec2 x) const {
    const int n = int(nodes_.size());
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = datum(nodes_[std::size_t(i)].p);
    Eigen::VectorXd phi = density_for(rhs);
    double u = 0.0;
    for (int j = 0; j < n; ++j) {
        const Node& nd = nodes_[std::size_t(j)];
        u += nd.w * dl_kernel(x, nd.p, nd.n, nd.kappa) * phi(j);
    }
    return u;
}

double BemDirichlet::solve_oscillating(const PeriodicField& g, double epsilon, Vec2 x,
                                       int fine_ppw, std::int64_t node_cap) const {
    if (!(epsilon > 0.0)) throw DomainError("bem: epsilon must be positive");
    std::vector<FineNode> fine =
        fine_boundary_nodes(curve_, epsilon / fine_ppw, node_cap);
    std::vector<double> gval(fine.size());
    for (std::size_t q = 0; q < fine.size(); ++q)
        gval[q] = g.eval2(fine[q].p.x, fine[q].p.y, fine[q].p.x / epsilon,
                          fine[q].p.y / epsilon);

    // split phi = -2 g_eps + psi so the coarse system sees a smooth
    // right-hand side: (-I/2 + K) psi = 2 K g_eps
    const int n = int(nodes_.size());
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t q = 0; q < fine.size(); ++q)
            acc += fine[q].w *
                   dl_kernel(nodes_[std::size_t(i)].p, fine[q].p, fine[q].n, fine[q].kappa) *
                   gval[q];
        rhs(i) = 2.0 * acc;
    }
    Eigen::VectorXd psi = density_for(rhs);

    double u = 0.0;
    for (int j = 0; j < n; ++j) {
        const Node& nd = nodes_[std::size_t(j)];
        u += nd.w * dl_kernel(x, nd.p, nd.n, nd.kappa) * psi(j);
    }
    double ufine = 0.0;
    for (std::size_t q = 0; q < fine.size(); ++q)
        ufine += fine[q].w * dl_kernel(x, fine[q].p, fine[q].n, fine[q].kappa) * gval[q];
    return u - 2.0 * ufine;
}

// ---------------------------------------------------------------------------
// NeumannSolver

NeumannSolver::NeumannSolver(const Curve& curve, int panels) : curve_(curve) {
    nodes_ = uniform_nodes(curve, panels);
    total_len_ = curve.length();
    const int n = int(nodes_.size());
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double k = (i == j) ? -nodes_[std::size_t(i)].kappa / (4.0 * kPi)
                                : dl_kernel_adj(nodes_[std::size_t(i)].p,
                                                nodes_[std::size_t(j)].p,
                                                nodes_[std::size_t(i)].n, 0.0);
            B(i, j) = nodes_[std::size_t(j)].w * k;
        }
    B.diagonal().array() += 0.5;
    // deflate the constant nullspace: pick the density with zero mean
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) += nodes_[std::size_t(j)].w / total_len_;
    lu_.compute(B);
    if (!(lu_.rcond() > 1e-12))
        throw SolverError("neumann: deflated operator ill-conditioned");
}

double NeumannSolver::boundary_mean(const Eigen::VectorXd& phi) const {
    // single-layer trace at the coarse nodes, log-diagonal corrected
    const int n = int(nodes_.size());
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
        double ui = 0.0;
        for (int j = 0; j < n; ++j) {
            const auto& nj = nodes_[std::size_t(j)];
            if (i == j) {
                double h = nj.w;
                ui += -kInv2Pi * h * (std::log(0.5 * h) - 1.0) * phi(j);
            } else {
                ui += nj.w * sl_kernel(nodes_[std::size_t(i)].p, nj.p) * phi(j);
            }
        }
        mean += nodes_[std::size_t(i)].w * ui;
    }
    return mean / total_len_;
}

double NeumannSolver::solve(const std::function<double(Vec2)>& datum, Vec2 x) const {
    const int n = int(nodes_.size());
    Eigen::VectorXd rhs(n);
    double defect = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
        rhs(i) = datum(nodes_[std::size_t(i)].p);
        defect += nodes_[std::size_t(i)].w * rhs(i);
        scale += nodes_[std::size_t(i)].w * std::fabs(rhs(i));
    }
    if (std::fabs(defect) > 1e-8 * std::max(1.0, scale))
        throw DomainError("neumann: incompatible datum, boundary integral = " +
                          std::to_string(defect));
    Eigen::VectorXd phi = lu_.solve(rhs);
    double u = 0.0;
    for (int j = 0; j < n; ++j)
        u += nodes_[std::size_t(j)].w * sl_kernel(x, nodes_[std::size_t(j)].p) * phi(j);
    return u - boundary_mean(phi);
}

double NeumannSolver::solve_oscillating(const PeriodicField& g, double epsilon, Vec2 x,
                                        int fine_ppw, std::int64_t node_cap) const {
    if (!(epsilon > 0.0)) throw DomainError("neumann: epsilon must be positive");
    std::vector<FineNode> fine =
        fine_boundary_nodes(curve_, epsilon / fine_ppw, node_cap);
    std::vector<double> gval(fine.size());
    double defect = 0.0, scale = 0.0;
    for (std::size_t q = 0; q < fine.size(); ++q) {
        gval[q] = g.eval2(fine[q].p.x, fine[q].p.y, fine[q].p.x / epsilon,
                          fine[q].p.y / epsilon);
        defect += fine[q].w * gval[q];
        scale += fine[q].w * std::fabs(gval[q]);
    }
    if (std::fabs(defect) > 1e-8 * std::max(1.0, scale))
        throw DomainError("neumann: incompatible datum, boundary integral = " +
                          std::to_string(defect));

    // split phi = 2 g_eps + psi; the deflated coarse system solves
    // (I/2 + K* + deflation) psi = -2 K* g_eps - s, where s accounts for
    // the deflation term applied to the coarse samples of 2 g_eps
    const int n = int(nodes_.size());
    double s = 0.0;
    std::vector<double> gcoarse(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        const auto& nd = nodes_[std::size_t(j)];
        gcoarse[std::size_t(j)] =
            g.eval2(nd.p.x, nd.p.y, nd.p.x / epsilon, nd.p.y / epsilon);
        s += nd.w * 2.0 * gcoarse[std::size_t(j)] / total_len_;
    }
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t q = 0; q < fine.size(); ++q)
            acc += fine[q].w *
                   dl_kernel_adj(nodes_[std::size_t(i)].p, fine[q].p,
                                 nodes_[std::size_t(i)].n, nodes_[std::size_t(i)].kappa) *
                   gval[q];
        rhs(i) = -2.0 * acc - s;
    }
    Eigen::VectorXd psi = lu_.solve(rhs);

    // `self` marks a coarse on-boundary evaluation: its own logarithmic
    // panel gets the analytic midpoint integral instead of log(0)
    auto total_potential = [&](Vec2 pt, int self) {
        double u = 0.0;
        for (int j = 0; j < n; ++j) {
            const auto& nj = nodes_[std::size_t(j)];
            if (j == self) {
                double h = nj.w;
                u += -kInv2Pi * h * (std::log(0.5 * h) - 1.0) * psi(j);
            } else {
                u += nj.w * sl_kernel(pt, nj.p) * psi(j);
            }
        }
        for (std::size_t q = 0; q < fine.size(); ++q) {
            double r = norm(pt - fine[q].p);
            if (self >= 0 && r < 1e-12) continue;
            u += fine[q].w * (-kInv2Pi) * std::log(std::max(r, 1e-300)) * 2.0 * gval[q];
        }
        return u;
    };

    double u = total_potential(x, -1);
    // normalize to zero boundary mean using the coarse trace
    double mean = 0.0;
    for (int i = 0; i < n; ++i)
        mean += nodes_[std::size_t(i)].w * total_potential(nodes_[std::size_t(i)].p, i);
    return u - mean / total_len_;
}

} // namespace oscihom
