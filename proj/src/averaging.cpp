#include "oscihom/averaging.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "oscihom/quadrature.hpp"

namespace oscihom {

namespace {

constexpr double kPi = 3.14159265358979323846;

inline double mod1(double t) {
    double r = t - std::floor(t);
    return r < 1.0 ? r : 0.0;
}

// streaming pairwise summation (binary counter of partial sums)
class PairwiseAcc {
public:
    void add(double v) {
        for (std::size_t lvl = 0;; ++lvl) {
            if (lvl == parts_.size()) {
                parts_.push_back(v);
                occ_.push_back(true);
                return;
            }
            if (!occ_[lvl]) {
                parts_[lvl] = v;
                occ_[lvl] = true;
                return;
            }
            v += parts_[lvl];
            occ_[lvl] = false;
        }
    }
    double total() const {
        double s = 0.0;
        for (std::size_t i = 0; i < parts_.size(); ++i)
            if (occ_[i]) s += parts_[i];
        return s;
    }

private:
    std::vector<double> parts_;
    std::vector<bool> occ_;
};

double golden_min(const std::function<double(double)>& f, double a, double b, double tol,
                  bool maximize, double* arg) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    auto better = [&](double u, double v) { return maximize ? u > v : u < v; };
    while (b - a > tol) {
        if (better(fc, fd)) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    *arg = 0.5 * (a + b);
    return better(fc, fd) ? fc : fd;
}

} // namespace

WeylSum weyl_average(const PeriodicField& h, const std::vector<double>& nu_prime,
                     long long N, std::uint64_t seed, std::int64_t exact_cap) {
    const int d = int(nu_prime.size());
    if (d < 1 || d > 2) throw DomainError("weyl_average: d must be 1 or 2");
    if (N < 1) throw DomainError("weyl_average: N must be >= 1");

    WeylSum out;
    out.nu_prime = nu_prime;
    out.N = N;
    double zero[3] = {0, 0, 0};
    out.target = h.cell_average(zero);

    const std::int64_t side = 2 * N + 1;
    const std::int64_t full = d == 1 ? side : side * side;

    auto eval_at = [&](double a) {
        double y[3] = {a, 0.0, 0.0};
        return h.eval(zero, y);
    };

    PairwiseAcc acc;
    if (full <= exact_cap) {
        if (d == 1) {
            for (long long k = -N; k <= N; ++k) acc.add(eval_at(mod1(k * nu_prime[0])));
        } else {
            for (long long k1 = -N; k1 <= N; ++k1)
                for (long long k2 = -N; k2 <= N; ++k2)
                    acc.add(eval_at(mod1(k1 * nu_prime[0] + k2 * nu_prime[1])));
        }
        out.points = full;
        out.value = acc.total() / double(full);
    } else {
        out.sampled = true;
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<long long> pick(-N, N);
        out.points = exact_cap;
        for (std::int64_t i = 0; i < exact_cap; ++i) {
            double a = pick(rng) * nu_prime[0];
            if (d == 2) a += pick(rng) * nu_prime[1];
            acc.add(eval_at(mod1(a)));
        }
        out.value = acc.total() / double(exact_cap);
    }
    return out;
}

AveragingTriple directional_triple(const PeriodicField& f, const double* z,
                                   const Direction& dir, const TripleOptions& opts) {
    AveragingTriple t;
    if (dir.cls == DirClass::Irrational) {
        t.mechanism = TripleMechanism::Foliation;
        t.mean = f.cell_average(z, opts.cell_grid);
        t.lower = t.upper = t.mean;
        return t;
    }
    if (dir.dim != 2)
        throw DomainError("directional_triple: rational directions only supported in n = 2");

    t.m = {dir.m[0], dir.m[1]};
    t.mean = f.cell_average(z, opts.cell_grid);

    const double mlen = std::sqrt(double(t.m[0]) * t.m[0] + double(t.m[1]) * t.m[1]);
    const double period = 1.0 / mlen;
    auto loop_at = [&](double c) {
        return f.loop_average(z, TorusLoop(t.m[0], t.m[1], c), opts.quad_per_unit);
    };

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double arg_lo = 0.0, arg_hi = 0.0;
    const int P = opts.phase_grid;
    for (int i = 0; i < P; ++i) {
        double c = period * i / P;
        double v = loop_at(c);
        if (v < lo) { lo = v; arg_lo = c; }
        if (v > hi) { hi = v; arg_hi = c; }
    }

    if (dir.cls == DirClass::Undetermined) {
        t.mechanism = TripleMechanism::Degenerate;
        t.flagged = true;
        t.lower = lo;
        t.upper = hi;
        t.phase_argmin = arg_lo;
        t.phase_argmax = arg_hi;
        return t;
    }

    t.mechanism = TripleMechanism::RationalLoop;
    double cell = period / P;
    double v_lo = golden_min(loop_at, arg_lo - cell, arg_lo + cell, opts.phase_tol, false,
                             &arg_lo);
    double v_hi = golden_min(loop_at, arg_hi - cell, arg_hi + cell, opts.phase_tol, true,
                             &arg_hi);
    t.lower = std::min(lo, v_lo);
    t.upper = std::max(hi, v_hi);
    t.phase_argmin = arg_lo - period * std::floor(arg_lo / period);
    t.phase_argmax = arg_hi - period * std::floor(arg_hi / period);
    return t;
}

ScalePair scale_pair(double epsilon, double L) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("scale_pair: need 0 < eps < 1");
    if (!(L > 0.0)) throw DomainError("scale_pair: need L > 0");
    ScalePair sp;
    sp.epsilon = epsilon;
    sp.L = L;
    double tau_eps = L * epsilon;
    sp.M = std::sqrt(std::min(1.0 / tau_eps, 1.0 / epsilon));
    sp.rho = epsilon * sp.M;
    // direct check of the covering estimate; for linear moduli it can fail
    // at moderate eps, the flag records the outcome
    double lhs = sp.M * (L * epsilon * sp.M);
    double rhs = std::sqrt(L * std::sqrt(epsilon));
    sp.invariant_ok = lhs <= rhs + 1e-15;
    return sp;
}

double plane_average_finite(const PeriodicField& f, const double* z, const Direction& dir,
                            double epsilon, double r, int ppw, std::int64_t node_cap) {
    if (!(epsilon > 0.0) || !(r > 0.0))
        throw DomainError("plane_average_finite: eps and r must be positive");
    const double h = epsilon / std::max(ppw, 1);

    if (dir.dim == 2) {
        Vec2 zc{z[0], z[1]};
        Vec2 n = dir.nu2();
        Vec2 tg{-n.y, n.x};
        // clip the line z + t*tg against the square Q_r(z)
        double tmin = -std::numeric_limits<double>::infinity();
        double tmax = std::numeric_limits<double>::infinity();
        auto clip = [&](double comp) {
            if (std::fabs(comp) < 1e-15) return;
            double a = -r / comp, b = r / comp;
            if (a > b) std::swap(a, b);
            tmin = std::max(tmin, a);
            tmax = std::min(tmax, b);
        };
        clip(tg.x);
        clip(tg.y);
        double len = tmax - tmin;
        std::int64_t panels = std::int64_t(std::ceil(len / h));
        if (panels * 15 > node_cap)
            throw BudgetError("plane_average_finite: node budget exceeded");
        double ph = len / double(panels);
        std::vector<double> parts(static_cast<std::size_t>(panels), 0.0);
        std::int64_t nodes = 0;
        auto fn = [&](double t) {
            Vec2 p = zc + t * tg;
            return f.eval2(zc.x, zc.y, p.x / epsilon, p.y / epsilon);
        };
        for (std::int64_t i = 0; i < panels; ++i)
            parts[std::size_t(i)] = adaptive_gk(fn, tmin + i * ph, tmin + (i + 1) * ph,
                                                1e-11 * ph, 12, &nodes);
        return pairwise_sum(parts) / len;
    }

    // dim == 3: polar tensor quadrature on the disk of radius r in the plane
    std::array<double, 3> n{dir.nu[0], dir.nu[1], dir.nu[2]};
    // orthonormal in-plane basis
    std::array<double, 3> a{1, 0, 0};
    if (std::fabs(n[0]) > 0.9) a = {0, 1, 0};
    std::array<double, 3> e1{n[1] * a[2] - n[2] * a[1], n[2] * a[0] - n[0] * a[2],
                             n[0] * a[1] - n[1] * a[0]};
    double e1n = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    for (auto& c : e1) c /= e1n;
    std::array<double, 3> e2{n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2],
                             n[0] * e1[1] - n[1] * e1[0]};

    std::int64_t nr = std::max<std::int64_t>(8, std::int64_t(std::ceil(r / h)));
    std::int64_t nth = std::max<std::int64_t>(32, std::int64_t(std::ceil(2.0 * kPi * r / h)));
    GaussRule gl = gauss_rule(4);
    if (nr * gl.n * nth > node_cap)
        throw BudgetError("plane_average_finite: node budget exceeded (3d)");

    double hr = r / double(nr);
    double hth = 2.0 * kPi / double(nth);
    std::vector<double> parts;
    parts.reserve(std::size_t(nr) * gl.n);
    for (std::int64_t i = 0; i < nr; ++i)
        for (int q = 0; q < gl.n; ++q) {
            double rho = (i + 0.5 * (1.0 + gl.nodes[q])) * hr;
            double wr = 0.5 * hr * gl.weights[q] * rho;
            double ring = 0.0;
            for (std::int64_t k = 0; k < nth; ++k) {
                double th = (k + 0.5) * hth;
                double c = std::cos(th), s = std::sin(th);
                double y[3] = {(z[0] + rho * (c * e1[0] + s * e2[0])) / epsilon,
                               (z[1] + rho * (c * e1[1] + s * e2[1])) / epsilon,
                               (z[2] + rho * (c * e1[2] + s * e2[2])) / epsilon};
                ring += f.eval(z, y);
            }
            parts.push_back(wr * ring * hth);
        }
    double integral = pairwise_sum(parts);
    return integral / (kPi * r * r);
}

} // namespace oscihom
