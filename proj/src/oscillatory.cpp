#include "oscihom/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oscihom/quadrature.hpp"

namespace oscihom {

namespace {

// one pass at a fixed ppw: composite adaptive panels along arclength;
// *tol_floor accumulates the per-panel tolerances so the caller knows the
// achievable agreement level
double surface_integral_pass(const Curve& c, const PeriodicField& f, double epsilon,
                             int ppw, std::int64_t node_cap, std::int64_t* nodes,
                             double* tol_floor) {
    const double h_max = epsilon / ppw;
    std::vector<double> parts;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Segment& seg = c.segment(i);
        const double len = seg.length();
        std::int64_t panels = std::max<std::int64_t>(1, std::int64_t(std::ceil(len / h_max)));
        if (*nodes + panels * 15 > node_cap)
            throw BudgetError("surface_integral: node budget exceeded");
        const double ph = len / double(panels);
        // panel tolerance scales with panel length, so the accumulated
        // floor stays ~1e-10 per unit arclength at any depth
        const double panel_tol = std::max(1e-16, std::min(1e-13, 1e-10 * ph));
        *tol_floor += panel_tol * double(panels);
        auto fn = [&](double s) {
            Vec2 p = seg.point(s);
            return f.eval2(p.x, p.y, p.x / epsilon, p.y / epsilon);
        };
        for (std::int64_t k = 0; k < panels; ++k) {
            parts.push_back(adaptive_gk(fn, k * ph, (k + 1) * ph, panel_tol, 12, nodes));
            if (*nodes > node_cap) throw BudgetError("surface_integral: node budget exceeded");
        }
    }
    return pairwise_sum(parts);
}

} // namespace

double surface_integral(const Curve& c, const PeriodicField& f, double epsilon, int ppw,
                        std::int64_t node_cap, double cert_rel_tol) {
    if (!(epsilon > 0.0)) throw DomainError("surface_integral: epsilon must be positive");
    if (ppw < 8) throw DomainError("surface_integral: ppw must be >= 8");

    if (!f.depends_on_x() && f.y_mask() == 0) {
        // constant density: no oscillation to resolve
        double zero[2] = {0, 0};
        return f.eval(zero, zero) * c.length();
    }

    std::int64_t nodes = 0;
    double floor_prev = 0.0;
    double prev = surface_integral_pass(c, f, epsilon, ppw, node_cap, &nodes, &floor_prev);
    for (int round = 0; round < 3; ++round) {
        ppw *= 2;
        double floor_cur = 0.0;
        double cur =
            surface_integral_pass(c, f, epsilon, ppw, node_cap, &nodes, &floor_cur);
        // two levels cannot agree better than the sum of their tolerance floors
        double agree = std::max(cert_rel_tol * std::max(1.0, std::fabs(cur)),
                                2.0 * (floor_prev + floor_cur));
        if (std::fabs(cur - prev) <= agree) return cur;
        prev = cur;
        floor_prev = floor_cur;
    }
    throw AccuracyError("surface_integral: no stability under panel refinement");
}

EpsilonSweep epsilon_sweep(const Curve& c, const PeriodicField& f, const Schedule& schedule,
                           int ppw, int tail_window, double tol_conv,
                           std::int64_t node_cap) {
    EpsilonSweep sw;
    sw.tail_window = tail_window;
    sw.tol_conv = tol_conv;

    if (const auto* g = std::get_if<GeometricSchedule>(&schedule)) {
        if (!(g->eps0 > 0.0) || !(g->ratio > 0.0 && g->ratio < 1.0) || g->count < 1)
            throw DomainError("epsilon_sweep: invalid geometric schedule");
        double e = g->eps0;
        for (int j = 0; j < g->count; ++j, e *= g->ratio) sw.epsilons.push_back(e);
    } else {
        const auto& p = std::get<PhaseTargetedSchedule>(schedule);
        if (p.phases.empty() || p.per_phase < 1 || !(p.eps_start > 0.0))
            throw DomainError("epsilon_sweep: invalid phase-targeted schedule");
        long long mgcd = std::gcd(std::llabs(p.m[0]), std::llabs(p.m[1]));
        if (mgcd != 1) throw DomainError("epsilon_sweep: schedule direction must be coprime");
        const double mlen = std::hypot(double(p.m[0]), double(p.m[1]));
        const double period = 1.0 / mlen;
        const double d = (p.z.x * p.m[0] + p.z.y * p.m[1]) / mlen; // offset along nu
        std::vector<std::pair<double, double>> pool; // (eps, phase)
        for (double c0 : p.phases) {
            double cr = c0 - period * std::floor(c0 / period); // into [0, period)
            if (std::fabs(d) < 1e-14) {
                if (cr > 1e-12 && period - cr > 1e-12)
                    throw DomainError(
                        "epsilon_sweep: offset 0 reaches only phase 0 on this flat");
                double e = p.eps_start;
                for (int j = 0; j < p.per_phase; ++j, e *= 0.5) pool.push_back({e, 0.0});
                continue;
            }
            double da = std::fabs(d);
            // eps = |d| / (cr + k*period) <= eps_start
            double k0 = std::ceil((da / p.eps_start - cr) / period);
            if (cr + k0 * period <= 0.0) k0 += 1.0;
            for (int j = 0; j < p.per_phase; ++j) {
                double e = da / (cr + (k0 + j) * period);
                pool.push_back({e, cr});
            }
        }
        std::sort(pool.begin(), pool.end(),
                  [](auto a, auto b) { return a.first > b.first; });
        for (auto& [e, cr] : pool) {
            if (!sw.epsilons.empty() && sw.epsilons.back() - e < 1e-18) continue;
            sw.epsilons.push_back(e);
            sw.realized_phases.push_back(cr);
        }
    }

    for (double e : sw.epsilons)
        sw.values.push_back(surface_integral(c, f, e, ppw, node_cap));

    int W = std::min<int>(tail_window, int(sw.values.size()));
    sw.band_lower = *std::min_element(sw.values.end() - W, sw.values.end());
    sw.band_upper = *std::max_element(sw.values.end() - W, sw.values.end());
    sw.converged = (sw.band_upper - sw.band_lower) < tol_conv;
    return sw;
}

HomogenizedBounds homogenized_bounds(const Curve& c, const PeriodicField& f, long long Q,
                                     double tol, const TripleOptions& opts) {
    FlatDecomposition fd = flat_decomposition(c, Q, tol);
    HomogenizedBounds hb;
    hb.iddc_holds = fd.iddc_holds;

    std::vector<char> in_rational_flat(c.size(), 0);
    for (const FlatPart& fp : fd.parts) {
        if (fp.direction.cls == DirClass::Irrational) continue;
        PartBounds pb;
        pb.flat_rational = true;
        pb.first_segment = fp.first_segment;
        pb.segment_count = fp.segment_count;
        pb.length = fp.length;
        for (std::size_t k = 0; k < fp.segment_count; ++k)
            in_rational_flat[fp.first_segment + k] = 1;
        if (!f.depends_on_x()) {
            Vec2 z = c.segment(fp.first_segment).point(0.0);
            double zz[2] = {z.x, z.y};
            AveragingTriple t = directional_triple(f, zz, fp.direction, opts);
            pb.lower = t.lower * fp.length;
            pb.mean = t.mean * fp.length;
            pb.upper = t.upper * fp.length;
            pb.flagged = t.flagged;
        } else {
            // integrate the pointwise triple along the part (GL4, 8 panels/segment)
            for (std::size_t k = 0; k < fp.segment_count; ++k) {
                const Segment& seg = c.segment(fp.first_segment + k);
                GaussRule gl = gauss_rule(4);
                int panels = 8;
                double ph = seg.length() / panels;
                for (int pnl = 0; pnl < panels; ++pnl)
                    for (int q = 0; q < gl.n; ++q) {
                        double s = (pnl + 0.5 * (1.0 + gl.nodes[q])) * ph;
                        double w = 0.5 * ph * gl.weights[q];
                        Vec2 z = seg.point(s);
                        double zz[2] = {z.x, z.y};
                        AveragingTriple t = directional_triple(f, zz, fp.direction, opts);
                        pb.lower += w * t.lower;
                        pb.mean += w * t.mean;
                        pb.upper += w * t.upper;
                        pb.flagged = pb.flagged || t.flagged;
                    }
            }
        }
        hb.parts.push_back(pb);
    }

    // remainder: irrational normals a.e., triple collapses to the cell average
    PartBounds rest;
    rest.flat_rational = false;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (in_rational_flat[i]) continue;
        const Segment& seg = c.segment(i);
        rest.length += seg.length();
        if (!f.depends_on_x()) continue; // handled below in one shot
        GaussRule gl = gauss_rule(4);
        int panels = 16;
        double ph = seg.length() / panels;
        for (int pnl = 0; pnl < panels; ++pnl)
            for (int q = 0; q < gl.n; ++q) {
                double s = (pnl + 0.5 * (1.0 + gl.nodes[q])) * ph;
                double w = 0.5 * ph * gl.weights[q];
                Vec2 z = seg.point(s);
                double zz[2] = {z.x, z.y};
                rest.mean += w * f.cell_average(zz, opts.cell_grid);
            }
    }
    if (!f.depends_on_x() && rest.length > 0.0) {
        double zz[2] = {0, 0};
        rest.mean = f.cell_average(zz, opts.cell_grid) * rest.length;
    }
    rest.lower = rest.upper = rest.mean;
    if (rest.length > 0.0) hb.parts.push_back(rest);

    for (const PartBounds& pb : hb.parts) {
        hb.lower += pb.lower;
        hb.mean += pb.mean;
        hb.upper += pb.upper;
        hb.flagged = hb.flagged || pb.flagged;
    }
    return hb;
}

SandwichVerdict sandwich_check(const EpsilonSweep& sweep, const HomogenizedBounds& bounds,
                               double slack) {
    SandwichVerdict v;
    v.slack = slack;
    v.lower_margin = sweep.band_lower - (bounds.lower - slack);
    v.upper_margin = (bounds.upper + slack) - sweep.band_upper;
    v.pass = v.lower_margin >= 0.0 && v.upper_margin >= 0.0;
    return v;
}

CoveringDiagnostic covering_diagnostic(const Curve& c, const PeriodicField& f, double epsilon,
                                       std::int64_t node_cap) {
    CoveringDiagnostic diag;
    diag.eps = epsilon;
    double L = std::max(c.modulus_lipschitz(), 1e-6);
    ScalePair sp = scale_pair(epsilon, L);
    diag.rho = sp.rho;

    // sample curve centers one covering cube apart
    std::vector<QuadNode> centers = quadrature_nodes(c, sp.rho, 2);
    for (std::size_t i = 0; i < centers.size(); i += 2) { // every other GL2 node
        const QuadNode& n = centers[i];
        Direction dir = classify_direction(n.normal);
        double zz[2] = {n.point.x, n.point.y};
        double local = plane_average_finite(f, zz, dir, epsilon, 0.5 * sp.rho, 16, node_cap);
        AveragingTriple t = directional_triple(f, zz, dir);
        double dev = 0.0;
        if (local < t.lower) dev = t.lower - local;
        if (local > t.upper) dev = std::max(dev, local - t.upper);
        diag.max_deviation = std::max(diag.max_deviation, dev);
        ++diag.cubes;
        if (diag.cubes >= 64) break; // diagnostic, not production
    }
    return diag;
}

} // namespace oscihom
