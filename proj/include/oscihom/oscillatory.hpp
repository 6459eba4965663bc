#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "oscihom/averaging.hpp"
#include "oscihom/geometry.hpp"
#include "oscihom/periodic_field.hpp"

namespace oscihom {

// integral of g(y, y/eps) over the curve, arclength panels of length
// <= eps/ppw, each resolved adaptively; the value is certified by
// doubling ppw until two levels agree to 1e-8 relative.
double surface_integral(const Curve& c, const PeriodicField& f, double epsilon,
                        int ppw = 16, std::int64_t node_cap = 100000000,
                        double cert_rel_tol = 1e-8);

struct GeometricSchedule {
    double eps0 = 0.1;
    double ratio = 0.7;
    int count = 25;
};

// Picks eps so that (z . nu)/eps falls on the prescribed torus-loop
// phases of the flat part with normal m/|m| through z. Each phase gets
// `per_phase` epsilon values at or below eps_start.
struct PhaseTargetedSchedule {
    Vec2 z{0, 0};
    std::array<long long, 2> m{0, 1};
    std::vector<double> phases;
    double eps_start = 1e-2;
    int per_phase = 3;
};

using Schedule = std::variant<GeometricSchedule, PhaseTargetedSchedule>;

struct EpsilonSweep {
    std::vector<double> epsilons; // strictly decreasing
    std::vector<double> values;
    std::vector<double> realized_phases; // empty for geometric schedules
    int tail_window = 6;
    double band_lower = 0.0;
    double band_upper = 0.0;
    double tol_conv = 0.0;
    bool converged = false;
};

EpsilonSweep epsilon_sweep(const Curve& c, const PeriodicField& f, const Schedule& schedule,
                           int ppw = 16, int tail_window = 6, double tol_conv = 1e-2,
                           std::int64_t node_cap = 100000000);

struct PartBounds {
    bool flat_rational = false; // loop band used (rational or undetermined flat)
    std::size_t first_segment = 0;
    std::size_t segment_count = 0;
    double length = 0.0;
    double lower = 0.0;
    double mean = 0.0;
    double upper = 0.0;
    bool flagged = false; // Undetermined normal: approximant band
};

struct HomogenizedBounds {
    double lower = 0.0; // integral of the pointwise lower envelope
    double mean = 0.0;  // integral of the cell average
    double upper = 0.0;
    bool iddc_holds = true;
    bool flagged = false;
    std::vector<PartBounds> parts;
};

HomogenizedBounds homogenized_bounds(const Curve& c, const PeriodicField& f,
                                     long long Q = 10000, double tol = 1e-9,
                                     const TripleOptions& opts = {});

struct SandwichVerdict {
    bool pass = false;
    double lower_margin = 0.0; // band_lower - (bounds.lower - slack)
    double upper_margin = 0.0; // (bounds.upper + slack) - band_upper
    double slack = 0.0;
};

SandwichVerdict sandwich_check(const EpsilonSweep& sweep, const HomogenizedBounds& bounds,
                               double slack);

// Covering-cube diagnostic: compares the finite plane average over cubes
// of size rho_eps against the local directional mean along the curve and
// reports the worst deviation.
struct CoveringDiagnostic {
    double eps = 0.0;
    double rho = 0.0;
    double max_deviation = 0.0;
    int cubes = 0;
};

CoveringDiagnostic covering_diagnostic(const Curve& c, const PeriodicField& f, double epsilon,
                                       std::int64_t node_cap = 100000000);

} // namespace oscihom
