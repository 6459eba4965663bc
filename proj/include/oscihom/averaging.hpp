#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "oscihom/geometry.hpp"
#include "oscihom/periodic_field.hpp"

namespace oscihom {

// Lattice average (1/|I_N|) sum_{k in I_N} h(a_k), a_k = sum k_i nu_i mod 1,
// against the target integral of h over one period.
struct WeylSum {
    std::vector<double> nu_prime;
    long long N = 0;
    double value = 0.0;
    double target = 0.0;
    bool sampled = false;      // true when a randomized sub-lattice was used
    std::int64_t points = 0;   // lattice points actually evaluated
};

// h must be a field in the single variable y1; d = nu_prime.size() in {1,2}.
// The full lattice is enumerated while (2N+1)^d <= exact_cap; beyond that a
// seeded uniform sub-sample of exact_cap points is used and labeled.
WeylSum weyl_average(const PeriodicField& h, const std::vector<double>& nu_prime,
                     long long N, std::uint64_t seed = 0,
                     std::int64_t exact_cap = std::int64_t(1) << 26);

enum class TripleMechanism { Foliation, RationalLoop, Degenerate };

// (g_lower, g_mean, g_upper) at an anchor point for one direction.
struct AveragingTriple {
    double lower = 0.0;
    double mean = 0.0;
    double upper = 0.0;
    TripleMechanism mechanism = TripleMechanism::Foliation;
    std::array<long long, 2> m{0, 0};
    double phase_argmax = 0.0;
    double phase_argmin = 0.0;
    bool flagged = false; // Undetermined direction: band is the approximant's
};

struct TripleOptions {
    int phase_grid = 256;      // uniform scan of [0, 1/|m|)
    double phase_tol = 1e-8;   // golden-section refinement stop
    int quad_per_unit = 64;
    int cell_grid = 2;
};

// Rational directions get the phase-optimized loop band, irrational ones
// collapse onto the cell average, Undetermined ones report the approximant
// band and are flagged.
AveragingTriple directional_triple(const PeriodicField& f, const double* z,
                                   const Direction& dir, const TripleOptions& opts = {});

// Covering-cube scales for a curve with linear C^1 modulus tau(s) = L*s.
struct ScalePair {
    double epsilon = 0.0;
    double M = 0.0;   // sqrt(min(1/tau(eps), 1/eps))
    double rho = 0.0; // eps*M
    double L = 0.0;
    bool invariant_ok = false; // M*tau(eps*M) <= sqrt(tau(sqrt(eps)))
};

ScalePair scale_pair(double epsilon, double L);

// Average of g(z, y/eps) over the plane through z with the given normal,
// clipped to the cube Q_r(z); a segment in 2D, a disk cross-section (polar
// tensor quadrature, area-normalized) in 3D.
double plane_average_finite(const PeriodicField& f, const double* z, const Direction& dir,
                            double epsilon, double r, int ppw = 16,
                            std::int64_t node_cap = 100000000);

} // namespace oscihom
