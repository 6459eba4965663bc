#include <doctest.h>

#include <cmath>
#include <vector>

#include "oscihom/quadrature.hpp"

using namespace oscihom;

TEST_CASE("gauss rules integrate polynomials of degree 2n-1 exactly") {
    for (int n : {2, 4, 8}) {
        GaussRule r = gauss_rule(n);
        // monomials t^k on [-1,1]
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double got = 0.0;
            for (int i = 0; i < r.n; ++i) got += r.weights[i] * std::pow(r.nodes[i], k);
            double expect = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
            CHECK(got == doctest::Approx(expect).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(gauss_rule(3), DomainError);
}

TEST_CASE("gk15 on a smooth integrand") {
    double err = 0.0;
    double v = gk15([](double t) { return std::cos(t); }, 0.0, 1.0, err);
    CHECK(v == doctest::Approx(std::sin(1.0)).epsilon(1e-14));
    CHECK(err < 1e-10);
}

TEST_CASE("adaptive_gk resolves a kink") {
    std::int64_t nodes = 0;
    double v = adaptive_gk([](double t) { return std::fabs(t - 0.3); }, 0.0, 1.0, 1e-12, 40,
                           &nodes);
    // antiderivative oracle: 0.3^2/2 + 0.7^2/2
    CHECK(v == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-11));
    CHECK(nodes > 15);
}

TEST_CASE("pairwise summation is deterministic and accurate") {
    std::vector<double> v(100000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / double(i + 1);
    double a = pairwise_sum(v);
    double b = pairwise_sum(v);
    CHECK(a == b); // bitwise
    // compare against long-double reference
    long double ref = 0.0L;
    for (double x : v) ref += (long double)x;
    CHECK(a == doctest::Approx(double(ref)).epsilon(1e-14));
}
