#include <doctest.h>

#include <cmath>
#include <random>

#include "oscihom/periodic_field.hpp"

using namespace oscihom;

namespace {
const double kPi = 3.14159265358979323846;
const double zero3[3] = {0, 0, 0};
} // namespace

TEST_CASE("eval reduces the fast variable mod 1") {
    PeriodicField g("abs(sin(pi*y1)*sin(pi*y2))");
    double y[3] = {0.5, 0.5, 0};
    CHECK(g.eval(zero3, y) == doctest::Approx(1.0));
    y[0] = 1.5;
    CHECK(g.eval(zero3, y) == doctest::Approx(1.0));

    PeriodicField s("sin(2*pi*y1)^2");
    double y2[3] = {0.25, 0.9, 0};
    CHECK(s.eval(zero3, y2) == doctest::Approx(1.0));

    // periodicity under random integer shift, random points
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> ki(-5, 5);
    for (int trial = 0; trial < 50; ++trial) {
        double p[3] = {u(rng), u(rng), 0};
        double q[3] = {p[0] + ki(rng), p[1] + ki(rng), 0};
        CHECK(g.eval(zero3, p) == doctest::Approx(g.eval(zero3, q)).epsilon(1e-12));
    }
}

TEST_CASE("anchors are never reduced") {
    PeriodicField g("x1 + y1");
    double x[3] = {2.5, 0, 0};
    double y[3] = {1.25, 0, 0};
    CHECK(g.eval(x, y) == doctest::Approx(2.75)); // y1 -> 0.25, x1 stays 2.5
}

TEST_CASE("cell averages against closed forms") {
    PeriodicField g("abs(sin(pi*y1)*sin(pi*y2))");
    CHECK(g.cell_average(zero3) == doctest::Approx(4.0 / (kPi * kPi)).epsilon(1e-8));

    PeriodicField c7("7");
    CHECK(c7.cell_average(zero3) == doctest::Approx(7.0));

    PeriodicField s("sin(2*pi*y1)^2"); // antiderivative oracle: 1/2
    CHECK(s.cell_average(zero3) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("torus loop geometry") {
    TorusLoop l(1, 2, 0.1);
    CHECK(l.length == doctest::Approx(std::sqrt(5.0)));
    auto t = l.tangent();
    auto n = l.normal();
    CHECK(t[0] * n[0] + t[1] * n[1] == doctest::Approx(0.0));
    // closing up after one traversal (mod Z^2)
    auto p0 = l.point(0.0);
    auto p1 = l.point(l.length);
    CHECK(std::remainder(p1[0] - p0[0], 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::remainder(p1[1] - p0[1], 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(TorusLoop(2, 4, 0.0), DomainError);
}

TEST_CASE("loop averages against closed forms") {
    PeriodicField gy1("sin(2*pi*y1)^2");
    PeriodicField gy2("sin(2*pi*y2)^2");
    PeriodicField gss("abs(sin(pi*y1)*sin(pi*y2))");

    // m=(1,0): loop runs in y2 at fixed y1 = phase
    CHECK(gy1.loop_average(zero3, TorusLoop(1, 0, 0.0)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(gy1.loop_average(zero3, TorusLoop(1, 0, 0.3)) ==
          doctest::Approx(std::pow(std::sin(2 * kPi * 0.3), 2)).epsilon(1e-10));
    CHECK(gy2.loop_average(zero3, TorusLoop(1, 0, 0.77)) == doctest::Approx(0.5).epsilon(1e-10));

    for (double a : {0.0, 0.25, 0.5, 0.8}) {
        CHECK(gss.loop_average(zero3, TorusLoop(1, 0, a)) ==
              doctest::Approx(2.0 / kPi * std::fabs(std::sin(kPi * a))).epsilon(1e-9));
    }

    CHECK_THROWS_AS(gy1.loop_average(zero3, TorusLoop(1, 0, 0.0), 8), DomainError);
}

TEST_CASE("loop identification: phase shifts by 1/|m| coincide") {
    PeriodicField g("abs(sin(pi*y1)*sin(pi*y2)) + cos(2*pi*y1)*0.25");
    double period = 1.0 / std::sqrt(5.0);
    double a = g.loop_average(zero3, TorusLoop(1, 2, 0.13));
    double b = g.loop_average(zero3, TorusLoop(1, 2, 0.13 + period));
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("y-independent fields collapse everywhere") {
    PeriodicField g("x1^2 + 3");
    double x[3] = {2.0, 0, 0};
    double y[3] = {0.123, 0.456, 0};
    CHECK(g.eval(x, y) == doctest::Approx(7.0));
    CHECK(g.cell_average(x) == doctest::Approx(7.0));
    CHECK(g.loop_average(x, TorusLoop(1, 0, 0.2)) == doctest::Approx(7.0));
}

TEST_CASE("layered density: phase-averaged loop reproduces the cell average") {
    PeriodicField g("abs(sin(pi*y1))"); // depends on y1 only
    // loop m=(0,1) is transverse to the layers
    int P = 64;
    double acc = 0.0;
    for (int i = 0; i < P; ++i)
        acc += g.loop_average(zero3, TorusLoop(0, 1, double(i) / P));
    CHECK(acc / P == doctest::Approx(g.cell_average(zero3)).epsilon(1e-6));
}
