#include "oscihom/periodic_field.hpp"

#include <cmath>
#include <numeric>

#include "oscihom/quadrature.hpp"

namespace oscihom {

namespace {

inline double mod1(double t) {
    double r = t - std::floor(t);
    return r < 1.0 ? r : 0.0;
}

long long gcdll(long long a, long long b) {
    a = std::llabs(a);
    b = std::llabs(b);
    while (b) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace

TorusLoop::TorusLoop(long long p, long long q, double c) : m{p, q} {
    if (p == 0 && q == 0) throw DomainError("torus loop needs a nonzero integer vector");
    if (gcdll(p, q) != 1) throw DomainError("torus loop integer vector must be coprime");
    length = std::sqrt(double(p) * double(p) + double(q) * double(q));
    double period = 1.0 / length;
    phase = c - period * std::floor(c / period);
    if (phase >= period) phase = 0.0;
}

std::array<double, 2> TorusLoop::normal() const {
    return {double(m[0]) / length, double(m[1]) / length};
}

std::array<double, 2> TorusLoop::tangent() const {
    return {-double(m[1]) / length, double(m[0]) / length};
}

std::array<double, 2> TorusLoop::start() const {
    auto n = normal();
    return {phase * n[0], phase * n[1]};
}

std::array<double, 2> TorusLoop::point(double t) const {
    auto s = start();
    auto tg = tangent();
    return {s[0] + t * tg[0], s[1] + t * tg[1]};
}

PeriodicField::PeriodicField(const std::string& source) : expr_(Expr::parse(source)) {}

PeriodicField PeriodicField::constant(double c) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", c);
    std::string s = buf;
    if (!s.empty() && s[0] == '-') s = "0" + s; // parser handles unary minus, keep canonical
    return PeriodicField(s);
}

double PeriodicField::eval(const double* x, const double* y) const {
    double yr[3] = {mod1(y[0]), mod1(y[1]), mod1(y[2])};
    return expr_.eval(x, yr);
}

double PeriodicField::eval2(double x1, double x2, double y1, double y2) const {
    double xs[3] = {x1, x2, 0.0};
    double ys[3] = {mod1(y1), mod1(y2), 0.0};
    return expr_.eval(xs, ys);
}

int PeriodicField::y_dim() const {
    unsigned m = expr_.y_mask();
    if (m & 4u) return 3;
    if (m & 2u) return 2;
    return 1;
}

double PeriodicField::cell_average(const double* x, int grid) const {
    if (grid < 2) throw DomainError("cell_average: grid must be >= 2");
    unsigned mask = expr_.y_mask();
    if (mask == 0) {
        double y0[3] = {0, 0, 0};
        return expr_.eval(x, y0);
    }
    // integrate only over the y coordinates the expression uses
    int dims[3];
    int nd = 0;
    for (int i = 0; i < 3; ++i)
        if (mask & (1u << i)) dims[nd++] = i;

    GaussRule gl = gauss_rule(8);
    auto level = [&](int g) {
        double h = 1.0 / g;
        int per_axis = g * gl.n;
        std::vector<double> node(per_axis), wt(per_axis);
        for (int p = 0; p < g; ++p)
            for (int j = 0; j < gl.n; ++j) {
                node[p * gl.n + j] = (p + 0.5 * (1.0 + gl.nodes[j])) * h;
                wt[p * gl.n + j] = 0.5 * h * gl.weights[j];
            }
        double y[3] = {0, 0, 0};
        std::vector<double> acc;
        if (nd == 1) {
            acc.resize(per_axis);
            for (int a = 0; a < per_axis; ++a) {
                y[dims[0]] = node[a];
                acc[a] = wt[a] * expr_.eval(x, y);
            }
        } else if (nd == 2) {
            acc.resize(std::size_t(per_axis) * per_axis);
            for (int a = 0; a < per_axis; ++a) {
                y[dims[0]] = node[a];
                for (int b = 0; b < per_axis; ++b) {
                    y[dims[1]] = node[b];
                    acc[std::size_t(a) * per_axis + b] = wt[a] * wt[b] * expr_.eval(x, y);
                }
            }
        } else {
            acc.resize(std::size_t(per_axis) * per_axis * per_axis);
            std::size_t k = 0;
            for (int a = 0; a < per_axis; ++a) {
                y[dims[0]] = node[a];
                for (int b = 0; b < per_axis; ++b) {
                    y[dims[1]] = node[b];
                    for (int c = 0; c < per_axis; ++c) {
                        y[dims[2]] = node[c];
                        acc[k++] = wt[a] * wt[b] * wt[c] * expr_.eval(x, y);
                    }
                }
            }
        }
        return pairwise_sum(acc);
    };

    double prev = level(grid);
    for (int g = 2 * grid; g <= 1024; g *= 2) {
        double cur = level(g);
        if (std::fabs(cur - prev) < 1e-8) return cur;
        prev = cur;
    }
    throw AccuracyError("cell_average failed the Richardson check up to grid=1024 for '" +
                        expr_.source() + "'");
}

double PeriodicField::loop_average(const double* x_anchor, const TorusLoop& loop,
                                   int quad_per_unit) const {
    if (quad_per_unit < 16) throw DomainError("loop_average: quad_per_unit must be >= 16");
    const double len = loop.length;
    const int panels = int(std::ceil(quad_per_unit * len));
    const double h = len / panels;
    auto s0 = loop.start();
    auto tg = loop.tangent();
    auto f = [&](double t) {
        double y[3] = {mod1(s0[0] + t * tg[0]), mod1(s0[1] + t * tg[1]), 0.0};
        return expr_.eval(x_anchor, y);
    };
    std::vector<double> parts(panels);
    const double tol = 1e-12 * std::max(1.0, len) / panels;
    for (int p = 0; p < panels; ++p)
        parts[p] = adaptive_gk(f, p * h, (p + 1) * h, tol, 18);
    return pairwise_sum(parts) / len;
}

} // namespace oscihom
