#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oscihom/errors.hpp"
#include "oscihom/expr.hpp"

namespace oscihom {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

enum class DirClass { Rational, Irrational, Undetermined };

// Unit vector with its rationality classification relative to a denominator
// bound Q and a tolerance. For Rational and Undetermined the best coprime
// integer approximant m and its direction distance are recorded.
struct Direction {
    int dim = 2;
    std::array<double, 3> nu{0, 0, 0};
    DirClass cls = DirClass::Irrational;
    std::array<long long, 3> m{0, 0, 0};
    long long denom_bound = 0;
    double tol = 0.0;
    double approx_dist = 0.0; // |nu - m/|m|| for the best approximant found

    Vec2 nu2() const { return {nu[0], nu[1]}; }
};

// Classify v (dim 2 or 3) as Rational/Irrational/Undetermined. The search
// over coprime m with max|m_i| <= Q walks, per unit of the dominant
// component, the integer points nearest the ray through v; this agrees
// with exhaustive search whenever sqrt(dim)*Q*tol < 1/2 (the defaults are
// far inside that regime). Undetermined is reported in the narrow fragile
// band tol < d_best <= tol*(1+promotion_margin).
Direction classify_direction(const double* v, int dim, long long Q = 10000,
                             double tol = 1e-9, double promotion_margin = 1e-6);
Direction classify_direction(Vec2 v, long long Q = 10000, double tol = 1e-9,
                             double promotion_margin = 1e-6);

// ---------------------------------------------------------------------------
// Curves

enum class SegmentKind { Line, Arc, Graph };

// A C^1 parametric piece, parametrized by arclength s in [0, length()].
class Segment {
public:
    virtual ~Segment() = default;
    virtual SegmentKind kind() const = 0;
    virtual double length() const = 0;
    virtual Vec2 point(double s) const = 0;
    virtual Vec2 tangent(double s) const = 0; // unit
    // signed parametric curvature (x'y'' - y'x'') / |gamma'|^3
    virtual double curvature(double s) const = 0;
    Vec2 start() const { return point(0.0); }
    Vec2 end() const { return point(length()); }
};

class LineSegment final : public Segment {
public:
    LineSegment(Vec2 p0, Vec2 p1);
    SegmentKind kind() const override { return SegmentKind::Line; }
    double length() const override { return len_; }
    Vec2 point(double s) const override { return p0_ + s * dir_; }
    Vec2 tangent(double) const override { return dir_; }
    double curvature(double) const override { return 0.0; }

private:
    Vec2 p0_, dir_;
    double len_;
};

class ArcSegment final : public Segment {
public:
    ArcSegment(Vec2 center, double radius, double angle0, double angle1);
    SegmentKind kind() const override { return SegmentKind::Arc; }
    double length() const override { return len_; }
    Vec2 point(double s) const override;
    Vec2 tangent(double s) const override;
    double curvature(double) const override { return sweep_ > 0 ? 1.0 / radius_ : -1.0 / radius_; }

private:
    Vec2 center_;
    double radius_, angle0_, sweep_, len_;
};

// y = phi(x) on [a,b] (a < b), traversed with increasing x. phi comes from
// the shared expression grammar in the variable x1; dphi is optional and
// replaced by a central difference with step 1e-6 when absent.
class GraphSegment final : public Segment {
public:
    GraphSegment(const std::string& phi, double a, double b,
                 std::optional<std::string> dphi = std::nullopt);
    SegmentKind kind() const override { return SegmentKind::Graph; }
    double length() const override { return len_; }
    Vec2 point(double s) const override;
    Vec2 tangent(double s) const override;
    double curvature(double s) const override;

    double phi(double x) const;
    double dphi(double x) const;

private:
    double x_of_s(double s) const;

    Expr phi_;
    std::optional<Expr> dphi_;
    double a_, b_, len_;
    std::vector<double> cum_; // cumulative arclength at table edges
    int table_n_;
};

enum class Orientation { CW, CCW };

// Piecewise-C^1 oriented plane curve. Consecutive pieces must share
// endpoints to 1e-12. The normal is the tangent rotated by -90 degrees
// ("cw", the outward normal of a counterclockwise-traversed boundary) or
// +90 degrees ("ccw").
class Curve {
public:
    Curve(std::vector<std::shared_ptr<const Segment>> segments, Orientation orientation);

    std::size_t size() const { return segs_.size(); }
    const Segment& segment(std::size_t i) const { return *segs_[i]; }
    Orientation orientation() const { return orient_; }
    double length() const { return total_len_; }
    bool closed() const { return closed_; }

    Vec2 normal_from_tangent(Vec2 t) const {
        return orient_ == Orientation::CW ? Vec2{t.y, -t.x} : Vec2{-t.y, t.x};
    }
    Vec2 normal(std::size_t i, double s) const {
        return normal_from_tangent(segs_[i]->tangent(s));
    }
    // signed curvature consistent with normal(): positive when the curve
    // bends away from the normal side
    double curvature_signed(std::size_t i, double s) const {
        double k = segs_[i]->curvature(s);
        return orient_ == Orientation::CW ? k : -k;
    }

    // Lipschitz constant of the declared C^1 modulus tau(s) = L*s.
    double modulus_lipschitz() const { return modulus_L_; }

private:
    std::vector<std::shared_ptr<const Segment>> segs_;
    Orientation orient_;
    double total_len_ = 0.0;
    double modulus_L_ = 0.0;
    bool closed_ = false;
};

struct FlatPart {
    std::size_t first_segment;
    std::size_t segment_count;
    Direction direction; // the shared classified normal
    double length;
};

struct FlatDecomposition {
    std::vector<FlatPart> parts;
    double flat_length = 0.0;
    double residual_length = 0.0; // curved measure
    bool iddc_holds = true;       // no flat part has a Rational normal
};

FlatDecomposition flat_decomposition(const Curve& c, long long Q = 10000, double tol = 1e-9);

struct QuadNode {
    Vec2 point;
    Vec2 normal;
    double weight;
    std::size_t segment;
    double s;
};

// Composite Gauss-Legendre along arclength, sub-intervals of length <=
// h_max, nodes_per_interval in {2,4,8}. Weights sum to the arclength.
std::vector<QuadNode> quadrature_nodes(const Curve& c, double h_max,
                                       int nodes_per_interval = 4);

// Canned shapes used throughout the examples.
Curve make_segment_curve(Vec2 p0, Vec2 p1);
Curve make_circle(Vec2 center, double radius);
// Two vertical flats {+-R} x [-1,1] joined by radius-R arcs centered at
// (0, +-1); boundary of {|x1|<R, |x2| <= 1+sqrt(R^2-x1^2)}.
Curve make_stadium(double R);
Curve make_rotated_square(double angle, double side, Vec2 center = {0, 0});

} // namespace oscihom
