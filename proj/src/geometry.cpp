#include "oscihom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "oscihom/quadrature.hpp"

namespace oscihom {

namespace {

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

double dist_dir(const double* nu, const long long* m, int dim) {
    double n2 = 0.0;
    for (int i = 0; i < dim; ++i) n2 += double(m[i]) * double(m[i]);
    double inv = 1.0 / std::sqrt(n2);
    double d2 = 0.0;
    for (int i = 0; i < dim; ++i) {
        double diff = nu[i] - m[i] * inv;
        d2 += diff * diff;
    }
    return std::sqrt(d2);
}

} // namespace

Direction classify_direction(const double* v, int dim, long long Q, double tol,
                             double promotion_margin) {
    if (dim != 2 && dim != 3) throw DomainError("classify_direction: dim must be 2 or 3");
    if (Q < 1) throw DomainError("classify_direction: Q must be >= 1");
    if (tol < 0) throw DomainError("classify_direction: tol must be >= 0");
    double n2 = 0.0;
    for (int i = 0; i < dim; ++i) n2 += v[i] * v[i];
    if (n2 == 0.0) throw DomainError("classify_direction: zero vector");
    double inv = 1.0 / std::sqrt(n2);

    Direction d;
    d.dim = dim;
    for (int i = 0; i < dim; ++i) d.nu[i] = v[i] * inv;
    d.denom_bound = Q;
    d.tol = tol;

    int j = 0;
    for (int i = 1; i < dim; ++i)
        if (std::fabs(d.nu[i]) > std::fabs(d.nu[j])) j = i;

    double best = std::numeric_limits<double>::infinity();
    double best_norm2 = 0.0;
    std::array<long long, 3> best_m{0, 0, 0};
    const long long off[5] = {0, -1, 1, -2, 2};
    for (long long k = 1; k <= Q; ++k) {
        double s = double(k) / std::fabs(d.nu[j]);
        long long base[3] = {0, 0, 0};
        for (int i = 0; i < dim; ++i) base[i] = std::llround(s * d.nu[i]);
        // walk the lattice points nearest the ray; the dominant component
        // is pinned, the others are perturbed by up to 2
        int free_axes[2];
        int nf = 0;
        for (int i = 0; i < dim; ++i)
            if (i != j) free_axes[nf++] = i;
        int count0 = 5;
        int count1 = (dim == 3) ? 5 : 1;
        for (int a = 0; a < count0; ++a)
            for (int b = 0; b < count1; ++b) {
                long long m[3] = {base[0], base[1], base[2]};
                m[free_axes[0]] += off[a];
                if (dim == 3) m[free_axes[1]] += off[b];
                long long g = 0;
                long long maxc = 0;
                bool nonzero = false;
                for (int i = 0; i < dim; ++i) {
                    maxc = std::max(maxc, std::llabs(m[i]));
                    if (m[i] != 0) nonzero = true;
                }
                if (!nonzero || maxc > Q) continue;
                g = gcdll(m[0], m[1]);
                if (dim == 3) g = gcdll(g, m[2]);
                long long mc[3] = {m[0] / g, m[1] / g, m[2] / g};
                double dist = dist_dir(d.nu.data(), mc, dim);
                double nrm2 = 0.0;
                for (int i = 0; i < dim; ++i) nrm2 += double(mc[i]) * double(mc[i]);
                if (dist < best - 1e-18 ||
                    (std::fabs(dist - best) <= 1e-18 && nrm2 < best_norm2)) {
                    best = dist;
                    best_norm2 = nrm2;
                    for (int i = 0; i < dim; ++i) best_m[i] = mc[i];
                }
            }
    }

    d.m = best_m;
    d.approx_dist = best;
    if (best <= tol)
        d.cls = DirClass::Rational;
    else if (best <= tol * (1.0 + promotion_margin))
        d.cls = DirClass::Undetermined;
    else
        d.cls = DirClass::Irrational;
    return d;
}

Direction classify_direction(Vec2 v, long long Q, double tol, double promotion_margin) {
    double a[2] = {v.x, v.y};
    return classify_direction(a, 2, Q, tol, promotion_margin);
}

// ---------------------------------------------------------------------------

LineSegment::LineSegment(Vec2 p0, Vec2 p1) : p0_(p0) {
    Vec2 diff = p1 - p0;
    len_ = norm(diff);
    if (len_ <= 0.0) throw DomainError("line segment has zero length");
    dir_ = (1.0 / len_) * diff;
}

ArcSegment::ArcSegment(Vec2 center, double radius, double angle0, double angle1)
    : center_(center), radius_(radius), angle0_(angle0), sweep_(angle1 - angle0) {
    if (radius <= 0.0) throw DomainError("arc radius must be positive");
    if (sweep_ == 0.0) throw DomainError("arc has zero sweep");
    len_ = radius_ * std::fabs(sweep_);
}

Vec2 ArcSegment::point(double s) const {
    double th = angle0_ + (sweep_ > 0 ? s : -s) / radius_;
    return center_ + radius_ * Vec2{std::cos(th), std::sin(th)};
}

Vec2 ArcSegment::tangent(double s) const {
    double th = angle0_ + (sweep_ > 0 ? s : -s) / radius_;
    Vec2 t{-std::sin(th), std::cos(th)};
    return sweep_ > 0 ? t : -1.0 * t;
}

GraphSegment::GraphSegment(const std::string& phi, double a, double b,
                           std::optional<std::string> dphi)
    : phi_(Expr::parse(phi)), a_(a), b_(b) {
    if (!(b > a)) throw DomainError("graph segment needs a < b");
    if (dphi) dphi_ = Expr::parse(*dphi);
    // cumulative arclength table, one GK15 panel per table cell
    table_n_ = 2048;
    cum_.resize(table_n_ + 1);
    cum_[0] = 0.0;
    double h = (b_ - a_) / table_n_;
    auto speed = [&](double x) {
        double t = this->dphi(x);
        return std::sqrt(1.0 + t * t);
    };
    for (int i = 0; i < table_n_; ++i) {
        double err;
        cum_[i + 1] = cum_[i] + gk15(speed, a_ + i * h, a_ + (i + 1) * h, err);
    }
    len_ = cum_[table_n_];
    if (!(len_ > 0.0) || !std::isfinite(len_))
        throw DomainError("graph segment has invalid arclength");
}

double GraphSegment::phi(double x) const {
    double xs[3] = {x, 0, 0};
    double ys[3] = {0, 0, 0};
    return phi_.eval(xs, ys);
}

double GraphSegment::dphi(double x) const {
    if (dphi_) {
        double xs[3] = {x, 0, 0};
        double ys[3] = {0, 0, 0};
        return dphi_->eval(xs, ys);
    }
    const double h = 1e-6;
    return (phi(x + h) - phi(x - h)) / (2.0 * h);
}

double GraphSegment::x_of_s(double s) const {
    s = std::clamp(s, 0.0, len_);
    auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    int i = std::clamp(int(it - cum_.begin()) - 1, 0, table_n_ - 1);
    double h = (b_ - a_) / table_n_;
    double x = a_ + i * h + (s - cum_[i]) / std::max(cum_[i + 1] - cum_[i], 1e-300) * h;
    // Newton on cumulative arclength; the table cell brackets the root
    for (int it2 = 0; it2 < 30; ++it2) {
        double t = dphi(x);
        double sp = std::sqrt(1.0 + t * t);
        // local arclength from cell edge to x
        double err;
        double xa = a_ + i * h;
        double si = cum_[i] + gk15([&](double u) {
                        double du = dphi(u);
                        return std::sqrt(1.0 + du * du);
                    }, xa, x, err);
        double delta = (si - s) / sp;
        x -= delta;
        x = std::clamp(x, xa, xa + h);
        if (std::fabs(delta) < 1e-13 * std::max(1.0, std::fabs(x))) break;
    }
    return x;
}

Vec2 GraphSegment::point(double s) const {
    double x = x_of_s(s);
    return {x, phi(x)};
}

Vec2 GraphSegment::tangent(double s) const {
    double x = x_of_s(s);
    double t = dphi(x);
    double inv = 1.0 / std::sqrt(1.0 + t * t);
    return {inv, t * inv};
}

double GraphSegment::curvature(double s) const {
    double x = x_of_s(s);
    const double h = 1e-6;
    double ddphi = (dphi(x + h) - dphi(x - h)) / (2.0 * h);
    double t = dphi(x);
    return ddphi / std::pow(1.0 + t * t, 1.5);
}

Curve::Curve(std::vector<std::shared_ptr<const Segment>> segments, Orientation orientation)
    : segs_(std::move(segments)), orient_(orientation) {
    if (segs_.empty()) throw DomainError("curve needs at least one segment");
    for (std::size_t i = 0; i < segs_.size(); ++i) {
        double len = segs_[i]->length();
        if (!(len > 0.0)) throw DomainError("curve piece " + std::to_string(i) +
                                            " has non-positive arclength");
        total_len_ += len;
        if (i + 1 < segs_.size()) {
            double gap = norm(segs_[i]->end() - segs_[i + 1]->start());
            if (gap > 1e-12)
                throw DomainError("curve pieces " + std::to_string(i) + " and " +
                                  std::to_string(i + 1) + " do not share an endpoint (gap " +
                                  std::to_string(gap) + ")");
        }
        // sample curvature for the declared linear modulus
        for (int k = 0; k <= 16; ++k) {
            double s = len * k / 16.0;
            modulus_L_ = std::max(modulus_L_, std::fabs(segs_[i]->curvature(
                                                  std::clamp(s, 1e-9 * len, len * (1 - 1e-9)))));
        }
    }
    closed_ = norm(segs_.back()->end() - segs_.front()->start()) <= 1e-12;
}

FlatDecomposition flat_decomposition(const Curve& c, long long Q, double tol) {
    FlatDecomposition out;

    auto flat_normal = [&](const Segment& seg, Vec2* n) -> bool {
        if (seg.kind() == SegmentKind::Line) {
            *n = c.normal_from_tangent(seg.tangent(0.0));
            return true;
        }
        if (seg.kind() == SegmentKind::Arc) return false;
        // graph pieces are flat only when phi' is constant to threshold
        Vec2 n0 = c.normal_from_tangent(seg.tangent(0.0));
        for (int k = 1; k <= 64; ++k) {
            Vec2 nk = c.normal_from_tangent(seg.tangent(seg.length() * k / 64.0));
            if (norm(nk - n0) > 1e-12) return false;
        }
        *n = n0;
        return true;
    };

    std::size_t i = 0;
    while (i < c.size()) {
        Vec2 n;
        if (!flat_normal(c.segment(i), &n)) {
            out.residual_length += c.segment(i).length();
            ++i;
            continue;
        }
        std::size_t first = i;
        double len = c.segment(i).length();
        std::size_t j = i + 1;
        for (; j < c.size(); ++j) {
            Vec2 nj;
            if (!flat_normal(c.segment(j), &nj) || norm(nj - n) > 1e-12) break;
            len += c.segment(j).length();
        }
        FlatPart part;
        part.first_segment = first;
        part.segment_count = j - first;
        part.direction = classify_direction(n, Q, tol);
        part.length = len;
        out.flat_length += len;
        if (part.direction.cls == DirClass::Rational) out.iddc_holds = false;
        out.parts.push_back(part);
        i = j;
    }
    return out;
}

std::vector<QuadNode> quadrature_nodes(const Curve& c, double h_max, int nodes_per_interval) {
    if (!(h_max > 0.0)) throw DomainError("quadrature_nodes: h_max must be positive");
    GaussRule gl = gauss_rule(nodes_per_interval);
    std::vector<QuadNode> nodes;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Segment& seg = c.segment(i);
        double len = seg.length();
        int nsub = std::max(1, int(std::ceil(len / h_max)));
        double h = len / nsub;
        for (int p = 0; p < nsub; ++p)
            for (int q = 0; q < gl.n; ++q) {
                double s = (p + 0.5 * (1.0 + gl.nodes[q])) * h;
                QuadNode node;
                node.point = seg.point(s);
                node.normal = c.normal_from_tangent(seg.tangent(s));
                node.weight = 0.5 * h * gl.weights[q];
                node.segment = i;
                node.s = s;
                nodes.push_back(node);
            }
    }
    return nodes;
}

Curve make_segment_curve(Vec2 p0, Vec2 p1) {
    return Curve({std::make_shared<LineSegment>(p0, p1)}, Orientation::CW);
}

Curve make_circle(Vec2 center, double radius) {
    const double pi = 3.14159265358979323846;
    return Curve({std::make_shared<ArcSegment>(center, radius, 0.0, 2.0 * pi)},
                 Orientation::CW);
}

Curve make_stadium(double R) {
    const double pi = 3.14159265358979323846;
    std::vector<std::shared_ptr<const Segment>> segs;
    segs.push_back(std::make_shared<LineSegment>(Vec2{R, -1}, Vec2{R, 1}));
    segs.push_back(std::make_shared<ArcSegment>(Vec2{0, 1}, R, 0.0, pi));
    segs.push_back(std::make_shared<LineSegment>(Vec2{-R, 1}, Vec2{-R, -1}));
    segs.push_back(std::make_shared<ArcSegment>(Vec2{0, -1}, R, pi, 2.0 * pi));
    return Curve(std::move(segs), Orientation::CW);
}

Curve make_rotated_square(double angle, double side, Vec2 center) {
    double ca = std::cos(angle), sa = std::sin(angle);
    auto rot = [&](Vec2 p) {
        return center + Vec2{ca * p.x - sa * p.y, sa * p.x + ca * p.y};
    };
    double h = side / 2.0;
    Vec2 v[4] = {rot({h, -h}), rot({h, h}), rot({-h, h}), rot({-h, -h})};
    std::vector<std::shared_ptr<const Segment>> segs;
    for (int i = 0; i < 4; ++i)
        segs.push_back(std::make_shared<LineSegment>(v[i], v[(i + 1) % 4]));
    return Curve(std::move(segs), Orientation::CW);
}

} // namespace oscihom
