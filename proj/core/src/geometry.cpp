#include "splitloci/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace splitloci {

Chart Chart::disk(double radius) {
    Chart c;
    c.kind = ChartKind::Disk;
    c.disk_radius = radius;
    if (radius <= 0) throw std::invalid_argument("disk radius must be positive");
    return c;
}

Chart Chart::annulus(double r_in, double r_out) {
    Chart c;
    c.kind = ChartKind::Annulus;
    c.r_in = r_in;
    c.r_out = r_out;
    if (!(0 < r_in && r_in < r_out)) throw std::invalid_argument("annulus needs 0 < r_in < r_out");
    return c;
}

Chart Chart::flat_torus(Vec2 source, double source_radius) {
    Chart c;
    c.kind = ChartKind::FlatTorus;
    c.source = {source.x - std::floor(source.x), source.y - std::floor(source.y)};
    c.source_radius = source_radius;
    if (!(source_radius > 0 && source_radius < 0.5))
        throw std::invalid_argument("torus source radius must lie in (0, 0.5)");
    return c;
}

Chart Chart::ellipse(double a, double b) {
    Chart c;
    c.kind = ChartKind::Ellipse;
    c.semi_a = a;
    c.semi_b = b;
    if (!(a > 0 && b > 0)) throw std::invalid_argument("ellipse semi-axes must be positive");
    return c;
}

Vec2 Chart::reduce(Vec2 p) const {
    if (kind != ChartKind::FlatTorus) return p;
    return {p.x - std::floor(p.x), p.y - std::floor(p.y)};
}

Vec2 Chart::displacement(Vec2 from, Vec2 to) const {
    Vec2 d = to - from;
    if (kind != ChartKind::FlatTorus) return d;
    d.x -= std::round(d.x);
    d.y -= std::round(d.y);
    return d;
}

bool Chart::contains(Vec2 p, double margin) const {
    return boundary_clearance(p) > margin;
}

double Chart::boundary_clearance(Vec2 p) const {
    switch (kind) {
        case ChartKind::Disk:
            return disk_radius - norm(p);
        case ChartKind::Annulus: {
            double r = norm(p);
            return std::min(r - r_in, r_out - r);
        }
        case ChartKind::FlatTorus:
            return norm(displacement(source, p)) - source_radius;
        case ChartKind::Ellipse: {
            // Clearance surrogate: scaled radial gap. Exact near the boundary
            // at the scale of the margins used by the audits.
            double q = std::sqrt(p.x * p.x / (semi_a * semi_a) + p.y * p.y / (semi_b * semi_b));
            return (1.0 - q) * std::min(semi_a, semi_b);
        }
    }
    return 0.0;
}

namespace {

// Smallest root of |o + t d - c| = R above t_min, or +inf.
double ray_circle_first(Vec2 o, Vec2 d, Vec2 c, double R, double t_min) {
    Vec2 oc = o - c;
    double A = norm2(d);
    double B = 2 * dot(oc, d);
    double C = norm2(oc) - R * R;
    double disc = B * B - 4 * A * C;
    if (disc < 0 || A == 0) return std::numeric_limits<double>::infinity();
    double sq = std::sqrt(disc);
    double t1 = (-B - sq) / (2 * A);
    double t2 = (-B + sq) / (2 * A);
    if (t1 > t_min) return t1;
    if (t2 > t_min) return t2;
    return std::numeric_limits<double>::infinity();
}

}  // namespace

double Chart::exit_time(Vec2 origin, Vec2 dir, double t_min, double t_cap) const {
    double best = std::numeric_limits<double>::infinity();
    switch (kind) {
        case ChartKind::Disk:
            best = ray_circle_first(origin, dir, {0, 0}, disk_radius, t_min);
            break;
        case ChartKind::Annulus:
            best = std::min(ray_circle_first(origin, dir, {0, 0}, r_in, t_min),
                            ray_circle_first(origin, dir, {0, 0}, r_out, t_min));
            break;
        case ChartKind::Ellipse: {
            // Scale to the unit circle.
            Vec2 o{origin.x / semi_a, origin.y / semi_b};
            Vec2 d{dir.x / semi_a, dir.y / semi_b};
            best = ray_circle_first(o, d, {0, 0}, 1.0, t_min);
            break;
        }
        case ChartKind::FlatTorus: {
            double reach = t_cap * norm(dir) + 1.0;
            int mrange = static_cast<int>(std::ceil(reach)) + 1;
            for (int mx = -mrange; mx <= mrange; ++mx)
                for (int my = -mrange; my <= mrange; ++my) {
                    Vec2 c = source + Vec2(mx, my);
                    best = std::min(best, ray_circle_first(origin, dir, c, source_radius, t_min));
                }
            break;
        }
    }
    return best;
}

std::array<double, 4> Chart::view_box() const {
    switch (kind) {
        case ChartKind::Disk: {
            double r = disk_radius * 1.1;
            return {-r, -r, 2 * r, 2 * r};
        }
        case ChartKind::Annulus: {
            double r = r_out * 1.05;
            return {-r, -r, 2 * r, 2 * r};
        }
        case ChartKind::FlatTorus:
            return {-0.05, -0.05, 1.1, 1.1};
        case ChartKind::Ellipse: {
            double a = semi_a * 1.1, b = semi_b * 1.1;
            return {-a, -b, 2 * a, 2 * b};
        }
    }
    return {0, 0, 1, 1};
}

std::string Chart::describe() const {
    switch (kind) {
        case ChartKind::Disk: return "disk(radius=" + std::to_string(disk_radius) + ")";
        case ChartKind::Annulus:
            return "annulus(r_in=" + std::to_string(r_in) + ", r_out=" + std::to_string(r_out) + ")";
        case ChartKind::FlatTorus:
            return "flat-torus(source=(" + std::to_string(source.x) + "," + std::to_string(source.y) +
                   "), r=" + std::to_string(source_radius) + ")";
        case ChartKind::Ellipse:
            return "ellipse(a=" + std::to_string(semi_a) + ", b=" + std::to_string(semi_b) + ")";
    }
    return "?";
}

// ---------------------------------------------------------------------------

Hamiltonian::Hamiltonian(MetricKind kind, Vec2 drift) : kind_(kind), b_(drift) {
    if (kind_ == MetricKind::Euclidean) b_ = {0, 0};
    double bb = norm2(b_);
    if (bb >= 1.0) throw std::invalid_argument("randers drift must satisfy |b| < 1");
    mu_ = 1.0 - bb;
}

double Hamiltonian::hamiltonian(Vec2, Covec a) const {
    if (!finite(a)) throw std::invalid_argument("non-finite covector");
    return splitloci::norm(a) + dot(b_, a);
}

Vec2 Hamiltonian::velocity(Vec2, Covec a) const {
    double n = splitloci::norm(a);
    if (n == 0) throw DegenerateVectorError("velocity undefined at the zero covector");
    return a / n + b_;
}

Mat2 Hamiltonian::velocity_jacobian(Vec2, Covec a) const {
    double n = splitloci::norm(a);
    if (n == 0) throw DegenerateVectorError("velocity jacobian undefined at the zero covector");
    Vec2 u = a / n;
    return (Mat2::identity() - Mat2::outer(u, u)) * (1.0 / n);
}

Covec Hamiltonian::position_gradient(Vec2, Covec) const { return {0, 0}; }

double Hamiltonian::norm(Vec2, Vec2 v) const {
    if (!finite(v)) throw std::invalid_argument("non-finite vector");
    double s = dot(v, b_);
    double Q = s * s + mu_ * norm2(v);
    return (std::sqrt(Q) - s) / mu_;
}

Covec Hamiltonian::norm_gradient(Vec2, Vec2 v) const {
    if (norm2(v) == 0) throw DegenerateVectorError("norm gradient undefined at v = 0");
    double s = dot(v, b_);
    double Q = s * s + mu_ * norm2(v);
    Vec2 dQ_half = b_ * s + v * mu_;  // (1/2) dQ/dv
    return (dQ_half / std::sqrt(Q) - b_) / mu_;
}

Mat2 Hamiltonian::norm_hessian(Vec2, Vec2 v) const {
    if (norm2(v) == 0) throw DegenerateVectorError("norm hessian undefined at v = 0");
    double s = dot(v, b_);
    double Q = s * s + mu_ * norm2(v);
    double rQ = std::sqrt(Q);
    Vec2 g = b_ * s + v * mu_;
    Mat2 h = (Mat2::outer(b_, b_) + Mat2::identity() * mu_) * (1.0 / rQ) -
             Mat2::outer(g, g) * (1.0 / (Q * rQ));
    return h * (1.0 / mu_);
}

Covec Hamiltonian::dual_one_form(Vec2 x, Vec2 v) const {
    if (norm2(v) == 0) throw DegenerateVectorError("dual one-form undefined at v = 0");
    return norm_gradient(x, v) * norm(x, v);
}

Mat2 Hamiltonian::fundamental_tensor(Vec2 x, Vec2 v) const {
    if (norm2(v) == 0) throw DegenerateVectorError("fundamental tensor undefined at v = 0");
    double phi = norm(x, v);
    Covec g = norm_gradient(x, v);
    return norm_hessian(x, v) * phi + Mat2::outer(g, g);
}

double distance(const Chart& chart, const Hamiltonian& metric, Vec2 p, Vec2 q) {
    if (!finite(p) || !finite(q)) throw std::invalid_argument("non-finite point");
    if (chart.kind != ChartKind::FlatTorus) {
        Vec2 d = q - p;
        return norm2(d) == 0 ? 0.0 : metric.norm(p, d);
    }
    double best = std::numeric_limits<double>::infinity();
    for (int mx = -3; mx <= 3; ++mx)
        for (int my = -3; my <= 3; ++my) {
            Vec2 d = q + Vec2(mx, my) - p;
            double val = norm2(d) == 0 ? 0.0 : metric.norm(p, d);
            best = std::min(best, val);
        }
    return best;
}

}  // namespace splitloci
