#include "splitloci/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace splitloci {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kTableSize = 8193;

double wrap01(double u) { return u - std::floor(u); }
}  // namespace

BoundaryComponent BoundaryComponent::circle(std::string name, Vec2 center, double radius, bool ccw) {
    BoundaryComponent c;
    c.kind_ = Kind::Circle;
    c.name_ = std::move(name);
    c.center_ = center;
    c.radius_ = radius;
    c.ccw_ = ccw;
    c.total_length_ = kTwoPi * radius;
    return c;
}

BoundaryComponent BoundaryComponent::ellipse(std::string name, double a, double b) {
    BoundaryComponent c;
    c.kind_ = Kind::Ellipse;
    c.name_ = std::move(name);
    c.ell_a_ = a;
    c.ell_b_ = b;
    c.ccw_ = true;
    c.build_arclength_table();
    return c;
}

Vec2 BoundaryComponent::position(double u) const {
    double t = kTwoPi * wrap01(u);
    if (!ccw_) t = -t;
    if (kind_ == Kind::Circle)
        return center_ + Vec2{radius_ * std::cos(t), radius_ * std::sin(t)};
    return {ell_a_ * std::cos(t), ell_b_ * std::sin(t)};
}

Vec2 BoundaryComponent::velocity(double u) const {
    double t = kTwoPi * wrap01(u);
    double sgn = ccw_ ? 1.0 : -1.0;
    if (!ccw_) t = -t;
    if (kind_ == Kind::Circle)
        return Vec2{-radius_ * std::sin(t), radius_ * std::cos(t)} * (kTwoPi * sgn);
    return Vec2{-ell_a_ * std::sin(t), ell_b_ * std::cos(t)} * (kTwoPi * sgn);
}

void BoundaryComponent::build_arclength_table() {
    s_table_.assign(kTableSize, 0.0);
    double acc = 0.0;
    int n = kTableSize - 1;
    double h = 1.0 / n;
    for (int k = 0; k < n; ++k) {
        // Simpson on [k h, (k+1) h].
        double u0 = k * h, um = (k + 0.5) * h, u1 = (k + 1) * h;
        acc += h / 6.0 * (speed(u0) + 4.0 * speed(um) + speed(u1));
        s_table_[k + 1] = acc;
    }
    total_length_ = acc;
}

double BoundaryComponent::arclength(double u) const {
    u = wrap01(u);
    if (kind_ == Kind::Circle) return u * total_length_;
    int n = kTableSize - 1;
    double x = u * n;
    int k = std::min(static_cast<int>(x), n - 1);
    double frac = x - k;
    return s_table_[k] + frac * (s_table_[k + 1] - s_table_[k]);
}

double BoundaryComponent::param_of_arclength(double s) const {
    double L = total_length_;
    s -= L * std::floor(s / L);
    if (kind_ == Kind::Circle) return s / L;
    int n = kTableSize - 1;
    auto it = std::upper_bound(s_table_.begin(), s_table_.end(), s);
    int k = std::max(1, static_cast<int>(it - s_table_.begin())) - 1;
    double seg = s_table_[k + 1] - s_table_[k];
    double u = (k + (seg > 0 ? (s - s_table_[k]) / seg : 0.0)) / n;
    // Newton steps: solve arclength(u) = s with ds/du = speed(u).
    for (int step = 0; step < 3; ++step) {
        double f = arclength(u) - s;
        double sp = speed(u);
        if (sp > 0) u = wrap01(u - f / sp);
    }
    return u;
}

// ---------------------------------------------------------------------------

double g_value(const GSpec& g, double u) {
    u = wrap01(u);
    if (const auto* c = std::get_if<GConstant>(&g)) return c->value;
    if (const auto* s = std::get_if<GSinusoid>(&g))
        return s->offset + s->amplitude * std::sin(kTwoPi * s->harmonic * u + s->phase);
    const auto& tbl = std::get<GTable>(g).values;
    int n = static_cast<int>(tbl.size());
    if (n == 0) return 0.0;
    if (n == 1) return tbl[0];
    double x = u * n;
    int i1 = static_cast<int>(std::floor(x)) % n;
    double t = x - std::floor(x);
    int i0 = (i1 + n - 1) % n, i2 = (i1 + 1) % n, i3 = (i1 + 2) % n;
    // Catmull-Rom, periodic.
    double p0 = tbl[i0], p1 = tbl[i1], p2 = tbl[i2], p3 = tbl[i3];
    return p1 + 0.5 * t * (p2 - p0 + t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
}

double g_derivative_du(const GSpec& g, double u) {
    if (std::holds_alternative<GConstant>(g)) return 0.0;
    if (const auto* s = std::get_if<GSinusoid>(&g))
        return s->amplitude * kTwoPi * s->harmonic * std::cos(kTwoPi * s->harmonic * wrap01(u) + s->phase);
    double h = 1e-6;
    return (g_value(g, u + h) - g_value(g, u - h)) / (2 * h);
}

GSpec g_shifted(const GSpec& g, double offset) {
    if (const auto* c = std::get_if<GConstant>(&g)) return GConstant{c->value + offset};
    if (const auto* s = std::get_if<GSinusoid>(&g)) {
        GSinusoid out = *s;
        out.offset += offset;
        return out;
    }
    GTable out = std::get<GTable>(g);
    for (double& v : out.values) v += offset;
    return out;
}

double g_sup_variation(const GSpec& g) {
    if (std::holds_alternative<GConstant>(g)) return 0.0;
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k < 2048; ++k) {
        double v = g_value(g, k / 2048.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

// ---------------------------------------------------------------------------

BoundaryMesh build_mesh(const std::vector<BoundaryComponent>& components,
                        const std::vector<GSpec>& g, int samples_per_component) {
    if (components.size() != g.size())
        throw std::invalid_argument("one g spec per boundary component required");
    BoundaryMesh mesh;
    mesh.samples_per_component = samples_per_component;
    for (size_t c = 0; c < components.size(); ++c) {
        const auto& comp = components[c];
        int begin = static_cast<int>(mesh.samples.size());
        for (int k = 0; k < samples_per_component; ++k) {
            double u = static_cast<double>(k) / samples_per_component;
            BoundarySample s;
            s.component = static_cast<int>(c);
            s.index = k;
            s.u = u;
            s.s = comp.arclength(u);
            s.position = comp.position(u);
            s.tangent = comp.unit_tangent(u);
            s.inward = comp.inward_normal(u);
            s.g = g_value(g[c], u);
            s.dg_ds = g_derivative_du(g[c], u) / comp.speed(u);
            if (!std::isfinite(s.g)) throw std::invalid_argument("non-finite boundary data");
            mesh.samples.push_back(s);
        }
        mesh.component_ranges.emplace_back(begin, static_cast<int>(mesh.samples.size()));
        mesh.component_lengths.push_back(comp.total_length());
    }
    return mesh;
}

std::vector<BoundaryComponent> chart_boundary(const Chart& chart) {
    switch (chart.kind) {
        case ChartKind::Disk:
            return {BoundaryComponent::circle("boundary", {0, 0}, chart.disk_radius, true)};
        case ChartKind::Annulus:
            return {BoundaryComponent::circle("inner", {0, 0}, chart.r_in, false),
                    BoundaryComponent::circle("outer", {0, 0}, chart.r_out, true)};
        case ChartKind::FlatTorus:
            return {BoundaryComponent::circle("source", chart.source, chart.source_radius, false)};
        case ChartKind::Ellipse:
            return {BoundaryComponent::ellipse("boundary", chart.semi_a, chart.semi_b)};
    }
    return {};
}

}  // namespace splitloci
