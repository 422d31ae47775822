#pragma once
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "splitloci/geometry.hpp"

namespace splitloci {

// Analytic closed boundary curve, parameter u in [0,1). All components are
// parameterized so that rot90ccw(unit_tangent) points into the domain.
class BoundaryComponent {
public:
    enum class Kind { Circle, Ellipse };

    static BoundaryComponent circle(std::string name, Vec2 center, double radius, bool ccw);
    static BoundaryComponent ellipse(std::string name, double a, double b);

    const std::string& name() const { return name_; }
    Kind kind() const { return kind_; }

    Vec2 position(double u) const;
    Vec2 velocity(double u) const;  // d position / du
    Vec2 unit_tangent(double u) const { return normalized(velocity(u)); }
    Vec2 inward_normal(double u) const { return rot90ccw(unit_tangent(u)); }
    double speed(double u) const { return norm(velocity(u)); }

    double total_length() const { return total_length_; }
    double arclength(double u) const;        // s(u), s(0) = 0
    double param_of_arclength(double s) const;

    // Curvature-free placeholder kept simple: circles/ellipses only.
    Vec2 center() const { return center_; }
    double radius() const { return radius_; }

private:
    BoundaryComponent() = default;
    void build_arclength_table();

    Kind kind_ = Kind::Circle;
    std::string name_;
    Vec2 center_{0, 0};
    double radius_ = 1.0;
    double ell_a_ = 1.0, ell_b_ = 1.0;
    bool ccw_ = true;
    double total_length_ = 0.0;
    std::vector<double> s_table_;  // s at u = k / (table size - 1)
};

// Boundary data g per component: constant, sinusoid in the curve parameter,
// or a periodic table interpolated with Catmull-Rom.
struct GConstant { double value = 0.0; };
struct GSinusoid { double offset = 0.0, amplitude = 0.0; int harmonic = 1; double phase = 0.0; };
struct GTable { std::vector<double> values; };
using GSpec = std::variant<GConstant, GSinusoid, GTable>;

double g_value(const GSpec& g, double u);
double g_derivative_du(const GSpec& g, double u);
GSpec g_shifted(const GSpec& g, double offset);
double g_sup_variation(const GSpec& g);

struct BoundarySample {
    int component = 0;
    int index = 0;
    double u = 0.0;      // curve parameter
    double s = 0.0;      // arclength from u = 0
    Vec2 position;
    Vec2 tangent;        // unit
    Vec2 inward;         // unit inward normal
    double g = 0.0;
    double dg_ds = 0.0;
};

// Ordered closed sampling of every boundary component.
struct BoundaryMesh {
    std::vector<BoundarySample> samples;                 // all components, concatenated
    std::vector<std::pair<int, int>> component_ranges;   // [begin, end) into samples
    std::vector<double> component_lengths;

    int samples_per_component = 0;
    int component_of(int sample) const { return samples[sample].component; }
    double mesh_gap(int component) const {
        return component_lengths[component] / samples_per_component;
    }
};

BoundaryMesh build_mesh(const std::vector<BoundaryComponent>& components,
                        const std::vector<GSpec>& g, int samples_per_component);

// Boundary components induced by a chart.
std::vector<BoundaryComponent> chart_boundary(const Chart& chart);

}  // namespace splitloci
