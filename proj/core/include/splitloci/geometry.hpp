#pragma once
#include <array>
#include <stdexcept>
#include <string>

#include "splitloci/vec.hpp"

namespace splitloci {

// --------------------------------------------------------------------------
// Charts: single global coordinate patches for the built-in 2D domains.
// The flat torus is handled by mod-1 reduction, everything else is planar.
// --------------------------------------------------------------------------

enum class ChartKind { Disk, Annulus, FlatTorus, Ellipse };

struct Chart {
    ChartKind kind = ChartKind::Annulus;
    double disk_radius = 1.0;              // disk
    double r_in = 1.0, r_out = 2.0;        // annulus
    double semi_a = 1.5, semi_b = 1.0;     // ellipse
    Vec2 source{0.5, 0.5};                 // torus: hole center
    double source_radius = 0.1;            // torus: hole radius

    static Chart disk(double radius = 1.0);
    static Chart annulus(double r_in = 1.0, double r_out = 2.0);
    static Chart flat_torus(Vec2 source = {0.5, 0.5}, double source_radius = 0.1);
    static Chart ellipse(double a = 1.5, double b = 1.0);

    bool periodic() const { return kind == ChartKind::FlatTorus; }

    // Reduce torus coordinates to [0,1)^2; identity on planar charts.
    Vec2 reduce(Vec2 p) const;

    // Shortest displacement from `from` to `to` (wrap-aware on the torus).
    Vec2 displacement(Vec2 from, Vec2 to) const;

    // Interior test with a signed margin (>0 shrinks the domain).
    bool contains(Vec2 p, double margin = 0.0) const;

    // Distance from p to the domain boundary (positive inside).
    double boundary_clearance(Vec2 p) const;

    // First t > t_min at which origin + t*dir leaves the domain; +inf if never
    // (possible on the torus when the ray misses every copy of the hole).
    double exit_time(Vec2 origin, Vec2 dir, double t_min, double t_cap) const;

    // Fixed drawing window {x0, y0, width, height}.
    std::array<double, 4> view_box() const;

    std::string describe() const;
};

// --------------------------------------------------------------------------
// Hamiltonians on covectors, and the dual Finsler norm on vectors.
// Closed catalog: euclidean |a| and Randers |a| + b.a with |b| < 1.
// --------------------------------------------------------------------------

enum class MetricKind { Euclidean, Randers };

class Hamiltonian {
public:
    Hamiltonian() : Hamiltonian(MetricKind::Euclidean, {}) {}
    Hamiltonian(MetricKind kind, Vec2 drift);

    static Hamiltonian euclidean() { return {MetricKind::Euclidean, {}}; }
    static Hamiltonian randers(Vec2 drift) { return {MetricKind::Randers, drift}; }

    MetricKind kind() const { return kind_; }
    Vec2 drift() const { return b_; }
    bool position_independent() const { return true; }

    // Covector side.
    double hamiltonian(Vec2 x, Covec a) const;        // H(x, a)
    Vec2 velocity(Vec2 x, Covec a) const;             // dH/da
    Mat2 velocity_jacobian(Vec2 x, Covec a) const;    // d2H/da2
    Covec position_gradient(Vec2 x, Covec a) const;   // dH/dx (zero for the catalog)

    // Vector side: the dual norm phi_x(v) = sup{ <v,a> : H(x,a) = 1 } and its
    // derivatives. norm() is 1-homogeneous and positive away from v = 0.
    double norm(Vec2 x, Vec2 v) const;
    Covec norm_gradient(Vec2 x, Vec2 v) const;        // dphi/dv, 0-homogeneous
    Mat2 norm_hessian(Vec2 x, Vec2 v) const;          // d2phi/dv2

    // Dual one-form w of v: w(v) = phi(v)^2 and w vanishes on the tangent to
    // the phi-level set at v. In coordinates w = phi(v) * dphi/dv.
    Covec dual_one_form(Vec2 x, Vec2 v) const;

    // Fundamental tensor at (x, v): Hessian of phi^2/2. Symmetric, and
    // positive definite exactly when the indicatrix is strictly convex.
    Mat2 fundamental_tensor(Vec2 x, Vec2 v) const;

private:
    MetricKind kind_;
    Vec2 b_;
    double mu_;  // 1 - |b|^2
};

// phi-length of the straight chord from p to q (wrap-aware on the torus:
// minimum over lattice shifts |m| <= 3). For the built-in charts straight
// chords realize the geodesics used by the solver.
double distance(const Chart& chart, const Hamiltonian& metric, Vec2 p, Vec2 q);

struct DegenerateVectorError : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace splitloci
