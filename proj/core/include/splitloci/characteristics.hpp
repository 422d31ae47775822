#pragma once
#include <optional>
#include <stdexcept>
#include <vector>

#include "splitloci/boundary.hpp"
#include "splitloci/geometry.hpp"

namespace splitloci {

struct IncompatibleBoundaryData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Initial data of the characteristic through a boundary point: the boundary
// covector alpha with H(z, alpha) = 1, alpha restricted to the boundary
// tangent equal to dg, and the inward unit speed X = dH/dalpha(alpha).
struct CharacteristicVector {
    Covec alpha;
    Vec2 speed;  // phi-unit, points into the domain
};

class CharacteristicField {
public:
    CharacteristicField(const Hamiltonian& metric, const BoundaryComponent& component,
                        const GSpec& g);

    // Throws IncompatibleBoundaryData (naming the boundary point) when the
    // co-norm of dg along the boundary reaches 1 at u.
    CharacteristicVector at(double u) const;

    // min over the constraint line of H; local compatibility needs < 1.
    double constraint_minimum(double u) const;

    // d alpha / d s along the boundary (central difference, step h in s).
    Covec alpha_derivative(double u, double fd_step) const;

    const BoundaryComponent& component() const { return *component_; }

private:
    const Hamiltonian* metric_;
    const BoundaryComponent* component_;
    const GSpec* g_;
};

// One integration state of a characteristic with its variational data.
// jacobian carries dF at (t, z) in the (t, arclength) coordinates of the
// characteristic domain: column 0 is the curve speed, column 1 is d x / d s.
struct CharState {
    double t = 0.0;
    Vec2 x;            // unwrapped position (reduce for torus queries)
    Covec alpha;
    Vec2 dx;           // variation of x along the boundary arclength
    Covec dalpha;      // variation of alpha
    Mat2 jacobian;
    double det = 0.0;
};

struct Trajectory {
    std::vector<CharState> states;
    double dt = 0.0;
    bool truncated = false;   // left the domain before t_max
    double t_exit = 0.0;      // exit time when truncated, else t_max
    double max_drift = 0.0;   // max |H - 1| along the trajectory
    double max_line_deviation = 0.0;  // distance from the chord (straightness probe)

    double t_end() const { return states.empty() ? 0.0 : states.back().t; }
    // State at arbitrary t <= t_end: one local RK4 step from the bracketing
    // stored state, so queries stay smooth between stored samples.
    CharState at(double t) const;
    Vec2 position(double t) const { return at(t).x; }

    const Hamiltonian* metric = nullptr;
};

class Flow {
public:
    Flow(const Chart& chart, const Hamiltonian& metric) : chart_(chart), metric_(metric) {}

    // Integrates Hamilton's equations with the linearized system alongside,
    // starting from x0 with covector a0 and variation (dx0, da0).
    Trajectory integrate(Vec2 x0, Covec a0, Vec2 dx0, Covec da0, double t_max, double dt) const;

    const Chart& chart() const { return chart_; }
    const Hamiltonian& metric() const { return metric_; }

private:
    const Chart& chart_;
    const Hamiltonian& metric_;
};

struct ConjugateRecord {
    std::vector<double> times;   // ascending, multiplicities expanded
    std::vector<int> orders;     // order at each listed time (repeated entries share it)
    bool empty() const { return times.empty(); }
    double lambda(int j) const;  // j-th time counting multiplicity (1-based), +inf past the end
};

// Zeros of det dF on (0, t_end]: sign changes bracketed and bisected, plus
// sign-preserving zeros sought through local minima of |det|.
ConjugateRecord conjugate_times(const Trajectory& traj, double bisect_tol, double sigma_tol_rel,
                                double det_zero_min);

// max |f(z_{k+1}) - f(z_k)| / arclength gap over adjacent samples with both
// values finite; coverage reports the fraction of usable gaps.
struct LipschitzEstimate {
    double constant = 0.0;
    double coverage = 1.0;  // fraction of adjacent pairs with finite values
};
LipschitzEstimate lipschitz_estimate(const std::vector<double>& values,
                                     const std::vector<double>& arclengths, bool closed,
                                     double period);

}  // namespace splitloci
