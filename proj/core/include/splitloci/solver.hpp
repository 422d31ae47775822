#pragma once
#include "splitloci/locus.hpp"
#include "splitloci/scenario.hpp"

namespace splitloci {

// Lax-Oleinik solver: u(p) = min over the boundary of d(q -> p) + g(q).
// Coarse mesh scan per component (and per lattice copy on the torus) with
// golden-section refinement of every local minimum.
class ViscositySolver {
public:
    explicit ViscositySolver(const Scenario& sc);

    double value(Vec2 p) const;

    struct Support {
        int component = 0;
        double u = 0.0;
        Vec2 shift{0, 0};   // lattice copy of the boundary point
        double value = 0.0; // d + g
        double t = 0.0;     // travel time = phi-length of the chord
        Vec2 q;             // boundary point (unshifted)
        Vec2 direction;     // phi-unit arrival direction at p
        bool continuum = false;  // representative of a flat component
    };

    // All direction-separated epsilon-minimizers within value_gap of the min.
    std::vector<Support> minimizers(Vec2 p, double value_gap, double dir_tol) const;
    Support best(Vec2 p) const;

    // First time the characteristic stops being minimizing: smallest t with
    // t + g(z) - u(F(t,z)) > cut_delta_tol, bisected to ~1e-13.
    struct CutResult {
        double t = 0.0;
        bool found = false;  // false: no cut before domain exit
    };
    CutResult cut_time(const Ray& ray) const;

    const Scenario& scenario() const { return *sc_; }

private:
    struct CompInfo {
        Vec2 center;
        double circum = 0.0;
        double g_min = 0.0;
    };
    double chord_value(Vec2 p, int comp, double u, Vec2 shift) const;
    void scan_component(Vec2 p, int comp, Vec2 shift, double gap,
                        std::vector<Support>& out, double& best) const;

    const Scenario* sc_;
    int coarse_n_;
    std::vector<CompInfo> info_;
    std::vector<Vec2> shifts_;
    double phi_lb_factor_;
};

// The closure of the set where the solution by characteristics stops being
// single-valued: cut-time sweep over the boundary mesh, multi-minimizer
// provenance per point, and edge tips where the cut touches the first
// conjugate time.
CandidateLocus singular_set(const Scenario& sc);

// Cut times per mesh sample (rho against the singular set, by value gap).
std::vector<double> cut_times(const Scenario& sc);

}  // namespace splitloci
