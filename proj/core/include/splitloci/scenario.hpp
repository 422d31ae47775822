#pragma once
#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "splitloci/characteristics.hpp"

namespace splitloci {

// Every tolerance the pipeline uses, overridable from the scenario file.
struct Tolerances {
    double dt = 1e-3;                 // RK4 step
    double t_cap = 4.0;               // hard cap for rays that never exit
    double fd_step = 1e-5;            // central-difference step
    double sigma_tol_rel = 1e-6;      // conjugacy order via singular values
    double det_zero_min = 1e-9;       // sign-preserving det zeros
    double conj_bisect_tol = 1e-10;   // det-zero bracketing
    double rho_bisect_tol = 1e-8;     // locus crossing refinement
    double cut_delta_tol = 1e-12;     // cut-time value-gap threshold
    double dir_tol = 1e-3;            // direction gap for multi-minimizers (rad)
    double value_gap = 1e-6;          // value gap for multi-minimizers
    double cluster_tol = 1e-2;        // arrival direction clustering (rad)
    double pos_cluster_tol = 1e-5;    // locus node position merging
    double match_tol_factor = 2.0;    // match_tol = factor * audit grid spacing
    double dense_tol_factor = 3.0;    // dense_tol = factor * locus sampling step
    double balanced_tol = 1e-4;       // dual-comparison slack
    double conj_flag_tol = 1e-6;      // |t - lambda_1| for arrival conjugacy flags
    double node_match_tol = 1e-3;     // arrival-to-node acceptance
    double edge_touch_tol = 1e-6;     // lambda_1 - rho threshold for edge tips
    double hyperbola_step = 5e-3;     // torus bisector sampling step
    int lattice_range = 3;            // |m| bound for lattice enumerations
    int continuum_cap = 16;           // arrival clusters beyond this = continuum
};

struct FamilySpec {
    enum class Mode { None, ComponentOffsets, TorusLattice };
    Mode mode = Mode::None;
    int offset_component = 0;                     // which component carries the offset
    double a_min = -0.8, a_max = 0.8;             // component mode scan
    int a_steps = 5;
    double ax_min = -0.2, ax_max = 0.2;           // torus mode scan
    double ay_min = -0.2, ay_max = 0.2;
    int ax_steps = 5, ay_steps = 5;
};

struct ScenarioSpec {
    Chart chart;
    MetricKind metric_kind = MetricKind::Euclidean;
    Vec2 drift{0, 0};
    int boundary_samples = 1024;
    std::vector<GSpec> g;  // one per boundary component (chart order); empty = all zero
    FamilySpec family;
    Tolerances tol;
    std::uint64_t seed = 1;
    int grid_n = 100;

    std::string digest() const;  // FNV-1a over the canonical key/value dump
    std::string canonical_text() const;
};

struct ScenarioParseError : std::runtime_error {
    int line;
    ScenarioParseError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

ScenarioSpec parse_scenario_text(const std::string& text);
ScenarioSpec parse_scenario_file(const std::string& path);

// Precomputed per-boundary-sample launch data. Characteristics of the
// catalog Hamiltonians are straight; `dir` is the constant phi-unit speed.
struct Ray {
    int component = 0;
    double u = 0.0, s = 0.0;
    Vec2 origin;
    Vec2 dir;
    Covec alpha;
    double g = 0.0;
    double t_exit = 0.0;

    Vec2 at(double t) const { return origin + dir * t; }
    // Parameter of the closest approach to p along [0, t_stop].
    double closest_t(Vec2 p, double t_stop) const {
        double t = dot(p - origin, dir) / norm2(dir);
        return std::clamp(t, 0.0, t_stop);
    }
};

// Assembled runtime scenario: chart + metric + boundary mesh + characteristic
// field caches. All queries are const and safe to share across threads.
class Scenario {
public:
    static Scenario build(const ScenarioSpec& spec);

    const ScenarioSpec& spec() const { return spec_; }
    const Chart& chart() const { return spec_.chart; }
    const Hamiltonian& metric() const { return metric_; }
    const Tolerances& tol() const { return spec_.tol; }
    const BoundaryMesh& mesh() const { return mesh_; }
    const std::vector<BoundaryComponent>& components() const { return components_; }
    const std::vector<GSpec>& g() const { return g_; }
    const std::vector<Ray>& rays() const { return rays_; }
    const CharacteristicField& field(int component) const { return *fields_[component]; }

    int mesh_size() const { return static_cast<int>(mesh_.samples.size()); }
    const Ray& ray(int k) const { return rays_[k]; }

    // Fresh field solve at arbitrary (component, u); includes exit time.
    Ray ray_at(int component, double u) const;

    // Full trajectory with variational data from mesh sample k or (comp, u).
    Trajectory trajectory(int k, double t_max = -1) const;
    Trajectory trajectory_at(int component, double u, double t_max = -1) const;

    // F(t, z) for mesh sample k.
    Vec2 exponential(double t, int k) const { return chart().reduce(rays_[k].at(t)); }

    // Conjugate record for sample k (cached) or arbitrary u (fresh solve).
    const ConjugateRecord& conjugates(int k) const;
    ConjugateRecord conjugates_at(int component, double u) const;
    double lambda1(int k) const { return conjugates(k).lambda(1); }

    // Compatibility margin: min over sampled boundary pairs of
    // d(y,z) - (g(y) - g(z)); negative means Eq-(3)-style data violation.
    struct CompatibilityReport {
        double margin = 0.0;
        Vec2 witness_y, witness_z;
        bool ok() const { return margin > 0.0; }
    };
    CompatibilityReport compatibility(int pairs_per_component = 256) const;
    void require_compatible() const;

    // Copy with per-component constant offsets added to g.
    ScenarioSpec spec_with_offsets(const std::vector<double>& offsets) const;
    // Copy with boundary sampling (and audit grid) scaled by `factor`.
    ScenarioSpec spec_refined(int factor) const;

    double mesh_gap(int component) const { return mesh_.mesh_gap(component); }
    double max_mesh_gap() const;

private:
    ScenarioSpec spec_;
    Hamiltonian metric_;
    std::vector<BoundaryComponent> components_;
    std::vector<GSpec> g_;
    BoundaryMesh mesh_;
    std::vector<std::unique_ptr<CharacteristicField>> fields_;
    std::vector<Ray> rays_;
    mutable std::vector<std::optional<ConjugateRecord>> conj_cache_;
    mutable std::unique_ptr<std::mutex> conj_mutex_;
};

}  // namespace splitloci
