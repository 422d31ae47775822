#pragma once
#include <optional>
#include <string>
#include <vector>

#include "splitloci/scenario.hpp"

namespace splitloci {

enum class PointLabel { Unclassified, Cleave, DegenerateCleave, Edge, Crossing, Remainder };
std::string label_name(PointLabel label);

// One characteristic arriving at a locus point, with construction-time data.
struct NodeArrival {
    int component = 0;        // boundary component
    double u = 0.0, s = 0.0;  // boundary parameter / arclength
    double t = 0.0;           // travel time along the characteristic
    Vec2 direction;           // incoming phi-unit speed at the point
    double value = 0.0;       // t + g(z) under the scenario's own boundary data
    Vec2 copy_shift{0, 0};    // lattice copy of the source (torus), else 0
    bool conjugate = false;
    int conj_order = 0;
};

struct LocusNode {
    Vec2 pos;
    std::vector<NodeArrival> arrivals;
    bool junction = false;    // >= 3 distinct arrival directions
    bool edge_tip = false;    // appended where rho touches lambda_1
    // Filled by finalize/classify passes:
    int cluster_count = 0;
    PointLabel label = PointLabel::Unclassified;
    double h_left = 0.0, h_right = 0.0;
    double jump = 0.0;        // h_right - h_left w.r.t. the component traversal
    bool jump_valid = false;
};

struct LocusComponent {
    std::vector<int> nodes;   // ordered along the polyline
    bool closed = false;
};

struct RayCrossing {
    double t = 0.0;       // ray parameter
    Vec2 point;           // unreduced (ray frame)
    int segment = -1;     // global segment index
};

struct PathCrossing {
    double s = 0.0;       // path parameter in [0,1]
    Vec2 point;           // path frame
    int segment = -1;
    int node_near = -1;   // nearest locus node
};

class CandidateLocus {
public:
    CandidateLocus() = default;

    // Synthetic candidates.
    static CandidateLocus circle(Vec2 center, double radius, int n = 2048);
    static CandidateLocus segment(Vec2 a, Vec2 b, int n = 64);
    static CandidateLocus point(Vec2 p);

    std::vector<LocusNode> nodes;
    std::vector<LocusComponent> components;

    bool empty() const { return nodes.empty(); }
    int node_count() const { return static_cast<int>(nodes.size()); }

    // Geometric queries (wrap-aware when the chart is periodic). The spatial
    // index is built lazily on first use after freeze().
    void freeze(const Chart& chart);
    double distance_to(Vec2 p) const;
    std::optional<RayCrossing> first_ray_crossing(Vec2 origin, Vec2 dir, double t_max) const;
    std::vector<PathCrossing> path_crossings(Vec2 a, Vec2 b) const;

    // Unit tangent at a node of a component (from its polyline neighbors).
    Vec2 node_tangent(int component, int pos_in_component) const;
    std::optional<Vec2> tangent_of_node(int node_id) const;

    double total_arclength() const;
    double component_arclength(int c) const;
    double polyline_step() const;  // median segment length

    double hausdorff_to(const CandidateLocus& other, const Chart& chart) const;

    // Resolve per-node (h_left, h_right, jump) from stored arrivals.
    void finalize_side_values();

    const Chart& chart() const { return chart_; }

    struct Segment {
        Vec2 a, d;  // segment = a + s*d, s in [0,1]
        int component = -1, node_a = -1, node_b = -1;
    };
    const std::vector<Segment>& segments() const { return segments_; }
    const std::vector<int>& isolated_points() const { return isolated_; }

private:
    void build_index() const;

    Chart chart_{};
    bool frozen_ = false;
    std::vector<Segment> segments_;
    std::vector<int> isolated_;  // node ids of point components

    // Uniform grid over the working window.
    mutable bool index_built_ = false;
    mutable double cell_ = 0.05;
    mutable int nx_ = 0, ny_ = 0;
    mutable Vec2 grid_origin_;
    mutable std::vector<std::vector<int>> cells_;
    std::vector<int> cell_candidates(Vec2 p) const;
    friend class LocusBuilder;
};

// Clusters raw sweep points into nodes, groups them by arrival pair, chains
// each group into polylines and attaches junctions and edge tips.
class LocusBuilder {
public:
    explicit LocusBuilder(const Chart& chart, double pos_cluster_tol, double cluster_tol);
    void add_point(Vec2 pos, NodeArrival arrival);
    void add_junction(Vec2 pos, std::vector<NodeArrival> arrivals);
    void add_edge_tip(Vec2 pos, NodeArrival arrival);
    CandidateLocus build();

private:
    struct Raw {
        Vec2 pos;
        std::vector<NodeArrival> arrivals;
        bool junction = false, edge_tip = false;
    };
    Chart chart_;
    double pos_tol_, dir_tol_;
    std::vector<Raw> raw_;
};

}  // namespace splitloci
