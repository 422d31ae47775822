#include "splitloci/locus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <tuple>

namespace splitloci {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Vec2 wrap_shift_near(const Chart& chart, Vec2 target, Vec2 base) {
    // Lattice shift m with base + m closest to target (torus only).
    if (!chart.periodic()) return {0, 0};
    return {std::round(target.x - base.x), std::round(target.y - base.y)};
}

double point_segment_dist(Vec2 p, Vec2 a, Vec2 d) {
    double dd = norm2(d);
    double s = dd > 0 ? std::clamp(dot(p - a, d) / dd, 0.0, 1.0) : 0.0;
    return norm(p - (a + d * s));
}

}  // namespace

std::string label_name(PointLabel label) {
    switch (label) {
        case PointLabel::Unclassified: return "unclassified";
        case PointLabel::Cleave: return "cleave";
        case PointLabel::DegenerateCleave: return "degenerate-cleave";
        case PointLabel::Edge: return "edge";
        case PointLabel::Crossing: return "crossing";
        case PointLabel::Remainder: return "remainder";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Synthetic candidates.
// ---------------------------------------------------------------------------

CandidateLocus CandidateLocus::circle(Vec2 center, double radius, int n) {
    CandidateLocus out;
    LocusComponent comp;
    comp.closed = true;
    for (int k = 0; k < n; ++k) {
        double t = 2.0 * std::numbers::pi * k / n;
        LocusNode node;
        node.pos = center + Vec2{radius * std::cos(t), radius * std::sin(t)};
        comp.nodes.push_back(static_cast<int>(out.nodes.size()));
        out.nodes.push_back(node);
    }
    out.components.push_back(std::move(comp));
    return out;
}

CandidateLocus CandidateLocus::segment(Vec2 a, Vec2 b, int n) {
    CandidateLocus out;
    LocusComponent comp;
    for (int k = 0; k <= n; ++k) {
        double s = static_cast<double>(k) / n;
        LocusNode node;
        node.pos = a + (b - a) * s;
        comp.nodes.push_back(static_cast<int>(out.nodes.size()));
        out.nodes.push_back(node);
    }
    out.components.push_back(std::move(comp));
    return out;
}

CandidateLocus CandidateLocus::point(Vec2 p) {
    CandidateLocus out;
    LocusNode node;
    node.pos = p;
    out.nodes.push_back(node);
    LocusComponent comp;
    comp.nodes.push_back(0);
    out.components.push_back(std::move(comp));
    return out;
}

// ---------------------------------------------------------------------------
// Freezing and the spatial index.
// ---------------------------------------------------------------------------

void CandidateLocus::freeze(const Chart& chart) {
    chart_ = chart;
    segments_.clear();
    isolated_.clear();
    for (size_t c = 0; c < components.size(); ++c) {
        const auto& comp = components[c];
        if (comp.nodes.size() == 1) {
            isolated_.push_back(comp.nodes[0]);
            continue;
        }
        size_t m = comp.nodes.size();
        size_t last = comp.closed ? m : m - 1;
        for (size_t k = 0; k < last; ++k) {
            int ia = comp.nodes[k];
            int ib = comp.nodes[(k + 1) % m];
            Segment seg;
            seg.a = nodes[ia].pos;
            seg.d = chart.displacement(nodes[ia].pos, nodes[ib].pos);
            seg.component = static_cast<int>(c);
            seg.node_a = ia;
            seg.node_b = ib;
            if (norm2(seg.d) > 0) segments_.push_back(seg);
        }
    }
    frozen_ = true;
    index_built_ = false;
}

void CandidateLocus::build_index() const {
    double med = 0.02;
    if (!segments_.empty()) {
        std::vector<double> lens;
        lens.reserve(segments_.size());
        for (const auto& s : segments_) lens.push_back(norm(s.d));
        std::nth_element(lens.begin(), lens.begin() + lens.size() / 2, lens.end());
        med = std::max(1e-6, lens[lens.size() / 2]);
    }
    cell_ = std::max(2.0 * med, 1e-3);

    double x0, y0, w, h;
    if (chart_.periodic()) {
        x0 = 0; y0 = 0; w = 1; h = 1;
        cell_ = std::min(cell_, 0.25);
    } else {
        double lo_x = kInf, lo_y = kInf, hi_x = -kInf, hi_y = -kInf;
        for (const auto& n : nodes) {
            lo_x = std::min(lo_x, n.pos.x); hi_x = std::max(hi_x, n.pos.x);
            lo_y = std::min(lo_y, n.pos.y); hi_y = std::max(hi_y, n.pos.y);
        }
        if (nodes.empty()) { lo_x = lo_y = 0; hi_x = hi_y = 1; }
        x0 = lo_x - 2 * cell_; y0 = lo_y - 2 * cell_;
        w = (hi_x - lo_x) + 4 * cell_; h = (hi_y - lo_y) + 4 * cell_;
    }
    grid_origin_ = {x0, y0};
    nx_ = std::max(1, static_cast<int>(std::ceil(w / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(h / cell_)));
    cells_.assign(static_cast<size_t>(nx_) * ny_, {});

    auto insert_box = [&](double ax, double ay, double bx, double by, int id) {
        int ix0 = static_cast<int>(std::floor((std::min(ax, bx) - grid_origin_.x) / cell_)) - 1;
        int ix1 = static_cast<int>(std::floor((std::max(ax, bx) - grid_origin_.x) / cell_)) + 1;
        int iy0 = static_cast<int>(std::floor((std::min(ay, by) - grid_origin_.y) / cell_)) - 1;
        int iy1 = static_cast<int>(std::floor((std::max(ay, by) - grid_origin_.y) / cell_)) + 1;
        for (int ix = ix0; ix <= ix1; ++ix)
            for (int iy = iy0; iy <= iy1; ++iy) {
                int jx = ix, jy = iy;
                if (chart_.periodic()) {
                    jx = ((ix % nx_) + nx_) % nx_;
                    jy = ((iy % ny_) + ny_) % ny_;
                } else if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) {
                    continue;
                }
                cells_[static_cast<size_t>(jx) * ny_ + jy].push_back(id);
            }
    };
    for (size_t i = 0; i < segments_.size(); ++i) {
        Vec2 a = chart_.reduce(segments_[i].a);
        Vec2 b = a + segments_[i].d;
        insert_box(a.x, a.y, b.x, b.y, static_cast<int>(i));
    }
    // Isolated points use negative ids offset by 1.
    for (size_t i = 0; i < isolated_.size(); ++i) {
        Vec2 p = chart_.reduce(nodes[isolated_[i]].pos);
        insert_box(p.x, p.y, p.x, p.y, -static_cast<int>(i) - 1);
    }
    index_built_ = true;
}

std::vector<int> CandidateLocus::cell_candidates(Vec2 p) const {
    std::vector<int> out;
    if (!index_built_) build_index();
    Vec2 q = chart_.periodic() ? chart_.reduce(p) : p;
    int ix = static_cast<int>(std::floor((q.x - grid_origin_.x) / cell_));
    int iy = static_cast<int>(std::floor((q.y - grid_origin_.y) / cell_));
    for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
            int jx = ix + dx, jy = iy + dy;
            if (chart_.periodic()) {
                jx = ((jx % nx_) + nx_) % nx_;
                jy = ((jy % ny_) + ny_) % ny_;
            } else if (jx < 0 || jy < 0 || jx >= nx_ || jy >= ny_) {
                continue;
            }
            const auto& cell = cells_[static_cast<size_t>(jx) * ny_ + jy];
            out.insert(out.end(), cell.begin(), cell.end());
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double CandidateLocus::distance_to(Vec2 p) const {
    if (!frozen_ || nodes.empty()) return kInf;
    if (!index_built_) build_index();
    double best = kInf;
    auto consider = [&](int id) {
        if (id >= 0) {
            const auto& s = segments_[id];
            Vec2 m = wrap_shift_near(chart_, p, s.a + s.d * 0.5);
            best = std::min(best, point_segment_dist(p, s.a + m, s.d));
        } else {
            const auto& n = nodes[isolated_[-id - 1]];
            Vec2 m = wrap_shift_near(chart_, p, n.pos);
            best = std::min(best, norm(p - (n.pos + m)));
        }
    };
    for (int id : cell_candidates(p)) consider(id);
    if (best <= cell_) return best;
    // Rare: query far from the locus, fall back to a full scan.
    for (size_t i = 0; i < segments_.size(); ++i) consider(static_cast<int>(i));
    for (size_t i = 0; i < isolated_.size(); ++i) consider(-static_cast<int>(i) - 1);
    return best;
}

std::optional<RayCrossing> CandidateLocus::first_ray_crossing(Vec2 origin, Vec2 dir,
                                                              double t_max) const {
    if (!frozen_ || nodes.empty() || t_max <= 0) return std::nullopt;
    if (!index_built_) build_index();
    const double point_hit_tol = 1e-5;
    double speed = norm(dir);
    if (speed == 0) return std::nullopt;
    double step = 0.45 * cell_ / speed;
    double best_t = kInf;
    RayCrossing best;

    auto consider = [&](int id, Vec2 probe) {
        if (id >= 0) {
            const auto& s = segments_[id];
            Vec2 m = wrap_shift_near(chart_, probe, s.a + s.d * 0.5);
            Vec2 a = s.a + m;
            double denom = cross(dir, s.d);
            if (std::abs(denom) < 1e-14) return;
            Vec2 rel = a - origin;
            double t = cross(rel, s.d) / denom;
            double u = cross(rel, dir) / denom;
            if (u < -1e-12 || u > 1 + 1e-12) return;
            if (t < 1e-12 || t > t_max + 1e-12) return;
            if (t < best_t) best_t = t, best = RayCrossing{t, origin + dir * t, id};
        } else {
            const auto& n = nodes[isolated_[-id - 1]];
            Vec2 m = wrap_shift_near(chart_, probe, n.pos);
            Vec2 q = n.pos + m;
            double t = dot(q - origin, dir) / (speed * speed);
            if (t < 1e-12 || t > t_max) return;
            if (norm(q - (origin + dir * t)) <= point_hit_tol && t < best_t)
                best_t = t, best = RayCrossing{t, origin + dir * t, id};
        }
    };

    double t = 0.0;
    while (t <= t_max + step) {
        Vec2 probe = origin + dir * std::min(t, t_max);
        for (int id : cell_candidates(probe)) consider(id, probe);
        if (best_t < t) break;  // walked past the earliest crossing
        t += step;
    }
    if (best_t == kInf) return std::nullopt;
    return best;
}

std::vector<PathCrossing> CandidateLocus::path_crossings(Vec2 a, Vec2 b) const {
    std::vector<PathCrossing> out;
    if (!frozen_ || nodes.empty()) return out;
    if (!index_built_) build_index();
    Vec2 d = b - a;
    double len = norm(d);
    if (len == 0) return out;
    double step = 0.45 * cell_ / len;
    std::vector<std::pair<double, int>> seen;  // (s, segment)
    double s = 0.0;
    while (s <= 1.0 + step) {
        Vec2 probe = a + d * std::min(s, 1.0);
        for (int id : cell_candidates(probe)) {
            if (id < 0) continue;
            const auto& seg = segments_[id];
            Vec2 m = wrap_shift_near(chart_, probe, seg.a + seg.d * 0.5);
            Vec2 sa = seg.a + m;
            double denom = cross(d, seg.d);
            if (std::abs(denom) < 1e-14) continue;
            Vec2 rel = sa - a;
            double sp = cross(rel, seg.d) / denom;
            double u = cross(rel, d) / denom;
            if (u < -1e-12 || u > 1 + 1e-12) continue;
            if (sp < 1e-9 || sp > 1 - 1e-9) continue;
            bool dup = false;
            for (auto& [s0, id0] : seen)
                if (std::abs(s0 - sp) < 1e-12 && id0 == id) dup = true;
            if (!dup) seen.emplace_back(sp, id);
        }
        s += step;
    }
    std::sort(seen.begin(), seen.end());
    for (auto& [sp, id] : seen) {
        PathCrossing pc;
        pc.s = sp;
        pc.point = a + d * sp;
        pc.segment = id;
        const auto& seg = segments_[id];
        double da = norm(chart_.displacement(pc.point, nodes[seg.node_a].pos));
        double db = norm(chart_.displacement(pc.point, nodes[seg.node_b].pos));
        pc.node_near = da < db ? seg.node_a : seg.node_b;
        out.push_back(pc);
    }
    return out;
}

Vec2 CandidateLocus::node_tangent(int component, int pos_in_component) const {
    const auto& comp = components[component];
    int m = static_cast<int>(comp.nodes.size());
    if (m < 2) return {0, 0};
    auto wrap = [&](int i) { return ((i % m) + m) % m; };
    int prev = comp.closed ? wrap(pos_in_component - 1) : std::max(0, pos_in_component - 1);
    int next = comp.closed ? wrap(pos_in_component + 1) : std::min(m - 1, pos_in_component + 1);
    Vec2 d = chart_.displacement(nodes[comp.nodes[prev]].pos, nodes[comp.nodes[next]].pos);
    return normalized(d);
}

std::optional<Vec2> CandidateLocus::tangent_of_node(int node_id) const {
    for (size_t c = 0; c < components.size(); ++c) {
        const auto& comp = components[c];
        for (size_t k = 0; k < comp.nodes.size(); ++k)
            if (comp.nodes[k] == node_id) {
                Vec2 t = node_tangent(static_cast<int>(c), static_cast<int>(k));
                if (norm2(t) > 0) return t;
            }
    }
    return std::nullopt;
}

double CandidateLocus::component_arclength(int c) const {
    double acc = 0.0;
    const auto& comp = components[c];
    size_t m = comp.nodes.size();
    if (m < 2) return 0.0;
    size_t last = comp.closed ? m : m - 1;
    for (size_t k = 0; k < last; ++k)
        acc += norm(chart_.displacement(nodes[comp.nodes[k]].pos, nodes[comp.nodes[(k + 1) % m]].pos));
    return acc;
}

double CandidateLocus::total_arclength() const {
    double acc = 0.0;
    for (size_t c = 0; c < components.size(); ++c) acc += component_arclength(static_cast<int>(c));
    return acc;
}

double CandidateLocus::polyline_step() const {
    if (segments_.empty()) return 0.0;
    std::vector<double> lens;
    lens.reserve(segments_.size());
    for (const auto& s : segments_) lens.push_back(norm(s.d));
    std::nth_element(lens.begin(), lens.begin() + lens.size() / 2, lens.end());
    return lens[lens.size() / 2];
}

double CandidateLocus::hausdorff_to(const CandidateLocus& other, const Chart& chart) const {
    auto one_sided = [&chart](const CandidateLocus& from, const CandidateLocus& to) {
        double worst = 0.0;
        for (const auto& n : from.nodes) worst = std::max(worst, to.distance_to(n.pos));
        for (const auto& s : from.segments())
            for (int k = 1; k < 4; ++k) {
                Vec2 p = chart.reduce(s.a + s.d * (k / 4.0));
                worst = std::max(worst, to.distance_to(p));
            }
        return worst;
    };
    return std::max(one_sided(*this, other), one_sided(other, *this));
}

void CandidateLocus::finalize_side_values() {
    for (size_t c = 0; c < components.size(); ++c) {
        const auto& comp = components[c];
        for (size_t k = 0; k < comp.nodes.size(); ++k) {
            LocusNode& node = nodes[comp.nodes[k]];
            if (node.arrivals.size() != 2) continue;
            Vec2 tau = node_tangent(static_cast<int>(c), static_cast<int>(k));
            if (norm2(tau) == 0) continue;
            double c0 = cross(tau, node.arrivals[0].direction);
            double c1 = cross(tau, node.arrivals[1].direction);
            if (c0 * c1 >= 0) continue;  // not transversal
            const NodeArrival& from_left = c0 < 0 ? node.arrivals[0] : node.arrivals[1];
            const NodeArrival& from_right = c0 < 0 ? node.arrivals[1] : node.arrivals[0];
            node.h_left = from_left.value;
            node.h_right = from_right.value;
            node.jump = node.h_right - node.h_left;
            node.jump_valid = true;
        }
    }
}

// ---------------------------------------------------------------------------
// LocusBuilder: cluster, group, chain.
// ---------------------------------------------------------------------------

LocusBuilder::LocusBuilder(const Chart& chart, double pos_cluster_tol, double cluster_tol)
    : chart_(chart), pos_tol_(pos_cluster_tol), dir_tol_(cluster_tol) {}

void LocusBuilder::add_point(Vec2 pos, NodeArrival arrival) {
    Raw r;
    r.pos = chart_.reduce(pos);
    r.arrivals.push_back(std::move(arrival));
    raw_.push_back(std::move(r));
}

void LocusBuilder::add_junction(Vec2 pos, std::vector<NodeArrival> arrivals) {
    Raw r;
    r.pos = chart_.reduce(pos);
    r.arrivals = std::move(arrivals);
    r.junction = true;
    raw_.push_back(std::move(r));
}

void LocusBuilder::add_edge_tip(Vec2 pos, NodeArrival arrival) {
    Raw r;
    r.pos = chart_.reduce(pos);
    r.arrivals.push_back(std::move(arrival));
    r.edge_tip = true;
    raw_.push_back(std::move(r));
}

namespace {

struct PairKey {
    int c1 = -1, c2 = -1, dx = 0, dy = 0;
    bool operator<(const PairKey& o) const {
        return std::tie(c1, c2, dx, dy) < std::tie(o.c1, o.c2, o.dx, o.dy);
    }
};

PairKey make_pair_key(const NodeArrival& a, const NodeArrival& b) {
    PairKey key;
    int dx = static_cast<int>(std::lround(b.copy_shift.x - a.copy_shift.x));
    int dy = static_cast<int>(std::lround(b.copy_shift.y - a.copy_shift.y));
    if (a.component <= b.component) {
        key.c1 = a.component; key.c2 = b.component;
    } else {
        key.c1 = b.component; key.c2 = a.component;
        dx = -dx; dy = -dy;
    }
    if (dx < 0 || (dx == 0 && dy < 0)) { dx = -dx; dy = -dy; }
    key.dx = dx; key.dy = dy;
    return key;
}

}  // namespace

CandidateLocus LocusBuilder::build() {
    CandidateLocus out;
    if (raw_.empty()) return out;

    // 1. Union-find position clustering, sweep over x to limit pair tests.
    size_t n = raw_.size();
    std::vector<int> parent(n);
    for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    std::vector<int> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return raw_[a].pos.x < raw_[b].pos.x; });
    for (size_t oi = 0; oi < n; ++oi) {
        for (size_t oj = oi + 1; oj < n; ++oj) {
            int i = order[oi], j = order[oj];
            double dxp = raw_[j].pos.x - raw_[i].pos.x;
            if (dxp > pos_tol_ && (!chart_.periodic() || dxp < 1.0 - pos_tol_)) break;
            if (norm(chart_.displacement(raw_[i].pos, raw_[j].pos)) <= pos_tol_)
                parent[find(i)] = find(j);
        }
    }

    std::map<int, std::vector<int>> groups;
    for (size_t i = 0; i < n; ++i) groups[find(static_cast<int>(i))].push_back(static_cast<int>(i));

    // 2. Merge clusters into nodes; dedup arrivals by direction and value.
    for (auto& [root, members] : groups) {
        LocusNode node;
        Vec2 ref = raw_[members[0]].pos;
        Vec2 acc{0, 0};
        bool junction = false, edge_tip = false;
        for (int m : members) {
            acc += ref + chart_.displacement(ref, raw_[m].pos);
            junction = junction || raw_[m].junction;
            edge_tip = edge_tip || raw_[m].edge_tip;
            for (auto& arr : raw_[m].arrivals) {
                bool dup = false;
                for (auto& have : node.arrivals)
                    if (arr.component == have.component &&
                        angle_between(arr.direction, have.direction) < dir_tol_ &&
                        std::abs(arr.value - have.value) < 1e-6)
                        dup = true;
                if (!dup) node.arrivals.push_back(arr);
            }
        }
        node.pos = chart_.reduce(acc / static_cast<double>(members.size()));
        node.junction = junction || node.arrivals.size() >= 3;
        node.edge_tip = edge_tip;
        out.nodes.push_back(std::move(node));
    }

    // 3. Group two-arrival nodes by their arrival pair; junctions, edge tips
    //    and odd nodes become attachments.
    std::map<PairKey, std::vector<int>> branches;
    std::vector<int> attachments;
    for (size_t i = 0; i < out.nodes.size(); ++i) {
        const auto& node = out.nodes[i];
        if (node.junction || node.edge_tip || node.arrivals.size() != 2)
            attachments.push_back(static_cast<int>(i));
        else
            branches[make_pair_key(node.arrivals[0], node.arrivals[1])].push_back(static_cast<int>(i));
    }

    if (branches.empty() && out.nodes.size() == 1) {
        LocusComponent comp;
        comp.nodes.push_back(0);
        out.components.push_back(comp);
        return out;
    }

    // 4. Chain each branch through mutual nearest-neighbor adjacency.
    auto dist = [&](int a, int b) {
        return norm(chart_.displacement(out.nodes[a].pos, out.nodes[b].pos));
    };
    std::vector<std::pair<int, int>> open_ends;  // (component id, end node id)
    for (auto& [key, ids] : branches) {
        size_t m = ids.size();
        if (m == 1) {
            LocusComponent comp;
            comp.nodes.push_back(ids[0]);
            open_ends.emplace_back(static_cast<int>(out.components.size()), ids[0]);
            out.components.push_back(comp);
            continue;
        }
        std::vector<std::vector<std::pair<double, int>>> near(m);
        std::vector<double> nn(m, kInf);
        for (size_t i = 0; i < m; ++i) {
            for (size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                near[i].emplace_back(dist(ids[i], ids[j]), static_cast<int>(j));
            }
            std::sort(near[i].begin(), near[i].end());
            if (near[i].size() > 8) near[i].resize(8);
            nn[i] = near[i].empty() ? kInf : near[i][0].first;
        }
        std::vector<double> nn_sorted = nn;
        std::nth_element(nn_sorted.begin(), nn_sorted.begin() + m / 2, nn_sorted.end());
        double gap_limit = std::max(4.0 * nn_sorted[m / 2], 10 * pos_tol_);

        std::vector<std::vector<int>> adj(m);
        for (size_t i = 0; i < m; ++i)
            for (auto& [d, j] : near[i]) {
                if (d > gap_limit || adj[i].size() >= 2) break;
                if (adj[j].size() >= 2) continue;
                if (std::find(adj[i].begin(), adj[i].end(), j) != adj[i].end()) continue;
                adj[i].push_back(j);
                adj[j].push_back(static_cast<int>(i));
            }

        std::vector<char> used(m, 0);
        auto walk = [&](int start) {
            std::vector<int> chain{start};
            used[start] = 1;
            int cur = start, prev = -1;
            while (true) {
                int nxt = -1;
                for (int cand : adj[cur])
                    if (cand != prev && !used[cand]) { nxt = cand; break; }
                if (nxt < 0) break;
                chain.push_back(nxt);
                used[nxt] = 1;
                prev = cur;
                cur = nxt;
            }
            return chain;
        };

        for (size_t i = 0; i < m; ++i) {
            if (used[i] || adj[i].size() > 1) continue;
            auto chain = walk(static_cast<int>(i));
            LocusComponent comp;
            for (int k : chain) comp.nodes.push_back(ids[k]);
            open_ends.emplace_back(static_cast<int>(out.components.size()), comp.nodes.front());
            open_ends.emplace_back(static_cast<int>(out.components.size()), comp.nodes.back());
            out.components.push_back(std::move(comp));
        }
        for (size_t i = 0; i < m; ++i) {
            if (used[i]) continue;
            auto chain = walk(static_cast<int>(i));
            if (chain.empty()) continue;
            LocusComponent comp;
            for (int k : chain) comp.nodes.push_back(ids[k]);
            comp.closed = chain.size() > 2;
            out.components.push_back(std::move(comp));
        }
    }

    // 5. Attach junctions and edge tips to nearby open chain ends.
    double attach_gap = 10 * pos_tol_;
    {
        std::vector<double> steps;
        for (const auto& comp : out.components)
            for (size_t k = 0; k + 1 < comp.nodes.size(); ++k)
                steps.push_back(dist(comp.nodes[k], comp.nodes[k + 1]));
        if (!steps.empty()) {
            std::nth_element(steps.begin(), steps.begin() + steps.size() / 2, steps.end());
            attach_gap = std::max(attach_gap, 8.0 * steps[steps.size() / 2]);
        }
    }
    for (int a : attachments) {
        bool attached = false;
        for (auto& [cid, end_node] : open_ends) {
            auto& comp = out.components[cid];
            if (comp.closed || comp.nodes.empty()) continue;
            bool at_front = comp.nodes.front() == end_node;
            bool at_back = comp.nodes.back() == end_node;
            if (!at_front && !at_back) continue;  // end consumed by an earlier attach
            double d = dist(a, end_node);
            if (d > attach_gap) continue;
            if (at_front) comp.nodes.insert(comp.nodes.begin(), a);
            else comp.nodes.push_back(a);
            end_node = a;  // junction now terminates this end
            attached = true;
        }
        if (!attached) {
            LocusComponent comp;
            comp.nodes.push_back(a);
            out.components.push_back(comp);
        }
    }

    return out;
}

}  // namespace splitloci
