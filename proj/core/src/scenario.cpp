#include "splitloci/scenario.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "splitloci/parallel.hpp"

namespace splitloci {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, int line) {
    try {
        size_t pos;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ScenarioParseError(line, "expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& v, int line) {
    try {
        size_t pos;
        int d = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ScenarioParseError(line, "expected an integer, got '" + v + "'");
    }
}

// g value grammar: "<number>" | "sin amp=A k=K phase=P offset=C" | "table v0,v1,..."
GSpec parse_gspec(const std::string& v, int line) {
    std::istringstream in(v);
    std::string head;
    in >> head;
    if (head == "sin") {
        GSinusoid s;
        std::string tok;
        while (in >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) throw ScenarioParseError(line, "bad sinusoid field '" + tok + "'");
            std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "amp") s.amplitude = parse_double(val, line);
            else if (key == "k") s.harmonic = parse_int(val, line);
            else if (key == "phase") s.phase = parse_double(val, line);
            else if (key == "offset") s.offset = parse_double(val, line);
            else throw ScenarioParseError(line, "unknown sinusoid field '" + key + "'");
        }
        return s;
    }
    if (head == "table") {
        GTable t;
        std::string rest;
        std::getline(in, rest);
        std::istringstream items(rest);
        std::string item;
        while (std::getline(items, item, ',')) {
            item = trim(item);
            if (!item.empty()) t.values.push_back(parse_double(item, line));
        }
        if (t.values.size() < 4) throw ScenarioParseError(line, "g table needs at least 4 values");
        return t;
    }
    return GConstant{parse_double(trim(v), line)};
}

}  // namespace

ScenarioSpec parse_scenario_text(const std::string& text) {
    ScenarioSpec spec;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;

    // Chart keys arrive before we know the final chart; collect then build.
    std::map<std::string, std::pair<std::string, int>> chart_kv;
    std::map<std::string, std::pair<std::string, int>> g_kv;
    bool family_seen = false;

    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ScenarioParseError(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "chart" && section != "hamiltonian" && section != "boundary" &&
                section != "family" && section != "tolerances" && section != "run")
                throw ScenarioParseError(line, "unknown section [" + section + "]");
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ScenarioParseError(line, "expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key.empty()) throw ScenarioParseError(line, "empty key");
        if (section.empty()) throw ScenarioParseError(line, "key outside any section");

        if (section == "chart") {
            chart_kv[key] = {val, line};
        } else if (section == "hamiltonian") {
            if (key == "kind") {
                if (val == "euclidean") spec.metric_kind = MetricKind::Euclidean;
                else if (val == "randers") spec.metric_kind = MetricKind::Randers;
                else throw ScenarioParseError(line, "unknown hamiltonian kind '" + val + "'");
            } else if (key == "b_x") spec.drift.x = parse_double(val, line);
            else if (key == "b_y") spec.drift.y = parse_double(val, line);
            else throw ScenarioParseError(line, "unknown hamiltonian key '" + key + "'");
        } else if (section == "boundary") {
            if (key == "samples") spec.boundary_samples = parse_int(val, line);
            else if (key == "g" || key.rfind("g.", 0) == 0) g_kv[key] = {val, line};
            else throw ScenarioParseError(line, "unknown boundary key '" + key + "'");
        } else if (section == "family") {
            family_seen = true;
            auto& f = spec.family;
            if (key == "mode") {
                if (val == "component-offsets") f.mode = FamilySpec::Mode::ComponentOffsets;
                else if (val == "torus-lattice") f.mode = FamilySpec::Mode::TorusLattice;
                else if (val == "none") f.mode = FamilySpec::Mode::None;
                else throw ScenarioParseError(line, "unknown family mode '" + val + "'");
            } else if (key == "offset_component") f.offset_component = parse_int(val, line);
            else if (key == "a_min") f.a_min = parse_double(val, line);
            else if (key == "a_max") f.a_max = parse_double(val, line);
            else if (key == "a_steps") f.a_steps = parse_int(val, line);
            else if (key == "ax_min") f.ax_min = parse_double(val, line);
            else if (key == "ax_max") f.ax_max = parse_double(val, line);
            else if (key == "ax_steps") f.ax_steps = parse_int(val, line);
            else if (key == "ay_min") f.ay_min = parse_double(val, line);
            else if (key == "ay_max") f.ay_max = parse_double(val, line);
            else if (key == "ay_steps") f.ay_steps = parse_int(val, line);
            else throw ScenarioParseError(line, "unknown family key '" + key + "'");
        } else if (section == "tolerances") {
            auto& t = spec.tol;
            if (key == "dt") t.dt = parse_double(val, line);
            else if (key == "t_cap") t.t_cap = parse_double(val, line);
            else if (key == "fd_step") t.fd_step = parse_double(val, line);
            else if (key == "sigma_tol_rel") t.sigma_tol_rel = parse_double(val, line);
            else if (key == "det_zero_min") t.det_zero_min = parse_double(val, line);
            else if (key == "conj_bisect_tol") t.conj_bisect_tol = parse_double(val, line);
            else if (key == "rho_bisect_tol") t.rho_bisect_tol = parse_double(val, line);
            else if (key == "cut_delta_tol") t.cut_delta_tol = parse_double(val, line);
            else if (key == "dir_tol") t.dir_tol = parse_double(val, line);
            else if (key == "value_gap") t.value_gap = parse_double(val, line);
            else if (key == "cluster_tol") t.cluster_tol = parse_double(val, line);
            else if (key == "pos_cluster_tol") t.pos_cluster_tol = parse_double(val, line);
            else if (key == "match_tol_factor") t.match_tol_factor = parse_double(val, line);
            else if (key == "dense_tol_factor") t.dense_tol_factor = parse_double(val, line);
            else if (key == "balanced_tol") t.balanced_tol = parse_double(val, line);
            else if (key == "conj_flag_tol") t.conj_flag_tol = parse_double(val, line);
            else if (key == "node_match_tol") t.node_match_tol = parse_double(val, line);
            else if (key == "edge_touch_tol") t.edge_touch_tol = parse_double(val, line);
            else if (key == "hyperbola_step") t.hyperbola_step = parse_double(val, line);
            else if (key == "lattice_range") t.lattice_range = parse_int(val, line);
            else if (key == "continuum_cap") t.continuum_cap = parse_int(val, line);
            else throw ScenarioParseError(line, "unknown tolerance key '" + key + "'");
        } else if (section == "run") {
            if (key == "seed") spec.seed = static_cast<std::uint64_t>(parse_int(val, line));
            else if (key == "grid") spec.grid_n = parse_int(val, line);
            else throw ScenarioParseError(line, "unknown run key '" + key + "'");
        }
    }

    // Build the chart.
    auto take = [&](const std::string& key) -> std::optional<std::pair<std::string, int>> {
        auto it = chart_kv.find(key);
        if (it == chart_kv.end()) return std::nullopt;
        auto v = it->second;
        chart_kv.erase(it);
        return v;
    };
    auto kind_kv = take("kind");
    if (!kind_kv) throw ScenarioParseError(1, "missing [chart] kind");
    const std::string kind = kind_kv->first;
    if (kind == "annulus") {
        double r_in = 1.0, r_out = 2.0;
        if (auto v = take("r_in")) r_in = parse_double(v->first, v->second);
        if (auto v = take("r_out")) r_out = parse_double(v->first, v->second);
        spec.chart = Chart::annulus(r_in, r_out);
    } else if (kind == "disk") {
        double radius = 1.0;
        if (auto v = take("radius")) radius = parse_double(v->first, v->second);
        spec.chart = Chart::disk(radius);
    } else if (kind == "torus") {
        Vec2 src{0.5, 0.5};
        double r = 0.1;
        if (auto v = take("source_x")) src.x = parse_double(v->first, v->second);
        if (auto v = take("source_y")) src.y = parse_double(v->first, v->second);
        if (auto v = take("source_r")) r = parse_double(v->first, v->second);
        spec.chart = Chart::flat_torus(src, r);
    } else if (kind == "ellipse") {
        double a = 1.5, b = 1.0;
        if (auto v = take("a")) a = parse_double(v->first, v->second);
        if (auto v = take("b")) b = parse_double(v->first, v->second);
        spec.chart = Chart::ellipse(a, b);
    } else {
        throw ScenarioParseError(kind_kv->second, "unknown chart kind '" + kind + "'");
    }
    if (!chart_kv.empty()) {
        auto& bad = *chart_kv.begin();
        throw ScenarioParseError(bad.second.second,
                                 "unknown chart key '" + bad.first + "' for kind " + kind);
    }

    // Boundary data: match g keys to the chart components.
    auto comps = chart_boundary(spec.chart);
    spec.g.assign(comps.size(), GConstant{0.0});
    for (auto& [key, vl] : g_kv) {
        if (key == "g") {
            for (auto& gs : spec.g) gs = parse_gspec(vl.first, vl.second);
            continue;
        }
        std::string name = key.substr(2);
        bool found = false;
        for (size_t c = 0; c < comps.size(); ++c)
            if (comps[c].name() == name) {
                spec.g[c] = parse_gspec(vl.first, vl.second);
                found = true;
            }
        if (!found)
            throw ScenarioParseError(vl.second, "no boundary component named '" + name + "'");
    }

    (void)family_seen;
    if (spec.boundary_samples < 8) throw ScenarioParseError(1, "boundary samples must be >= 8");
    if (spec.grid_n < 4) throw ScenarioParseError(1, "grid must be >= 4");
    return spec;
}

ScenarioSpec parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioParseError(0, "cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

// ---------------------------------------------------------------------------

std::string ScenarioSpec::canonical_text() const {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "chart=" << chart.describe();
    out << ";metric=" << (metric_kind == MetricKind::Euclidean ? "euclidean" : "randers");
    out << ";b=" << drift.x << "," << drift.y;
    out << ";samples=" << boundary_samples;
    for (const auto& gs : g) {
        if (const auto* c = std::get_if<GConstant>(&gs)) out << ";g=const:" << c->value;
        else if (const auto* s = std::get_if<GSinusoid>(&gs))
            out << ";g=sin:" << s->offset << "," << s->amplitude << "," << s->harmonic << "," << s->phase;
        else {
            out << ";g=table:";
            for (double v : std::get<GTable>(gs).values) out << v << ",";
        }
    }
    out << ";family=" << static_cast<int>(family.mode) << "," << family.offset_component << ","
        << family.a_min << "," << family.a_max << "," << family.a_steps << "," << family.ax_min
        << "," << family.ax_max << "," << family.ax_steps << "," << family.ay_min << ","
        << family.ay_max << "," << family.ay_steps;
    out << ";dt=" << tol.dt << ";t_cap=" << tol.t_cap << ";seed=" << seed << ";grid=" << grid_n;
    return out.str();
}

std::string ScenarioSpec::digest() const {
    // FNV-1a 64-bit.
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical_text()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

// ---------------------------------------------------------------------------

Scenario Scenario::build(const ScenarioSpec& spec) {
    Scenario sc;
    sc.spec_ = spec;
    sc.metric_ = Hamiltonian(spec.metric_kind, spec.drift);
    sc.components_ = chart_boundary(spec.chart);
    sc.g_ = spec.g;
    if (sc.g_.empty()) sc.g_.assign(sc.components_.size(), GConstant{0.0});
    if (sc.g_.size() != sc.components_.size())
        throw std::invalid_argument("scenario g specs do not match boundary components");
    sc.mesh_ = build_mesh(sc.components_, sc.g_, spec.boundary_samples);
    for (size_t c = 0; c < sc.components_.size(); ++c)
        sc.fields_.push_back(std::make_unique<CharacteristicField>(sc.metric_, sc.components_[c], sc.g_[c]));

    sc.rays_.resize(sc.mesh_.samples.size());
    const auto& samples = sc.mesh_.samples;
    std::exception_ptr first_error;
    std::mutex err_mutex;
    parallel_for(static_cast<int>(samples.size()), [&](int k) {
        try {
            sc.rays_[k] = sc.ray_at(samples[k].component, samples[k].u);
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    });
    if (first_error) std::rethrow_exception(first_error);

    sc.conj_cache_.assign(sc.rays_.size(), std::nullopt);
    sc.conj_mutex_ = std::make_unique<std::mutex>();
    return sc;
}

Ray Scenario::ray_at(int component, double u) const {
    const auto& comp = components_[component];
    CharacteristicVector cv = fields_[component]->at(u);
    Ray r;
    r.component = component;
    r.u = u - std::floor(u);
    r.s = comp.arclength(r.u);
    r.origin = comp.position(r.u);
    r.alpha = cv.alpha;
    r.dir = cv.speed;
    r.g = g_value(g_[component], r.u);
    r.t_exit = std::min(spec_.tol.t_cap,
                        chart().exit_time(r.origin, r.dir, 1e-9, spec_.tol.t_cap));
    return r;
}

Trajectory Scenario::trajectory(int k, double t_max) const {
    const auto& s = mesh_.samples[k];
    return trajectory_at(s.component, s.u, t_max);
}

Trajectory Scenario::trajectory_at(int component, double u, double t_max) const {
    CharacteristicVector cv = fields_[component]->at(u);
    const auto& comp = components_[component];
    Vec2 dx0 = comp.unit_tangent(u);
    Covec da0 = fields_[component]->alpha_derivative(u, spec_.tol.fd_step);
    if (t_max <= 0) t_max = spec_.tol.t_cap;
    Flow flow(chart(), metric_);
    return flow.integrate(comp.position(u), cv.alpha, dx0, da0, t_max, spec_.tol.dt);
}

const ConjugateRecord& Scenario::conjugates(int k) const {
    {
        std::lock_guard<std::mutex> lock(*conj_mutex_);
        if (conj_cache_[k]) return *conj_cache_[k];
    }
    Trajectory traj = trajectory(k);
    ConjugateRecord rec = conjugate_times(traj, spec_.tol.conj_bisect_tol, spec_.tol.sigma_tol_rel,
                                          spec_.tol.det_zero_min);
    std::lock_guard<std::mutex> lock(*conj_mutex_);
    if (!conj_cache_[k]) conj_cache_[k] = std::move(rec);
    return *conj_cache_[k];
}

ConjugateRecord Scenario::conjugates_at(int component, double u) const {
    Trajectory traj = trajectory_at(component, u);
    return conjugate_times(traj, spec_.tol.conj_bisect_tol, spec_.tol.sigma_tol_rel,
                           spec_.tol.det_zero_min);
}

Scenario::CompatibilityReport Scenario::compatibility(int pairs_per_component) const {
    CompatibilityReport rep;
    rep.margin = std::numeric_limits<double>::infinity();
    std::vector<std::pair<Vec2, double>> pts;
    for (size_t c = 0; c < components_.size(); ++c)
        for (int k = 0; k < pairs_per_component; ++k) {
            double u = static_cast<double>(k) / pairs_per_component;
            pts.emplace_back(components_[c].position(u), g_value(g_[c], u));
        }
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = 0; j < pts.size(); ++j) {
            if (i == j) continue;
            // g(y) - g(z) must stay below the travel cost z -> y.
            double m = distance(chart(), metric_, pts[j].first, pts[i].first) -
                       (pts[i].second - pts[j].second);
            if (m < rep.margin) {
                rep.margin = m;
                rep.witness_y = pts[i].first;
                rep.witness_z = pts[j].first;
            }
        }
    return rep;
}

void Scenario::require_compatible() const {
    auto rep = compatibility();
    if (!rep.ok()) {
        std::ostringstream msg;
        msg << "incompatible boundary data: witness pair y=(" << rep.witness_y.x << ","
            << rep.witness_y.y << ") z=(" << rep.witness_z.x << "," << rep.witness_z.y
            << ") margin=" << rep.margin;
        throw IncompatibleBoundaryData(msg.str());
    }
}

ScenarioSpec Scenario::spec_with_offsets(const std::vector<double>& offsets) const {
    if (offsets.size() != g_.size())
        throw std::invalid_argument("one offset per boundary component required");
    ScenarioSpec out = spec_;
    out.g = g_;
    for (size_t c = 0; c < offsets.size(); ++c) out.g[c] = g_shifted(out.g[c], offsets[c]);
    return out;
}

ScenarioSpec Scenario::spec_refined(int factor) const {
    ScenarioSpec out = spec_;
    out.boundary_samples *= factor;
    out.grid_n *= factor;
    return out;
}

double Scenario::max_mesh_gap() const {
    double g = 0.0;
    for (size_t c = 0; c < components_.size(); ++c) g = std::max(g, mesh_.mesh_gap(static_cast<int>(c)));
    return g;
}

}  // namespace splitloci
