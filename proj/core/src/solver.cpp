#include "splitloci/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "splitloci/parallel.hpp"

namespace splitloci {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Golden-section minimum of f on [lo, hi].
template <typename F>
double golden_min(F&& f, double lo, double hi, int iters = 70) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < iters; ++it) {
        if (fc < fd) {
            hi = d; d = c; fd = fc;
            c = hi - gr * (hi - lo);
            fc = f(c);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + gr * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

ViscositySolver::ViscositySolver(const Scenario& sc) : sc_(&sc) {
    const auto& comps = sc.components();
    for (size_t c = 0; c < comps.size(); ++c) {
        CompInfo ci;
        ci.center = comps[c].center();
        if (comps[c].kind() == BoundaryComponent::Kind::Circle) {
            ci.circum = comps[c].radius();
        } else {
            double worst = 0;
            for (int k = 0; k < 64; ++k)
                worst = std::max(worst, norm(comps[c].position(k / 64.0) - ci.center));
            ci.circum = worst;
        }
        ci.g_min = kInf;
        for (int k = 0; k < 512; ++k)
            ci.g_min = std::min(ci.g_min, g_value(sc.g()[c], k / 512.0));
        info_.push_back(ci);
    }
    if (sc.chart().periodic()) {
        int r = sc.tol().lattice_range;
        for (int mx = -r; mx <= r; ++mx)
            for (int my = -r; my <= r; ++my) shifts_.push_back(Vec2(mx, my));
    } else {
        shifts_.push_back({0, 0});
    }
    phi_lb_factor_ = 1.0 / (1.0 + norm(sc.metric().drift()));
    coarse_n_ = std::min(sc.spec().boundary_samples, 256);
}

double ViscositySolver::chord_value(Vec2 p, int comp, double u, Vec2 shift) const {
    Vec2 q = sc_->components()[comp].position(u);
    Vec2 d = p + shift - q;
    double phi = norm2(d) == 0 ? 0.0 : sc_->metric().norm(q, d);
    return phi + g_value(sc_->g()[comp], u);
}

void ViscositySolver::scan_component(Vec2 p, int comp, Vec2 shift, double gap,
                                     std::vector<Support>& out, double& best) const {
    auto f = [&](double u) { return chord_value(p, comp, u, shift); };
    int n = coarse_n_;
    std::vector<double> vals(n);
    double vmin = kInf, vmax = -kInf;
    for (int k = 0; k < n; ++k) {
        vals[k] = f(static_cast<double>(k) / n);
        vmin = std::min(vmin, vals[k]);
        vmax = std::max(vmax, vals[k]);
    }
    if (vmin > best + gap) return;

    auto push = [&](double u, double fu, bool continuum) {
        Support s;
        s.component = comp;
        s.u = u - std::floor(u);
        s.shift = shift;
        s.value = fu;
        s.q = sc_->components()[comp].position(u);
        Vec2 d = p + shift - s.q;
        double phi = norm2(d) == 0 ? 0.0 : sc_->metric().norm(s.q, d);
        s.t = phi;
        s.direction = phi > 0 ? d / phi : Vec2{0, 0};
        s.continuum = continuum;
        out.push_back(s);
        best = std::min(best, fu);
    };

    if (vmax - vmin < 1e-12) {
        // Flat component (e.g. the disk center): representatives only.
        for (int k = 0; k < n; k += std::max(1, n / 32)) push(static_cast<double>(k) / n, vals[k], true);
        return;
    }

    for (int k = 0; k < n; ++k) {
        double prev = vals[(k + n - 1) % n], next = vals[(k + 1) % n];
        if (vals[k] > prev || vals[k] > next) continue;
        if (vals[k] == prev && vals[k] == next) continue;  // interior of a plateau
        double u0 = static_cast<double>(k) / n;
        double du = 1.0 / n;
        double u = golden_min(f, u0 - du, u0 + du);
        double fu = f(u);
        if (fu <= best + gap) push(u, fu, false);
    }
}

std::vector<ViscositySolver::Support> ViscositySolver::minimizers(Vec2 p, double value_gap,
                                                                  double dir_tol) const {
    std::vector<Support> raw;
    double best = kInf;

    // Shifts ordered by proximity so pruning kicks in early.
    std::vector<std::pair<double, Vec2>> ordered;
    for (Vec2 m : shifts_) {
        double lb = kInf;
        for (size_t c = 0; c < info_.size(); ++c)
            lb = std::min(lb, (norm(p + m - info_[c].center) - info_[c].circum) * phi_lb_factor_ +
                                  info_[c].g_min);
        ordered.emplace_back(lb, m);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    for (auto& [lb_all, m] : ordered) {
        if (lb_all > best + value_gap) break;
        for (size_t c = 0; c < info_.size(); ++c) {
            double lb = (norm(p + m - info_[c].center) - info_[c].circum) * phi_lb_factor_ +
                        info_[c].g_min;
            if (lb > best + value_gap) continue;
            scan_component(p, static_cast<int>(c), m, value_gap, raw, best);
        }
    }

    // Keep the epsilon-argmin, dedup by direction.
    std::sort(raw.begin(), raw.end(), [](const Support& a, const Support& b) {
        return a.value < b.value;
    });
    std::vector<Support> out;
    for (auto& s : raw) {
        if (s.value > best + value_gap) break;
        bool dup = false;
        for (auto& have : out)
            if (norm2(s.direction) > 0 && norm2(have.direction) > 0 &&
                angle_between(s.direction, have.direction) < dir_tol)
                dup = true;
        if (!dup) out.push_back(s);
    }
    return out;
}

ViscositySolver::Support ViscositySolver::best(Vec2 p) const {
    auto m = minimizers(p, 0.0, sc_->tol().dir_tol);
    if (m.empty()) throw std::runtime_error("no boundary minimizer found");
    return m.front();
}

double ViscositySolver::value(Vec2 p) const { return best(p).value; }

ViscositySolver::CutResult ViscositySolver::cut_time(const Ray& ray) const {
    const double tol = sc_->tol().cut_delta_tol;
    auto delta = [&](double t) {
        Vec2 x = sc_->chart().reduce(ray.at(t));
        return (t + ray.g) - value(x);
    };
    double t_end = ray.t_exit;
    double h = std::min(0.02, t_end / 4);
    double prev = 0.0;
    double t = h;
    bool bracketed = false;
    double lo = 0, hi = 0;
    while (t < t_end + h) {
        double tc = std::min(t, t_end);
        if (delta(tc) > tol) {
            lo = prev;
            hi = tc;
            bracketed = true;
            break;
        }
        prev = tc;
        if (tc >= t_end) break;
        t += h;
    }
    if (!bracketed) return {t_end, false};
    while (hi - lo > 1e-13) {
        double mid = 0.5 * (lo + hi);
        (delta(mid) > tol ? hi : lo) = mid;
    }
    return {0.5 * (lo + hi), true};
}

// ---------------------------------------------------------------------------
// Singular set sweep.
// ---------------------------------------------------------------------------

std::vector<double> cut_times(const Scenario& sc) {
    ViscositySolver solver(sc);
    std::vector<double> rho(sc.mesh_size());
    parallel_for(sc.mesh_size(), [&](int k) {
        auto cut = solver.cut_time(sc.ray(k));
        rho[k] = cut.found ? cut.t : kInf;
    });
    return rho;
}

namespace {

// Interpolated lambda_1 over the mesh of one component (inf-aware).
double lambda1_interp(const Scenario& sc, int comp, double u,
                      const std::vector<double>& lambda1_mesh) {
    auto [begin, end] = sc.mesh().component_ranges[comp];
    int n = end - begin;
    double x = (u - std::floor(u)) * n;
    int k = static_cast<int>(x) % n;
    double frac = x - std::floor(x);
    double a = lambda1_mesh[begin + k];
    double b = lambda1_mesh[begin + (k + 1) % n];
    if (!std::isfinite(a) || !std::isfinite(b)) return kInf;
    return a + frac * (b - a);
}

}  // namespace

CandidateLocus singular_set(const Scenario& sc) {
    sc.require_compatible();
    ViscositySolver solver(sc);
    const auto& tol = sc.tol();
    int n = sc.mesh_size();

    std::vector<double> rho(n), lambda1_mesh(n);
    parallel_for(n, [&](int k) {
        auto cut = solver.cut_time(sc.ray(k));
        rho[k] = cut.found ? cut.t : kInf;
        lambda1_mesh[k] = sc.lambda1(k);
    });

    // Arrival provenance for every cut point: the epsilon-argmin supports.
    struct RawPoint {
        Vec2 pos;
        std::vector<NodeArrival> arrivals;
        bool valid = false;
    };
    std::vector<RawPoint> raws(n);
    parallel_for(n, [&](int k) {
        if (!std::isfinite(rho[k])) return;
        const Ray& ray = sc.ray(k);
        Vec2 p_un = ray.at(rho[k]);
        Vec2 p = sc.chart().reduce(p_un);
        auto supports = solver.minimizers(p, 1e-6, tol.dir_tol);
        RawPoint& raw = raws[k];
        raw.pos = p;
        raw.valid = true;
        for (const auto& s : supports) {
            NodeArrival arr;
            arr.component = s.component;
            arr.u = s.u;
            arr.s = sc.components()[s.component].arclength(s.u);
            arr.t = s.t;
            // Straight chords: the phi-unit chord direction is the arrival speed.
            arr.direction = s.direction;
            arr.value = s.value;
            arr.copy_shift = -s.shift;
            if (s.continuum) {
                arr.conjugate = true;
                arr.conj_order = 1;
            } else {
                double l1 = lambda1_interp(sc, s.component, s.u, lambda1_mesh);
                if (std::isfinite(l1) && l1 - s.t < 1e-3) {
                    auto rec = sc.conjugates_at(s.component, s.u);
                    double exact = rec.lambda(1);
                    if (std::isfinite(exact) && exact - s.t < tol.conj_flag_tol) {
                        arr.conjugate = true;
                        arr.conj_order = rec.orders.empty() ? 1 : rec.orders.front();
                    }
                }
            }
            raw.arrivals.push_back(arr);
        }
    });

    LocusBuilder builder(sc.chart(), tol.pos_cluster_tol, tol.cluster_tol);
    for (auto& raw : raws) {
        if (!raw.valid || raw.arrivals.empty()) continue;
        if (raw.arrivals.size() == 1) {
            builder.add_point(raw.pos, raw.arrivals[0]);
        } else if (raw.arrivals.size() == 2) {
            builder.add_point(raw.pos, raw.arrivals[0]);
            // Attach the partner arrival through the same raw point so the
            // clustered node carries both sides.
            builder.add_point(raw.pos, raw.arrivals[1]);
        } else {
            builder.add_junction(raw.pos, raw.arrivals);
        }
    }

    // Edge tips: refine local minima of lambda_1 - rho per component.
    for (size_t c = 0; c < sc.components().size(); ++c) {
        auto [begin, end] = sc.mesh().component_ranges[c];
        int m = end - begin;
        std::vector<double> gap(m, kInf);
        int below = 0;
        for (int k = 0; k < m; ++k) {
            if (std::isfinite(lambda1_mesh[begin + k]) && std::isfinite(rho[begin + k]))
                gap[k] = lambda1_mesh[begin + k] - rho[begin + k];
            if (gap[k] < 1e-2) ++below;
        }
        if (below == 0 || below > m / 4) continue;  // nothing, or a flat touch (disk)
        for (int k = 0; k < m; ++k) {
            double prev = gap[(k + m - 1) % m], next = gap[(k + 1) % m];
            if (!(gap[k] < 1e-2) || gap[k] > prev || gap[k] > next) continue;
            double u0 = sc.mesh().samples[begin + k].u;
            double du = 1.0 / m;
            auto gap_of = [&](double u) {
                Ray ray = sc.ray_at(static_cast<int>(c), u);
                auto cut = solver.cut_time(ray);
                auto rec = sc.conjugates_at(static_cast<int>(c), u);
                double l1 = rec.lambda(1);
                if (!cut.found || !std::isfinite(l1)) return kInf;
                return l1 - cut.t;
            };
            double u_star = golden_min(gap_of, u0 - du, u0 + du, 40);
            auto rec = sc.conjugates_at(static_cast<int>(c), u_star);
            double l1 = rec.lambda(1);
            Ray ray = sc.ray_at(static_cast<int>(c), u_star);
            auto cut = solver.cut_time(ray);
            if (!cut.found || !std::isfinite(l1)) continue;
            if (l1 - cut.t > std::max(tol.edge_touch_tol, 1e-6)) continue;
            NodeArrival arr;
            arr.component = static_cast<int>(c);
            arr.u = u_star - std::floor(u_star);
            arr.s = sc.components()[c].arclength(arr.u);
            arr.t = l1;
            arr.direction = ray.dir;
            arr.value = l1 + ray.g;
            arr.conjugate = true;
            arr.conj_order = rec.orders.empty() ? 1 : rec.orders.front();
            builder.add_edge_tip(sc.chart().reduce(ray.at(l1)), arr);
        }
    }

    CandidateLocus locus = builder.build();
    locus.freeze(sc.chart());
    locus.finalize_side_values();
    return locus;
}

}  // namespace splitloci
