#include "splitloci/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace splitloci {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

CharacteristicField::CharacteristicField(const Hamiltonian& metric,
                                         const BoundaryComponent& component, const GSpec& g)
    : metric_(&metric), component_(&component), g_(&g) {}

double CharacteristicField::constraint_minimum(double u) const {
    // H restricted to { alpha : alpha(T) = g' } is strictly convex in the
    // normal coordinate; minimize by golden section on a generous bracket.
    Vec2 pos = component_->position(u);
    Vec2 T = component_->unit_tangent(u);
    Vec2 N = component_->inward_normal(u);
    double gp = g_derivative_du(*g_, u) / component_->speed(u);
    auto H_of = [&](double an) {
        Covec a = T * gp + N * an;  // dual basis of (T, N) is (T, N) in chart coords
        return metric_->hamiltonian(pos, a);
    };
    double lo = -4.0, hi = 4.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = H_of(c), fd = H_of(d);
    for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
            hi = d; d = c; fd = fc;
            c = hi - gr * (hi - lo);
            fc = H_of(c);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + gr * (hi - lo);
            fd = H_of(d);
        }
    }
    return H_of(0.5 * (lo + hi));
}

CharacteristicVector CharacteristicField::at(double u) const {
    Vec2 pos = component_->position(u);
    Vec2 T = component_->unit_tangent(u);
    Vec2 N = component_->inward_normal(u);
    double gp = g_derivative_du(*g_, u) / component_->speed(u);

    // alpha = gp * T + an * N in the orthonormal frame; solve H(alpha) = 1
    // for the root with inward velocity. H is convex in an with a minimum
    // below 1 whenever the data is locally compatible; the inward root is
    // the upper one (dH/dan > 0 there).
    auto alpha_of = [&](double an) { return T * gp + N * an; };
    auto H_of = [&](double an) { return metric_->hamiltonian(pos, alpha_of(an)); };

    double hmin = constraint_minimum(u);
    if (!(hmin < 1.0 - 1e-12)) {
        std::ostringstream msg;
        msg << "incompatible boundary data at " << component_->name() << " u=" << u
            << " (co-norm of dg is " << hmin << " >= 1)";
        throw IncompatibleBoundaryData(msg.str());
    }

    // Bracket the upper root: find the minimizer location first.
    double lo = -4.0, hi = 4.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = H_of(c), fd = H_of(d);
    for (int it = 0; it < 60; ++it) {
        if (fc < fd) { hi = d; d = c; fd = fc; c = hi - gr * (hi - lo); fc = H_of(c); }
        else { lo = c; c = d; fc = fd; d = lo + gr * (hi - lo); fd = H_of(d); }
    }
    double an_min = 0.5 * (lo + hi);

    double a_lo = an_min, a_hi = an_min + 0.5;
    while (H_of(a_hi) < 1.0) a_hi += 0.5;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (a_lo + a_hi);
        (H_of(mid) < 1.0 ? a_lo : a_hi) = mid;
        if (a_hi - a_lo < 1e-15) break;
    }
    double an = 0.5 * (a_lo + a_hi);
    Covec alpha = alpha_of(an);
    Vec2 X = metric_->velocity(pos, alpha);

    if (dot(X, N) <= 0) {
        std::ostringstream msg;
        msg << "characteristic field not inward at " << component_->name() << " u=" << u;
        throw IncompatibleBoundaryData(msg.str());
    }
    return {alpha, X};
}

Covec CharacteristicField::alpha_derivative(double u, double fd_step) const {
    double sp = component_->speed(u);
    double du = fd_step / sp;
    Covec ap = at(u + du).alpha;
    Covec am = at(u - du).alpha;
    return (ap - am) / (2.0 * fd_step);
}

// ---------------------------------------------------------------------------
// Flow: RK4 on (x, alpha, dx, dalpha).
// ---------------------------------------------------------------------------

namespace {

struct FlowState {
    Vec2 x;
    Covec a;
    Vec2 dx;
    Covec da;
};

FlowState operator+(const FlowState& s, const FlowState& t) {
    return {s.x + t.x, s.a + t.a, s.dx + t.dx, s.da + t.da};
}
FlowState operator*(const FlowState& s, double h) {
    return {s.x * h, s.a * h, s.dx * h, s.da * h};
}

FlowState rhs(const Hamiltonian& m, const FlowState& s) {
    FlowState d;
    d.x = m.velocity(s.x, s.a);
    d.a = -m.position_gradient(s.x, s.a);
    // Variational system; dH/dx vanishes for the catalog so the alpha
    // variation is transported unchanged.
    d.dx = m.velocity_jacobian(s.x, s.a) * s.da;
    d.da = {0, 0};
    return d;
}

FlowState rk4_step(const Hamiltonian& m, const FlowState& s, double h) {
    FlowState k1 = rhs(m, s);
    FlowState k2 = rhs(m, s + k1 * (h / 2));
    FlowState k3 = rhs(m, s + k2 * (h / 2));
    FlowState k4 = rhs(m, s + k3 * h);
    return s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
}

CharState to_char_state(const Hamiltonian& m, double t, const FlowState& s) {
    CharState c;
    c.t = t;
    c.x = s.x;
    c.alpha = s.a;
    c.dx = s.dx;
    c.dalpha = s.da;
    c.jacobian = Mat2::from_columns(m.velocity(s.x, s.a), s.dx);
    c.det = c.jacobian.det();
    return c;
}

}  // namespace

Trajectory Flow::integrate(Vec2 x0, Covec a0, Vec2 dx0, Covec da0, double t_max, double dt) const {
    Trajectory traj;
    traj.dt = dt;
    traj.metric = &metric_;
    traj.t_exit = t_max;

    FlowState s{x0, a0, dx0, da0};
    double t = 0.0;
    traj.states.push_back(to_char_state(metric_, t, s));

    // Analytic exit for the straight catalog; the contains() probe below
    // still guards the general case.
    Vec2 v0 = metric_.velocity(x0, a0);
    double exit = chart_.exit_time(x0, v0, 1e-9, t_max);
    if (exit < t_max) {
        traj.truncated = true;
        traj.t_exit = exit;
        t_max = exit;
    }

    int steps = std::max(1, static_cast<int>(std::ceil(t_max / dt - 1e-12)));
    double h = t_max / steps;
    for (int k = 0; k < steps; ++k) {
        s = rk4_step(metric_, s, h);
        t = (k + 1) * h;
        traj.states.push_back(to_char_state(metric_, t, s));
        traj.max_drift = std::max(traj.max_drift,
                                  std::abs(metric_.hamiltonian(s.x, s.a) - 1.0));
    }

    // Straightness probe: max deviation of the stored points from the chord.
    if (traj.states.size() > 2) {
        Vec2 p0 = traj.states.front().x;
        Vec2 dir = normalized(traj.states.back().x - p0);
        for (const auto& st : traj.states) {
            Vec2 rel = st.x - p0;
            double dev = std::abs(cross(dir, rel));
            traj.max_line_deviation = std::max(traj.max_line_deviation, dev);
        }
    }
    return traj;
}

CharState Trajectory::at(double t) const {
    if (states.empty()) return {};
    if (t <= states.front().t) return states.front();
    if (t >= states.back().t) return states.back();
    double h = states[1].t - states[0].t;
    int k = std::min(static_cast<int>(t / h), static_cast<int>(states.size()) - 2);
    while (k > 0 && states[k].t > t) --k;
    while (k + 2 < static_cast<int>(states.size()) && states[k + 1].t < t) ++k;
    const CharState& base = states[k];
    double tau = t - base.t;
    if (tau <= 0) return base;
    FlowState s{base.x, base.alpha, base.dx, base.dalpha};
    FlowState stepped = rk4_step(*metric, s, tau);
    return to_char_state(*metric, t, stepped);
}

// ---------------------------------------------------------------------------
// Conjugate times.
// ---------------------------------------------------------------------------

double ConjugateRecord::lambda(int j) const {
    int seen = 0;
    for (size_t i = 0; i < times.size(); ++i) {
        seen += orders[i];
        if (seen >= j) return times[i];
    }
    return kInf;
}

namespace {

int order_at(const Trajectory& traj, double t, double sigma_tol_rel) {
    Mat2 J = traj.at(t).jacobian;
    auto sv = singular_values(J);
    double tol = sigma_tol_rel * std::max(sv[0], 1e-300);
    int k = 0;
    if (sv[0] < tol) ++k;
    if (sv[1] < tol) ++k;
    return std::max(1, k);
}

}  // namespace

ConjugateRecord conjugate_times(const Trajectory& traj, double bisect_tol, double sigma_tol_rel,
                                double det_zero_min) {
    ConjugateRecord rec;
    const auto& st = traj.states;
    if (st.size() < 2) return rec;

    auto det_at = [&](double t) { return traj.at(t).det; };

    for (size_t k = 0; k + 1 < st.size(); ++k) {
        double t0 = st[k].t, t1 = st[k + 1].t;
        double d0 = st[k].det, d1 = st[k + 1].det;
        if (t1 <= 0) continue;
        if (d0 == 0.0 && t0 > 0) {
            rec.times.push_back(t0);
            rec.orders.push_back(order_at(traj, t0, sigma_tol_rel));
            continue;
        }
        if (d0 * d1 < 0.0) {
            double lo = t0, hi = t1;
            while (hi - lo > bisect_tol) {
                double mid = 0.5 * (lo + hi);
                (det_at(mid) * d0 > 0 ? lo : hi) = mid;
            }
            double t = 0.5 * (lo + hi);
            rec.times.push_back(t);
            rec.orders.push_back(order_at(traj, t, sigma_tol_rel));
        }
    }

    // Sign-preserving zeros: local minima of |det| dipping below det_zero_min.
    for (size_t k = 1; k + 1 < st.size(); ++k) {
        double a0 = std::abs(st[k - 1].det), a1 = std::abs(st[k].det), a2 = std::abs(st[k + 1].det);
        if (st[k].det * st[k - 1].det <= 0 || st[k].det * st[k + 1].det <= 0) continue;
        if (a1 <= a0 && a1 <= a2 && a1 < 10.0 * det_zero_min) {
            // Golden refine |det| on [t_{k-1}, t_{k+1}].
            double lo = st[k - 1].t, hi = st[k + 1].t;
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
            double fc = std::abs(det_at(c)), fd = std::abs(det_at(d));
            for (int it = 0; it < 60; ++it) {
                if (fc < fd) { hi = d; d = c; fd = fc; c = hi - gr * (hi - lo); fc = std::abs(det_at(c)); }
                else { lo = c; c = d; fc = fd; d = lo + gr * (hi - lo); fd = std::abs(det_at(d)); }
            }
            double t = 0.5 * (lo + hi);
            if (std::abs(det_at(t)) < det_zero_min && t > 0) {
                bool dup = false;
                for (double existing : rec.times)
                    if (std::abs(existing - t) < 10 * bisect_tol) dup = true;
                if (!dup) {
                    rec.times.push_back(t);
                    rec.orders.push_back(order_at(traj, t, sigma_tol_rel));
                }
            }
        }
    }

    // Sort jointly.
    std::vector<size_t> idx(rec.times.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return rec.times[a] < rec.times[b]; });
    ConjugateRecord sorted;
    for (size_t i : idx) {
        sorted.times.push_back(rec.times[i]);
        sorted.orders.push_back(rec.orders[i]);
    }
    return sorted;
}

LipschitzEstimate lipschitz_estimate(const std::vector<double>& values,
                                     const std::vector<double>& arclengths, bool closed,
                                     double period) {
    LipschitzEstimate est;
    size_t n = values.size();
    if (n < 2) return est;
    size_t pairs = closed ? n : n - 1;
    size_t usable = 0;
    for (size_t k = 0; k < pairs; ++k) {
        size_t j = (k + 1) % n;
        double ds = arclengths[j] - arclengths[k];
        if (j == 0) ds += period;
        if (!(ds > 0)) continue;
        if (!std::isfinite(values[k]) || !std::isfinite(values[j])) continue;
        ++usable;
        est.constant = std::max(est.constant, std::abs(values[j] - values[k]) / ds);
    }
    est.coverage = pairs ? static_cast<double>(usable) / pairs : 0.0;
    return est;
}

}  // namespace splitloci
