#include "maxdde/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace maxdde {

History History::constant(double p) {
    return {[p](double) { return p; }, [](double) { return 0.0; }};
}

History History::function(std::function<double(double)> v,
                          std::function<double(double)> dv) {
    return {std::move(v), std::move(dv)};
}

namespace {

inline double hermite_val(double y0, double y1, double d0, double d1, double w,
                          double u) {
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * w * d0 +
           (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * w * d1;
}

// interior max of one Hermite segment (critical points of the cubic)
double segment_interior_max(double y0, double y1, double d0, double d1, double w,
                            double ulo, double uhi) {
    double m = -1e300;
    const double A = 6 * (y0 - y1) + 3 * w * (d0 + d1);
    const double B = -6 * (y0 - y1) - w * (4 * d0 + 2 * d1);
    const double C = w * d0;
    auto consider = [&](double u) {
        if (u > ulo && u < uhi) m = std::max(m, hermite_val(y0, y1, d0, d1, w, u));
    };
    if (std::abs(A) < 1e-300) {
        if (std::abs(B) > 1e-300) consider(-C / B);
    } else {
        const double disc = B * B - 4 * A * C;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            consider((-B + s) / (2 * A));
            consider((-B - s) / (2 * A));
        }
    }
    return m;
}

struct Stepper {
    const Parameters prm;
    const double t0, dt, h;
    const DelayTerm delay;
    const History& hist;
    std::vector<double> t, u, du, wm;
    std::size_t nh;          // history samples before t0
    std::deque<std::size_t> dq;  // monotone max deque over committed samples

    Stepper(const Parameters& p, double t0_, double dt_, const History& hist_,
            DelayTerm delay_)
        : prm(p), t0(t0_), dt(dt_), h(p.h), delay(delay_), hist(hist_) {
        nh = static_cast<std::size_t>(std::ceil(h / dt - 1e-9));
    }

    void seed_history() {
        for (std::size_t i = 0; i <= nh; ++i) {
            const double ti = t0 + (static_cast<double>(i) - static_cast<double>(nh)) * dt;
            t.push_back(ti);
            const double v = hist.value(ti);
            if (!std::isfinite(v)) throw Error("integrate: non-finite history sample");
            u.push_back(v);
            const double fd = 1e-5 * h;
            du.push_back(hist.deriv
                             ? hist.deriv(ti)
                             : (hist.value(ti + fd) - hist.value(ti - fd)) / (2 * fd));
            push_deque(i);
        }
        for (std::size_t i = 0; i <= nh; ++i) wm.push_back(committed_window_max(t[i]));
    }

    void push_deque(std::size_t i) {
        while (!dq.empty() && u[dq.back()] <= u[i]) dq.pop_back();
        dq.push_back(i);
    }

    // committed value at time s; the history is queried directly left of t0
    // (exact, and immune to an initial jump at t0)
    double committed(double s) const {
        if (s < t0) return hist.value(s);
        if (s >= t.back()) return u.back();
        const double x = (s - t.front()) / dt;
        std::size_t i = x <= 0 ? 0 : static_cast<std::size_t>(x);
        if (i >= t.size() - 1) i = t.size() - 2;
        const double uu = (s - t[i]) / dt;
        return hermite_val(u[i], u[i + 1], du[i], du[i + 1], dt, uu);
    }

    // max of the committed part of [s-h, s]: monotone deque over the samples,
    // the interpolant refined around the winner and across the window's left
    // edge (the samples alone would bias a smooth interior peak by O(dt^2))
    double committed_window_max(double s) {
        const double cut = s - h;
        while (!dq.empty() && t[dq.front()] < cut - 1e-12 * dt) dq.pop_front();
        double m = -1e300;
        std::size_t win = t.size();
        if (!dq.empty()) {
            win = dq.front();
            m = u[win];
        }
        m = std::max(m, committed(cut));
        auto refine = [&](std::size_t seg, double ulo, double uhi) {
            if (seg + 1 >= t.size() || uhi <= ulo) return;
            m = std::max(m, segment_interior_max(u[seg], u[seg + 1], du[seg],
                                                 du[seg + 1], dt, ulo, uhi));
        };
        if (win < t.size()) {
            if (win > 0) refine(win - 1, 0.0, 1.0);
            refine(win, 0.0, 1.0);
        }
        if (cut > t.front()) {
            const std::size_t ic = static_cast<std::size_t>((cut - t.front()) / dt);
            refine(ic, (cut - t[ic]) / dt, 1.0);
        }
        return m;
    }

    double rhs(double s, double y, double f_s) {
        double w;
        if (delay == DelayTerm::PureLag) {
            w = committed(s - h);
        } else {
            w = std::max(committed_window_max(s), y);
        }
        return prm.a * y + prm.b * w + f_s;
    }
};

}  // namespace

Trajectory integrate(const NormalizedProblem& problem, double t0, const History& history,
                     double t_end, const IntegrateOptions& opts) {
    const Parameters& prm = problem.params();
    const double h = prm.h;
    const double dt = opts.dt > 0.0 ? opts.dt : h / 2000.0;
    if (dt > h / 100.0) throw Error("integrate: dt too large (need dt <= h/100)");
    if (!(t_end > t0)) throw Error("integrate: t_end must exceed t0");
    if (!history.value) throw Error("integrate: history required");

    Stepper st(prm, t0, dt, history, opts.delay);
    const auto n_steps = static_cast<std::size_t>(std::ceil((t_end - t0) / dt - 1e-9));
    st.t.reserve(st.nh + n_steps + 1);
    st.u.reserve(st.nh + n_steps + 1);
    st.du.reserve(st.nh + n_steps + 1);
    st.wm.reserve(st.nh + n_steps + 1);
    st.seed_history();

    auto f = [&problem](double s) { return problem.f(s); };
    // the node at t0 keeps the history-side derivative so the plateau segments
    // interpolate exactly; the first RK4 stage recomputes the equation's slope

    for (std::size_t k = 0; k < n_steps; ++k) {
        const double ti = st.t.back();
        const double y = st.u.back();
        const double k1 = st.rhs(ti, y, f(ti));
        const double k2 = st.rhs(ti + 0.5 * dt, y + 0.5 * dt * k1, f(ti + 0.5 * dt));
        const double k3 = st.rhs(ti + 0.5 * dt, y + 0.5 * dt * k2, f(ti + 0.5 * dt));
        const double tn = t0 + static_cast<double>(k + 1) * dt;
        const double k4 = st.rhs(tn, y + dt * k3, f(tn));
        const double yn = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (!std::isfinite(yn)) throw Error("integrate: solution blew up (non-finite)");
        st.t.push_back(tn);
        st.u.push_back(yn);
        st.du.push_back(0.0);
        st.push_deque(st.t.size() - 1);
        st.du.back() = st.rhs(tn, yn, f(tn));
        st.wm.push_back(std::max(yn, st.committed_window_max(tn)));
    }

    return Trajectory(t0, dt, h, st.nh, std::move(st.t), std::move(st.u),
                      std::move(st.du), std::move(st.wm));
}

std::vector<QualifiedMax> detect_qualified_maxima(const NormalizedProblem& problem,
                                                  const Trajectory& tr, double eps,
                                                  double t_min) {
    const double T = problem.T(), beta = problem.beta();
    if (eps <= 0.0) eps = 1e-3 * T;
    const auto& t = tr.times();
    const auto& u = tr.values();
    const auto& du = tr.derivs();
    const auto& wm = tr.window_maxima();
    const double start = std::max({t_min, tr.t0() + 2.0 * tr.dt()});

    std::vector<QualifiedMax> events;
    double last_graze_scan = tr.t0();
    for (std::size_t i = tr.history_len() + 1; i + 1 < t.size(); ++i) {
        if (t[i] < start) continue;
        double r = std::fmod(t[i], T);
        if (r < 0) r += T;
        if (!(r < beta)) continue;
        const double g0 = u[i] - problem.ftilde(t[i]);
        const double g1 = u[i + 1] - problem.ftilde(t[i + 1]);
        if (!(g0 < 0.0 && g1 >= 0.0)) continue;
        if (wm[i] > u[i] + 1e-6 * (1.0 + std::abs(u[i]))) continue;  // not the running max
        if (du[i] < -1e-6 * (1.0 + std::abs(du[i]))) continue;
        // refine the crossing of u - ftilde on the dense output
        double lo = t[i], hi = t[i + 1];
        for (int it = 0; it < 90 && hi - lo > 1e-15 * T; ++it) {
            const double mid = 0.5 * (lo + hi);
            ((tr.value(mid) - problem.ftilde(mid) < 0.0) ? lo : hi) = mid;
        }
        const double tau = 0.5 * (lo + hi);
        if (tau + eps > tr.t_end()) break;  // cannot confirm; caller extends
        const double val = tr.value(tau);
        // qualification: max over [tau-h, tau] equals u(tau), decrease after
        if (tr.window_max(tau) > val + 1e-6 * (1.0 + std::abs(val))) continue;
        if (tr.range_max(std::min(tau + 1e-9 * T, tr.t_end()),
                         std::min(tau + eps, tr.t_end())) >
            val + 1e-9 * (1.0 + std::abs(val)))
            continue;
        double rr = std::fmod(tau, T);
        if (rr < 0) rr += T;
        const int j = static_cast<int>(std::llround((tau - rr) / T));
        QualifiedMax ev{tau, val, eps, j, false};
        // grazing: the trajectory touches (beta + kT, 0) since the last event;
        // the tolerance absorbs the eps-qualification offset of located jumps
        const double g_tol = 1e-5;
        for (double bk = std::ceil((last_graze_scan - beta) / T) * T + beta;
             bk <= tau + eps; bk += T) {
            if (bk > last_graze_scan && bk <= tr.t_end() &&
                std::abs(tr.value(bk)) < g_tol)
                ev.grazing = true;
        }
        last_graze_scan = tau;
        events.push_back(ev);
    }
    return events;
}

}  // namespace maxdde
