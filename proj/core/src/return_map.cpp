#include "maxdde/return_map.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <string>

namespace maxdde {

namespace {

double simpson(const std::function<double(double)>& g, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double w = (b - a) / panels;
    double s = g(a) + g(b);
    for (int i = 1; i < panels; ++i) s += g(a + i * w) * (i % 2 ? 4.0 : 2.0);
    return s * w / 3.0;
}

}  // namespace

ReturnMap::ReturnMap(NormalizedProblem problem, ReturnMapOptions opts)
    : problem_(std::move(problem)), opts_(opts) {
    if (opts_.dt <= 0.0) opts_.dt = problem_.params().h / 2000.0;
    if (opts_.event_eps <= 0.0) opts_.event_eps = 1e-3 * problem_.T();
}

ReturnMapSample ReturnMap::eval(double p) const {
    const double h = problem_.params().h, T = problem_.T();
    const double q = problem_.ftilde_inverse(p);
    IntegrateOptions io;
    io.dt = opts_.dt;
    io.delay = DelayTerm::WindowMax;
    io.event_eps = opts_.event_eps;

    std::optional<Trajectory> tr;
    std::vector<QualifiedMax> events;
    for (double horizon : {4.2 * T, opts_.horizon_T * T}) {
        tr.emplace(integrate(problem_, q, History::constant(p), q + horizon, io));
        events = detect_qualified_maxima(problem_, *tr, io.event_eps);
        if (!events.empty()) break;
    }
    if (events.empty())
        throw Error("eval_R: no qualified maximum before q + " +
                    std::to_string(opts_.horizon_T) + "T (parameter misuse?)");
    const QualifiedMax& ev = events.front();

    ReturnMapSample s;
    s.p = p;
    s.q = q;
    s.nu_star = ev.tau;
    s.R = ev.value;
    s.branch_j = ev.branch_j;
    s.grazing = ev.grazing;

    // phase boundaries from the trajectory
    const auto& t = tr->times();
    const auto& u = tr->values();
    const auto& du = tr->derivs();
    const std::size_t i0 = tr->history_len();
    const double dt = tr->dt();

    if (u[i0 + 1] > p) {
        s.lambda = s.mu = q;  // rises immediately (p near 0): no plateau phases
    } else {
        std::size_t cross = 0;
        for (std::size_t i = i0 + 2; i < t.size() && t[i] <= q + h + dt; ++i) {
            if (u[i - 1] < p && u[i] >= p) { cross = i; break; }
        }
        if (cross) {
            double lo = t[cross - 1], hi = t[cross];
            for (int it = 0; it < 90 && hi - lo > 1e-15 * T; ++it) {
                const double mid = 0.5 * (lo + hi);
                ((tr->value(mid) < p) ? lo : hi) = mid;
            }
            s.lambda = s.mu = std::min(0.5 * (lo + hi), q + h);
        } else {
            s.lambda = q + h;
            s.mu = s.nu_star;  // fallback; replaced by the crossing below
            double prev = u[i0] - p;  // D(t) = u(t) - u(t-h), negative at q+h
            bool have_prev = false;
            for (std::size_t i = i0; i < t.size(); ++i) {
                if (t[i] <= q + h + 1e-12) continue;
                if (t[i] >= s.nu_star) break;
                const double D = u[i] - tr->value(t[i] - h);
                if (have_prev && prev < 0.0 && D >= 0.0) {
                    double lo = t[i - 1], hi = t[i];
                    for (int it = 0; it < 90 && hi - lo > 1e-15 * T; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        ((tr->value(mid) - tr->value(mid - h) < 0.0) ? lo : hi) = mid;
                    }
                    s.mu = 0.5 * (lo + hi);
                    break;
                }
                prev = D;
                have_prev = true;
            }
        }
    }

    // U-shape: one interior minimum, no interior maximum (grazing zeros of u'
    // at u ~ 0, t = beta + jT are transits of the forcing minimum, not extrema)
    int n_min = 0, n_max = 0;
    const double beta = problem_.beta();
    for (std::size_t i = i0 + 2; i + 1 < t.size() && t[i + 1] < s.nu_star - dt; ++i) {
        if (du[i] * du[i + 1] < 0.0) {
            double r = std::fmod(t[i], T);
            if (r < 0) r += T;
            const bool graze = std::abs(u[i]) < 1e-5 && std::abs(r - beta) < 0.05 * T;
            if (graze) continue;
            (du[i] < 0.0 ? n_min : n_max)++;
        }
    }
    s.u_shaped = (n_max == 0 && n_min <= 1);
    return s;
}

ReturnMap::Segmentation ReturnMap::segment(double p) const {
    const ReturnMapSample s = eval(p);
    const double fs = condition_fs(s.q);
    const double h = problem_.params().h;
    const bool plateau_full = s.lambda >= s.q + h - 1e-9;
    // the full plateau occurs exactly when the continuity integral is <= 0
    const bool consistent = plateau_full == (fs <= 1e-6 * (1.0 + std::abs(fs)));
    return {s.lambda, s.mu, s.nu_star, s.u_shaped, consistent};
}

std::vector<double> ReturnMap::iterate(double p, int count) const {
    std::vector<double> out;
    out.reserve(count);
    double x = p;
    for (int i = 0; i < count; ++i) {
        x = eval(x).R;
        out.push_back(x);
    }
    return out;
}

double ReturnMap::derivative(const ReturnMapSample& s) const {
    if (!s.u_shaped)
        throw Error("derivative_R: solution is not U-shaped at p = " + std::to_string(s.p));
    const double a = problem_.params().a, b = problem_.params().b;
    const double ab = a + b;
    const double tail = std::exp(ab * (s.nu_star - s.mu));
    const double h = problem_.params().h;
    if (s.lambda < s.q + h - 1e-9) {
        // crossing within the first window: exponential closed form
        const double L = s.mu - s.q;
        if (std::abs(a) > 1e-12)
            return tail * ((1.0 + b / a) * std::exp(a * L) - b / a);
        return tail * (1.0 + b * L);  // removable singularity at a = 0
    }
    const FundamentalSolution& fs = fundamental(s.mu - s.q + h);
    return fs.V(s.mu - s.q) * tail;
}

double ReturnMap::condition_fs(double q) const {
    const double a = problem_.params().a, h = problem_.params().h;
    const double fq = problem_.f(q);
    return simpson([&](double sv) { return std::exp(a * sv) * (problem_.f(q + h - sv) - fq); },
                   0.0, h, opts_.quad_panels);
}

double ReturnMap::condition_ss(double p) const {
    const ReturnMapSample s = eval(p);
    const double a = problem_.params().a, h = problem_.params().h;
    const double fn = problem_.f(s.nu_star);
    return simpson(
        [&](double sv) { return std::exp(a * sv) * (problem_.f(s.nu_star - sv) - fn); },
        0.0, h, opts_.quad_panels);
}

BranchRoot ReturnMap::beta1() const {
    const double beta = problem_.beta();
    const int n = 512;
    int transitions = 0;
    double lo = 0.0, hi = beta;
    double prev = condition_fs(beta * 0.5 / n);
    for (int i = 1; i <= n; ++i) {
        const double qq = beta * (i + 0.5) / (n + 1);
        const double val = condition_fs(qq);
        if (prev < 0.0 && val >= 0.0) {
            ++transitions;
            lo = beta * (i - 0.5) / (n + 1);
            hi = qq;
        } else if (prev >= 0.0 && val < 0.0) {
            ++transitions;  // violates the single-interval structure
        }
        prev = val;
    }
    if (transitions != 1)
        throw Error("beta1: condition_fs sign pattern is not a single interval "
                    "(transitions = " + std::to_string(transitions) + ")");
    for (int it = 0; it < 200 && hi - lo > 1e-14 * beta; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((condition_fs(mid) < 0.0) ? lo : hi) = mid;
    }
    BranchRoot r;
    r.q = 0.5 * (lo + hi);
    r.q_raw = problem_.to_raw(r.q);
    r.p = problem_.ftilde(r.q);
    r.residual = condition_fs(r.q);
    return r;
}

std::optional<BranchRoot> ReturnMap::q0_root() const {
    const double a = problem_.params().a, b = problem_.params().b;
    const double h = problem_.params().h;
    const double L = std::abs(a) > 1e-12 ? std::log(b / (a + b)) / a : -1.0 / b;
    if (!(h > L)) return std::nullopt;  // R' > 0 left of beta1; no critical point

    auto m1 = [&](double tau) {
        const double integral = simpson(
            [&](double w) { return std::exp(-a * w) * problem_.f(w + tau); }, 0.0, L,
            opts_.quad_panels);
        return problem_.f(tau) + b * integral;
    };
    const double b1 = beta1().q, beta = problem_.beta();
    const int n = 512;
    int transitions = 0;
    double lo = b1, hi = beta;
    double prev = m1(b1 + (beta - b1) * 0.5 / n);
    for (int i = 1; i <= n; ++i) {
        const double qq = b1 + (beta - b1) * (i + 0.5) / (n + 1);
        const double val = m1(qq);
        if (prev * val < 0.0) {
            ++transitions;
            lo = b1 + (beta - b1) * (i - 0.5) / (n + 1);
            hi = qq;
        }
        prev = val;
    }
    if (transitions == 0) return std::nullopt;
    if (transitions > 1)
        throw Error("q0_root: multiple sign changes of (m1) on (beta1, beta)");
    const bool up = m1(hi) > 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * beta; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((m1(mid) > 0.0) == up ? hi : lo) = mid;
    }
    BranchRoot r;
    r.q = 0.5 * (lo + hi);
    r.q_raw = problem_.to_raw(r.q);
    r.p = problem_.ftilde(r.q);
    r.residual = m1(r.q);
    return r;
}

const FundamentalSolution& ReturnMap::fundamental(double t_max_min) const {
    std::lock_guard<std::mutex> lock(fs_mutex_);
    const double want = std::max(t_max_min, 4.0 * problem_.params().h);
    if (!fs_ || fs_->t_max() < want - 1e-9)
        fs_ = std::make_unique<FundamentalSolution>(problem_.params(), want + 1.0,
                                                    opts_.dt);
    return *fs_;
}

std::vector<int> ReturnMap::branch_signature(double p, int n) const {
    std::vector<int> sig;
    sig.reserve(n);
    double x = p;
    for (int i = 0; i < n; ++i) {
        const auto s = eval(x);
        sig.push_back(s.branch_j);
        x = s.R;
    }
    return sig;
}

double ReturnMap::evalRn(double p, int n) const {
    double x = p;
    for (int i = 0; i < n; ++i) x = eval(x).R;
    return x;
}

std::vector<Discontinuity> ReturnMap::find_discontinuities(double p_lo, double p_hi,
                                                           int grid) const {
    if (grid < 2) throw Error("find_discontinuities: grid too small");
    std::vector<double> ps(grid);
    std::vector<int> js(grid);
    for (int i = 0; i < grid; ++i) {
        ps[i] = p_lo + (p_hi - p_lo) * i / (grid - 1);
        js[i] = eval(ps[i]).branch_j;
    }
    const double R0 = eval(0.0).R;

    std::vector<Discontinuity> out;
    // brackets may contain several jumps; subdivide until each holds one
    std::deque<std::pair<double, double>> work;
    for (int i = 0; i + 1 < grid; ++i)
        if (js[i] != js[i + 1]) work.emplace_back(ps[i], ps[i + 1]);

    while (!work.empty()) {
        auto [lo, hi] = work.front();
        work.pop_front();
        int jlo = eval(lo).branch_j, jhi = eval(hi).branch_j;
        if (jhi < jlo)
            throw Error("find_discontinuities: branch index non-monotone on [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
        if (jhi == jlo) continue;
        if (jhi - jlo > 1) {
            const double mid = 0.5 * (lo + hi);
            if (hi - lo < 1e-9)
                throw Error("find_discontinuities: unresolved bracket [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
            work.emplace_back(lo, mid);
            work.emplace_back(mid, hi);
            continue;
        }
        for (int it = 0; it < 60 && hi - lo > 1e-13 * (1.0 + std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            ((eval(mid).branch_j == jlo) ? lo : hi) = mid;
        }
        Discontinuity d;
        d.p = hi;  // right-continuous side
        d.j_left = jlo;
        d.j_right = jhi;
        for (double dp : {1e-4, 1e-5, 1e-6})
            d.R_left_seq.push_back(eval(d.p - dp).R);
        d.R_left = d.R_left_seq.back();
        d.R_at = eval(d.p).R;
        d.grazing_confirmed = eval(d.p - 1e-9 * (1.0 + d.p)).grazing;
        const bool decreasing_to_zero =
            d.R_left_seq[0] > d.R_left_seq[1] && d.R_left_seq[1] > d.R_left_seq[2];
        d.contract_ok = decreasing_to_zero && d.R_left < 2e-2 &&
                        std::abs(d.R_at - R0) < 2e-2;
        out.push_back(d);
    }
    std::sort(out.begin(), out.end(),
              [](const Discontinuity& x, const Discontinuity& y) { return x.p < y.p; });
    return out;
}

std::vector<PeriodicPoint> ReturnMap::fixed_points(int n, double p_lo, double p_hi,
                                                   int grid) const {
    if (n < 1) throw Error("fixed_points: n must be >= 1");
    struct Cell { double lo, hi; double glo, ghi; std::vector<int> sig; int depth; };
    std::vector<double> ps(grid);
    std::vector<double> gs(grid);
    std::vector<std::vector<int>> sigs(grid);
    for (int i = 0; i < grid; ++i) {
        ps[i] = p_lo + (p_hi - p_lo) * i / (grid - 1);
        double x = ps[i];
        std::vector<int> sig;
        for (int k = 0; k < n; ++k) {
            const auto s = eval(x);
            sig.push_back(s.branch_j);
            x = s.R;
        }
        gs[i] = x - ps[i];
        sigs[i] = std::move(sig);
    }

    std::vector<PeriodicPoint> roots;
    std::deque<Cell> work;
    for (int i = 0; i + 1 < grid; ++i)
        if (sigs[i] == sigs[i + 1] && gs[i] * gs[i + 1] < 0.0)
            work.push_back({ps[i], ps[i + 1], gs[i], gs[i + 1], sigs[i], 0});

    while (!work.empty()) {
        Cell c = work.front();
        work.pop_front();
        bool ok = true;
        double lo = c.lo, hi = c.hi, glo = c.glo;
        for (int it = 0; it < 70 && hi - lo > 1e-13 * (1.0 + std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            const auto sig = branch_signature(mid, n);
            const double g = evalRn(mid, n) - mid;
            if (sig != c.sig) {
                // discontinuity of R^n inside: split, do not solve across it
                if (c.depth < 6) {
                    work.push_back({c.lo, mid, c.glo, g, c.sig, c.depth + 1});
                    work.push_back({mid, c.hi, g, c.ghi, sig, c.depth + 1});
                }
                ok = false;
                break;
            }
            if ((g > 0.0) == (glo > 0.0)) { lo = mid; glo = g; }
            else hi = mid;
        }
        if (!ok) continue;
        const double root = 0.5 * (lo + hi);
        const double resid = std::abs(evalRn(root, n) - root);
        if (resid > 1e-6 * (1.0 + std::abs(root))) continue;  // jump, not a root
        bool dup = false;
        for (const auto& r : roots)
            if (std::abs(r.p - root) < 1e-8 * (1.0 + std::abs(root))) dup = true;
        if (dup) continue;

        PeriodicPoint pp;
        pp.p = root;
        pp.n = n;
        double x = root;
        double mult = 1.0;
        bool mult_ok = true;
        for (int k = 0; k < n; ++k) {
            const auto s = eval(x);
            pp.branches.push_back(s.branch_j);
            try {
                mult *= derivative(s);
            } catch (const Error&) {
                mult_ok = false;
            }
            x = s.R;
        }
        pp.multiplier = mult_ok ? mult : std::numeric_limits<double>::quiet_NaN();
        pp.minimal_period = n;
        for (int d = 1; d < n; ++d) {
            if (n % d) continue;
            if (std::abs(evalRn(root, d) - root) < 1e-6 * (1.0 + std::abs(root))) {
                pp.minimal_period = d;
                break;
            }
        }
        int jsum = 0;
        for (int k = 0; k < pp.minimal_period; ++k) jsum += pp.branches[k];
        pp.period_in_T = jsum;
        roots.push_back(pp);
    }
    std::sort(roots.begin(), roots.end(),
              [](const PeriodicPoint& x, const PeriodicPoint& y) { return x.p < y.p; });
    return roots;
}

}  // namespace maxdde
