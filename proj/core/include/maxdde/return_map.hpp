#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "maxdde/fundamental.hpp"
#include "maxdde/integrator.hpp"
#include "maxdde/problem.hpp"

namespace maxdde {

/// One evaluation of the first-recurrence map R at p = ftilde(q):
/// constant history p on [q-h, q], nu_star = first qualified maximum,
/// R = u(nu_star). lambda/mu delimit the window-max phases
/// (U = p on (q,lambda], U = u(t-h) on (lambda,mu], U = u on (mu,nu*)).
struct ReturnMapSample {
    double p = 0.0;
    double q = 0.0;        // normalized coordinates
    double lambda = 0.0;
    double mu = 0.0;
    double nu_star = 0.0;
    double R = 0.0;
    std::optional<double> Rprime;
    int branch_j = 0;      // nu_star in (jT, jT + beta)
    bool u_shaped = false; // single interior minimum, no interior maximum
    bool grazing = false;  // |u(beta + jT)| ~ 0 inside (mu, nu*)
};

/// A root on the decreasing forcing branch, reported in both time conventions.
struct BranchRoot {
    double q = 0.0;      // normalized
    double q_raw = 0.0;  // raw = normalized + shift
    double p = 0.0;      // ftilde(q)
    double residual = 0.0;
};

/// Jump of the branch index j(p) with the contract R(p-) -> 0, R(p) = R(0).
struct Discontinuity {
    double p = 0.0;
    int j_left = 0, j_right = 0;
    double R_left = 0.0;        // at p - 1e-6
    std::vector<double> R_left_seq;  // at p - {1e-4, 1e-5, 1e-6}
    double R_at = 0.0;          // just right of p
    bool contract_ok = false;
    bool grazing_confirmed = false;  // u(beta + jT) ~ 0 at the located p
};

struct PeriodicPoint {
    double p = 0.0;
    int n = 0;                  // R^n(p) = p
    int minimal_period = 0;
    double multiplier = 0.0;    // (R^n)'(p) via chained derivative
    std::vector<int> branches;  // branch_j along the cycle
    int period_in_T = 0;        // DDE-solution period = sum(branches) * T
};

struct ReturnMapOptions {
    double dt = 0.0;          // integrator step, 0 -> h/2000
    double event_eps = 0.0;   // 0 -> 1e-3 T
    double horizon_T = 12.0;  // give up if no event before q + horizon_T * T
    int quad_panels = 10000;  // composite Simpson panels for (fs)/(ss)/(m1)
    double root_tol = 1e-12;  // bisection tolerance in q or p
};

class ReturnMap {
public:
    explicit ReturnMap(NormalizedProblem problem, ReturnMapOptions opts = {});

    const NormalizedProblem& problem() const { return problem_; }
    const ReturnMapOptions& options() const { return opts_; }

    ReturnMapSample eval(double p) const;
    double operator()(double p) const { return eval(p).R; }
    std::vector<double> iterate(double p, int count) const;

    /// Phase boundaries of the window max between q and nu*: U = p on
    /// (q, lambda], U = u(t-h) on (lambda, mu], U = u on (mu, nu*). Checks the
    /// recovered lambda against the sign of condition_fs and reports
    /// non-U-shaped solutions distinctly.
    struct Segmentation {
        double lambda, mu, nu_star;
        bool u_shaped;
        bool fs_consistent;  // lambda = q+h exactly when condition_fs(q) <= 0
    };
    Segmentation segment(double p) const;

    // R'(p) from the variational multiplier: for mu = lambda (crossing within
    // the first step) the exponential closed form (a -> 0 limit handled);
    // otherwise V(mu - q) * exp((a+b)(nu* - mu)) via the fundamental solution.
    double derivative(const ReturnMapSample& s) const;
    double derivative(double p) const { return derivative(eval(p)); }

    // int_0^h e^{as} (f(q+h-s) - f(q)) ds ; >= 0 certifies continuity at ftilde(q)
    double condition_fs(double q) const;
    // int_0^h e^{as} (f(nu*-s) - f(nu*)) ds ; < 0 certifies the max condition at p
    double condition_ss(double p) const;

    // Boundary of {q : condition_fs(q) >= 0} = (beta1, beta); checks the
    // single-sign-change structure on a scan grid.
    BranchRoot beta1() const;

    // Root of f(tau) + b int_0^{L} e^{-a u} f(u+tau) du with L = ln(b/(a+b))/a
    // (L = -1/b when a = 0); nullopt when h <= L (then R' > 0 left of beta1).
    std::optional<BranchRoot> q0_root() const;

    const FundamentalSolution& fundamental(double t_max_min = 0.0) const;

    std::vector<Discontinuity> find_discontinuities(double p_lo, double p_hi,
                                                    int grid = 400) const;

    // Sign-change bracketing of R^n(p) - p on branch-signature-constant cells.
    std::vector<PeriodicPoint> fixed_points(int n, double p_lo, double p_hi,
                                            int grid = 800) const;

private:
    NormalizedProblem problem_;
    ReturnMapOptions opts_;
    mutable std::mutex fs_mutex_;
    mutable std::unique_ptr<FundamentalSolution> fs_;

    std::vector<int> branch_signature(double p, int n) const;
    double evalRn(double p, int n) const;
};

}  // namespace maxdde
