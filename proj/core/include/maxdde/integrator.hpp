#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "maxdde/problem.hpp"
#include "maxdde/trajectory.hpp"

namespace maxdde {

/// Which delayed term the right-hand side uses.
enum class DelayTerm {
    WindowMax,  // b * max_{s in [t-h,t]} u(s)
    PureLag,    // b * u(t-h)
};

struct IntegrateOptions {
    double dt = 0.0;            // 0 -> h/2000
    DelayTerm delay = DelayTerm::WindowMax;
    double event_eps = 0.0;     // 0 -> 1e-3 * T; qualification window after a max
};

/// Initial history on [t0-h, t0]: value and (optional) derivative.
struct History {
    std::function<double(double)> value;
    std::function<double(double)> deriv;  // may be null; finite differences then

    static History constant(double p);
    static History function(std::function<double(double)> v,
                            std::function<double(double)> dv = nullptr);
};

/// Classical RK4 with the delayed term evaluated from the committed dense
/// output (cubic Hermite) plus the in-flight stage value when the window max
/// is the current point. dt must be <= h/100 and history samples finite.
Trajectory integrate(const NormalizedProblem& problem, double t0, const History& history,
                     double t_end, const IntegrateOptions& opts = {});

/// Upward crossings of u - ftilde on decreasing-branch windows (jT, jT+beta)
/// where the window max equals u, bisection-refined, then confirmed to
/// decrease on (tau, tau+eps]. Strictly increasing event times.
std::vector<QualifiedMax> detect_qualified_maxima(const NormalizedProblem& problem,
                                                  const Trajectory& tr, double eps = 0.0,
                                                  double t_min = -1e300);

}  // namespace maxdde
