#pragma once

#include <optional>
#include <vector>

#include "maxdde/parameters.hpp"

namespace maxdde {

/// Fundamental solution v of v' = a v + b v(t-h), v(0) = 1, v = 0 on [-h, 0),
/// with its running integral, and V(t) = v(t) + b * int_{t-h}^{t} v(s) ds.
/// v(t) = e^{a t} exactly on [0, h); numerically continued by steps after.
class FundamentalSolution {
public:
    FundamentalSolution(Parameters params, double t_max, double dt = 0.0);

    double t_max() const { return t_max_; }
    double v(double t) const;        // 0 for t < 0
    double integral(double t) const; // int_0^t v(s) ds, t >= 0
    double V(double t) const;

    // First two sign changes of V on (0, t_max]; empty slots if none found.
    std::pair<std::optional<double>, std::optional<double>> V_roots() const;

private:
    Parameters params_;
    double t_max_, dt_;
    std::vector<double> t_, v_, dv_, cum_;
    double hermite(const std::vector<double>& y, const std::vector<double>& dy, double t) const;
};

}  // namespace maxdde
