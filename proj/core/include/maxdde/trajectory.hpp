#pragma once

#include <cstddef>
#include <vector>

namespace maxdde {

/// A local maximum tau with u(tau) = max u over [tau-h, tau+eps].
struct QualifiedMax {
    double tau = 0.0;
    double value = 0.0;
    double epsilon_used = 0.0;
    int branch_j = 0;       // tau in (jT, jT + beta)
    bool grazing = false;   // window max ties u's value only marginally
};

/// Dense solution record on a uniform grid. The leading samples cover the
/// initial history [t0-h, t0]. Immutable once built.
class Trajectory {
public:
    Trajectory(double t0, double dt, double h, std::size_t history_len,
               std::vector<double> times, std::vector<double> values,
               std::vector<double> derivs, std::vector<double> window_max);

    double t0() const { return t0_; }
    double dt() const { return dt_; }
    double h() const { return h_; }
    double t_begin() const { return times_.front(); }  // t0 - history
    double t_end() const { return times_.back(); }
    std::size_t size() const { return times_.size(); }
    std::size_t history_len() const { return history_len_; }

    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& derivs() const { return derivs_; }
    const std::vector<double>& window_maxima() const { return window_max_; }

    // cubic Hermite interpolation of u and u'
    double value(double t) const;
    double derivative(double t) const;

    // max of the interpolant over [t-h, t]; t must be >= t0
    double window_max(double t) const;

    // max of the interpolant over [lo, hi] (monotone deque + segment refinement)
    double range_max(double lo, double hi) const;

    std::size_t index_before(double t) const;

private:
    double t0_, dt_, h_;
    std::size_t history_len_;
    std::vector<double> times_, values_, derivs_, window_max_;
};

}  // namespace maxdde
