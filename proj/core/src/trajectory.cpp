#include "maxdde/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "maxdde/parameters.hpp"

namespace maxdde {

namespace {

// cubic Hermite on [0,1] with slopes scaled by the segment width
inline double hermite_val(double y0, double y1, double d0, double d1, double w,
                          double u) {
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * w * d0 +
           (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * w * d1;
}

inline double hermite_der(double y0, double y1, double d0, double d1, double w,
                          double u) {
    const double u2 = u * u;
    return ((6 * u2 - 6 * u) * (y0 - y1)) / w + (3 * u2 - 4 * u + 1) * d0 +
           (3 * u2 - 2 * u) * d1;
}

// max of the segment's interpolant over u in [ulo, uhi]
double segment_max(double y0, double y1, double d0, double d1, double w, double ulo,
                   double uhi) {
    double m = std::max(hermite_val(y0, y1, d0, d1, w, ulo),
                        hermite_val(y0, y1, d0, d1, w, uhi));
    // critical points: quadratic in u
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

}  // namespace

Trajectory::Trajectory(double t0, double dt, double h, std::size_t history_len,
                       std::vector<double> times, std::vector<double> values,
                       std::vector<double> derivs, std::vector<double> window_max)
    : t0_(t0), dt_(dt), h_(h), history_len_(history_len), times_(std::move(times)),
      values_(std::move(values)), derivs_(std::move(derivs)),
      window_max_(std::move(window_max)) {}

std::size_t Trajectory::index_before(double t) const {
    const double x = (t - times_.front()) / dt_;
    if (x <= 0.0) return 0;
    auto i = static_cast<std::size_t>(x);
    if (i >= times_.size() - 1) i = times_.size() - 2;
    return i;
}

double Trajectory::value(double t) const {
    if (t <= times_.front()) return values_.front();
    if (t >= times_.back()) return values_.back();
    const std::size_t i = index_before(t);
    const double u = (t - times_[i]) / dt_;
    return hermite_val(values_[i], values_[i + 1], derivs_[i], derivs_[i + 1], dt_, u);
}

double Trajectory::derivative(double t) const {
    if (t <= times_.front()) return derivs_.front();
    if (t >= times_.back()) return derivs_.back();
    const std::size_t i = index_before(t);
    const double u = (t - times_[i]) / dt_;
    return hermite_der(values_[i], values_[i + 1], derivs_[i], derivs_[i + 1], dt_, u);
}

double Trajectory::range_max(double lo, double hi) const {
    if (!(hi >= lo)) throw Error("range_max: empty range");
    lo = std::max(lo, times_.front());
    hi = std::min(hi, times_.back());
    const std::size_t i0 = index_before(lo), i1 = index_before(hi);
    double m = std::max(value(lo), value(hi));
    for (std::size_t i = i0 + 1; i <= i1; ++i) m = std::max(m, values_[i]);
    // refine segments that could hide an interior maximum above the samples
    for (std::size_t i = i0; i <= i1; ++i) {
        const double excess =
            dt_ * std::max(std::abs(derivs_[i]), std::abs(derivs_[i + 1]));
        if (std::max(values_[i], values_[i + 1]) + excess < m) continue;
        const double ulo = (i == i0) ? std::max(0.0, (lo - times_[i]) / dt_) : 0.0;
        const double uhi = (i == i1) ? std::min(1.0, (hi - times_[i]) / dt_) : 1.0;
        if (uhi <= ulo) continue;
        m = std::max(m, segment_max(values_[i], values_[i + 1], derivs_[i],
                                    derivs_[i + 1], dt_, ulo, uhi));
    }
    return m;
}

double Trajectory::window_max(double t) const {
    if (t < t0_ - 1e-12 * dt_) throw Error("window_max: t before t0");
    if (t > times_.back() + 1e-12 * dt_) throw Error("window_max: t past the grid");
    return range_max(t - h_, t);
}

}  // namespace maxdde
