#include "maxdde/fundamental.hpp"

#include <cmath>

namespace maxdde {

namespace {
inline double hermite_seg(double y0, double y1, double d0, double d1, double w, double u) {
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * w * d0 +
           (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * w * d1;
}
}  // namespace

FundamentalSolution::FundamentalSolution(Parameters params, double t_max, double dt)
    : params_(params), t_max_(t_max), dt_(dt > 0.0 ? dt : params.h / 2000.0) {
    if (!(t_max_ > params_.h)) throw Error("FundamentalSolution: t_max too small");
    const double a = params_.a, b = params_.b, h = params_.h;
    const auto n = static_cast<std::size_t>(std::ceil(t_max_ / dt_ - 1e-9)) + 1;
    t_.reserve(n); v_.reserve(n); dv_.reserve(n); cum_.reserve(n);

    auto lag = [&](double s) -> double {  // v(s - h), exact zero before 0
        const double x = s - h;
        if (x < 0.0) return 0.0;
        if (x >= t_.back()) return v_.back();
        std::size_t i = static_cast<std::size_t>(x / dt_);
        if (i >= t_.size() - 1) i = t_.size() - 2;
        return hermite_seg(v_[i], v_[i + 1], dv_[i], dv_[i + 1], dt_, (x - t_[i]) / dt_);
    };

    t_.push_back(0.0);
    v_.push_back(1.0);
    dv_.push_back(a);  // v' (0+) = a v(0) + b v(-h) = a
    cum_.push_back(0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double ti = t_.back(), y = v_.back();
        // v(t) = e^{at} exactly while t < h
        if (ti + dt_ <= h + 1e-12) {
            const double tn = static_cast<double>(k) * dt_;
            t_.push_back(tn);
            v_.push_back(std::exp(a * tn));
            dv_.push_back(a * v_.back());
        } else {
            const double k1 = a * y + b * lag(ti);
            const double k2 = a * (y + 0.5 * dt_ * k1) + b * lag(ti + 0.5 * dt_);
            const double k3 = a * (y + 0.5 * dt_ * k2) + b * lag(ti + 0.5 * dt_);
            const double k4 = a * (y + dt_ * k3) + b * lag(ti + dt_);
            const double tn = static_cast<double>(k) * dt_;
            const double yn = y + dt_ / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            t_.push_back(tn);
            v_.push_back(yn);
            dv_.push_back(a * yn + b * lag(tn));
        }
        // Simpson-like increment from the Hermite segment (exact for cubics)
        const std::size_t i = t_.size() - 2;
        cum_.push_back(cum_.back() + dt_ * (0.5 * (v_[i] + v_[i + 1]) +
                                            dt_ / 12.0 * (dv_[i] - dv_[i + 1])));
    }
}

double FundamentalSolution::hermite(const std::vector<double>& y,
                                    const std::vector<double>& dy, double x) const {
    if (x <= 0.0) return y.front();
    if (x >= t_.back()) return y.back();
    std::size_t i = static_cast<std::size_t>(x / dt_);
    if (i >= t_.size() - 1) i = t_.size() - 2;
    return hermite_seg(y[i], y[i + 1], dy[i], dy[i + 1], dt_, (x - t_[i]) / dt_);
}

double FundamentalSolution::v(double x) const {
    if (x < 0.0) return 0.0;
    if (x < params_.h) return std::exp(params_.a * x);  // exact on the first step
    return hermite(v_, dv_, x);
}

double FundamentalSolution::integral(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= t_.back()) return cum_.back();
    std::size_t i = static_cast<std::size_t>(x / dt_);
    if (i >= t_.size() - 1) i = t_.size() - 2;
    // integrate the Hermite segment from t_[i] to x (cubic antiderivative)
    const double w = dt_, u = (x - t_[i]) / w;
    const double u2 = u * u, u3 = u2 * u, u4 = u3 * u;
    const double I = (0.5 * u4 - u3 + u) * v_[i] * w +
                     (0.25 * u4 - 2.0 / 3.0 * u3 + 0.5 * u2) * w * w * dv_[i] +
                     (-0.5 * u4 + u3) * v_[i + 1] * w +
                     (0.25 * u4 - u3 / 3.0) * w * w * dv_[i + 1];
    return cum_[i] + I;
}

double FundamentalSolution::V(double x) const {
    const double lo = x - params_.h;
    return v(x) + params_.b * (integral(x) - (lo > 0.0 ? integral(lo) : 0.0));
}

std::pair<std::optional<double>, std::optional<double>> FundamentalSolution::V_roots()
    const {
    std::optional<double> r1, r2;
    const int n = 4000;
    double prev_t = 1e-9, prev = V(prev_t);
    for (int i = 1; i <= n; ++i) {
        const double x = t_max_ * i / n;
        const double val = V(x);
        if (prev * val < 0.0) {
            double lo = prev_t, hi = x;
            const bool up = val > 0.0;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                ((V(mid) > 0.0) == up ? hi : lo) = mid;
            }
            const double root = 0.5 * (lo + hi);
            if (!r1) r1 = root;
            else if (!r2) { r2 = root; break; }
        }
        prev = val;
        prev_t = x;
    }
    return {r1, r2};
}

}  // namespace maxdde
