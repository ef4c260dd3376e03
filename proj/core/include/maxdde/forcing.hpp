#pragma once

#include <memory>
#include <string>
#include <vector>

namespace maxdde {

/// T-periodic forcing with one decreasing and one increasing branch per period
/// (sine-like). Immutable value type; cheap to copy.
class SineForcing {
public:
    // f(t) = 1 - sin(t), period 2*pi.
    static SineForcing one_minus_sin();
    // f(t) = -sin(t) + max_{s in [t-3pi/2, t]} cos(s), period 2*pi.
    static SineForcing sin_plus_windowed_cos();
    // Periodic cubic interpolation through (t, f) samples covering one period.
    static SineForcing table(const std::vector<std::pair<double, double>>& samples,
                             double period);

    double period() const;
    double value(double t) const;
    // Derivative of the interpolant / analytic derivative where defined.
    double derivative(double t) const;

    std::string type_name() const;
    const std::vector<std::pair<double, double>>& samples() const;  // empty unless table

    // Exactly two sign changes of the sampled finite-difference derivative per period.
    bool is_sine_like(int grid = 4096) const;

private:
    struct Impl;
    explicit SineForcing(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

}  // namespace maxdde
