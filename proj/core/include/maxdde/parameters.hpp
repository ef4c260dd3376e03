#pragma once

#include <stdexcept>
#include <string>

namespace maxdde {

/// Error type for invalid problem definitions and failed analyses.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Coefficients of u'(t) = a*u(t) + b*max_{s in [t-h,t]} u(s) + f(t).
struct Parameters {
    double a = 0.0;  // growth coefficient, 1/time
    double b = 0.0;  // feedback coefficient on the running maximum, 1/time
    double h = 1.0;  // window length, time

    Parameters() = default;
    Parameters(double a_, double b_, double h_);

    double sum() const { return a + b; }
    double abs_sum() const { return a + b < 0 ? -(a + b) : a + b; }
};

enum class StabilityBranch { None, SmallDelay, LargeDelay };

/// Result of the delay-independent stability test for u' = a u + b max u.
struct StabilityResult {
    bool stable = false;
    StabilityBranch branch = StabilityBranch::None;
};

// Stable iff (b+a < 0 and a h <= 1) or (b h < -exp(a h - 1) and a h >= 1).
StabilityResult stability_check(const Parameters& p);

// Decay/peak-comparison weights (alpha, beta_gain) -> (a, b) = (beta_gain - alpha, -beta_gain).
Parameters map_hedonic_params(double alpha, double beta_gain, double h = 1.0);

}  // namespace maxdde
