#pragma once

#include <optional>
#include <string>

#include "maxdde/forcing.hpp"
#include "maxdde/parameters.hpp"

namespace maxdde {

/// Problem brought to normalized coordinates: the forcing has its maximum at
/// t = 0, decreases strictly on [0, beta], increases on [beta, T], min f = 0.
/// Raw time = normalized time + shift; raw forcing = f + offset.
class NormalizedProblem {
public:
    NormalizedProblem(Parameters params, SineForcing raw_forcing, double shift,
                      double offset, double beta);

    const Parameters& params() const { return params_; }
    double T() const { return forcing_raw_.period(); }
    double beta() const { return beta_; }
    double shift() const { return shift_; }
    double offset() const { return offset_; }

    // forcing in normalized coordinates
    double f(double t) const { return forcing_raw_.value(t + shift_) - offset_; }
    double ftilde(double t) const { return f(t) / params_.abs_sum(); }
    double ftilde_max() const { return ftilde(0.0); }

    // unique q in [0, beta] with ftilde(q) = p; rejects p outside [0, ftilde_max]
    double ftilde_inverse(double p) const;

    double to_raw(double t_normalized) const { return t_normalized + shift_; }
    double to_normalized(double t_raw) const { return t_raw - shift_; }

    const SineForcing& raw_forcing() const { return forcing_raw_; }

private:
    Parameters params_;
    SineForcing forcing_raw_;
    double shift_ = 0.0;   // raw time of the normalized origin (forcing maximum)
    double offset_ = 0.0;  // min of the raw forcing, subtracted
    double beta_ = 0.0;    // end of the decreasing branch, normalized time
};

/// Locates the forcing's maximum/minimum (golden-section refined), validates
/// sine-likeness, and records the shift/offset of the coordinate change.
/// Throws Error if the sampled derivative changes sign more than twice per period.
NormalizedProblem normalize_forcing(const SineForcing& raw, const Parameters& params);

// Built-in problems. "ex1": a=0, b=-1, h=3pi/2, f = -sin t + windowed cos max.
// "ex2": a=0.32, b=-1, h=3pi/2, f = 1 - sin t. Exact shift/beta constants.
NormalizedProblem preset_problem(const std::string& name);

// Problem definition JSON: {"a":..,"b":..,"h":..,
//   "forcing":{"type":"one_minus_sin"|"table","period":..,"samples":[[t,f],..]}}
NormalizedProblem load_problem_file(const std::string& path);
NormalizedProblem load_problem_json(const std::string& json_text);

}  // namespace maxdde
