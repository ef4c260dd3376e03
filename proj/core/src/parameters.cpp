#include "maxdde/parameters.hpp"

#include <cmath>

namespace maxdde {

Parameters::Parameters(double a_, double b_, double h_) : a(a_), b(b_), h(h_) {
    if (!(h > 0.0)) throw Error("Parameters: window length h must be positive");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(h))
        throw Error("Parameters: coefficients must be finite");
    if (a + b == 0.0) throw Error("Parameters: a + b must be nonzero");
}

StabilityResult stability_check(const Parameters& p) {
    const double ah = p.a * p.h;
    if (p.b + p.a < 0.0 && ah <= 1.0)
        return {true, StabilityBranch::SmallDelay};
    if (p.b * p.h < -std::exp(ah - 1.0) && ah >= 1.0)
        return {true, StabilityBranch::LargeDelay};
    return {false, StabilityBranch::None};
}

Parameters map_hedonic_params(double alpha, double beta_gain, double h) {
    return Parameters(beta_gain - alpha, -beta_gain, h);
}

}  // namespace maxdde
