#include "maxdde/problem.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace maxdde {

namespace {
constexpr double kPi = std::numbers::pi;

// golden-section minimum of g on [lo, hi]
double golden_min(const std::function<double(double)>& g, double lo, double hi,
                  double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double gc = g(c), gd = g(d);
    while (hi - lo > tol) {
        if (gc < gd) {
            hi = d; d = c; gd = gc;
            c = hi - gr * (hi - lo); gc = g(c);
        } else {
            lo = c; c = d; gc = gd;
            d = lo + gr * (hi - lo); gd = g(d);
        }
    }
    return 0.5 * (lo + hi);
}
}  // namespace

NormalizedProblem::NormalizedProblem(Parameters params, SineForcing raw_forcing,
                                     double shift, double offset, double beta)
    : params_(params), forcing_raw_(std::move(raw_forcing)), shift_(shift),
      offset_(offset), beta_(beta) {
    if (!(params_.h < forcing_raw_.period()))
        throw Error("NormalizedProblem: requires h < T");
    if (params_.sum() >= 0.0)
        throw Error("NormalizedProblem: analyses require a + b < 0");
    if (!(beta_ > 0.0 && beta_ < forcing_raw_.period()))
        throw Error("NormalizedProblem: beta outside (0, T)");
}

double NormalizedProblem::ftilde_inverse(double p) const {
    const double top = ftilde_max();
    if (!(p >= -1e-12 * top) || !(p <= top * (1.0 + 1e-12)))
        throw Error("ftilde_inverse: p outside K = [0, ftilde(0)]");
    double lo = 0.0, hi = beta_;  // ftilde strictly decreasing on [0, beta]
    for (int i = 0; i < 200 && hi - lo > 1e-16 * beta_; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ftilde(mid) > p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

NormalizedProblem normalize_forcing(const SineForcing& raw, const Parameters& params) {
    if (!raw.is_sine_like())
        throw Error("normalize_forcing: sampled derivative changes sign more than "
                    "twice per period (not sine-like)");
    const double T = raw.period();
    const int n = 8192;
    double tmax = 0.0, tmin = 0.0, vmax = -1e300, vmin = 1e300;
    for (int i = 0; i < n; ++i) {
        const double t = T * i / n, v = raw.value(t);
        if (v > vmax) { vmax = v; tmax = t; }
        if (v < vmin) { vmin = v; tmin = t; }
    }
    const double tol = 1e-10 * T, span = T / n;
    tmax = golden_min([&](double t) { return -raw.value(t); }, tmax - span, tmax + span, tol);
    tmin = golden_min([&](double t) { return raw.value(t); }, tmin - span, tmin + span, tol);

    double shift = tmax;
    // map the raw maximum to a canonical representative in (-T, T]
    if (shift > T / 2) shift -= T;
    double beta = tmin - shift;
    while (beta <= 0.0) beta += T;
    while (beta >= T) beta -= T;
    const double offset = raw.value(tmin);
    return NormalizedProblem(params, raw, shift, offset, beta);
}

NormalizedProblem preset_problem(const std::string& name) {
    if (name == "ex2") {
        // u' = 0.32 u - max u + 1 - sin t ; forcing max at -pi/2, min 0 at pi/2
        return NormalizedProblem(Parameters(0.32, -1.0, 1.5 * kPi),
                                 SineForcing::one_minus_sin(), -0.5 * kPi, 0.0, kPi);
    }
    if (name == "ex1") {
        // u' = -max u + f, f = -sin t + max cos over the trailing window
        return NormalizedProblem(Parameters(0.0, -1.0, 1.5 * kPi),
                                 SineForcing::sin_plus_windowed_cos(), -0.5 * kPi, 0.0,
                                 kPi);
    }
    throw Error("unknown preset '" + name + "' (have: ex1, ex2)");
}

NormalizedProblem load_problem_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error(std::string("problem file: invalid JSON: ") + e.what());
    }
    for (const char* k : {"a", "b", "h", "forcing"})
        if (!j.contains(k)) throw Error(std::string("problem file: missing field '") + k + "'");
    Parameters params(j.at("a").get<double>(), j.at("b").get<double>(),
                      j.at("h").get<double>());
    const auto& jf = j.at("forcing");
    const std::string type = jf.value("type", "");
    if (type == "one_minus_sin") {
        return NormalizedProblem(params, SineForcing::one_minus_sin(), -0.5 * kPi, 0.0,
                                 kPi);
    }
    if (type == "table") {
        if (!jf.contains("period") || !jf.contains("samples"))
            throw Error("problem file: table forcing needs 'period' and 'samples'");
        std::vector<std::pair<double, double>> samples;
        for (const auto& s : jf.at("samples"))
            samples.emplace_back(s.at(0).get<double>(), s.at(1).get<double>());
        return normalize_forcing(SineForcing::table(samples, jf.at("period").get<double>()),
                                 params);
    }
    throw Error("problem file: forcing type must be 'one_minus_sin' or 'table'");
}

NormalizedProblem load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open problem file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_problem_json(ss.str());
}

}  // namespace maxdde
