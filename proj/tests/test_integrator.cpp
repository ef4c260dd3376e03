#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "maxdde/closed_form.hpp"
#include "maxdde/integrator.hpp"
#include "maxdde/problem.hpp"

using namespace maxdde;
namespace {
constexpr double kPi = std::numbers::pi;

NormalizedProblem zero_forcing_problem(double a, double b, double h) {
    std::vector<std::pair<double, double>> z;
    for (int i = 0; i < 16; ++i) z.emplace_back(i * kPi / 8, 0.0);
    return NormalizedProblem(Parameters(a, b, h), SineForcing::table(z, 2 * kPi), 0.0,
                             0.0, kPi);
}

// sup |u - ref| over the stored grid, restricted to t >= t0
template <typename F>
double sup_err(const Trajectory& tr, F&& ref, double t_lo, double t_hi) {
    double m = 0.0;
    for (std::size_t i = tr.history_len(); i < tr.size(); ++i) {
        const double t = tr.times()[i];
        if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
        m = std::max(m, std::abs(tr.values()[i] - ref(t)));
    }
    return m;
}
}  // namespace

TEST_SUITE("integrator") {

TEST_CASE("b = 0, f = 0 reduces to exponential decay") {
    auto prob = zero_forcing_problem(-0.7, 0.0, 1.5);
    const double p = 1.3;
    auto tr = integrate(prob, 0.0, History::constant(p), 10.0, {});
    const double err =
        sup_err(tr, [&](double t) { return p * std::exp(-0.7 * t); }, 0.0, 10.0);
    CHECK(err < 1e-9);
}

TEST_CASE("cos t solves the windowed-cos problem") {
    auto prob = preset_problem("ex1");
    // u(t_raw) = cos(t_raw) is sin(s) in normalized time s = t_raw + pi/2
    History hist{[](double s) { return std::sin(s); },
                 [](double s) { return std::cos(s); }};
    const double q = 0.5 * kPi;
    IntegrateOptions io;
    io.dt = prob.params().h / 4000;  // the forcing kinks cost one order locally
    auto tr = integrate(prob, q, hist, q + 3 * prob.T(), io);
    const double err =
        sup_err(tr, [](double s) { return std::sin(s); }, q, q + 3 * prob.T());
    CHECK(err < 1e-6);
}

TEST_CASE("matches the two-step closed forms (pure lag and max modes)") {
    auto prob = preset_problem("ex2");
    const double h = prob.params().h;
    for (double q_raw : {-0.5 * kPi, -1.0, -0.12, 0.2, 0.39}) {
        const double p = (1.0 - std::sin(q_raw)) / 0.68;
        const double q = prob.to_normalized(q_raw);
        IntegrateOptions lag;
        lag.delay = DelayTerm::PureLag;
        auto trL = integrate(prob, q, History::constant(p), q + 2 * h, lag);
        const double errL = sup_err(
            trL,
            [&](double s) { return closed_form::solution(q_raw, prob.to_raw(s)); }, q,
            q + 2 * h);
        CAPTURE(q_raw);
        CHECK(errL < 1e-6);

        // the max-functional equation coincides with the pure-lag one until
        // u(t) first catches u(t-h)
        auto trM = integrate(prob, q, History::constant(p), q + 2 * h, {});
        double mu = q + 2 * h;
        for (std::size_t i = trM.history_len() + 2; i < trM.size(); ++i) {
            const double t = trM.times()[i];
            if (t <= q + h) {
                if (trM.values()[i] >= p) { mu = t; break; }
                continue;
            }
            if (trM.values()[i] >= trM.value(t - h)) { mu = t; break; }
        }
        const double errM = sup_err(
            trM,
            [&](double s) { return closed_form::solution(q_raw, prob.to_raw(s)); }, q,
            mu - trM.dt());
        CHECK(errM < 1e-6);
    }
}

TEST_CASE("window max: constant, monotone, interior-peak cases") {
    auto prob = zero_forcing_problem(-0.7, 0.0, 1.5 * kPi);
    auto tr = integrate(prob, 0.0, History::constant(2.5), 8.0, {});
    CHECK(tr.window_max(0.0) == doctest::Approx(2.5).epsilon(1e-12));

    // strictly increasing samples: max at the right end
    {
        const double dt = 0.01, h = 1.5 * kPi;
        std::vector<double> t, u, du, wm;
        for (int i = 0; i <= 800; ++i) {
            t.push_back(-h + i * dt);
            u.push_back(std::exp(0.3 * t.back()));
            du.push_back(0.3 * u.back());
            wm.push_back(u.back());
        }
        Trajectory incr(0.0, dt, h, 471, t, u, du, wm);
        for (double tt : {0.5, 1.2, 2.9})
            CHECK(incr.window_max(tt) == doctest::Approx(std::exp(0.3 * tt)).epsilon(1e-12));
    }

    // u = sin over a window of length 3pi/2 containing pi/2: max = 1
    {
        const double dt = 0.01, h = 1.5 * kPi;
        std::vector<double> t, u, du, wm;
        for (int i = 0; i <= 1200; ++i) {
            t.push_back(-h + i * dt);
            u.push_back(std::sin(t.back()));
            du.push_back(std::cos(t.back()));
            wm.push_back(0.0);
        }
        Trajectory sine(0.0, dt, h, 471, t, u, du, wm);
        CHECK(std::abs(sine.window_max(kPi) - 1.0) < 1e-9);
        // brute-force oracle on a dense grid never exceeds the refined value
        double brute = -1e300;
        for (int k = 0; k <= 100000; ++k)
            brute = std::max(brute, std::sin(kPi - h + (h * k) / 100000));
        CHECK(sine.window_max(kPi) >= brute - 1e-12);
    }
}

TEST_CASE("stored window maxima dominate values and match a dense re-scan") {
    auto prob = preset_problem("ex2");
    const double p = 1.7, q = prob.ftilde_inverse(p);
    auto tr = integrate(prob, q, History::constant(p), q + 2.5 * prob.T(), {});
    std::mt19937 rng(5);
    std::uniform_int_distribution<std::size_t> di(tr.history_len(), tr.size() - 1);
    for (std::size_t i = tr.history_len(); i < tr.size(); ++i)
        CHECK(tr.window_maxima()[i] >= tr.values()[i] - 1e-12);
    for (int k = 0; k < 25; ++k) {
        const std::size_t i = di(rng);
        const double t = tr.times()[i];
        // dense re-scan of the interpolant
        double dense = -1e300;
        for (int j = 0; j <= 4000; ++j)
            dense = std::max(dense, tr.value(t - prob.params().h +
                                             prob.params().h * j / 4000.0));
        CHECK(tr.window_maxima()[i] == doctest::Approx(dense).epsilon(1e-7));
    }
}

TEST_CASE("qualified maxima of the cosine solution sit at its peaks") {
    auto prob = preset_problem("ex1");
    History hist{[](double s) { return std::sin(s); },
                 [](double s) { return std::cos(s); }};
    const double q = 0.5 * kPi;
    auto tr = integrate(prob, q, hist, q + 6 * prob.T(), {});
    auto evs = detect_qualified_maxima(prob, tr);
    REQUIRE(evs.size() >= 2);
    for (std::size_t k = 0; k < evs.size(); ++k) {
        // the forcing has kinks, so the solver is accurate to ~1e-6 here
        CHECK(std::abs(evs[k].value - 1.0) < 3e-6);
        // peaks of sin(s) at s = pi/2 + 2 pi k (skipping the initial one)
        const double expected = 0.5 * kPi + 2 * kPi * (k + 1);
        CHECK(std::abs(evs[k].tau - expected) < 5e-3);
    }
}

TEST_CASE("first event from p = 0 reproduces R(0) ~ 2.237") {
    auto prob = preset_problem("ex2");
    const double q = prob.beta();
    auto tr = integrate(prob, q, History::constant(0.0), q + 3 * prob.T(), {});
    auto evs = detect_qualified_maxima(prob, tr);
    REQUIRE(!evs.empty());
    CHECK(evs.front().value == doctest::Approx(2.23728).epsilon(2e-4));
    CHECK(evs.front().branch_j == 1);
    CHECK(evs.front().tau > prob.T());
    CHECK(evs.front().tau < prob.T() + prob.beta());
}

TEST_CASE("event invariants: value on the forcing curve, branch window") {
    auto prob = preset_problem("ex2");
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dp(0.0, prob.ftilde_max());
    for (int k = 0; k < 4; ++k) {
        const double p = dp(rng), q = prob.ftilde_inverse(p);
        auto tr = integrate(prob, q, History::constant(p), q + 8 * prob.T(), {});
        for (const auto& ev : detect_qualified_maxima(prob, tr)) {
            CHECK(std::abs(ev.value - prob.ftilde(ev.tau)) < 1e-4);
            double r = std::fmod(ev.tau, prob.T());
            if (r < 0) r += prob.T();
            CHECK(r < prob.beta());
            // the value is the max over [tau - h, tau + eps]
            CHECK(tr.range_max(ev.tau - prob.params().h,
                               std::min(ev.tau + ev.epsilon_used, tr.t_end())) <=
                  ev.value + 1e-4);
        }
    }
}

TEST_CASE("eventual bound u <= max ftilde (quick version)") {
    auto prob = preset_problem("ex2");
    const double fstar = prob.ftilde_max();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dp(-3.0 * fstar, 3.0 * fstar);
    for (int k = 0; k < 5; ++k) {
        const double p0 = dp(rng);
        auto tr = integrate(prob, 0.0, History::constant(p0), 6.5 * prob.T(), {});
        for (std::size_t i = tr.history_len(); i < tr.size(); ++i)
            if (tr.times()[i] > 5 * prob.T())
                CHECK(tr.values()[i] <= fstar + 1e-3);
    }
}

TEST_CASE("step halving: 4th order on smooth segments") {
    auto prob = preset_problem("ex2");
    const double q = prob.to_normalized(0.0);  // raw q = 0, below beta1
    const double p = prob.ftilde(q);
    const double h = prob.params().h;
    // the right-hand side is smooth on (q, q+h) where the window max is p
    auto run = [&](double dt) {
        IntegrateOptions o;
        o.dt = dt;
        return integrate(prob, q, History::constant(p), q + 0.9 * h, o);
    };
    auto t1 = run(h / 500), t2 = run(h / 1000), t3 = run(h / 2000);
    double e12 = 0.0, e23 = 0.0;
    for (double t = q + 0.1 * h; t < q + 0.85 * h; t += h / 97) {
        e12 = std::max(e12, std::abs(t1.value(t) - t2.value(t)));
        e23 = std::max(e23, std::abs(t2.value(t) - t3.value(t)));
    }
    CHECK(e12 / e23 >= 8.0);
}

TEST_CASE("rejections: oversized dt, non-finite history, bad range") {
    auto prob = preset_problem("ex2");
    IntegrateOptions big;
    big.dt = prob.params().h / 10;
    CHECK_THROWS_AS(integrate(prob, 0.0, History::constant(1.0), 5.0, big), Error);
    CHECK_THROWS_AS(
        integrate(prob, 0.0, History::constant(std::nan("")), 5.0, {}), Error);
    CHECK_THROWS_AS(integrate(prob, 0.0, History::constant(1.0), -1.0, {}), Error);
}

}  // TEST_SUITE
