#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "maxdde/return_map.hpp"

using namespace maxdde;
namespace {
constexpr double kPi = std::numbers::pi;

const ReturnMap& ex2_map() {
    static ReturnMap rm(preset_problem("ex2"));
    return rm;
}
const ReturnMap& ex1_map() {
    static ReturnMap rm(preset_problem("ex1"));
    return rm;
}
}  // namespace

TEST_SUITE("return_map") {

TEST_CASE("R(0) and R(R(0))") {
    const auto& rm = ex2_map();
    const auto s0 = rm.eval(0.0);
    CHECK(s0.R == doctest::Approx(2.23728).epsilon(2e-4));
    CHECK(s0.branch_j == 1);
    CHECK(s0.nu_star > rm.problem().T());
    CHECK(s0.nu_star < rm.problem().T() + rm.problem().beta());
    CHECK(rm(s0.R) == doctest::Approx(0.45679).epsilon(2e-3));
}

TEST_CASE("fixed point of the cosine example: R(1) = 1, R'(1) ~ -1.91") {
    const auto& rm = ex1_map();
    const auto s = rm.eval(1.0);
    CHECK(std::abs(s.R - 1.0) < 1e-6);
    CHECK(s.lambda - s.q == doctest::Approx(1.5 * kPi).epsilon(1e-6));
    CHECK(s.mu - s.q == doctest::Approx(1.75 * kPi).epsilon(1e-4));
    CHECK(s.nu_star - s.q == doctest::Approx(2 * kPi).epsilon(1e-6));
    const double closed = (1.0 - 7 * kPi / 4 + kPi * kPi / 32) * std::exp(-kPi / 4);
    CHECK(rm.derivative(s) == doctest::Approx(closed).epsilon(2e-3));
    // centered difference agrees
    const double fd = (rm(1.0 + 1e-4) - rm(1.0 - 1e-4)) / 2e-4;
    CHECK(fd == doctest::Approx(closed).epsilon(1e-2));
}

TEST_CASE("beta1 and ftilde(beta1)") {
    const auto b1 = ex2_map().beta1();
    CHECK(b1.q_raw == doctest::Approx(0.39289753).epsilon(1e-5));
    CHECK(b1.p == doctest::Approx(0.90754887).epsilon(1e-5));
    CHECK(std::abs(b1.residual) < 1e-6);
}

TEST_CASE("q0 root of the tangency equation") {
    const auto q0 = ex2_map().q0_root();
    REQUIRE(q0.has_value());
    CHECK(q0->q_raw == doctest::Approx(1.18459423).epsilon(1e-6));
    CHECK(q0->p == doctest::Approx(0.10831426).epsilon(1e-5));
    // the plateau length at the critical point equals (1/a) ln(b/(a+b))
    const auto s = ex2_map().eval(q0->p);
    CHECK(s.mu - s.q == doctest::Approx(std::log(1.0 / 0.68) / 0.32).epsilon(2e-4));
}

TEST_CASE("q0 not applicable when the window is too short") {
    ReturnMap rm(NormalizedProblem(Parameters(0.32, -0.4, 1.5 * kPi),
                                   SineForcing::one_minus_sin(), -0.5 * kPi, 0.0, kPi));
    CHECK_FALSE(rm.q0_root().has_value());
}

TEST_CASE("condition (fs): sign certifies the branch structure") {
    const auto& rm = ex2_map();
    const auto& prob = rm.problem();
    CHECK(rm.condition_fs(prob.to_normalized(1.0)) ==
          doctest::Approx(6.5385965).epsilon(1e-6));
    CHECK(rm.condition_fs(prob.to_normalized(0.0)) ==
          doctest::Approx(-4.3881766).epsilon(1e-6));
    const auto b1 = rm.beta1();
    CHECK(std::abs(rm.condition_fs(b1.q)) < 1e-6);
    // homogeneity: scaling the forcing leaves beta1 unchanged
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i < 2048; ++i) {
        const double t = 2 * kPi * i / 2048;
        samples.emplace_back(t, 3.0 * (1.0 - std::sin(t)));
    }
    ReturnMap scaled(normalize_forcing(SineForcing::table(samples, 2 * kPi),
                                       prob.params()));
    CHECK(scaled.beta1().q_raw == doctest::Approx(b1.q_raw).epsilon(1e-4));
}

TEST_CASE("condition (ss): negative where the image is large") {
    const auto& rm = ex2_map();
    CHECK(rm.condition_ss(0.5) < 0.0);   // R(0.5) ~ 2.0
    CHECK(rm.condition_ss(1.3) < 0.0);   // R(1.3) lands near R(0)
    // diagnostic sign flip where the image is small: R(2.0) ~ 0.89
    CHECK(rm.condition_ss(2.0) > 0.0);
}

TEST_CASE("segmentation across the branch boundary") {
    const auto& rm = ex2_map();
    const auto& prob = rm.problem();
    const double h = prob.params().h;

    // raw q = 1.3 lies past q0: crossing inside the first window, short plateau
    {
        const double p = prob.ftilde(prob.to_normalized(1.3));
        const auto s = rm.eval(p);
        CHECK(s.lambda == doctest::Approx(s.mu));
        CHECK(s.lambda - s.q <= h);
        CHECK(s.mu - s.q == doctest::Approx(0.8334471).epsilon(1e-4));
        CHECK(s.mu - s.q < std::log(1.0 / 0.68) / 0.32);  // past the critical point
        CHECK(s.u_shaped);
        CHECK(rm.segment(p).fs_consistent);
    }
    // raw q = 0 sits below beta1: lambda = q + h
    {
        const double p = prob.ftilde(prob.to_normalized(0.0));
        const double q = prob.ftilde_inverse(p);
        const auto s = rm.segment(p);
        CHECK(s.lambda - q == doctest::Approx(h).epsilon(1e-12));
        CHECK(s.mu > s.lambda);
        CHECK(s.mu < s.nu_star);
        CHECK(s.u_shaped);
        CHECK(s.fs_consistent);
    }
    // p = 0 (q = beta): no plateau at all
    {
        const auto s = rm.eval(0.0);
        CHECK(s.lambda == doctest::Approx(s.q));
        CHECK(s.mu == doctest::Approx(s.q));
    }
}

TEST_CASE("derivative formulas against centered differences") {
    const auto& rm = ex2_map();
    for (double p : {0.3, 0.5, 1.5, 2.0}) {
        const double d = rm.derivative(p);
        const double fd = (rm(p + 1e-4) - rm(p - 1e-4)) / 2e-4;
        CAPTURE(p);
        CHECK(std::abs(d - fd) / std::max(1.0, std::abs(d)) < 1e-3);
    }
    // signs per the tangency analysis: rising left of p_c, falling after
    CHECK(rm.derivative(0.05) > 0.0);
    CHECK(rm.derivative(0.5) < 0.0);
    // critical point: derivative vanishes at p_c
    CHECK(std::abs(rm.derivative(0.10831426)) < 1e-3);
}

TEST_CASE("discontinuities of the branch index with jump contract") {
    const auto& rm = ex2_map();
    const auto discs = rm.find_discontinuities(0.05, 2.9, 160);
    REQUIRE(discs.size() == 2);
    CHECK(discs[0].p == doctest::Approx(1.19242).epsilon(5e-4));
    CHECK(discs[1].p == doctest::Approx(2.60346).epsilon(5e-4));
    for (const auto& d : discs) {
        CHECK(d.contract_ok);
        CHECK(d.R_left < 2e-2);
        CHECK(std::abs(d.R_at - 2.23728) < 2e-2);
        CHECK(d.j_right == d.j_left + 1);
        CHECK(d.grazing_confirmed);
    }
    // one-sided slopes: R'(p1-) < R'(p1+)
    const double p1 = discs[0].p;
    const double dm = rm.derivative(p1 - 1e-5), dp = rm.derivative(p1 + 1e-5);
    CHECK(dm < dp);
    CHECK(dp < 0.0);
}

TEST_CASE("the cosine example also jumps with the same contract") {
    const auto& rm = ex1_map();
    const auto discs = rm.find_discontinuities(0.1, 1.9, 120);
    REQUIRE(!discs.empty());
    CHECK(discs[0].p == doctest::Approx(1.641062).epsilon(2e-3));
    CHECK(discs[0].contract_ok);
}

TEST_CASE("fixed points: alpha and the double-period value") {
    const auto& rm = ex2_map();
    auto fps = rm.fixed_points(1, 0.92, 2.4, 140);
    REQUIRE(fps.size() >= 2);
    CHECK(fps.front().p == doctest::Approx(1.03774).epsilon(5e-4));
    CHECK(fps.front().branches == std::vector<int>{1});
    CHECK(fps.front().period_in_T == 1);
    CHECK(std::abs(fps.front().multiplier + 5.54) < 0.2);
    // the fixed point on the third interval is the 2T-periodic peak value
    bool found_gamma = false;
    for (const auto& fp : fps)
        if (std::abs(fp.p - 1.64799) < 2e-3) {
            found_gamma = true;
            CHECK(fp.period_in_T == 2);
        }
    CHECK(found_gamma);
    // fixed_points(2) reaches the same points as fixed points of R^2
    auto fps2 = rm.fixed_points(2, 1.55, 1.75, 40);
    bool gamma_again = false;
    for (const auto& fp : fps2)
        if (std::abs(fp.p - 1.64799) < 2e-3) {
            gamma_again = true;
            CHECK(fp.minimal_period == 1);
        }
    CHECK(gamma_again);
}

TEST_CASE("cosine example: two fixed points, the right one attracting") {
    const auto& rm = ex1_map();
    auto fps = rm.fixed_points(1, 0.3, 1.95, 120);
    REQUIRE(fps.size() == 2);
    CHECK(fps[0].p == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(fps[1].p == doctest::Approx(1.652353).epsilon(2e-3));
    CHECK(fps[1].period_in_T == 2);  // the 4 pi attractor
    CHECK(std::abs(fps[0].multiplier) > 1.0);
    CHECK(std::abs(fps[1].multiplier) < 1.0);
    // iteration drifts onto the attracting value
    auto orbit = rm.iterate(0.5, 60);
    CHECK(std::abs(orbit.back() - fps[1].p) < 1e-3);
}

TEST_CASE("map-flow consistency: event chain equals iterated map") {
    const auto& rm = ex2_map();
    const auto& prob = rm.problem();
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> dp(0.0, prob.ftilde_max());
    for (int k = 0; k < 2; ++k) {
        const double p = dp(rng), q = prob.ftilde_inverse(p);
        auto tr = integrate(prob, q, History::constant(p), q + 20 * prob.T(), {});
        auto evs = detect_qualified_maxima(prob, tr);
        REQUIRE(evs.size() >= 4);
        double x = evs[0].value;
        for (std::size_t i = 1; i < std::min<std::size_t>(evs.size(), 6); ++i) {
            x = rm(x);
            CHECK(std::abs(evs[i].value - x) < 2e-3);
        }
    }
}

TEST_CASE("R maps K into (0, max ftilde) for both built-in problems") {
    for (const auto* rm : {&ex2_map(), &ex1_map()}) {
        const double top = rm->problem().ftilde_max();
        for (int i = 0; i <= 60; ++i) {
            const double p = top * i / 60.0 * 0.999;
            const double R = (*rm)(p);
            CHECK(R > 0.0);
            CHECK(R < top);
        }
    }
    // the chaotic example clears the diagonal left of 0.9
    for (int i = 0; i <= 45; ++i) {
        const double p = 0.9 * i / 45.0;
        CHECK(ex2_map()(p) > p);
    }
}

}  // TEST_SUITE
