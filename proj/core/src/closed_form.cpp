#include "maxdde/closed_form.hpp"

#include <cmath>
#include <numbers>

#include "maxdde/parameters.hpp"

namespace maxdde::closed_form {

namespace {
constexpr double kPi = std::numbers::pi;
const double kH = 1.5 * kPi;
const double kTheta0 = std::asin(1.0 / std::sqrt(kA * kA + 1.0));
const double kC0 = 1.0 / std::sqrt(kA * kA + 1.0);
const double kC0s = 1.0 / (kA * kA + 1.0);

// coordinate-wise golden-section refinement of an extremum
template <typename F>
std::pair<double, double> golden(F&& g, double lo, double hi, bool maximize) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double gc = g(c), gd = g(d);
    for (int it = 0; it < 120 && hi - lo > 1e-13; ++it) {
        const bool left = maximize ? (gc > gd) : (gc < gd);
        if (left) {
            hi = d; d = c; gd = gc;
            c = hi - gr * (hi - lo); gc = g(c);
        } else {
            lo = c; c = d; gc = gd;
            d = lo + gr * (hi - lo); gd = g(d);
        }
    }
    const double x = 0.5 * (lo + hi);
    return {x, g(x)};
}
}  // namespace

double window_length() { return kH; }
double q_min() { return -0.5 * kPi; }
double q_max() { return 0.4; }

SegmentConstants SegmentConstants::at(double q) {
    if (q < q_min() - 1e-12 || q > q_max() + 1e-12)
        throw Error("closed_form: q outside [-pi/2, 0.4] (the formulas assume the "
                    "solution stays below p on the first step)");
    SegmentConstants c{};
    c.theta0 = kTheta0;
    c.C0 = kC0;
    c.C0s = kC0s;
    c.p = (1.0 - std::sin(q)) / kD;
    c.C1 = (c.p - 1.0) / kA;
    c.C2 = c.p - c.C1 - kC0 * std::sin(q + kTheta0);
    c.C3 = -kC0 * std::cos(q + kTheta0) + c.C1 + c.C2 * std::exp(kA * kH);
    c.C1s = (c.C1 - 1.0) / kA;
    c.C2s = c.C3 - kC0s * std::sin(q + 2 * kTheta0) + kC0 * std::cos(q + kTheta0) - c.C1s;
    return c;
}

double segment1(double q, double t) {
    const auto c = SegmentConstants::at(q);
    if (t < q - 1e-9 || t > q + kH + 1e-9)
        throw Error("closed_form::segment1: t outside [q, q+h]");
    return kC0 * std::sin(t + kTheta0) + c.C1 + c.C2 * std::exp(kA * (t - q));
}

double segment2(double q, double t) {
    const auto c = SegmentConstants::at(q);
    if (t < q + kH - 1e-9 || t > q + 2 * kH + 1e-9)
        throw Error("closed_form::segment2: t outside [q+h, q+2h]");
    const double e = std::exp(kA * (t - kH - q));
    return kC0s * std::cos(t + 2 * kTheta0) + kC0 * std::sin(t + kTheta0) + c.C1s -
           c.C2 * (t - kH - q) * e + c.C2s * e;
}

double solution(double q, double t) {
    return t <= q + kH ? segment1(q, t) : segment2(q, t);
}

double psi(double s, double q) {
    const auto c = SegmentConstants::at(q);
    const double e = std::exp(kA * s);
    return kC0 * std::sin(s + q + kTheta0) + kC0s * std::cos(s + q + 2 * kTheta0) +
           (-c.C2 * kA * s + (c.C2s * kA - c.C2)) * e;
}

double phi(double s, double q) {
    const auto c = SegmentConstants::at(q);
    const double e = std::exp(kA * s);
    return kC0s * std::sin(s + q + 2 * kTheta0) - kC0 * std::cos(s + q + kTheta0) +
           c.C1s + (-c.C2 * s + c.C2s) * e;
}

double increment(double q) {
    const auto c = SegmentConstants::at(q);
    return segment2(q, q + 2 * kH) - c.C3;
}

MinimaReport verify_minima(int grid) {
    MinimaReport rep{};
    rep.grid = grid;

    // (i) min of Psi over [0, 3pi/2] x [0.105, 0.4]
    {
        double best = 1e300, bs = 0, bq = 0;
        for (int iq = 0; iq <= grid; ++iq) {
            const double q = 0.105 + (0.4 - 0.105) * iq / grid;
            const auto c = SegmentConstants::at(q);
            const double k1 = c.C2s * kA - c.C2, k2 = -c.C2 * kA;
            for (int is = 0; is <= grid; ++is) {
                const double s = kH * is / grid;
                const double v = kC0 * std::sin(s + q + kTheta0) +
                                 kC0s * std::cos(s + q + 2 * kTheta0) +
                                 (k2 * s + k1) * std::exp(kA * s);
                if (v < best) { best = v; bs = s; bq = q; }
            }
        }
        const double ds = kH / grid, dq = (0.4 - 0.105) / grid;
        for (int it = 0; it < 4; ++it) {
            auto [s1, v1] = golden([&](double s) { return psi(s, bq); },
                                   std::max(0.0, bs - ds), std::min(kH, bs + ds), false);
            bs = s1;
            auto [q1, v2] = golden([&](double q) { return psi(bs, q); },
                                   std::max(0.105, bq - dq), std::min(0.4, bq + dq), false);
            bq = q1;
            best = v2;
        }
        rep.min_psi = best;
        rep.argmin_psi = {bs, bq};
    }

    // (ii) min of u(q+2h) - u(q+h) over q in [-0.12, 0.4]
    {
        double best = 1e300, bq = 0;
        const int n = grid * 10;
        for (int i = 0; i <= n; ++i) {
            const double q = -0.12 + (0.4 + 0.12) * i / n;
            const double v = increment(q);
            if (v < best) { best = v; bq = q; }
        }
        const double dq = (0.4 + 0.12) / n;
        auto [q1, v1] = golden([](double q) { return increment(q); },
                               std::max(-0.12, bq - dq), std::min(0.4, bq + dq), false);
        rep.min_increment = v1;
        rep.arg_increment = q1;
    }

    // (iii) max of Phi over {s >= 0, s + q <= pi, q in [-pi/2, 0.15]}
    {
        double best = -1e300, bs = 0, bq = 0;
        for (int iq = 0; iq <= grid; ++iq) {
            const double q = -0.5 * kPi + (0.15 + 0.5 * kPi) * iq / grid;
            const auto c = SegmentConstants::at(q);
            const double smax = kPi - q;
            for (int is = 0; is <= grid; ++is) {
                const double s = smax * is / grid;
                const double v = kC0s * std::sin(s + q + 2 * kTheta0) -
                                 kC0 * std::cos(s + q + kTheta0) + c.C1s +
                                 (-c.C2 * s + c.C2s) * std::exp(kA * s);
                if (v > best) { best = v; bs = s; bq = q; }
            }
        }
        const double dq = (0.15 + 0.5 * kPi) / grid;
        for (int it = 0; it < 4; ++it) {
            const double smax = kPi - bq;
            auto [s1, v1] = golden([&](double s) { return phi(s, bq); },
                                   std::max(0.0, bs - smax / grid),
                                   std::min(smax, bs + smax / grid), true);
            bs = s1;
            auto [q1, v2] = golden(
                [&](double q) { return bs + q <= kPi ? phi(bs, q) : -1e300; },
                std::max(-0.5 * kPi, bq - dq), std::min(0.15, bq + dq), true);
            bq = q1;
            best = v2;
        }
        rep.max_phi = best;
        rep.argmax_phi = {bs, bq};
    }
    return rep;
}

}  // namespace maxdde::closed_form
