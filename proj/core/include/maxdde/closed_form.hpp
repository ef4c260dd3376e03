#pragma once

#include <array>

namespace maxdde::closed_form {

// Fixed problem of the two-step formulas: u' = 0.32 u - u(t-h) + 1 - sin t,
// u == p = (1 - sin q)/0.68 on [q-h, q], h = 3pi/2. Raw time coordinates,
// q on the decreasing branch [-pi/2, 0.4].
inline constexpr double kA = 0.32;
inline constexpr double kD = 0.68;
double window_length();  // 3pi/2
double q_min();          // -pi/2
double q_max();          // 0.4

struct SegmentConstants {
    double p, theta0, C0, C1, C2, C3, C0s, C1s, C2s;
    static SegmentConstants at(double q);  // throws outside [q_min, q_max]
};

// u on [q, q+h]: C0 sin(t+theta0) + C1 + C2 e^{a(t-q)}
double segment1(double q, double t);
// u on [q+h, q+2h]: C0* cos(t+2theta0) + C0 sin(t+theta0) + C1*
//                   - C2 (t-h-q) e^{a(t-h-q)} + C2* e^{a(t-h-q)}
double segment2(double q, double t);
// both steps
double solution(double q, double t);

// Psi(s,q) = d/dt segment2 at t = q+h+s ; Phi(s,q) = segment2(q+h+s)
double psi(double s, double q);
double phi(double s, double q);

// u(q+2h) - u(q+h)
double increment(double q);

struct MinimaReport {
    double min_psi;        // over [0, 3pi/2] x [0.105, 0.4]
    std::array<double, 2> argmin_psi;  // (s, q)
    double min_increment;  // over q in [-0.12, 0.4]
    double arg_increment;
    double max_phi;        // over {s >= 0, s+q <= pi, q in [-pi/2, 0.15]}
    std::array<double, 2> argmax_phi;
    int grid = 0;
};

// Dense grid (>= grid x grid) plus coordinate-wise golden-section refinement.
MinimaReport verify_minima(int grid = 2000);

}  // namespace maxdde::closed_form
