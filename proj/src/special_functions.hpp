#pragma once

// Incomplete gamma tail, exponential integral and related helpers, implemented
// with series / continued-fraction branches so results do not depend on a host
// special-function library.

namespace levymap {

// Euler-Mascheroni constant
inline constexpr double kEulerGamma = 0.57721566490153286061;

// upper incomplete gamma  Gamma(alpha; x) = int_x^inf t^{alpha-1} e^{-t} dt,  x > 0
double inc_gamma_tail(double alpha, double x);

// exponential integral Ei(x) for x < 0
double ei(double x);

// int_t^inf s^{-1} Gamma(alpha; s) ds,  t > 0  (time change of the Example-4 composition)
double example4_time_change(double alpha, double t);

}  // namespace levymap
