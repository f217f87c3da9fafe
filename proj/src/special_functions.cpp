#include "special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "quadrature.hpp"

namespace levymap {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// E1(x) for 0 < x <= 1.5:  -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
double e1_series(double x) {
    double sum = 0.0;
    double term = 1.0;  // x^k / k!
    for (int k = 1; k < 80; ++k) {
        term *= x / k;
        const double add = ((k & 1) ? term : -term) / k;
        sum += add;
        if (std::fabs(add) < kEps * (std::fabs(sum) + 1.0)) break;
    }
    return -kEulerGamma - std::log(x) + sum;
}

// Legendre continued fraction for Gamma(alpha; x), valid for x > alpha + 1.
// Modified Lentz evaluation.
double gamma_tail_cf(double alpha, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - alpha;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 400; ++i) {
        const double an = -i * (i - alpha);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + alpha * std::log(x)) * h;
}

// lower incomplete gamma by series, alpha > 0, then Gamma(alpha;x) = Gamma(alpha) - gamma(alpha,x)
double gamma_tail_series(double alpha, double x) {
    double ap = alpha;
    double term = 1.0 / alpha;
    double sum = term;
    for (int k = 0; k < 400; ++k) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < kEps * std::fabs(sum)) break;
    }
    const double lower = sum * std::exp(-x + alpha * std::log(x));
    return std::tgamma(alpha) - lower;
}

}  // namespace

double inc_gamma_tail(double alpha, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("inc_gamma_tail: x must be positive");
    if (alpha == 0.0) {
        return (x <= 1.5) ? e1_series(x) : gamma_tail_cf(0.0, x);
    }
    if (x > alpha + 1.0) return gamma_tail_cf(alpha, x);
    if (alpha > 0.0) return gamma_tail_series(alpha, x);
    // alpha < 0, x small: walk down from a base exponent in (0,1] via
    // Gamma(a-1;x) = (Gamma(a;x) - x^{a-1} e^{-x}) / (a-1)
    const int steps = static_cast<int>(std::ceil(-alpha));
    const double base = alpha + steps;  // in (0,1]
    double g = (base == 0.0) ? inc_gamma_tail(0.0, x)
                             : (x > base + 1.0 ? gamma_tail_cf(base, x) : gamma_tail_series(base, x));
    double a = base;
    for (int i = 0; i < steps; ++i) {
        a -= 1.0;
        g = (g - std::exp((a)*std::log(x) - x)) / a;
    }
    return g;
}

double ei(double x) {
    if (!(x < 0.0)) throw std::invalid_argument("ei: requires x < 0");
    const double w = -x;
    if (w <= 4.0) {
        // Ei(-w) = gamma + ln w + sum_{k>=1} (-w)^k / (k k!)
        double sum = 0.0;
        double term = 1.0;  // (-w)^k / k!
        for (int k = 1; k < 120; ++k) {
            term *= -w / k;
            const double add = term / k;
            sum += add;
            if (std::fabs(add) < kEps * (std::fabs(sum) + 1.0)) break;
        }
        return kEulerGamma + std::log(w) + sum;
    }
    return -gamma_tail_cf(0.0, w);
}

double example4_time_change(double alpha, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("example4_time_change: t must be positive");
    QuadOptions opts;
    opts.abs_tol = 1e-13;
    opts.rel_tol = 1e-13;
    return integrate_upper_inf([alpha](double s) { return inc_gamma_tail(alpha, s) / s; }, t,
                               opts);
}

}  // namespace levymap
