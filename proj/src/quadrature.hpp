#pragma once

// Adaptive Gauss-Kronrod (G7/K15) quadrature for real and complex integrands.
// Improper upper endpoints are handled by the substitution u = e^{-t}, so
// endpoint singularities always sit at panel boundaries where K15 never
// evaluates.

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace levymap {

struct QuadratureFailure : std::runtime_error {
    QuadratureFailure(const std::string& what, double estimate_re, double estimate_im,
                      double err)
        : std::runtime_error(what), estimate(estimate_re, estimate_im), error_estimate(err) {}
    std::complex<double> estimate;
    double error_estimate;
};

struct QuadOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_panels = 6000;
    // initial split points as fractions of (b-a); gives the refinement queue a
    // head start near singular endpoints
    bool endpoint_seed = true;
};

// finite interval (a, b)
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opts = {});
std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b, const QuadOptions& opts = {});

// (a, +inf) via u = e^{-(t-a)}
double integrate_upper_inf(const std::function<double(double)>& f, double a,
                           const QuadOptions& opts = {});
std::complex<double> integrate_upper_inf_complex(
    const std::function<std::complex<double>(double)>& f, double a, const QuadOptions& opts = {});

// (-inf, b) by reflection
double integrate_lower_inf(const std::function<double(double)>& f, double b,
                           const QuadOptions& opts = {});
std::complex<double> integrate_lower_inf_complex(
    const std::function<std::complex<double>(double)>& f, double b, const QuadOptions& opts = {});

// interval with either endpoint possibly infinite
double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          const QuadOptions& opts = {});
std::complex<double> integrate_interval_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    const QuadOptions& opts = {});

}  // namespace levymap
