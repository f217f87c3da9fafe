#pragma once

// Monte Carlo for the path-wise random integral: sample Levy increments over a
// refined grid of the (truncated) interval, accumulate the integration-by-parts
// sum
//
//   h(b) Y(r(b)) - h(a) Y(r(a)) - sum_i Y(r(t_i)) (h(t_{i+1}) - h(t_i)),
//
// and compare the empirical characteristic function of the samples with the
// analytic exponent. Increments are sampled exactly (Gaussian, gamma, compound
// Poisson, drift); paths are independent given per-path derived seeds and are
// merged in path-index order, so results are reproducible under any thread
// count.

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "integral_mapping.hpp"
#include "levy_core.hpp"

namespace levymap {

struct PathGrid {
    Interval interval;          // truncated working interval (a', T]
    std::vector<double> nodes;  // a' = t_0 < ... < t_n = T
    int level = 0;
    double truncation_bound = 0.0;  // estimated |h|-weighted clock mass outside (a', T]

    // n = 4096 * 4^level nodes, spaced denser toward the endpoints
    static PathGrid build(const MappingSpec& spec, int level, double tail_tol = 1e-6);
};

struct SimResult {
    std::vector<double> samples;
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
    std::vector<double> y_grid;
    std::vector<std::complex<double>> ecf;
    double band = 0.0;  // 4 / sqrt(n_paths)
    std::vector<std::string> warnings;
};

// exact increment sampler X ~ nu^{*delta}; throws UnsupportedFamily for laws
// without one (stable, custom spectral)
using IncrementSampler = std::function<double(double, std::mt19937_64&)>;
IncrementSampler increment_sampler(const LevyTriple& law);

SimResult simulate_integral(const MappingSpec& spec, const LevyTriple& law, const PathGrid& grid,
                            std::size_t n_paths, std::uint64_t seed,
                            std::vector<double> y_grid = {});

struct EcfReport {
    double band = 0.0;
    double max_abs_discrepancy = 0.0;
    double frac_within_band = 0.0;
    std::vector<double> y;
    std::vector<std::complex<double>> ecf;
    std::vector<std::complex<double>> analytic;
    std::vector<double> discrepancy;
};

EcfReport ecf_compare(const SimResult& sim, const LevyExponent& e);

struct RefineRow {
    int level = 0;
    std::size_t n_nodes = 0;
    double truncation = 0.0;
    double max_ecf_discrepancy = 0.0;
    double sample_mean = 0.0;
    double sample_var = 0.0;
};

std::vector<RefineRow> refine_study(const MappingSpec& spec, const LevyTriple& law,
                                    std::span<const int> levels, std::size_t n_paths,
                                    std::uint64_t seed, const LevyExponent& reference);

// the two algebraically equal accumulations of one path; the production path
// uses the integration-by-parts form
double path_integral_ibp(std::span<const double> h_at_nodes, std::span<const double> y_at_nodes);
double path_integral_kernel_sum(std::span<const double> h_at_nodes,
                                std::span<const double> increments);

}  // namespace levymap
