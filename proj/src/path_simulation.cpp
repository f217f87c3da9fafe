#include "path_simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "errors.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

namespace levymap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

unsigned thread_budget() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("LEVYMAP_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
    }
    return n;
}

template <typename Fn>
void parallel_chunks(std::size_t count, Fn&& fn) {
    const unsigned threads = std::min<std::size_t>(thread_budget(), std::max<std::size_t>(count, 1));
    if (threads <= 1) {
        fn(std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

std::vector<double> default_sim_grid() {
    std::vector<double> g(201);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = -10.0 + 20.0 * static_cast<double>(i) / 200.0;
    }
    return g;
}

// |h|-weighted clock mass of (lo, hi); the truncation figure of merit
double weighted_mass(const MappingSpec& spec, double lo, double hi) {
    QuadOptions q;
    q.abs_tol = 1e-12;
    q.rel_tol = 1e-9;
    return integrate_interval(
        [&](double t) {
            return std::fabs(spec.kernel(t)) * spec.time_change.clock_density(t);
        },
        lo, hi, q);
}

}  // namespace

PathGrid PathGrid::build(const MappingSpec& spec, int level, double tail_tol) {
    const Interval iv = spec.interval();
    PathGrid g;
    g.level = level;

    double hi = iv.hi;
    double tail_bound = 0.0;
    if (iv.upper_infinite()) {
        hi = std::max(1.0, 2.0 * iv.lo);
        for (int k = 0; k < 60; ++k) {
            tail_bound = weighted_mass(spec, hi, kInf);
            if (tail_bound < tail_tol) break;
            hi *= 2.0;
        }
    }
    double lo = iv.lo;
    // kernels or clocks singular at the lower endpoint get truncated as well
    const bool lo_singular =
        (spec.kernel.form() == KernelFunction::Form::NegLog && iv.lo == 0.0) ||
        std::isinf(spec.time_change.r_at_lo());
    double head_bound = 0.0;
    if (lo_singular) {
        lo = std::min(1e-7, 0.25 * (hi - iv.lo));
        for (int k = 0; k < 60; ++k) {
            head_bound = weighted_mass(spec, iv.lo, lo);
            if (head_bound < tail_tol) break;
            lo *= 0.5;
        }
    }

    g.interval = Interval{lo, hi};
    g.truncation_bound = tail_bound + head_bound;

    const std::size_t n = static_cast<std::size_t>(4096) << (2 * level);
    g.nodes.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(n);
        const double s = x * x * (3.0 - 2.0 * x);  // denser near both endpoints
        g.nodes[i] = lo + (hi - lo) * s;
    }
    g.nodes.front() = lo;
    g.nodes.back() = hi;
    return g;
}

IncrementSampler increment_sampler(const LevyTriple& law) {
    law.validate();
    const double gauss = law.gauss_var;
    const auto& v = law.spectral.variant();
    if (std::holds_alternative<std::monostate>(v)) {
        const double drift = law.shift;
        return [drift, gauss](double delta, std::mt19937_64& rng) {
            double x = drift * delta;
            if (gauss > 0.0) {
                std::normal_distribution<double> n(0.0, std::sqrt(gauss * delta));
                x += n(rng);
            }
            return x;
        };
    }
    if (const auto* atoms = std::get_if<std::vector<SpectralAtom>>(&v)) {
        double comp = 0.0;
        for (const auto& a : *atoms) {
            if (std::fabs(a.x) <= 1.0) comp += a.x * a.mass;
        }
        const double drift = law.shift - comp;  // plain drift
        const std::vector<SpectralAtom> jumps = *atoms;
        return [drift, gauss, jumps](double delta, std::mt19937_64& rng) {
            double x = drift * delta;
            if (gauss > 0.0) {
                std::normal_distribution<double> n(0.0, std::sqrt(gauss * delta));
                x += n(rng);
            }
            for (const auto& a : jumps) {
                std::poisson_distribution<long> p(a.mass * delta);
                x += a.x * static_cast<double>(p(rng));
            }
            return x;
        };
    }
    if (const auto* g = std::get_if<GammaSpectral>(&v)) {
        const double comp = g->shape * (1.0 - std::exp(-g->rate)) / g->rate;
        const double drift = law.shift - comp;
        const double shape = g->shape, rate = g->rate;
        const double gv = gauss;
        return [drift, gv, shape, rate](double delta, std::mt19937_64& rng) {
            double x = drift * delta;
            if (gv > 0.0) {
                std::normal_distribution<double> n(0.0, std::sqrt(gv * delta));
                x += n(rng);
            }
            std::gamma_distribution<double> gd(shape * delta, 1.0 / rate);
            x += gd(rng);
            return x;
        };
    }
    throw UnsupportedFamily("no exact increment sampler for this spectral family");
}

double path_integral_ibp(std::span<const double> h_at_nodes, std::span<const double> y_at_nodes) {
    const std::size_t n = h_at_nodes.size() - 1;
    double stieltjes = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        stieltjes += y_at_nodes[i] * (h_at_nodes[i + 1] - h_at_nodes[i]);
    }
    return h_at_nodes[n] * y_at_nodes[n] - h_at_nodes[0] * y_at_nodes[0] - stieltjes;
}

double path_integral_kernel_sum(std::span<const double> h_at_nodes,
                                std::span<const double> increments) {
    double s = 0.0;
    for (std::size_t i = 0; i < increments.size(); ++i) s += h_at_nodes[i + 1] * increments[i];
    return s;
}

SimResult simulate_integral(const MappingSpec& spec, const LevyTriple& law, const PathGrid& grid,
                            std::size_t n_paths, std::uint64_t seed, std::vector<double> y_grid) {
    if (grid.nodes.size() < 2) throw std::invalid_argument("simulate_integral: empty grid");
    IncrementSampler sample = increment_sampler(law);

    const std::size_t n = grid.nodes.size() - 1;
    std::vector<double> h(grid.nodes.size());
    std::vector<double> dr(n);
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) h[i] = spec.kernel(grid.nodes[i]);
    for (std::size_t i = 0; i < n; ++i) {
        dr[i] = std::fabs(spec.time_change.r(grid.nodes[i + 1]) - spec.time_change.r(grid.nodes[i]));
    }
    const bool neg_dir = spec.time_change.direction() == Direction::NonIncreasing;
    const double inc_sign = (neg_dir ? -1.0 : 1.0) * (spec.negate_input ? -1.0 : 1.0);

    SimResult res;
    res.seed = seed;
    res.n_paths = n_paths;
    res.samples.assign(n_paths, 0.0);
    if (grid.truncation_bound > 1e-6) {
        res.warnings.push_back("truncation bound " + std::to_string(grid.truncation_bound) +
                               " exceeds 1e-6");
    }

    parallel_chunks(n_paths, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            std::mt19937_64 rng = make_path_rng(seed, p);
            double y = 0.0;        // Y(r(t_i)) relative to Y(r(a))
            double stieltjes = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                stieltjes += y * (h[i + 1] - h[i]);
                y += inc_sign * sample(dr[i], rng);
            }
            res.samples[p] = h[n] * y - stieltjes;  // h(a) * Y0 term vanishes (Y0 = 0)
        }
    });

    res.y_grid = y_grid.empty() ? default_sim_grid() : std::move(y_grid);
    res.ecf.assign(res.y_grid.size(), {0.0, 0.0});
    res.band = 4.0 / std::sqrt(static_cast<double>(n_paths));
    parallel_chunks(res.y_grid.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            const double yk = res.y_grid[k];
            double re = 0.0, im = 0.0;
            for (double x : res.samples) {
                re += std::cos(yk * x);
                im += std::sin(yk * x);
            }
            res.ecf[k] = std::complex<double>(re, im) / static_cast<double>(n_paths);
        }
    });
    return res;
}

EcfReport ecf_compare(const SimResult& sim, const LevyExponent& e) {
    EcfReport rep;
    rep.band = sim.band;
    rep.y = sim.y_grid;
    rep.ecf = sim.ecf;
    rep.analytic.reserve(sim.y_grid.size());
    rep.discrepancy.reserve(sim.y_grid.size());
    std::size_t within = 0;
    for (std::size_t k = 0; k < sim.y_grid.size(); ++k) {
        const std::complex<double> cf = std::exp(e(sim.y_grid[k]));
        const double d = std::abs(sim.ecf[k] - cf);
        rep.analytic.push_back(cf);
        rep.discrepancy.push_back(d);
        rep.max_abs_discrepancy = std::max(rep.max_abs_discrepancy, d);
        if (d <= rep.band) ++within;
    }
    rep.frac_within_band =
        sim.y_grid.empty() ? 1.0 : static_cast<double>(within) / static_cast<double>(sim.y_grid.size());
    return rep;
}

std::vector<RefineRow> refine_study(const MappingSpec& spec, const LevyTriple& law,
                                    std::span<const int> levels, std::size_t n_paths,
                                    std::uint64_t seed, const LevyExponent& reference) {
    std::vector<RefineRow> rows;
    rows.reserve(levels.size());
    for (int level : levels) {
        const PathGrid grid = PathGrid::build(spec, level);
        const SimResult sim = simulate_integral(spec, law, grid, n_paths, seed);
        const EcfReport rep = ecf_compare(sim, reference);
        RefineRow row;
        row.level = level;
        row.n_nodes = grid.nodes.size() - 1;
        row.truncation = grid.interval.hi;
        row.max_ecf_discrepancy = rep.max_abs_discrepancy;
        double mean = 0.0;
        for (double x : sim.samples) mean += x;
        mean /= static_cast<double>(sim.samples.size());
        double var = 0.0;
        for (double x : sim.samples) var += (x - mean) * (x - mean);
        var /= std::max<std::size_t>(1, sim.samples.size() - 1);
        row.sample_mean = mean;
        row.sample_var = var;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace levymap
