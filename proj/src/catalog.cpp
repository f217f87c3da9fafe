#include "catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "io_util.hpp"

namespace levymap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MappingSpec kexp_spec() {
    return MappingSpec{KernelFunction::identity(),
                       TimeChange::one_minus_exp(Interval{0.0, kInf}), false, "kexp"};
}

MappingSpec kexp_alt_spec() {
    return MappingSpec{KernelFunction::neg_log(), TimeChange::identity(Interval{0.0, 1.0}), false,
                       "kexp_alt"};
}

MappingSpec lmap_spec() {
    return MappingSpec{KernelFunction::exp_decay(), TimeChange::identity(Interval{0.0, kInf}),
                       false, "lmap"};
}

MappingSpec thorin_spec() {
    return MappingSpec{KernelFunction::identity(),
                       TimeChange::inc_gamma_tail(0.0, Interval{0.0, kInf}), true, "thorin"};
}

MappingSpec example2_first_spec(double beta) {
    return MappingSpec{KernelFunction::power(1.0 / beta), TimeChange::identity(Interval{0.0, 1.0}),
                       false, "example2_first"};
}

MappingSpec example2_second_spec(double beta) {
    return MappingSpec{KernelFunction::power(1.0 / (2.0 * beta)),
                       TimeChange::identity(Interval{0.0, 1.0}), false, "example2_second"};
}

MappingSpec example2_third_spec(double beta) {
    return MappingSpec{KernelFunction::one_minus_sqrt_pow(beta),
                       TimeChange::identity(Interval{0.0, 1.0}), false, "example2_third"};
}

MappingSpec example3_middle_spec(double beta) {
    auto r_fn = [beta](double s) { return s + std::exp(-beta * s) / beta - 1.0 / beta; };
    auto d_fn = [beta](double s) { return 1.0 - std::exp(-beta * s); };
    return MappingSpec{
        KernelFunction::exp_decay(),
        TimeChange::custom(r_fn, d_fn, Direction::NonDecreasing, Interval{0.0, kInf}, 0.0, kInf,
                           "s+exp(-beta s)/beta-1/beta"),
        false, "example3_middle"};
}

MappingSpec example4_outer_spec(double alpha) {
    return MappingSpec{KernelFunction::identity(),
                       TimeChange::inc_gamma_tail(alpha, Interval{0.0, kInf}), false,
                       "example4_outer"};
}

MappingSpec composed_of(const MappingSpec& outer, const MappingSpec& inner,
                        const std::string& name) {
    const MappingSpec nest[2] = {outer, inner};
    MappingSpec composed = compose(nest);
    composed.name = name;
    return composed;
}

void maybe_write_artifact(IdentityCheckResult& res, const CheckOptions& opts) {
    if (res.pass || opts.artifact_dir.empty()) return;
    std::vector<std::vector<double>> rows;
    rows.reserve(res.grid.size());
    for (std::size_t i = 0; i < res.grid.size(); ++i) rows.push_back({res.grid[i], res.errors[i]});
    const std::string path = opts.artifact_dir + "/" + res.name + "_errors.csv";
    write_csv(path, {"y", "abs_error"}, rows);
    res.artifacts.push_back(path);
}

IdentityCheckResult run_forms(const std::string& name, std::span<const LevyExponent> forms,
                              std::span<const double> grid, const CheckOptions& opts) {
    IdentityCheckResult res;
    res.name = name;
    res.grid.assign(grid.begin(), grid.end());
    res.tolerance = opts.tolerance;
    res.errors.reserve(grid.size());
    for (double y : grid) {
        std::vector<std::complex<double>> vals;
        vals.reserve(forms.size());
        for (const auto& f : forms) vals.push_back(f(y));
        double err = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            for (std::size_t j = i + 1; j < vals.size(); ++j) {
                err = std::max(err, std::abs(vals[i] - vals[j]));
            }
        }
        res.errors.push_back(err);
        res.max_abs_error = std::max(res.max_abs_error, err);
    }
    res.pass = res.max_abs_error <= res.tolerance;
    maybe_write_artifact(res, opts);
    return res;
}

}  // namespace

NamedMapping named_mapping(const std::string& name, double param) {
    if (name == "identity") return {name, identity_mapping(), MappingClass::Other};
    if (name == "kexp") return {name, kexp_spec(), MappingClass::E};
    if (name == "kexp_alt") return {name, kexp_alt_spec(), MappingClass::E};
    if (name == "lmap") return {name, lmap_spec(), MappingClass::L};
    if (name == "thorin") return {name, thorin_spec(), MappingClass::T};
    if (name == "example2_first") return {name, example2_first_spec(param), MappingClass::Other};
    if (name == "example2_second") return {name, example2_second_spec(param), MappingClass::Other};
    if (name == "example2_third") return {name, example2_third_spec(param), MappingClass::Other};
    if (name == "example2_composed") {
        return {name,
                composed_of(example2_first_spec(param), example2_second_spec(param), name),
                MappingClass::Other};
    }
    if (name == "example3_middle") return {name, example3_middle_spec(param), MappingClass::Other};
    if (name == "example3_composed") {
        return {name, composed_of(example2_first_spec(param), lmap_spec(), name),
                MappingClass::Other};
    }
    if (name == "example4_outer") return {name, example4_outer_spec(param), MappingClass::Other};
    if (name == "example4_composed") {
        return {name, composed_of(example4_outer_spec(param), lmap_spec(), name),
                MappingClass::Other};
    }
    throw std::invalid_argument("unknown mapping name: " + name);
}

std::vector<std::string> named_mapping_names() {
    return {"identity",          "kexp",          "kexp_alt",          "lmap",
            "thorin",            "example2_first", "example2_second",   "example2_third",
            "example2_composed", "example3_middle", "example3_composed", "example4_outer",
            "example4_composed"};
}

std::vector<double> default_grid(double lo, double hi, std::size_t count) {
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return g;
}

IdentityCheckResult check_example1(const LevyExponent& e, std::span<const double> grid,
                                   const CheckOptions& opts) {
    ApplyOptions a{opts.quad_tol};
    const LevyExponent forms[3] = {
        apply(kexp_spec(), apply(lmap_spec(), e, a), a),
        apply(lmap_spec(), apply(kexp_spec(), e, a), a),
        apply(thorin_spec(), e, a),
    };
    return run_forms("example1", forms, grid, opts);
}

IdentityCheckResult check_kexp_alt(const LevyExponent& e, std::span<const double> grid,
                                   const CheckOptions& opts) {
    ApplyOptions a{opts.quad_tol};
    const LevyExponent forms[2] = {
        apply(kexp_spec(), e, a),
        apply(kexp_alt_spec(), e, a),
    };
    return run_forms("kexp_alt", forms, grid, opts);
}

IdentityCheckResult check_example2(double beta, const LevyExponent& e,
                                   std::span<const double> grid, const CheckOptions& opts) {
    ApplyOptions a{opts.quad_tol};
    const MappingSpec composed =
        composed_of(example2_first_spec(beta), example2_second_spec(beta), "example2_composed");
    const LevyExponent forms[3] = {
        apply(example2_first_spec(beta), apply(example2_second_spec(beta), e, a), a),
        apply(composed, e, a),
        apply(example2_third_spec(beta), e, a),
    };
    return run_forms("example2_beta" + std::to_string(beta), forms, grid, opts);
}

IdentityCheckResult check_example3(double beta, const LevyExponent& e,
                                   std::span<const double> grid, const CheckOptions& opts) {
    ApplyOptions a{opts.quad_tol};
    const MappingSpec composed =
        composed_of(example2_first_spec(beta), lmap_spec(), "example3_composed");
    const LevyExponent forms[3] = {
        apply(example2_first_spec(beta), apply(lmap_spec(), e, a), a),
        apply(example3_middle_spec(beta), e, a),
        apply(composed, e, a),
    };
    return run_forms("example3_beta" + std::to_string(beta), forms, grid, opts);
}

IdentityCheckResult check_example4(double alpha, const LevyExponent& e,
                                   std::span<const double> grid, const CheckOptions& opts) {
    ApplyOptions a{opts.quad_tol};
    const MappingSpec composed =
        composed_of(example4_outer_spec(alpha), lmap_spec(), "example4_composed");
    const LevyExponent forms[2] = {
        apply(example4_outer_spec(alpha), apply(lmap_spec(), e, a), a),
        apply(composed, e, a),
    };
    return run_forms("example4_alpha" + std::to_string(alpha), forms, grid, opts);
}

IdentityCheckResult thorin_factorization_witness(const LevyExponent& e,
                                                 std::span<const double> grid,
                                                 const CheckOptions& opts) {
    ApplyOptions a{opts.quad_tol};
    const LevyExponent forms[3] = {
        apply(thorin_spec(), e, a),
        apply(lmap_spec(), apply(kexp_spec(), e, a), a),
        apply(kexp_spec(), apply(lmap_spec(), e, a), a),
    };
    return run_forms("thorin_witness", forms, grid, opts);
}

}  // namespace levymap
