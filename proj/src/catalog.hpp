#pragma once

// Named mappings and the identity gallery run as executable checks: the
// exponential-clock map K(e), its (0,1] reparametrization, the
// selfdecomposability map, the Thorin composition, and the worked composition
// identities with their closed-form image measures.

#include <span>
#include <string>
#include <vector>

#include "integral_mapping.hpp"
#include "levy_core.hpp"

namespace levymap {

enum class MappingClass { E, L, T, Other };

struct NamedMapping {
    std::string name;
    MappingSpec spec;
    MappingClass class_tag = MappingClass::Other;
};

// names: identity, kexp, kexp_alt, lmap, thorin,
//        example2_first, example2_second, example2_composed, example2_third (param beta),
//        example3_middle, example3_composed (param beta),
//        example4_outer, example4_composed (param alpha)
NamedMapping named_mapping(const std::string& name, double param = 1.0);
std::vector<std::string> named_mapping_names();

struct IdentityCheckResult {
    std::string name;
    std::vector<double> grid;
    std::vector<double> errors;  // per-y maximum over the pairwise form differences
    double max_abs_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<std::string> artifacts;
};

struct CheckOptions {
    double tolerance = 1e-6;
    double quad_tol = 1e-10;
    std::string artifact_dir;  // failed checks drop a per-y error CSV here
};

std::vector<double> default_grid(double lo = -10.0, double hi = 10.0, std::size_t count = 201);

// three-way identity Kexp(Lmap(nu)) = Lmap(Kexp(nu)) = Thorin map
IdentityCheckResult check_example1(const LevyExponent& e, std::span<const double> grid,
                                   const CheckOptions& opts = {});

// the two parametrizations of K(e) agree
IdentityCheckResult check_kexp_alt(const LevyExponent& e, std::span<const double> grid,
                                   const CheckOptions& opts = {});

// nested pair of power maps vs the composed map vs the single-kernel form
IdentityCheckResult check_example2(double beta, const LevyExponent& e,
                                   std::span<const double> grid, const CheckOptions& opts = {});

// power map after the selfdecomposability map, three parametrizations
IdentityCheckResult check_example3(double beta, const LevyExponent& e,
                                   std::span<const double> grid, const CheckOptions& opts = {});

// incomplete-gamma clock after the selfdecomposability map
IdentityCheckResult check_example4(double alpha, const LevyExponent& e,
                                   std::span<const double> grid, const CheckOptions& opts = {});

// Thorin image factors through both the selfdecomposability map and K(e)
IdentityCheckResult thorin_factorization_witness(const LevyExponent& e,
                                                 std::span<const double> grid,
                                                 const CheckOptions& opts = {});

}  // namespace levymap
