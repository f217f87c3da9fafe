#pragma once

// The random integral mapping engine. A MappingSpec is the pair (h, r) on an
// interval (a,b]; applying it to a Levy exponent Phi evaluates
//
//   y -> int_(a,b] Phi(+h(t) y) dr(t)     for non-decreasing r,
//   y -> int_(a,b] Phi(-h(t) y) |dr(t)|   for non-increasing r,
//
// by adaptive quadrature. Nested mappings reduce to a single mapping whose
// kernel is the identity and whose clock measure is the image of the product
// of the factor clocks; an odd number of negative signs is normalized into a
// pre-negation of the input law.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levy_core.hpp"
#include "measure_algebra.hpp"

namespace levymap {

struct MappingSpec {
    KernelFunction kernel;
    TimeChange time_change;     // carries the interval and the direction
    bool negate_input = false;  // apply to nu^- instead of nu
    std::string name;           // catalog name or composed chain description

    const Interval& interval() const { return time_change.interval(); }
    std::string describe() const;
};

// identity mapping I^{1, t}_{(0,1]}
MappingSpec identity_mapping();

struct ApplyOptions {
    double tol = kDefaultTolQuad;
};

// exponent of I^{h,r}(nu); pre: domain_check(spec, e).finiteness (not re-checked here)
LevyExponent apply(const MappingSpec& spec, const LevyExponent& e, const ApplyOptions& opts = {});

struct ComposeOptions {
    bool use_catalog = true;  // closed forms for identity-catalog pairs
    double tol = 1e-10;
    // tabulation of the composed clock density (numeric path, finite mass)
    int max_table_nodes = 8193;
    double mass_tol = 1e-8;
};

// Theorem-1 reduction of a nest: specs are listed outermost first, so
// compose({A, B}) represents nu -> A(B(nu))
MappingSpec compose(std::span<const MappingSpec> specs, const ComposeOptions& opts = {});

struct DomainReport {
    bool finiteness = false;
    bool log_moment_required = false;
    std::optional<bool> log_moment_holds;  // unknown when no spectral info
    std::string notes;
};

// necessary numerical condition for membership in the mapping's domain:
// probes int |Phi(h(t) y)| d|r|(t) under expanding truncation
DomainReport domain_check(const MappingSpec& spec, const LevyExponent& e);

// Theorem 2(a): max_grid |I(e1+e2) - I(e1) - I(e2)|
double verify_homomorphism(const MappingSpec& spec, const LevyExponent& e1, const LevyExponent& e2,
                           std::span<const double> grid);

// Theorem 2(b): pairwise agreement of I(nu^{*s}), I(nu)^{*s}, I^{h, s r}(nu)
double verify_conv_power(const MappingSpec& spec, const LevyExponent& e, double s,
                         std::span<const double> grid);

// Theorem 2(c): pairwise agreement of T_u I(nu), I(T_u nu), I^{u h, r}(nu)
double verify_dilation(const MappingSpec& spec, const LevyExponent& e, double u,
                       std::span<const double> grid);

// triple-level image; supports pure-Gaussian and compound-Poisson inputs
LevyTriple transform_triple(const MappingSpec& spec, const LevyTriple& t);

}  // namespace levymap
