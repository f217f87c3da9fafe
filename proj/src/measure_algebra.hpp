#pragma once

// Positive measures on sub-intervals of the half-line: clock measures induced
// by monotone time changes, lazy product measures, and images (pushforwards)
// under tensor products of kernel functions. The image of a product measure
// under multiplication is computed as the multiplicative convolution of the
// exact one-dimensional images, so density/cdf/tail queries reduce to
// one-dimensional adaptive quadrature at any depth.

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "interpolation.hpp"

namespace levymap {

enum class Direction { NonDecreasing, NonIncreasing };

// half-open interval (lo, hi]; hi may be +inf
struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    bool upper_infinite() const;
    void validate() const;
};

// ---------------------------------------------------------------------------
// kernel functions h: continuous, bounded variation, monotone catalog forms,
// evaluated as scale * base(t)

class KernelFunction {
 public:
    enum class Form { Const, Identity, Power, ExpDecay, NegLog, OneMinusSqrtPow, Tabulated };

    static KernelFunction constant();                       // 1
    static KernelFunction identity();                       // t
    static KernelFunction power(double exponent);           // t^p, p > 0
    static KernelFunction exp_decay();                      // e^{-t}
    static KernelFunction neg_log();                        // -log t on (0,1)
    static KernelFunction one_minus_sqrt_pow(double beta);  // (1-sqrt t)^{1/beta} on (0,1]
    static KernelFunction tabulated(PchipInterpolant values);

    double operator()(double t) const;

    Form form() const { return form_; }
    double scale() const { return scale_; }
    double form_param() const { return param_; }
    KernelFunction scaled(double factor) const;  // multiplies scale (factor != 0)

    bool is_constant() const { return form_ == Form::Const; }
    // base(t) ignoring scale
    double base(double t) const;
    // t with base(t) = w (catalog forms have analytic inverses)
    double base_inverse(double w) const;
    double base_inverse_derivative(double w) const;  // |d base^{-1}/dw|

    std::string describe() const;

 private:
    KernelFunction(Form f, double param) : form_(f), param_(param) {}
    Form form_ = Form::Identity;
    double param_ = 0.0;  // exponent p or beta
    double scale_ = 1.0;
    std::shared_ptr<const PchipInterpolant> table_;
};

struct MeasureAtom {
    double x;
    double mass;
};

// ---------------------------------------------------------------------------
// monotone time changes r on (a,b]; the induced clock measure has
// rho((a,t]) = |r(t) - r(a+)|

class TimeChange {
 public:
    enum class Form { Identity, OneMinusExp, Power, IncGammaTail, Custom, Tabulated };

    static TimeChange identity(Interval iv);
    static TimeChange one_minus_exp(Interval iv);
    static TimeChange power(double gamma, Interval iv);
    static TimeChange inc_gamma_tail(double alpha, Interval iv);
    // r_fn / density_fn must be consistent: density = |dr/dt| on iv.
    // r_at_hi: limit of r at the upper endpoint; NaN means "evaluate r(hi)"
    // (only valid for finite hi)
    static TimeChange custom(std::function<double(double)> r_fn,
                             std::function<double(double)> density_fn, Direction dir, Interval iv,
                             double r_at_lo,
                             double r_at_hi = std::numeric_limits<double>::quiet_NaN(),
                             std::string label = "custom");
    static TimeChange tabulated(PchipInterpolant r, Direction dir);
    // pure-jump time change: r steps by mass at each atom location
    static TimeChange steps(std::vector<MeasureAtom> atoms);

    double r(double t) const;              // time change value (scale applied)
    double clock_density(double t) const;  // |dr/dt|
    double r_at_lo() const;                // r(a+), may be +-inf
    double r_at_hi() const;                // limit of r at b
    double mass_upto(double t) const;      // rho((a, t]), may be +inf
    double mass_from(double t) const;      // rho((t, b]), may be +inf
    double total_mass() const;             // rho((a, b]), may be +inf

    Direction direction() const { return dir_; }
    const Interval& interval() const { return iv_; }
    double scale() const { return scale_; }
    TimeChange scaled(double factor) const;  // factor > 0
    Form form() const { return form_; }
    double form_param() const { return param_; }
    // atom list of a pure-jump (steps) time change, else nullptr
    const std::vector<MeasureAtom>* atoms() const;

    std::string describe() const;

 private:
    TimeChange() = default;
    Form form_ = Form::Identity;
    double param_ = 0.0;
    double scale_ = 1.0;
    Direction dir_ = Direction::NonDecreasing;
    Interval iv_;
    std::function<double(double)> custom_r_, custom_density_;
    double custom_r_at_lo_ = 0.0;
    double custom_r_at_hi_ = 0.0;
    std::string label_;
    std::shared_ptr<const PchipInterpolant> table_;
    std::shared_ptr<const std::vector<MeasureAtom>> atoms_;
};

// ---------------------------------------------------------------------------
// positive measures on (0, inf)

class HalfLineMeasure {
 public:
    // cdf_fn / tail_fn, when given, must return mass((lo,t]) resp. mass((t,hi))
    // for t inside the support; queries fall back to quadrature otherwise
    static HalfLineMeasure density(std::function<double(double)> pdf, Interval support,
                                   double total_mass_hint = -1.0,
                                   std::function<double(double)> cdf_fn = nullptr,
                                   std::function<double(double)> tail_fn = nullptr);
    static HalfLineMeasure atoms(std::vector<MeasureAtom> atoms);
    static HalfLineMeasure from_time_change(TimeChange tc);
    // image of the product (left x right) under multiplication
    static HalfLineMeasure mellin_product(HalfLineMeasure left, HalfLineMeasure right);

    bool is_atomic() const;
    const std::vector<MeasureAtom>* atom_list() const;
    // the time change behind a from_time_change measure, else nullptr
    const TimeChange* clock() const;

    // pointwise density; valid for non-atomic measures
    double density_at(double w, double tol = 1e-10) const;
    // mass of (0, t]; throws InfiniteMass when not finite
    double cdf(double t, double tol = 1e-10) const;
    // mass of (t, inf)
    double tail(double t, double tol = 1e-10) const;
    double total_mass() const;
    Interval support() const;

    // int g dm over the support (g must make the integral converge)
    double integrate(const std::function<double(double)>& g, double tol = 1e-10) const;

 private:
    struct DensityM {
        std::function<double(double)> pdf;
        Interval supp;
        double mass = -1.0;  // <0: unknown, computed on demand; +inf allowed
        std::function<double(double)> cdf_fn, tail_fn;
    };
    struct ClockM {
        TimeChange tc;
    };
    struct MellinM {
        std::shared_ptr<const HalfLineMeasure> left, right;
    };
    using Variant = std::variant<DensityM, std::vector<MeasureAtom>, ClockM, MellinM>;
    explicit HalfLineMeasure(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

// ---------------------------------------------------------------------------
// lazy product measure; integration is iterated in input (Fubini) order

class ProductMeasure {
 public:
    explicit ProductMeasure(std::vector<HalfLineMeasure> factors);

    std::size_t dimension() const { return factors_.size(); }
    const HalfLineMeasure& factor(std::size_t i) const { return factors_[i]; }

    // integral of g(t_1, .., t_m); diverging integrals surface as QuadratureFailure
    double integrate(const std::function<double(std::span<const double>)>& g,
                     double tol = 1e-9) const;
    // product of one-dimensional integrals for separable integrands
    double integrate_separable(const std::vector<std::function<double(double)>>& gs,
                               double tol = 1e-10) const;
    double total_mass() const;

 private:
    std::vector<HalfLineMeasure> factors_;
};

ProductMeasure product_measure(std::vector<HalfLineMeasure> factors);

// ---------------------------------------------------------------------------
// pushforward (image) of rho_1 x .. x rho_m under h_1 (x) .. (x) h_m

struct PushforwardOptions {
    bool use_catalog = true;  // recognize closed-form identity-catalog pairs
    double tol = 1e-10;
};

// closed-form image together with its exact monotone time-change representation
struct CatalogImage {
    HalfLineMeasure measure;
    TimeChange time_change;
    std::string name;
};

std::optional<CatalogImage> pushforward_catalog(std::span<const KernelFunction> kernels,
                                                std::span<const HalfLineMeasure> measures);

HalfLineMeasure pushforward(std::span<const KernelFunction> kernels,
                            std::span<const HalfLineMeasure> measures,
                            const PushforwardOptions& opts = {});

// measure mass of (0,t] / (t,inf) as free functions (spec-level operations)
double cdf(const HalfLineMeasure& m, double t);
double tail_mass(const HalfLineMeasure& m, double t);

// ---------------------------------------------------------------------------
// sampleable clock variables for Corollary-1 style time changes

class ClockLaw {
 public:
    static ClockLaw point(double c);
    static ClockLaw uniform01();          // Uniform(0,1]
    static ClockLaw exponential(double rate);

    double sample(std::uint64_t& state) const;  // splitmix-driven draw
    HalfLineMeasure as_measure() const;

 private:
    enum class Kind { Point, Uniform, Exponential } kind_ = Kind::Point;
    double param_ = 1.0;
};

struct ProductTimeChangeResult {
    TimeChange tabulated;                     // monotone estimate of r from MC
    std::vector<double> sorted_samples;       // the n sampled products, ascending
    std::function<double(double)> quad_cdf;   // CDF of pushforward(h, laws)
    double ks_distance;                       // sup |ECDF - quad_cdf|
};

ProductTimeChangeResult product_time_change(std::span<const ClockLaw> laws,
                                            std::span<const KernelFunction> kernels,
                                            std::size_t n_samples, std::uint64_t seed);

}  // namespace levymap
