#pragma once

// Infinitely divisible laws on the line, represented by their Levy triples
// [shift, gauss_var, spectral], and their Levy exponents
//
//   Phi(y) = i y z - R y^2 / 2 + int (e^{iyx} - 1 - iyx 1_{|x|<=1}) M(dx).
//
// Jumps with |x| <= 1 (closed ball) are compensated. Exponents are evaluated
// in closed form for the catalogued spectral families and by adaptive
// quadrature otherwise. All values are immutable after construction.

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace levymap {

inline constexpr double kDefaultTolQuad = 1e-10;

struct SpectralAtom {
    double x;     // jump size, != 0
    double mass;  // > 0
};

// density shape * e^{-rate x} / x on (0, inf)
struct GammaSpectral {
    double shape = 1.0;
    double rate = 1.0;
};

// density c |x|^{-1-alpha} on both half-lines
struct StableSpectral {
    double c = 1.0;
    double alpha = 1.0;  // in (0,2)
};

struct DensityPiece {
    double lo;  // open endpoints; 0 and +-inf allowed
    double hi;
    std::function<double(double)> pdf;
};

struct CustomSpectral {
    std::vector<DensityPiece> pieces;
    std::optional<bool> log_moment_finite;  // analytic override when known
};

enum class LogMoment { Finite, Infinite, Undecidable };

class SpectralMeasure {
 public:
    using Variant =
        std::variant<std::monostate, std::vector<SpectralAtom>, GammaSpectral, StableSpectral,
                     CustomSpectral>;

    SpectralMeasure() = default;  // zero measure
    explicit SpectralMeasure(Variant v);

    static SpectralMeasure zero() { return SpectralMeasure(); }
    static SpectralMeasure atoms(std::vector<SpectralAtom> a);
    static SpectralMeasure gamma(double shape, double rate);
    static SpectralMeasure sym_stable(double c, double alpha);
    static SpectralMeasure custom(std::vector<DensityPiece> pieces,
                                  std::optional<bool> log_moment = std::nullopt);

    const Variant& variant() const { return v_; }
    bool is_zero() const { return std::holds_alternative<std::monostate>(v_); }
    bool is_compound_poisson() const;  // M(R \ {0}) < inf
    double total_mass() const;         // may be +inf

    // int_{|x|<=1} x M(dx); needed to move between compensated and plain forms
    double compensator_integral(double tol = kDefaultTolQuad) const;

    // log-moment test  int_{|x|>1} log(1+|x|) M(dx) < inf
    LogMoment log_moment(double tol = 1e-9) const;

    SpectralMeasure reflected() const;  // image under x -> -x

 private:
    Variant v_;
};

struct LevyTriple {
    double shift = 0.0;      // z
    double gauss_var = 0.0;  // R >= 0
    SpectralMeasure spectral;

    void validate() const;  // throws std::invalid_argument
};

// catalog constructors
LevyTriple gaussian_law(double mean, double var);
LevyTriple shift_law(double c);
// law of the compound Poisson sum with the given jump atoms, plus optional drift
LevyTriple compound_poisson_law(std::vector<SpectralAtom> atoms, double drift = 0.0);
// Gamma(shape, rate) probability law
LevyTriple gamma_law(double shape, double rate);
// symmetric alpha-stable with exponent -scale |y|^alpha
LevyTriple sym_stable_law(double alpha, double scale);

enum class Provenance { FromTriple, Transformed, ClosedForm };

class LevyExponent {
 public:
    using EvalFn = std::function<std::complex<double>(double)>;

    LevyExponent();  // exponent of delta_0 (identically zero)

    // f is consulted for y >= 0 only; negative arguments use the Hermitian
    // reflection conj(f(-y)), so the symmetry holds exactly by construction
    static LevyExponent closed_form(EvalFn f, std::string label = "closed-form");
    static LevyExponent transformed(EvalFn f, std::vector<std::string> chain,
                                    std::shared_ptr<const LevyTriple> source = nullptr);

    std::complex<double> operator()(double y) const;

    Provenance provenance() const { return provenance_; }
    const std::vector<std::string>& chain() const { return chain_; }
    // triple the exponent was derived from, when known
    std::shared_ptr<const LevyTriple> source_triple() const { return source_; }

    friend LevyExponent exponent_of(const LevyTriple& t, double tol);

 private:
    EvalFn eval_;
    Provenance provenance_ = Provenance::ClosedForm;
    std::vector<std::string> chain_;
    std::shared_ptr<const LevyTriple> source_;
};

// Levy-Khintchine evaluation of a triple
LevyExponent exponent_of(const LevyTriple& t, double tol = kDefaultTolQuad);

// semigroup operations
LevyExponent convolve(const LevyExponent& a, const LevyExponent& b);
LevyExponent conv_power(const LevyExponent& e, double s);  // s > 0
LevyExponent dilate(const LevyExponent& e, double u);      // u != 0
LevyExponent negate_law(const LevyExponent& e);            // exponent of nu^-

// true iff the spectral measure has finite log-moment at infinity (membership
// in ID_log); throws Undecidable when quadrature cannot certify either way
bool check_id_log(const SpectralMeasure& m);

}  // namespace levymap
