#include "levy_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "quadrature.hpp"

namespace levymap {
namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

// compensated Levy-Khintchine integrand (e^{iyx} - 1 - iyx 1_{|x|<=1})
cplx lk_integrand(double y, double x) {
    const double s = std::sin(y * x);
    const double c = std::cos(y * x);
    cplx val(c - 1.0, s);
    if (std::fabs(x) <= 1.0) val -= kI * (y * x);
    return val;
}

cplx quad_exponent_piece(const DensityPiece& p, double y, double tol) {
    QuadOptions opts;
    opts.abs_tol = tol;
    opts.rel_tol = tol;
    auto f = [&p, y](double x) { return lk_integrand(y, x) * p.pdf(x); };
    // split at the compensation boundary so the kink never sits inside a panel
    double lo = p.lo, hi = p.hi;
    cplx total = 0.0;
    auto piece = [&](double a, double b) {
        if (b > a) total += integrate_interval_complex(f, a, b, opts);
    };
    if (lo < -1.0) {
        piece(lo, std::min(hi, -1.0));
        lo = -1.0;
    }
    if (lo < std::min(hi, 0.0)) {
        piece(lo, std::min(hi, 0.0));
        lo = std::min(hi, 0.0);
    }
    if (lo < std::min(hi, 1.0)) {
        piece(lo, std::min(hi, 1.0));
        lo = std::min(hi, 1.0);
    }
    piece(lo, hi);
    return total;
}

double stable_coefficient(double alpha) {
    // int_0^inf (1-cos u) u^{-1-alpha} du = pi / (2 alpha Gamma(alpha) sin(pi alpha / 2))
    return std::numbers::pi / (2.0 * alpha * std::tgamma(alpha) * std::sin(std::numbers::pi * alpha / 2.0));
}

}  // namespace

SpectralMeasure::SpectralMeasure(Variant v) : v_(std::move(v)) {
    if (auto* atoms = std::get_if<std::vector<SpectralAtom>>(&v_)) {
        for (const auto& a : *atoms) {
            if (a.x == 0.0) throw std::invalid_argument("spectral atom at 0");
            if (!(a.mass > 0.0)) throw std::invalid_argument("spectral atom mass must be > 0");
        }
    } else if (auto* g = std::get_if<GammaSpectral>(&v_)) {
        if (!(g->shape > 0.0) || !(g->rate > 0.0))
            throw std::invalid_argument("gamma spectral needs shape, rate > 0");
    } else if (auto* s = std::get_if<StableSpectral>(&v_)) {
        if (!(s->alpha > 0.0) || !(s->alpha < 2.0))
            throw std::invalid_argument("stable spectral needs alpha in (0,2)");
        if (!(s->c > 0.0)) throw std::invalid_argument("stable spectral needs c > 0");
    }
}

SpectralMeasure SpectralMeasure::atoms(std::vector<SpectralAtom> a) {
    return SpectralMeasure(Variant(std::move(a)));
}
SpectralMeasure SpectralMeasure::gamma(double shape, double rate) {
    return SpectralMeasure(Variant(GammaSpectral{shape, rate}));
}
SpectralMeasure SpectralMeasure::sym_stable(double c, double alpha) {
    return SpectralMeasure(Variant(StableSpectral{c, alpha}));
}
SpectralMeasure SpectralMeasure::custom(std::vector<DensityPiece> pieces,
                                        std::optional<bool> log_moment) {
    return SpectralMeasure(Variant(CustomSpectral{std::move(pieces), log_moment}));
}

bool SpectralMeasure::is_compound_poisson() const {
    return std::isfinite(total_mass());
}

double SpectralMeasure::total_mass() const {
    if (is_zero()) return 0.0;
    if (auto* atoms = std::get_if<std::vector<SpectralAtom>>(&v_)) {
        double m = 0.0;
        for (const auto& a : *atoms) m += a.mass;
        return m;
    }
    if (std::holds_alternative<GammaSpectral>(v_) || std::holds_alternative<StableSpectral>(v_)) {
        return std::numeric_limits<double>::infinity();
    }
    const auto& cs = std::get<CustomSpectral>(v_);
    double m = 0.0;
    QuadOptions opts;
    opts.abs_tol = 1e-10;
    opts.rel_tol = 1e-10;
    for (const auto& p : cs.pieces) {
        try {
            m += integrate_interval(p.pdf, p.lo, p.hi, opts);
        } catch (const QuadratureFailure&) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return m;
}

double SpectralMeasure::compensator_integral(double tol) const {
    if (is_zero()) return 0.0;
    if (auto* atoms = std::get_if<std::vector<SpectralAtom>>(&v_)) {
        double s = 0.0;
        for (const auto& a : *atoms) {
            if (std::fabs(a.x) <= 1.0) s += a.x * a.mass;
        }
        return s;
    }
    if (auto* g = std::get_if<GammaSpectral>(&v_)) {
        // int_0^1 x * shape e^{-rate x}/x dx = shape (1 - e^{-rate}) / rate
        return g->shape * (1.0 - std::exp(-g->rate)) / g->rate;
    }
    if (std::holds_alternative<StableSpectral>(v_)) return 0.0;  // odd integrand, symmetric measure
    const auto& cs = std::get<CustomSpectral>(v_);
    QuadOptions opts;
    opts.abs_tol = tol;
    opts.rel_tol = tol;
    double s = 0.0;
    for (const auto& p : cs.pieces) {
        const double lo = std::max(p.lo, -1.0);
        const double hi = std::min(p.hi, 1.0);
        if (hi > lo) s += integrate([&p](double x) { return x * p.pdf(x); }, lo, hi, opts);
    }
    return s;
}

LogMoment SpectralMeasure::log_moment(double tol) const {
    if (is_zero()) return LogMoment::Finite;
    if (std::holds_alternative<std::vector<SpectralAtom>>(v_)) return LogMoment::Finite;
    if (std::holds_alternative<GammaSpectral>(v_)) return LogMoment::Finite;  // exponential tail
    if (std::holds_alternative<StableSpectral>(v_)) return LogMoment::Finite; // log(1+x) x^{-1-a} integrable
    const auto& cs = std::get<CustomSpectral>(v_);
    if (cs.log_moment_finite.has_value()) {
        return *cs.log_moment_finite ? LogMoment::Finite : LogMoment::Infinite;
    }
    // expanding truncation: certified finite once a doubling step moves the
    // value by < tol; certified infinite when increments stop shrinking
    QuadOptions opts;
    opts.abs_tol = tol * 1e-2;
    opts.rel_tol = tol * 1e-2;
    for (const auto& p : cs.pieces) {
        if (!(p.lo >= 0.0 || p.hi <= 0.0)) {
            return LogMoment::Undecidable;  // two-sided custom piece not supported
        }
        // fold onto the positive axis
        const bool positive_side = p.hi > 0.0;
        const double lo = positive_side ? p.lo : -p.hi;
        const double hi = positive_side ? p.hi : -p.lo;
        if (hi <= 1.0) continue;  // inside the unit ball
        auto g = [&p, positive_side](double x) {
            return std::log1p(x) * p.pdf(positive_side ? x : -x);
        };
        if (std::isfinite(hi)) {
            integrate(g, std::max(lo, 1.0), hi, opts);  // throws on budget exhaustion
            continue;
        }
        double T = std::max(lo, 1.0);
        bool converged = false;
        double last_inc = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 40; ++k) {
            double inc;
            try {
                inc = integrate(g, T, 2.0 * T, opts);
            } catch (const QuadratureFailure&) {
                return LogMoment::Undecidable;
            }
            if (std::fabs(inc) < tol) {
                converged = true;
                break;
            }
            if (k > 4 && inc >= last_inc) return LogMoment::Infinite;
            last_inc = inc;
            T *= 2.0;
        }
        if (!converged) return LogMoment::Undecidable;
    }
    return LogMoment::Finite;
}

SpectralMeasure SpectralMeasure::reflected() const {
    if (is_zero()) return *this;
    if (auto* atoms = std::get_if<std::vector<SpectralAtom>>(&v_)) {
        std::vector<SpectralAtom> out = *atoms;
        for (auto& a : out) a.x = -a.x;
        return SpectralMeasure::atoms(std::move(out));
    }
    if (auto* g = std::get_if<GammaSpectral>(&v_)) {
        const GammaSpectral gs = *g;
        return SpectralMeasure::custom(
            {{-std::numeric_limits<double>::infinity(), 0.0,
              [gs](double x) { return gs.shape * std::exp(gs.rate * x) / (-x); }}},
            true);
    }
    if (std::holds_alternative<StableSpectral>(v_)) return *this;  // symmetric
    const auto& cs = std::get<CustomSpectral>(v_);
    CustomSpectral out;
    out.log_moment_finite = cs.log_moment_finite;
    for (const auto& p : cs.pieces) {
        auto pdf = p.pdf;
        out.pieces.push_back({-p.hi, -p.lo, [pdf](double x) { return pdf(-x); }});
    }
    return SpectralMeasure(Variant(std::move(out)));
}

void LevyTriple::validate() const {
    if (!(gauss_var >= 0.0)) throw std::invalid_argument("gauss_var must be >= 0");
    if (!std::isfinite(shift)) throw std::invalid_argument("shift must be finite");
}

LevyTriple gaussian_law(double mean, double var) {
    LevyTriple t{mean, var, SpectralMeasure::zero()};
    t.validate();
    return t;
}

LevyTriple shift_law(double c) { return LevyTriple{c, 0.0, SpectralMeasure::zero()}; }

LevyTriple compound_poisson_law(std::vector<SpectralAtom> atoms, double drift) {
    SpectralMeasure m = SpectralMeasure::atoms(std::move(atoms));
    const double comp = m.compensator_integral();
    return LevyTriple{drift + comp, 0.0, std::move(m)};
}

LevyTriple gamma_law(double shape, double rate) {
    SpectralMeasure m = SpectralMeasure::gamma(shape, rate);
    return LevyTriple{m.compensator_integral(), 0.0, std::move(m)};
}

LevyTriple sym_stable_law(double alpha, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("stable scale must be > 0");
    // choose c so the exponent is exactly -scale |y|^alpha
    const double c = scale / (2.0 * stable_coefficient(alpha));
    return LevyTriple{0.0, 0.0, SpectralMeasure::sym_stable(c, alpha)};
}

LevyExponent::LevyExponent()
    : eval_([](double) { return cplx{0.0, 0.0}; }), provenance_(Provenance::ClosedForm) {}

LevyExponent LevyExponent::closed_form(EvalFn f, std::string label) {
    LevyExponent e;
    e.eval_ = std::move(f);
    e.provenance_ = Provenance::ClosedForm;
    e.chain_ = {std::move(label)};
    return e;
}

LevyExponent LevyExponent::transformed(EvalFn f, std::vector<std::string> chain,
                                       std::shared_ptr<const LevyTriple> source) {
    LevyExponent e;
    e.eval_ = std::move(f);
    e.provenance_ = Provenance::Transformed;
    e.chain_ = std::move(chain);
    e.source_ = std::move(source);
    return e;
}

std::complex<double> LevyExponent::operator()(double y) const {
    if (y < 0.0) return std::conj(eval_(-y));
    return eval_(y);
}

LevyExponent exponent_of(const LevyTriple& t, double tol) {
    t.validate();
    auto triple = std::make_shared<const LevyTriple>(t);
    auto eval = [triple, tol](double y) -> cplx {
        cplx phi = kI * (y * triple->shift) - 0.5 * triple->gauss_var * y * y;
        const auto& v = triple->spectral.variant();
        if (std::holds_alternative<std::monostate>(v)) return phi;
        if (const auto* atoms = std::get_if<std::vector<SpectralAtom>>(&v)) {
            for (const auto& a : *atoms) phi += a.mass * lk_integrand(y, a.x);
            return phi;
        }
        if (const auto* g = std::get_if<GammaSpectral>(&v)) {
            // int (e^{iyx}-1) shape e^{-rate x}/x dx = -shape Log(1 - iy/rate)
            const cplx log_term = -g->shape * std::log(cplx(1.0, -y / g->rate));
            const double comp = g->shape * (1.0 - std::exp(-g->rate)) / g->rate;
            return phi + log_term - kI * (y * comp);
        }
        if (const auto* s = std::get_if<StableSpectral>(&v)) {
            return phi - 2.0 * s->c * stable_coefficient(s->alpha) * std::pow(std::fabs(y), s->alpha);
        }
        const auto& cs = std::get<CustomSpectral>(v);
        for (const auto& p : cs.pieces) phi += quad_exponent_piece(p, y, tol);
        return phi;
    };
    LevyExponent e;
    e.eval_ = std::move(eval);
    e.provenance_ = Provenance::FromTriple;
    e.chain_ = {"triple"};
    e.source_ = triple;
    return e;
}

LevyExponent convolve(const LevyExponent& a, const LevyExponent& b) {
    std::vector<std::string> chain = {"convolve"};
    return LevyExponent::transformed(
        [a, b](double y) { return a(y) + b(y); }, std::move(chain));
}

LevyExponent conv_power(const LevyExponent& e, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("conv_power: s must be > 0");
    return LevyExponent::transformed([e, s](double y) { return s * e(y); }, {"conv_power"},
                                     e.source_triple());
}

LevyExponent dilate(const LevyExponent& e, double u) {
    if (u == 0.0) throw std::invalid_argument("dilate: u must be nonzero");
    return LevyExponent::transformed([e, u](double y) { return e(u * y); }, {"dilate"});
}

LevyExponent negate_law(const LevyExponent& e) {
    return LevyExponent::transformed([e](double y) { return e(-y); }, {"negate"});
}

bool check_id_log(const SpectralMeasure& m) {
    switch (m.log_moment()) {
        case LogMoment::Finite:
            return true;
        case LogMoment::Infinite:
            return false;
        default:
            throw Undecidable("log-moment integral could not be certified numerically");
    }
}

}  // namespace levymap
