#include "measure_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "special_functions.hpp"

namespace levymap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// improper integral of a nonnegative density over (lo, hi) with possible
// singularity at lo and infinite hi; returns +inf on detected divergence.
// Termination needs two consecutive sub-tolerance increments so that gaps
// where the integrand vanishes do not end the expansion early.
double improper_mass(const std::function<double(double)>& pdf, double lo, double hi,
                     double tol = 1e-10) {
    QuadOptions opts;
    opts.abs_tol = tol * 1e-2;
    opts.rel_tol = tol * 1e-2;
    const bool hi_inf = std::isinf(hi);
    double anchor = hi_inf ? std::max(2.0 * lo, lo + 1.0) : hi;
    double total = 0.0;
    // left end: geometric approach to lo
    {
        double prev_cut = anchor;
        double last_inc = kInf;
        bool converged = false;
        int small_run = 0;
        for (int k = 0; k < 80; ++k) {
            const double cut = lo + (prev_cut - lo) * 0.25;
            double inc;
            try {
                inc = integrate(pdf, cut, prev_cut, opts);
            } catch (const QuadratureFailure&) {
                return kInf;
            }
            total += inc;
            small_run = (std::fabs(inc) < tol) ? small_run + 1 : 0;
            if (small_run >= 2) {
                converged = true;
                break;
            }
            if (k > 6 && inc > 0.0 && inc >= last_inc) return kInf;
            if (inc > 0.0) last_inc = inc;
            prev_cut = cut;
        }
        if (!converged) throw QuadratureFailure("mass near lower endpoint did not settle", total, 0.0, 0.0);
    }
    if (hi_inf) {
        double T = anchor;
        double last_inc = kInf;
        bool converged = false;
        int small_run = 0;
        for (int k = 0; k < 80; ++k) {
            double inc;
            try {
                inc = integrate(pdf, T, 2.0 * T, opts);
            } catch (const QuadratureFailure&) {
                return kInf;
            }
            total += inc;
            small_run = (std::fabs(inc) < tol) ? small_run + 1 : 0;
            if (small_run >= 3) {
                converged = true;
                break;
            }
            if (k > 6 && inc > 0.0 && inc >= last_inc) return kInf;
            if (inc > 0.0) last_inc = inc;
            T *= 2.0;
        }
        if (!converged) throw QuadratureFailure("mass toward infinity did not settle", total, 0.0, 0.0);
    }
    return total;
}

double mul_bound(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

}  // namespace

bool Interval::upper_infinite() const { return std::isinf(hi); }

void Interval::validate() const {
    if (!(lo >= 0.0)) throw std::invalid_argument("interval must lie in [0, inf)");
    if (!(hi > lo)) throw std::invalid_argument("interval needs hi > lo");
}

// ---------------------------------------------------------------------------
// KernelFunction

KernelFunction KernelFunction::constant() { return KernelFunction(Form::Const, 0.0); }
KernelFunction KernelFunction::identity() { return KernelFunction(Form::Identity, 0.0); }
KernelFunction KernelFunction::power(double exponent) {
    if (!(exponent > 0.0)) throw std::invalid_argument("power kernel needs exponent > 0");
    return KernelFunction(Form::Power, exponent);
}
KernelFunction KernelFunction::exp_decay() { return KernelFunction(Form::ExpDecay, 0.0); }
KernelFunction KernelFunction::neg_log() { return KernelFunction(Form::NegLog, 0.0); }
KernelFunction KernelFunction::one_minus_sqrt_pow(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("one_minus_sqrt_pow needs beta > 0");
    return KernelFunction(Form::OneMinusSqrtPow, beta);
}
KernelFunction KernelFunction::tabulated(PchipInterpolant values) {
    KernelFunction k(Form::Tabulated, 0.0);
    k.table_ = std::make_shared<const PchipInterpolant>(std::move(values));
    return k;
}

double KernelFunction::base(double t) const {
    switch (form_) {
        case Form::Const:
            return 1.0;
        case Form::Identity:
            return t;
        case Form::Power:
            return std::pow(t, param_);
        case Form::ExpDecay:
            return std::exp(-t);
        case Form::NegLog:
            return -std::log(t);
        case Form::OneMinusSqrtPow:
            return std::pow(1.0 - std::sqrt(t), 1.0 / param_);
        case Form::Tabulated:
            return (*table_)(t);
    }
    return 0.0;
}

double KernelFunction::operator()(double t) const { return scale_ * base(t); }

KernelFunction KernelFunction::scaled(double factor) const {
    if (factor == 0.0) throw std::invalid_argument("kernel scale must be nonzero");
    KernelFunction k = *this;
    k.scale_ *= factor;
    return k;
}

double KernelFunction::base_inverse(double w) const {
    switch (form_) {
        case Form::Identity:
            return w;
        case Form::Power:
            return std::pow(w, 1.0 / param_);
        case Form::ExpDecay:
            return -std::log(w);
        case Form::NegLog:
            return std::exp(-w);
        case Form::OneMinusSqrtPow: {
            const double u = 1.0 - std::pow(w, param_);
            return u * u;
        }
        case Form::Tabulated: {
            // monotone bisection on the table range
            double lo = table_->x_min(), hi = table_->x_max();
            const bool inc = (*table_)(hi) >= (*table_)(lo);
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                const double v = (*table_)(mid);
                if ((v < w) == inc) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        case Form::Const:
            break;
    }
    throw std::invalid_argument("kernel form has no inverse");
}

double KernelFunction::base_inverse_derivative(double w) const {
    switch (form_) {
        case Form::Identity:
            return 1.0;
        case Form::Power:
            return std::pow(w, 1.0 / param_ - 1.0) / param_;
        case Form::ExpDecay:
            return 1.0 / w;
        case Form::NegLog:
            return std::exp(-w);
        case Form::OneMinusSqrtPow:
            // t(w) = (1 - w^beta)^2, beta = 1/param in the exponent sense below
            return 2.0 * param_ * std::pow(w, param_ - 1.0) * (1.0 - std::pow(w, param_));
        case Form::Tabulated: {
            const double t = base_inverse(w);
            const double d = table_->derivative(t);
            if (d == 0.0) throw QuadratureFailure("tabulated kernel has flat spot", 0, 0, 0);
            return 1.0 / std::fabs(d);
        }
        case Form::Const:
            break;
    }
    throw std::invalid_argument("kernel form has no inverse");
}

std::string KernelFunction::describe() const {
    std::string base;
    switch (form_) {
        case Form::Const: base = "1"; break;
        case Form::Identity: base = "t"; break;
        case Form::Power: base = "t^" + std::to_string(param_); break;
        case Form::ExpDecay: base = "exp(-t)"; break;
        case Form::NegLog: base = "-log(t)"; break;
        case Form::OneMinusSqrtPow: base = "(1-sqrt(t))^(1/" + std::to_string(param_) + ")"; break;
        case Form::Tabulated: base = "tabulated"; break;
    }
    if (scale_ == 1.0) return base;
    return std::to_string(scale_) + "*" + base;
}

// ---------------------------------------------------------------------------
// TimeChange

TimeChange TimeChange::identity(Interval iv) {
    iv.validate();
    TimeChange tc;
    tc.form_ = Form::Identity;
    tc.iv_ = iv;
    return tc;
}

TimeChange TimeChange::one_minus_exp(Interval iv) {
    iv.validate();
    TimeChange tc;
    tc.form_ = Form::OneMinusExp;
    tc.iv_ = iv;
    return tc;
}

TimeChange TimeChange::power(double gamma, Interval iv) {
    iv.validate();
    if (!(gamma > 0.0)) throw std::invalid_argument("power time change needs gamma > 0");
    TimeChange tc;
    tc.form_ = Form::Power;
    tc.param_ = gamma;
    tc.iv_ = iv;
    return tc;
}

TimeChange TimeChange::inc_gamma_tail(double alpha, Interval iv) {
    iv.validate();
    TimeChange tc;
    tc.form_ = Form::IncGammaTail;
    tc.param_ = alpha;
    tc.dir_ = Direction::NonIncreasing;
    tc.iv_ = iv;
    return tc;
}

TimeChange TimeChange::custom(std::function<double(double)> r_fn,
                              std::function<double(double)> density_fn, Direction dir, Interval iv,
                              double r_at_lo, double r_at_hi, std::string label) {
    iv.validate();
    TimeChange tc;
    tc.form_ = Form::Custom;
    tc.dir_ = dir;
    tc.iv_ = iv;
    if (std::isnan(r_at_hi)) {
        if (iv.upper_infinite()) {
            throw std::invalid_argument("custom time change on (a,inf) needs an explicit r_at_hi");
        }
        r_at_hi = r_fn(iv.hi);
    }
    tc.custom_r_ = std::move(r_fn);
    tc.custom_density_ = std::move(density_fn);
    tc.custom_r_at_lo_ = r_at_lo;
    tc.custom_r_at_hi_ = r_at_hi;
    tc.label_ = std::move(label);
    return tc;
}

TimeChange TimeChange::tabulated(PchipInterpolant r, Direction dir) {
    TimeChange tc;
    tc.form_ = Form::Tabulated;
    tc.dir_ = dir;
    tc.iv_ = Interval{r.x_min(), r.x_max()};
    tc.table_ = std::make_shared<const PchipInterpolant>(std::move(r));
    return tc;
}

TimeChange TimeChange::steps(std::vector<MeasureAtom> atoms) {
    if (atoms.empty()) throw std::invalid_argument("steps time change needs atoms");
    std::sort(atoms.begin(), atoms.end(),
              [](const MeasureAtom& a, const MeasureAtom& b) { return a.x < b.x; });
    auto shared = std::make_shared<const std::vector<MeasureAtom>>(std::move(atoms));
    TimeChange tc;
    tc.form_ = Form::Custom;
    tc.label_ = "steps";
    tc.iv_ = Interval{shared->front().x * 0.5, shared->back().x};
    tc.custom_r_at_lo_ = 0.0;
    double total = 0.0;
    for (const auto& a : *shared) total += a.mass;
    tc.custom_r_at_hi_ = total;
    tc.custom_r_ = [shared](double t) {
        double s = 0.0;
        for (const auto& a : *shared) {
            if (a.x <= t) s += a.mass;
        }
        return s;
    };
    tc.custom_density_ = [](double) { return 0.0; };
    tc.atoms_ = std::move(shared);
    return tc;
}

const std::vector<MeasureAtom>* TimeChange::atoms() const {
    return atoms_ ? atoms_.get() : nullptr;
}

double TimeChange::r(double t) const {
    double v = 0.0;
    switch (form_) {
        case Form::Identity: v = t; break;
        case Form::OneMinusExp: v = 1.0 - std::exp(-t); break;
        case Form::Power: v = std::pow(t, param_); break;
        case Form::IncGammaTail: v = levymap::inc_gamma_tail(param_, t); break;
        case Form::Custom: v = custom_r_(t); break;
        case Form::Tabulated: v = (*table_)(t); break;
    }
    return scale_ * v;
}

double TimeChange::clock_density(double t) const {
    double v = 0.0;
    switch (form_) {
        case Form::Identity: v = 1.0; break;
        case Form::OneMinusExp: v = std::exp(-t); break;
        case Form::Power: v = param_ * std::pow(t, param_ - 1.0); break;
        case Form::IncGammaTail: v = std::exp((param_ - 1.0) * std::log(t) - t); break;
        case Form::Custom: v = custom_density_(t); break;
        case Form::Tabulated: v = std::fabs(table_->derivative(t)); break;
    }
    return scale_ * v;
}

double TimeChange::r_at_lo() const {
    const double a = iv_.lo;
    switch (form_) {
        case Form::Identity: return scale_ * a;
        case Form::OneMinusExp: return scale_ * (1.0 - std::exp(-a));
        case Form::Power: return scale_ * std::pow(a, param_);
        case Form::IncGammaTail:
            if (a == 0.0) return (param_ > 0.0) ? scale_ * std::tgamma(param_) : kInf;
            return scale_ * levymap::inc_gamma_tail(param_, a);
        case Form::Custom: return scale_ * custom_r_at_lo_;
        case Form::Tabulated: return scale_ * (*table_)(iv_.lo);
    }
    return 0.0;
}

double TimeChange::r_at_hi() const {
    if (!iv_.upper_infinite()) {
        if (form_ == Form::Custom) return scale_ * custom_r_at_hi_;
        return r(iv_.hi);
    }
    switch (form_) {
        case Form::Identity: return kInf;
        case Form::OneMinusExp: return scale_;
        case Form::Power: return kInf;
        case Form::IncGammaTail: return 0.0;
        case Form::Custom: return scale_ * custom_r_at_hi_;
        case Form::Tabulated: return r(iv_.hi);
    }
    return kInf;
}

double TimeChange::mass_upto(double t) const {
    if (t <= iv_.lo) return 0.0;
    const double at = std::min(t, iv_.hi);
    const double base = r_at_lo();
    if (std::isinf(base)) return kInf;
    return std::fabs(r(at) - base);
}

double TimeChange::mass_from(double t) const {
    if (t >= iv_.hi) return 0.0;
    const double top = r_at_hi();
    if (std::isinf(top)) return kInf;
    const double from = std::max(t, iv_.lo);
    const double at = (from == iv_.lo) ? r_at_lo() : r(from);
    if (std::isinf(at)) return kInf;
    return std::fabs(top - at);
}

double TimeChange::total_mass() const { return mass_from(iv_.lo); }

TimeChange TimeChange::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("time change scale must be > 0");
    TimeChange tc = *this;
    tc.scale_ *= factor;
    return tc;
}

std::string TimeChange::describe() const {
    std::string base;
    switch (form_) {
        case Form::Identity: base = "t"; break;
        case Form::OneMinusExp: base = "1-exp(-t)"; break;
        case Form::Power: base = "t^" + std::to_string(param_); break;
        case Form::IncGammaTail: base = "Gamma(" + std::to_string(param_) + ";t)"; break;
        case Form::Custom: base = label_; break;
        case Form::Tabulated: base = "tabulated"; break;
    }
    if (scale_ != 1.0) base = std::to_string(scale_) + "*" + base;
    return base;
}

// ---------------------------------------------------------------------------
// HalfLineMeasure

HalfLineMeasure HalfLineMeasure::density(std::function<double(double)> pdf, Interval support,
                                         double total_mass_hint,
                                         std::function<double(double)> cdf_fn,
                                         std::function<double(double)> tail_fn) {
    support.validate();
    DensityM d{std::move(pdf), support, total_mass_hint, std::move(cdf_fn), std::move(tail_fn)};
    return HalfLineMeasure(Variant(std::move(d)));
}

HalfLineMeasure HalfLineMeasure::atoms(std::vector<MeasureAtom> atoms) {
    for (const auto& a : atoms) {
        if (!(a.x > 0.0)) throw std::invalid_argument("atom location must be > 0");
        if (!(a.mass >= 0.0)) throw std::invalid_argument("atom mass must be >= 0");
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const MeasureAtom& a, const MeasureAtom& b) { return a.x < b.x; });
    return HalfLineMeasure(Variant(std::move(atoms)));
}

HalfLineMeasure HalfLineMeasure::from_time_change(TimeChange tc) {
    if (const auto* a = tc.atoms()) {
        std::vector<MeasureAtom> scaled = *a;
        for (auto& atom : scaled) atom.mass *= tc.scale();
        return atoms(std::move(scaled));
    }
    return HalfLineMeasure(Variant(ClockM{std::move(tc)}));
}

HalfLineMeasure HalfLineMeasure::mellin_product(HalfLineMeasure left, HalfLineMeasure right) {
    // two atomic factors multiply out exactly
    if (left.is_atomic() && right.is_atomic()) {
        std::vector<MeasureAtom> out;
        for (const auto& a : *left.atom_list()) {
            for (const auto& b : *right.atom_list()) {
                out.push_back({a.x * b.x, a.mass * b.mass});
            }
        }
        return atoms(std::move(out));
    }
    MellinM m{std::make_shared<const HalfLineMeasure>(std::move(left)),
              std::make_shared<const HalfLineMeasure>(std::move(right))};
    return HalfLineMeasure(Variant(std::move(m)));
}

bool HalfLineMeasure::is_atomic() const {
    return std::holds_alternative<std::vector<MeasureAtom>>(v_);
}

const std::vector<MeasureAtom>* HalfLineMeasure::atom_list() const {
    return std::get_if<std::vector<MeasureAtom>>(&v_);
}

const TimeChange* HalfLineMeasure::clock() const {
    if (const auto* c = std::get_if<ClockM>(&v_)) return &c->tc;
    return nullptr;
}

Interval HalfLineMeasure::support() const {
    if (const auto* d = std::get_if<DensityM>(&v_)) return d->supp;
    if (const auto* a = std::get_if<std::vector<MeasureAtom>>(&v_)) {
        if (a->empty()) return Interval{0.0, 0.0};
        return Interval{a->front().x * 0.999999, a->back().x};
    }
    if (const auto* c = std::get_if<ClockM>(&v_)) return c->tc.interval();
    const auto& m = std::get<MellinM>(v_);
    const Interval l = m.left->support();
    const Interval r = m.right->support();
    double hi = (std::isinf(l.hi) || std::isinf(r.hi)) ? kInf : l.hi * r.hi;
    return Interval{mul_bound(l.lo, r.lo), hi};
}

double HalfLineMeasure::density_at(double w, double tol) const {
    if (const auto* d = std::get_if<DensityM>(&v_)) {
        if (w <= d->supp.lo || w > d->supp.hi) return 0.0;
        return d->pdf(w);
    }
    if (std::holds_alternative<std::vector<MeasureAtom>>(v_)) {
        throw std::invalid_argument("atomic measure has no density");
    }
    if (const auto* c = std::get_if<ClockM>(&v_)) {
        const Interval iv = c->tc.interval();
        if (w <= iv.lo || w > iv.hi) return 0.0;
        return c->tc.clock_density(w);
    }
    const auto& m = std::get<MellinM>(v_);
    // integrate over the finite-mass side where possible, sum over an atomic side
    const HalfLineMeasure* mix = m.left.get();
    const HalfLineMeasure* eval = m.right.get();
    if (m.right->is_atomic() ||
        (!m.left->is_atomic() && std::isfinite(m.right->total_mass()) &&
         !std::isfinite(m.left->total_mass()))) {
        std::swap(mix, eval);
    }
    if (mix->is_atomic()) {
        double f = 0.0;
        for (const auto& a : *mix->atom_list()) {
            f += a.mass * eval->density_at(w / a.x, tol) / a.x;
        }
        return f;
    }
    const Interval ms = mix->support();
    const Interval es = eval->support();
    // need w/x in eval support and x in mix support
    double lo = ms.lo, hi = ms.hi;
    if (std::isfinite(es.hi) && es.hi > 0.0) lo = std::max(lo, w / es.hi);
    if (es.lo > 0.0) hi = std::min(hi, w / es.lo);
    if (!(hi > lo)) return 0.0;
    QuadOptions opts;
    opts.abs_tol = tol;
    opts.rel_tol = tol;
    auto f = [&](double x) { return mix->density_at(x, tol * 0.1) * eval->density_at(w / x, tol * 0.1) / x; };
    return integrate_interval(f, lo, hi, opts);
}

double HalfLineMeasure::cdf(double t, double tol) const {
    if (t <= 0.0) return 0.0;
    if (const auto* d = std::get_if<DensityM>(&v_)) {
        if (t <= d->supp.lo) return 0.0;
        double m;
        if (d->cdf_fn) {
            m = d->cdf_fn(std::min(t, d->supp.hi));
        } else {
            m = improper_mass(d->pdf, d->supp.lo, std::min(t, d->supp.hi), tol);
        }
        if (std::isinf(m)) throw InfiniteMass("cdf: infinite mass on (0,t]");
        return m;
    }
    if (const auto* a = std::get_if<std::vector<MeasureAtom>>(&v_)) {
        double s = 0.0;
        for (const auto& atom : *a) {
            if (atom.x <= t) s += atom.mass;
        }
        return s;
    }
    if (const auto* c = std::get_if<ClockM>(&v_)) {
        const double m = c->tc.mass_upto(t);
        if (std::isinf(m)) throw InfiniteMass("cdf: infinite clock mass on (0,t]");
        return m;
    }
    const auto& m = std::get<MellinM>(v_);
    const HalfLineMeasure* mix = m.left.get();
    const HalfLineMeasure* eval = m.right.get();
    if (m.right->is_atomic() ||
        (!m.left->is_atomic() && std::isfinite(m.right->total_mass()) &&
         !std::isfinite(m.left->total_mass()))) {
        std::swap(mix, eval);
    }
    if (mix->is_atomic()) {
        double s = 0.0;
        for (const auto& a : *mix->atom_list()) s += a.mass * eval->cdf(t / a.x, tol);
        return s;
    }
    auto f = [&](double x) { return mix->density_at(x, tol * 0.1) * eval->cdf(t / x, tol * 0.1); };
    const Interval ms = mix->support();
    const Interval es = eval->support();
    // eval.cdf(t/x) vanishes once t/x <= eval's lower support endpoint
    double hi = ms.hi;
    if (es.lo > 0.0) hi = std::min(hi, t / es.lo);
    if (!(hi > ms.lo)) return 0.0;
    const double val = improper_mass(f, ms.lo, hi, tol);
    if (std::isinf(val)) throw InfiniteMass("cdf: infinite mass on (0,t]");
    return val;
}

double HalfLineMeasure::tail(double t, double tol) const {
    if (const auto* d = std::get_if<DensityM>(&v_)) {
        const double lo = std::max(t, d->supp.lo);
        if (lo >= d->supp.hi) return 0.0;
        if (d->tail_fn) return d->tail_fn(lo);
        return improper_mass(d->pdf, lo, d->supp.hi, tol);
    }
    if (const auto* a = std::get_if<std::vector<MeasureAtom>>(&v_)) {
        double s = 0.0;
        for (const auto& atom : *a) {
            if (atom.x > t) s += atom.mass;
        }
        return s;
    }
    if (const auto* c = std::get_if<ClockM>(&v_)) return c->tc.mass_from(t);
    const auto& m = std::get<MellinM>(v_);
    const HalfLineMeasure* mix = m.left.get();
    const HalfLineMeasure* eval = m.right.get();
    if (m.right->is_atomic() ||
        (!m.left->is_atomic() && std::isfinite(m.right->total_mass()) &&
         !std::isfinite(m.left->total_mass()))) {
        std::swap(mix, eval);
    }
    if (mix->is_atomic()) {
        double s = 0.0;
        for (const auto& a : *mix->atom_list()) s += a.mass * eval->tail(t / a.x, tol);
        return s;
    }
    auto f = [&](double x) { return mix->density_at(x, tol * 0.1) * eval->tail(t / x, tol * 0.1); };
    const Interval ms = mix->support();
    const Interval es = eval->support();
    // eval.tail(t/x) vanishes once t/x >= eval's upper support endpoint
    double lo = ms.lo;
    if (std::isfinite(es.hi) && es.hi > 0.0) lo = std::max(lo, t / es.hi);
    if (!(ms.hi > lo)) return 0.0;
    return improper_mass(f, lo, ms.hi, tol);
}

double HalfLineMeasure::total_mass() const {
    if (const auto* d = std::get_if<DensityM>(&v_)) {
        if (d->mass >= 0.0) return d->mass;
        double m;
        try {
            m = improper_mass(d->pdf, d->supp.lo, d->supp.hi);
        } catch (const QuadratureFailure&) {
            m = kInf;
        }
        const_cast<DensityM*>(d)->mass = m;
        return m;
    }
    if (const auto* a = std::get_if<std::vector<MeasureAtom>>(&v_)) {
        double s = 0.0;
        for (const auto& atom : *a) s += atom.mass;
        return s;
    }
    if (const auto* c = std::get_if<ClockM>(&v_)) return c->tc.total_mass();
    const auto& m = std::get<MellinM>(v_);
    const double a = m.left->total_mass();
    const double b = m.right->total_mass();
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

double HalfLineMeasure::integrate(const std::function<double(double)>& g, double tol) const {
    if (const auto* d = std::get_if<DensityM>(&v_)) {
        QuadOptions opts;
        opts.abs_tol = tol;
        opts.rel_tol = tol;
        return integrate_interval([&](double x) { return g(x) * d->pdf(x); }, d->supp.lo,
                                  d->supp.hi, opts);
    }
    if (const auto* a = std::get_if<std::vector<MeasureAtom>>(&v_)) {
        double s = 0.0;
        for (const auto& atom : *a) s += atom.mass * g(atom.x);
        return s;
    }
    if (const auto* c = std::get_if<ClockM>(&v_)) {
        QuadOptions opts;
        opts.abs_tol = tol;
        opts.rel_tol = tol;
        const Interval iv = c->tc.interval();
        return integrate_interval([&](double t) { return g(t) * c->tc.clock_density(t); }, iv.lo,
                                  iv.hi, opts);
    }
    const auto& m = std::get<MellinM>(v_);
    return m.right->integrate(
        [&](double u) { return m.left->integrate([&](double x) { return g(x * u); }, tol * 0.1); },
        tol);
}

// ---------------------------------------------------------------------------
// ProductMeasure

ProductMeasure::ProductMeasure(std::vector<HalfLineMeasure> factors)
    : factors_(std::move(factors)) {
    if (factors_.empty()) throw std::invalid_argument("product measure needs >= 1 factor");
}

ProductMeasure product_measure(std::vector<HalfLineMeasure> factors) {
    return ProductMeasure(std::move(factors));
}

double ProductMeasure::integrate(const std::function<double(std::span<const double>)>& g,
                                 double tol) const {
    std::vector<double> args(factors_.size(), 0.0);
    std::function<double(std::size_t)> level = [&](std::size_t i) -> double {
        if (i == factors_.size()) return g(args);
        return factors_[i].integrate(
            [&](double t) {
                args[i] = t;
                return level(i + 1);
            },
            tol * std::pow(0.1, static_cast<double>(factors_.size() - i)));
    };
    return level(0);
}

double ProductMeasure::integrate_separable(const std::vector<std::function<double(double)>>& gs,
                                           double tol) const {
    if (gs.size() != factors_.size()) throw std::invalid_argument("separable integrand arity");
    double prod = 1.0;
    for (std::size_t i = 0; i < gs.size(); ++i) prod *= factors_[i].integrate(gs[i], tol);
    return prod;
}

double ProductMeasure::total_mass() const {
    double prod = 1.0;
    for (const auto& f : factors_) {
        const double m = f.total_mass();
        if (m == 0.0) return 0.0;
        prod *= m;
    }
    return prod;
}

// ---------------------------------------------------------------------------
// pushforward

namespace {

// one-dimensional exact image of m under kernel k restricted to m's support
HalfLineMeasure image_1d(const KernelFunction& k, const HalfLineMeasure& m) {
    if (!(k.scale() > 0.0)) throw DomainViolation("pushforward: image not positive");
    if (k.is_constant()) {
        const double mass = m.total_mass();
        if (!std::isfinite(mass)) throw InfiniteMass("constant kernel over infinite measure");
        return HalfLineMeasure::atoms({{k.scale(), mass}});
    }
    if (m.is_atomic()) {
        std::vector<MeasureAtom> out;
        for (const auto& a : *m.atom_list()) {
            const double w = k(a.x);
            if (!(w > 0.0)) throw DomainViolation("pushforward: image not positive");
            out.push_back({w, a.mass});
        }
        return HalfLineMeasure::atoms(std::move(out));
    }
    const Interval s = m.support();
    const double scale = k.scale();
    // image endpoints
    const double w1 = k(s.lo == 0.0 ? std::numeric_limits<double>::min() : s.lo);
    double w2;
    if (std::isinf(s.hi)) {
        switch (k.form()) {
            case KernelFunction::Form::ExpDecay: w2 = 0.0; break;
            case KernelFunction::Form::Identity:
            case KernelFunction::Form::Power: w2 = kInf; break;
            default: w2 = k(s.hi); break;
        }
    } else {
        w2 = k(s.hi);
    }
    double lo = std::min(w1, w2), hi = std::max(w1, w2);
    // open lower endpoints that the kernel maps to +inf (e.g. -log t at 0)
    if (s.lo == 0.0 && k.form() == KernelFunction::Form::NegLog) hi = kInf;
    if (s.lo == 0.0 &&
        (k.form() == KernelFunction::Form::Identity || k.form() == KernelFunction::Form::Power)) {
        lo = 0.0;
    }
    if (s.lo == 0.0 && k.form() == KernelFunction::Form::ExpDecay) hi = scale;
    if (s.lo == 0.0 && k.form() == KernelFunction::Form::OneMinusSqrtPow) hi = scale;
    if (!(lo >= 0.0)) throw DomainViolation("pushforward: image not positive");

    auto pdf = [k, m, scale](double w) {
        const double t = k.base_inverse(w / scale);
        return m.density_at(t) * k.base_inverse_derivative(w / scale) / scale;
    };
    // monotone change of variables carries cdf/tail across exactly; for a
    // decreasing kernel the roles swap
    bool increasing = true;
    switch (k.form()) {
        case KernelFunction::Form::ExpDecay:
        case KernelFunction::Form::NegLog:
        case KernelFunction::Form::OneMinusSqrtPow:
            increasing = false;
            break;
        default:
            break;
    }
    auto at_preimage = [k, scale](double w) { return k.base_inverse(w / scale); };
    // cdf() throws on infinite mass while tail() returns +inf; translate at the
    // seam so both conventions survive the swap under a decreasing kernel
    auto cdf_or_inf = [m](double t) {
        try {
            return m.cdf(t);
        } catch (const InfiniteMass&) {
            return kInf;
        }
    };
    std::function<double(double)> cdf_fn, tail_fn;
    if (increasing) {
        cdf_fn = [cdf_or_inf, at_preimage](double w) { return cdf_or_inf(at_preimage(w)); };
        tail_fn = [m, at_preimage](double w) { return m.tail(at_preimage(w)); };
    } else {
        cdf_fn = [m, at_preimage](double w) { return m.tail(at_preimage(w)); };
        tail_fn = [cdf_or_inf, at_preimage](double w) { return cdf_or_inf(at_preimage(w)); };
    }
    const double tm = m.total_mass();
    return HalfLineMeasure::density(pdf, Interval{lo, hi}, tm, std::move(cdf_fn),
                                    std::move(tail_fn));
}

struct FactorView {
    KernelFunction::Form kf;
    double kp;
    TimeChange::Form tf;
    double tp;
    Interval iv;

    // kernel exponent when the kernel is t^p (Identity counts as p = 1)
    double power_exponent() const {
        if (kf == KernelFunction::Form::Identity) return 1.0;
        if (kf == KernelFunction::Form::Power) return kp;
        return std::numeric_limits<double>::quiet_NaN();
    }
    bool on_unit_interval() const { return iv.lo == 0.0 && iv.hi == 1.0; }
    bool on_half_line() const { return iv.lo == 0.0 && std::isinf(iv.hi); }
    bool lebesgue_clock() const { return tf == TimeChange::Form::Identity; }
};

std::optional<FactorView> view_of(const KernelFunction& k, const HalfLineMeasure& m) {
    const TimeChange* tc = m.clock();
    if (tc == nullptr) return std::nullopt;
    if (k.scale() != 1.0 || tc->scale() != 1.0) return std::nullopt;
    return FactorView{k.form(), k.form_param(), tc->form(), tc->form_param(), tc->interval()};
}

std::optional<CatalogImage> match_pair(const FactorView& x, const FactorView& y) {
    using KF = KernelFunction::Form;
    using TF = TimeChange::Form;
    // Kexp followed by the selfdecomposability map: image e^{-w}/w on (0,inf)
    if (x.kf == KF::Identity && x.tf == TF::OneMinusExp && x.on_half_line() &&
        y.kf == KF::ExpDecay && y.lebesgue_clock() && y.on_half_line()) {
        TimeChange tc = TimeChange::inc_gamma_tail(0.0, Interval{0.0, kInf});
        return CatalogImage{HalfLineMeasure::from_time_change(tc), tc, "exp-over-w"};
    }
    // t^{1/beta} map after the selfdecomposability map: (1-w^beta)/w on (0,1]
    {
        const double p = x.power_exponent();
        if (p > 0.0 && x.lebesgue_clock() && x.on_unit_interval() && y.kf == KF::ExpDecay &&
            y.lebesgue_clock() && y.on_half_line()) {
            const double beta = 1.0 / p;
            TimeChange tc = TimeChange::custom(
                [beta](double w) { return std::pow(w, beta) / beta - std::log(w) - 1.0 / beta; },
                [beta](double w) { return (1.0 - std::pow(w, beta)) / w; },
                Direction::NonIncreasing, Interval{0.0, 1.0}, kInf,
                std::numeric_limits<double>::quiet_NaN(), "power-log");
            return CatalogImage{HalfLineMeasure::from_time_change(tc), tc, "power-log"};
        }
    }
    // incomplete-gamma clock after the selfdecomposability map: Gamma(alpha;w)/w
    if (x.kf == KF::Identity && x.tf == TF::IncGammaTail && x.on_half_line() &&
        y.kf == KF::ExpDecay && y.lebesgue_clock() && y.on_half_line()) {
        const double alpha = x.tp;
        TimeChange tc = TimeChange::custom(
            [alpha](double w) { return example4_time_change(alpha, w); },
            [alpha](double w) { return inc_gamma_tail(alpha, w) / w; }, Direction::NonIncreasing,
            Interval{0.0, kInf}, kInf, 0.0, "gamma-tail-over-w");
        return CatalogImage{HalfLineMeasure::from_time_change(tc), tc, "gamma-tail-over-w"};
    }
    // pair of power maps on (0,1] with exponents (1/beta, 1/(2 beta))
    {
        const double px = x.power_exponent();
        const double py = y.power_exponent();
        if (px > 0.0 && py > 0.0 && x.lebesgue_clock() && y.lebesgue_clock() &&
            x.on_unit_interval() && y.on_unit_interval() &&
            std::fabs(px - 2.0 * py) < 1e-14 * std::max(1.0, px)) {
            const double beta = 1.0 / px;
            TimeChange tc = TimeChange::custom(
                [beta](double w) {
                    const double wb = std::pow(w, beta);
                    return wb * (2.0 - wb);
                },
                [beta](double w) {
                    const double wb = std::pow(w, beta);
                    return 2.0 * beta * wb / w * (1.0 - wb);
                },
                Direction::NonDecreasing, Interval{0.0, 1.0}, 0.0,
                std::numeric_limits<double>::quiet_NaN(), "double-power");
            return CatalogImage{HalfLineMeasure::from_time_change(tc), tc, "double-power"};
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<CatalogImage> pushforward_catalog(std::span<const KernelFunction> kernels,
                                                std::span<const HalfLineMeasure> measures) {
    if (kernels.size() != 2 || measures.size() != 2) return std::nullopt;
    auto a = view_of(kernels[0], measures[0]);
    auto b = view_of(kernels[1], measures[1]);
    if (!a || !b) return std::nullopt;
    if (auto hit = match_pair(*a, *b)) return hit;
    return match_pair(*b, *a);
}

HalfLineMeasure pushforward(std::span<const KernelFunction> kernels,
                            std::span<const HalfLineMeasure> measures,
                            const PushforwardOptions& opts) {
    if (kernels.size() != measures.size() || kernels.empty()) {
        throw std::invalid_argument("pushforward: kernel/measure arity mismatch");
    }
    if (opts.use_catalog) {
        if (auto hit = pushforward_catalog(kernels, measures)) return hit->measure;
    }
    HalfLineMeasure acc = image_1d(kernels[0], measures[0]);
    for (std::size_t i = 1; i < kernels.size(); ++i) {
        acc = HalfLineMeasure::mellin_product(std::move(acc), image_1d(kernels[i], measures[i]));
    }
    return acc;
}

double cdf(const HalfLineMeasure& m, double t) { return m.cdf(t); }
double tail_mass(const HalfLineMeasure& m, double t) { return m.tail(t); }

// ---------------------------------------------------------------------------
// ClockLaw / product_time_change

ClockLaw ClockLaw::point(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("point clock law needs c > 0");
    ClockLaw l;
    l.kind_ = Kind::Point;
    l.param_ = c;
    return l;
}

ClockLaw ClockLaw::uniform01() {
    ClockLaw l;
    l.kind_ = Kind::Uniform;
    return l;
}

ClockLaw ClockLaw::exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential clock law needs rate > 0");
    ClockLaw l;
    l.kind_ = Kind::Exponential;
    l.param_ = rate;
    return l;
}

double ClockLaw::sample(std::uint64_t& state) const {
    state = splitmix64(state);
    const double u = static_cast<double>(state >> 11) * 0x1.0p-53;  // [0,1)
    switch (kind_) {
        case Kind::Point:
            return param_;
        case Kind::Uniform:
            return 1.0 - u;  // (0,1]
        case Kind::Exponential:
            return -std::log(1.0 - u) / param_;
    }
    return param_;
}

HalfLineMeasure ClockLaw::as_measure() const {
    switch (kind_) {
        case Kind::Point:
            return HalfLineMeasure::atoms({{param_, 1.0}});
        case Kind::Uniform:
            return HalfLineMeasure::density([](double) { return 1.0; }, Interval{0.0, 1.0}, 1.0,
                                            [](double t) { return t; },
                                            [](double t) { return 1.0 - t; });
        case Kind::Exponential: {
            const double rate = param_;
            return HalfLineMeasure::density([rate](double x) { return rate * std::exp(-rate * x); },
                                            Interval{0.0, kInf}, 1.0,
                                            [rate](double t) { return -std::expm1(-rate * t); },
                                            [rate](double t) { return std::exp(-rate * t); });
        }
    }
    return HalfLineMeasure::atoms({{param_, 1.0}});
}

ProductTimeChangeResult product_time_change(std::span<const ClockLaw> laws,
                                            std::span<const KernelFunction> kernels,
                                            std::size_t n_samples, std::uint64_t seed) {
    if (laws.size() != kernels.size() || laws.empty()) {
        throw std::invalid_argument("product_time_change: arity mismatch");
    }
    if (n_samples < 2) throw std::invalid_argument("product_time_change: need >= 2 samples");

    std::vector<double> samples(n_samples);
    std::uint64_t state = seed ^ 0x5851f42d4c957f2dULL;
    for (std::size_t i = 0; i < n_samples; ++i) {
        double prod = 1.0;
        for (std::size_t j = 0; j < laws.size(); ++j) prod *= kernels[j](laws[j].sample(state));
        samples[i] = prod;
    }
    std::sort(samples.begin(), samples.end());

    // quadrature CDF of the image measure
    std::vector<HalfLineMeasure> measures;
    measures.reserve(laws.size());
    for (const auto& l : laws) measures.push_back(l.as_measure());
    PushforwardOptions opts;
    opts.use_catalog = false;
    HalfLineMeasure image = pushforward(kernels, measures, opts);
    auto image_ptr = std::make_shared<HalfLineMeasure>(std::move(image));

    std::function<double(double)> quad_cdf;
    if (image_ptr->is_atomic()) {
        quad_cdf = [image_ptr](double t) { return image_ptr->cdf(t); };
    } else {
        // tabulate F on a quantile-spread grid, then interpolate
        const std::size_t grid_n = std::min<std::size_t>(1025, n_samples);
        std::vector<double> xs, ys;
        xs.reserve(grid_n + 2);
        double last = -kInf;
        for (std::size_t g = 0; g < grid_n; ++g) {
            const std::size_t idx = (g * (n_samples - 1)) / (grid_n - 1);
            const double x = samples[idx];
            if (x > last) {
                xs.push_back(x);
                last = x;
            }
        }
        if (xs.size() < 2) {
            quad_cdf = [image_ptr](double t) { return image_ptr->cdf(t); };
        } else {
            ys.reserve(xs.size());
            for (double x : xs) ys.push_back(image_ptr->cdf(x, 1e-9));
            auto interp = std::make_shared<PchipInterpolant>(xs, ys);
            const double xmin = xs.front(), xmax = xs.back();
            const double ymin = ys.front(), ymax = ys.back();
            quad_cdf = [image_ptr, interp, xmin, xmax, ymin, ymax](double t) {
                if (t <= xmin) return (t == xmin) ? ymin : image_ptr->cdf(t, 1e-9);
                if (t >= xmax) return (t == xmax) ? ymax : image_ptr->cdf(t, 1e-9);
                return (*interp)(t);
            };
        }
    }

    // exact KS distance between the ECDF and quad_cdf over the sample set
    double ks = 0.0;
    const double n = static_cast<double>(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double F = quad_cdf(samples[i]);
        ks = std::max(ks, std::fabs(F - static_cast<double>(i + 1) / n));
        ks = std::max(ks, std::fabs(F - static_cast<double>(i) / n));
    }

    // monotone tabulated estimate of r(t) = P[product <= t]
    const std::size_t nodes_n = std::min<std::size_t>(1025, n_samples);
    std::vector<double> xs, ys;
    double last = -kInf;
    for (std::size_t g = 0; g < nodes_n; ++g) {
        const std::size_t idx = (g * (n_samples - 1)) / (nodes_n - 1);
        if (samples[idx] > last) {
            xs.push_back(samples[idx]);
            ys.push_back(static_cast<double>(idx + 1) / n);
            last = samples[idx];
        }
    }
    ProductTimeChangeResult out{
        xs.size() >= 2
            ? TimeChange::tabulated(PchipInterpolant(xs, ys), Direction::NonDecreasing)
            : TimeChange::custom([v = samples.front()](double t) { return t >= v ? 1.0 : 0.0; },
                                 [](double) { return 0.0; }, Direction::NonDecreasing,
                                 Interval{samples.front() * 0.5, samples.back() + 1.0}, 0.0,
                                 1.0, "mc-step"),
        std::move(samples), std::move(quad_cdf), ks};
    return out;
}

}  // namespace levymap
