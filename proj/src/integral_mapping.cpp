#include "integral_mapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "quadrature.hpp"

namespace levymap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double direction_sign(const TimeChange& tc) {
    return tc.direction() == Direction::NonIncreasing ? -1.0 : 1.0;
}

bool kernel_decreasing(const KernelFunction& k) {
    switch (k.form()) {
        case KernelFunction::Form::ExpDecay:
        case KernelFunction::Form::NegLog:
        case KernelFunction::Form::OneMinusSqrtPow:
            return true;
        default:
            return false;
    }
}

}  // namespace

std::string MappingSpec::describe() const {
    std::string s = "I^{" + kernel.describe() + ", " + time_change.describe() + "}_(" +
                    std::to_string(interval().lo) + "," +
                    (interval().upper_infinite() ? std::string("inf") : std::to_string(interval().hi)) +
                    "]";
    if (negate_input) s += " on reflected law";
    return s;
}

MappingSpec identity_mapping() {
    return MappingSpec{KernelFunction::constant(), TimeChange::identity(Interval{0.0, 1.0}), false,
                       "identity"};
}

LevyExponent apply(const MappingSpec& spec, const LevyExponent& e, const ApplyOptions& opts) {
    const LevyExponent input = spec.negate_input ? negate_law(e) : e;
    const double sign = direction_sign(spec.time_change);
    const KernelFunction kernel = spec.kernel;
    const TimeChange tc = spec.time_change;
    const Interval iv = tc.interval();
    const double tol = opts.tol;

    auto eval = [input, sign, kernel, tc, iv, tol](double y) {
        std::complex<double> total = 0.0;
        if (const auto* atoms = tc.atoms()) {
            for (const auto& a : *atoms) total += a.mass * tc.scale() * input(sign * kernel(a.x) * y);
            return total;
        }
        QuadOptions q;
        q.abs_tol = tol;
        q.rel_tol = tol;
        auto integrand = [&](double t) {
            return input(sign * kernel(t) * y) * tc.clock_density(t);
        };
        return total + integrate_interval_complex(integrand, iv.lo, iv.hi, q);
    };

    std::vector<std::string> chain = e.chain();
    chain.push_back(spec.name.empty() ? spec.describe() : spec.name);
    return LevyExponent::transformed(std::move(eval), std::move(chain), e.source_triple());
}

MappingSpec compose(std::span<const MappingSpec> specs, const ComposeOptions& opts) {
    if (specs.empty()) throw std::invalid_argument("compose: empty mapping list");
    if (specs.size() == 1) return specs[0];

    // strip signs: each factor contributes sign(kernel scale) * dir * negate
    double parity = 1.0;
    std::vector<KernelFunction> kernels;
    std::vector<HalfLineMeasure> clocks;
    std::string name = "compose(";
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const MappingSpec& s = specs[i];
        double ks = s.kernel.scale();
        if (ks < 0.0) {
            parity = -parity;
            ks = -ks;
        }
        parity *= direction_sign(s.time_change);
        if (s.negate_input) parity = -parity;
        kernels.push_back(s.kernel.scaled(ks / s.kernel.scale()));  // |scale|
        clocks.push_back(HalfLineMeasure::from_time_change(s.time_change));
        name += (s.name.empty() ? s.describe() : s.name);
        name += (i + 1 < specs.size()) ? ", " : ")";
    }

    // image measure of the product clock under the tensor kernel
    std::optional<CatalogImage> catalog;
    if (opts.use_catalog) catalog = pushforward_catalog(kernels, clocks);

    TimeChange composed_tc = TimeChange::identity(Interval{0.0, 1.0});  // placeholder
    if (catalog) {
        composed_tc = catalog->time_change;
    } else {
        PushforwardOptions popts;
        popts.use_catalog = false;
        popts.tol = opts.tol;
        HalfLineMeasure image = pushforward(kernels, clocks, popts);
        const Interval supp = image.support();
        const double total = image.total_mass();

        if (image.is_atomic()) {
            composed_tc = TimeChange::steps(*image.atom_list());
        } else if (std::isfinite(total) && std::isfinite(supp.hi)) {
            // tabulate the density, refine until the interpolated mass matches
            auto image_ptr = std::make_shared<HalfLineMeasure>(std::move(image));
            const double lo = supp.lo, hi = supp.hi;
            int n = 1025;
            std::shared_ptr<PchipInterpolant> interp;
            const bool log_spaced = (lo == 0.0) || (hi / std::max(lo, 1e-300) > 1e3);
            const double eff_lo = (lo == 0.0) ? hi * 1e-9 : lo;
            while (true) {
                std::vector<double> xs(n), ys(n);
                for (int i = 0; i < n; ++i) {
                    const double f = static_cast<double>(i) / (n - 1);
                    xs[i] = log_spaced ? eff_lo * std::pow(hi / eff_lo, f)
                                       : eff_lo + (hi - eff_lo) * f;
                    ys[i] = image_ptr->density_at(xs[i], opts.tol);
                }
                interp = std::make_shared<PchipInterpolant>(xs, ys);
                const double head = image_ptr->cdf(eff_lo, opts.tol);
                const double interp_mass = head + interp->integral_from_left(hi);
                const bool mass_ok =
                    std::fabs(interp_mass - total) <= opts.mass_tol * std::max(1.0, total);
                // spot-check the interpolant against the exact density off-node
                double interp_err = 0.0;
                for (int k = 1; k < 32; ++k) {
                    const int i = (k * (n - 1)) / 32;
                    const double mid = 0.5 * (xs[i] + xs[i + 1]);
                    const double exact = image_ptr->density_at(mid, opts.tol);
                    interp_err = std::max(interp_err,
                                          std::fabs((*interp)(mid) - exact) /
                                              std::max(1.0, std::fabs(exact)));
                }
                if ((mass_ok && interp_err <= 1e-8) || n >= opts.max_table_nodes) break;
                n = 2 * n - 1;
            }
            auto r_fn = [image_ptr, interp, eff_lo](double t) {
                if (t <= eff_lo) return image_ptr->cdf(t);
                return image_ptr->cdf(eff_lo) + interp->integral_from_left(t);
            };
            auto d_fn = [interp, eff_lo](double t) {
                return (t < eff_lo) ? 0.0 : (*interp)(t);
            };
            composed_tc = TimeChange::custom(r_fn, d_fn, Direction::NonDecreasing,
                                             Interval{lo, hi}, 0.0,
                                             std::numeric_limits<double>::quiet_NaN(), "tabulated");
        } else {
            // infinite-mass or unbounded image: keep lazy exact closures
            auto image_ptr = std::make_shared<HalfLineMeasure>(std::move(image));
            bool lo_infinite_mass = false;
            const double probe = std::isfinite(supp.hi) ? 0.5 * (supp.lo + supp.hi)
                                                        : std::max(1.0, 2.0 * supp.lo);
            try {
                image_ptr->cdf(probe, 1e-6);
            } catch (const InfiniteMass&) {
                lo_infinite_mass = true;
            }
            const double tol = opts.tol;
            auto d_fn = [image_ptr, tol](double t) { return image_ptr->density_at(t, tol); };
            if (lo_infinite_mass) {
                auto r_fn = [image_ptr, tol](double t) { return image_ptr->tail(t, tol); };
                composed_tc = TimeChange::custom(r_fn, d_fn, Direction::NonIncreasing, supp, kInf,
                                                 0.0, "lazy-tail");
            } else {
                auto r_fn = [image_ptr, tol](double t) { return image_ptr->cdf(t, tol); };
                composed_tc = TimeChange::custom(r_fn, d_fn, Direction::NonDecreasing, supp, 0.0,
                                                 kInf, "lazy-cdf");
            }
        }
    }

    // Eq. (9) inserts one extra sign flip for the tail representation
    const bool tail_rep = composed_tc.direction() == Direction::NonIncreasing;
    const bool negate = tail_rep ? (parity > 0.0) : (parity < 0.0);
    return MappingSpec{KernelFunction::identity(), composed_tc, negate, name};
}

DomainReport domain_check(const MappingSpec& spec, const LevyExponent& e) {
    DomainReport rep;
    const LevyExponent input = spec.negate_input ? negate_law(e) : e;
    const double sign = direction_sign(spec.time_change);
    const Interval iv = spec.time_change.interval();
    const double probe_y[3] = {0.1, 1.0, 10.0};

    rep.log_moment_required =
        iv.upper_infinite() && spec.kernel.form() == KernelFunction::Form::ExpDecay;
    if (auto src = e.source_triple()) {
        switch (src->spectral.log_moment()) {
            case LogMoment::Finite:
                rep.log_moment_holds = true;
                break;
            case LogMoment::Infinite:
                rep.log_moment_holds = false;
                break;
            case LogMoment::Undecidable:
                rep.log_moment_holds = std::nullopt;
                rep.notes += "log-moment quadrature inconclusive; ";
                break;
        }
    }

    QuadOptions q;
    q.abs_tol = 1e-10;
    q.rel_tol = 1e-10;
    const double tol_div = 1e-8;
    // exp-decay kernels underflow beyond t ~ 700; cap expansion there
    const int max_doublings =
        spec.kernel.form() == KernelFunction::Form::ExpDecay ? 9 : 24;

    rep.finiteness = true;
    for (double y : probe_y) {
        auto g = [&](double t) {
            return std::abs(input(sign * spec.kernel(t) * y)) * spec.time_change.clock_density(t);
        };
        const double anchor = iv.upper_infinite() ? std::max(2.0 * iv.lo, iv.lo + 1.0) : iv.hi;
        bool ok = true;
        // left endpoint: geometric shrink
        {
            double prev = anchor;
            bool settled = false;
            double last_inc = kInf;
            for (int k = 0; k < 48; ++k) {
                const double cut = iv.lo + (prev - iv.lo) * 0.25;
                double inc;
                try {
                    inc = integrate(g, cut, prev, q);
                } catch (const QuadratureFailure&) {
                    ok = false;
                    break;
                }
                if (std::fabs(inc) < tol_div) {
                    settled = true;
                    break;
                }
                if (k > 6 && inc >= last_inc) {
                    ok = false;
                    break;
                }
                last_inc = inc;
                prev = cut;
            }
            if (!settled) ok = false;
        }
        // upper endpoint: doubling when improper
        if (ok && iv.upper_infinite()) {
            double T = anchor;
            bool settled = false;
            double last_inc = kInf;
            for (int k = 0; k < max_doublings; ++k) {
                double inc;
                try {
                    inc = integrate(g, T, 2.0 * T, q);
                } catch (const QuadratureFailure&) {
                    ok = false;
                    break;
                }
                if (std::fabs(inc) < tol_div) {
                    settled = true;
                    break;
                }
                if (k > 3 && inc >= 0.5 * last_inc) {
                    // increments not collapsing geometrically: treat as divergent
                    ok = false;
                    break;
                }
                last_inc = inc;
                T *= 2.0;
            }
            if (!settled) ok = false;
        }
        if (!ok) {
            rep.finiteness = false;
            rep.notes += "probe integral diverged at y=" + std::to_string(y) + "; ";
            break;
        }
    }
    return rep;
}

double verify_homomorphism(const MappingSpec& spec, const LevyExponent& e1, const LevyExponent& e2,
                           std::span<const double> grid) {
    const LevyExponent sum = convolve(e1, e2);
    const LevyExponent lhs = apply(spec, sum);
    const LevyExponent r1 = apply(spec, e1);
    const LevyExponent r2 = apply(spec, e2);
    double err = 0.0;
    for (double y : grid) err = std::max(err, std::abs(lhs(y) - r1(y) - r2(y)));
    return err;
}

double verify_conv_power(const MappingSpec& spec, const LevyExponent& e, double s,
                         std::span<const double> grid) {
    if (!(s > 0.0)) throw std::invalid_argument("verify_conv_power: s must be > 0");
    const LevyExponent a = apply(spec, conv_power(e, s));
    const LevyExponent b = conv_power(apply(spec, e), s);
    MappingSpec scaled = spec;
    scaled.time_change = spec.time_change.scaled(s);
    const LevyExponent c = apply(scaled, e);
    double err = 0.0;
    for (double y : grid) {
        const auto va = a(y), vb = b(y), vc = c(y);
        err = std::max({err, std::abs(va - vb), std::abs(va - vc), std::abs(vb - vc)});
    }
    return err;
}

double verify_dilation(const MappingSpec& spec, const LevyExponent& e, double u,
                       std::span<const double> grid) {
    if (u == 0.0) throw std::invalid_argument("verify_dilation: u must be nonzero");
    const LevyExponent a = dilate(apply(spec, e), u);
    const LevyExponent b = apply(spec, dilate(e, u));
    MappingSpec scaled = spec;
    scaled.kernel = spec.kernel.scaled(u);
    const LevyExponent c = apply(scaled, e);
    double err = 0.0;
    for (double y : grid) {
        const auto va = a(y), vb = b(y), vc = c(y);
        err = std::max({err, std::abs(va - vb), std::abs(va - vc), std::abs(vb - vc)});
    }
    return err;
}

LevyTriple transform_triple(const MappingSpec& spec, const LevyTriple& t) {
    LevyTriple in = t;
    if (spec.negate_input) {
        in.shift = -in.shift;
        in.spectral = in.spectral.reflected();
    }
    const std::vector<SpectralAtom>* atoms = nullptr;
    if (!in.spectral.is_zero()) {
        atoms = std::get_if<std::vector<SpectralAtom>>(&in.spectral.variant());
        if (atoms == nullptr) {
            throw UnsupportedFamily(
                "transform_triple supports pure-Gaussian and compound-Poisson triples");
        }
    }

    const double sigma = direction_sign(spec.time_change) * spec.kernel.scale();
    const KernelFunction kernel = spec.kernel;
    const TimeChange tc = spec.time_change;
    const Interval iv = tc.interval();

    QuadOptions q;
    q.abs_tol = 1e-12;
    q.rel_tol = 1e-12;
    auto clock_int = [&](const std::function<double(double)>& f) {
        return integrate_interval([&](double s) { return f(s) * tc.clock_density(s); }, iv.lo,
                                  iv.hi, q);
    };
    const double i1 = sigma * clock_int([&](double s) { return kernel.base(s); });
    const double i2 = sigma * sigma * clock_int([&](double s) {
        const double b = kernel.base(s);
        return b * b;
    });
    if (!std::isfinite(i1) || !std::isfinite(i2)) {
        throw UnsupportedFamily("transform_triple: kernel moments diverge for this mapping");
    }

    // plain (uncompensated) drift of the input
    double z0 = in.shift;
    if (atoms != nullptr) {
        for (const auto& a : *atoms) {
            if (std::fabs(a.x) <= 1.0) z0 -= a.x * a.mass;
        }
    }

    double z_prime = z0 * i1;
    const double gauss_prime = in.gauss_var * i2;

    SpectralMeasure spectral_out = SpectralMeasure::zero();
    if (atoms != nullptr && !atoms->empty()) {
        if (kernel.is_constant()) {
            const double mass_scale = tc.total_mass();
            if (!std::isfinite(mass_scale)) {
                throw UnsupportedFamily("constant kernel over infinite clock measure");
            }
            std::vector<SpectralAtom> out;
            for (const auto& a : *atoms) out.push_back({sigma * a.x, a.mass * mass_scale});
            for (const auto& a : out) {
                if (std::fabs(a.x) <= 1.0) z_prime += a.x * a.mass;
            }
            spectral_out = SpectralMeasure::atoms(std::move(out));
        } else {
            std::vector<DensityPiece> pieces;
            for (const auto& a : *atoms) {
                const double c = sigma * a.x;            // signed multiplier of base(t)
                const double ac = std::fabs(c);
                const double mass = a.mass;
                // image of the clock under t -> |c| base(t), on the positive axis
                auto pos_pdf = [kernel, tc, ac, mass](double v) {
                    const double s = kernel.base_inverse(v / ac);
                    return mass * tc.clock_density(s) * kernel.base_inverse_derivative(v / ac) / ac;
                };
                // positive-axis support of |c| base over the interval
                double b_lo = kernel.base(iv.lo == 0.0 ? std::numeric_limits<double>::min() : iv.lo);
                double b_hi;
                if (iv.upper_infinite()) {
                    b_hi = kernel_decreasing(kernel) ? 0.0 : kInf;
                } else {
                    b_hi = kernel.base(iv.hi);
                }
                if (iv.lo == 0.0 && kernel.form() == KernelFunction::Form::NegLog) b_lo = kInf;
                double lo = ac * std::min(b_lo, b_hi);
                double hi = ac * std::max(b_lo, b_hi);
                if (c > 0.0) {
                    pieces.push_back({lo, hi, pos_pdf});
                } else {
                    pieces.push_back({-hi, -lo, [pos_pdf](double u) { return pos_pdf(-u); }});
                }
                // compensator of the transformed jumps: c int base 1{|c| base <= 1} drho
                auto clipped = [&](double s) {
                    const double b = kernel.base(s);
                    return (ac * b <= 1.0) ? b : 0.0;
                };
                z_prime += c * clock_int(clipped);
            }
            spectral_out = SpectralMeasure::custom(std::move(pieces));
        }
    }

    LevyTriple out;
    out.shift = z_prime;
    out.gauss_var = gauss_prime;
    out.spectral = std::move(spectral_out);
    return out;
}

}  // namespace levymap
