#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace levymap {
namespace {

// 15-point Kronrod nodes on [-1,1] (odd-indexed entries are the embedded G7 nodes)
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename T>
double absval(const T& v) {
    if constexpr (std::is_same_v<T, double>) {
        return std::fabs(v);
    } else {
        return std::abs(v);
    }
}

template <typename T>
struct Panel {
    double a, b;
    T value;
    double err;
};

// single G7/K15 pass over (a,b); returns K15 value and |K15-G7| based error
template <typename T>
Panel<T> kronrod_panel(const std::function<T(double)>& f, double a, double b, bool& bad) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T fc = f(c);
    if (!std::isfinite(absval(fc))) bad = true;
    T result_k = kWgk[7] * fc;
    T result_g = kWg[3] * fc;
    double resabs = kWgk[7] * absval(fc);
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        T f1 = f(c - dx);
        T f2 = f(c + dx);
        if (!std::isfinite(absval(f1)) || !std::isfinite(absval(f2))) bad = true;
        result_k += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (absval(f1) + absval(f2));
        if (j % 2 == 1) result_g += kWg[j / 2] * (f1 + f2);
    }
    Panel<T> p;
    p.a = a;
    p.b = b;
    p.value = h * result_k;
    double diff = absval(result_k - result_g) * h;
    // standard scaled error estimate; sharpens the raw |K-G| difference
    double scale = resabs * h;
    p.err = diff;
    if (scale > 0.0 && diff > 0.0) {
        double r = std::pow(200.0 * diff / scale, 1.5);
        if (r < 1.0) p.err = scale * r;
    }
    return p;
}

template <typename T>
T adaptive(const std::function<T(double)>& f, double a, double b, const QuadOptions& opts) {
    if (!(b > a)) return T{};
    struct Cmp {
        bool operator()(const Panel<T>& x, const Panel<T>& y) const { return x.err < y.err; }
    };
    std::priority_queue<Panel<T>, std::vector<Panel<T>>, Cmp> queue;
    T total{};
    double total_err = 0.0;
    bool bad = false;

    auto push = [&](double lo, double hi) {
        Panel<T> p = kronrod_panel<T>(f, lo, hi, bad);
        total += p.value;
        total_err += p.err;
        queue.push(p);
    };

    if (opts.endpoint_seed) {
        // uneven initial split biased toward the endpoints
        const double len = b - a;
        const double cuts[3] = {a + len / 128.0, a + 0.5 * len, b - len / 128.0};
        push(a, cuts[0]);
        push(cuts[0], cuts[1]);
        push(cuts[1], cuts[2]);
        push(cuts[2], b);
    } else {
        push(a, b);
    }

    int panels = opts.endpoint_seed ? 4 : 1;
    while (true) {
        if (bad) {
            throw QuadratureFailure("non-finite integrand value", std::real(std::complex<double>(total)),
                                    std::imag(std::complex<double>(total)), total_err);
        }
        const double target = std::max(opts.abs_tol, opts.rel_tol * absval(total));
        if (total_err <= target) break;
        if (panels >= opts.max_panels) {
            throw QuadratureFailure("quadrature budget exhausted",
                                    std::real(std::complex<double>(total)),
                                    std::imag(std::complex<double>(total)), total_err);
        }
        Panel<T> worst = queue.top();
        queue.pop();
        total -= worst.value;
        total_err -= worst.err;
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // interval no longer splittable in doubles; accept its estimate
            total += worst.value;
            continue;
        }
        push(worst.a, mid);
        push(mid, worst.b);
        ++panels;
    }
    // one clean re-accumulation avoids drift from the +=/-= bookkeeping
    std::vector<Panel<T>> rest;
    rest.reserve(queue.size());
    while (!queue.empty()) {
        rest.push_back(queue.top());
        queue.pop();
    }
    std::sort(rest.begin(), rest.end(), [](const Panel<T>& x, const Panel<T>& y) {
        return x.a < y.a;
    });
    T sum{};
    for (const auto& p : rest) sum += p.value;
    return sum;
}

template <typename T>
T upper_inf(const std::function<T(double)>& f, double a, const QuadOptions& opts) {
    // t = a - log u maps (0,1] to [a, inf); dt = -du/u
    auto g = [&](double u) { return f(a - std::log(u)) / u; };
    return adaptive<T>(g, 0.0, 1.0, opts);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opts) {
    return adaptive<double>(f, a, b, opts);
}

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b, const QuadOptions& opts) {
    return adaptive<std::complex<double>>(f, a, b, opts);
}

double integrate_upper_inf(const std::function<double(double)>& f, double a,
                           const QuadOptions& opts) {
    return upper_inf<double>(f, a, opts);
}

std::complex<double> integrate_upper_inf_complex(
    const std::function<std::complex<double>(double)>& f, double a, const QuadOptions& opts) {
    return upper_inf<std::complex<double>>(f, a, opts);
}

double integrate_lower_inf(const std::function<double(double)>& f, double b,
                           const QuadOptions& opts) {
    return integrate_upper_inf([&](double t) { return f(-t); }, -b, opts);
}

std::complex<double> integrate_lower_inf_complex(
    const std::function<std::complex<double>(double)>& f, double b, const QuadOptions& opts) {
    return integrate_upper_inf_complex([&](double t) { return f(-t); }, -b, opts);
}

double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          const QuadOptions& opts) {
    const bool lo_inf = std::isinf(a);
    const bool hi_inf = std::isinf(b);
    if (!lo_inf && !hi_inf) return integrate(f, a, b, opts);
    if (lo_inf && hi_inf) {
        return integrate_lower_inf(f, 0.0, opts) + integrate_upper_inf(f, 0.0, opts);
    }
    if (hi_inf) return integrate_upper_inf(f, a, opts);
    return integrate_lower_inf(f, b, opts);
}

std::complex<double> integrate_interval_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    const QuadOptions& opts) {
    const bool lo_inf = std::isinf(a);
    const bool hi_inf = std::isinf(b);
    if (!lo_inf && !hi_inf) return integrate_complex(f, a, b, opts);
    if (lo_inf && hi_inf) {
        return integrate_lower_inf_complex(f, 0.0, opts) + integrate_upper_inf_complex(f, 0.0, opts);
    }
    if (hi_inf) return integrate_upper_inf_complex(f, a, opts);
    return integrate_lower_inf_complex(f, b, opts);
}

}  // namespace levymap
