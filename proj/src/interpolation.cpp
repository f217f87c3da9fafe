#include "interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levymap {

PchipInterpolant::PchipInterpolant(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    const std::size_t n = xs_.size();
    if (n < 2 || ys_.size() != n) throw std::invalid_argument("pchip: need >= 2 matching nodes");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(xs_[i] > xs_[i - 1])) throw std::invalid_argument("pchip: x not increasing");
    }
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = xs_[i + 1] - xs_[i];
        delta[i] = (ys_[i + 1] - ys_[i]) / h[i];
    }
    slopes_.assign(n, 0.0);
    if (n == 2) {
        slopes_[0] = slopes_[1] = delta[0];
    } else {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] == 0.0 || delta[i] == 0.0 || (delta[i - 1] < 0) != (delta[i] < 0)) {
                slopes_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                slopes_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        auto endpoint = [](double h0, double h1, double d0, double d1) {
            double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if (m * d0 <= 0.0) {
                m = 0.0;
            } else if ((d0 * d1 < 0.0) && std::fabs(m) > 3.0 * std::fabs(d0)) {
                m = 3.0 * d0;
            }
            return m;
        };
        slopes_[0] = endpoint(h[0], h[1], delta[0], delta[1]);
        slopes_[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }
    // cumulative integrals of each cell for integral_from_left
    cum_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double hi = h[i];
        const double cell = hi * (0.5 * (ys_[i] + ys_[i + 1]) + hi * (slopes_[i] - slopes_[i + 1]) / 12.0);
        cum_[i + 1] = cum_[i] + cell;
    }
}

std::size_t PchipInterpolant::locate(double x) const {
    if (x <= xs_.front()) return 0;
    if (x >= xs_.back()) return xs_.size() - 2;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    return static_cast<std::size_t>(it - xs_.begin()) - 1;
}

double PchipInterpolant::operator()(double x) const {
    const std::size_t i = locate(x);
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * ys_[i] + h * h10 * slopes_[i] + h01 * ys_[i + 1] + h * h11 * slopes_[i + 1];
}

double PchipInterpolant::derivative(double x) const {
    const std::size_t i = locate(x);
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t;
    const double dh00 = (6 * t2 - 6 * t) / h;
    const double dh10 = 3 * t2 - 4 * t + 1;
    const double dh01 = (-6 * t2 + 6 * t) / h;
    const double dh11 = 3 * t2 - 2 * t;
    return dh00 * ys_[i] + dh10 * slopes_[i] + dh01 * ys_[i + 1] + dh11 * slopes_[i + 1];
}

double PchipInterpolant::integral_from_left(double x) const {
    if (x <= xs_.front()) return 0.0;
    const std::size_t i = locate(x);
    const double h = xs_[i + 1] - xs_[i];
    const double t = std::min(1.0, (x - xs_[i]) / h);
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    const double H00 = 0.5 * t4 - t3 + t;              // int h00
    const double H10 = 0.25 * t4 - (2.0 / 3.0) * t3 + 0.5 * t2;
    const double H01 = -0.5 * t4 + t3;
    const double H11 = 0.25 * t4 - t3 / 3.0;
    const double part = h * (H00 * ys_[i] + h * H10 * slopes_[i] + H01 * ys_[i + 1] +
                             h * H11 * slopes_[i + 1]);
    return cum_[i] + part;
}

}  // namespace levymap
