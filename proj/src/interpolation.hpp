#pragma once

// Shape-preserving cubic Hermite interpolation (Fritsch-Carlson slopes).
// Used for tabulated time changes and tabulated image densities.

#include <cstddef>
#include <vector>

namespace levymap {

class PchipInterpolant {
 public:
    PchipInterpolant() = default;
    // xs strictly increasing, ys same length (>= 2)
    PchipInterpolant(std::vector<double> xs, std::vector<double> ys);

    double operator()(double x) const;
    double derivative(double x) const;
    // exact integral of the interpolant over [xs.front(), x]
    double integral_from_left(double x) const;

    double x_min() const { return xs_.front(); }
    double x_max() const { return xs_.back(); }
    std::size_t size() const { return xs_.size(); }

 private:
    std::size_t locate(double x) const;

    std::vector<double> xs_, ys_, slopes_, cum_;
};

}  // namespace levymap
