#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gcf {

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate.
/// Throws NumericError if any evaluation is non-finite.
std::vector<double> finite_difference_gradient(const ScalarFunction& f, std::span<const double> x,
                                               double h);

/// Relative disagreement |a - b| / max(|a|, |b|, floor).
double relative_error(double a, double b, double floor = 1e-12);

}  // namespace gcf
