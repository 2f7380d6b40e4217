#include "gcformer/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gcformer/errors.hpp"

namespace gcf {

std::vector<double> finite_difference_gradient(const ScalarFunction& f, std::span<const double> x,
                                               double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_gradient: step must be positive");
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + h;
    const double up = f(point);
    point[i] = saved - h;
    const double down = f(point);
    point[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("finite_difference_gradient: non-finite evaluation at coordinate " +
                         std::to_string(i));
    }
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double relative_error(double a, double b, double floor) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / scale;
}

}  // namespace gcf
