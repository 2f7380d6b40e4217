#include "gcformer/legendre.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gcformer/convolution.hpp"
#include "gcformer/errors.hpp"

namespace gcf::legendre {
namespace {

std::size_t window_points(double theta) {
  if (!(theta >= 1.0)) throw std::invalid_argument("LegT window must be at least one sample");
  return static_cast<std::size_t>(std::llround(theta));
}

// Legendre P_0..P_{order-1} at x via the three-term recurrence.
void legendre_values(double x, std::size_t order, double* out) {
  if (order == 0) return;
  out[0] = 1.0;
  if (order == 1) return;
  out[1] = x;
  for (std::size_t k = 2; k < order; ++k) {
    const double kk = static_cast<double>(k);
    out[k] = ((2.0 * kk - 1.0) * x * out[k - 1] - (kk - 1.0) * out[k - 2]) / kk;
  }
}

}  // namespace

LegtMatrices legt_matrices(std::size_t order) {
  if (order == 0) throw std::invalid_argument("legt_matrices: order must be >= 1");
  const auto d = static_cast<Eigen::Index>(order);
  LegtMatrices m{Eigen::MatrixXd(d, d), Eigen::VectorXd(d)};
  for (Eigen::Index n = 0; n < d; ++n) {
    const double scale = 2.0 * static_cast<double>(n) + 1.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double sign = (k <= n) ? (((n - k) % 2 == 0) ? 1.0 : -1.0) : 1.0;
      m.A(n, k) = scale * sign;
    }
    m.B(n) = scale * ((n % 2 == 0) ? 1.0 : -1.0);
  }
  return m;
}

LegtMatrices discretize(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("discretize: step must be positive");
  if (A.rows() != A.cols() || A.rows() != B.size()) {
    throw std::invalid_argument("discretize: inconsistent A/B shapes");
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  const Eigen::MatrixXd lhs = I - 0.5 * step * A;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    throw NumericError("discretize: (I - step/2 A) is singular (reciprocal condition " +
                       std::to_string(rcond) + ")");
  }
  return {lu.solve(I + 0.5 * step * A), lu.solve(step * B)};
}

StateSpaceSystem legt_system(std::size_t order, double theta) {
  window_points(theta);
  const LegtMatrices continuous = legt_matrices(order);
  const LegtMatrices d = discretize(-continuous.A / theta, continuous.B / theta, 1.0);
  StateSpaceSystem sys;
  sys.A = d.A;
  sys.B = d.B;
  sys.C = newest_sample_functional(order, theta);
  sys.D = 0.0;
  sys.discrete = true;
  return sys;
}

std::vector<double> ssm_recurrence(const StateSpaceSystem& sys, std::span<const double> u) {
  if (!sys.discrete) throw std::invalid_argument("ssm_recurrence: system is not discretized");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.A.rows());
  Eigen::VectorXd next(sys.A.rows());
  std::vector<double> y(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    next.noalias() = sys.A * x;
    next += sys.B * u[k];
    x.swap(next);
    if (!x.allFinite()) {
      throw NumericError("ssm_recurrence: state diverged at step " + std::to_string(k + 1));
    }
    y[k] = sys.C.dot(x) + sys.D * u[k];
  }
  return y;
}

Eigen::MatrixXd state_kernels(const StateSpaceSystem& sys, std::size_t n) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), sys.A.rows());
  Eigen::VectorXd v = sys.B;
  Eigen::VectorXd next(v.size());
  for (std::size_t i = 0; i < n; ++i) {
    out.row(static_cast<Eigen::Index>(i)) = v.transpose();
    next.noalias() = sys.A * v;
    v.swap(next);
  }
  if (!out.allFinite()) throw NumericError("state_kernels: overflow while powering A");
  return out;
}

std::vector<double> materialize_ssm_kernel(const StateSpaceSystem& sys, std::size_t n) {
  if (!sys.discrete) throw std::invalid_argument("materialize_ssm_kernel: system is not discretized");
  std::vector<double> k(n);
  Eigen::VectorXd v = sys.B;
  Eigen::VectorXd next(v.size());
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = sys.C.dot(v);
    next.noalias() = sys.A * v;
    v.swap(next);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(k[i])) {
      throw NumericError("materialize_ssm_kernel: overflow at index " + std::to_string(i));
    }
  }
  return k;
}

Eigen::MatrixXd legendre_eval_matrix(std::size_t order, std::size_t points) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points), static_cast<Eigen::Index>(order));
  std::vector<double> row(order);
  for (std::size_t i = 0; i < points; ++i) {
    const double r = (static_cast<double>(i) + 0.5) / static_cast<double>(points);
    legendre_values(1.0 - 2.0 * r, order, row.data());
    for (std::size_t k = 0; k < order; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
    }
  }
  return m;
}

Eigen::RowVectorXd newest_sample_functional(std::size_t order, double theta) {
  const std::size_t points = window_points(theta);
  return legendre_eval_matrix(order, points).row(static_cast<Eigen::Index>(points) - 1);
}

LegendreCoeffs legt_project(std::span<const double> u, std::size_t order, double theta) {
  if (u.empty()) throw std::invalid_argument("legt_project: empty signal");
  const StateSpaceSystem sys = legt_system(order, theta);
  LegendreCoeffs coeffs{order, Eigen::MatrixXd(static_cast<Eigen::Index>(u.size()), sys.A.rows())};
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.A.rows());
  Eigen::VectorXd next(sys.A.rows());
  for (std::size_t k = 0; k < u.size(); ++k) {
    next.noalias() = sys.A * x;
    next += sys.B * u[k];
    x.swap(next);
    if (!x.allFinite()) {
      throw NumericError("legt_project: state diverged at step " + std::to_string(k + 1));
    }
    coeffs.values.row(static_cast<Eigen::Index>(k)) = x.transpose();
  }
  return coeffs;
}

std::vector<double> legt_reconstruct_state(const Eigen::VectorXd& state, double theta) {
  const std::size_t points = window_points(theta);
  const Eigen::VectorXd window =
      legendre_eval_matrix(static_cast<std::size_t>(state.size()), points) * state;
  return {window.data(), window.data() + window.size()};
}

std::vector<double> legt_reconstruct(const LegendreCoeffs& coeffs, double theta) {
  if (coeffs.values.rows() == 0) return {};
  return legt_reconstruct_state(coeffs.values.row(coeffs.values.rows() - 1).transpose(), theta);
}

std::vector<double> apply_leg_kernel(std::span<const double> u, const LegKernelParams& params,
                                     double theta, std::size_t channel) {
  if (params.weights.rank() != 3 || params.weights.dim(2) != params.order ||
      params.weights.dim(1) != params.kernel_len) {
    throw std::invalid_argument("apply_leg_kernel: weights shape " +
                                shape_string(params.weights.shape()) +
                                " does not match kernel_len x order");
  }
  if (channel >= params.weights.dim(0)) throw std::invalid_argument("apply_leg_kernel: bad channel");
  const std::size_t n = u.size();
  const LegendreCoeffs coeffs = legt_project(u, params.order, theta);
  const Eigen::RowVectorXd readout = newest_sample_functional(params.order, theta);

  std::vector<double> y(n, 0.0);
  std::vector<double> column(n);
  std::vector<double> kernel(n);
  for (std::size_t j = 0; j < params.order; ++j) {
    for (std::size_t k = 0; k < n; ++k) column[k] = coeffs.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
    std::fill(kernel.begin(), kernel.end(), 0.0);
    for (std::size_t i = 0; i < std::min(params.kernel_len, n); ++i) {
      kernel[i] = params.weights.at(channel, i, j);
    }
    const std::vector<double> filtered = causal_convolve(column, kernel);
    const double r = readout(static_cast<Eigen::Index>(j));
    for (std::size_t k = 0; k < n; ++k) y[k] += r * filtered[k];
  }
  return y;
}

LegBasis make_leg_basis(std::size_t order, double theta, std::size_t n) {
  const StateSpaceSystem sys = legt_system(order, theta);
  return {n, state_kernels(sys, n), sys.C};
}

double spectral_radius_power(const Eigen::MatrixXd& A, std::size_t iterations) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(A.rows());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += 0.01 * static_cast<double>(i);
  x.normalize();
  double log_growth = 0.0;
  std::size_t counted = 0;
  for (std::size_t it = 0; it < iterations; ++it) {
    x = A * x;
    const double norm = x.norm();
    if (norm == 0.0) return 0.0;
    x /= norm;
    if (it >= iterations / 2) {
      log_growth += std::log(norm);
      ++counted;
    }
  }
  return std::exp(log_growth / static_cast<double>(counted));
}

}  // namespace gcf::legendre
