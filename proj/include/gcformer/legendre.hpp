#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gcformer/tensor.hpp"

namespace gcf::legendre {

/// x_k = A x_{k-1} + B u_k,  y_k = C x_k + D u_k.
struct StateSpaceSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  double D = 0.0;
  bool discrete = false;

  std::size_t order() const { return static_cast<std::size_t>(A.rows()); }
};

struct LegtMatrices {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
};

/// Per-step states of the LegT projection: row k is the state after sample k.
struct LegendreCoeffs {
  std::size_t order = 0;
  Eigen::MatrixXd values;
};

/// Learnable kernel acting on the Legendre coefficient channels.
/// weights has shape [channels, kernel_len, order].
struct LegKernelParams {
  std::size_t order = 0;
  std::size_t kernel_len = 0;
  double theta = 0.0;  // 0 selects the length of the signal being filtered
  Tensor weights;

  std::size_t channels() const { return weights.empty() ? 0 : weights.dim(0); }
};

/// Continuous-time LegT generator:
///   A_nk = (2n+1) * ((-1)^(n-k) if k <= n else 1),  B_n = (2n+1) (-1)^n.
LegtMatrices legt_matrices(std::size_t order);

/// Bilinear (Tustin) discretization of x' = A x + B u with step `step`:
///   Abar = (I - step/2 A)^-1 (I + step/2 A),  Bbar = (I - step/2 A)^-1 step B.
/// Throws NumericError when (I - step/2 A) is numerically singular.
LegtMatrices discretize(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, double step);

/// The discrete LegT memory for a window of `theta` samples: the generator is
/// negated and scaled by 1/theta, then discretized at one sample per step.
/// C is the reconstruction functional at the newest sample; D = 0.
StateSpaceSystem legt_system(std::size_t order, double theta);

/// Runs the recurrence from x_0 = 0. Requires sys.discrete.
/// Throws NumericError naming the first step whose state is non-finite.
std::vector<double> ssm_recurrence(const StateSpaceSystem& sys, std::span<const double> u);

/// K_i = C A^i B for i < n, by repeated matrix-vector products.
std::vector<double> materialize_ssm_kernel(const StateSpaceSystem& sys, std::size_t n);

/// Per-state impulse responses of (A, B): row i is A^i B. Shape n x order.
Eigen::MatrixXd state_kernels(const StateSpaceSystem& sys, std::size_t n);

/// Evaluation matrix of the Legendre basis on a window of `points` samples:
/// entry (i, k) = P_k(1 - 2 r_i) with r_i = (i + 0.5) / points, oldest first.
/// Combined with the LegT state scaling this is the orthonormal basis
/// sqrt(2k+1) P_k weighted by 1/sqrt(2k+1).
Eigen::MatrixXd legendre_eval_matrix(std::size_t order, std::size_t points);

/// Reconstruction weights for the newest sample of the window.
Eigen::RowVectorXd newest_sample_functional(std::size_t order, double theta);

/// Projects u onto the LegT basis, returning the state after every sample.
LegendreCoeffs legt_project(std::span<const double> u, std::size_t order, double theta);

/// Reconstructs the last `theta` samples (oldest first) from the final row.
std::vector<double> legt_reconstruct(const LegendreCoeffs& coeffs, double theta);

/// Reconstructs a window from a single coefficient vector.
std::vector<double> legt_reconstruct_state(const Eigen::VectorXd& state, double theta);

/// Project, causally convolve each coefficient channel with its column of the
/// kernel (zero-padded from kernel_len to n), then reconstruct the newest
/// sample at every step. Throws std::invalid_argument on an order mismatch.
std::vector<double> apply_leg_kernel(std::span<const double> u, const LegKernelParams& params,
                                     double theta, std::size_t channel = 0);

/// Precomputed pieces for turning a LegKernelParams into one causal kernel of
/// length n: the per-state impulse responses and the newest-sample readout.
struct LegBasis {
  std::size_t n = 0;
  Eigen::MatrixXd state_kernels;  // n x order
  Eigen::RowVectorXd readout;     // 1 x order
};

LegBasis make_leg_basis(std::size_t order, double theta, std::size_t n);

/// Largest |eigenvalue| estimated by normalized power iteration, using the
/// geometric mean growth over the last half of the iterations.
double spectral_radius_power(const Eigen::MatrixXd& A, std::size_t iterations = 4000);

}  // namespace gcf::legendre
