#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gcf::theory {

enum class MatrixKind { unitary_random, identity, expanding };
std::string to_string(MatrixKind k);
MatrixKind parse_matrix_kind(const std::string& s);

struct NoiseAccumConfig {
  std::size_t dim = 8;
  std::size_t theta = 64;
  double sigma = 1.0;
  std::size_t trials = 10000;
  MatrixKind kind = MatrixKind::unitary_random;
  double rho = 1.05;  // expanding kind: A = rho * Q
  std::uint64_t seed = 0;
  std::vector<std::string> validate() const;
};

/// Per-trial statistics of S = sum_{i=1}^{theta-1} A^i eps_i with eps_i
/// i.i.d. N(0, sigma^2 I).
struct NoiseAccumReport {
  std::vector<double> max_abs;  // max_k |S_k| per trial
  double scale = 0.0;           // pooled per-coordinate std of S
  double reference = 0.0;       // sigma * sqrt(theta)
  double ratio = 0.0;           // scale / reference
  double exceedance = 0.0;      // fraction of coordinates with |S_k| > 3 reference
  bool diverged = false;        // non-finite or overflowing accumulation
  /// ratio in [0.5, 2] and exceedance below 5% (sigma = 0: scale is exactly 0).
  bool within_bounds() const;
  /// "trial,value,bound" with value = max_abs, bound = 3 reference.
  std::string to_csv() const;
};

/// Draws A once (QR of a Gaussian matrix for unitary kinds), checks
/// ||A x|| = ||x|| for the unitary kinds, then samples the trials. Trial t
/// uses its own RNG stream derived from (seed, t).
NoiseAccumReport noise_accumulation(const NoiseAccumConfig& config);

/// Orthogonal matrix from the QR factorization of a Gaussian matrix, with
/// column signs fixed so R has a positive diagonal.
Eigen::MatrixXd random_orthogonal(std::size_t dim, std::uint64_t seed);

enum class Projection { zero, svd, sampled };
std::string to_string(Projection p);
Projection parse_projection(const std::string& s);

struct ColumnSelectConfig {
  std::size_t rows = 4;     // d
  std::size_t cols = 8;     // n
  std::size_t keep = 4;     // s
  double a_min = 0.1;
  std::size_t sampled = 2;  // k: rank (svd) or sampled tail columns (sampled)
  std::size_t trials = 100;
  Projection projection = Projection::zero;
  std::uint64_t seed = 0;
  std::vector<std::string> validate() const;
};

struct ColumnSelectReport {
  std::vector<double> errors;  // ||A - P(A)||_F per trial
  double bound = 0.0;          // sqrt(d (n - s)) a_min
  std::size_t violations = 0;
  bool within_bounds() const { return violations == 0; }
  std::string to_csv() const;
};

/// A has Gaussian leading s columns and a tail uniform in [-a_min, a_min].
/// P(A) keeps the leading columns and replaces the tail by zero, its best
/// rank-k approximation, or its projection onto k sampled tail columns.
ColumnSelectReport column_selection_check(const ColumnSelectConfig& config);

/// ||A - P(A)||_F for one given matrix.
double column_selection_error(const Eigen::MatrixXd& a, std::size_t keep, Projection projection,
                              std::size_t sampled, std::uint64_t seed);

}  // namespace gcf::theory
