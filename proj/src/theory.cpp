#include "gcformer/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

#include "gcformer/errors.hpp"

namespace gcf::theory {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix(splitmix(seed) ^ (index * 0xD1B54A32D192ED03ull + 1));
}

constexpr std::uint64_t kMatrixStream = ~0ull;

}  // namespace

std::string to_string(MatrixKind k) {
  switch (k) {
    case MatrixKind::unitary_random: return "unitary_random";
    case MatrixKind::identity: return "identity";
    case MatrixKind::expanding: return "expanding";
  }
  return "?";
}

MatrixKind parse_matrix_kind(const std::string& s) {
  if (s == "unitary_random") return MatrixKind::unitary_random;
  if (s == "identity") return MatrixKind::identity;
  if (s == "expanding") return MatrixKind::expanding;
  throw std::invalid_argument("unknown matrix kind '" + s + "' (expected unitary_random, identity, expanding)");
}

std::vector<std::string> NoiseAccumConfig::validate() const {
  std::vector<std::string> problems;
  if (dim == 0) problems.push_back("dim must be >= 1");
  if (theta == 0) problems.push_back("theta must be >= 1");
  if (!(sigma >= 0.0)) problems.push_back("sigma must be >= 0");
  if (trials < 100) problems.push_back("trials must be >= 100");
  if (kind == MatrixKind::expanding && !(rho > 1.0)) problems.push_back("rho must be > 1 for expanding");
  return problems;
}

Eigen::MatrixXd random_orthogonal(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

bool NoiseAccumReport::within_bounds() const {
  if (diverged) return false;
  if (reference == 0.0) return scale == 0.0;
  return ratio >= 0.5 && ratio <= 2.0 && exceedance < 0.05;
}

std::string NoiseAccumReport::to_csv() const {
  std::string out = "trial,value,bound\n";
  char buf[96];
  for (std::size_t t = 0; t < max_abs.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", t, max_abs[t], 3.0 * reference);
    out += buf;
  }
  return out;
}

NoiseAccumReport noise_accumulation(const NoiseAccumConfig& config) {
  const auto problems = config.validate();
  if (!problems.empty()) throw std::invalid_argument("noise_accumulation: " + problems.front());
  const std::size_t d = config.dim;
  Eigen::MatrixXd a;
  switch (config.kind) {
    case MatrixKind::identity: a = Eigen::MatrixXd::Identity(d, d); break;
    case MatrixKind::unitary_random: a = random_orthogonal(d, stream_seed(config.seed, kMatrixStream)); break;
    case MatrixKind::expanding:
      a = config.rho * random_orthogonal(d, stream_seed(config.seed, kMatrixStream));
      break;
  }
  if (config.kind != MatrixKind::expanding) {
    std::mt19937_64 rng(stream_seed(config.seed, kMatrixStream - 1));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int probe = 0; probe < 4; ++probe) {
      Eigen::VectorXd x(d);
      for (std::size_t i = 0; i < d; ++i) x(static_cast<Eigen::Index>(i)) = gauss(rng);
      if (std::abs((a * x).norm() - x.norm()) > 1e-10 * std::max(1.0, x.norm())) {
        throw NumericError("noise_accumulation: sampled A is not norm preserving");
      }
    }
  }

  NoiseAccumReport rep;
  rep.reference = config.sigma * std::sqrt(static_cast<double>(config.theta));
  rep.max_abs.resize(config.trials);
  const double limit = 3.0 * rep.reference;
  // Row-major copy for the hot loop.
  std::vector<double> am(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) am[i * d + j] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double sum_sq = 0.0;
  double sum = 0.0;
  std::size_t exceed = 0;
  std::vector<double> s(d);
  std::vector<double> tmp(d);
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    std::mt19937_64 rng(stream_seed(config.seed, trial));
    std::normal_distribution<double> gauss(0.0, config.sigma > 0.0 ? config.sigma : 1.0);
    std::fill(s.begin(), s.end(), 0.0);
    // Horner: S = A(eps_1 + A(eps_2 + ... A(eps_{theta-1}))).
    for (std::size_t i = config.theta; i-- > 1;) {
      for (std::size_t k = 0; k < d; ++k) tmp[k] = s[k] + (config.sigma > 0.0 ? gauss(rng) : 0.0);
      for (std::size_t r = 0; r < d; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < d; ++c) acc += am[r * d + c] * tmp[c];
        s[r] = acc;
      }
    }
    double m = 0.0;
    for (double v : s) {
      if (!std::isfinite(v) || std::abs(v) > 1e150) rep.diverged = true;
      m = std::max(m, std::abs(v));
      sum += v;
      sum_sq += v * v;
      if (std::abs(v) > limit) ++exceed;
    }
    rep.max_abs[trial] = m;
  }
  const double count = static_cast<double>(config.trials * d);
  const double mean = sum / count;
  rep.scale = std::sqrt(std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0)));
  rep.ratio = rep.reference > 0.0 ? rep.scale / rep.reference : 0.0;
  rep.exceedance = static_cast<double>(exceed) / count;
  if (!std::isfinite(rep.scale)) rep.diverged = true;
  return rep;
}

std::string to_string(Projection p) {
  switch (p) {
    case Projection::zero: return "zero";
    case Projection::svd: return "svd";
    case Projection::sampled: return "sampled";
  }
  return "?";
}

Projection parse_projection(const std::string& s) {
  if (s == "zero") return Projection::zero;
  if (s == "svd") return Projection::svd;
  if (s == "sampled") return Projection::sampled;
  throw std::invalid_argument("unknown projection '" + s + "' (expected zero, svd, sampled)");
}

std::vector<std::string> ColumnSelectConfig::validate() const {
  std::vector<std::string> problems;
  if (rows == 0) problems.push_back("rows must be >= 1");
  if (cols == 0) problems.push_back("cols must be >= 1");
  if (keep > cols) problems.push_back("keep must be <= cols");
  if (!(a_min >= 0.0)) problems.push_back("a_min must be >= 0");
  if (trials == 0) problems.push_back("trials must be >= 1");
  return problems;
}

std::string ColumnSelectReport::to_csv() const {
  std::string out = "trial,value,bound\n";
  char buf[96];
  for (std::size_t t = 0; t < errors.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", t, errors[t], bound);
    out += buf;
  }
  return out;
}

double column_selection_error(const Eigen::MatrixXd& a, std::size_t keep, Projection projection,
                              std::size_t sampled, std::uint64_t seed) {
  const auto s = static_cast<Eigen::Index>(keep);
  const Eigen::MatrixXd tail = a.rightCols(a.cols() - s);
  if (tail.cols() == 0) return 0.0;
  Eigen::MatrixXd approx = Eigen::MatrixXd::Zero(tail.rows(), tail.cols());
  const auto k = static_cast<Eigen::Index>(sampled);
  if (projection == Projection::svd && k > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(tail, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index r = std::min<Eigen::Index>(k, svd.singularValues().size());
    approx = svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
             svd.matrixV().leftCols(r).transpose();
  } else if (projection == Projection::sampled && k > 0) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(tail.cols()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const Eigen::Index take = std::min<Eigen::Index>(k, tail.cols());
    Eigen::MatrixXd cols(tail.rows(), take);
    for (Eigen::Index j = 0; j < take; ++j) cols.col(j) = tail.col(idx[static_cast<std::size_t>(j)]);
    // Orthogonal projector onto the span of the sampled columns.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols, Eigen::ComputeThinU);
    const double tol = 1e-12 * std::max(1.0, svd.singularValues().size() ? svd.singularValues()(0) : 0.0);
    Eigen::Index r = 0;
    while (r < svd.singularValues().size() && svd.singularValues()(r) > tol) ++r;
    const Eigen::MatrixXd u = svd.matrixU().leftCols(r);
    approx = u * (u.transpose() * tail);
  }
  return (tail - approx).norm();
}

ColumnSelectReport column_selection_check(const ColumnSelectConfig& config) {
  const auto problems = config.validate();
  if (!problems.empty()) throw std::invalid_argument("column_selection_check: " + problems.front());
  ColumnSelectReport rep;
  rep.bound = std::sqrt(static_cast<double>(config.rows * (config.cols - config.keep))) * config.a_min;
  const auto d = static_cast<Eigen::Index>(config.rows);
  const auto n = static_cast<Eigen::Index>(config.cols);
  const auto s = static_cast<Eigen::Index>(config.keep);
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    std::mt19937_64 rng(stream_seed(config.seed, trial));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(-config.a_min, config.a_min);
    Eigen::MatrixXd a(d, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < d; ++i) a(i, j) = j < s ? gauss(rng) : (config.a_min > 0.0 ? uni(rng) : 0.0);
    }
    const double err = column_selection_error(a, config.keep, config.projection, config.sampled, rng());
    rep.errors.push_back(err);
    if (err > rep.bound * (1.0 + 1e-12)) ++rep.violations;
  }
  return rep;
}

}  // namespace gcf::theory
