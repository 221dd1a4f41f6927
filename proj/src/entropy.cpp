#include "ems/entropy.hpp"

#include "ems/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace ems {

ProbDistribution prob_distribution(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double energy = v.squaredNorm();
  if (!(energy >= kZeroEnergy)) throw Error(Errc::ZeroVector, "probability of a zero vector");
  return {v.array().square() / energy};
}

double entropy_nats(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const auto dist = prob_distribution(v);
  double h = 0.0;
  for (double p : dist.p) {
    if (p >= 1e-300) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

std::size_t theoretical_dimension(double entropy, std::size_t n) {
  const double e = std::exp(entropy);
  const double cap = static_cast<double>(std::max<std::size_t>(n, 1));
  const double d = std::clamp(std::ceil(e - 1e-9 * e), 1.0, cap);
  return static_cast<std::size_t>(d);
}

EntropyReport shannon_entropy(const Eigen::Ref<const Eigen::VectorXd>& v) {
  EntropyReport r;
  r.vector_length = static_cast<std::size_t>(v.size());
  r.entropy = entropy_nats(v);
  r.theoretical_dimension = theoretical_dimension(r.entropy, r.vector_length);
  return r;
}

BoundsCheck check_bounds(const Eigen::Ref<const Eigen::VectorXd>& c,
                         const Eigen::Ref<const Eigen::VectorXd>& y) {
  BoundsCheck b;
  const auto rc = shannon_entropy(c);
  const auto ry = shannon_entropy(y);
  b.h_c = rc.entropy;
  b.h_y = ry.entropy;
  b.k_est = rc.theoretical_dimension;
  b.meff = ry.theoretical_dimension;
  b.m = static_cast<std::size_t>(y.size());
  const double ln_k = std::log(static_cast<double>(b.k_est));
  const double ln_m = std::log(static_cast<double>(b.m));
  // Equality H(y) == ln K fails: the lower bound is strict.
  b.entropy_bounds_pass = b.h_c <= ln_k + 1e-9 && ln_k < b.h_y && b.h_y <= ln_m + 1e-12;
  b.meff_cond_pass = b.meff >= 2 * b.k_est;
  return b;
}

double mutual_coherence(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  if (a.cols() < 2) throw Error(Errc::InvalidSize, "coherence needs at least two columns");
  Eigen::MatrixXd normalized = a;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double nrm = a.col(j).norm();
    if (!(nrm >= 1e-30)) throw Error(Errc::ZeroColumn, "column " + std::to_string(j));
    normalized.col(j) /= nrm;
  }
  const Eigen::MatrixXd gram = normalized.transpose() * normalized;
  double mu = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    for (Eigen::Index j = i + 1; j < gram.cols(); ++j) mu = std::max(mu, std::abs(gram(i, j)));
  return std::min(mu, 1.0);
}

namespace {

// Visits every k-subset of {0..n-1} in lexicographic order until pred returns true.
template <class Pred>
bool any_subset(std::size_t n, std::size_t k, Pred&& pred) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (pred(idx)) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::size_t spark_bruteforce(const Eigen::Ref<const Eigen::MatrixXd>& a, double rank_tol) {
  const auto n = static_cast<std::size_t>(a.cols());
  const auto m = static_cast<std::size_t>(a.rows());
  if (n > 14) throw Error(Errc::TooLarge, "spark enumeration limited to 14 columns");
  if (n == 0) return m + 1;
  const double sigma_max = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
  const double threshold = rank_tol * std::max(sigma_max, 1e-300);

  const std::size_t k_max = std::min(n, m);
  for (std::size_t k = 1; k <= k_max; ++k) {
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(k));
    const bool dependent = any_subset(n, k, [&](const std::vector<std::size_t>& idx) {
      for (std::size_t j = 0; j < k; ++j) sub.col(static_cast<Eigen::Index>(j)) = a.col(static_cast<Eigen::Index>(idx[j]));
      const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(sub).singularValues();
      return sv(sv.size() - 1) < threshold;
    });
    if (dependent) return k;
  }
  // Any M+1 columns are dependent; if there are not that many, report the cap.
  return m + 1;
}

Eigen::VectorXd empirical_rip_deltas(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                     const Eigen::Ref<const Eigen::MatrixXd>& coeffs) {
  if (a.cols() != coeffs.rows())
    throw Error(Errc::DimensionMismatch, "A has " + std::to_string(a.cols()) +
                                             " columns but coefficients have " +
                                             std::to_string(coeffs.rows()) + " rows");
  Eigen::VectorXd deltas(coeffs.cols());
  for (Eigen::Index j = 0; j < coeffs.cols(); ++j) {
    const double energy = coeffs.col(j).squaredNorm();
    if (!(energy >= kZeroEnergy)) throw Error(Errc::ZeroColumn, "coefficient column " + std::to_string(j));
    deltas(j) = std::abs((a * coeffs.col(j)).squaredNorm() / energy - 1.0);
  }
  return deltas;
}

}  // namespace ems
