#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace ems {

/// Energy distribution of a representation: p_i = v_i^2 / ||v||^2.
struct ProbDistribution {
  Eigen::VectorXd p;
};

struct EntropyReport {
  double entropy = 0.0;  // nats
  std::size_t theoretical_dimension = 1;
  std::size_t vector_length = 1;
};

/// Entropy-based sparsity diagnostics for a coefficient vector c and its
/// measurement vector y. Never throws on a bound violation; the flags report it.
struct BoundsCheck {
  double h_c = 0.0;
  double h_y = 0.0;
  std::size_t k_est = 1;
  std::size_t m = 1;
  std::size_t meff = 1;
  bool entropy_bounds_pass = false;     // H(c) <= ln K < H(y) <= ln M
  bool meff_cond_pass = false;  // M_eff >= 2K
};

/// Squared-norm threshold below which a vector counts as zero.
inline constexpr double kZeroEnergy = 1e-30;

ProbDistribution prob_distribution(const Eigen::Ref<const Eigen::VectorXd>& v);

/// Shannon entropy in nats of the energy distribution of v (0 ln 0 = 0).
double entropy_nats(const Eigen::Ref<const Eigen::VectorXd>& v);

/// ceil(exp(h)) clamped to [1, n]. A relative slack of 1e-9 absorbs the
/// rounding in exp(ln k) so that k equal entries give exactly k.
std::size_t theoretical_dimension(double entropy, std::size_t n);

EntropyReport shannon_entropy(const Eigen::Ref<const Eigen::VectorXd>& v);

BoundsCheck check_bounds(const Eigen::Ref<const Eigen::VectorXd>& c,
                         const Eigen::Ref<const Eigen::VectorXd>& y);

/// max_{i != j} |<a_i, a_j>| / (||a_i|| ||a_j||).
double mutual_coherence(const Eigen::Ref<const Eigen::MatrixXd>& a);

/// Smallest number of linearly dependent columns, by exhaustive subset
/// enumeration. Exponential; restricted to at most 14 columns. rank_tol is
/// relative to the largest singular value of the whole matrix.
std::size_t spark_bruteforce(const Eigen::Ref<const Eigen::MatrixXd>& a, double rank_tol = 1e-10);

/// Per-column isometry defect |‖A c_j‖² / ‖c_j‖² − 1|.
Eigen::VectorXd empirical_rip_deltas(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                     const Eigen::Ref<const Eigen::MatrixXd>& coeffs);

}  // namespace ems
