#pragma once

#include <Eigen/Dense>

#include <vector>

namespace ems {

struct RecoveryConfig {
  int max_iters = 5000;
  double tol = 1e-7;
  double rho = 1.0;     // ADMM penalty for basis_pursuit
  double lambda = 0.0;  // l1 weight for bpdn

  void validate() const;
};

struct RecoveryResult {
  Eigen::VectorXd coeffs;
  int iterations_used = 0;
  double residual_norm = 0.0;  // ||y - A coeffs||_2
  bool converged = false;
  std::vector<Eigen::Index> support;  // OMP selection order; empty for l1 solvers
};

/// Orthogonal matching pursuit: picks the column maximising |<a_i, r>| / ||a_i||
/// (lowest index on ties), refits by least squares on the support through an
/// incrementally updated QR factorisation, and stops after k atoms or once
/// ||r|| <= residual_tol.
RecoveryResult omp(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::VectorXd>& y,
                   Eigen::Index k, double residual_tol = 0.0);

/// min ||c||_1 subject to A c = y, by ADMM splitting c = z. The returned
/// coefficients are the feasible (projected) iterate.
RecoveryResult basis_pursuit(const Eigen::Ref<const Eigen::MatrixXd>& a,
                             const Eigen::Ref<const Eigen::VectorXd>& y, const RecoveryConfig& cfg = {});

/// min 1/2 ||A c - y||^2 + lambda ||c||_1 by FISTA with step 1/L, L the
/// largest eigenvalue of A^T A from power iteration. Momentum restarts
/// whenever the objective would increase.
RecoveryResult bpdn(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::VectorXd>& y,
                    double lambda, const RecoveryConfig& cfg = {}, std::vector<double>* objective_trace = nullptr);

/// Universal threshold sigma * sqrt(2 ln N).
double universal_lambda(double noise_sigma, Eigen::Index n);

/// Largest eigenvalue of A^T A by power iteration.
double spectral_norm_squared(const Eigen::Ref<const Eigen::MatrixXd>& a, int max_iters = 1000, double tol = 1e-12);

}  // namespace ems
