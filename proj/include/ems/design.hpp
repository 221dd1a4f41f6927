#pragma once

#include "ems/sparsify.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>
#include <vector>

namespace ems {

/// How the row-orthonormal effective matrix is fitted to the desired
/// measurements in the second stage of each outer iteration.
enum class Stage2Solver {
  /// A = V U_M^T from the SVD of C Yhat^T (maximises tr(A C Yhat^T)).
  closed_form,
  /// procrustes_rect: closed form refined to a minimiser of ||Yhat - A C||_F.
  frobenius,
};

std::string_view to_string(Stage2Solver s) noexcept;
Stage2Solver parse_stage2(std::string_view name);

struct DesignConfig {
  double alpha = 1.0;
  double delta = 0.1;
  double zeta = 1e-15;
  int outer_iters = 100;
  int inner_max_iters = 200;
  double inner_grad_tol = 1e-6;
  std::uint64_t seed = 0;
  Stage2Solver stage2 = Stage2Solver::closed_form;
  /// Stop once |delta avg entropy| < early_stop_tol for early_stop_window
  /// consecutive outer iterations.
  bool early_stop = false;
  int early_stop_window = 5;
  double early_stop_tol = 1e-6;

  void validate() const;
};

struct SensingDesign {
  Eigen::MatrixXd phi;  // M x N, acts on signals
  Eigen::MatrixXd a;    // M x N, acts on coefficients: A = Phi Psi
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  BasisKind basis_kind = BasisKind::dct;
};

struct ConvergenceTrace {
  std::vector<double> avg_entropy_per_iter;
  double final_avg_entropy = 0.0;
};

struct TrainResult {
  SensingDesign design;
  ConvergenceTrace trace;
};

/// Gaussian M x N matrix with orthonormalised rows. Requires m < n.
Eigen::MatrixXd init_sensing_matrix(Eigen::Index m, Eigen::Index n, std::uint64_t seed);

/// i.i.d. N(0, 1/m) entries, optionally rescaled to unit column norms.
Eigen::MatrixXd random_gaussian_matrix(Eigen::Index m, Eigen::Index n, std::uint64_t seed,
                                       bool normalize_columns = false);

/// Negative entropy of y plus alpha * sqrt(z^2 + zeta), where
/// z = ((||y|| / c_norm)^2 - 1)^2 - delta^2.
double stage1_objective(const Eigen::Ref<const Eigen::VectorXd>& y, double c_norm,
                        const DesignConfig& cfg);

/// Analytic gradient of stage1_objective. Throws NearSingularCoordinate if
/// any |y_i| < 1e-12 since d/dy_i of p_i ln p_i is unbounded there.
Eigen::VectorXd stage1_gradient(const Eigen::Ref<const Eigen::VectorXd>& y, double c_norm,
                                const DesignConfig& cfg);

/// Gradient of the entropy part only (sum p_i ln p_i).
Eigen::VectorXd neg_entropy_gradient(const Eigen::Ref<const Eigen::VectorXd>& y);

struct InnerTrace {
  std::vector<double> objective;  // value at the start and after every accepted step
  int iterations = 0;
  bool converged = false;  // gradient norm reached inner_grad_tol
};

/// Gradient descent with Armijo backtracking (c1 = 1e-4, shrink 0.5, initial
/// step 1). Coordinates with |y_i| < 1e-12 are first replaced by
/// +-1e-12 ||y|| with signs drawn from the stream (cfg.seed, stream).
Eigen::VectorXd maximize_entropy(const Eigen::Ref<const Eigen::VectorXd>& y0, double c_norm,
                                 const DesignConfig& cfg, std::uint64_t stream = 0,
                                 InnerTrace* trace = nullptr);

/// ||Yhat - A C||_F^2.
double procrustes_objective(const Eigen::Ref<const Eigen::MatrixXd>& a,
                            const Eigen::Ref<const Eigen::MatrixXd>& c_mat,
                            const Eigen::Ref<const Eigen::MatrixXd>& y_hat);

/// A = V U_M^T where C Yhat^T = U Delta V^T. Throws SvdFailure if the M-th
/// singular value is below 1e-12 sigma_1.
Eigen::MatrixXd procrustes_closed_form(const Eigen::Ref<const Eigen::MatrixXd>& c_mat,
                                       const Eigen::Ref<const Eigen::MatrixXd>& y_hat);

struct ProcrustesOptions {
  int random_starts = 8;
  int max_iters = 20000;
  double step_tol = 1e-13;
  std::uint64_t seed = 0x5eed;
};

/// Row-orthonormal minimiser of ||Yhat - A C||_F^2. Starts from the closed
/// form and from random_starts random row-orthonormal matrices, improves
/// each by majorisation-minimisation and keeps the best.
Eigen::MatrixXd procrustes_rect(const Eigen::Ref<const Eigen::MatrixXd>& c_mat,
                                const Eigen::Ref<const Eigen::MatrixXd>& y_hat,
                                const ProcrustesOptions& opts = {});

/// Monotone majorisation-minimisation refinement of a row-orthonormal start.
Eigen::MatrixXd procrustes_refine(const Eigen::Ref<const Eigen::MatrixXd>& c_mat,
                                  const Eigen::Ref<const Eigen::MatrixXd>& y_hat,
                                  Eigen::MatrixXd start, int max_iters = 20000,
                                  double step_tol = 1e-13);

/// Alternating entropy-maximising design of an M x N sensing matrix for the
/// training signals x_mat (N x L).
TrainResult ems_train(const Eigen::Ref<const Eigen::MatrixXd>& x_mat, const SparsifyingBasis& basis,
                      Eigen::Index m, const DesignConfig& cfg);

/// Average measurement entropy (1/L) sum_j H(A c_j).
double average_entropy(const Eigen::Ref<const Eigen::MatrixXd>& a,
                       const Eigen::Ref<const Eigen::MatrixXd>& coeffs);

/// Wraps an arbitrary Phi into a design (A = Phi Psi).
SensingDesign make_design(Eigen::MatrixXd phi, const SparsifyingBasis& basis);

}  // namespace ems
