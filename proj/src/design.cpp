#include "ems/design.hpp"

#include "ems/entropy.hpp"
#include "ems/error.hpp"
#include "ems/parallel.hpp"
#include "ems/rng.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ems {

std::string_view to_string(Stage2Solver s) noexcept {
  switch (s) {
    case Stage2Solver::closed_form: return "closed_form";
    case Stage2Solver::frobenius: return "frobenius";
  }
  return "unknown";
}

Stage2Solver parse_stage2(std::string_view name) {
  if (name == "closed_form") return Stage2Solver::closed_form;
  if (name == "frobenius") return Stage2Solver::frobenius;
  throw Error(Errc::InvalidArgument, "unknown stage2 solver '" + std::string(name) + "'");
}

void DesignConfig::validate() const {
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(Errc::InvalidArgument, "delta must lie in (0, 1)");
  if (!(zeta > 0.0)) throw Error(Errc::InvalidArgument, "zeta must be > 0");
  if (outer_iters < 1) throw Error(Errc::InvalidArgument, "outer_iters must be >= 1");
  if (inner_max_iters < 1) throw Error(Errc::InvalidArgument, "inner_max_iters must be >= 1");
  if (!(inner_grad_tol >= 0.0)) throw Error(Errc::InvalidArgument, "inner_grad_tol must be >= 0");
  if (early_stop_window < 1) throw Error(Errc::InvalidArgument, "early_stop_window must be >= 1");
}

namespace {

constexpr double kSingularCoord = 1e-12;
constexpr double kFloorRatio = 1e-6;

void require_shape(Eigen::Index m, Eigen::Index n) {
  if (m < 1 || m >= n)
    throw Error(Errc::InvalidShape,
                "need 1 <= m < n, got m=" + std::to_string(m) + ", n=" + std::to_string(n));
}

double checked_energy(const Eigen::Ref<const Eigen::VectorXd>& y) {
  const double s = y.squaredNorm();
  if (!(s >= kZeroEnergy)) throw Error(Errc::ZeroVector, "measurement vector is zero");
  return s;
}

void check_c_norm(double c_norm) {
  if (!(c_norm > 0.0) || !std::isfinite(c_norm))
    throw Error(Errc::InvalidArgument, "c_norm must be positive and finite");
}

// Returns true if any coordinate was replaced.
bool jitter_small(Eigen::VectorXd& y, Rng& rng) {
  const double scale = kSingularCoord * y.norm();
  bool changed = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (std::abs(y(i)) < kSingularCoord) {
      y(i) = rng.sign() * scale;
      changed = true;
    }
  }
  return changed;
}

Eigen::MatrixXd polar_factor(const Eigen::MatrixXd& g) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace

Eigen::MatrixXd init_sensing_matrix(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  require_shape(m, n);
  Rng rng(seed);
  Eigen::MatrixXd g(n, m);  // transposed: columns become the rows of the result
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < n; ++c) g(c, r) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
  // Positive diagonal in R makes this the Gram-Schmidt orthonormalisation of the rows.
  for (Eigen::Index j = 0; j < m; ++j)
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  return q.transpose();
}

Eigen::MatrixXd random_gaussian_matrix(Eigen::Index m, Eigen::Index n, std::uint64_t seed,
                                       bool normalize_columns) {
  require_shape(m, n);
  Rng rng(seed);
  Eigen::MatrixXd g(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < n; ++c) g(r, c) = scale * rng.normal();
  if (normalize_columns) {
    for (Eigen::Index c = 0; c < n; ++c) g.col(c).normalize();
  }
  return g;
}

double stage1_objective(const Eigen::Ref<const Eigen::VectorXd>& y, double c_norm,
                        const DesignConfig& cfg) {
  check_c_norm(c_norm);
  const double s = checked_energy(y);
  double neg_entropy = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double p = y(i) * y(i) / s;
    if (p >= 1e-300) neg_entropy += p * std::log(p);
  }
  const double ratio = s / (c_norm * c_norm);
  const double z = (ratio - 1.0) * (ratio - 1.0) - cfg.delta * cfg.delta;
  return neg_entropy + cfg.alpha * std::sqrt(z * z + cfg.zeta);
}

Eigen::VectorXd neg_entropy_gradient(const Eigen::Ref<const Eigen::VectorXd>& y) {
  const double s = checked_energy(y);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (std::abs(y(i)) < kSingularCoord)
      throw Error(Errc::NearSingularCoordinate, "|y_" + std::to_string(i) + "| < 1e-12");
  }
  const Eigen::ArrayXd p = y.array().square() / s;
  const Eigen::ArrayXd log_p = p.log();
  const double mean_log = (p * log_p).sum();
  // d/dy_k sum_i p_i ln p_i = (2 y_k / S) (ln p_k - sum_i p_i ln p_i)
  return ((2.0 / s) * y.array() * (log_p - mean_log)).matrix();
}

Eigen::VectorXd stage1_gradient(const Eigen::Ref<const Eigen::VectorXd>& y, double c_norm,
                                const DesignConfig& cfg) {
  check_c_norm(c_norm);
  Eigen::VectorXd g = neg_entropy_gradient(y);
  const double cn2 = c_norm * c_norm;
  const double ratio = y.squaredNorm() / cn2;
  const double z = (ratio - 1.0) * (ratio - 1.0) - cfg.delta * cfg.delta;
  // d sqrt(z^2 + zeta) = z / sqrt(z^2 + zeta) dz,  dz/dy = 2 (ratio - 1) 2 y / cn2
  const double coef = cfg.alpha * z / std::sqrt(z * z + cfg.zeta) * 4.0 * (ratio - 1.0) / cn2;
  g += coef * y;
  return g;
}

Eigen::VectorXd maximize_entropy(const Eigen::Ref<const Eigen::VectorXd>& y0, double c_norm,
                                 const DesignConfig& cfg, std::uint64_t stream, InnerTrace* trace) {
  constexpr double kArmijo = 1e-4;
  constexpr double kShrink = 0.5;
  constexpr int kMaxBacktracks = 60;

  checked_energy(y0);
  check_c_norm(c_norm);
  Rng rng(derive_seed(cfg.seed, stream));
  Eigen::VectorXd y = y0;
  jitter_small(y, rng);

  double f = stage1_objective(y, c_norm, cfg);
  InnerTrace local;
  InnerTrace& tr = trace ? *trace : local;
  tr = InnerTrace{};
  tr.objective.push_back(f);

  Eigen::VectorXd candidate(y.size());
  for (int it = 0; it < cfg.inner_max_iters; ++it) {
    const Eigen::VectorXd g = stage1_gradient(y, c_norm, cfg);
    const double g2 = g.squaredNorm();
    // d(p ln p)/dy vanishes as y_i -> 0, so a point with near-zero coordinates
    // has a tiny gradient without being stationary on the simplex.
    const bool floor_coords = y.cwiseAbs().minCoeff() < kFloorRatio * y.norm();
    if (std::sqrt(g2) <= cfg.inner_grad_tol && !floor_coords) {
      tr.converged = true;
      break;
    }
    double step = 1.0;
    bool accepted = false;
    double fc = f;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, step *= kShrink) {
      candidate = y - step * g;
      if (!(candidate.squaredNorm() >= kZeroEnergy)) continue;
      jitter_small(candidate, rng);
      fc = stage1_objective(candidate, c_norm, cfg);
      if (fc <= f - kArmijo * step * g2) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no descent possible at double precision
    y.swap(candidate);
    f = fc;
    tr.objective.push_back(f);
    tr.iterations = it + 1;
  }
  return y;
}

double procrustes_objective(const Eigen::Ref<const Eigen::MatrixXd>& a,
                            const Eigen::Ref<const Eigen::MatrixXd>& c_mat,
                            const Eigen::Ref<const Eigen::MatrixXd>& y_hat) {
  return (y_hat - a * c_mat).squaredNorm();
}

namespace {

void check_procrustes_dims(const Eigen::Ref<const Eigen::MatrixXd>& c_mat,
                           const Eigen::Ref<const Eigen::MatrixXd>& y_hat) {
  if (c_mat.cols() != y_hat.cols() || c_mat.cols() < 1)
    throw Error(Errc::DimensionMismatch, "C has " + std::to_string(c_mat.cols()) +
                                             " columns, Yhat has " + std::to_string(y_hat.cols()));
  require_shape(y_hat.rows(), c_mat.rows());
}

}  // namespace

Eigen::MatrixXd procrustes_closed_form(const Eigen::Ref<const Eigen::MatrixXd>& c_mat,
                                       const Eigen::Ref<const Eigen::MatrixXd>& y_hat) {
  check_procrustes_dims(c_mat, y_hat);
  const Eigen::Index m = y_hat.rows();
  const Eigen::MatrixXd e = c_mat * y_hat.transpose();  // N x M
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || !(sv(m - 1) >= 1e-12 * sv(0)))
    throw Error(Errc::SvdFailure, "C Yhat^T is rank deficient (sigma_M / sigma_1 = " +
                                      std::to_string(sv(0) > 0.0 ? sv(m - 1) / sv(0) : 0.0) +
                                      "); need L >= M generic training columns");
  Eigen::MatrixXd u = svd.matrixU();  // N x M, ordered by decreasing singular value
  Eigen::MatrixXd v = svd.matrixV();  // M x M
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::Index r = 0;
    u.col(i).cwiseAbs().maxCoeff(&r);
    if (u(r, i) < 0.0) {
      u.col(i) = -u.col(i);
      v.col(i) = -v.col(i);
    }
  }
  return v * u.transpose();
}

Eigen::MatrixXd procrustes_refine(const Eigen::Ref<const Eigen::MatrixXd>& c_mat,
                                  const Eigen::Ref<const Eigen::MatrixXd>& y_hat,
                                  Eigen::MatrixXd start, int max_iters, double step_tol) {
  check_procrustes_dims(c_mat, y_hat);
  const Eigen::Index n = c_mat.rows();
  const Eigen::MatrixXd s = c_mat * c_mat.transpose();
  const Eigen::MatrixXd b = y_hat * c_mat.transpose();
  const double lambda = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s, Eigen::EigenvaluesOnly)
                            .eigenvalues()(n - 1);
  // tr(A S A^T) is majorised by its linearisation around A_t with curvature
  // lambda I, so each polar step cannot increase the objective.
  const Eigen::MatrixXd shifted = lambda * Eigen::MatrixXd::Identity(n, n) - s;
  Eigen::MatrixXd a = std::move(start);
  double f = procrustes_objective(a, c_mat, y_hat);
  for (int it = 0; it < max_iters; ++it) {
    Eigen::MatrixXd next = polar_factor(b + a * shifted);
    const double fn = procrustes_objective(next, c_mat, y_hat);
    const double step = (next - a).cwiseAbs().maxCoeff();
    if (fn > f) break;  // rounding noise at the fixed point
    a.swap(next);
    f = fn;
    if (step < step_tol) break;
  }
  return a;
}

Eigen::MatrixXd procrustes_rect(const Eigen::Ref<const Eigen::MatrixXd>& c_mat,
                                const Eigen::Ref<const Eigen::MatrixXd>& y_hat,
                                const ProcrustesOptions& opts) {
  Eigen::MatrixXd best =
      procrustes_refine(c_mat, y_hat, procrustes_closed_form(c_mat, y_hat), opts.max_iters, opts.step_tol);
  double best_f = procrustes_objective(best, c_mat, y_hat);
  for (int s = 0; s < opts.random_starts; ++s) {
    Eigen::MatrixXd start =
        init_sensing_matrix(y_hat.rows(), c_mat.rows(), derive_seed(opts.seed, static_cast<std::uint64_t>(s)));
    Eigen::MatrixXd cand = procrustes_refine(c_mat, y_hat, std::move(start), opts.max_iters, opts.step_tol);
    const double f = procrustes_objective(cand, c_mat, y_hat);
    if (f < best_f) {
      best_f = f;
      best = std::move(cand);
    }
  }
  return best;
}

double average_entropy(const Eigen::Ref<const Eigen::MatrixXd>& a,
                       const Eigen::Ref<const Eigen::MatrixXd>& coeffs) {
  const Eigen::MatrixXd y = a * coeffs;
  double total = 0.0;
  for (Eigen::Index j = 0; j < y.cols(); ++j) total += entropy_nats(y.col(j));
  return total / static_cast<double>(y.cols());
}

SensingDesign make_design(Eigen::MatrixXd phi, const SparsifyingBasis& basis) {
  if (phi.cols() != basis.size())
    throw Error(Errc::DimensionMismatch, "Phi has " + std::to_string(phi.cols()) +
                                             " columns, basis size " + std::to_string(basis.size()));
  SensingDesign d;
  d.a = phi * basis.matrix();
  d.phi = std::move(phi);
  d.m = d.phi.rows();
  d.n = d.phi.cols();
  d.basis_kind = basis.kind();
  return d;
}

TrainResult ems_train(const Eigen::Ref<const Eigen::MatrixXd>& x_mat, const SparsifyingBasis& basis,
                      Eigen::Index m, const DesignConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = basis.size();
  if (x_mat.rows() != n)
    throw Error(Errc::DimensionMismatch, "training signals have length " + std::to_string(x_mat.rows()) +
                                             ", basis size " + std::to_string(n));
  require_shape(m, n);
  const Eigen::Index l = x_mat.cols();
  if (l < 1) throw Error(Errc::InvalidSize, "empty training set");

  const Eigen::MatrixXd coeffs = basis.analyze_columns(x_mat);
  Eigen::VectorXd c_norms(l);
  for (Eigen::Index j = 0; j < l; ++j) {
    c_norms(j) = coeffs.col(j).norm();
    if (!(c_norms(j) * c_norms(j) >= kZeroEnergy))
      throw Error(Errc::ZeroTrainingColumn, "training column " + std::to_string(j) + " is zero");
  }

  const Eigen::MatrixXd& psi = basis.matrix();
  Eigen::MatrixXd a = init_sensing_matrix(m, n, cfg.seed) * psi;

  TrainResult result;
  auto& trace = result.trace.avg_entropy_per_iter;
  trace.reserve(static_cast<std::size_t>(cfg.outer_iters));
  Eigen::MatrixXd y_hat(m, l);
  int quiet = 0;
  for (int k = 1; k <= cfg.outer_iters; ++k) {
    // Stage I: per-signal entropy maximisation from the current measurements.
    const Eigen::MatrixXd y0 = a * coeffs;
    parallel_for(static_cast<std::size_t>(l), [&](std::size_t j) {
      const auto col = static_cast<Eigen::Index>(j);
      const std::uint64_t stream = (static_cast<std::uint64_t>(k) << 32) | j;
      y_hat.col(col) = maximize_entropy(y0.col(col), c_norms(col), cfg, stream);
    });

    // Stage II: row-orthonormal fit of A to the desired measurements.
    switch (cfg.stage2) {
      case Stage2Solver::closed_form: a = procrustes_closed_form(coeffs, y_hat); break;
      case Stage2Solver::frobenius: a = procrustes_rect(coeffs, y_hat); break;
    }

    trace.push_back(average_entropy(a, coeffs));
    if (cfg.early_stop && trace.size() >= 2) {
      quiet = std::abs(trace.back() - trace[trace.size() - 2]) < cfg.early_stop_tol ? quiet + 1 : 0;
      if (quiet >= cfg.early_stop_window) break;
    }
  }
  result.trace.final_avg_entropy = trace.back();

  result.design.phi = a * psi.transpose();
  result.design.a = std::move(a);
  result.design.m = m;
  result.design.n = n;
  result.design.basis_kind = basis.kind();
  return result;
}

}  // namespace ems
