#include "ems/recovery.hpp"

#include "ems/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ems {

void RecoveryConfig::validate() const {
  if (max_iters < 1) throw Error(Errc::InvalidArgument, "max_iters must be >= 1");
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "tol must be > 0");
  if (!(rho > 0.0)) throw Error(Errc::InvalidArgument, "rho must be > 0");
  if (!(lambda >= 0.0)) throw Error(Errc::InvalidArgument, "lambda must be >= 0");
}

namespace {

void check_system(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (a.rows() != y.size())
    throw Error(Errc::DimensionMismatch, "A has " + std::to_string(a.rows()) + " rows, y has length " +
                                             std::to_string(y.size()));
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  return v.unaryExpr([t](double x) { return x > t ? x - t : (x < -t ? x + t : 0.0); });
}

}  // namespace

RecoveryResult omp(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::VectorXd>& y,
                   Eigen::Index k, double residual_tol) {
  check_system(a, y);
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (k < 1 || k > m)
    throw Error(Errc::InvalidArgument, "OMP needs 1 <= k <= M, got k=" + std::to_string(k));

  Eigen::VectorXd col_norms(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    col_norms(j) = a.col(j).norm();
    if (!(col_norms(j) > 1e-30)) throw Error(Errc::ZeroColumn, "column " + std::to_string(j));
  }

  RecoveryResult res;
  res.coeffs = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd q(m, k);  // orthonormal basis of the selected columns
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(k, k);
  std::vector<bool> selected(static_cast<std::size_t>(n), false);
  Eigen::VectorXd residual = y;
  const double exact_fit = 1e-14 * y.norm();

  Eigen::Index s = 0;
  while (s < k && residual.norm() > std::max(residual_tol, exact_fit)) {
    const Eigen::VectorXd corr = a.transpose() * residual;
    Eigen::Index pick = -1;
    double best = -1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (selected[static_cast<std::size_t>(j)]) continue;
      const double score = std::abs(corr(j)) / col_norms(j);
      if (score > best) {
        best = score;
        pick = j;
      }
    }

    // Append the new column to the QR factorisation (Gram-Schmidt, twice).
    Eigen::VectorXd v = a.col(pick);
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(s);
    for (int pass = 0; pass < 2 && s > 0; ++pass) {
      const Eigen::VectorXd h = q.leftCols(s).transpose() * v;
      v -= q.leftCols(s) * h;
      coef += h;
    }
    const double vnorm = v.norm();
    if (!(vnorm > 1e-12 * col_norms(pick)))
      throw Error(Errc::SingularSubproblem,
                  "column " + std::to_string(pick) + " is dependent on the current support");
    r.col(s).head(s) = coef;
    r(s, s) = vnorm;
    q.col(s) = v / vnorm;
    selected[static_cast<std::size_t>(pick)] = true;
    res.support.push_back(pick);
    ++s;

    residual = y - q.leftCols(s) * (q.leftCols(s).transpose() * y);
    res.iterations_used = static_cast<int>(s);
  }

  if (s > 0) {
    const Eigen::VectorXd qty = q.leftCols(s).transpose() * y;
    const Eigen::VectorXd x = r.topLeftCorner(s, s).triangularView<Eigen::Upper>().solve(qty);
    for (Eigen::Index i = 0; i < s; ++i) res.coeffs(res.support[static_cast<std::size_t>(i)]) = x(i);
  }
  res.residual_norm = (y - a * res.coeffs).norm();
  res.converged = true;
  return res;
}

RecoveryResult basis_pursuit(const Eigen::Ref<const Eigen::MatrixXd>& a,
                             const Eigen::Ref<const Eigen::VectorXd>& y, const RecoveryConfig& cfg) {
  cfg.validate();
  check_system(a, y);
  const Eigen::Index n = a.cols();

  const Eigen::MatrixXd gram = a * a.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  const double gmax = gram.diagonal().maxCoeff();
  if (llt.info() != Eigen::Success || !(llt.matrixL().toDenseMatrix().diagonal().minCoeff() >
                                        1e-6 * std::sqrt(std::max(gmax, 1e-300))))
    throw Error(Errc::RankDeficient, "A A^T is not positive definite");

  RecoveryResult res;
  const double ynorm = y.norm();
  if (ynorm == 0.0) {
    res.coeffs = Eigen::VectorXd::Zero(n);
    res.converged = true;
    return res;
  }

  // Solve the problem for y / ||y|| so tolerances are scale free.
  const Eigen::VectorXd b = y / ynorm;
  auto project = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v - a.transpose() * llt.solve(a * v - b);
  };

  Eigen::VectorXd x = project(Eigen::VectorXd::Zero(n));
  Eigen::VectorXd z = x;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  const double thresh = 1.0 / cfg.rho;
  const double scale_tol = cfg.tol * std::sqrt(static_cast<double>(n));
  for (int it = 1; it <= cfg.max_iters; ++it) {
    x = project(z - u);
    const Eigen::VectorXd z_old = z;
    z = soft_threshold(x + u, thresh);
    u += x - z;
    res.iterations_used = it;
    const double primal = (x - z).norm();
    const double dual = cfg.rho * (z - z_old).norm();
    if (primal <= scale_tol && dual <= scale_tol) {
      res.converged = true;
      break;
    }
  }
  // Polish: re-solve exactly on the detected support when that keeps the
  // signs of the ADMM solution and does not increase the l1 norm.
  const double zmax = z.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(z(i)) > 1e-6 * zmax) support.push_back(i);
  if (!support.empty() && static_cast<Eigen::Index>(support.size()) <= a.rows()) {
    const auto s = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd sub(a.rows(), s);
    for (Eigen::Index i = 0; i < s; ++i) sub.col(i) = a.col(support[static_cast<std::size_t>(i)]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
    if (qr.rank() == s) {
      const Eigen::VectorXd xs = qr.solve(b);
      Eigen::VectorXd polished = Eigen::VectorXd::Zero(n);
      bool same_signs = true;
      for (Eigen::Index i = 0; i < s; ++i) {
        const Eigen::Index j = support[static_cast<std::size_t>(i)];
        polished(j) = xs(i);
        same_signs = same_signs && (xs(i) > 0.0) == (z(j) > 0.0);
      }
      const double fit = (a * polished - b).norm();
      if (same_signs && fit <= std::max((a * x - b).norm(), 1e-12) &&
          polished.lpNorm<1>() <= x.lpNorm<1>() * (1.0 + 1e-9))
        x = polished;
    }
  }

  res.coeffs = ynorm * x;
  res.residual_norm = (y - a * res.coeffs).norm();
  return res;
}

double spectral_norm_squared(const Eigen::Ref<const Eigen::MatrixXd>& a, int max_iters, double tol) {
  const Eigen::Index n = a.cols();
  if (n == 0 || a.rows() == 0) return 0.0;
  // Deterministic start with no special alignment to coordinate axes.
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.5 * std::sin(1.0 + 2.0 * static_cast<double>(i));
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd w = a.transpose() * (a * v);
    const double next = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return (a * v).squaredNorm() > lambda ? (a * v).squaredNorm() : lambda;
}

double universal_lambda(double noise_sigma, Eigen::Index n) {
  return noise_sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

RecoveryResult bpdn(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::VectorXd>& y,
                    double lambda, const RecoveryConfig& cfg, std::vector<double>* objective_trace) {
  cfg.validate();
  check_system(a, y);
  if (!(lambda >= 0.0)) throw Error(Errc::InvalidArgument, "lambda must be >= 0");
  const Eigen::Index n = a.cols();

  RecoveryResult res;
  res.coeffs = Eigen::VectorXd::Zero(n);
  const double lip = spectral_norm_squared(a) * (1.0 + 1e-9);
  if (!(lip > 0.0)) {
    res.residual_norm = y.norm();
    res.converged = true;
    return res;
  }
  const double step = 1.0 / lip;
  const Eigen::VectorXd aty = a.transpose() * y;
  auto objective = [&](const Eigen::VectorXd& c) {
    return 0.5 * (a * c - y).squaredNorm() + lambda * c.lpNorm<1>();
  };
  auto prox_step = [&](const Eigen::VectorXd& from) {
    return soft_threshold(from - step * (a.transpose() * (a * from) - aty), step * lambda);
  };

  Eigen::VectorXd x = res.coeffs;
  Eigen::VectorXd w = x;
  double t = 1.0;
  double f = objective(x);
  std::vector<double> history{f};
  for (int it = 1; it <= cfg.max_iters; ++it) {
    Eigen::VectorXd next = prox_step(w);
    double fn = objective(next);
    if (fn > f) {
      // Restart: a plain proximal step from x cannot increase the objective.
      t = 1.0;
      next = prox_step(x);
      fn = objective(next);
      if (fn > f) {
        next = x;
        fn = f;
      }
      w = next;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      w = next + ((t - 1.0) / t_next) * (next - x);
      t = t_next;
    }
    x.swap(next);
    f = fn;
    history.push_back(f);
    res.iterations_used = it;
    if (it >= 10) {
      const double drop = history[history.size() - 11] - f;
      if (drop <= cfg.tol * std::max(1.0, std::abs(f))) {
        res.converged = true;
        break;
      }
    }
  }
  res.coeffs = x;
  res.residual_norm = (y - a * x).norm();
  if (objective_trace) *objective_trace = std::move(history);
  return res;
}

}  // namespace ems
