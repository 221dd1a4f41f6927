#include "ems/sparsify.hpp"

#include "ems/error.hpp"
#include "ems/matrix_io.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ems {

std::string_view to_string(BasisKind kind) noexcept {
  switch (kind) {
    case BasisKind::dct: return "dct";
    case BasisKind::identity: return "identity";
    case BasisKind::file: return "file";
  }
  return "unknown";
}

SparsifyingBasis SparsifyingBasis::dct(Eigen::Index n) {
  if (n < 2) throw Error(Errc::InvalidSize, "DCT basis needs n >= 2, got " + std::to_string(n));
  Eigen::MatrixXd psi(n, n);
  const double dn = static_cast<double>(n);
  const double dc = std::sqrt(1.0 / dn);
  const double ac = std::sqrt(2.0 / dn);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index t = 0; t < n; ++t) {
      psi(t, k) = k == 0 ? dc
                         : ac * std::cos(std::numbers::pi * (2.0 * static_cast<double>(t) + 1.0) *
                                         static_cast<double>(k) / (2.0 * dn));
    }
  }
  return SparsifyingBasis(std::move(psi), BasisKind::dct);
}

SparsifyingBasis SparsifyingBasis::identity(Eigen::Index n) {
  if (n < 2) throw Error(Errc::InvalidSize, "basis needs n >= 2, got " + std::to_string(n));
  return SparsifyingBasis(Eigen::MatrixXd::Identity(n, n), BasisKind::identity);
}

SparsifyingBasis SparsifyingBasis::from_matrix(Eigen::MatrixXd psi, BasisKind kind, double tol) {
  if (psi.rows() != psi.cols())
    throw Error(Errc::NotSquare, std::to_string(psi.rows()) + "x" + std::to_string(psi.cols()));
  if (psi.rows() < 2) throw Error(Errc::InvalidSize, "basis needs n >= 2");
  const double defect =
      (psi.transpose() * psi - Eigen::MatrixXd::Identity(psi.rows(), psi.cols())).norm();
  if (!(defect <= tol))
    throw Error(Errc::NotOrthonormal, "||Psi^T Psi - I||_F = " + io::format_double(defect));
  return SparsifyingBasis(std::move(psi), kind);
}

Eigen::VectorXd SparsifyingBasis::analyze(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != size())
    throw Error(Errc::DimensionMismatch, "signal length " + std::to_string(x.size()) +
                                             " vs basis size " + std::to_string(size()));
  return psi_.transpose() * x;
}

Eigen::VectorXd SparsifyingBasis::synthesize(const Eigen::Ref<const Eigen::VectorXd>& c) const {
  if (c.size() != size())
    throw Error(Errc::DimensionMismatch, "coefficient length " + std::to_string(c.size()) +
                                             " vs basis size " + std::to_string(size()));
  return psi_ * c;
}

Eigen::MatrixXd SparsifyingBasis::analyze_columns(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  if (x.rows() != size())
    throw Error(Errc::DimensionMismatch, "signal rows " + std::to_string(x.rows()) +
                                             " vs basis size " + std::to_string(size()));
  return psi_.transpose() * x;
}

Eigen::MatrixXd SparsifyingBasis::synthesize_columns(const Eigen::Ref<const Eigen::MatrixXd>& c) const {
  if (c.rows() != size())
    throw Error(Errc::DimensionMismatch, "coefficient rows " + std::to_string(c.rows()) +
                                             " vs basis size " + std::to_string(size()));
  return psi_ * c;
}

SparsifyingBasis load_basis(const std::filesystem::path& path) {
  return SparsifyingBasis::from_matrix(io::read_matrix(path), BasisKind::file);
}

SparsifyingBasis make_basis(std::string_view spec, Eigen::Index n) {
  if (spec == "dct") return SparsifyingBasis::dct(n);
  if (spec == "identity") return SparsifyingBasis::identity(n);
  auto basis = load_basis(std::filesystem::path(std::string(spec)));
  if (basis.size() != n)
    throw Error(Errc::DimensionMismatch, "basis size " + std::to_string(basis.size()) +
                                             " vs signal length " + std::to_string(n));
  return basis;
}

}  // namespace ems
