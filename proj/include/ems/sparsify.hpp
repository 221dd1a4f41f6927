#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string_view>

namespace ems {

enum class BasisKind { dct, identity, file };

std::string_view to_string(BasisKind kind) noexcept;

/// Orthonormal N x N basis Psi whose columns are the basis vectors, so a
/// signal is x = Psi c and its coefficients are c = Psi^T x.
class SparsifyingBasis {
 public:
  /// Orthonormal DCT-II synthesis matrix.
  static SparsifyingBasis dct(Eigen::Index n);
  static SparsifyingBasis identity(Eigen::Index n);
  /// Validates squareness, size >= 2 and ||Psi^T Psi - I||_F <= tol.
  static SparsifyingBasis from_matrix(Eigen::MatrixXd psi, BasisKind kind = BasisKind::file,
                                      double tol = 1e-8);

  const Eigen::MatrixXd& matrix() const noexcept { return psi_; }
  BasisKind kind() const noexcept { return kind_; }
  Eigen::Index size() const noexcept { return psi_.rows(); }

  Eigen::VectorXd analyze(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd synthesize(const Eigen::Ref<const Eigen::VectorXd>& c) const;
  /// Column-wise versions for N x L signal/coefficient matrices.
  Eigen::MatrixXd analyze_columns(const Eigen::Ref<const Eigen::MatrixXd>& x) const;
  Eigen::MatrixXd synthesize_columns(const Eigen::Ref<const Eigen::MatrixXd>& c) const;

 private:
  SparsifyingBasis(Eigen::MatrixXd psi, BasisKind kind) : psi_(std::move(psi)), kind_(kind) {}

  Eigen::MatrixXd psi_;
  BasisKind kind_;
};

inline Eigen::VectorXd analyze(const SparsifyingBasis& b, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return b.analyze(x);
}
inline Eigen::VectorXd synthesize(const SparsifyingBasis& b, const Eigen::Ref<const Eigen::VectorXd>& c) {
  return b.synthesize(c);
}
inline SparsifyingBasis dct_basis(Eigen::Index n) { return SparsifyingBasis::dct(n); }

SparsifyingBasis load_basis(const std::filesystem::path& path);

/// Resolves "dct", "identity" or a path to a basis matrix file.
SparsifyingBasis make_basis(std::string_view spec, Eigen::Index n);

}  // namespace ems
