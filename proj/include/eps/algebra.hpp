#pragma once

#include <string>
#include <vector>

#include "eps/linalg.hpp"

namespace eps {

/// Ad-invariant pairing -1/2 Re tr(XY). All built-in bases are orthonormal
/// for it, so coordinate inner products are plain dot products.
double matrix_inner(const CMat& X, const CMat& Y);

/// Compact Lie algebra presented by an orthonormal basis of a defining
/// matrix representation. Structure constants c[i][j][k] with
/// [e_i, e_j] = sum_k c[i][j][k] e_k are precomputed densely; dimensions
/// stay small (dim <= ~50) so no sparsity machinery is used.
class LieAlgebra {
public:
  LieAlgebra(std::string name, std::vector<std::string> labels,
             std::vector<CMat> basis, int rank);

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  int rank() const { return rank_; }
  int matrix_size() const { return static_cast<int>(basis_.front().rows()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<CMat>& basis() const { return basis_; }
  int label_index(const std::string& label) const;

  double structure(int i, int j, int k) const { return ad_[i](k, j); }
  /// Matrix of ad_{e_i} on coordinates: ad_basis(i)(k, j) = c[i][j][k].
  const Mat& ad_basis(int i) const { return ad_[i]; }
  /// Matrix of ad_x: y -> [x, y].
  Mat ad(const Eigen::Ref<const Vec>& x) const;
  Vec bracket(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y) const;

  /// Element as a matrix of the defining representation.
  CMat to_matrix(const Eigen::Ref<const Vec>& x) const;
  /// Coordinates of a matrix lying in (or projected onto) the algebra.
  Vec from_matrix(const CMat& X) const;

  double antisymmetry_residual() const;
  double jacobi_residual() const;
  double orthonormality_residual() const;
  /// Exhaustive |<[e_i,e_j],e_k> + <e_j,[e_i,e_k]>| over basis triples.
  double ad_invariance_residual() const;
  /// Same pairing on random coordinate triples.
  double ad_invariance_residual(int samples, std::uint64_t seed) const;

private:
  std::string name_;
  std::vector<std::string> labels_;
  std::vector<CMat> basis_;
  std::vector<Mat> ad_;
  int rank_;
};

/// so(n): basis {f_ij = E_ij - E_ji, i < j} (lexicographic), orthonormal
/// under -1/2 tr(XY); rank floor(n/2).
LieAlgebra build_so(int n);

/// u(n): skew-Hermitian matrices; basis ordering is the diagonal imaginary
/// units d_k = i*sqrt(2)*E_kk, then real-skew pairs a_ij = E_ij - E_ji,
/// then imaginary-symmetric pairs s_ij = i(E_ij + E_ji), each i < j
/// lexicographic.
LieAlgebra build_u(int n);

/// sp(n): quaternionic skew-Hermitian matrices in the complex 2n x 2n
/// embedding; diagonal pure-imaginary units first, then off-diagonal
/// quaternion pairs scaled to unit norm.
LieAlgebra build_sp(int n);

/// so(3) in the body frame (L1, L2, L3) = (-f_23, f_13, -f_12); the bracket
/// is the vector cross product.
LieAlgebra build_so3_body();

/// Linear subspace of a Lie algebra carrying an orthonormal column basis.
/// Spanning sets are re-orthonormalized on construction; rank decisions use
/// 1e-10 of the largest singular value.
class Subspace {
public:
  Subspace(const LieAlgebra& alg, const Mat& spanning);
  static Subspace from_axes(const LieAlgebra& alg, const std::vector<int>& axes);
  static Subspace from_labels(const LieAlgebra& alg,
                              const std::vector<std::string>& labels);
  static Subspace zero(const LieAlgebra& alg);
  static Subspace full(const LieAlgebra& alg);

  const LieAlgebra& algebra() const { return *alg_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  const Mat& basis() const { return basis_; }
  Vec basis_vector(int k) const { return basis_.col(k); }

  Vec project(const Eigen::Ref<const Vec>& x) const { return basis_ * (basis_.transpose() * x); }
  Mat projector() const { return basis_ * basis_.transpose(); }
  Vec coords(const Eigen::Ref<const Vec>& x) const { return basis_.transpose() * x; }
  Vec lift(const Eigen::Ref<const Vec>& c) const { return basis_ * c; }
  bool contains(const Eigen::Ref<const Vec>& x, double tol = 1e-10) const;
  /// Whether this subspace contains the other one.
  bool contains(const Subspace& other, double tol = 1e-10) const;
  Subspace orthogonal_complement() const;
  /// Orthogonal complement inside a larger subspace.
  Subspace complement_in(const Subspace& larger) const;
  bool is_subalgebra(double tol = 1e-10) const;
  double orthonormality_residual() const;

private:
  explicit Subspace(const LieAlgebra& alg) : alg_(&alg) {}
  const LieAlgebra* alg_;
  Mat basis_;
};

/// Smallest subspace containing D and closed under the bracket, grown by
/// iterating pairwise brackets until the span is stable.
Subspace bracket_closure(const LieAlgebra& alg, const Subspace& D);

}  // namespace eps
