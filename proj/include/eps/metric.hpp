#pragma once

#include <vector>

#include "eps/algebra.hpp"

namespace eps {

/// SPD test used by every metric constructor: smallest eigenvalue must
/// exceed 1e-12 times the largest.
bool is_spd(const Mat& M, double* min_eig = nullptr, double* max_eig = nullptr);

/// Symmetric positive definite operator A = I^{-1} mapping momentum to
/// angular velocity in the orthonormal basis.
struct MetricOperator {
  Mat A;

  static MetricOperator from_matrix(Mat M);

  int dim() const { return static_cast<int>(A.rows()); }
  Vec apply(const Eigen::Ref<const Vec>& x) const { return A * x; }
  Vec operator()(const Eigen::Ref<const Vec>& x) const { return A * x; }
  /// Reduced Hamiltonian H(x) = 1/2 <x, A x>.
  double energy(const Eigen::Ref<const Vec>& x) const { return 0.5 * x.dot(A * x); }
};

/// A acting block-diagonally on an orthogonal spanning decomposition;
/// block i is given in the coordinates of subspace i.
MetricOperator make_block_metric(const std::vector<Subspace>& decomp,
                                 const std::vector<Mat>& blocks);

/// Nested subalgebra chain G_0 c G_1 c ... c G_n with orthogonal
/// complements V_i = G_i (-) G_{i-1}.
struct ChainSpec {
  const LieAlgebra* alg = nullptr;
  std::vector<Subspace> levels;       // G_0 ... G_n
  std::vector<Subspace> complements;  // V_1 ... V_n

  int length() const { return static_cast<int>(complements.size()); }
  const Subspace& base() const { return levels.front(); }
  const Subspace& top() const { return levels.back(); }

  /// Residuals of the defining conditions: each G_i a subalgebra,
  /// G_{i-1} c G_i, and [G_{i-1}, V_i] c V_i.
  double validation_residual() const;
};

ChainSpec make_chain(const LieAlgebra& alg, std::vector<Subspace> levels);

/// so(k0) c so(k0+1) c ... c so(n), top-left block embeddings.
ChainSpec so_chain(const LieAlgebra& so_n, int k0);
/// u(k0) c u(k0)+u(1) c u(k0+1) c ... c u(n).
ChainSpec u_chain(const LieAlgebra& u_n, int k0);
/// sp(k0) c sp(k0)+sp(1) c sp(k0+1) c ... c sp(n).
ChainSpec sp_chain(const LieAlgebra& sp_n, int k0);

/// A = A0 on G_0, s_i * Id on V_i.
MetricOperator make_chain_metric(const ChainSpec& chain, const Mat& A0,
                                 const std::vector<double>& s);

/// Centralizer {y : [y, a] = 0}, computed as the kernel of ad_a with
/// relative rank tolerance 1e-10.
Subspace centralizer(const LieAlgebra& alg, const Eigen::Ref<const Vec>& a);

struct SectionalOperator {
  Mat matrix;              // symmetric on the whole algebra
  bool positive_definite;  // reported, not assumed
  double min_eigenvalue;
  double max_eigenvalue;
  double symmetry_residual;

  MetricOperator as_metric() const;  // throws when not positive definite
};

/// Sectional operator: R on the maximal abelian K containing the regular
/// element a, and ad_a^{-1} ad_b on the complement [a, G] = K-perp.
/// R is given in the coordinates of K's basis.
SectionalOperator make_sectional_operator(const LieAlgebra& alg,
                                          const Subspace& K,
                                          const Eigen::Ref<const Vec>& a,
                                          const Eigen::Ref<const Vec>& b,
                                          const Mat& R);

/// Compression B^T A B of an operator preserving the subspace; throws if
/// the off-block leakage exceeds the tolerance.
Mat restrict_operator(const Mat& A, const Subspace& sub, double tol = 1e-10);

}  // namespace eps
