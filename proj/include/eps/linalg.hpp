#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>

namespace eps {

using Vec  = Eigen::VectorXd;
using Mat  = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Orthonormal basis of the column span of M, rank-truncated at
/// rel_tol * (largest singular value).
Mat orthonormal_columns(const Mat& M, double rel_tol = 1e-10);

/// Orthonormal basis of the orthogonal complement of the (orthonormal)
/// columns of B inside R^n.
Mat orthonormal_complement(const Mat& B, int ambient_dim);

int numerical_rank(const Mat& M, double rel_tol = 1e-8);

/// exp(S) for real skew-symmetric S, via the Hermitian eigendecomposition
/// of iS.
Mat expm_skew(const Mat& S);

/// exp(X) for complex skew-Hermitian X.
CMat expm_skew_hermitian(const CMat& X);

/// Nearest unitary matrix in Frobenius norm (polar factor).
CMat nearest_unitary(const CMat& G);

/// Uniform point on the unit sphere of R^n.
Vec random_unit(int n, std::mt19937_64& rng);

/// Standard-normal vector in R^n.
Vec random_gaussian(int n, std::mt19937_64& rng);

/// Random symmetric positive definite matrix with eigenvalues in
/// [lo, hi].
Mat random_spd(int n, std::mt19937_64& rng, double lo = 0.5, double hi = 2.5);

/// FNV-1a hash of a byte string, used to fingerprint configs.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace eps
