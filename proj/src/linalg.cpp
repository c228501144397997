#include "eps/linalg.hpp"

#include <stdexcept>
#include <string>

namespace eps {

Mat orthonormal_columns(const Mat& M, double rel_tol) {
  if (M.cols() == 0) return Mat(M.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return Mat(M.rows(), 0);
  int r = 0;
  while (r < sv.size() && sv(r) > rel_tol * sv(0)) ++r;
  return svd.matrixU().leftCols(r);
}

Mat orthonormal_complement(const Mat& B, int ambient_dim) {
  if (B.cols() == 0) return Mat::Identity(ambient_dim, ambient_dim);
  Mat stacked(ambient_dim, B.cols() + ambient_dim);
  stacked << B, Mat::Identity(ambient_dim, ambient_dim);
  Eigen::HouseholderQR<Mat> qr(stacked);
  Mat Q = qr.householderQ() * Mat::Identity(ambient_dim, ambient_dim);
  return Q.rightCols(ambient_dim - B.cols());
}

int numerical_rank(const Mat& M, double rel_tol) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  while (r < sv.size() && sv(r) > rel_tol * sv(0)) ++r;
  return r;
}

Mat expm_skew(const Mat& S) {
  return expm_skew_hermitian(S.cast<std::complex<double>>()).real();
}

CMat expm_skew_hermitian(const CMat& X) {
  const std::complex<double> i(0.0, 1.0);
  Eigen::SelfAdjointEigenSolver<CMat> es(i * X);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("expm_skew_hermitian: eigensolver failed");
  CVec phase = (-i * es.eigenvalues().array()).exp();
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

CMat nearest_unitary(const CMat& G) {
  Eigen::JacobiSVD<CMat> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Vec random_unit(int n, std::mt19937_64& rng) {
  Vec v = random_gaussian(n, rng);
  double nrm = v.norm();
  while (nrm < 1e-12) {
    v = random_gaussian(n, rng);
    nrm = v.norm();
  }
  return v / nrm;
}

Vec random_gaussian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

Mat random_spd(int n, std::mt19937_64& rng, double lo, double hi) {
  Mat M = Mat::NullaryExpr(
      n, n, [&](Eigen::Index, Eigen::Index) { return random_gaussian(1, rng)(0); });
  Eigen::HouseholderQR<Mat> qr(M);
  Mat Q = qr.householderQ() * Mat::Identity(n, n);
  std::uniform_real_distribution<double> uni(lo, hi);
  Vec eigs(n);
  for (int i = 0; i < n; ++i) eigs(i) = uni(rng);
  return Q * eigs.asDiagonal() * Q.transpose();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace eps
