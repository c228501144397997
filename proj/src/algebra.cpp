#include "eps/algebra.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace eps {

namespace {

const std::complex<double> kI(0.0, 1.0);

CMat unit_entry(int n, int r, int c) {
  CMat E = CMat::Zero(n, n);
  E(r, c) = 1.0;
  return E;
}

}  // namespace

double matrix_inner(const CMat& X, const CMat& Y) {
  return -0.5 * (X * Y).trace().real();
}

LieAlgebra::LieAlgebra(std::string name, std::vector<std::string> labels,
                       std::vector<CMat> basis, int rank)
    : name_(std::move(name)),
      labels_(std::move(labels)),
      basis_(std::move(basis)),
      rank_(rank) {
  if (basis_.empty()) throw std::invalid_argument("LieAlgebra: empty basis");
  if (labels_.size() != basis_.size())
    throw std::invalid_argument("LieAlgebra: label/basis size mismatch");
  if (rank_ < 1) throw std::invalid_argument("LieAlgebra: rank must be positive");
  const int d = dim();
  ad_.assign(d, Mat::Zero(d, d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      CMat br = basis_[i] * basis_[j] - basis_[j] * basis_[i];
      for (int k = 0; k < d; ++k) ad_[i](k, j) = matrix_inner(br, basis_[k]);
    }
  }
}

int LieAlgebra::label_index(const std::string& label) const {
  for (int i = 0; i < dim(); ++i)
    if (labels_[i] == label) return i;
  throw std::invalid_argument("LieAlgebra: unknown label " + label);
}

Mat LieAlgebra::ad(const Eigen::Ref<const Vec>& x) const {
  if (x.size() != dim()) throw std::invalid_argument("ad: dimension mismatch");
  Mat M = Mat::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i)
    if (x(i) != 0.0) M += x(i) * ad_[i];
  return M;
}

Vec LieAlgebra::bracket(const Eigen::Ref<const Vec>& x,
                        const Eigen::Ref<const Vec>& y) const {
  if (x.size() != dim() || y.size() != dim())
    throw std::invalid_argument("bracket: dimension mismatch");
  Vec out = Vec::Zero(dim());
  for (int i = 0; i < dim(); ++i)
    if (x(i) != 0.0) out.noalias() += x(i) * (ad_[i] * y);
  return out;
}

CMat LieAlgebra::to_matrix(const Eigen::Ref<const Vec>& x) const {
  if (x.size() != dim()) throw std::invalid_argument("to_matrix: dimension mismatch");
  CMat X = CMat::Zero(matrix_size(), matrix_size());
  for (int i = 0; i < dim(); ++i)
    if (x(i) != 0.0) X += x(i) * basis_[i];
  return X;
}

Vec LieAlgebra::from_matrix(const CMat& X) const {
  Vec x(dim());
  for (int i = 0; i < dim(); ++i) x(i) = matrix_inner(X, basis_[i]);
  return x;
}

double LieAlgebra::antisymmetry_residual() const {
  const int d = dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        worst = std::max(worst, std::abs(structure(i, j, k) + structure(j, i, k)));
  return worst;
}

double LieAlgebra::jacobi_residual() const {
  const int d = dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double sum = 0.0;
          for (int m = 0; m < d; ++m)
            sum += structure(i, j, m) * structure(m, k, l) +
                   structure(j, k, m) * structure(m, i, l) +
                   structure(k, i, m) * structure(m, j, l);
          worst = std::max(worst, std::abs(sum));
        }
  return worst;
}

double LieAlgebra::orthonormality_residual() const {
  const int d = dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      double g = matrix_inner(basis_[i], basis_[j]);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

double LieAlgebra::ad_invariance_residual() const {
  const int d = dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        worst = std::max(worst, std::abs(structure(i, j, k) + structure(i, k, j)));
  return worst;
}

double LieAlgebra::ad_invariance_residual(int samples, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec x = random_unit(dim(), rng);
    Vec y = random_unit(dim(), rng);
    Vec z = random_unit(dim(), rng);
    worst = std::max(worst,
                     std::abs(bracket(x, y).dot(z) + y.dot(bracket(x, z))));
  }
  return worst;
}

LieAlgebra build_so(int n) {
  if (n < 2) throw std::invalid_argument("build_so: n must be >= 2");
  std::vector<CMat> basis;
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      basis.push_back(unit_entry(n, i, j) - unit_entry(n, j, i));
      labels.push_back("f_" + std::to_string(i + 1) + std::to_string(j + 1));
    }
  return LieAlgebra("so(" + std::to_string(n) + ")", std::move(labels),
                    std::move(basis), std::max(1, n / 2));
}

LieAlgebra build_u(int n) {
  if (n < 1) throw std::invalid_argument("build_u: n must be >= 1");
  std::vector<CMat> basis;
  std::vector<std::string> labels;
  const double r2 = std::sqrt(2.0);
  for (int k = 0; k < n; ++k) {
    basis.push_back(kI * r2 * unit_entry(n, k, k));
    labels.push_back("d_" + std::to_string(k + 1));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      basis.push_back(unit_entry(n, i, j) - unit_entry(n, j, i));
      labels.push_back("a_" + std::to_string(i + 1) + std::to_string(j + 1));
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      basis.push_back(kI * (unit_entry(n, i, j) + unit_entry(n, j, i)));
      labels.push_back("s_" + std::to_string(i + 1) + std::to_string(j + 1));
    }
  return LieAlgebra("u(" + std::to_string(n) + ")", std::move(labels),
                    std::move(basis), n);
}

namespace {

// Complex 2x2 block of the quaternion a + bi + cj + dk.
CMat quat_block(double a, double b, double c, double d) {
  CMat B(2, 2);
  B(0, 0) = std::complex<double>(a, b);
  B(0, 1) = std::complex<double>(c, d);
  B(1, 0) = std::complex<double>(-c, d);
  B(1, 1) = std::complex<double>(a, -b);
  return B;
}

// n x n quaternionic matrix with quaternion q at (p, q_col) and -conj(q)
// at (q_col, p), embedded into C^{2n x 2n}.
CMat quat_entry_pair(int n, int p, int q_col, double a, double b, double c,
                     double d) {
  CMat X = CMat::Zero(2 * n, 2 * n);
  X.block(2 * p, 2 * q_col, 2, 2) = quat_block(a, b, c, d);
  if (p != q_col)
    X.block(2 * q_col, 2 * p, 2, 2) = quat_block(-a, b, c, d);
  return X;
}

}  // namespace

LieAlgebra build_sp(int n) {
  if (n < 1) throw std::invalid_argument("build_sp: n must be >= 1");
  std::vector<CMat> basis;
  std::vector<std::string> labels;
  const char* units = "ijk";
  for (int p = 0; p < n; ++p)
    for (int u = 0; u < 3; ++u) {
      double b = u == 0, c = u == 1, d = u == 2;
      basis.push_back(quat_entry_pair(n, p, p, 0.0, b, c, d));
      labels.push_back(std::string(1, units[u]) + "_" + std::to_string(p + 1) +
                       std::to_string(p + 1));
    }
  const double inv_r2 = 1.0 / std::sqrt(2.0);
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q)
      for (int u = 0; u < 4; ++u) {
        double a = u == 0, b = u == 1, c = u == 2, d = u == 3;
        basis.push_back(inv_r2 *
                        quat_entry_pair(n, p, q, a, b, c, d));
        const char* tags = "eijk";
        labels.push_back(std::string(1, tags[u]) + "_" + std::to_string(p + 1) +
                         std::to_string(q + 1));
      }
  return LieAlgebra("sp(" + std::to_string(n) + ")", std::move(labels),
                    std::move(basis), n);
}

LieAlgebra build_so3_body() {
  const int n = 3;
  auto f = [&](int i, int j) -> CMat {
    return unit_entry(n, i, j) - unit_entry(n, j, i);
  };
  std::vector<CMat> basis = {-f(1, 2), f(0, 2), -f(0, 1)};
  return LieAlgebra("so(3)-body", {"L1", "L2", "L3"}, std::move(basis), 1);
}

Subspace::Subspace(const LieAlgebra& alg, const Mat& spanning) : alg_(&alg) {
  if (spanning.rows() != alg.dim())
    throw std::invalid_argument("Subspace: ambient dimension mismatch");
  basis_ = orthonormal_columns(spanning);
}

Subspace Subspace::from_axes(const LieAlgebra& alg, const std::vector<int>& axes) {
  Subspace s(alg);
  s.basis_ = Mat::Zero(alg.dim(), static_cast<Eigen::Index>(axes.size()));
  for (size_t k = 0; k < axes.size(); ++k) {
    if (axes[k] < 0 || axes[k] >= alg.dim())
      throw std::invalid_argument("Subspace::from_axes: axis out of range");
    s.basis_(axes[k], static_cast<Eigen::Index>(k)) = 1.0;
  }
  return s;
}

Subspace Subspace::from_labels(const LieAlgebra& alg,
                               const std::vector<std::string>& labels) {
  std::vector<int> axes;
  axes.reserve(labels.size());
  for (const auto& l : labels) axes.push_back(alg.label_index(l));
  return from_axes(alg, axes);
}

Subspace Subspace::zero(const LieAlgebra& alg) {
  Subspace s(alg);
  s.basis_ = Mat(alg.dim(), 0);
  return s;
}

Subspace Subspace::full(const LieAlgebra& alg) {
  Subspace s(alg);
  s.basis_ = Mat::Identity(alg.dim(), alg.dim());
  return s;
}

bool Subspace::contains(const Eigen::Ref<const Vec>& x, double tol) const {
  return (x - project(x)).norm() <= tol * std::max(1.0, x.norm());
}

bool Subspace::contains(const Subspace& other, double tol) const {
  for (int k = 0; k < other.dim(); ++k)
    if (!contains(other.basis_vector(k), tol)) return false;
  return true;
}

Subspace Subspace::orthogonal_complement() const {
  Subspace s(*alg_);
  s.basis_ = orthonormal_complement(basis_, ambient_dim());
  return s;
}

Subspace Subspace::complement_in(const Subspace& larger) const {
  if (!larger.contains(*this))
    throw std::invalid_argument("complement_in: subspace not contained");
  // Complement of our coordinates inside the larger basis.
  Mat coords_in_larger = larger.basis().transpose() * basis_;
  Mat comp = orthonormal_complement(orthonormal_columns(coords_in_larger),
                                    larger.dim());
  Subspace s(*alg_);
  s.basis_ = larger.basis() * comp;
  return s;
}

bool Subspace::is_subalgebra(double tol) const {
  for (int i = 0; i < dim(); ++i)
    for (int j = i + 1; j < dim(); ++j) {
      Vec br = alg_->bracket(basis_.col(i), basis_.col(j));
      if ((br - project(br)).norm() > tol) return false;
    }
  return true;
}

double Subspace::orthonormality_residual() const {
  if (dim() == 0) return 0.0;
  return (basis_.transpose() * basis_ - Mat::Identity(dim(), dim()))
      .cwiseAbs()
      .maxCoeff();
}

Subspace bracket_closure(const LieAlgebra& alg, const Subspace& D) {
  if (D.dim() == 0)
    throw std::invalid_argument("bracket_closure: empty subspace");
  Mat span = D.basis();
  for (;;) {
    const int k = static_cast<int>(span.cols());
    Mat grown(alg.dim(), k + k * (k - 1) / 2);
    grown.leftCols(k) = span;
    int col = k;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        grown.col(col++) = alg.bracket(span.col(i), span.col(j));
    Mat next = orthonormal_columns(grown);
    if (next.cols() == span.cols()) return Subspace(alg, next);
    span = next;
  }
}

}  // namespace eps
