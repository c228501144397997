#include "eps/metric.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace eps {

bool is_spd(const Mat& M, double* min_eig, double* max_eig) {
  if (M.rows() != M.cols() || M.rows() == 0) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(M);
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  if (min_eig) *min_eig = lo;
  if (max_eig) *max_eig = hi;
  return lo > 1e-12 * std::max(hi, 0.0) && lo > 0.0;
}

MetricOperator MetricOperator::from_matrix(Mat M) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("MetricOperator: matrix not square");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("MetricOperator: matrix not symmetric");
  M = 0.5 * (M + M.transpose());
  if (!is_spd(M))
    throw std::invalid_argument("MetricOperator: matrix not positive definite");
  return MetricOperator{std::move(M)};
}

MetricOperator make_block_metric(const std::vector<Subspace>& decomp,
                                 const std::vector<Mat>& blocks) {
  if (decomp.empty() || decomp.size() != blocks.size())
    throw std::invalid_argument("make_block_metric: decomposition/blocks mismatch");
  const int n = decomp.front().ambient_dim();
  Mat sum_proj = Mat::Zero(n, n);
  Mat A = Mat::Zero(n, n);
  for (size_t i = 0; i < decomp.size(); ++i) {
    const Subspace& S = decomp[i];
    if (S.ambient_dim() != n)
      throw std::invalid_argument("make_block_metric: ambient dimension mismatch");
    if (blocks[i].rows() != S.dim() || blocks[i].cols() != S.dim())
      throw std::invalid_argument("make_block_metric: block size mismatch");
    if (!is_spd(blocks[i]))
      throw std::invalid_argument("make_block_metric: block " + std::to_string(i) +
                                  " is not SPD");
    sum_proj += S.projector();
    A += S.basis() * blocks[i] * S.basis().transpose();
  }
  if ((sum_proj - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument(
        "make_block_metric: subspaces do not form an orthogonal spanning "
        "decomposition");
  return MetricOperator::from_matrix(std::move(A));
}

double ChainSpec::validation_residual() const {
  double worst = 0.0;
  for (size_t i = 0; i < levels.size(); ++i) {
    const Subspace& G = levels[i];
    for (int p = 0; p < G.dim(); ++p)
      for (int q = p + 1; q < G.dim(); ++q) {
        Vec br = alg->bracket(G.basis_vector(p), G.basis_vector(q));
        worst = std::max(worst, (br - G.project(br)).norm());
      }
  }
  for (size_t i = 1; i < levels.size(); ++i) {
    const Subspace& Gprev = levels[i - 1];
    const Subspace& V = complements[i - 1];
    worst = std::max(worst, (Gprev.basis().transpose() * V.basis())
                                .cwiseAbs()
                                .maxCoeff());
    for (int p = 0; p < Gprev.dim(); ++p)
      for (int q = 0; q < V.dim(); ++q) {
        Vec br = alg->bracket(Gprev.basis_vector(p), V.basis_vector(q));
        worst = std::max(worst, (br - V.project(br)).norm());
      }
  }
  return worst;
}

ChainSpec make_chain(const LieAlgebra& alg, std::vector<Subspace> levels) {
  if (levels.size() < 2)
    throw std::invalid_argument("make_chain: need at least two levels");
  ChainSpec chain;
  chain.alg = &alg;
  chain.levels = std::move(levels);
  for (size_t i = 1; i < chain.levels.size(); ++i) {
    if (!chain.levels[i].contains(chain.levels[i - 1]))
      throw std::invalid_argument("make_chain: levels are not nested");
    chain.complements.push_back(
        chain.levels[i - 1].complement_in(chain.levels[i]));
  }
  if (chain.validation_residual() > 1e-12)
    throw std::invalid_argument("make_chain: chain conditions violated");
  return chain;
}

ChainSpec so_chain(const LieAlgebra& so_n, int k0) {
  if (k0 < 2) throw std::invalid_argument("so_chain: base must be so(2) or larger");
  std::vector<Subspace> levels;
  for (int m = k0;; ++m) {
    std::vector<std::string> labels;
    for (int i = 1; i <= m; ++i)
      for (int j = i + 1; j <= m; ++j)
        labels.push_back("f_" + std::to_string(i) + std::to_string(j));
    levels.push_back(Subspace::from_labels(so_n, labels));
    if (static_cast<int>(labels.size()) == so_n.dim()) break;
    if (m > 64) throw std::invalid_argument("so_chain: not an so(n) model");
  }
  return make_chain(so_n, std::move(levels));
}

namespace {

std::vector<std::string> u_level_labels(int m) {
  std::vector<std::string> labels;
  for (int k = 1; k <= m; ++k) labels.push_back("d_" + std::to_string(k));
  for (int i = 1; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j) {
      labels.push_back("a_" + std::to_string(i) + std::to_string(j));
      labels.push_back("s_" + std::to_string(i) + std::to_string(j));
    }
  return labels;
}

std::vector<std::string> sp_level_labels(int m) {
  std::vector<std::string> labels;
  for (int p = 1; p <= m; ++p)
    for (const char* u : {"i", "j", "k"})
      labels.push_back(std::string(u) + "_" + std::to_string(p) + std::to_string(p));
  for (int p = 1; p <= m; ++p)
    for (int q = p + 1; q <= m; ++q)
      for (const char* u : {"e", "i", "j", "k"})
        labels.push_back(std::string(u) + "_" + std::to_string(p) + std::to_string(q));
  return labels;
}

}  // namespace

ChainSpec u_chain(const LieAlgebra& u_n, int k0) {
  if (k0 < 1) throw std::invalid_argument("u_chain: base must be u(1) or larger");
  std::vector<Subspace> levels;
  for (int m = k0;; ++m) {
    auto labels = u_level_labels(m);
    levels.push_back(Subspace::from_labels(u_n, labels));
    if (static_cast<int>(labels.size()) == u_n.dim()) break;
    // intermediate step u(m) + u(1): adjoin the next diagonal unit
    labels.push_back("d_" + std::to_string(m + 1));
    levels.push_back(Subspace::from_labels(u_n, labels));
    if (m > 64) throw std::invalid_argument("u_chain: not a u(n) model");
  }
  return make_chain(u_n, std::move(levels));
}

ChainSpec sp_chain(const LieAlgebra& sp_n, int k0) {
  if (k0 < 1) throw std::invalid_argument("sp_chain: base must be sp(1) or larger");
  std::vector<Subspace> levels;
  for (int m = k0;; ++m) {
    auto labels = sp_level_labels(m);
    levels.push_back(Subspace::from_labels(sp_n, labels));
    if (static_cast<int>(labels.size()) == sp_n.dim()) break;
    for (const char* u : {"i", "j", "k"})
      labels.push_back(std::string(u) + "_" + std::to_string(m + 1) +
                       std::to_string(m + 1));
    levels.push_back(Subspace::from_labels(sp_n, labels));
    if (m > 32) throw std::invalid_argument("sp_chain: not an sp(n) model");
  }
  return make_chain(sp_n, std::move(levels));
}

MetricOperator make_chain_metric(const ChainSpec& chain, const Mat& A0,
                                 const std::vector<double>& s) {
  if (static_cast<int>(s.size()) != chain.length())
    throw std::invalid_argument("make_chain_metric: one s_i per complement required");
  for (double si : s)
    if (!(si > 0.0))
      throw std::invalid_argument("make_chain_metric: s_i must be positive");
  std::vector<Subspace> decomp;
  std::vector<Mat> blocks;
  decomp.push_back(chain.base());
  blocks.push_back(A0);
  for (int i = 0; i < chain.length(); ++i) {
    decomp.push_back(chain.complements[i]);
    blocks.push_back(s[i] *
                     Mat::Identity(chain.complements[i].dim(), chain.complements[i].dim()));
  }
  return make_block_metric(decomp, blocks);
}

Subspace centralizer(const LieAlgebra& alg, const Eigen::Ref<const Vec>& a) {
  Mat ada = alg.ad(a);
  Eigen::JacobiSVD<Mat> svd(ada, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int r = 0;
  while (r < sv.size() && sv(r) > 1e-10 * sv(0)) ++r;
  return Subspace(alg, svd.matrixV().rightCols(alg.dim() - r));
}

SectionalOperator make_sectional_operator(const LieAlgebra& alg,
                                          const Subspace& K,
                                          const Eigen::Ref<const Vec>& a,
                                          const Eigen::Ref<const Vec>& b,
                                          const Mat& R) {
  if (!K.contains(a) || !K.contains(b))
    throw std::invalid_argument("make_sectional_operator: a, b must lie in K");
  if (R.rows() != K.dim() || R.cols() != K.dim())
    throw std::invalid_argument("make_sectional_operator: R size mismatch");
  if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + R.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("make_sectional_operator: R not symmetric");

  // Regularity: the centralizer of a must be exactly K.
  Mat ada = alg.ad(a);
  const int kernel_dim = alg.dim() - numerical_rank(ada, 1e-10);
  if (kernel_dim != K.dim())
    throw std::invalid_argument(
        "make_sectional_operator: a is not regular (centralizer dimension " +
        std::to_string(kernel_dim) + " != dim K)");

  Subspace P = K.orthogonal_complement();
  Mat Ma = P.basis().transpose() * ada * P.basis();
  Mat Mb = P.basis().transpose() * alg.ad(b) * P.basis();
  Eigen::ColPivHouseholderQR<Mat> qr(Ma);
  qr.setThreshold(1e-10);
  if (qr.rank() < P.dim())
    throw std::invalid_argument(
        "make_sectional_operator: ad_a singular on the complement of K");
  Mat phiP = qr.solve(Mb);

  SectionalOperator out;
  out.matrix = K.basis() * R * K.basis().transpose() +
               P.basis() * phiP * P.basis().transpose();
  out.symmetry_residual =
      (out.matrix - out.matrix.transpose()).cwiseAbs().maxCoeff();
  if (out.symmetry_residual > 1e-8 * (1.0 + out.matrix.cwiseAbs().maxCoeff()))
    throw std::invalid_argument(
        "make_sectional_operator: result not symmetric (b outside K or bad data)");
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose());
  out.positive_definite = is_spd(out.matrix, &out.min_eigenvalue, &out.max_eigenvalue);
  return out;
}

MetricOperator SectionalOperator::as_metric() const {
  if (!positive_definite)
    throw std::invalid_argument("SectionalOperator: not positive definite");
  return MetricOperator{matrix};
}

Mat restrict_operator(const Mat& A, const Subspace& sub, double tol) {
  Mat AB = A * sub.basis();
  Mat off = AB - sub.basis() * (sub.basis().transpose() * AB);
  if (off.norm() > tol * (1.0 + A.norm()))
    throw std::invalid_argument("restrict_operator: operator does not preserve subspace");
  return sub.basis().transpose() * AB;
}

}  // namespace eps
