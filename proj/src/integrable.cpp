#include "eps/integrable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace eps {

namespace {

double inclusion_residual(const LieAlgebra& alg, const Subspace& A, const Subspace& B,
                          const Subspace& target) {
  double worst = 0.0;
  for (int i = 0; i < A.dim(); ++i)
    for (int j = 0; j < B.dim(); ++j) {
      Vec br = alg.bracket(A.basis_vector(i), B.basis_vector(j));
      worst = std::max(worst, (br - target.project(br)).norm());
    }
  return worst;
}

}  // namespace

PairCheck check_symmetric_pair(const LieAlgebra& alg, const Subspace& H, double tol) {
  Subspace V = H.orthogonal_complement();
  PairCheck out;
  out.res_hh = inclusion_residual(alg, H, H, H);
  out.res_hv = inclusion_residual(alg, H, V, V);
  out.res_vv = inclusion_residual(alg, V, V, H);
  out.is_pair = out.worst() <= tol;
  return out;
}

IsotypicBlocks isotypic_decomposition(const LieAlgebra& alg, const Subspace& K,
                                      const Subspace& V) {
  if (K.dim() == 0)
    throw std::invalid_argument("isotypic_decomposition: K is empty");
  if (!K.is_subalgebra())
    throw std::invalid_argument("isotypic_decomposition: K is not a subalgebra");
  for (int i = 0; i < K.dim(); ++i)
    for (int j = i + 1; j < K.dim(); ++j)
      if (alg.bracket(K.basis_vector(i), K.basis_vector(j)).norm() > 1e-12)
        throw std::invalid_argument(
            "isotypic_decomposition: non-abelian K is unsupported");

  // Generic generator: fixed incommensurate weights keep the construction
  // deterministic for dim K > 1.
  Vec eta = Vec::Zero(alg.dim());
  for (int i = 0; i < K.dim(); ++i)
    eta += std::pow(std::numbers::pi, -i) * K.basis_vector(i);
  eta.normalize();

  Mat S = V.basis().transpose() * alg.ad(eta) * V.basis();
  // invariance of V under ad_K
  if ((alg.ad(eta) * V.basis() - V.basis() * S).norm() > 1e-10 * (1.0 + S.norm()))
    throw std::invalid_argument("isotypic_decomposition: V is not ad_K invariant");

  const std::complex<double> im(0.0, 1.0);
  Eigen::SelfAdjointEigenSolver<CMat> es(im * S.cast<std::complex<double>>());
  const Vec& theta = es.eigenvalues();
  double scale = theta.cwiseAbs().maxCoeff();
  double tol = 1e-10 * std::max(1.0, scale);

  IsotypicBlocks out{Subspace::zero(alg), {}, {}};
  Mat kernel(V.dim(), 0);
  for (int k = 0; k < theta.size(); ++k) {
    if (std::abs(theta(k)) <= tol) {
      CVec z = es.eigenvectors().col(k);
      Mat cols(V.dim(), 2);
      cols.col(0) = z.real();
      cols.col(1) = z.imag();
      Mat grown(V.dim(), kernel.cols() + 2);
      grown << kernel, cols;
      kernel = orthonormal_columns(grown);
    } else if (theta(k) > tol) {
      CVec z = es.eigenvectors().col(k);
      Mat frame(V.dim(), 2);
      frame.col(0) = std::sqrt(2.0) * z.real();
      frame.col(1) = std::sqrt(2.0) * z.imag();
      out.blocks.emplace_back(alg, V.basis() * frame);
      out.frequencies.push_back(theta(k));
    }
  }
  out.V0 = kernel.cols() ? Subspace(alg, V.basis() * kernel) : Subspace::zero(alg);

  // ascending frequency order
  std::vector<size_t> order(out.blocks.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return out.frequencies[a] < out.frequencies[b];
  });
  std::vector<Subspace> blocks;
  std::vector<double> freqs;
  for (size_t i : order) {
    blocks.push_back(out.blocks[i]);
    freqs.push_back(out.frequencies[i]);
  }
  out.blocks = std::move(blocks);
  out.frequencies = std::move(freqs);
  return out;
}

SymmetricPairSetup::SymmetricPairSetup(const LieAlgebra& alg, PairSetupInput input)
    : alg_(&alg), in_(std::move(input)), V_(Subspace::zero(alg)) {
  PairCheck pc = check_symmetric_pair(alg, in_.H);
  if (!pc.is_pair)
    throw std::invalid_argument("SymmetricPairSetup: (G, H) is not a symmetric pair");
  V_ = in_.H.orthogonal_complement();
  if (!in_.H.contains(in_.K) || !in_.K.is_subalgebra())
    throw std::invalid_argument("SymmetricPairSetup: K must be a subalgebra of H");
  if (!in_.K.contains(in_.U) || in_.U.dim() < 1)
    throw std::invalid_argument("SymmetricPairSetup: U must be a nonempty subspace of K");
  if (!(in_.s > 0.0)) throw std::invalid_argument("SymmetricPairSetup: s must be positive");

  W0_ = in_.W0 ? *in_.W0 : Subspace::zero(alg);
  if (W0_->dim() > 0) {
    if (!V_.contains(*W0_))
      throw std::invalid_argument("SymmetricPairSetup: W0 must lie in V");
    for (int i = 0; i < in_.K.dim(); ++i)
      for (int j = 0; j < W0_->dim(); ++j)
        if (alg.bracket(in_.K.basis_vector(i), W0_->basis_vector(j)).norm() > 1e-10)
          throw std::invalid_argument("SymmetricPairSetup: ad_K does not vanish on W0");
    if (!is_spd(in_.A_W0))
      throw std::invalid_argument("SymmetricPairSetup: A_W0 must be SPD");
  }
  if (in_.A_Wk.size() != in_.Wk.size())
    throw std::invalid_argument("SymmetricPairSetup: one A_Wk block per W_k required");
  for (size_t k = 0; k < in_.Wk.size(); ++k) {
    if (!V_.contains(in_.Wk[k]))
      throw std::invalid_argument("SymmetricPairSetup: W_k must lie in V");
    for (int i = 0; i < in_.K.dim(); ++i) {
      Mat img = Mat::Zero(alg.dim(), in_.Wk[k].dim());
      for (int j = 0; j < in_.Wk[k].dim(); ++j)
        img.col(j) = alg.bracket(in_.K.basis_vector(i), in_.Wk[k].basis_vector(j));
      if ((img - in_.Wk[k].projector() * img).norm() > 1e-10)
        throw std::invalid_argument("SymmetricPairSetup: W_k not ad_K invariant");
    }
    if (!is_spd(in_.A_Wk[k]))
      throw std::invalid_argument("SymmetricPairSetup: A_Wk must be SPD");
    B_.push_back(in_.A_Wk[k] -
                 in_.s * Mat::Identity(in_.Wk[k].dim(), in_.Wk[k].dim()));
  }

  // Assemble D, L and the block metric A = A_L + s Id_U + A_W0 + sum A_Wk.
  std::vector<Subspace> decomp;
  std::vector<Mat> blocks;
  decomp.push_back(in_.U);
  blocks.push_back(in_.s * Mat::Identity(in_.U.dim(), in_.U.dim()));
  if (W0_->dim() > 0) {
    decomp.push_back(*W0_);
    blocks.push_back(in_.A_W0);
  }
  for (size_t k = 0; k < in_.Wk.size(); ++k) {
    decomp.push_back(in_.Wk[k]);
    blocks.push_back(in_.A_Wk[k]);
  }
  int d_dim = 0;
  Mat d_span(alg.dim(), 0);
  for (const auto& S : decomp) {
    Mat grown(alg.dim(), d_span.cols() + S.dim());
    grown << d_span, S.basis();
    d_span = grown;
    d_dim += S.dim();
  }
  Subspace D(alg, d_span);
  if (D.dim() != d_dim)
    throw std::invalid_argument("SymmetricPairSetup: U, W0, W_k are not independent");
  Subspace L = D.orthogonal_complement();
  if (L.dim() > 0) {
    if (in_.A_L.rows() != L.dim() || !is_spd(in_.A_L))
      throw std::invalid_argument("SymmetricPairSetup: A_L must be SPD on L");
    decomp.push_back(L);
    blocks.push_back(in_.A_L);
  }
  MetricOperator A = make_block_metric(decomp, blocks);
  eps_.emplace(alg, std::move(A), Distribution(alg, L.basis()));
}

Vec SymmetricPairSetup::reduced_field(const Eigen::Ref<const Vec>& xi) const {
  return D().project(alg_->bracket(xi, eps_->metric().A * xi));
}

VectorField SymmetricPairSetup::as_reduced_field() const {
  return [this](const Vec& xi) { return reduced_field(xi); };
}

Theorem31Values theorem31_integrals(const SymmetricPairSetup& setup,
                                    const Eigen::Ref<const Vec>& xi) {
  Theorem31Values out;
  out.H_D = setup.metric().energy(xi);
  out.F = xi.squaredNorm();
  out.F0 = setup.W0().coords(xi);
  for (size_t k = 0; k < setup.W().size(); ++k) {
    Vec w = setup.W()[k].coords(xi);
    out.Fk.push_back(w.dot(setup.B()[k] * w));
  }
  return out;
}

SplitRhs split_equations(const SymmetricPairSetup& setup,
                         const Eigen::Ref<const Vec>& xi) {
  const LieAlgebra& alg = setup.algebra();
  Vec xi_U = setup.U().project(xi);
  Vec xi_W = setup.W0().project(xi);
  for (const auto& Wk : setup.W()) xi_W += Wk.project(xi);

  Vec A_xi_W = setup.metric().A * xi_W;

  SplitRhs out;
  out.dU = setup.U().project(alg.bracket(xi_W, A_xi_W));
  out.dW0 = Vec::Zero(alg.dim());
  out.recombined = out.dU;
  for (size_t k = 0; k < setup.W().size(); ++k) {
    const Subspace& Wk = setup.W()[k];
    Vec Bk_xi = Wk.lift(setup.B()[k] * Wk.coords(xi));
    Vec d = Wk.project(alg.bracket(xi_U, Bk_xi));
    out.dWk.push_back(d);
    out.recombined += d;
  }
  return out;
}

TorusData torus_levels(const SymmetricPairSetup& setup, const Eigen::Ref<const Vec>& xi0) {
  TorusData out;
  Theorem31Values vals = theorem31_integrals(setup, xi0);
  out.c0 = vals.F0;
  out.c = vals.Fk;
  out.c_total = vals.F;
  double sum = out.c0.squaredNorm();
  for (size_t k = 0; k < setup.B().size(); ++k) {
    Eigen::SelfAdjointEigenSolver<Mat> es(setup.B()[k]);
    out.b.push_back(es.eigenvalues().minCoeff());
    if (!(out.b.back() > 0.0))
      throw std::invalid_argument("torus_levels: B_k is not positive definite");
    sum += out.c[k] / out.b.back();
  }
  out.compactness_margin = out.c_total - sum;
  return out;
}

namespace {

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double tol = rel_tol * std::max(1.0, std::abs(whole));
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

FrequencyReport frequencies(const SymmetricPairSetup& setup, const TorusData& levels) {
  if (setup.U().dim() != 1)
    throw std::invalid_argument("frequencies: dim U = 1 is required");
  if (!(levels.compactness_margin > 0.0))
    throw std::invalid_argument("frequencies: compactness inequality violated");

  const LieAlgebra& alg = setup.algebra();
  Vec eta = setup.U().basis_vector(0);

  FrequencyReport out;
  out.compactness_margin = levels.compactness_margin;

  struct BlockParam {
    Mat axes;      // eigenvectors of B_k (columns, W_k coords)
    Vec beta;      // eigenvalues of B_k
    double level;  // c_k
    int index;
  };
  std::vector<BlockParam> moving;
  double fixed_sum = levels.c0.squaredNorm();
  for (size_t k = 0; k < setup.W().size(); ++k) {
    if (setup.W()[k].dim() == 2) {
      Eigen::SelfAdjointEigenSolver<Mat> es(setup.B()[k]);
      moving.push_back({es.eigenvectors(), es.eigenvalues(), levels.c[k],
                        static_cast<int>(k)});
    } else if (setup.W()[k].dim() == 1) {
      fixed_sum += levels.c[k] / levels.b[k];
    } else {
      throw std::invalid_argument("frequencies: dim W_k <= 2 is required");
    }
  }

  auto ellipse_point = [](const BlockParam& bp, double phi) -> Vec {
    return std::sqrt(bp.level) *
           (std::cos(phi) / std::sqrt(bp.beta(0)) * bp.axes.col(0) +
            std::sin(phi) / std::sqrt(bp.beta(1)) * bp.axes.col(1));
  };
  auto ellipse_tangent = [](const BlockParam& bp, double phi) -> Vec {
    return std::sqrt(bp.level) *
           (-std::sin(phi) / std::sqrt(bp.beta(0)) * bp.axes.col(0) +
            std::cos(phi) / std::sqrt(bp.beta(1)) * bp.axes.col(1));
  };

  const double two_pi = 2.0 * std::numbers::pi;
  for (const auto& bp : moving) {
    const Subspace& Wk = setup.W()[bp.index];
    const Mat& Bk = setup.B()[bp.index];
    auto f_k = [&](double phi) {
      Vec xi_k = ellipse_point(bp, phi);
      Vec tangent = ellipse_tangent(bp, phi);
      Vec rhs = Wk.coords(alg.bracket(eta, Wk.lift(Bk * xi_k)));
      return rhs.dot(tangent) / tangent.squaredNorm();
    };
    // guard against vanishing f_k before averaging
    double fmin = std::numeric_limits<double>::infinity(), fmax = 0.0;
    bool sign_change = false;
    double first = f_k(0.0);
    for (int i = 0; i <= 64; ++i) {
      double v = f_k(two_pi * i / 64.0);
      fmin = std::min(fmin, std::abs(v));
      fmax = std::max(fmax, std::abs(v));
      if (v * first < 0.0) sign_change = true;
    }
    if (sign_change || fmin <= 1e-12 * std::max(1.0, fmax))
      throw std::invalid_argument("frequencies: f_k vanishes, torus degenerates");
    double avg = adaptive_simpson([&](double s) { return 1.0 / f_k(s); }, 0.0,
                                  two_pi, 1e-10);
    out.omega.push_back(two_pi / avg);
  }
  for (size_t k = 1; k < out.omega.size(); ++k)
    out.ratios.push_back(out.omega[k] / out.omega[0]);

  const double c_total = levels.c_total;
  out.Phi = [moving, fixed_sum, c_total, ellipse_point](const Vec& phi) {
    if (phi.size() != static_cast<Eigen::Index>(moving.size()))
      throw std::invalid_argument("Phi: one angle per 2-dim block expected");
    double sum = fixed_sum;
    for (size_t k = 0; k < moving.size(); ++k)
      sum += ellipse_point(moving[k], phi(static_cast<Eigen::Index>(k))).squaredNorm();
    double val = c_total - sum;
    if (val < 0.0) throw std::invalid_argument("Phi: outside the invariant set");
    return std::sqrt(val);
  };
  return out;
}

std::vector<double> rotation_numbers(const SymmetricPairSetup& setup, const Vec& xi0,
                                     double T, double h, int stride) {
  std::vector<int> moving;
  std::vector<Mat> axes;
  std::vector<Vec> beta;
  for (size_t k = 0; k < setup.W().size(); ++k)
    if (setup.W()[k].dim() == 2) {
      Eigen::SelfAdjointEigenSolver<Mat> es(setup.B()[k]);
      moving.push_back(static_cast<int>(k));
      axes.push_back(es.eigenvectors());
      beta.push_back(es.eigenvalues());
    }

  IntegrateOptions opt;
  opt.h = h;
  opt.T = T;
  opt.stride = stride;
  opt.projection = false;
  Trajectory traj = integrate(setup.as_reduced_field(), xi0, opt);

  const int m = traj.size();
  std::vector<std::vector<double>> angles(moving.size());
  for (int i = 0; i < m; ++i) {
    for (size_t b = 0; b < moving.size(); ++b) {
      Vec w = setup.W()[moving[b]].coords(traj.states[i]);
      Vec z = axes[b].transpose() * w;
      double a = std::atan2(std::sqrt(beta[b](1)) * z(1), std::sqrt(beta[b](0)) * z(0));
      angles[b].push_back(a);
    }
  }
  // unwrap and least-squares slope over the last 80%
  std::vector<double> slopes;
  const double pi = std::numbers::pi;
  for (auto& a : angles) {
    for (size_t i = 1; i < a.size(); ++i) {
      double d = a[i] - a[i - 1];
      while (d > pi) d -= 2 * pi;
      while (d < -pi) d += 2 * pi;
      a[i] = a[i - 1] + d;
    }
    size_t lo = a.size() / 5;
    double st = 0, sa = 0, stt = 0, sta = 0;
    size_t cnt = a.size() - lo;
    for (size_t i = lo; i < a.size(); ++i) {
      double t = traj.times[i];
      st += t;
      sa += a[i];
      stt += t * t;
      sta += t * a[i];
    }
    slopes.push_back((cnt * sta - st * sa) / (cnt * stt - st * st));
  }
  return slopes;
}

ChainReduction::ChainReduction(const ChainSpec& chain, const Mat& A0,
                               std::vector<double> s, const Mat& constraints0,
                               std::vector<Mat> constraints_k)
    : chain_(chain),
      A0_(A0),
      s_(std::move(s)),
      constraints0_(constraints0),
      D0_(Subspace::zero(*chain.alg)),
      Dk_() {
  const LieAlgebra& alg = *chain_.alg;
  if (static_cast<int>(constraints_k.size()) != chain_.length())
    throw std::invalid_argument("ChainReduction: one constraint group per V_k required");

  MetricOperator A = make_chain_metric(chain_, A0, s_);

  // Constraints must live in their pieces.
  const Subspace& G0 = chain_.base();
  for (int c = 0; c < constraints0_.cols(); ++c)
    if (!G0.contains(constraints0_.col(c)))
      throw std::invalid_argument("ChainReduction: base constraint not in G_0");
  for (int k = 0; k < chain_.length(); ++k)
    for (int c = 0; c < constraints_k[k].cols(); ++c)
      if (!chain_.complements[k].contains(constraints_k[k].col(c)))
        throw std::invalid_argument("ChainReduction: constraint a_k not in V_k");

  // D_0 = G_0 ∩ (span a_0)^perp; same pattern per complement below.
  {
    Mat proj = Mat::Identity(alg.dim(), alg.dim());
    if (constraints0_.cols() > 0) {
      Mat C = orthonormal_columns(constraints0_);
      proj -= C * C.transpose();
    }
    D0_ = Subspace(alg, proj * G0.basis());
  }
  for (int k = 0; k < chain_.length(); ++k) {
    Mat proj = Mat::Identity(alg.dim(), alg.dim());
    if (constraints_k[k].cols() > 0) {
      Mat C = orthonormal_columns(constraints_k[k]);
      proj -= C * C.transpose();
    }
    Dk_.push_back(Subspace(alg, proj * chain_.complements[k].basis()));
  }

  // Base and full EPS systems share the chain metric.
  Mat all(alg.dim(), constraints0_.cols() +
                         [&] {
                           Eigen::Index c = 0;
                           for (const auto& M : constraints_k) c += M.cols();
                           return c;
                         }());
  Eigen::Index col = 0;
  all.middleCols(col, constraints0_.cols()) = constraints0_;
  col += constraints0_.cols();
  for (const auto& M : constraints_k) {
    all.middleCols(col, M.cols()) = M;
    col += M.cols();
  }
  if (constraints0_.cols() > 0)
    base_.emplace(alg, A, Distribution(alg, constraints0_));
  full_.emplace(alg, A, Distribution(alg, all));
}

Vec ChainReduction::cascade_field(const Eigen::Ref<const Vec>& x) const {
  const LieAlgebra& alg = *chain_.alg;
  const Mat& A = full_->metric().A;
  Vec x0 = chain_.base().project(x);
  std::vector<Vec> xk;
  for (const auto& Dk : Dk_) xk.push_back(Dk.project(x));

  Vec out = base_ ? base_->field(x0) : alg.bracket(x0, A * x0);
  Vec A0x0 = A * x0;
  for (int k = 0; k < chain_.length(); ++k) {
    Vec y = A0x0 - s_[k] * x0;
    for (int j = 0; j < k; ++j) y += (s_[j] - s_[k]) * xk[j];
    out += Dk_[k].project(alg.bracket(xk[k], y));
  }
  return out;
}

VectorField ChainReduction::as_cascade_field() const {
  return [this](const Vec& x) { return cascade_field(x); };
}

Vec suslov_field(const Mat& A0, const Eigen::Ref<const Vec>& a0,
                 const Eigen::Ref<const Vec>& x) {
  if (A0.rows() != 3 || A0.cols() != 3 || a0.size() != 3 || x.size() != 3)
    throw std::invalid_argument("suslov_field: 3-dimensional data expected");
  Eigen::Vector3d xv = x, av = a0;
  Eigen::Vector3d b = xv.cross(Eigen::Vector3d(A0 * xv));
  double lambda = -(A0 * b).dot(av) / (A0 * av).dot(av);
  return b + lambda * av;
}

AsymptoticReport asymptotic_diagnostics(const Mat& A0, const Eigen::Ref<const Vec>& a0,
                                        const SuslovCloudOptions& opt) {
  AsymptoticReport rep;
  Vec Aa = A0 * a0;
  Vec a_unit = a0 / a0.norm();
  rep.eigenvector_regime = (Aa - Aa.dot(a_unit) * a_unit).norm() <= 1e-10 * Aa.norm();

  // tangent frame of M0 = {x : <A0 x, a0> = 0} = (A0 a0)-perp
  Mat normal = Aa / Aa.norm();
  Mat frame = orthonormal_complement(normal, 3);
  Vec t1 = frame.col(0), t2 = frame.col(1);

  VectorField f = [&A0, a_copy = Vec(a0)](const Vec& x) {
    return suslov_field(A0, a_copy, x);
  };

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < opt.divergence_samples; ++i) {
    Vec x = uni(rng) * t1 + uni(rng) * t2;
    rep.max_abs_divergence =
        std::max(rep.max_abs_divergence, std::abs(divergence(f, frame, x)));
  }

  // cloud on a single energy level of the plane
  std::vector<Vec> cloud;
  for (int k = 0; k < opt.cloud_size; ++k) {
    double th = 2.0 * std::numbers::pi * (k + 0.31) / opt.cloud_size;
    Vec x = std::cos(th) * t1 + std::sin(th) * t2;
    double H = 0.5 * x.dot(A0 * x);
    cloud.push_back(x * std::sqrt(opt.energy / H));
  }
  auto diameter = [](const std::vector<Vec>& pts) {
    double d = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
      for (size_t j = i + 1; j < pts.size(); ++j)
        d = std::max(d, (pts[i] - pts[j]).norm());
    return d;
  };
  rep.diameter_initial = diameter(cloud);

  const int n_steps = static_cast<int>(std::llround(opt.T / opt.h));
  auto evolve = [&](double direction) {
    std::vector<Vec> out;
    VectorField g = [&](const Vec& x) { return Vec(direction * f(x)); };
    for (const Vec& p : cloud) {
      Vec x = p;
      for (int s = 0; s < n_steps; ++s) x = rk4_step(g, x, opt.h);
      out.push_back(x);
    }
    return out;
  };
  std::vector<Vec> fwd = evolve(1.0);
  std::vector<Vec> bwd = evolve(-1.0);
  rep.diameter_final = diameter(fwd);
  rep.backward_diameter_final = diameter(bwd);

  auto mean_ray = [](const std::vector<Vec>& pts) {
    Vec m = Vec::Zero(pts.front().size());
    for (const Vec& p : pts) m += p / p.norm();
    return Vec(m / m.norm());
  };
  rep.forward_ray = mean_ray(fwd);
  rep.backward_ray = mean_ray(bwd);
  rep.ray_alignment = rep.forward_ray.dot(rep.backward_ray);
  for (const Vec& p : fwd)
    rep.max_ray_distance_final =
        std::max(rep.max_ray_distance_final,
                 (p - p.dot(rep.forward_ray) * rep.forward_ray).norm());
  return rep;
}

int adjoint_invariant_count(const LieAlgebra& alg, const Subspace& Gprev,
                            const Subspace& Vk, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int max_rank = 0;
  for (int s = 0; s < samples; ++s) {
    Vec x = Vk.lift(random_unit(Vk.dim(), rng));
    Mat M(Vk.dim(), Gprev.dim());
    for (int j = 0; j < Gprev.dim(); ++j)
      M.col(j) = Vk.coords(alg.bracket(Gprev.basis_vector(j), x));
    max_rank = std::max(max_rank, numerical_rank(M, 1e-10));
  }
  return Vk.dim() - max_rank;
}

PeriodResult detect_period(const VectorField& f, const Vec& x0, double h,
                           double t_max) {
  PeriodResult res;
  double speed = f(x0).norm();
  if (speed < 1e-14) return res;  // equilibrium, no period to detect

  const int n_steps = static_cast<int>(std::llround(t_max / h));
  Vec prev2 = x0, prev1 = rk4_step(f, x0, h);
  double d_prev2 = 0.0, d_prev1 = (prev1 - x0).norm();
  double max_seen = d_prev1;
  bool departed = false;
  Vec refine_start;
  double refine_t0 = 0.0;
  for (int k = 2; k <= n_steps; ++k) {
    Vec x = rk4_step(f, prev1, h);
    double d = (x - x0).norm();
    max_seen = std::max(max_seen, d);
    if (!departed && d > 0.25 * max_seen + 10.0 * h * speed) departed = true;
    if (departed && d_prev1 <= d_prev2 && d_prev1 <= d &&
        d_prev1 < 0.2 * max_seen) {
      refine_start = prev2;
      refine_t0 = (k - 2) * h;
      res.found = true;
      break;
    }
    prev2 = prev1;
    d_prev2 = d_prev1;
    prev1 = x;
    d_prev1 = d;
  }
  if (!res.found) return res;

  // two refinement passes at h/64 and h/4096 around the coarse minimum
  Vec start = refine_start;
  double t0 = refine_t0;
  double span = 2.0 * h;
  for (int pass = 0; pass < 2; ++pass) {
    double hr = h / (pass == 0 ? 64.0 : 4096.0);
    Vec x = start;
    double best_d = (x - x0).norm(), best_t = t0;
    Vec best_x = x;
    int steps = static_cast<int>(std::ceil(span / hr));
    Vec prev = x;
    double tprev = t0;
    for (int k = 1; k <= steps; ++k) {
      x = rk4_step(f, x, hr);
      double d = (x - x0).norm();
      if (d < best_d) {
        best_d = d;
        best_t = t0 + k * hr;
        best_x = prev;
        tprev = t0 + (k - 1) * hr;
      }
      prev = x;
    }
    res.return_distance = best_d;
    res.period = best_t;
    start = best_x;
    t0 = tprev;
    span = 2.0 * hr;
  }
  return res;
}

}  // namespace eps
