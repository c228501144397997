#pragma once

#include <optional>

#include "eps/dynamics.hpp"

namespace eps {

struct PairCheck {
  bool is_pair = false;
  double res_hh = 0.0;  // [H,H] c H
  double res_hv = 0.0;  // [H,V] c V
  double res_vv = 0.0;  // [V,V] c H
  double worst() const { return std::max(res_hh, std::max(res_hv, res_vv)); }
};

/// Symmetric-pair test for (G, H) with V = H-perp.
PairCheck check_symmetric_pair(const LieAlgebra& alg, const Subspace& H,
                               double tol = 1e-12);

struct IsotypicBlocks {
  Subspace V0;                   // kernel of every ad_eta, eta in K
  std::vector<Subspace> blocks;  // 2-dim rotation-invariant pieces
  std::vector<double> frequencies;  // matching rotation speeds, ascending
};

/// Decomposition of an ad_K-invariant subspace V under an abelian K into
/// the trivial part and 2-dimensional eigen-blocks of ad_eta for a generic
/// generator eta. Throws for non-abelian K (unsupported).
IsotypicBlocks isotypic_decomposition(const LieAlgebra& alg, const Subspace& K,
                                      const Subspace& V);

/// Data of the K c H c G construction: D = U + W_0 + ... + W_n with
/// A_D = s Id on U, arbitrary SPD blocks elsewhere, A_L on L = D-perp.
struct PairSetupInput {
  Subspace H;
  Subspace K;
  Subspace U;
  std::optional<Subspace> W0;
  std::vector<Subspace> Wk;
  double s = 1.0;
  Mat A_W0;              // SPD on W0 coordinates (ignored when W0 empty)
  std::vector<Mat> A_Wk; // SPD on W_k coordinates
  Mat A_L;               // SPD on L coordinates
};

class SymmetricPairSetup {
public:
  SymmetricPairSetup(const LieAlgebra& alg, PairSetupInput input);

  const LieAlgebra& algebra() const { return *alg_; }
  const Subspace& H() const { return in_.H; }
  const Subspace& V() const { return V_; }
  const Subspace& K() const { return in_.K; }
  const Subspace& U() const { return in_.U; }
  const Subspace& W0() const { return *W0_; }
  const std::vector<Subspace>& W() const { return in_.Wk; }
  double s() const { return in_.s; }
  /// B_k = A_D|_{W_k} - s Id in W_k coordinates.
  const std::vector<Mat>& B() const { return B_; }
  const Subspace& D() const { return eps_->distribution().D(); }
  const Subspace& L() const { return eps_->distribution().L(); }
  const MetricOperator& metric() const { return eps_->metric(); }
  const EpsSystem& eps() const { return *eps_; }

  /// Reduced field (1.1): P_D [xi, A_D xi].
  Vec reduced_field(const Eigen::Ref<const Vec>& xi) const;
  VectorField as_reduced_field() const;

private:
  const LieAlgebra* alg_;
  PairSetupInput in_;
  Subspace V_;
  std::optional<Subspace> W0_;
  std::vector<Mat> B_;
  std::optional<EpsSystem> eps_;
};

struct Theorem31Values {
  double H_D = 0.0;
  double F = 0.0;          // <xi, xi>
  Vec F0;                  // W_0 coordinates of xi
  std::vector<double> Fk;  // <B_k xi_k, xi_k>
};

Theorem31Values theorem31_integrals(const SymmetricPairSetup& setup,
                                    const Eigen::Ref<const Vec>& xi);

struct SplitRhs {
  Vec dU;                // [xi_W, A_W xi_W]_U
  Vec dW0;               // identically zero
  std::vector<Vec> dWk;  // [xi_U, B_k xi_k]_{W_k}
  Vec recombined;        // sum of the pieces, ambient coordinates
};

SplitRhs split_equations(const SymmetricPairSetup& setup,
                         const Eigen::Ref<const Vec>& xi);

struct TorusData {
  Vec c0;                 // level of the W_0 projection
  std::vector<double> c;  // F_k levels, k = 1..n
  double c_total = 0.0;   // F level
  std::vector<double> b;  // min eigenvalue of B_k
  double compactness_margin = 0.0;  // c_total - |c0|^2 - sum c_k / b_k
};

TorusData torus_levels(const SymmetricPairSetup& setup, const Eigen::Ref<const Vec>& xi0);

struct FrequencyReport {
  std::vector<double> omega;            // averaged frequencies, 2-dim blocks
  std::vector<double> ratios;           // omega_k / omega_1, k >= 2
  double compactness_margin = 0.0;
  /// Conformal factor on the chosen (+) component as a function of the
  /// block angles.
  std::function<double(const Vec&)> Phi;
};

/// Averaged frequencies of Corollary 3.1: omega_k = 2 pi / int ds / f_k(s)
/// with f_k from the arc-of-ellipse parametrization of F_k = c_k; adaptive
/// quadrature at relative tolerance 1e-10. Requires dim U = 1 and 2-dim
/// moving blocks; throws when the compactness inequality fails or an f_k
/// vanishes.
FrequencyReport frequencies(const SymmetricPairSetup& setup, const TorusData& levels);

/// Least-squares winding slopes of the block angles along a long
/// integration of the reduced flow, discarding the first 20%.
std::vector<double> rotation_numbers(const SymmetricPairSetup& setup, const Vec& xi0,
                                     double T, double h, int stride = 100);

/// Chain-of-subalgebras reduction: chain metric (A_0, s_k) and distribution
/// D = D_0 + D_1 + ... + D_n with D_0 c G_0 and D_k c V_k.
class ChainReduction {
public:
  ChainReduction(const ChainSpec& chain, const Mat& A0, std::vector<double> s,
                 const Mat& constraints0, std::vector<Mat> constraints_k);

  const ChainSpec& chain() const { return chain_; }
  const EpsSystem& full() const { return *full_; }
  const Subspace& D0() const { return D0_; }
  const std::vector<Subspace>& Dk() const { return Dk_; }

  /// Base field (2.5) plus the triangular cascade (2.6), assembled on
  /// G_0 + D_1 + ... + D_n.
  Vec cascade_field(const Eigen::Ref<const Vec>& x) const;
  VectorField as_cascade_field() const;

private:
  ChainSpec chain_;
  Mat A0_;
  std::vector<double> s_;
  Mat constraints0_;
  std::optional<EpsSystem> base_;  // EPS restricted to the base subalgebra
  std::optional<EpsSystem> full_;
  Subspace D0_;
  std::vector<Subspace> Dk_;
};

/// Suslov rigid body: xdot = x cross A0 x + lambda a0 on
/// M0 = {x : <A0 x, a0> = 0}.
Vec suslov_field(const Mat& A0, const Eigen::Ref<const Vec>& a0,
                 const Eigen::Ref<const Vec>& x);

struct SuslovCloudOptions {
  int cloud_size = 16;
  double T = 50.0;
  double h = 1e-3;
  double energy = 0.5;
  int divergence_samples = 100;
  std::uint64_t seed = 42;
};

struct AsymptoticReport {
  bool eigenvector_regime = false;
  double max_abs_divergence = 0.0;
  double diameter_initial = 0.0;
  double diameter_final = 0.0;         // forward cloud
  double backward_diameter_final = 0.0;
  Vec forward_ray;                     // unit direction of the forward limit
  Vec backward_ray;
  double ray_alignment = 0.0;          // <forward, backward>, ~ -1 when opposite
  double max_ray_distance_final = 0.0;
};

/// Forward/backward cloud experiment on one energy level of the Suslov
/// plane, plus the divergence sampling behind the measure claims.
AsymptoticReport asymptotic_diagnostics(const Mat& A0, const Eigen::Ref<const Vec>& a0,
                                        const SuslovCloudOptions& opt = {});

/// Count of independent adjoint-invariant polynomials on V_k:
/// dim V_k - dim G_{k-1} + generic centralizer dimension.
int adjoint_invariant_count(const LieAlgebra& alg, const Subspace& Gprev,
                            const Subspace& Vk, int samples = 32,
                            std::uint64_t seed = 42);

struct PeriodResult {
  bool found = false;
  double period = 0.0;
  double return_distance = std::numeric_limits<double>::infinity();
};

/// Nearest-return search for a periodic trajectory of the field, with two
/// step-refinement passes around the coarse minimum.
PeriodResult detect_period(const VectorField& f, const Vec& x0, double h = 1e-3,
                           double t_max = 200.0);

}  // namespace eps
