#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "eps/metric.hpp"

namespace eps {

/// Thrown when the integrator cannot keep the state on the constraint
/// manifold at the requested tolerance.
struct NumericalRejection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Left-invariant distribution D = {w : <w, a^i> = 0} given by constant
/// independent constraint vectors a^i.
class Distribution {
public:
  Distribution(const LieAlgebra& alg, const Mat& constraints);

  const LieAlgebra& algebra() const { return *alg_; }
  int ambient_dim() const { return static_cast<int>(constraints_.rows()); }
  int num_constraints() const { return static_cast<int>(constraints_.cols()); }
  const Mat& constraints() const { return constraints_; }
  /// Admissible velocities, the orthogonal complement of span{a^i}.
  const Subspace& D() const { return D_; }
  /// Constraint span L = span{a^i}.
  const Subspace& L() const { return L_; }

private:
  const LieAlgebra* alg_;
  Mat constraints_;
  Subspace D_;
  Subspace L_;
};

using VectorField = std::function<Vec(const Vec&)>;

/// Euler-Poincare field xdot = [x, B x] for a symmetric operator B.
Vec ep_field(const LieAlgebra& alg, const Mat& B, const Eigen::Ref<const Vec>& x);
VectorField make_ep_field(const LieAlgebra& alg, Mat B);

/// One Euler-Poincare-Suslov instance; precomputes the Gram data for the
/// multiplier and projection solves.
class EpsSystem {
public:
  EpsSystem(const LieAlgebra& alg, MetricOperator A, Distribution dist);

  const LieAlgebra& algebra() const { return *alg_; }
  const MetricOperator& metric() const { return A_; }
  const Distribution& distribution() const { return dist_; }

  /// Multipliers solving sum_j <A a^j, a^i> l_j = -<A [x, Ax], a^i>.
  Vec multipliers(const Eigen::Ref<const Vec>& x) const;
  /// xdot = [x, Ax] + sum_i l_i a^i; tangent to M by construction.
  Vec field(const Eigen::Ref<const Vec>& x) const;
  VectorField as_field() const;

  double hamiltonian(const Eigen::Ref<const Vec>& x) const { return A_.energy(x); }
  /// max_i |<A x, a^i>|.
  double constraint_residual(const Eigen::Ref<const Vec>& x) const;
  /// Metric-orthogonal correction onto M = I(D): x + delta with delta in
  /// span{a^i} and <A(x + delta), a^i> = 0.
  Vec project_onto_M(const Eigen::Ref<const Vec>& x) const;

private:
  const LieAlgebra* alg_;
  MetricOperator A_;
  Distribution dist_;
  Mat A_constraints_;               // A a^i, columns
  Eigen::LDLT<Mat> gram_;           // <A a^j, a^i>
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::map<std::string, std::vector<double>> monitors;

  int size() const { return static_cast<int>(times.size()); }
  const Vec& initial() const { return states.front(); }
  const Vec& final() const { return states.back(); }
  double monitor_drift(const std::string& name) const;
  double monitor_max(const std::string& name) const;
};

struct IntegrateOptions {
  double h = 1e-3;
  double T = 10.0;
  int stride = 1;          // record every stride-th step
  bool projection = true;  // EPS runs only
  double reject_tol = 1e-9;
};

/// Classical 4th-order one-step method.
Vec rk4_step(const VectorField& f, const Vec& x, double h);

/// Integrate a generic field; monitors record named scalar functions at
/// every sample.
Trajectory integrate(const VectorField& f, const Vec& x0, const IntegrateOptions& opt,
                     const std::map<std::string, std::function<double(const Vec&)>>&
                         monitors = {});

/// Integrate an EPS instance with post-step constraint projection and the
/// standard monitors H, F = <x,x>, constraint_max, lambda_max.
Trajectory integrate_eps(const EpsSystem& sys, const Vec& x0,
                         const IntegrateOptions& opt);

struct GroupTrajectory {
  std::vector<double> times;
  std::vector<CMat> elements;
  double max_drift = 0.0;  // worst |g* g - Id| before re-orthonormalization

  int size() const { return static_cast<int>(times.size()); }
  double unitarity_residual() const;
};

/// Solve the kinematic equation gdot = g * hat(w(t)), w = A x(t), with
/// cubic Hermite interpolation of w between trajectory samples and polar
/// re-orthonormalization after each step.
GroupTrajectory reconstruct_group(const LieAlgebra& alg, const MetricOperator& A,
                                  const Trajectory& traj, const CMat& g0,
                                  int substeps = 1);

/// Scalar function with its gradient, used for brackets, integral families
/// and inheritance tests.
struct ScalarField {
  std::string name;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
};

/// Gradient consistency against central finite differences (step 1e-5);
/// returns the worst relative error over the samples.
double gradient_consistency(const ScalarField& F, const std::vector<Vec>& samples,
                            double fd_step = 1e-5);

/// Almost-Poisson bracket {F1, F2}_D(xi) = <xi, [grad F2, grad F1]> with
/// gradients projected to D. For D = G this is the Lie-Poisson bracket.
double almost_poisson(const LieAlgebra& alg, const Subspace& D, const ScalarField& F1,
                      const ScalarField& F2, const Eigen::Ref<const Vec>& xi);

/// Cyclic sum {{F1,F2},F3} + {{F2,F3},F1} + {{F3,F1},F2} with the outer
/// gradients taken by central differences in D.
double jacobiator(const LieAlgebra& alg, const Subspace& D, const ScalarField& F1,
                  const ScalarField& F2, const ScalarField& F3,
                  const Eigen::Ref<const Vec>& xi, double fd_step = 1e-4);

/// Divergence of the field restricted to an orthonormal tangent frame
/// (columns), by central differences.
double divergence(const VectorField& f, const Mat& frame,
                  const Eigen::Ref<const Vec>& x, double fd_step = 1e-5);

struct InheritanceReport {
  bool passed = false;
  double worst_residual = 0.0;     // max |sum_i l_i <grad F, a^i>| over samples
  double worst_ep_residual = 0.0;  // max |<grad F, [x, Ax]>|, F as EP integral
};

/// Criterion for an Euler-Poincare integral F to survive the constraint
/// forces: sum_i l_i <grad F, a^i> = 0 on M.
InheritanceReport integral_inheritance_check(const EpsSystem& sys, const ScalarField& F,
                                             const std::vector<Vec>& samples,
                                             double tol = 1e-9);

}  // namespace eps
