#include "eps/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace eps {

Distribution::Distribution(const LieAlgebra& alg, const Mat& constraints)
    : alg_(&alg),
      constraints_(constraints),
      D_(Subspace::zero(alg)),
      L_(Subspace::zero(alg)) {
  if (constraints_.rows() != alg.dim())
    throw std::invalid_argument("Distribution: constraint dimension mismatch");
  if (constraints_.cols() > 0) {
    if (numerical_rank(constraints_, 1e-10) < constraints_.cols())
      throw std::invalid_argument("Distribution: constraints are dependent");
    L_ = Subspace(alg, constraints_);
    D_ = L_.orthogonal_complement();
  } else {
    D_ = Subspace::full(alg);
  }
}

Vec ep_field(const LieAlgebra& alg, const Mat& B, const Eigen::Ref<const Vec>& x) {
  return alg.bracket(x, B * x);
}

VectorField make_ep_field(const LieAlgebra& alg, Mat B) {
  return [&alg, B = std::move(B)](const Vec& x) { return alg.bracket(x, B * x); };
}

EpsSystem::EpsSystem(const LieAlgebra& alg, MetricOperator A, Distribution dist)
    : alg_(&alg), A_(std::move(A)), dist_(std::move(dist)) {
  if (A_.dim() != alg.dim() || dist_.ambient_dim() != alg.dim())
    throw std::invalid_argument("EpsSystem: dimension mismatch");
  A_constraints_ = A_.A * dist_.constraints();
  if (dist_.num_constraints() > 0) {
    Mat gram = dist_.constraints().transpose() * A_constraints_;
    gram_.compute(gram);
    if (gram_.info() != Eigen::Success ||
        (gram_.vectorD().array() <= 1e-14 * gram.norm()).any())
      throw std::invalid_argument("EpsSystem: singular constraint Gram matrix");
  }
}

Vec EpsSystem::multipliers(const Eigen::Ref<const Vec>& x) const {
  if (dist_.num_constraints() == 0) return Vec(0);
  Vec b = alg_->bracket(x, A_.A * x);
  Vec rhs = -(A_constraints_.transpose() * b);
  return gram_.solve(rhs);
}

Vec EpsSystem::field(const Eigen::Ref<const Vec>& x) const {
  Vec b = alg_->bracket(x, A_.A * x);
  if (dist_.num_constraints() == 0) return b;
  Vec rhs = -(A_constraints_.transpose() * b);
  return b + dist_.constraints() * gram_.solve(rhs);
}

VectorField EpsSystem::as_field() const {
  return [this](const Vec& x) { return field(x); };
}

double EpsSystem::constraint_residual(const Eigen::Ref<const Vec>& x) const {
  if (dist_.num_constraints() == 0) return 0.0;
  return (A_constraints_.transpose() * x).cwiseAbs().maxCoeff();
}

Vec EpsSystem::project_onto_M(const Eigen::Ref<const Vec>& x) const {
  if (dist_.num_constraints() == 0) return x;
  Vec mu = gram_.solve(-(A_constraints_.transpose() * x));
  return x + dist_.constraints() * mu;
}

double Trajectory::monitor_drift(const std::string& name) const {
  const auto& v = monitors.at(name);
  if (v.empty()) return 0.0;
  double lo = v.front(), hi = v.front();
  for (double t : v) {
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return hi - lo;
}

double Trajectory::monitor_max(const std::string& name) const {
  const auto& v = monitors.at(name);
  double m = 0.0;
  for (double t : v) m = std::max(m, std::abs(t));
  return m;
}

Vec rk4_step(const VectorField& f, const Vec& x, double h) {
  Vec k1 = f(x);
  Vec k2 = f(x + (0.5 * h) * k1);
  Vec k3 = f(x + (0.5 * h) * k2);
  Vec k4 = f(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

int step_count(const IntegrateOptions& opt) {
  if (!(opt.h > 0.0) || !(opt.T > 0.0))
    throw std::invalid_argument("integrate: h and T must be positive");
  return std::max(1, static_cast<int>(std::llround(opt.T / opt.h)));
}

}  // namespace

Trajectory integrate(const VectorField& f, const Vec& x0, const IntegrateOptions& opt,
                     const std::map<std::string, std::function<double(const Vec&)>>&
                         monitors) {
  const int n_steps = step_count(opt);
  Trajectory traj;
  auto record = [&](double t, const Vec& x) {
    traj.times.push_back(t);
    traj.states.push_back(x);
    for (const auto& [name, fn] : monitors) traj.monitors[name].push_back(fn(x));
  };
  Vec x = x0;
  record(0.0, x);
  for (int k = 1; k <= n_steps; ++k) {
    x = rk4_step(f, x, opt.h);
    if (k % opt.stride == 0 || k == n_steps) record(k * opt.h, x);
  }
  return traj;
}

Trajectory integrate_eps(const EpsSystem& sys, const Vec& x0,
                         const IntegrateOptions& opt) {
  const int n_steps = step_count(opt);
  VectorField f = sys.as_field();
  Trajectory traj;
  auto record = [&](double t, const Vec& x) {
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.monitors["H"].push_back(sys.hamiltonian(x));
    traj.monitors["F"].push_back(x.squaredNorm());
    traj.monitors["constraint_max"].push_back(sys.constraint_residual(x));
    Vec lam = sys.multipliers(x);
    traj.monitors["lambda_max"].push_back(
        lam.size() ? lam.cwiseAbs().maxCoeff() : 0.0);
  };
  Vec x = x0;
  record(0.0, x);
  for (int k = 1; k <= n_steps; ++k) {
    x = rk4_step(f, x, opt.h);
    if (opt.projection) {
      x = sys.project_onto_M(x);
      double res = sys.constraint_residual(x);
      if (!(res <= opt.reject_tol))  // also catches NaN after blow-up
        throw NumericalRejection("integrate_eps: constraint residual " +
                                 std::to_string(res) + " after projection at t = " +
                                 std::to_string(k * opt.h));
    }
    if (k % opt.stride == 0 || k == n_steps) record(k * opt.h, x);
  }
  return traj;
}

double GroupTrajectory::unitarity_residual() const {
  double worst = 0.0;
  for (const auto& g : elements) {
    CMat I = CMat::Identity(g.rows(), g.cols());
    worst = std::max(worst, (g.adjoint() * g - I).cwiseAbs().maxCoeff());
  }
  return worst;
}

GroupTrajectory reconstruct_group(const LieAlgebra& alg, const MetricOperator& A,
                                  const Trajectory& traj, const CMat& g0,
                                  int substeps) {
  const int m = traj.size();
  if (m < 2) throw std::invalid_argument("reconstruct_group: trajectory too short");
  if (substeps < 1) throw std::invalid_argument("reconstruct_group: substeps < 1");

  // Body velocities at samples and Hermite slopes by central differences.
  std::vector<Vec> omega(m);
  for (int k = 0; k < m; ++k) omega[k] = A.A * traj.states[k];
  std::vector<Vec> slope(m);
  for (int k = 0; k < m; ++k) {
    int lo = std::max(0, k - 1), hi = std::min(m - 1, k + 1);
    slope[k] = (omega[hi] - omega[lo]) / (traj.times[hi] - traj.times[lo]);
  }
  auto omega_at = [&](int k, double t) {
    // Hermite cubic on [t_k, t_{k+1}].
    double dt = traj.times[k + 1] - traj.times[k];
    double u = (t - traj.times[k]) / dt;
    double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    double h10 = u * (1 - u) * (1 - u);
    double h01 = u * u * (3 - 2 * u);
    double h11 = u * u * (u - 1);
    return Vec(h00 * omega[k] + h10 * dt * slope[k] + h01 * omega[k + 1] +
               h11 * dt * slope[k + 1]);
  };

  GroupTrajectory out;
  out.times = traj.times;
  out.elements.reserve(m);
  CMat g = nearest_unitary(g0);
  out.elements.push_back(g);
  const CMat I = CMat::Identity(g.rows(), g.cols());
  for (int k = 0; k + 1 < m; ++k) {
    double h = (traj.times[k + 1] - traj.times[k]) / substeps;
    for (int s = 0; s < substeps; ++s) {
      double t = traj.times[k] + s * h;
      auto rhs = [&](double tt, const CMat& gg) -> CMat {
        return gg * alg.to_matrix(omega_at(k, tt));
      };
      CMat k1 = rhs(t, g);
      CMat k2 = rhs(t + 0.5 * h, g + (0.5 * h) * k1);
      CMat k3 = rhs(t + 0.5 * h, g + (0.5 * h) * k2);
      CMat k4 = rhs(t + h, g + h * k3);
      g += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      double drift = (g.adjoint() * g - I).cwiseAbs().maxCoeff();
      out.max_drift = std::max(out.max_drift, drift);
      if (drift > 1e-6)
        throw NumericalRejection(
            "reconstruct_group: group-manifold drift " + std::to_string(drift) +
            " (step too large)");
      g = nearest_unitary(g);
    }
    out.elements.push_back(g);
  }
  return out;
}

double gradient_consistency(const ScalarField& F, const std::vector<Vec>& samples,
                            double fd_step) {
  double worst = 0.0;
  for (const Vec& x : samples) {
    Vec g = F.grad(x);
    Vec fd(x.size());
    for (int i = 0; i < x.size(); ++i) {
      Vec xp = x, xm = x;
      xp(i) += fd_step;
      xm(i) -= fd_step;
      fd(i) = (F.value(xp) - F.value(xm)) / (2.0 * fd_step);
    }
    worst = std::max(worst, (g - fd).norm() / std::max(1.0, g.norm()));
  }
  return worst;
}

double almost_poisson(const LieAlgebra& alg, const Subspace& D, const ScalarField& F1,
                      const ScalarField& F2, const Eigen::Ref<const Vec>& xi) {
  Vec g1 = D.project(F1.grad(xi));
  Vec g2 = D.project(F2.grad(xi));
  return xi.dot(alg.bracket(g2, g1));
}

namespace {

// Gradient (in D) of xi -> {F1, F2}_D(xi) by central differences along D.
Vec bracket_gradient(const LieAlgebra& alg, const Subspace& D, const ScalarField& F1,
                     const ScalarField& F2, const Vec& xi, double fd_step) {
  Vec g = Vec::Zero(xi.size());
  for (int k = 0; k < D.dim(); ++k) {
    Vec dir = D.basis_vector(k);
    double fp = almost_poisson(alg, D, F1, F2, xi + fd_step * dir);
    double fm = almost_poisson(alg, D, F1, F2, xi - fd_step * dir);
    g += ((fp - fm) / (2.0 * fd_step)) * dir;
  }
  return g;
}

}  // namespace

double jacobiator(const LieAlgebra& alg, const Subspace& D, const ScalarField& F1,
                  const ScalarField& F2, const ScalarField& F3,
                  const Eigen::Ref<const Vec>& xi, double fd_step) {
  Vec x = xi;
  auto term = [&](const ScalarField& A, const ScalarField& B, const ScalarField& C) {
    Vec gAB = bracket_gradient(alg, D, A, B, x, fd_step);
    Vec gC = D.project(C.grad(x));
    return x.dot(alg.bracket(gC, gAB));
  };
  return term(F1, F2, F3) + term(F2, F3, F1) + term(F3, F1, F2);
}

double divergence(const VectorField& f, const Mat& frame,
                  const Eigen::Ref<const Vec>& x, double fd_step) {
  double div = 0.0;
  for (int k = 0; k < frame.cols(); ++k) {
    Vec dir = frame.col(k);
    Vec fp = f(x + fd_step * dir);
    Vec fm = f(x - fd_step * dir);
    div += dir.dot(fp - fm) / (2.0 * fd_step);
  }
  return div;
}

InheritanceReport integral_inheritance_check(const EpsSystem& sys, const ScalarField& F,
                                             const std::vector<Vec>& samples,
                                             double tol) {
  InheritanceReport rep;
  const Mat& C = sys.distribution().constraints();
  for (const Vec& x0 : samples) {
    Vec x = sys.project_onto_M(x0);
    Vec g = F.grad(x);
    Vec lam = sys.multipliers(x);
    double r = lam.size() ? std::abs(lam.dot(C.transpose() * g)) : 0.0;
    rep.worst_residual = std::max(rep.worst_residual, r);
    double ep = std::abs(g.dot(sys.algebra().bracket(x, sys.metric().A * x)));
    rep.worst_ep_residual = std::max(rep.worst_ep_residual, ep);
  }
  rep.passed = rep.worst_residual <= tol;
  return rep;
}

}  // namespace eps
