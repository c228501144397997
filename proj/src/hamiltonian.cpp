#include "eps/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "eps/integrable.hpp"

namespace eps {

HStar build_Hstar(const LieAlgebra& alg, const Subspace& L, const MetricOperator& A) {
  Subspace D = L.orthogonal_complement();
  restrict_operator(A.A, D);  // throws when A does not preserve the split
  Mat PD = D.projector();
  Mat A_star = PD * A.A * PD;
  A_star = 0.5 * (A_star + A_star.transpose());
  HStar out;
  out.A_star = A_star;
  out.H.name = "H*";
  out.H.value = [A_star](const Vec& x) { return 0.5 * x.dot(A_star * x); };
  out.H.grad = [A_star](const Vec& x) { return Vec(A_star * x); };
  (void)alg;
  return out;
}

double adL_invariance_test(const LieAlgebra& alg, const Subspace& L,
                           const ScalarField& F, const std::vector<Vec>& samples) {
  Subspace D = L.orthogonal_complement();
  double worst = 0.0;
  for (const Vec& s : samples) {
    Vec xi = D.project(s);
    Vec g = F.grad(xi);
    worst = std::max(worst, L.coords(alg.bracket(xi, g)).cwiseAbs().maxCoeff());
  }
  return worst;
}

double lie_poisson_bracket(const LieAlgebra& alg, const ScalarField& F,
                           const ScalarField& G, const Eigen::Ref<const Vec>& x) {
  return x.dot(alg.bracket(G.grad(x), F.grad(x)));
}

CoincidenceReport coincidence_check(const LieAlgebra& alg, const MetricOperator& A,
                                    const Subspace& L, const Vec& xi0, const Vec& eta0,
                                    const CoincidenceOptions& opt) {
  CoincidenceReport rep;
  Subspace D = L.orthogonal_complement();
  if (!D.contains(xi0, 1e-9))
    throw std::invalid_argument("coincidence_check: xi0 must lie in D");
  if (eta0.size() && !L.contains(eta0, 1e-9))
    throw std::invalid_argument("coincidence_check: eta0 must lie in L");

  Mat AD = restrict_operator(A.A, D);
  std::mt19937_64 rng(opt.seed);
  for (int i = 0; i < opt.invariance_samples; ++i) {
    Vec xi = D.lift(random_unit(D.dim(), rng));
    rep.invariance_residual =
        std::max(rep.invariance_residual,
                 L.coords(alg.bracket(xi, A.A * xi)).cwiseAbs().maxCoeff());
  }
  rep.bracket_generating = bracket_closure(alg, D).dim() == alg.dim();

  HStar hstar = build_Hstar(alg, L, A);
  EpsSystem eps_sys(alg, A, Distribution(alg, L.basis()));

  IntegrateOptions iopt;
  iopt.h = opt.h;
  iopt.T = opt.T;
  iopt.stride = std::max(1, static_cast<int>(std::llround(opt.T / opt.h)) / 256);

  Trajectory t_eps = integrate_eps(eps_sys, xi0, iopt);
  Trajectory t_h = integrate(make_ep_field(alg, A.A), xi0, iopt);
  Trajectory t_hstar = integrate(make_ep_field(alg, hstar.A_star), xi0, iopt);

  auto off_D = [&](const Trajectory& t) {
    double worst = 0.0;
    for (const Vec& x : t.states)
      worst = std::max(worst, L.coords(x).cwiseAbs().maxCoeff());
    return worst;
  };
  rep.off_D_max = std::max({off_D(t_eps), off_D(t_h), off_D(t_hstar)});
  rep.d_eps_h = (t_eps.final() - t_h.final()).norm();
  rep.d_eps_hstar = (t_eps.final() - t_hstar.final()).norm();
  rep.d_h_hstar = (t_h.final() - t_hstar.final()).norm();

  if (eta0.size()) {
    Trajectory t_mixed = integrate(make_ep_field(alg, hstar.A_star),
                                   Vec(xi0 + eta0), iopt);
    rep.eta_drift = (L.coords(t_mixed.final()) - L.coords(eta0)).norm();
  }
  rep.passed = rep.invariance_residual < 1e-10 && rep.bracket_generating &&
               rep.d_eps_h < opt.distance_tol && rep.d_eps_hstar < opt.distance_tol &&
               rep.d_h_hstar < opt.distance_tol && rep.off_D_max < opt.off_D_tol &&
               rep.eta_drift < opt.eta_tol;
  return rep;
}

ScalarField trace_power(const LieAlgebra& alg, int m) {
  if (m < 1) throw std::invalid_argument("trace_power: degree must be positive");
  ScalarField F;
  F.name = "p_" + std::to_string(m);
  const bool even = m % 2 == 0;
  F.value = [&alg, m, even](const Vec& x) {
    CMat X = alg.to_matrix(x);
    CMat P = X;
    for (int i = 1; i < m; ++i) P = P * X;
    std::complex<double> t = P.trace();
    return even ? t.real() : t.imag();
  };
  F.grad = [&alg, m, even](const Vec& x) {
    CMat X = alg.to_matrix(x);
    CMat P = CMat::Identity(X.rows(), X.cols());
    for (int i = 1; i < m; ++i) P = P * X;
    Vec g(alg.dim());
    for (int i = 0; i < alg.dim(); ++i) {
      std::complex<double> t = (P * alg.basis()[i]).trace();
      g(i) = static_cast<double>(m) * (even ? t.real() : t.imag());
    }
    return g;
  };
  return F;
}

std::vector<int> invariant_degrees(const LieAlgebra& alg) {
  std::vector<int> degs;
  const std::string& n = alg.name();
  if (n.rfind("so", 0) == 0) {
    for (int m = 2; m <= 2 * alg.rank(); m += 2) degs.push_back(m);
  } else if (n.rfind("u(", 0) == 0) {
    for (int m = 1; m <= alg.rank(); ++m) degs.push_back(m);
  } else if (n.rfind("sp", 0) == 0) {
    for (int m = 2; m <= 2 * alg.rank(); m += 2) degs.push_back(m);
  } else {
    for (int m = 2; m <= 2 * alg.rank(); m += 2) degs.push_back(m);
  }
  return degs;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 8; ++k) grid.push_back(0.25 * k);
  return grid;
}

namespace {

ScalarField projected_shift_member(const LieAlgebra& alg, const ScalarField& p,
                                   const Subspace& Gprev, const Subspace& Vi,
                                   double lambda) {
  ScalarField F;
  F.name = p.name + "(x_{" + std::to_string(Gprev.dim()) + "} + " +
           std::to_string(lambda) + " x_V)";
  Mat Pg = Gprev.projector();
  Mat Pv = Vi.projector();
  F.value = [p, Pg, Pv, lambda](const Vec& x) {
    return p.value(Pg * x + lambda * (Pv * x));
  };
  F.grad = [p, Pg, Pv, lambda](const Vec& x) {
    Vec g = p.grad(Pg * x + lambda * (Pv * x));
    return Vec(Pg * g + lambda * (Pv * g));
  };
  (void)alg;
  return F;
}

bool is_abelian(const LieAlgebra& alg, const Subspace& S) {
  for (int i = 0; i < S.dim(); ++i)
    for (int j = i + 1; j < S.dim(); ++j)
      if (alg.bracket(S.basis_vector(i), S.basis_vector(j)).norm() > 1e-12)
        return false;
  return true;
}

}  // namespace

IntegralFamily mikityuk_family(const LieAlgebra& alg, const ChainSpec& chain,
                               const std::vector<double>& lambdas) {
  IntegralFamily fam;
  fam.name = "chain-lift";

  // Every chain step must be a symmetric pair inside G_i or have a
  // subalgebra complement.
  for (int i = 0; i < chain.length(); ++i) {
    const Subspace& Gi = chain.levels[i + 1];
    const Subspace& Gprev = chain.levels[i];
    const Subspace& Vi = chain.complements[i];
    bool v_subalgebra = Vi.is_subalgebra(1e-10);
    double pair_res = 0.0;
    for (int p = 0; p < Vi.dim(); ++p)
      for (int q = p + 1; q < Vi.dim(); ++q) {
        Vec br = alg.bracket(Vi.basis_vector(p), Vi.basis_vector(q));
        pair_res = std::max(pair_res, (br - Gprev.project(br)).norm());
        if (!Gi.contains(br, 1e-10)) pair_res = 1.0;
      }
    if (!v_subalgebra && pair_res > 1e-10)
      throw std::invalid_argument(
          "mikityuk_family: step " + std::to_string(i + 1) +
          " is neither a symmetric pair nor a subalgebra complement");
  }

  // F_0 on the base subalgebra.
  const Subspace& base = chain.base();
  if (is_abelian(alg, base)) {
    for (int j = 0; j < base.dim(); ++j) {
      ScalarField F;
      F.name = "coord_" + std::to_string(j);
      Vec dir = base.basis_vector(j);
      F.value = [dir](const Vec& x) { return dir.dot(x); };
      F.grad = [dir](const Vec& x) {
        (void)x;
        return dir;
      };
      fam.members.push_back(std::move(F));
    }
  } else {
    // argument shift inside the base: p_m(x_{G_0} + mu a0)
    std::mt19937_64 rng(1234);
    Vec a0 = base.lift(random_unit(base.dim(), rng));
    Mat Pg = base.projector();
    for (int m : invariant_degrees(alg))
      for (double mu : lambdas) {
        ScalarField p = trace_power(alg, m);
        ScalarField F;
        F.name = "base:" + p.name + "@" + std::to_string(mu);
        F.value = [p, Pg, a0, mu](const Vec& x) { return p.value(Pg * x + mu * a0); };
        F.grad = [p, Pg, a0, mu](const Vec& x) {
          return Vec(Pg * p.grad(Pg * x + mu * a0));
        };
        fam.members.push_back(std::move(F));
      }
  }

  for (int i = 0; i < chain.length(); ++i) {
    const Subspace& Gprev = chain.levels[i];
    const Subspace& Vi = chain.complements[i];
    for (int m : invariant_degrees(alg))
      for (double lam : lambdas)
        fam.members.push_back(
            projected_shift_member(alg, trace_power(alg, m), Gprev, Vi, lam));
  }
  return fam;
}

IntegralFamily shifted_invariants(const LieAlgebra& alg, const Vec& a,
                                  const std::vector<double>& lambdas) {
  IntegralFamily fam;
  fam.name = "argument-shift";
  for (int m : invariant_degrees(alg))
    for (double lam : lambdas) {
      ScalarField p = trace_power(alg, m);
      ScalarField F;
      F.name = p.name + "(x + " + std::to_string(lam) + " a)";
      Vec shift = lam * a;
      F.value = [p, shift](const Vec& x) { return p.value(x + shift); };
      F.grad = [p, shift](const Vec& x) { return p.grad(x + shift); };
      fam.members.push_back(std::move(F));
    }
  return fam;
}

InvolutionCertificate certify_family(const LieAlgebra& alg, const IntegralFamily& family,
                                     int points, std::uint64_t seed,
                                     double involution_tol, const Subspace* D) {
  InvolutionCertificate cert;
  cert.family = family.name;
  cert.points_tested = points;
  cert.target_k = (alg.dim() + alg.rank()) / 2;

  std::mt19937_64 rng(seed);
  const int nf = static_cast<int>(family.members.size());
  for (int p = 0; p < points; ++p) {
    Vec x = random_unit(alg.dim(), rng);
    Mat grads(alg.dim(), nf);
    for (int i = 0; i < nf; ++i) grads.col(i) = family.members[i].grad(x);
    for (int i = 0; i < nf; ++i)
      for (int j = i + 1; j < nf; ++j)
        cert.max_involution_residual =
            std::max(cert.max_involution_residual,
                     std::abs(x.dot(alg.bracket(grads.col(j), grads.col(i)))));
    cert.independent_count =
        std::max(cert.independent_count, numerical_rank(grads, 1e-8));
  }
  cert.involutive = cert.max_involution_residual < involution_tol;
  cert.complete = cert.independent_count >= cert.target_k;

  if (D) {
    int d_rank = 0;
    for (int p = 0; p < 20; ++p) {
      Vec xi = D->lift(random_unit(D->dim(), rng));
      Mat grads(alg.dim(), nf);
      for (int i = 0; i < nf; ++i) grads.col(i) = family.members[i].grad(xi);
      d_rank = std::max(d_rank, numerical_rank(grads, 1e-8));
    }
    cert.d_restricted_independent = d_rank >= cert.target_k;
  }
  return cert;
}

Vec random_regular_element(const LieAlgebra& alg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vec a = random_unit(alg.dim(), rng);
    if (alg.dim() - numerical_rank(alg.ad(a), 1e-10) == alg.rank()) return a;
  }
  throw std::runtime_error("random_regular_element: rejection sampling failed");
}

}  // namespace eps
