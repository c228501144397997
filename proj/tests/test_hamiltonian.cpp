#include <doctest.h>

#include "eps/hamiltonian.hpp"
#include "eps/integrable.hpp"
#include "oracles.hpp"

using namespace eps;

namespace {

// Example 6.1 layout: L = so(2) = span{f_12}, D = V_1 + V_2 with the chain
// metric A = A_L + s_1 Id_{V_1} + s_2 Id_{V_2}.
struct ChainInstance {
  LieAlgebra alg = build_so(4);
  ChainSpec chain = so_chain(alg, 2);
  MetricOperator A;
  ChainInstance(double alpha, double s1, double s2)
      : A(make_chain_metric(chain, alpha * Mat::Identity(1, 1), {s1, s2})) {}
  const Subspace& L() const { return chain.base(); }
};

ScalarField quadratic_field(const Mat& Q) {
  ScalarField F;
  F.name = "quadratic";
  F.value = [Q](const Vec& x) { return 0.5 * x.dot(Q * x); };
  F.grad = [Q](const Vec& x) { return Vec(Q * x); };
  return F;
}

}  // namespace

TEST_CASE("H* kills L and reproduces H_D on D") {
  ChainInstance inst(1.4, 0.9, 1.8);
  HStar hs = build_Hstar(inst.alg, inst.L(), inst.A);

  std::mt19937_64 rng(91);
  Subspace D = inst.L().orthogonal_complement();
  // x in L: H* vanishes
  Vec eta = inst.L().lift(random_gaussian(1, rng));
  CHECK(std::abs(hs.H.value(eta)) < 1e-14);
  // x in D: H* equals H_D
  Vec xi = D.project(random_gaussian(6, rng));
  CHECK(hs.H.value(xi) == doctest::Approx(inst.A.energy(xi)).epsilon(1e-12));

  // spectrum of A* = spectrum of A_D plus a zero per L dimension
  Eigen::SelfAdjointEigenSolver<Mat> es(hs.A_star);
  Vec expect(6);
  expect << 0.0, 0.9, 0.9, 1.8, 1.8, 1.8;
  CHECK((es.eigenvalues() - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Ad_L invariance holds for chain metrics and fails for generic ones") {
  ChainInstance inst(1.4, 0.9, 1.8);
  std::mt19937_64 rng(97);
  std::vector<Vec> samples;
  for (int t = 0; t < 50; ++t) samples.push_back(random_gaussian(6, rng));

  ScalarField HD = quadratic_field(inst.A.A);
  CHECK(adL_invariance_test(inst.alg, inst.L(), HD, samples) < 1e-12);

  // a deliberately broken A_D: random SPD on D, assembled with A_L on L
  Subspace D = inst.L().orthogonal_complement();
  MetricOperator broken = make_block_metric(
      {inst.L(), D}, {Mat::Identity(1, 1), random_spd(5, rng)});
  ScalarField HB = quadratic_field(broken.A);
  CHECK(adL_invariance_test(inst.alg, inst.L(), HB, samples) > 1e-3);
}

TEST_CASE("three flows coincide on the chain instance") {
  ChainInstance inst(1.4, 0.9, 1.8);
  Vec xi0 = Vec::Zero(6);
  xi0(inst.alg.label_index("f_13")) = 0.5;
  xi0(inst.alg.label_index("f_23")) = -0.2;
  xi0(inst.alg.label_index("f_14")) = 0.3;
  xi0(inst.alg.label_index("f_34")) = 0.4;
  Vec eta0 = 0.7 * Vec::Unit(6, inst.alg.label_index("f_12"));

  CoincidenceOptions opt;
  opt.T = 10.0;
  opt.h = 1e-3;
  CoincidenceReport rep = coincidence_check(inst.alg, inst.A, inst.L(), xi0, eta0, opt);
  CHECK(rep.invariance_residual < 1e-10);
  CHECK(rep.bracket_generating);
  CHECK(rep.d_eps_h < 1e-6);
  CHECK(rep.d_eps_hstar < 1e-6);
  CHECK(rep.d_h_hstar < 1e-6);
  CHECK(rep.off_D_max < 1e-8);
  CHECK(rep.eta_drift < 1e-9);
  CHECK(rep.passed);
}

TEST_CASE("coincidence from an equilibrium keeps all flows constant") {
  ChainInstance inst(1.4, 0.9, 1.8);
  // a state inside one complement block is an equilibrium of every flow
  Vec xi0 = Vec::Zero(6);
  xi0(inst.alg.label_index("f_13")) = 0.8;
  CoincidenceOptions opt;
  opt.T = 2.0;
  CoincidenceReport rep = coincidence_check(inst.alg, inst.A, inst.L(), xi0,
                                            Vec(Vec::Zero(6)), opt);
  CHECK(rep.d_eps_h < 1e-14);
  CHECK(rep.d_eps_hstar < 1e-14);
}

TEST_CASE("coincidence on the sectional-operator instance") {
  LieAlgebra so4 = build_so(4);
  Subspace K = Subspace::from_labels(so4, {"f_12", "f_34"});
  Subspace L = Subspace::from_labels(so4, {"f_12"});
  Vec a = 1.3 * Vec::Unit(6, so4.label_index("f_12")) +
          0.4 * Vec::Unit(6, so4.label_index("f_34"));
  Vec b = 1.9 * Vec::Unit(6, so4.label_index("f_12")) +
          0.5 * Vec::Unit(6, so4.label_index("f_34"));
  Mat R(2, 2);
  R << 1.1, 0.0, 0.0, 0.8;
  SectionalOperator phi = make_sectional_operator(so4, K, a, b, R);
  REQUIRE(phi.positive_definite);
  MetricOperator A = phi.as_metric();

  std::mt19937_64 rng(101);
  std::vector<Vec> samples;
  for (int t = 0; t < 50; ++t) samples.push_back(random_gaussian(6, rng));
  ScalarField HD = quadratic_field(A.A);
  CHECK(adL_invariance_test(so4, L, HD, samples) < 1e-10);

  Subspace D = L.orthogonal_complement();
  Vec xi0 = D.project(random_gaussian(6, rng));
  CoincidenceOptions opt;
  opt.T = 5.0;
  CoincidenceReport rep =
      coincidence_check(so4, A, L, xi0, Vec(Vec::Zero(6)), opt);
  CHECK(rep.passed);

  // H* corresponds to the sectional operator with R* = diag(0, r_U)
  Mat Rstar(2, 2);
  Rstar << 0.0, 0.0, 0.0, 0.8;
  SectionalOperator phi_star = make_sectional_operator(so4, K, a, b, Rstar);
  HStar hs = build_Hstar(so4, L, A);
  CHECK((phi_star.matrix - hs.A_star).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Lie-Poisson bracket basics") {
  LieAlgebra body = build_so3_body();
  ScalarField x1, x2;
  x1.value = [](const Vec& x) { return x(0); };
  x1.grad = [](const Vec& x) { (void)x; return Vec(Vec::Unit(3, 0)); };
  x2.value = [](const Vec& x) { return x(1); };
  x2.grad = [](const Vec& x) { (void)x; return Vec(Vec::Unit(3, 1)); };

  std::mt19937_64 rng(103);
  Vec x = random_gaussian(3, rng);
  CHECK(lie_poisson_bracket(body, x1, x2, x) ==
        doctest::Approx(-x(2)).epsilon(1e-12));
  CHECK(lie_poisson_bracket(body, x1, x1, x) == 0.0);

  // trace-power Casimirs commute with arbitrary quadratics
  LieAlgebra so4 = build_so(4);
  for (int m : {2, 4}) {
    ScalarField p = trace_power(so4, m);
    for (int t = 0; t < 20; ++t) {
      ScalarField q = quadratic_field(random_spd(6, rng));
      Vec y = random_unit(6, rng);
      CHECK(std::abs(lie_poisson_bracket(so4, p, q, y)) < 1e-10);
    }
  }
}

TEST_CASE("trace powers: gradients and shift identity") {
  LieAlgebra so4 = build_so(4);
  std::mt19937_64 rng(107);
  std::vector<Vec> samples{random_gaussian(6, rng), random_gaussian(6, rng)};
  for (int m : {2, 4}) {
    CAPTURE(m);
    CHECK(gradient_consistency(trace_power(so4, m), samples) < 1e-6);
  }
  // p_2(x) = -2 |x|^2 in an orthonormal basis, so the shift expands exactly
  ScalarField p2 = trace_power(so4, 2);
  Vec x = random_gaussian(6, rng), a = random_gaussian(6, rng);
  for (double lam : {0.5, 1.0, 2.0}) {
    double expect = -2.0 * (x + lam * a).squaredNorm();
    ScalarField shifted = shifted_invariants(so4, a, {lam}).members[0];
    CHECK(shifted.value(x) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("u(n) trace powers include the odd degrees") {
  LieAlgebra u2 = build_u(2);
  std::vector<int> degs = invariant_degrees(u2);
  CHECK(degs == std::vector<int>{1, 2});
  std::mt19937_64 rng(109);
  std::vector<Vec> samples{random_gaussian(4, rng)};
  CHECK(gradient_consistency(trace_power(u2, 1), samples) < 1e-6);
  // p_1 is a Casimir of u(2)
  ScalarField p1 = trace_power(u2, 1);
  ScalarField q = quadratic_field(random_spd(4, rng));
  CHECK(std::abs(lie_poisson_bracket(u2, p1, q, random_unit(4, rng))) < 1e-12);
}

TEST_CASE("mikityuk family: endpoints of the lambda grid") {
  LieAlgebra so4 = build_so(4);
  ChainSpec chain = so_chain(so4, 2);
  std::mt19937_64 rng(113);
  Vec x = random_gaussian(6, rng);

  IntegralFamily lam0 = mikityuk_family(so4, chain, {1e-12});
  IntegralFamily lam1 = mikityuk_family(so4, chain, {1.0});
  ScalarField p2 = trace_power(so4, 2);

  // lambda -> 0: p on the projection to G_{i-1}; lambda = 1: p on G_i.
  // Member layout: F_0 coordinate first, then (m, lambda) blocks per level.
  const Subspace& G0 = chain.levels[0];
  const Subspace& G1 = chain.levels[1];
  ScalarField f10 = lam0.members[1];  // level 1, m = 2
  CHECK(f10.value(x) == doctest::Approx(p2.value(G0.project(x))).epsilon(1e-9));
  ScalarField f11 = lam1.members[1];
  CHECK(f11.value(x) == doctest::Approx(p2.value(G1.project(x))).epsilon(1e-12));
}

TEST_CASE("chains reject non-subalgebra levels") {
  LieAlgebra so4 = build_so(4);
  // span{f_12, f_13, f_14} is not a subalgebra, so make_chain throws before
  // any family can be built on it.
  std::vector<Subspace> levels{
      Subspace::from_labels(so4, {"f_12", "f_13", "f_14"}), Subspace::full(so4)};
  CHECK_THROWS_AS(make_chain(so4, levels), std::invalid_argument);
}

TEST_CASE("involution certificates on so(4)") {
  LieAlgebra so4 = build_so(4);
  ChainSpec chain = so_chain(so4, 2);
  IntegralFamily fam = mikityuk_family(so4, chain, default_lambda_grid());
  Subspace D = chain.base().orthogonal_complement();
  InvolutionCertificate cert = certify_family(so4, fam, 100, 42, 1e-10, &D);
  CHECK(cert.max_involution_residual < 1e-10);
  CHECK(cert.independent_count == 4);
  CHECK(cert.target_k == 4);
  CHECK(cert.complete);
  CHECK(cert.d_restricted_independent);
  CHECK(cert.verdict());

  Vec a = random_regular_element(so4, 42);
  IntegralFamily shift = shifted_invariants(so4, a, default_lambda_grid());
  InvolutionCertificate cert2 = certify_family(so4, shift, 100, 43);
  CHECK(cert2.max_involution_residual < 1e-10);
  CHECK(cert2.complete);

  // Casimirs alone stall at the rank of the algebra
  IntegralFamily casimirs{"casimirs", {trace_power(so4, 2), trace_power(so4, 4)}};
  InvolutionCertificate cert3 = certify_family(so4, casimirs, 20, 44);
  CHECK(cert3.independent_count == so4.rank());
  CHECK_FALSE(cert3.complete);
}

TEST_CASE("completeness targets") {
  CHECK((build_so(3).dim() + build_so(3).rank()) / 2 == 2);
  CHECK((build_so(4).dim() + build_so(4).rank()) / 2 == 4);
  CHECK((build_u(2).dim() + build_u(2).rank()) / 2 == 3);
}

TEST_CASE("mikityuk certificate on the u(2) chain") {
  LieAlgebra u2 = build_u(2);
  ChainSpec chain = u_chain(u2, 1);
  IntegralFamily fam = mikityuk_family(u2, chain, default_lambda_grid());
  InvolutionCertificate cert = certify_family(u2, fam, 50, 45);
  CHECK(cert.max_involution_residual < 1e-10);
  CHECK(cert.target_k == 3);
  CHECK(cert.complete);
}

TEST_CASE("regular elements have rank-sized centralizers") {
  LieAlgebra so4 = build_so(4);
  Vec a = random_regular_element(so4, 7);
  CHECK(centralizer(so4, a).dim() == so4.rank());
}

TEST_CASE("every family member has a finite-difference-consistent gradient") {
  LieAlgebra so4 = build_so(4);
  std::mt19937_64 rng(127);
  std::vector<Vec> samples{random_unit(6, rng), random_unit(6, rng)};
  ChainSpec chain = so_chain(so4, 2);
  for (const IntegralFamily& fam :
       {mikityuk_family(so4, chain, {0.5, 1.5}),
        shifted_invariants(so4, random_regular_element(so4, 5), {0.5, 1.5})}) {
    for (const ScalarField& F : fam.members) {
      CAPTURE(fam.name);
      CAPTURE(F.name);
      CHECK(gradient_consistency(F, samples) < 1e-6);
    }
  }
}
