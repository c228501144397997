// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the exit code is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "eps/cli.hpp"
#include "eps/hamiltonian.hpp"
#include "eps/io.hpp"
#include "oracles.hpp"

using namespace eps;

namespace {

int failures = 0;

void criterion(int id, const std::string& name, double time_limit,
               const std::function<std::pair<bool, std::string>()>& body) {
  auto start = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    auto [p, d] = body();
    pass = p;
    detail = d;
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count();
  if (time_limit > 0.0 && secs > time_limit) {
    pass = false;
    detail += " [over the " + std::to_string(static_cast<int>(time_limit)) +
              "s budget]";
  }
  if (!pass) ++failures;
  std::printf("[%s] criterion %2d: %-34s (%.1fs) %s\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), secs, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

Mat mat2(double a, double b, double c, double d) {
  Mat M(2, 2);
  M << a, b, c, d;
  return M;
}

SymmetricPairSetup fk_with_w0(const LieAlgebra& so4) {
  PairSetupInput in{Subspace::from_labels(so4, {"f_12", "f_13", "f_23"}),
                    Subspace::from_labels(so4, {"f_12"}),
                    Subspace::from_labels(so4, {"f_12"}),
                    Subspace::from_labels(so4, {"f_34"}),
                    {Subspace::from_labels(so4, {"f_14", "f_24"})},
                    1.0,
                    Mat(),
                    {},
                    Mat()};
  in.A_W0 = 0.8 * Mat::Identity(1, 1);
  in.A_Wk = {mat2(1.9, 0.2, 0.2, 2.4)};
  in.A_L = mat2(1.3, -0.1, -0.1, 1.1);
  return SymmetricPairSetup(so4, std::move(in));
}

SymmetricPairSetup fk_two_blocks(const LieAlgebra& so4) {
  PairSetupInput in{Subspace::from_labels(so4, {"f_12", "f_34"}),
                    Subspace::from_labels(so4, {"f_12"}),
                    Subspace::from_labels(so4, {"f_12"}),
                    std::nullopt,
                    {Subspace::from_labels(so4, {"f_13", "f_23"}),
                     Subspace::from_labels(so4, {"f_14", "f_24"})},
                    1.0,
                    Mat(),
                    {},
                    Mat()};
  in.A_Wk = {Mat::Identity(2, 2) + mat2(0.8, 0.1, 0.1, 1.4),
             Mat::Identity(2, 2) + mat2(2.0, -0.3, -0.3, 0.9)};
  in.A_L = 1.7 * Mat::Identity(1, 1);
  return SymmetricPairSetup(so4, std::move(in));
}

Mat suslov_A() {
  Mat A(3, 3);
  A << 2, 0, 1, 0, 1, 0, 1, 0, 2;
  return A;
}

}  // namespace

int main() {
  // 1. Algebra validity: structure tensors of so(3..5), u(2), sp(1).
  criterion(1, "algebra validity", 1.0, [] {
    double worst = 0.0;
    std::mt19937_64 rng(3);
    for (const LieAlgebra& alg :
         {build_so(3), build_so(4), build_so(5), build_u(2), build_sp(1)}) {
      worst = std::max(worst, alg.jacobi_residual());
      worst = std::max(worst, alg.antisymmetry_residual());
      worst = std::max(worst, alg.ad_invariance_residual());
      worst = std::max(worst, alg.ad_invariance_residual(100, 7));
      for (int t = 0; t < 20; ++t) {
        Vec x = random_unit(alg.dim(), rng);
        Vec y = random_unit(alg.dim(), rng);
        Vec expect = oracle::commutator_coords(alg.basis(), x, y);
        worst = std::max(worst, (alg.bracket(x, y) - expect).norm());
      }
    }
    return std::make_pair(worst < 1e-12, "worst residual " + fmt(worst));
  });

  // 2. EPS conservation on five random so(4) instances, T = 100.
  criterion(2, "EPS conservation", 30.0, [] {
    LieAlgebra so4 = build_so(4);
    std::mt19937_64 rng(42);
    double worst_H = 0.0, worst_C = 0.0;
    IntegrateOptions opt;
    opt.h = 1e-3;
    opt.T = 100.0;
    opt.stride = 100;
    for (int i = 0; i < 5; ++i) {
      Mat C(6, 1);
      C.col(0) = random_unit(6, rng);
      EpsSystem sys(so4, MetricOperator::from_matrix(random_spd(6, rng)),
                    Distribution(so4, C));
      Vec x0 = sys.project_onto_M(random_unit(6, rng));
      Trajectory traj = integrate_eps(sys, x0, opt);
      worst_H = std::max(worst_H, traj.monitor_drift("H"));
      worst_C = std::max(worst_C, traj.monitor_max("constraint_max"));
    }
    return std::make_pair(worst_H < 1e-8 && worst_C < 1e-9,
                          "H drift " + fmt(worst_H) + ", constraint " + fmt(worst_C));
  });

  // 3. Example 3.1 regimes.
  criterion(3, "example 3.1 regimes", 0.0, [] {
    LieAlgebra so4 = build_so(4);
    std::mt19937_64 rng(73);
    IntegrateOptions opt;
    opt.h = 1e-3;
    opt.T = 10.0;
    opt.stride = 1000;

    // case 1: split metric with A_D = s Id
    Mat span3(6, 3);
    for (int c = 0; c < 3; ++c) span3.col(c) = random_gaussian(6, rng);
    Subspace D1(so4, span3);
    Subspace L1 = D1.orthogonal_complement();
    EpsSystem sys1(so4,
                   make_block_metric({D1, L1}, {2.0 * Mat::Identity(3, 3),
                                                random_spd(3, rng)}),
                   Distribution(so4, L1.basis()));
    Vec xi1 = D1.project(random_gaussian(6, rng));
    double c1 = (integrate_eps(sys1, xi1, opt).final() - xi1).norm();

    // case 2: dim D = 2
    Mat span2(6, 2);
    for (int c = 0; c < 2; ++c) span2.col(c) = random_gaussian(6, rng);
    Subspace D2(so4, span2);
    Subspace L2 = D2.orthogonal_complement();
    EpsSystem sys2(so4,
                   make_block_metric({D2, L2}, {random_spd(2, rng), random_spd(4, rng)}),
                   Distribution(so4, L2.basis()));
    Vec xi2 = D2.project(random_gaussian(6, rng));
    double c2 = (integrate_eps(sys2, xi2, opt).final() - xi2).norm();

    // case 4: H = so(3) inside L, D = V
    Subspace H = Subspace::from_labels(so4, {"f_12", "f_13", "f_23"});
    Subspace D4 = H.orthogonal_complement();
    EpsSystem sys4(so4,
                   make_block_metric({D4, H}, {random_spd(3, rng), random_spd(3, rng)}),
                   Distribution(so4, H.basis()));
    Vec xi4 = D4.project(random_gaussian(6, rng));
    double c4 = (integrate_eps(sys4, xi4, opt).final() - xi4).norm();

    // case 3: dim D = 3, generic trajectories periodic
    Mat span3b(6, 3);
    for (int c = 0; c < 3; ++c) span3b.col(c) = random_gaussian(6, rng);
    Subspace D3(so4, span3b);
    Subspace L3 = D3.orthogonal_complement();
    MetricOperator A3 =
        make_block_metric({D3, L3}, {random_spd(3, rng), random_spd(3, rng)});
    VectorField reduced = [&](const Vec& xi) {
      return D3.project(so4.bracket(xi, A3.A * xi));
    };
    Vec xi3 = D3.project(random_gaussian(6, rng));
    PeriodResult pr = detect_period(reduced, xi3, 1e-3, 200.0);

    bool pass = c1 < 1e-10 && c2 < 1e-10 && c4 < 1e-10 && pr.found &&
                pr.return_distance < 1e-6;
    return std::make_pair(pass, "returns " + fmt(c1) + "/" + fmt(c2) + "/" + fmt(c4) +
                                    ", period return " + fmt(pr.return_distance));
  });

  // 4. Theorem 3.1 first integrals on the Fedorov-Kozlov-type so(4) instance.
  criterion(4, "theorem 3.1 integrals", 0.0, [] {
    LieAlgebra so4 = build_so(4);
    SymmetricPairSetup setup = fk_with_w0(so4);
    Vec xi0 = Vec::Zero(6);
    xi0(so4.label_index("f_12")) = 0.8;
    xi0(so4.label_index("f_14")) = 0.35;
    xi0(so4.label_index("f_24")) = -0.2;
    xi0(so4.label_index("f_34")) = 0.35;
    IntegrateOptions opt;
    opt.h = 1e-3;
    opt.T = 100.0;
    opt.stride = 100;
    std::map<std::string, std::function<double(const Vec&)>> mon;
    mon["H_D"] = [&](const Vec& xi) { return setup.metric().energy(xi); };
    mon["F"] = [](const Vec& xi) { return xi.squaredNorm(); };
    mon["F0"] = [&](const Vec& xi) { return setup.W0().coords(xi)(0); };
    mon["F1"] = [&](const Vec& xi) {
      Vec w = setup.W()[0].coords(xi);
      return w.dot(setup.B()[0] * w);
    };
    Trajectory traj = integrate(setup.as_reduced_field(), xi0, opt, mon);
    double worst = 0.0;
    for (const char* m : {"H_D", "F", "F0", "F1"})
      worst = std::max(worst, traj.monitor_drift(m));
    return std::make_pair(worst < 1e-8, "worst drift " + fmt(worst));
  });

  // 5. Corollary 3.1: averaged frequencies against long-run winding numbers.
  criterion(5, "corollary 3.1 frequencies", 120.0, [] {
    LieAlgebra so4 = build_so(4);
    SymmetricPairSetup setup = fk_two_blocks(so4);
    Vec xi0 = Vec::Zero(6);
    xi0(so4.label_index("f_12")) = 0.9;
    xi0(so4.label_index("f_13")) = 0.4;
    xi0(so4.label_index("f_23")) = 0.1;
    xi0(so4.label_index("f_14")) = 0.2;
    xi0(so4.label_index("f_24")) = -0.3;
    FrequencyReport rep = frequencies(setup, torus_levels(setup, xi0));
    std::vector<double> slopes = rotation_numbers(setup, xi0, 1e4, 1e-3);
    double winding = std::abs(slopes[1] / slopes[0]);
    double averaged = std::abs(rep.omega[1] / rep.omega[0]);
    double err = std::abs(winding - averaged);
    return std::make_pair(err < 1e-3, "ratio error " + fmt(err));
  });

  // 6. Theorem 4.1: cascade equals direct EPS; empty base is exact.
  criterion(6, "theorem 4.1 chain reduction", 0.0, [] {
    LieAlgebra so4 = build_so(4);
    ChainSpec chain = so_chain(so4, 3);
    Mat c0 = Mat::Zero(6, 1);
    c0(so4.label_index("f_23"), 0) = 1.0;
    Mat c1 = Mat::Zero(6, 1);
    c1(so4.label_index("f_14"), 0) = 0.6;
    c1(so4.label_index("f_34"), 0) = 0.8;
    ChainReduction cr(chain, suslov_A(), {1.6}, c0, {c1});
    std::mt19937_64 rng(79);
    Vec x0 = cr.full().project_onto_M(random_unit(6, rng));
    IntegrateOptions opt;
    opt.h = 1e-3;
    opt.T = 10.0;
    opt.stride = 1000;
    Trajectory direct = integrate_eps(cr.full(), x0, opt);
    IntegrateOptions copt = opt;
    copt.projection = false;
    Trajectory cascade = integrate(cr.as_cascade_field(), x0, copt);
    double dist = (direct.final() - cascade.final()).norm();

    // dim D_0 = 0 subcase
    ChainSpec chain2 = so_chain(so4, 2);
    Mat cz = Mat::Zero(6, 1);
    cz(so4.label_index("f_12"), 0) = 1.0;
    ChainReduction crz(chain2, 1.1 * Mat::Identity(1, 1), {1.5, 0.7}, cz,
                       {Mat(6, 0), Mat(6, 0)});
    Vec z0 = crz.full().project_onto_M(random_unit(6, rng));
    Trajectory zt = integrate(crz.as_cascade_field(), z0, copt);
    double x0_norm = 0.0, x1_change = 0.0;
    Vec x1_first = crz.Dk()[0].coords(zt.initial());
    for (const Vec& x : zt.states) {
      x0_norm = std::max(x0_norm, std::abs(chain2.base().coords(x)(0)));
      x1_change = std::max(x1_change,
                           (crz.Dk()[0].coords(x) - x1_first).cwiseAbs().maxCoeff());
    }
    bool pass = dist < 1e-6 && crz.D0().dim() == 0 && x0_norm < 1e-15 &&
                x1_change == 0.0;
    return std::make_pair(pass, "trajectory distance " + fmt(dist));
  });

  // 7. Suslov measure claims.
  criterion(7, "suslov measure", 0.0, [] {
    Mat Ad(3, 3);
    Ad << 1, 0, 0, 0, 2, 0, 0, 0, 3;
    SuslovCloudOptions eig_opt;
    eig_opt.T = 10.0;
    AsymptoticReport eig = asymptotic_diagnostics(Ad, Vec::Unit(3, 2), eig_opt);

    AsymptoticReport gen = asymptotic_diagnostics(suslov_A(), Vec::Unit(3, 2));
    double ratio = gen.diameter_final / gen.diameter_initial;
    bool pass = eig.eigenvector_regime && eig.max_abs_divergence < 1e-7 &&
                !gen.eigenvector_regime && gen.max_abs_divergence > 1e-3 &&
                ratio < 0.1;
    return std::make_pair(pass, "eig div " + fmt(eig.max_abs_divergence) +
                                    ", gen div " + fmt(gen.max_abs_divergence) +
                                    ", cloud ratio " + fmt(ratio));
  });

  // 8. Theorem 6.1 three-flow coincidence on the chain instance.
  criterion(8, "theorem 6.1 coincidence", 0.0, [] {
    LieAlgebra so4 = build_so(4);
    ChainSpec chain = so_chain(so4, 2);
    MetricOperator A = make_chain_metric(chain, 1.4 * Mat::Identity(1, 1), {0.9, 1.8});
    Vec xi0 = Vec::Zero(6);
    xi0(so4.label_index("f_13")) = 0.5;
    xi0(so4.label_index("f_23")) = -0.2;
    xi0(so4.label_index("f_14")) = 0.3;
    xi0(so4.label_index("f_34")) = 0.4;
    Vec eta0 = 0.7 * Vec::Unit(6, so4.label_index("f_12"));
    CoincidenceOptions opt;
    opt.T = 10.0;
    opt.h = 1e-3;
    CoincidenceReport rep =
        coincidence_check(so4, A, chain.base(), xi0, eta0, opt);
    double dmax = std::max({rep.d_eps_h, rep.d_eps_hstar, rep.d_h_hstar});
    bool pass = dmax < 1e-6 && rep.off_D_max < 1e-8 && rep.eta_drift < 1e-9 &&
                rep.bracket_generating;
    return std::make_pair(pass, "max distance " + fmt(dmax) + ", eta drift " +
                                    fmt(rep.eta_drift));
  });

  // 9. Involution certificates and completeness rank.
  criterion(9, "involution certificates", 0.0, [] {
    LieAlgebra so4 = build_so(4);
    ChainSpec chain = so_chain(so4, 2);
    IntegralFamily fam = mikityuk_family(so4, chain, default_lambda_grid());
    InvolutionCertificate c1 = certify_family(so4, fam, 100, 42);
    Vec a = random_regular_element(so4, 43);
    IntegralFamily shift = shifted_invariants(so4, a, default_lambda_grid());
    InvolutionCertificate c2 = certify_family(so4, shift, 100, 44);
    bool pass = c1.max_involution_residual < 1e-10 && c1.independent_count == 4 &&
                c2.max_involution_residual < 1e-10 && c2.independent_count == 4;
    return std::make_pair(
        pass, "residuals " + fmt(c1.max_involution_residual) + "/" +
                  fmt(c2.max_involution_residual) + ", ranks " +
                  std::to_string(c1.independent_count) + "/" +
                  std::to_string(c2.independent_count) + " of 4");
  });

  // 10. Almost-Poisson structure: skew, Leibniz, and the Jacobi defect.
  criterion(10, "almost-Poisson structure", 0.0, [] {
    LieAlgebra so4 = build_so(4);
    std::mt19937_64 rng(53);
    auto linear = [](const Vec& c) {
      ScalarField F;
      F.value = [c](const Vec& x) { return c.dot(x); };
      F.grad = [c](const Vec& x) {
        (void)x;
        return c;
      };
      return F;
    };
    Subspace G = Subspace::full(so4);
    double worst_full = 0.0, worst_skew = 0.0, worst_leibniz = 0.0;
    for (int t = 0; t < 20; ++t) {
      ScalarField F1 = linear(random_gaussian(6, rng));
      ScalarField F2 = linear(random_gaussian(6, rng));
      ScalarField F3 = linear(random_gaussian(6, rng));
      Vec x = random_gaussian(6, rng);
      worst_full = std::max(worst_full, std::abs(jacobiator(so4, G, F1, F2, F3, x)));
      worst_skew = std::max(worst_skew, std::abs(almost_poisson(so4, G, F1, F2, x) +
                                                 almost_poisson(so4, G, F2, F1, x)));
      ScalarField P;
      P.value = [&F1, &F2](const Vec& y) { return F1.value(y) * F2.value(y); };
      P.grad = [&P](const Vec& y) {
        Vec g(y.size());
        for (int k = 0; k < y.size(); ++k) {
          Vec yp = y, ym = y;
          yp(k) += 1e-5;
          ym(k) -= 1e-5;
          g(k) = (P.value(yp) - P.value(ym)) / 2e-5;
        }
        return g;
      };
      double lhs = almost_poisson(so4, G, P, F3, x);
      double rhs = F1.value(x) * almost_poisson(so4, G, F2, F3, x) +
                   F2.value(x) * almost_poisson(so4, G, F1, F3, x);
      worst_leibniz = std::max(worst_leibniz, std::abs(lhs - rhs));
    }
    Mat span(6, 5);
    for (int c = 0; c < 5; ++c) span.col(c) = random_gaussian(6, rng);
    Subspace D(so4, span);
    double best = 0.0;
    for (int t = 0; t < 20; ++t) {
      ScalarField F1 = linear(D.project(random_gaussian(6, rng)));
      ScalarField F2 = linear(D.project(random_gaussian(6, rng)));
      ScalarField F3 = linear(D.project(random_gaussian(6, rng)));
      Vec xi = D.project(random_gaussian(6, rng));
      best = std::max(best, std::abs(jacobiator(so4, D, F1, F2, F3, xi)));
    }
    bool pass = worst_full < 1e-9 && worst_skew < 1e-12 && worst_leibniz < 1e-9 &&
                best > 1e-6;
    return std::make_pair(pass, "Lie-Poisson " + fmt(worst_full) +
                                    ", nonholonomic " + fmt(best) + ", Leibniz " +
                                    fmt(worst_leibniz));
  });

  // 11. Reconstruction against the matrix exponential and body velocity.
  criterion(11, "reconstruction", 0.0, [] {
    LieAlgebra so4 = build_so(4);
    std::mt19937_64 rng(41);
    Vec a = random_unit(6, rng);
    Mat C(6, 1);
    C.col(0) = a;
    Mat A = 1.3 * Mat::Identity(6, 6) + (0.9 - 1.3) * a * a.transpose();
    EpsSystem sys(so4, MetricOperator::from_matrix(A), Distribution(so4, C));
    Vec x0 = sys.project_onto_M(random_unit(6, rng));
    IntegrateOptions opt;
    opt.h = 1e-2;
    opt.T = 3.0;
    Trajectory traj = integrate_eps(sys, x0, opt);
    GroupTrajectory gt =
        reconstruct_group(so4, sys.metric(), traj, CMat::Identity(4, 4));
    CMat expect = oracle::expm_taylor(3.0 * so4.to_matrix(sys.metric().A * x0));
    double exp_err = (gt.elements.back() - expect).cwiseAbs().maxCoeff();

    // Suslov body-velocity recovery at second order
    LieAlgebra body = build_so3_body();
    Mat Cs(3, 1);
    Cs.col(0) = Vec::Unit(3, 2);
    EpsSystem ssys(body, MetricOperator::from_matrix(suslov_A()),
                   Distribution(body, Cs));
    Vec s0(3);
    s0 << -2, 1, 1;
    auto recovery_error = [&](double dt) {
      IntegrateOptions sopt;
      sopt.h = dt;
      sopt.T = 1.0;
      Trajectory st = integrate_eps(ssys, s0, sopt);
      GroupTrajectory g =
          reconstruct_group(body, ssys.metric(), st, CMat::Identity(3, 3));
      double worst = 0.0;
      for (int k = 1; k + 1 < g.size(); ++k) {
        CMat gdot = (g.elements[k + 1] - g.elements[k - 1]) / (2.0 * dt);
        Vec omega_rec = body.from_matrix(g.elements[k].adjoint() * gdot);
        worst = std::max(worst,
                         (omega_rec - Vec(ssys.metric().A * st.states[k])).norm());
      }
      return worst;
    };
    double e1 = recovery_error(4e-3), e2 = recovery_error(2e-3);
    double order_ratio = e1 / e2;
    bool pass = exp_err < 1e-8 && gt.unitarity_residual() < 1e-8 &&
                order_ratio > 3.0 && order_ratio < 5.0;
    return std::make_pair(pass, "exp error " + fmt(exp_err) + ", halving ratio " +
                                    fmt(order_ratio));
  });

  // 12. CLI determinism: identical config+seed gives identical bytes.
  criterion(12, "CLI determinism", 0.0, [] {
    nlohmann::json doc{
        {"seed", 42},
        {"algebra", {{"family", "so3_body"}}},
        {"metric",
         {{"type", "explicit"},
          {"matrix", {{2.0, 0.0, 1.0}, {0.0, 1.0, 0.0}, {1.0, 0.0, 2.0}}}}},
        {"distribution", {{"constraints", {{0.0, 0.0, 1.0}}}}},
        {"initial_state", {-2.0, 1.0, 1.0}},
        {"integrator", {{"h", 1e-3}, {"T", 5.0}, {"stride", 10}}}};
    RunConfig cfg = RunConfig::from_json(doc);
    auto dir = std::filesystem::temp_directory_path();
    auto p1 = (dir / "eps_acc_run1.csv").string();
    auto p2 = (dir / "eps_acc_run2.csv").string();
    if (cmd_simulate(cfg, p1) != kExitOk || cmd_simulate(cfg, p2) != kExitOk)
      return std::make_pair(false, std::string("simulate failed"));
    auto slurp = [](const std::string& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
    };
    bool same_csv = slurp(p1) == slurp(p2);
    bool same_json = slurp(p1 + ".summary.json") == slurp(p2 + ".summary.json");
    for (const auto& p : {p1, p2}) {
      std::filesystem::remove(p);
      std::filesystem::remove(p + ".summary.json");
    }
    return std::make_pair(same_csv && same_json,
                          std::string(same_csv ? "CSV identical" : "CSV differs") +
                              ", " + (same_json ? "JSON identical" : "JSON differs"));
  });

  std::printf("%d of 12 criteria passed\n", 12 - failures);
  return failures;
}
