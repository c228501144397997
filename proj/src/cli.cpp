#include "eps/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "eps/hamiltonian.hpp"
#include "eps/io.hpp"

namespace eps {

using nlohmann::json;

namespace {

json tolerance_table() {
  return json{{"constraint_reject", 1e-9},
              {"conservation_report", 1e-8},
              {"rank_relative", 1e-10},
              {"involution", 1e-10},
              {"coincidence_distance", 1e-6}};
}

void emit(const json& report, const std::string& out) {
  std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!out.empty()) atomic_write(out, text);
}

json check(const std::string& name, double value, double tol, bool expect_below) {
  bool pass = expect_below ? value < tol : value > tol;
  return json{{"name", name},
              {"value", value},
              {"threshold", tol},
              {"comparison", expect_below ? "<" : ">"},
              {"pass", pass}};
}

json flag_check(const std::string& name, bool pass) {
  return json{{"name", name}, {"pass", pass}};
}

json finish(json& report, json checks) {
  bool all = true;
  for (const auto& c : checks) all = all && c.at("pass").get<bool>();
  report["checks"] = std::move(checks);
  report["pass"] = all;
  return report;
}

// ---------------------------------------------------------------- suites

json verify_conservation(const RunConfig& cfg) {
  LieAlgebra alg = algebra_from_config(cfg.doc);
  const json& s = cfg.doc.value("suite", json::object());
  int instances = s.value("instances", 5);
  int n_constraints = s.value("constraints", 1);
  IntegrateOptions opt;
  opt.h = s.value("h", 1e-3);
  opt.T = s.value("T", 100.0);
  opt.stride = s.value("stride", 100);

  std::mt19937_64 rng(cfg.seed);
  double worst_H = 0.0, worst_C = 0.0;
  for (int i = 0; i < instances; ++i) {
    Mat A = random_spd(alg.dim(), rng);
    Mat C(alg.dim(), n_constraints);
    for (int c = 0; c < n_constraints; ++c) C.col(c) = random_unit(alg.dim(), rng);
    EpsSystem sys(alg, MetricOperator::from_matrix(A), Distribution(alg, C));
    Vec x0 = sys.project_onto_M(random_unit(alg.dim(), rng));
    Trajectory traj = integrate_eps(sys, x0, opt);
    worst_H = std::max(worst_H, traj.monitor_drift("H"));
    worst_C = std::max(worst_C, traj.monitor_max("constraint_max"));
  }
  json report{{"suite", "conservation"},
              {"instances", instances},
              {"T", opt.T},
              {"h", opt.h}};
  json checks = json::array(
      {check("energy_drift", worst_H, 1e-8, true),
       check("constraint_residual", worst_C, 1e-9, true)});
  return finish(report, std::move(checks));
}

json verify_split_integrals(const RunConfig& cfg) {
  LieAlgebra alg = algebra_from_config(cfg.doc);
  SymmetricPairSetup setup = pair_setup_from_config(alg, cfg.doc);
  Vec xi0 = vector_from_json(cfg.doc.at("initial_state"));
  IntegrateOptions opt = integrator_from_config(cfg.doc);
  opt.projection = false;

  std::map<std::string, std::function<double(const Vec&)>> monitors;
  monitors["H_D"] = [&setup](const Vec& xi) { return setup.metric().energy(xi); };
  monitors["F"] = [](const Vec& xi) { return xi.squaredNorm(); };
  for (int j = 0; j < setup.W0().dim(); ++j)
    monitors["F0_" + std::to_string(j)] = [&setup, j](const Vec& xi) {
      return setup.W0().coords(xi)(j);
    };
  for (size_t k = 0; k < setup.W().size(); ++k)
    monitors["F_" + std::to_string(k + 1)] = [&setup, k](const Vec& xi) {
      Vec w = setup.W()[k].coords(xi);
      return w.dot(setup.B()[k] * w);
    };

  Trajectory traj = integrate(setup.as_reduced_field(), xi0, opt, monitors);
  json report{{"suite", "split-integrals"}, {"T", opt.T}, {"h", opt.h}};
  json checks = json::array();
  for (const auto& [name, _] : monitors)
    checks.push_back(check(name + "_drift", traj.monitor_drift(name), 1e-8, true));
  return finish(report, std::move(checks));
}

ChainReduction chain_reduction_from_config(const LieAlgebra& alg, const json& doc) {
  ChainSpec chain = chain_from_config(alg, doc.at("chain"));
  Mat A0 = matrix_from_json(doc.at("A0"));
  std::vector<double> s = doc.at("s").get<std::vector<double>>();
  auto read_group = [&](const json& v) {
    Mat C(alg.dim(), static_cast<Eigen::Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i)
      C.col(static_cast<Eigen::Index>(i)) = vector_from_json(v[i]);
    return C;
  };
  Mat c0 = read_group(doc.value("constraints0", json::array()));
  std::vector<Mat> ck;
  const json cks = doc.value("constraints_k", json::array());
  for (int k = 0; k < chain.length(); ++k)
    ck.push_back(read_group(k < static_cast<int>(cks.size()) ? cks[k] : json::array()));
  return ChainReduction(chain, A0, s, c0, ck);
}

json verify_chain_reduction(const RunConfig& cfg) {
  LieAlgebra alg = algebra_from_config(cfg.doc);
  ChainReduction cr = chain_reduction_from_config(alg, cfg.doc);
  Vec x0 = cr.full().project_onto_M(vector_from_json(cfg.doc.at("initial_state")));
  IntegrateOptions opt = integrator_from_config(cfg.doc);

  Trajectory direct = integrate_eps(cr.full(), x0, opt);
  IntegrateOptions copt = opt;
  copt.projection = false;
  Trajectory cascade = integrate(cr.as_cascade_field(), x0, copt);

  json report{{"suite", "chain-reduction"},
              {"T", opt.T},
              {"h", opt.h},
              {"dim_D0", cr.D0().dim()}};
  json checks = json::array();
  checks.push_back(check("trajectory_distance",
                         (direct.final() - cascade.final()).norm(), 1e-6, true));
  // pointwise field agreement on M
  std::mt19937_64 rng(cfg.seed);
  double worst_field = 0.0;
  for (int i = 0; i < 32; ++i) {
    Vec x = cr.full().project_onto_M(random_unit(alg.dim(), rng));
    worst_field =
        std::max(worst_field, (cr.full().field(x) - cr.cascade_field(x)).norm());
  }
  checks.push_back(check("field_agreement", worst_field, 1e-12, true));
  if (cr.D0().dim() == 0) {
    double x0_norm = 0.0, x1_change = 0.0;
    Vec x1_first = cr.Dk()[0].coords(cascade.states.front());
    for (const Vec& x : cascade.states) {
      x0_norm = std::max(x0_norm, cr.chain().base().coords(x).cwiseAbs().maxCoeff());
      x1_change = std::max(
          x1_change, (cr.Dk()[0].coords(x) - x1_first).cwiseAbs().maxCoeff());
    }
    checks.push_back(check("zero_base_x0", x0_norm, 1e-15, true));
    checks.push_back(flag_check("zero_base_x1_constant", x1_change == 0.0));
  }
  return finish(report, std::move(checks));
}

json verify_coincidence(const RunConfig& cfg) {
  LieAlgebra alg = algebra_from_config(cfg.doc);
  MetricOperator A = metric_from_config(alg, cfg.doc);
  ChainSpec chain = chain_from_config(alg, cfg.doc.at("metric"));
  const Subspace& L = chain.base();
  Vec xi0 = vector_from_json(cfg.doc.at("initial_state"));
  Vec eta0 = cfg.doc.contains("eta0") ? vector_from_json(cfg.doc["eta0"])
                                      : Vec(Vec::Zero(alg.dim()));
  CoincidenceOptions opt;
  IntegrateOptions iopt = integrator_from_config(cfg.doc);
  opt.h = iopt.h;
  opt.T = iopt.T;
  opt.seed = cfg.seed;
  CoincidenceReport rep = coincidence_check(alg, A, L, xi0, eta0, opt);

  json report{{"suite", "coincidence"}, {"T", opt.T}, {"h", opt.h}};
  json checks = json::array(
      {check("invariance_residual", rep.invariance_residual, 1e-10, true),
       flag_check("bracket_generating", rep.bracket_generating),
       check("d_eps_h", rep.d_eps_h, opt.distance_tol, true),
       check("d_eps_hstar", rep.d_eps_hstar, opt.distance_tol, true),
       check("d_h_hstar", rep.d_h_hstar, opt.distance_tol, true),
       check("off_D_max", rep.off_D_max, opt.off_D_tol, true),
       check("eta_drift", rep.eta_drift, opt.eta_tol, true)});
  return finish(report, std::move(checks));
}

json certificate_json(const InvolutionCertificate& cert) {
  return json{{"family", cert.family},
              {"points_tested", cert.points_tested},
              {"max_involution_residual", cert.max_involution_residual},
              {"independent_count", cert.independent_count},
              {"target_k", cert.target_k},
              {"verdict", cert.verdict() ? "pass" : "fail"}};
}

json verify_involution(const RunConfig& cfg) {
  LieAlgebra alg = algebra_from_config(cfg.doc);
  const json& s = cfg.doc.value("suite", json::object());
  int points = s.value("points", 100);
  std::vector<double> lambdas = s.contains("lambdas")
                                    ? s["lambdas"].get<std::vector<double>>()
                                    : default_lambda_grid();
  ChainSpec chain = chain_from_config(alg, cfg.doc.at("chain"));

  IntegralFamily chain_fam = mikityuk_family(alg, chain, lambdas);
  Subspace D = chain.base().orthogonal_complement();
  InvolutionCertificate c1 = certify_family(alg, chain_fam, points, cfg.seed, 1e-10, &D);
  Vec a = random_regular_element(alg, cfg.seed + 1);
  IntegralFamily shift_fam = shifted_invariants(alg, a, lambdas);
  InvolutionCertificate c2 = certify_family(alg, shift_fam, points, cfg.seed + 2);

  json report{{"suite", "involution"},
              {"certificates",
               json::array({certificate_json(c1), certificate_json(c2)})}};
  json checks = json::array(
      {check("chain_involution", c1.max_involution_residual, 1e-10, true),
       flag_check("chain_complete", c1.complete),
       flag_check("chain_independent_on_D", c1.d_restricted_independent),
       check("shift_involution", c2.max_involution_residual, 1e-10, true),
       flag_check("shift_complete", c2.complete)});
  return finish(report, std::move(checks));
}

json verify_measure(const RunConfig& cfg) {
  const json& s = cfg.doc.at("suslov");
  Mat A0 = matrix_from_json(s.at("A0"));
  Vec a0 = vector_from_json(s.at("a0"));
  SuslovCloudOptions opt;
  opt.seed = cfg.seed;
  const json& co = cfg.doc.value("suite", json::object());
  opt.T = co.value("T", opt.T);
  opt.h = co.value("h", opt.h);
  opt.cloud_size = co.value("cloud", opt.cloud_size);
  AsymptoticReport rep = asymptotic_diagnostics(A0, a0, opt);

  json report{{"suite", "measure"},
              {"eigenvector_regime", rep.eigenvector_regime},
              {"max_abs_divergence", rep.max_abs_divergence},
              {"diameter_ratio",
               rep.diameter_final / std::max(rep.diameter_initial, 1e-300)},
              {"ray_alignment", rep.ray_alignment}};
  json checks = json::array();
  if (rep.eigenvector_regime) {
    checks.push_back(check("divergence_vanishes", rep.max_abs_divergence, 1e-7, true));
    checks.push_back(check("cloud_steady",
                           std::abs(rep.diameter_final - rep.diameter_initial),
                           1e-12, true));
  } else {
    checks.push_back(check("divergence_nonzero", rep.max_abs_divergence, 1e-3, false));
    checks.push_back(check("cloud_contracts",
                           rep.diameter_final / rep.diameter_initial, 0.1, true));
    checks.push_back(check("opposite_rays", -rep.ray_alignment, 0.9, false));
  }
  return finish(report, std::move(checks));
}

json verify_jacobi(const RunConfig& cfg) {
  LieAlgebra alg = algebra_from_config(cfg.doc);
  const json& s = cfg.doc.value("suite", json::object());
  int d_dim = s.value("D_dim", alg.dim() - 1);
  int samples = s.value("samples", 50);

  std::mt19937_64 rng(cfg.seed);
  Mat span(alg.dim(), d_dim);
  for (int c = 0; c < d_dim; ++c) span.col(c) = random_gaussian(alg.dim(), rng);
  Subspace D(alg, span);
  Subspace G = Subspace::full(alg);

  auto linear = [&](const Vec& c) {
    ScalarField F;
    F.name = "linear";
    F.value = [c](const Vec& x) { return c.dot(x); };
    F.grad = [c](const Vec& x) {
      (void)x;
      return c;
    };
    return F;
  };

  double best_proper = 0.0, worst_full = 0.0, worst_skew = 0.0, worst_leibniz = 0.0;
  for (int i = 0; i < samples; ++i) {
    ScalarField F1 = linear(D.project(random_gaussian(alg.dim(), rng)));
    ScalarField F2 = linear(D.project(random_gaussian(alg.dim(), rng)));
    ScalarField F3 = linear(D.project(random_gaussian(alg.dim(), rng)));
    Vec xi = D.project(random_gaussian(alg.dim(), rng));
    best_proper = std::max(best_proper, std::abs(jacobiator(alg, D, F1, F2, F3, xi)));
    worst_skew = std::max(worst_skew,
                          std::abs(almost_poisson(alg, D, F1, F2, xi) +
                                   almost_poisson(alg, D, F2, F1, xi)));
    // Leibniz on the product F1 F2, with a finite-difference gradient
    ScalarField P;
    P.value = [&F1, &F2](const Vec& x) { return F1.value(x) * F2.value(x); };
    P.grad = [&P](const Vec& x) {
      Vec g(x.size());
      for (int k = 0; k < x.size(); ++k) {
        Vec xp = x, xm = x;
        xp(k) += 1e-5;
        xm(k) -= 1e-5;
        g(k) = (P.value(xp) - P.value(xm)) / 2e-5;
      }
      return g;
    };
    double lhs = almost_poisson(alg, D, P, F3, xi);
    double rhs = F1.value(xi) * almost_poisson(alg, D, F2, F3, xi) +
                 F2.value(xi) * almost_poisson(alg, D, F1, F3, xi);
    worst_leibniz = std::max(worst_leibniz, std::abs(lhs - rhs));

    ScalarField G1 = linear(random_gaussian(alg.dim(), rng));
    ScalarField G2 = linear(random_gaussian(alg.dim(), rng));
    ScalarField G3 = linear(random_gaussian(alg.dim(), rng));
    Vec x = random_gaussian(alg.dim(), rng);
    worst_full = std::max(worst_full, std::abs(jacobiator(alg, G, G1, G2, G3, x)));
  }
  json report{{"suite", "jacobi"}, {"D_dim", d_dim}};
  json checks = json::array(
      {check("lie_poisson_jacobiator", worst_full, 1e-9, true),
       check("nonholonomic_jacobiator", best_proper, 1e-6, false),
       check("skew_symmetry", worst_skew, 1e-12, true),
       check("leibniz_fd", worst_leibniz, 1e-9, true)});
  return finish(report, std::move(checks));
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, const std::string& out) {
  LieAlgebra alg = algebra_from_config(cfg.doc);
  MetricOperator A = metric_from_config(alg, cfg.doc);
  Distribution dist = distribution_from_config(alg, cfg.doc);
  if (!cfg.doc.contains("initial_state"))
    throw ConfigError("config: missing \"initial_state\"");
  Vec x0 = vector_from_json(cfg.doc["initial_state"]);
  if (x0.size() != alg.dim())
    throw ConfigError("config: initial_state has wrong dimension");
  IntegrateOptions opt = integrator_from_config(cfg.doc);

  EpsSystem sys(alg, std::move(A), std::move(dist));
  double correction = 0.0;
  if (sys.constraint_residual(x0) > 1e-9) {
    Vec projected = sys.project_onto_M(x0);
    correction = (projected - x0).norm();
    x0 = projected;
  }
  Trajectory traj = integrate_eps(sys, x0, opt);

  atomic_write(out, trajectory_csv(traj));
  json summary{{"command", "simulate"},
               {"config_hash", cfg.hash_hex},
               {"seed", cfg.seed},
               {"algebra", algebra_to_json(alg)},
               {"tolerances", tolerance_table()},
               {"h", opt.h},
               {"T", opt.T},
               {"stride", opt.stride},
               {"samples", traj.size()},
               {"initial_projection_correction", correction},
               {"final",
                json{{"H", traj.monitors.at("H").back()},
                     {"F", traj.monitors.at("F").back()},
                     {"constraint_max", traj.monitors.at("constraint_max").back()}}},
               {"drifts",
                json{{"H", traj.monitor_drift("H")}, {"F", traj.monitor_drift("F")}}},
               {"lambda", json{{"max_abs", traj.monitor_max("lambda_max")}}}};
  atomic_write(out + ".summary.json", summary.dump(2) + "\n");
  return kExitOk;
}

int cmd_verify(const std::string& suite, const RunConfig& cfg, const std::string& out) {
  json report;
  if (suite == "conservation")
    report = verify_conservation(cfg);
  else if (suite == "split-integrals")
    report = verify_split_integrals(cfg);
  else if (suite == "chain-reduction")
    report = verify_chain_reduction(cfg);
  else if (suite == "coincidence")
    report = verify_coincidence(cfg);
  else if (suite == "involution")
    report = verify_involution(cfg);
  else if (suite == "measure")
    report = verify_measure(cfg);
  else if (suite == "jacobi")
    report = verify_jacobi(cfg);
  else {
    std::cerr << "unknown suite: " << suite << "\n";
    return kExitConfigError;
  }
  report["config_hash"] = cfg.hash_hex;
  report["tolerances"] = tolerance_table();
  emit(report, out);
  return report["pass"].get<bool>() ? kExitOk : kExitCheckFailed;
}

int cmd_reconstruct(const RunConfig& cfg, const std::string& trajectory_csv,
                    const std::string& out) {
  std::ifstream summary_in(trajectory_csv + ".summary.json");
  if (!summary_in) {
    std::cerr << "reconstruct: missing run summary next to " << trajectory_csv << "\n";
    return kExitConfigError;
  }
  json summary = json::parse(summary_in, nullptr, false);
  if (summary.is_discarded() || summary.value("config_hash", "") != cfg.hash_hex) {
    std::cerr << "reconstruct: config hash mismatch\n";
    return kExitConfigError;
  }
  Trajectory traj = read_trajectory_csv(trajectory_csv);
  if (traj.size() < 2) {
    std::cerr << "reconstruct: trajectory has fewer than two samples\n";
    return kExitConfigError;
  }
  LieAlgebra alg = algebra_from_config(cfg.doc);
  MetricOperator A = metric_from_config(alg, cfg.doc);
  // default substep count keeps the group step near 0.01 time units
  double max_dt = 0.0;
  for (size_t k = 1; k < traj.times.size(); ++k)
    max_dt = std::max(max_dt, traj.times[k] - traj.times[k - 1]);
  int auto_sub = std::max(1, static_cast<int>(std::ceil(max_dt / 0.01)));
  int substeps =
      cfg.doc.value("reconstruct", json::object()).value("substeps", auto_sub);
  CMat g0 = CMat::Identity(alg.matrix_size(), alg.matrix_size());

  GroupTrajectory gt = reconstruct_group(alg, A, traj, g0, substeps);
  const std::string& name = alg.name();
  bool complex_entries = !(name.rfind("so", 0) == 0);
  atomic_write(out, group_trajectory_csv(gt, complex_entries));
  json rsummary{{"command", "reconstruct"},
                {"config_hash", cfg.hash_hex},
                {"tolerances", tolerance_table()},
                {"samples", gt.size()},
                {"max_group_drift", gt.max_drift},
                {"unitarity_residual", gt.unitarity_residual()}};
  atomic_write(out + ".summary.json", rsummary.dump(2) + "\n");
  return kExitOk;
}

int cmd_frequencies(const RunConfig& cfg, const std::string& out, bool crosscheck) {
  LieAlgebra alg = algebra_from_config(cfg.doc);
  SymmetricPairSetup setup = pair_setup_from_config(alg, cfg.doc);
  Vec xi0 = vector_from_json(cfg.doc.at("initial_state"));
  TorusData levels = torus_levels(setup, xi0);

  json report{{"command", "frequencies"},
              {"config_hash", cfg.hash_hex},
              {"tolerances", tolerance_table()},
              {"levels",
               json{{"c0", std::vector<double>(levels.c0.begin(), levels.c0.end())},
                    {"c", levels.c},
                    {"c_total", levels.c_total}}},
              {"compactness_margin", levels.compactness_margin}};
  if (!(levels.compactness_margin > 0.0)) {
    report["error"] = "compactness inequality violated";
    emit(report, out);
    return kExitCheckFailed;
  }
  FrequencyReport freq = frequencies(setup, levels);
  report["frequencies"] = freq.omega;
  report["frequency_ratios"] = freq.ratios;

  bool pass = true;
  if (crosscheck) {
    const json& s = cfg.doc.value("suite", json::object());
    double T = s.value("crosscheck_T", 1e4);
    double h = s.value("crosscheck_h", 1e-3);
    std::vector<double> slopes = rotation_numbers(setup, xi0, T, h);
    json cc{{"T", T}, {"winding_slopes", slopes}};
    std::vector<double> winding_ratios;
    double worst = 0.0;
    for (size_t k = 1; k < slopes.size(); ++k) {
      double r = std::abs(slopes[k] / slopes[0]);
      winding_ratios.push_back(r);
      worst = std::max(worst, std::abs(r - std::abs(freq.ratios[k - 1])));
    }
    cc["winding_ratios"] = winding_ratios;
    cc["worst_ratio_error"] = worst;
    pass = worst < 1e-3;
    cc["pass"] = pass;
    report["crosscheck"] = cc;
  }
  emit(report, out);
  return pass ? kExitOk : kExitCheckFailed;
}

}  // namespace eps
