#include <CLI11.hpp>
#include <iostream>

#include "eps/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Euler-Poincare-Suslov flows on compact Lie algebras"};
  app.require_subcommand(1);

  std::string config_path, out_path, traj_path, suite;
  std::uint64_t seed_override = 0;
  bool has_seed = false, crosscheck = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file (JSON)")->required();
    cmd->add_option("--seed", seed_override, "override the config seed")
        ->each([&](const std::string&) { has_seed = true; });
  };

  CLI::App* sim = app.add_subcommand("simulate", "integrate an instance to CSV");
  add_common(sim);
  sim->add_option("--out", out_path, "trajectory CSV path")->required();

  CLI::App* ver = app.add_subcommand("verify", "run a verification suite");
  add_common(ver);
  ver->add_option("suite", suite,
                  "conservation | split-integrals | chain-reduction | coincidence | "
                  "involution | measure | jacobi")
      ->required();
  ver->add_option("--out", out_path, "write the JSON report here too");

  CLI::App* rec = app.add_subcommand("reconstruct", "solve the kinematic equation");
  add_common(rec);
  rec->add_option("--traj", traj_path, "trajectory CSV from simulate")->required();
  rec->add_option("--out", out_path, "group trajectory CSV path")->required();

  CLI::App* frq = app.add_subcommand("frequencies", "torus frequencies and ratios");
  add_common(frq);
  frq->add_option("--out", out_path, "write the JSON report here too");
  frq->add_flag("--crosscheck", crosscheck, "compare against long-run winding numbers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : eps::kExitConfigError;
  }

  try {
    eps::RunConfig cfg = eps::RunConfig::load(config_path);
    if (has_seed) {
      cfg.doc["seed"] = seed_override;
      cfg = eps::RunConfig::from_json(cfg.doc);
    }
    if (sim->parsed()) return eps::cmd_simulate(cfg, out_path);
    if (ver->parsed()) return eps::cmd_verify(suite, cfg, out_path);
    if (rec->parsed()) return eps::cmd_reconstruct(cfg, traj_path, out_path);
    if (frq->parsed()) return eps::cmd_frequencies(cfg, out_path, crosscheck);
  } catch (const eps::NumericalRejection& e) {
    std::cerr << "numerical rejection: " << e.what() << "\n";
    return eps::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return eps::kExitConfigError;
  }
  return eps::kExitConfigError;
}
