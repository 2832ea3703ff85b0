// Command-line front end: reduce, validate, export-example.
#include "ebal/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int run_reduce(const std::string& system_path, const std::string& example, const ebal::PipelineParams& params,
               const std::string& out_prefix) {
  ebal::SystemFile sys = example.empty() ? ebal::parse_system(system_path) : ebal::builtin_example(example);
  ebal::PipelineResult res = ebal::run_pipeline(sys, params);

  const std::string report = res.report.to_text();
  std::cout << report;
  if (!out_prefix.empty()) {
    std::ofstream(out_prefix + ".report.txt") << report;
    ebal::SystemFile red =
        res.reduced_ph ? ebal::system_file_from(*res.reduced_ph) : ebal::system_file_from(res.reduced);
    ebal::write_system(red, out_prefix + ".reduced.sys");
    if (res.traj_full) {
      ebal::write_trajectory_csv(out_prefix + ".full.csv", res.traj_full->times, res.traj_full->inputs,
                                 res.traj_full->outputs);
      ebal::write_trajectory_csv(out_prefix + ".reduced.csv", res.traj_reduced->times, res.traj_reduced->inputs,
                                 res.traj_reduced->outputs);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized and extended balanced truncation"};
  app.require_subcommand(1);

  ebal::PipelineParams p;
  std::string system_path, example, out_prefix;
  int k = 0, pairs = -1;
  double delta = 0, delta_c = 0, alpha = 0, beta = 0, horizon = 0, dt = 0;
  std::string simulate;

  auto* reduce = app.add_subcommand("reduce", "reduce a system and report the error bound");
  auto* sys_opt = reduce->add_option("--system", system_path, "system file")->check(CLI::ExistingFile);
  auto* ex_opt = reduce->add_option("--example", example, "built-in system")->check(CLI::IsMember({"msd", "rlc"}));
  sys_opt->excludes(ex_opt);
  reduce->add_option("--pipeline", p.pipeline, "gen | ext | gen-ph | ext-ph")
      ->check(CLI::IsMember({"gen", "ext", "gen-ph", "ext-ph"}));
  auto* k_opt = reduce->add_option("--k", k, "retained order");
  auto* pairs_opt = reduce->add_option("--pairs", pairs, "capacitor/inductor pairs to cut");
  k_opt->excludes(pairs_opt);
  auto* delta_opt = reduce->add_option("--delta", delta, "Hamiltonian Gramians Q = delta H");
  auto* delta_c_opt = reduce->add_option("--delta-c", delta_c, "Pbreve = delta_c H^-1");
  reduce->add_option("--slack-o", p.slack_o, "observability slack, multiple of I");
  reduce->add_option("--slack-c", p.slack_c, "controllability slack, multiple of I");
  auto* alpha_opt = reduce->add_option("--alpha", alpha);
  auto* beta_opt = reduce->add_option("--beta", beta);
  reduce->add_option("--gamma-o", p.gamma_o, "zero | appendix | file");
  reduce->add_option("--gamma-c", p.gamma_c, "zero | appendix | file");
  reduce->add_option("--weights", p.weights, "uniform | ascending | file");
  reduce->add_option("--side", p.side, "gen-ph factor side")->check(CLI::IsMember({"P", "Q"}));
  reduce->add_option("--tol", p.tol, "relative tolerance of the H-infinity bisection");
  auto* sim_opt = reduce->add_option("--simulate", simulate, "signal spec, e.g. step:0,1");
  auto* hz_opt = reduce->add_option("--horizon", horizon);
  auto* dt_opt = reduce->add_option("--dt", dt);
  reduce->add_flag("--hinf", p.hinf, "compute the H-infinity norm of the error system");
  reduce->add_flag("--force", p.force, "allow a cut inside a tied cluster");
  reduce->add_option("--out", out_prefix, "prefix for report, reduced system and CSV files");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "parse and validate a system file");
  validate->add_option("file", validate_path)->required()->check(CLI::ExistingFile);

  std::string export_name, export_path;
  auto* exp = app.add_subcommand("export-example", "write a built-in example as a system file");
  exp->add_option("name", export_name)->required()->check(CLI::IsMember({"msd", "rlc"}));
  exp->add_option("file", export_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*reduce) {
      if (system_path.empty() && example.empty()) throw ebal::Error(ebal::ErrorCode::Usage, "need --system or --example");
      if (*k_opt) p.k = k;
      if (*pairs_opt) p.pairs = pairs;
      if (*delta_opt) p.delta = delta;
      if (*delta_c_opt) p.delta_c = delta_c;
      if (*alpha_opt) p.alpha = alpha;
      if (*beta_opt) p.beta = beta;
      if (*sim_opt) p.simulate = simulate;
      if (*hz_opt) p.horizon = horizon;
      if (*dt_opt) p.dt = dt;
      return run_reduce(system_path, example, p, out_prefix);
    }
    if (*validate) {
      ebal::SystemFile f = ebal::parse_system(validate_path);
      std::cout << "ok kind=" << f.kind << " n=" << f.lti().n() << "\n";
      return 0;
    }
    ebal::write_system(ebal::builtin_example(export_name), export_path);
    return 0;
  } catch (const ebal::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ebal::exit_code_for(e.code());
  }
}
