#include <iostream>

#include <CLI11.hpp>

#include "liees/cli/commands.hpp"

using namespace liees::cli;

int main(int argc, char** argv) {
  CLI::App app{"Lie-bracket extremum seeking toolkit"};
  app.require_subcommand(1);

  RunOptions run;
  auto* r = app.add_subcommand("run", "integrate one configured experiment");
  r->add_option("--config", run.config, "experiment JSON")->required();
  r->add_option("--out", run.out, "summary JSON path (overrides output.summary_json)");
  r->add_option("--decimate", run.decimate, "keep every k-th step");
  r->add_option("--steps-per-period", run.steps_per_period, "RK4 steps per dither period");

  CompareOptions cmp;
  std::vector<std::string> cmp_configs;
  auto* c = app.add_subcommand("compare", "run two experiments on a shared time grid");
  c->add_option("--config", cmp_configs, "two experiment JSON files")->required()->expected(2);
  c->add_option("--out", cmp.out_csv, "aligned CSV path")->required();
  c->add_option("--summary", cmp.summary, "verdict JSON path");
  c->add_option("--decimate", cmp.decimate, "keep every k-th step");
  c->add_option("--steps-per-period", cmp.steps_per_period, "RK4 steps per dither period");

  CoeffsOptions co;
  auto* k = app.add_subcommand("coeffs", "bracket coefficients of a dither set");
  k->add_option("--config", co.config, "take the dithers and targets of a configured system");
  k->add_option("--kind", co.kind, "dither kind")->capture_default_str();
  k->add_option("--kappa", co.kappa, "frequency multiplier")->capture_default_str();
  k->add_option("--epsilon", co.epsilon, "period")->capture_default_str();
  k->add_option("--depth", co.depth, "truncation depth")->capture_default_str();
  k->add_option("--target", co.target, "target bracket, e.g. 1.2.2");
  k->add_option("--tol", co.tol, "excitation tolerance")->capture_default_str();
  k->add_option("--out", co.out, "coefficient CSV path");

  RateOptions ra;
  auto* t = app.add_subcommand("rate", "classify the decay of a trajectory CSV");
  t->add_option("--in", ra.in, "trajectory CSV (t,x,J)")->required();
  t->add_option("--xstar", ra.xstar, "minimizer")->required();
  t->add_option("--epsilon", ra.epsilon, "stroboscopic period")->required();
  t->add_option("--out", ra.out, "JSON path");

  std::string suite = "all";
  auto* v = app.add_subcommand("verify", "run the built-in property suites");
  v->add_option("suite", suite, "all|brackets|excitation|lemma3|assumptions|signature|integrator")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(exit_invalid);
  }

  if (r->parsed()) return cmd_run(run, std::cout, std::cerr);
  if (c->parsed()) {
    cmp.config_a = cmp_configs.at(0);
    cmp.config_b = cmp_configs.at(1);
    return cmd_compare(cmp, std::cout, std::cerr);
  }
  if (k->parsed()) return cmd_coeffs(co, std::cout, std::cerr);
  if (t->parsed()) return cmd_rate(ra, std::cout, std::cerr);
  return cmd_verify(suite, std::cout, std::cerr);
}
