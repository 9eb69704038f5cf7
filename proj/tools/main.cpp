#include "pwacert/cli.hpp"

#include <CLI11.hpp>

#include <string>

int main(int argc, char** argv) {
  CLI::App app{"pwacert: certified invariant sets and RoA estimates for PWA/ReLU dynamics"};
  app.require_subcommand(1);

  pwacert::io::RunConfig cfg;
  std::string spec_path;
  std::string result_path;
  std::string output_path = "result.json";
  int iteration = 0;

  auto* analyze = app.add_subcommand(
      "analyze", "Run the full pipeline on a system spec (path or builtin:<name>)");
  analyze->add_option("spec", spec_path, "system spec file or builtin:<name>")->required();
  analyze->add_option("--output", output_path, "result document path");
  analyze->add_option("--alpha0", cfg.alpha0, "initial class-K-infinity slope");
  analyze->add_option("--gamma", cfg.gamma, "alpha decay rate, in (0,1)");
  analyze->add_option("--eps1", cfg.eps1, "exclusion margin");
  analyze->add_option("--eps2", cfg.eps2, "unclassified membership margin");
  analyze->add_option("--eps3", cfg.eps3, "interior/derivative margin");
  analyze->add_option("--eps-nugis", cfg.eps_nugis, "growth threshold on the boundary derivative");
  analyze->add_option("--penalty", cfg.penalty, "blocking-slack penalty (> 1)");
  analyze->add_option("--max-iter", cfg.max_iter, "outer iteration budget");
  analyze->add_option("--dt", cfg.dt, "simulation step");
  analyze->add_option("--horizon", cfg.horizon, "simulation horizon");
  analyze->add_option("--samples", cfg.samples, "Monte-Carlo sample count");
  analyze->add_option("--seed", cfg.seed, "RNG seed for all sampling");

  auto* boundary = app.add_subcommand("boundary", "Emit the set boundary polyline of an iteration");
  boundary->add_option("result", result_path, "result document")->required();
  boundary->add_option("iteration", iteration, "iteration index (0 = seed)")->required();
  boundary->add_option("output", output_path, "polyline output path")->required();

  auto* certify = app.add_subcommand("certify", "Replay a stored certificate from scratch");
  certify->add_option("result", result_path, "result document")->required();

  CLI11_PARSE(app, argc, argv);

  if (analyze->parsed()) return pwacert::cli::cmd_analyze(spec_path, cfg, output_path);
  if (boundary->parsed()) return pwacert::cli::cmd_boundary(result_path, iteration, output_path);
  return pwacert::cli::cmd_certify(result_path);
}
