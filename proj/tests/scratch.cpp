// Temporary pipeline probe (not part of the test suite).
#include "pwacert/certify.hpp"
#include "pwacert/cli.hpp"
#include "pwacert/fixtures.hpp"
#include "pwacert/io.hpp"
#include "pwacert/lyapunov.hpp"

#include <chrono>
#include <iostream>

using namespace pwacert;

static void probe(const io::SystemSpec& spec) {
  std::cout << "=== " << spec.name << " ===\n";
  auto dynamics = io::build_dynamics(spec);
  std::cout << "cells: " << dynamics.cells().size()
            << " vertices: " << dynamics.vertex_pool().size()
            << " continuity defect: " << geometry::continuity_defect(dynamics) << "\n";
  iise::IiseConfig cfg;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto seed = iise::seed_barrier(dynamics, cfg);
    std::cout << "seed: certified=" << seed.certified
              << " cells=" << seed.partition.cells().size()
              << " blocking=" << seed.slacks.blocking_sum()
              << " excl=" << seed.categories.excluded.size()
              << " uc=" << seed.categories.unclassified.size() << "\n";
    const double area0 = certify::estimate_set_volume(seed, 100000, 1);
    std::cout << "seed area: " << area0 << "\n";

    auto run = iise::run_iise(dynamics, cfg);
    std::cout << "iise: " << run.certificates.size() << " certs, termination "
              << (run.termination == iise::Termination::NugisExhausted ? "nugis-exhausted"
                                                                       : "max-iter")
              << "\n";
    for (size_t m = 0; m < run.certificates.size(); ++m) {
      const auto& c = run.certificates[m];
      std::cout << "  iter " << m << ": cells=" << c.partition.cells().size()
                << " area=" << certify::estimate_set_volume(c, 100000, 1)
                << " alpha_m=" << c.barrier.alpha_m()
                << " nugis=" << c.categories.nugis.size()
                << " bis=" << c.categories.bis.size()
                << " int=" << c.categories.interior.size()
                << " excl=" << c.categories.excluded.size()
                << " uc=" << c.categories.unclassified.size() << "\n";
    }
    auto roa = lyapunov::run_seroaise(dynamics, cfg);
    std::cout << "lyapunov: cells=" << roa.lyapunov.partition.cells().size()
              << " slack=" << roa.lyapunov_slack_sum
              << " rounds=" << roa.provenance.lyapunov_rounds << "\n";
    auto rb = certify::replay_barrier(run.certificates.back());
    auto rn = certify::check_nagumo_boundary(run.certificates.back());
    auto rl = certify::replay_lyapunov(roa);
    std::cout << "replay: barrier=" << rb.passed << " (worst " << rb.worst_margin
              << ") nagumo=" << rn.passed << " (worst " << rn.worst_margin
              << ") lyap=" << rl.passed << " (worst " << rl.worst_margin << ")\n";
    auto mc = certify::monte_carlo_invariance(roa.invariant.partition, roa.invariant, 200, 20.0,
                                              1e-3, 7);
    std::cout << "mc: exits=" << mc.exits << " overshoot=" << mc.max_overshoot << "\n";
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << "\n";
  }
  std::cout << "elapsed: "
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
            << " s\n";
}

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  if (which == "all" || which == "stable") probe(fixtures::stable_linear());
  if (which == "all" || which == "unstable") probe(fixtures::unstable_linear());
  if (which == "all" || which == "pendulum") probe(fixtures::pendulum());
  return 0;
}
