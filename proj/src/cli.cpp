#include "pwacert/cli.hpp"

#include "pwacert/certify.hpp"
#include "pwacert/fixtures.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

namespace pwacert::cli {

using geometry::Partition;
using geometry::Vector;
using iise::InvariantSetCertificate;
using nlohmann::json;

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

struct LoopBuilder {
  // Boundary edges keyed by sorted pool-id pairs.
  std::vector<std::pair<int, int>> edges;
  std::map<int, std::vector<size_t>> at_vertex;

  void add(int a, int b) {
    if (a == b) return;
    if (a > b) std::swap(a, b);
    for (const auto& e : edges)
      if (e.first == a && e.second == b) return;
    at_vertex[a].push_back(edges.size());
    at_vertex[b].push_back(edges.size());
    edges.emplace_back(a, b);
  }

  std::vector<std::vector<int>> walk() const {
    std::vector<std::vector<int>> loops;
    std::vector<bool> used(edges.size(), false);
    for (size_t start = 0; start < edges.size(); ++start) {
      if (used[start]) continue;
      std::vector<int> loop{edges[start].first, edges[start].second};
      used[start] = true;
      while (loop.back() != loop.front()) {
        const int cur = loop.back();
        size_t next_edge = edges.size();
        for (size_t e : at_vertex.at(cur))
          if (!used[e]) {
            next_edge = e;
            break;
          }
        if (next_edge == edges.size()) break;  // open chain, drop below
        used[next_edge] = true;
        loop.push_back(edges[next_edge].first == cur ? edges[next_edge].second
                                                     : edges[next_edge].first);
      }
      if (loop.size() >= 4 && loop.back() == loop.front()) {
        loop.pop_back();
        loops.push_back(std::move(loop));
      }
    }
    return loops;
  }
};

double polygon_signed_area(const std::vector<Vector>& loop) {
  double area = 0.0;
  for (size_t i = 0; i < loop.size(); ++i) {
    const auto& p = loop[i];
    const auto& q = loop[(i + 1) % loop.size()];
    area += p(0) * q(1) - q(0) * p(1);
  }
  return 0.5 * area;
}

}  // namespace

std::vector<std::vector<Vector>> boundary_loops(const InvariantSetCertificate& cert) {
  if (cert.partition.domain().dim() != 2)
    throw std::invalid_argument("boundary extraction supports 2-D systems only");
  auto [aligned, h] = iise::refine_boundary(cert.partition, cert.barrier);

  std::vector<bool> inside(aligned.cells().size(), false);
  for (const auto& cell : aligned.cells()) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& v : cell.region.vertices()) lo = std::min(lo, h.value(cell.id, v));
    inside[static_cast<size_t>(cell.id)] = lo >= -geometry::kZeroTol;
  }

  const auto& pool = aligned.vertex_pool();
  auto covered_twice = [&](const Vector& x) {
    int count = 0;
    for (const auto& cell : aligned.cells()) {
      if (!inside[static_cast<size_t>(cell.id)]) continue;
      if (cell.region.contains(x, geometry::kFeasTol)) ++count;
      if (count >= 2) return true;
    }
    return false;
  };

  LoopBuilder builder;
  for (const auto& cell : aligned.cells()) {
    if (!inside[static_cast<size_t>(cell.id)]) continue;
    const auto& vids = aligned.cell_vertex_ids(cell.id);
    for (const auto& row : cell.region.halfspaces()) {
      // Pool ids of this cell active on the row, reduced to the two
      // extreme points along the edge tangent.
      std::vector<int> active;
      for (size_t local = 0; local < cell.region.vertices().size(); ++local)
        if (std::abs(row.value(cell.region.vertices()[local])) <= geometry::kZeroTol)
          active.push_back(vids[local]);
      if (active.size() < 2) continue;
      Vector tangent(2);
      tangent << -row.normal(1), row.normal(0);
      auto proj = [&](int id) { return tangent.dot(pool[static_cast<size_t>(id)]); };
      int a = active.front(), b = active.front();
      for (int id : active) {
        if (proj(id) < proj(a)) a = id;
        if (proj(id) > proj(b)) b = id;
      }
      if (a == b) continue;
      // Interior edges are covered by two inside cells along their length.
      const Vector pa = pool[static_cast<size_t>(a)], pb = pool[static_cast<size_t>(b)];
      bool interior = true;
      for (double t : {0.25, 0.5, 0.75})
        if (!covered_twice(pa + t * (pb - pa))) interior = false;
      if (!interior) builder.add(a, b);
    }
  }

  std::vector<std::vector<Vector>> out;
  for (auto& loop_ids : builder.walk()) {
    std::vector<Vector> loop;
    loop.reserve(loop_ids.size());
    for (int id : loop_ids) loop.push_back(pool[static_cast<size_t>(id)]);
    if (polygon_signed_area(loop) < 0.0) std::reverse(loop.begin(), loop.end());
    // Deterministic starting point: lexicographically smallest vertex.
    size_t best = 0;
    for (size_t i = 1; i < loop.size(); ++i) {
      if (loop[i](0) < loop[best](0) - 1e-12 ||
          (std::abs(loop[i](0) - loop[best](0)) <= 1e-12 && loop[i](1) < loop[best](1)))
        best = i;
    }
    std::rotate(loop.begin(), loop.begin() + static_cast<long>(best), loop.end());
    out.push_back(std::move(loop));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::abs(polygon_signed_area(a)) > std::abs(polygon_signed_area(b));
  });
  return out;
}

int cmd_analyze(const std::string& spec_path, const io::RunConfig& cfg,
                const std::string& output_path) {
  io::SystemSpec spec;
  Partition dynamics;
  try {
    cfg.validate();
    spec = io::load_system_spec(spec_path);
    dynamics = io::build_dynamics(spec);
    geometry::validate_partition(dynamics, static_cast<unsigned>(cfg.seed));
  } catch (const std::exception& e) {
    std::cerr << "analyze: invalid input: " << e.what() << "\n";
    return kExitParse;
  }

  const auto t_start = std::chrono::steady_clock::now();
  iise::IiseRun run;
  lyapunov::RoaCertificate roa;
  try {
    roa = lyapunov::run_seroaise(dynamics, cfg.to_iise(), &run);
  } catch (const iise::NoInvariantSet& e) {
    std::cerr << "analyze: no invariant set: " << e.what() << "\n";
    return kExitNoSet;
  } catch (const lyapunov::EmptyRestriction& e) {
    std::cerr << "analyze: empty restriction: " << e.what() << "\n";
    return kExitNoSet;
  } catch (const lyapunov::OriginNotCovered& e) {
    std::cerr << "analyze: " << e.what() << "\n";
    return kExitNoSet;
  } catch (const iise::RefinementStalled& e) {
    std::cerr << "analyze: refinement stalled: " << e.what() << "\n";
    return kExitStalled;
  } catch (const linprog::SolverFailure& e) {
    std::cerr << "analyze: solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "analyze: invalid input: " << e.what() << "\n";
    return kExitParse;
  }
  const double pipeline_ms = ms_since(t_start);

  // Independent replay of everything we are about to report.
  const auto t_replay = std::chrono::steady_clock::now();
  json replay;
  bool clean = true;
  json barrier_reports = json::array();
  json nagumo_reports = json::array();
  for (const auto& cert : run.certificates) {
    auto rb = certify::replay_barrier(cert);
    auto rn = certify::check_nagumo_boundary(cert);
    clean = clean && rb.passed && rn.passed;
    barrier_reports.push_back(io::to_json(rb));
    nagumo_reports.push_back(io::to_json(rn));
  }
  auto rl = certify::replay_lyapunov(roa);
  clean = clean && rl.passed;
  const auto mc = certify::monte_carlo_invariance(roa.invariant.partition, roa.invariant,
                                                  cfg.samples, cfg.horizon, cfg.dt, cfg.seed);
  clean = clean && mc.exits == 0 && mc.max_overshoot <= certify::kOvershootTol;
  replay["barrier"] = std::move(barrier_reports);
  replay["nagumo"] = std::move(nagumo_reports);
  replay["lyapunov"] = io::to_json(rl);
  replay["monte_carlo"] = {{"samples", mc.samples},
                           {"exits", mc.exits},
                           {"max_overshoot", mc.max_overshoot},
                           {"seed", mc.seed}};
  const double replay_ms = ms_since(t_replay);

  json doc;
  doc["schema_version"] = io::kSchemaVersion;
  doc["name"] = spec.name;
  doc["config"] = io::to_json(cfg);
  doc["system"] = io::to_json(spec);
  doc["iise"]["termination"] =
      run.termination == iise::Termination::NugisExhausted ? "nugis-exhausted" : "max-iter";
  json iterations = json::array();
  for (const auto& cert : run.certificates) iterations.push_back(io::to_json(cert));
  doc["iise"]["iterations"] = std::move(iterations);
  doc["lyapunov"] = io::to_json(roa.lyapunov);
  doc["lyapunov_slack_sum"] = roa.lyapunov_slack_sum;
  doc["lyapunov_rounds"] = roa.provenance.lyapunov_rounds;

  json stats;
  stats["initial_cells"] = dynamics.cells().size();
  stats["final_cells"] = roa.lyapunov.partition.cells().size();
  json iter_stats = json::array();
  for (size_t m = 0; m < run.certificates.size(); ++m) {
    const auto& cert = run.certificates[m];
    const auto& st = run.stats[m];
    json sj;
    sj["cells"] = cert.partition.cells().size();
    sj["interior"] = cert.categories.interior.size();
    sj["nugis"] = cert.categories.nugis.size();
    sj["bis"] = cert.categories.bis.size();
    sj["excluded"] = cert.categories.excluded.size();
    sj["unclassified"] = cert.categories.unclassified.size();
    sj["lp_solves"] = st.lp_solves;
    sj["area_estimate"] = certify::estimate_set_volume(cert, 100000, cfg.seed);
    iter_stats.push_back(std::move(sj));
  }
  stats["iterations"] = std::move(iter_stats);
  stats["sliding_flags"] = iise::sliding_mode_flags(dynamics).size();
  stats["timings_ms"] = {{"pipeline", pipeline_ms},
                         {"replay", replay_ms},
                         {"total", pipeline_ms + replay_ms}};
  doc["stats"] = std::move(stats);
  doc["replay"] = std::move(replay);

  io::write_json_atomic(doc, output_path);
  std::cout << "analyze: " << spec.name << ": " << run.certificates.size()
            << " certificate(s), termination " << doc["iise"]["termination"].get<std::string>()
            << ", cells " << dynamics.cells().size() << " -> "
            << roa.lyapunov.partition.cells().size() << ", replay "
            << (clean ? "clean" : "FAILED") << ", wrote " << output_path << "\n";
  return clean ? kExitOk : kExitReplay;
}

int cmd_boundary(const std::string& result_path, int iteration, const std::string& output_path) {
  io::ResultData data;
  try {
    data = io::result_from_json(io::read_json_file(result_path));
  } catch (const std::exception& e) {
    std::cerr << "boundary: " << e.what() << "\n";
    return kExitParse;
  }
  if (iteration < 0 || iteration >= static_cast<int>(data.iterations.size())) {
    std::cerr << "boundary: iteration " << iteration << " out of range (0.."
              << data.iterations.size() - 1 << ")\n";
    return kExitParse;
  }
  std::vector<std::vector<Vector>> loops;
  try {
    loops = boundary_loops(data.iterations[static_cast<size_t>(iteration)]);
  } catch (const std::invalid_argument& e) {
    std::cerr << "boundary: " << e.what() << "\n";
    return kExitParse;
  }

  const std::string tmp = output_path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) {
      std::cerr << "boundary: cannot write " << tmp << "\n";
      return kExitParse;
    }
    out << std::setprecision(17);
    bool first = true;
    for (const auto& loop : loops) {
      if (!first) out << "\n";
      first = false;
      for (const auto& v : loop) out << v(0) << " " << v(1) << "\n";
    }
  }
  std::filesystem::rename(tmp, output_path);
  std::cout << "boundary: iteration " << iteration << ": " << loops.size() << " loop(s), wrote "
            << output_path << "\n";
  return kExitOk;
}

int cmd_certify(const std::string& result_path) {
  io::ResultData data;
  try {
    data = io::result_from_json(io::read_json_file(result_path));
  } catch (const std::exception& e) {
    std::cerr << "certify: " << e.what() << "\n";
    return kExitParse;
  }

  std::cout << std::setprecision(17);
  const certify::CheckEntry* violation = nullptr;
  certify::ReplayReport failing_report;
  auto show = [&](const std::string& label, const certify::ReplayReport& report) {
    std::cout << (report.passed ? "[ok]  " : "[FAIL] ") << label << " checks=" << report.checks.size()
              << " worst_margin=" << report.worst_margin << "\n";
    if (!report.passed && violation == nullptr) {
      failing_report = report;
      violation = failing_report.first_failure();
    }
  };

  for (size_t m = 0; m < data.iterations.size(); ++m) {
    const auto& cert = data.iterations[m];
    show("barrier[" + std::to_string(m) + "]", certify::replay_barrier(cert));
    show("nagumo[" + std::to_string(m) + "]", certify::check_nagumo_boundary(cert));
  }
  if (data.lyapunov) {
    lyapunov::RoaCertificate roa;
    roa.invariant = data.iterations.back();
    roa.lyapunov = *data.lyapunov;
    show("lyapunov", certify::replay_lyapunov(roa));
  }

  const auto& final_cert = data.iterations.back();
  const auto mc =
      certify::monte_carlo_invariance(final_cert.partition, final_cert, data.config.samples,
                                      data.config.horizon, data.config.dt, data.config.seed);
  const bool mc_ok = mc.exits == 0 && mc.max_overshoot <= certify::kOvershootTol;
  std::cout << (mc_ok ? "[ok]  " : "[FAIL] ") << "monte-carlo samples=" << mc.samples
            << " exits=" << mc.exits << " max_overshoot=" << mc.max_overshoot << "\n";

  if (violation != nullptr) {
    std::cout << "certify: FAILED at " << violation->name << " (" << violation->location
              << ") margin=" << violation->margin << "\n";
    return kExitReplay;
  }
  if (!mc_ok) {
    std::cout << "certify: FAILED at monte-carlo invariance\n";
    return kExitReplay;
  }
  std::cout << "certify: clean\n";
  return kExitOk;
}

}  // namespace pwacert::cli
