#include "pwacert/io.hpp"

#include "pwacert/fixtures.hpp"

#include <filesystem>
#include <fstream>

namespace pwacert::io {

using geometry::Cell;
using geometry::Halfspace;
using geometry::Polytope;

namespace {

json matrix_to_json(const Matrix& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data;
  data.reserve(static_cast<size_t>(m.size()));
  for (long r = 0; r < m.rows(); ++r)
    for (long c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  j["data"] = data;
  return j;
}

Matrix matrix_from_json(const json& j) {
  const long rows = j.at("rows").get<long>();
  const long cols = j.at("cols").get<long>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<long>(data.size()) != rows * cols)
    throw ParseError("matrix data length does not match its shape");
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) m(r, c) = data[static_cast<size_t>(r * cols + c)];
  return m;
}

json vector_to_json(const Vector& v) {
  std::vector<double> data(v.data(), v.data() + v.size());
  return json(data);
}

Vector vector_from_json(const json& j) {
  const auto data = j.get<std::vector<double>>();
  Vector v(static_cast<long>(data.size()));
  for (size_t i = 0; i < data.size(); ++i) v(static_cast<long>(i)) = data[i];
  return v;
}

json pairs_to_json(const std::set<std::pair<int, int>>& pairs) {
  json arr = json::array();
  for (const auto& [i, k] : pairs) arr.push_back(json::array({i, k}));
  return arr;
}

std::set<std::pair<int, int>> pairs_from_json(const json& j) {
  std::set<std::pair<int, int>> out;
  for (const auto& e : j) out.insert({e.at(0).get<int>(), e.at(1).get<int>()});
  return out;
}

void require_version(const json& j) {
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kSchemaVersion)
    throw ParseError("unsupported or missing schema_version");
}

}  // namespace

void RunConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw ParseError(std::string(what) + " must be positive");
  };
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParseError("gamma must lie in (0,1)");
  positive(alpha0, "alpha0");
  positive(eps1, "eps1");
  positive(eps2, "eps2");
  positive(eps3, "eps3");
  positive(eps_nugis, "eps-nugis");
  positive(dt, "dt");
  positive(horizon, "horizon");
  if (!(penalty > 1.0)) throw ParseError("penalty must exceed 1");
  if (max_iter < 0) throw ParseError("max-iter must be nonnegative");
  if (samples < 0) throw ParseError("samples must be nonnegative");
}

iise::IiseConfig RunConfig::to_iise() const {
  iise::IiseConfig cfg;
  cfg.alpha0 = alpha0;
  cfg.gamma = gamma;
  cfg.eps1 = eps1;
  cfg.eps2 = eps2;
  cfg.eps3 = eps3;
  cfg.eps_nugis = eps_nugis;
  cfg.penalty = penalty;
  cfg.max_iter = max_iter;
  return cfg;
}

void SystemSpec::validate() const {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw ParseError("domain bounds must be nonempty and of equal length");
  for (long j = 0; j < lower.size(); ++j)
    if (!(lower(j) < upper(j))) throw ParseError("domain bounds must be strictly ordered");
  if (pwa.has_value() == network.has_value())
    throw ParseError("exactly one dynamics variant must be present");
  const int n = dim();
  if (pwa) {
    if (pwa->empty()) throw ParseError("pwa dynamics need at least one cell");
    for (const auto& c : *pwa) {
      if (c.E.cols() != n || c.E.rows() != c.e.size() || c.A.rows() != n || c.A.cols() != n ||
          c.a.size() != n)
        throw ParseError("pwa cell dimensions are inconsistent");
      if (!c.E.allFinite() || !c.e.allFinite() || !c.A.allFinite() || !c.a.allFinite())
        throw ParseError("pwa cell contains non-finite entries");
    }
  }
  if (network) {
    try {
      network->validate();
    } catch (const std::exception& e) {
      throw ParseError(e.what());
    }
    if (network->states() != n) throw ParseError("network state count does not match the domain");
  }
}

json to_json(const SystemSpec& spec) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = spec.name;
  j["domain"]["lower"] = vector_to_json(spec.lower);
  j["domain"]["upper"] = vector_to_json(spec.upper);
  if (spec.pwa) {
    j["dynamics"]["kind"] = "pwa";
    json cells = json::array();
    for (const auto& c : *spec.pwa) {
      json cj;
      cj["E"] = matrix_to_json(c.E);
      cj["e"] = vector_to_json(c.e);
      cj["A"] = matrix_to_json(c.A);
      cj["a"] = vector_to_json(c.a);
      cells.push_back(std::move(cj));
    }
    j["dynamics"]["cells"] = std::move(cells);
  } else {
    j["dynamics"]["kind"] = "relu";
    j["dynamics"]["W1"] = matrix_to_json(spec.network->W1);
    j["dynamics"]["b1"] = vector_to_json(spec.network->b1);
    j["dynamics"]["W2"] = matrix_to_json(spec.network->W2);
    j["dynamics"]["b2"] = vector_to_json(spec.network->b2);
  }
  return j;
}

SystemSpec system_spec_from_json(const json& j) {
  require_version(j);
  SystemSpec spec;
  spec.name = j.at("name").get<std::string>();
  spec.lower = vector_from_json(j.at("domain").at("lower"));
  spec.upper = vector_from_json(j.at("domain").at("upper"));
  const auto& dyn = j.at("dynamics");
  const auto kind = dyn.at("kind").get<std::string>();
  if (kind == "pwa") {
    std::vector<PwaCellSpec> cells;
    for (const auto& cj : dyn.at("cells")) {
      PwaCellSpec c;
      c.E = matrix_from_json(cj.at("E"));
      c.e = vector_from_json(cj.at("e"));
      c.A = matrix_from_json(cj.at("A"));
      c.a = vector_from_json(cj.at("a"));
      cells.push_back(std::move(c));
    }
    spec.pwa = std::move(cells);
  } else if (kind == "relu") {
    relu::ReluNetwork net;
    net.W1 = matrix_from_json(dyn.at("W1"));
    net.b1 = vector_from_json(dyn.at("b1"));
    net.W2 = matrix_from_json(dyn.at("W2"));
    net.b2 = vector_from_json(dyn.at("b2"));
    spec.network = std::move(net);
  } else {
    throw ParseError("unknown dynamics kind: " + kind);
  }
  spec.validate();
  return spec;
}

SystemSpec load_system_spec(const std::string& path) {
  constexpr const char* kBuiltinPrefix = "builtin:";
  if (path.rfind(kBuiltinPrefix, 0) == 0) {
    const std::string name = path.substr(std::string(kBuiltinPrefix).size());
    auto spec = fixtures::by_name(name);
    if (!spec) throw ParseError("unknown builtin fixture: " + name);
    return *spec;
  }
  return system_spec_from_json(read_json_file(path));
}

Partition build_dynamics(const SystemSpec& spec, int region_budget) {
  spec.validate();
  const Polytope domain = Polytope::box(spec.lower, spec.upper);
  if (spec.network) return relu::enumerate_regions(*spec.network, domain, region_budget);

  std::vector<Cell> cells;
  for (const auto& c : *spec.pwa) {
    std::vector<Halfspace> rows;
    for (long r = 0; r < c.E.rows(); ++r)
      rows.push_back(Halfspace{c.E.row(r).transpose(), c.e(r)});
    cells.push_back(Cell{-1, Polytope::from_halfspaces(std::move(rows)), c.A, c.a});
  }
  return Partition(std::move(cells), domain);
}

json to_json(const RunConfig& cfg) {
  json j;
  j["alpha0"] = cfg.alpha0;
  j["gamma"] = cfg.gamma;
  j["eps1"] = cfg.eps1;
  j["eps2"] = cfg.eps2;
  j["eps3"] = cfg.eps3;
  j["eps_nugis"] = cfg.eps_nugis;
  j["penalty"] = cfg.penalty;
  j["max_iter"] = cfg.max_iter;
  j["dt"] = cfg.dt;
  j["horizon"] = cfg.horizon;
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  j["classification_tol"] = geometry::kZeroTol;
  j["certification_tol"] = iise::kCertTol;
  j["feasibility_tol"] = geometry::kFeasTol;
  j["merge_tol"] = geometry::kMergeTol;
  j["replay_tol"] = certify::kReplayTol;
  j["overshoot_tol"] = certify::kOvershootTol;
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  cfg.alpha0 = j.at("alpha0").get<double>();
  cfg.gamma = j.at("gamma").get<double>();
  cfg.eps1 = j.at("eps1").get<double>();
  cfg.eps2 = j.at("eps2").get<double>();
  cfg.eps3 = j.at("eps3").get<double>();
  cfg.eps_nugis = j.at("eps_nugis").get<double>();
  cfg.penalty = j.at("penalty").get<double>();
  cfg.max_iter = j.at("max_iter").get<int>();
  cfg.dt = j.at("dt").get<double>();
  cfg.horizon = j.at("horizon").get<double>();
  cfg.samples = j.at("samples").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.validate();
  return cfg;
}

json to_json(const Partition& p) {
  json j;
  auto polytope_to_json = [&](const Polytope& poly) {
    json pj;
    json rows = json::array();
    for (const auto& h : poly.halfspaces()) {
      json hj;
      hj["normal"] = vector_to_json(h.normal);
      hj["offset"] = h.offset;
      rows.push_back(std::move(hj));
    }
    pj["halfspaces"] = std::move(rows);
    json verts = json::array();
    for (const auto& v : poly.vertices()) verts.push_back(vector_to_json(v));
    pj["vertices"] = std::move(verts);
    return pj;
  };
  j["domain"] = polytope_to_json(p.domain());
  json cells = json::array();
  for (const auto& c : p.cells()) {
    json cj;
    cj["region"] = polytope_to_json(c.region);
    cj["A"] = matrix_to_json(c.A);
    cj["a"] = vector_to_json(c.a);
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  return j;
}

Partition partition_from_json(const json& j) {
  auto polytope_from_json = [&](const json& pj) {
    std::vector<Halfspace> rows;
    for (const auto& hj : pj.at("halfspaces"))
      rows.push_back(Halfspace{vector_from_json(hj.at("normal")), hj.at("offset").get<double>()});
    std::vector<Vector> verts;
    for (const auto& vj : pj.at("vertices")) verts.push_back(vector_from_json(vj));
    return Polytope::from_data(std::move(rows), std::move(verts));
  };
  const Polytope domain = polytope_from_json(j.at("domain"));
  std::vector<Cell> cells;
  for (const auto& cj : j.at("cells"))
    cells.push_back(Cell{-1, polytope_from_json(cj.at("region")), matrix_from_json(cj.at("A")),
                         vector_from_json(cj.at("a"))});
  return Partition(std::move(cells), domain);
}

json to_json(const iise::InvariantSetCertificate& cert) {
  json j;
  j["partition"] = to_json(cert.partition);
  json coeffs = json::array();
  for (const auto& c : cert.barrier.coeffs) {
    json cj;
    cj["s"] = vector_to_json(c.s);
    cj["t"] = c.t;
    coeffs.push_back(std::move(cj));
  }
  j["barrier"]["coeffs"] = std::move(coeffs);
  j["barrier"]["alpha0"] = cert.barrier.alpha0;
  j["barrier"]["gamma"] = cert.barrier.gamma;
  j["barrier"]["iteration"] = cert.barrier.iteration;
  j["barrier"]["alpha_m"] = cert.barrier.alpha_m();
  j["categories"]["interior"] = pairs_to_json(cert.categories.interior);
  j["categories"]["nugis"] = pairs_to_json(cert.categories.nugis);
  j["categories"]["bis"] = pairs_to_json(cert.categories.bis);
  j["categories"]["excluded"] = pairs_to_json(cert.categories.excluded);
  j["categories"]["unclassified"] = pairs_to_json(cert.categories.unclassified);
  json tau_b = json::object();
  for (const auto& [cell, v] : cert.slacks.tau_b) tau_b[std::to_string(cell)] = v;
  json tau_uc = json::object();
  for (const auto& [cell, v] : cert.slacks.tau_uc) tau_uc[std::to_string(cell)] = v;
  j["slacks"]["tau_b"] = std::move(tau_b);
  j["slacks"]["tau_uc"] = std::move(tau_uc);
  j["slacks"]["tau_int"] = cert.slacks.tau_int;
  j["slacks"]["tau_nugis"] = cert.slacks.tau_nugis;
  j["slacks"]["tau_bis"] = cert.slacks.tau_bis;
  j["slacks"]["blocking_sum"] = cert.slacks.blocking_sum();
  j["tolerances"]["eps1"] = cert.tolerances.eps1;
  j["tolerances"]["eps2"] = cert.tolerances.eps2;
  j["tolerances"]["eps3"] = cert.tolerances.eps3;
  j["tolerances"]["eps_nugis"] = cert.tolerances.eps_nugis;
  j["tolerances"]["penalty"] = cert.tolerances.penalty;
  j["certified"] = cert.certified;
  return j;
}

iise::InvariantSetCertificate certificate_from_json(const json& j) {
  iise::InvariantSetCertificate cert;
  cert.partition = partition_from_json(j.at("partition"));
  for (const auto& cj : j.at("barrier").at("coeffs"))
    cert.barrier.coeffs.push_back({vector_from_json(cj.at("s")), cj.at("t").get<double>()});
  cert.barrier.alpha0 = j.at("barrier").at("alpha0").get<double>();
  cert.barrier.gamma = j.at("barrier").at("gamma").get<double>();
  cert.barrier.iteration = j.at("barrier").at("iteration").get<int>();
  cert.categories.interior = pairs_from_json(j.at("categories").at("interior"));
  cert.categories.nugis = pairs_from_json(j.at("categories").at("nugis"));
  cert.categories.bis = pairs_from_json(j.at("categories").at("bis"));
  cert.categories.excluded = pairs_from_json(j.at("categories").at("excluded"));
  cert.categories.unclassified = pairs_from_json(j.at("categories").at("unclassified"));
  for (const auto& [key, v] : j.at("slacks").at("tau_b").items())
    cert.slacks.tau_b[std::stoi(key)] = v.get<double>();
  for (const auto& [key, v] : j.at("slacks").at("tau_uc").items())
    cert.slacks.tau_uc[std::stoi(key)] = v.get<double>();
  cert.slacks.tau_int = j.at("slacks").at("tau_int").get<double>();
  cert.slacks.tau_nugis = j.at("slacks").at("tau_nugis").get<double>();
  cert.slacks.tau_bis = j.at("slacks").at("tau_bis").get<double>();
  cert.tolerances.eps1 = j.at("tolerances").at("eps1").get<double>();
  cert.tolerances.eps2 = j.at("tolerances").at("eps2").get<double>();
  cert.tolerances.eps3 = j.at("tolerances").at("eps3").get<double>();
  cert.tolerances.eps_nugis = j.at("tolerances").at("eps_nugis").get<double>();
  cert.tolerances.penalty = j.at("tolerances").at("penalty").get<double>();
  cert.certified = j.at("certified").get<bool>();
  if (cert.barrier.coeffs.size() != cert.partition.cells().size())
    throw ParseError("certificate barrier does not match its partition");
  return cert;
}

json to_json(const lyapunov::LyapunovFunction& fn) {
  json j;
  j["partition"] = to_json(fn.partition);
  json coeffs = json::array();
  for (const auto& c : fn.coeffs) {
    json cj;
    cj["p"] = vector_to_json(c.p);
    cj["q"] = c.q;
    coeffs.push_back(std::move(cj));
  }
  j["coeffs"] = std::move(coeffs);
  j["origin_cells"] = fn.origin_cells;
  return j;
}

lyapunov::LyapunovFunction lyapunov_from_json(const json& j) {
  lyapunov::LyapunovFunction fn;
  fn.partition = partition_from_json(j.at("partition"));
  for (const auto& cj : j.at("coeffs"))
    fn.coeffs.push_back({vector_from_json(cj.at("p")), cj.at("q").get<double>()});
  fn.origin_cells = j.at("origin_cells").get<std::vector<int>>();
  if (fn.coeffs.size() != fn.partition.cells().size())
    throw ParseError("Lyapunov coefficients do not match their partition");
  return fn;
}

json to_json(const certify::ReplayReport& report) {
  json j;
  j["passed"] = report.passed;
  j["worst_margin"] = report.worst_margin;
  j["checks"] = report.checks.size();
  json failures = json::array();
  for (const auto& c : report.checks)
    if (!c.passed)
      failures.push_back(json{{"name", c.name}, {"location", c.location}, {"margin", c.margin}});
  j["failures"] = std::move(failures);
  return j;
}

ResultData result_from_json(const json& j) {
  require_version(j);
  ResultData data;
  data.name = j.at("name").get<std::string>();
  data.config = run_config_from_json(j.at("config"));
  data.termination = j.at("iise").at("termination").get<std::string>();
  for (const auto& cj : j.at("iise").at("iterations"))
    data.iterations.push_back(certificate_from_json(cj));
  if (data.iterations.empty()) throw ParseError("result contains no certificates");
  if (j.contains("lyapunov")) {
    data.lyapunov = lyapunov_from_json(j.at("lyapunov"));
    data.lyapunov_slack_sum = j.at("lyapunov_slack_sum").get<double>();
  }
  return data;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_json_atomic(const json& j, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << j.dump(1) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace pwacert::io
