#pragma once

#include "pwacert/certify.hpp"
#include "pwacert/iise.hpp"
#include "pwacert/lyapunov.hpp"
#include "pwacert/relu.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

// Structured-text (JSON) input and result formats.  Both carry a schema
// version; matrices are stored row-major with explicit shape fields so a
// document round-trips bit-exactly.

namespace pwacert::io {

using geometry::Matrix;
using geometry::Partition;
using geometry::Vector;
using nlohmann::json;

constexpr int kSchemaVersion = 1;

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
  double alpha0 = 10.0;
  double gamma = 0.1;
  double eps1 = 1e-4;
  double eps2 = 1e-4;
  double eps3 = 1e-4;
  double eps_nugis = 1e-3;
  double penalty = 1e3;
  int max_iter = 10;
  double dt = 1e-3;
  double horizon = 20.0;
  int samples = 1000;
  std::uint64_t seed = 12345;

  void validate() const;
  iise::IiseConfig to_iise() const;
};

struct PwaCellSpec {
  Matrix E;
  Vector e;
  Matrix A;
  Vector a;
};

struct SystemSpec {
  std::string name;
  Vector lower;
  Vector upper;
  std::optional<std::vector<PwaCellSpec>> pwa;
  std::optional<relu::ReluNetwork> network;

  int dim() const { return static_cast<int>(lower.size()); }
  void validate() const;
};

json to_json(const SystemSpec& spec);
SystemSpec system_spec_from_json(const json& j);
// Reads a spec file, or a built-in fixture when the path is "builtin:<name>".
SystemSpec load_system_spec(const std::string& path);

// Builds the dynamics partition: explicit cells verbatim, or the exact
// activation-region arrangement for a network spec.
Partition build_dynamics(const SystemSpec& spec, int region_budget = 100000);

json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const json& j);

json to_json(const Partition& p);
Partition partition_from_json(const json& j);

json to_json(const iise::InvariantSetCertificate& cert);
iise::InvariantSetCertificate certificate_from_json(const json& j);

json to_json(const lyapunov::LyapunovFunction& fn);
lyapunov::LyapunovFunction lyapunov_from_json(const json& j);

json to_json(const certify::ReplayReport& report);

// Everything cmd_certify and cmd_boundary need back out of a result file.
struct ResultData {
  std::string name;
  RunConfig config;
  std::string termination;
  std::vector<iise::InvariantSetCertificate> iterations;
  std::optional<lyapunov::LyapunovFunction> lyapunov;
  double lyapunov_slack_sum = 0.0;
};

ResultData result_from_json(const json& j);

json read_json_file(const std::string& path);
// Write-temp-then-rename so readers never observe a partial document.
void write_json_atomic(const json& j, const std::string& path);

}  // namespace pwacert::io
