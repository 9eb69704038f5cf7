#pragma once

#include "pwacert/io.hpp"

#include <string>
#include <vector>

// Command implementations behind the pwacert binary; kept callable so the
// test suite can drive them in-process.

namespace pwacert::cli {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitNoSet = 3;
constexpr int kExitStalled = 4;
constexpr int kExitSolver = 5;
constexpr int kExitReplay = 6;

// Closed boundary loops of the invariant set of a 2-D certificate, each in
// counterclockwise order.  Domain-boundary arcs of the set are included.
std::vector<std::vector<geometry::Vector>> boundary_loops(
    const iise::InvariantSetCertificate& cert);

int cmd_analyze(const std::string& spec_path, const io::RunConfig& cfg,
                const std::string& output_path);
int cmd_boundary(const std::string& result_path, int iteration, const std::string& output_path);
int cmd_certify(const std::string& result_path);

}  // namespace pwacert::cli
