#pragma once

#include <optional>
#include <string>

namespace pwacert::io {
struct SystemSpec;
}

// Built-in analytic systems for reproducible runs and tests:
//   stable-linear    dx/dt = -x on [-1,1]^2
//   unstable-linear  dx/dt = +x on [-1,1]^2
//   pendulum         saturated inverted pendulum on [-pi,pi]^2 with sin
//                    replaced by a 3-piece PWA interpolant and the control
//                    u = sat(-3 x1 - 3 x2, +-1.5)

namespace pwacert::fixtures {

io::SystemSpec stable_linear();
io::SystemSpec unstable_linear();
io::SystemSpec pendulum();

std::optional<io::SystemSpec> by_name(const std::string& name);

}  // namespace pwacert::fixtures
