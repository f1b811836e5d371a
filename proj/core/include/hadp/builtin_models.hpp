#pragma once

// Compiled-in game instances, addressable by registry name from configs.

#include <string>
#include <vector>

#include "hadp/simulator.hpp"

namespace hadp {

/// Everything a run needs, as resolved defaults for a named model.
struct ModelDefaults {
  Game game;
  TuningParams tuning;
  SimConfig sim;
};

/// One leader, two followers, scalar controls and disturbance on R^2.
ModelDefaults paper_sec5();

/// x' = A x + b (u + nu + omega) with one follower, quadratic costs and
/// quadratic bases; used for integrator checks and as a minimal template.
ModelDefaults linear_test(const Matrix& A);

/// Registry lookup: "paper-sec5" or "linear-test". Throws ConfigError.
ModelDefaults builtin_model(const std::string& name);
std::vector<std::string> builtin_model_names();

/// Registry of named bases: "paper-sec5-follower", "paper-sec5-leader",
/// "paper-sec5-nu".
std::vector<Monomial> builtin_basis_terms(const std::string& name);

}  // namespace hadp
