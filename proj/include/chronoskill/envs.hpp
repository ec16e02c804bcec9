#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chronoskill/rng.hpp"

namespace chronoskill {

enum class EnvName { push_lite, pick_place_lite, lid_close_lite, two_phase_probe };

std::string to_string(EnvName name);
EnvName env_from_string(const std::string& s);
std::vector<EnvName> all_env_names();

struct EnvSpec {
  EnvName name;
  int obs_dim;
  int action_dim;
  int horizon;
  // Per-dimension [lo,hi] used to clip actions before stepping.
  std::vector<std::array<double, 2>> action_bounds;
};

EnvSpec make_env_spec(EnvName name);

struct EnvState {
  std::array<double, 2> agent{0.0, 0.0};
  std::array<double, 2> object{0.0, 0.0};
  std::array<double, 2> goal{0.0, 0.0};
  bool held = false;
  bool placed = false;  // lid-close: a release happened within tolerance
  int t = 0;
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool terminal = false;  // horizon reached; success never ends an episode
  bool success = false;
};

// Deterministic 2D kinematic manipulation arena on [0,1]^2. All dynamics are
// pure functions of (reset seed, action sequence).
class Env {
 public:
  explicit Env(EnvSpec spec);

  // Agent at (0.1,0.1); object and goal uniform in [0.3,0.7]^2 with the goal
  // redrawn until it is at least 0.2 from the object.
  std::vector<double> reset(std::uint64_t seed);

  StepResult step(std::span<const double> action);

  const EnvState& state() const { return state_; }
  const EnvSpec& spec() const { return spec_; }
  std::vector<double> observation() const;
  bool success() const;

 private:
  EnvSpec spec_;
  EnvState state_;
};

// Analytic optimum where one exists (two-phase-probe: 2.0).
std::optional<double> optimal_return(const EnvSpec& spec);

}  // namespace chronoskill
