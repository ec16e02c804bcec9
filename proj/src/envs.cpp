#include "chronoskill/envs.hpp"

#include <algorithm>
#include <cmath>

#include "chronoskill/error.hpp"

namespace chronoskill {

namespace {

constexpr double kPushContactRadius = 0.06;
constexpr double kGraspRadius = 0.05;
constexpr double kPushSuccessTol = 0.05;
constexpr double kPickSuccessTol = 0.07;
constexpr double kLidSuccessTol = 0.03;

double dist(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

std::array<double, 2> clamp_arena(std::array<double, 2> p) {
  return {std::clamp(p[0], 0.0, 1.0), std::clamp(p[1], 0.0, 1.0)};
}

}  // namespace

std::string to_string(EnvName name) {
  switch (name) {
    case EnvName::push_lite: return "push-lite";
    case EnvName::pick_place_lite: return "pick-place-lite";
    case EnvName::lid_close_lite: return "lid-close-lite";
    case EnvName::two_phase_probe: return "two-phase-probe";
  }
  throw UsageError("unknown env value");
}

EnvName env_from_string(const std::string& s) {
  for (EnvName name : all_env_names()) {
    if (to_string(name) == s) return name;
  }
  throw FormatError("unknown env '" + s +
                    "' (expected push-lite|pick-place-lite|lid-close-lite|two-phase-probe)");
}

std::vector<EnvName> all_env_names() {
  return {EnvName::push_lite, EnvName::pick_place_lite, EnvName::lid_close_lite,
          EnvName::two_phase_probe};
}

EnvSpec make_env_spec(EnvName name) {
  switch (name) {
    case EnvName::push_lite:
      return {name, 6, 2, 100, {{-0.05, 0.05}, {-0.05, 0.05}}};
    case EnvName::pick_place_lite:
    case EnvName::lid_close_lite:
      return {name, 7, 3, 100, {{-0.05, 0.05}, {-0.05, 0.05}, {-1.0, 1.0}}};
    case EnvName::two_phase_probe:
      return {name, 1, 1, 2, {{-1.0, 1.0}}};
  }
  throw UsageError("unknown env value");
}

Env::Env(EnvSpec spec) : spec_(std::move(spec)) {}

std::vector<double> Env::reset(std::uint64_t seed) {
  state_ = EnvState{};
  if (spec_.name != EnvName::two_phase_probe) {
    Rng rng(seed);
    state_.agent = {0.1, 0.1};
    state_.object = {rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)};
    do {
      state_.goal = {rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)};
    } while (dist(state_.object, state_.goal) < 0.2);
  }
  return observation();
}

std::vector<double> Env::observation() const {
  switch (spec_.name) {
    case EnvName::push_lite:
      return {state_.agent[0], state_.agent[1], state_.object[0],
              state_.object[1], state_.goal[0], state_.goal[1]};
    case EnvName::pick_place_lite:
    case EnvName::lid_close_lite:
      return {state_.agent[0], state_.agent[1],  state_.object[0], state_.object[1],
              state_.goal[0],  state_.goal[1],   state_.held ? 1.0 : 0.0};
    case EnvName::two_phase_probe:
      return {1.0};
  }
  throw UsageError("unknown env value");
}

bool Env::success() const {
  switch (spec_.name) {
    case EnvName::push_lite:
      return dist(state_.object, state_.goal) < kPushSuccessTol;
    case EnvName::pick_place_lite:
      return !state_.held && dist(state_.object, state_.goal) < kPickSuccessTol;
    case EnvName::lid_close_lite:
      return !state_.held && state_.placed && dist(state_.object, state_.goal) < kLidSuccessTol;
    case EnvName::two_phase_probe:
      return false;
  }
  throw UsageError("unknown env value");
}

StepResult Env::step(std::span<const double> action) {
  if (state_.t >= spec_.horizon) {
    throw UsageError("env step: episode already terminal (t=" + std::to_string(state_.t) + ")");
  }
  if (static_cast<int>(action.size()) != spec_.action_dim) {
    throw DimensionError("env step: action length " + std::to_string(action.size()) +
                         " vs action_dim " + std::to_string(spec_.action_dim));
  }
  std::vector<double> a(action.begin(), action.end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = std::clamp(a[i], spec_.action_bounds[i][0], spec_.action_bounds[i][1]);
  }

  double reward = 0.0;
  switch (spec_.name) {
    case EnvName::push_lite: {
      state_.agent = clamp_arena({state_.agent[0] + a[0], state_.agent[1] + a[1]});
      const double d = dist(state_.agent, state_.object);
      if (d < kPushContactRadius && d > 1e-12) {
        const double inv = kPushContactRadius / d;
        state_.object = clamp_arena({state_.agent[0] + inv * (state_.object[0] - state_.agent[0]),
                                     state_.agent[1] + inv * (state_.object[1] - state_.agent[1])});
      }
      reward = -0.5 * dist(state_.agent, state_.object) - dist(state_.object, state_.goal) +
               (success() ? 5.0 : 0.0);
      if (reward < -1.5 * std::sqrt(2.0) || reward > 5.0) {
        throw NumericError("push-lite reward " + std::to_string(reward) + " outside bounds");
      }
      break;
    }
    case EnvName::pick_place_lite:
    case EnvName::lid_close_lite: {
      state_.agent = clamp_arena({state_.agent[0] + a[0], state_.agent[1] + a[1]});
      const bool close = a[2] > 0.0;
      if (close) {
        if (!state_.held && dist(state_.agent, state_.object) < kGraspRadius) {
          state_.held = true;
        }
        if (state_.held) state_.object = state_.agent;
      } else if (state_.held) {
        state_.held = false;  // object stays where the gripper was
        if (spec_.name == EnvName::lid_close_lite &&
            dist(state_.object, state_.goal) < kLidSuccessTol) {
          state_.placed = true;
        }
      }
      const double held = state_.held ? 1.0 : 0.0;
      reward = -(1.0 - held) * dist(state_.agent, state_.object) -
               held * dist(state_.object, state_.goal) + 0.5 * held + (success() ? 10.0 : 0.0);
      if (reward < -std::sqrt(2.0) || reward > 10.5) {
        throw NumericError(to_string(spec_.name) + " reward " + std::to_string(reward) +
                           " outside bounds");
      }
      break;
    }
    case EnvName::two_phase_probe: {
      reward = state_.t == 0 ? a[0] : -a[0];
      break;
    }
  }

  state_.t += 1;
  StepResult result;
  result.observation = observation();
  result.reward = reward;
  result.terminal = state_.t == spec_.horizon;
  result.success = success();
  return result;
}

std::optional<double> optimal_return(const EnvSpec& spec) {
  if (spec.name == EnvName::two_phase_probe) return 2.0;
  return std::nullopt;
}

}  // namespace chronoskill
