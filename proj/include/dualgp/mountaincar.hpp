#pragma once

#include <cstdint>
#include <vector>

namespace dualgp {

// State-space box and admissible force range.
inline constexpr double kMinX = -1.0;
inline constexpr double kMaxX = 1.0;
inline constexpr double kMinXdot = -2.0;
inline constexpr double kMaxXdot = 2.0;
inline constexpr double kMinForce = -4.0;
inline constexpr double kMaxForce = 4.0;

struct EnvState {
  double x = 0.0;
  double xdot = 0.0;
};

struct FullState {
  double x = 0.0;
  double xdot = 0.0;
  double force = 0.0;
};

struct EnvConfig {
  double gravity = 9.81;
  double dt = 0.3;       // control interval in seconds
  int substeps = 30;     // RK4 substeps per control interval
  double reward_x = 0.6;
  double reward_xdot = 0.0;
  double reward_sigma = 0.05;
  double discount = 0.9;
};

// Piecewise hill profile: x^2 + x on the left slope, x / sqrt(1 + 5 x^2) on
// the right; C^1 at the joint.
double altitude(double x);
double slope(double x);

// One control interval of xdd = F - g sin(arctan(H'(x))), integrated with
// RK4 over cfg.substeps substeps. After every substep the velocity saturates
// at [-2, 2]; hitting a position boundary clamps x and zeroes the velocity.
EnvState step(const EnvState& s, double force, const EnvConfig& cfg);

// Unnormalized Gaussian bump of height 1/(2 pi sigma^2) at
// (reward_x, reward_xdot).
double reward(const EnvState& s, const EnvConfig& cfg);

// n uniform draws from the state (and force) box. With include_force off the
// force component is pinned to fixed_force. Deterministic per seed.
std::vector<FullState> sample_states(int n, bool include_force, std::uint64_t seed,
                                     double fixed_force = 0.0);

}  // namespace dualgp
