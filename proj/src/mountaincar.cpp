#include "dualgp/mountaincar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dualgp/rng.hpp"

namespace dualgp {

double altitude(double x) {
  if (x < 0.0) return x * x + x;
  return x / std::sqrt(1.0 + 5.0 * x * x);
}

double slope(double x) {
  if (x < 0.0) return 2.0 * x + 1.0;
  const double q = 1.0 + 5.0 * x * x;
  return 1.0 / (q * std::sqrt(q));
}

namespace {

double acceleration(double x, double force, double gravity) {
  return force - gravity * std::sin(std::atan(slope(x)));
}

}  // namespace

EnvState step(const EnvState& s, double force, const EnvConfig& cfg) {
  if (!std::isfinite(s.x) || !std::isfinite(s.xdot) || !std::isfinite(force)) {
    throw std::invalid_argument("step requires finite state and force");
  }
  if (cfg.substeps < 1) throw std::invalid_argument("substeps must be positive");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw std::invalid_argument("dt must be positive and finite");
  }

  const double f = std::clamp(force, kMinForce, kMaxForce);
  const double h = cfg.dt / cfg.substeps;
  double x = s.x;
  double v = s.xdot;

  for (int i = 0; i < cfg.substeps; ++i) {
    const double k1x = v;
    const double k1v = acceleration(x, f, cfg.gravity);
    const double k2x = v + 0.5 * h * k1v;
    const double k2v = acceleration(x + 0.5 * h * k1x, f, cfg.gravity);
    const double k3x = v + 0.5 * h * k2v;
    const double k3v = acceleration(x + 0.5 * h * k2x, f, cfg.gravity);
    const double k4x = v + h * k3v;
    const double k4v = acceleration(x + h * k3x, f, cfg.gravity);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

    // Saturate the speed; a wall contact stops the car where it hit.
    v = std::clamp(v, kMinXdot, kMaxXdot);
    if (x < kMinX) {
      x = kMinX;
      v = 0.0;
    } else if (x > kMaxX) {
      x = kMaxX;
      v = 0.0;
    }
  }
  return {x, v};
}

double reward(const EnvState& s, const EnvConfig& cfg) {
  const double s2 = cfg.reward_sigma * cfg.reward_sigma;
  const double dx = s.x - cfg.reward_x;
  const double dv = s.xdot - cfg.reward_xdot;
  return std::exp(-(dx * dx + dv * dv) / (2.0 * s2)) / (2.0 * std::numbers::pi * s2);
}

std::vector<FullState> sample_states(int n, bool include_force, std::uint64_t seed,
                                     double fixed_force) {
  if (n < 1) throw std::invalid_argument("sample count must be positive");
  Rng rng(seed);
  std::vector<FullState> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    FullState s;
    s.x = rng.uniform(kMinX, kMaxX);
    s.xdot = rng.uniform(kMinXdot, kMaxXdot);
    s.force = include_force ? rng.uniform(kMinForce, kMaxForce) : fixed_force;
    out.push_back(s);
  }
  return out;
}

}  // namespace dualgp
