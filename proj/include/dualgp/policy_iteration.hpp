#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "dualgp/gp.hpp"
#include "dualgp/hyperopt.hpp"
#include "dualgp/mountaincar.hpp"

namespace dualgp {

// One GP per state coordinate, trained on (x, xdot, F) -> next coordinate.
struct DynamicsModel {
  GPModel gp_x;
  GPModel gp_xdot;
};

struct TrainDynamicsResult {
  DynamicsModel model;
  // Held-out RMSE on fresh uniform states, predictions clamped to the box.
  double rmse_x = 0.0;
  double rmse_xdot = 0.0;
  ParamVector params_x;
  ParamVector params_xdot;
};

// Value GP over support triples (x, xdot, F) with the current target vector.
struct ValueModel {
  GPModel gp;
  Eigen::MatrixXd support;  // n_value x 3
  Eigen::VectorXd values;
  ParamVector params;
};

struct Policy {
  Eigen::MatrixXd anchors;     // states (x, xdot) the sweep optimized over
  Eigen::VectorXd actions;     // chosen force per anchor
  Eigen::VectorXd force_grid;  // the shared force discretization
};

struct IterationDiagnostics {
  std::vector<double> max_delta;
  std::vector<double> mean_delta;
  std::vector<double> wall_time_s;
  int iterations = 0;
  bool converged = false;
};

struct SweepResult {
  Eigen::VectorXd new_values;
  Policy policy;
  double max_delta = 0.0;
  double mean_delta = 0.0;
};

// Hyperparameter-fitting knobs shared by the trainers.
struct RlOptions {
  int mcmc_steps = 4000;
  double proposal_scale = 0.25;
  double prior_shape = 2.0;
  double prior_scale = 1.0;
  double noise_floor = 1e-6;
  double base_noise = 0.01;
  int holdout = 32;
};

struct KernelSpecs {
  KernelSpec dynamics;
  KernelSpec value;
};

struct PolicyIterationResult {
  TrainDynamicsResult dynamics;
  ValueModel value;
  Policy policy;
  IterationDiagnostics diagnostics;
};

struct TrajectoryPoint {
  int t = 0;
  double x = 0.0;
  double xdot = 0.0;
  double force = 0.0;
  double reward = 0.0;
};

// n_force forces evenly spaced over [-4, 4], endpoints included.
Eigen::VectorXd force_grid(int n_force);

// Samples n_dynamics uniform (x, xdot, F) triples, steps the true dynamics,
// tunes each output's hyperparameters by MCMC and fits the two GPs. The
// held-out RMSE over `holdout` fresh states is recorded in the result.
TrainDynamicsResult train_dynamics(const EnvConfig& cfg, const KernelSpec& spec,
                                   int n_dynamics, std::uint64_t seed,
                                   const RlOptions& opts = {});

// Samples n_value support triples, targets them with the immediate reward of
// their (x, xdot) projection, and fits the value GP with `spec` taken
// as-is structurally plus an untuned nugget (a per-variant fraction of
// the kernel's mean self-variance over the support). Hyperparameters stay
// frozen for the rest of the run.
ValueModel init_value(const EnvConfig& cfg, const KernelSpec& spec, int n_value,
                      std::uint64_t seed, const RlOptions& opts = {});

// One synchronous Bellman sweep. For every anchor the force grid is scored
// by pushing the anchor through the dynamics posterior means (clamped to the
// box) and reading the value posterior mean at the predicted landing triple;
// ties prefer the smaller |F|, then the negative one. New targets are
// R(anchor) + discount * max(0, best score); max_delta compares them against
// the model's current targets. Anchors must be the (x, xdot) projections of
// the value support, one per support row.
SweepResult value_sweep(const DynamicsModel& dyn, const ValueModel& val,
                        const Eigen::MatrixXd& anchors, const EnvConfig& cfg,
                        int n_force);

// Approximate policy iteration: train dynamics, fit the initial value GP
// (RBF and NTK value kernels reuse the structural parameters fitted for the
// x-coordinate dynamics GP; CK keeps the configured ones), then sweep and
// refit (same support, same factor, new targets) until
// max_delta < tol * max(1, max value) or max_iter sweeps have run.
// Non-convergence is reported through diagnostics.converged, not an error.
// `on_iteration` (when set) observes the refit value model after the initial
// fit (iteration 0) and after every sweep.
PolicyIterationResult run_policy_iteration(
    const EnvConfig& cfg, const KernelSpecs& specs, int n_dynamics, int n_value,
    int n_force, std::uint64_t seed, double tol, int max_iter,
    const RlOptions& opts = {},
    const std::function<void(int, const ValueModel&)>& on_iteration = {});

// Greedy closed-loop run from s0: each step picks the force by the same
// grid argmax as value_sweep, records the state, then advances with the true
// dynamics. Returns horizon + 1 points.
std::vector<TrajectoryPoint> greedy_rollout(const ValueModel& val,
                                            const DynamicsModel& dyn,
                                            const EnvConfig& cfg, EnvState s0,
                                            int horizon, int n_force);

// The per-state argmax shared by value_sweep and greedy_rollout.
double best_force(const DynamicsModel& dyn, const ValueModel& val, const EnvState& s,
                  const Eigen::VectorXd& grid);

}  // namespace dualgp
