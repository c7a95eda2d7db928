#include "dualgp/policy_iteration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "dualgp/rng.hpp"

namespace dualgp {

Eigen::VectorXd force_grid(int n_force) {
  if (n_force < 2) throw std::invalid_argument("n_force must be at least 2");
  Eigen::VectorXd grid(n_force);
  const double span = kMaxForce - kMinForce;
  for (int k = 0; k < n_force; ++k) {
    grid(k) = kMinForce + span * static_cast<double>(k) / (n_force - 1);
  }
  return grid;
}

namespace {

Eigen::MatrixXd states_to_matrix(const std::vector<FullState>& states) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(states.size()), 3);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const auto& s = states[static_cast<std::size_t>(i)];
    X(i, 0) = s.x;
    X(i, 1) = s.xdot;
    X(i, 2) = s.force;
  }
  return X;
}

std::map<std::string, InvGammaPrior> priors_for(const KernelSpec& spec,
                                                const RlOptions& opts) {
  // Structural parameters take the configurable prior; observation noise
  // keeps the wide default_priors choice, because a shape-2 prior walls off
  // the near-noiseless regime the dynamics targets actually live in and the
  // landing predictions blur badly under the inflated noise that results.
  std::map<std::string, InvGammaPrior> priors = default_priors(spec.variant);
  for (auto& [name, prior] : priors) {
    if (name != "noise_var") prior = InvGammaPrior{opts.prior_shape, opts.prior_scale};
  }
  return priors;
}

McmcOptions mcmc_options(const RlOptions& opts) {
  McmcOptions m;
  m.proposal_scale = opts.proposal_scale;
  m.noise_floor = opts.noise_floor;
  return m;
}

// Untuned value-GP nugget, expressed as a fraction of the kernel's mean
// self-variance over the support. Per-variant values come from parameter
// sweeps: small enough that the greedy policy still swings back and reaches
// the goal region, large enough that the Bellman sweeps settle within the
// iteration budget.
double value_nugget_fraction(KernelVariant variant) {
  switch (variant) {
    case KernelVariant::kRbf: return 0.085;
    case KernelVariant::kCk: return 0.015;
    case KernelVariant::kNtk: return 0.08;
  }
  return 0.05;
}

// Scores every (state, force) pair: push the state through the dynamics
// posterior means, clamp to the box, then read the value posterior mean at
// the predicted landing triple. Returns one row per state.
Eigen::MatrixXd score_forces(const DynamicsModel& dyn, const ValueModel& val,
                             const Eigen::MatrixXd& states,
                             const Eigen::VectorXd& grid) {
  const Eigen::Index n = states.rows();
  const Eigen::Index nf = grid.size();
  Eigen::MatrixXd queries(n * nf, 3);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < nf; ++k) {
      queries(j * nf + k, 0) = states(j, 0);
      queries(j * nf + k, 1) = states(j, 1);
      queries(j * nf + k, 2) = grid(k);
    }
  }
  Eigen::MatrixXd landing(n * nf, 3);
  landing.col(0) =
      dyn.gp_x.posterior_mean(queries).cwiseMin(kMaxX).cwiseMax(kMinX);
  landing.col(1) =
      dyn.gp_xdot.posterior_mean(queries).cwiseMin(kMaxXdot).cwiseMax(kMinXdot);
  landing.col(2) = queries.col(2);
  const Eigen::VectorXd flat = val.gp.posterior_mean(landing);
  return flat.reshaped<Eigen::RowMajor>(n, nf);
}

// Argmax over one row of scores; ties prefer the smaller |F|, then the
// negative force.
Eigen::Index argmax_forces(const Eigen::RowVectorXd& scores,
                           const Eigen::VectorXd& grid) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < scores.size(); ++k) {
    const double s = scores(k);
    const double sb = scores(best);
    if (s > sb) {
      best = k;
    } else if (s == sb) {
      const double fk = std::abs(grid(k));
      const double fb = std::abs(grid(best));
      if (fk < fb || (fk == fb && grid(k) < grid(best))) best = k;
    }
  }
  return best;
}

void check_rl_sizes(int n_dynamics, int n_value) {
  if (n_dynamics < 2) throw std::invalid_argument("n_dynamics must be at least 2");
  if (n_value < 2) throw std::invalid_argument("n_value must be at least 2");
}

}  // namespace

TrainDynamicsResult train_dynamics(const EnvConfig& cfg, const KernelSpec& spec,
                                   int n_dynamics, std::uint64_t seed,
                                   const RlOptions& opts) {
  check_rl_sizes(n_dynamics, 2);
  if (spec.variant != KernelVariant::kRbf && spec.input_dim != 3) {
    throw std::invalid_argument("dynamics kernels take (x, xdot, F) triples");
  }

  const auto states = sample_states(n_dynamics, true, derive_seed(seed, 1));
  const Eigen::MatrixXd X = states_to_matrix(states);
  Eigen::VectorXd next_x(X.rows()), next_xdot(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const EnvState n = step({X(i, 0), X(i, 1)}, X(i, 2), cfg);
    next_x(i) = n.x;
    next_xdot(i) = n.xdot;
  }

  const auto priors = priors_for(spec, opts);
  const McmcOptions mopts = mcmc_options(opts);
  const McmcResult fit_x = mcmc_fit(X, next_x, spec, opts.base_noise, priors,
                                    opts.mcmc_steps, derive_seed(seed, 2), mopts);
  const McmcResult fit_xdot = mcmc_fit(X, next_xdot, spec, opts.base_noise, priors,
                                       opts.mcmc_steps, derive_seed(seed, 3), mopts);

  TrainDynamicsResult out{
      {GPModel::fit(X, next_x, apply_params(spec, fit_x.params),
                    noise_from(fit_x.params, opts.base_noise, opts.noise_floor)),
       GPModel::fit(X, next_xdot, apply_params(spec, fit_xdot.params),
                    noise_from(fit_xdot.params, opts.base_noise, opts.noise_floor))},
      0.0,
      0.0,
      fit_x.params,
      fit_xdot.params};

  // Fresh uniform states measure generalization; predictions are clamped the
  // same way the planner uses them.
  const auto held = sample_states(opts.holdout, true, derive_seed(seed, 4));
  const Eigen::MatrixXd H = states_to_matrix(held);
  Eigen::VectorXd true_x(H.rows()), true_xdot(H.rows());
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    const EnvState n = step({H(i, 0), H(i, 1)}, H(i, 2), cfg);
    true_x(i) = n.x;
    true_xdot(i) = n.xdot;
  }
  const Eigen::VectorXd px =
      out.model.gp_x.posterior_mean(H).cwiseMin(kMaxX).cwiseMax(kMinX);
  const Eigen::VectorXd pv =
      out.model.gp_xdot.posterior_mean(H).cwiseMin(kMaxXdot).cwiseMax(kMinXdot);
  out.rmse_x = std::sqrt((px - true_x).squaredNorm() / H.rows());
  out.rmse_xdot = std::sqrt((pv - true_xdot).squaredNorm() / H.rows());
  return out;
}

ValueModel init_value(const EnvConfig& cfg, const KernelSpec& spec, int n_value,
                      std::uint64_t seed, const RlOptions& opts) {
  check_rl_sizes(2, n_value);
  if (spec.variant != KernelVariant::kRbf && spec.input_dim != 3) {
    throw std::invalid_argument("value kernels take (x, xdot, F) triples");
  }

  const auto states = sample_states(n_value, true, derive_seed(seed, 5));
  Eigen::MatrixXd support = states_to_matrix(states);
  Eigen::VectorXd values(support.rows());
  for (Eigen::Index i = 0; i < support.rows(); ++i) {
    values(i) = reward({support(i, 0), support(i, 1)}, cfg);
  }

  // The converged value surface is far smoother than the reward bump the
  // targets start from, so tuning the value kernel against those initial
  // targets over-localizes it and later Bellman backups cannot propagate
  // value along transit paths. The kernel instead keeps the structural
  // parameters it was handed and takes an untuned nugget proportional to its
  // mean self-variance over the support.
  double mean_diag = 0.0;
  for (Eigen::Index i = 0; i < support.rows(); ++i) {
    const Eigen::VectorXd p = support.row(i).transpose();
    mean_diag += eval_kernel(spec, p, p);
  }
  mean_diag /= static_cast<double>(support.rows());
  const double noise =
      std::max(value_nugget_fraction(spec.variant) * mean_diag, opts.noise_floor);

  ParamVector params;
  if (spec.variant == KernelVariant::kRbf) {
    params.set_value("lengthscale", spec.lengthscale);
  } else {
    if (spec.sigma_w > 0.0) params.set_value("sigma_w", spec.sigma_w);
    if (spec.sigma_b > 0.0) params.set_value("sigma_b", spec.sigma_b);
  }
  params.set_value("noise_var", noise);

  ValueModel out{GPModel::fit(support, values, spec, noise), std::move(support),
                 std::move(values), std::move(params)};
  return out;
}

SweepResult value_sweep(const DynamicsModel& dyn, const ValueModel& val,
                        const Eigen::MatrixXd& anchors, const EnvConfig& cfg,
                        int n_force) {
  const Eigen::VectorXd grid = force_grid(n_force);
  if (anchors.cols() != 2) throw std::invalid_argument("anchors must be (x, xdot) rows");
  if (anchors.rows() != val.values.size()) {
    throw std::invalid_argument("anchors must project the value support, one per row");
  }
  for (Eigen::Index j = 0; j < anchors.rows(); ++j) {
    if (anchors(j, 0) < kMinX || anchors(j, 0) > kMaxX || anchors(j, 1) < kMinXdot ||
        anchors(j, 1) > kMaxXdot) {
      throw std::invalid_argument("anchor outside the state box");
    }
  }

  const Eigen::MatrixXd scores = score_forces(dyn, val, anchors, grid);
  const Eigen::Index n = anchors.rows();
  SweepResult out;
  out.new_values.resize(n);
  out.policy.anchors = anchors;
  out.policy.actions.resize(n);
  out.policy.force_grid = grid;

#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index k = argmax_forces(scores.row(j), grid);
    out.policy.actions(j) = grid(k);
    // The GP can dip below zero between support points; the backup never
    // propagates that artifact.
    const double best = std::max(scores(j, k), 0.0);
    out.new_values(j) =
        reward({anchors(j, 0), anchors(j, 1)}, cfg) + cfg.discount * best;
  }

  const Eigen::ArrayXd delta = (out.new_values - val.values).array().abs();
  out.max_delta = delta.maxCoeff();
  out.mean_delta = delta.mean();
  return out;
}

PolicyIterationResult run_policy_iteration(
    const EnvConfig& cfg, const KernelSpecs& specs, int n_dynamics, int n_value,
    int n_force, std::uint64_t seed, double tol, int max_iter,
    const RlOptions& opts, const std::function<void(int, const ValueModel&)>& on_iteration) {
  check_rl_sizes(n_dynamics, n_value);
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");

  using Clock = std::chrono::steady_clock;

  TrainDynamicsResult dyn = train_dynamics(cfg, specs.dynamics, n_dynamics, seed, opts);

  // RBF and NTK value GPs reuse the structural parameters fitted for the
  // x-coordinate dynamics GP: parameter sweeps showed the configured defaults
  // either stall the greedy rollout or miss the iteration budget for those
  // variants, while CK does best with the configured parameters. The
  // transplant only applies when the two kernels share a variant.
  KernelSpec value_spec = specs.value;
  if (value_spec.variant == dyn.model.gp_x.spec().variant &&
      (value_spec.variant == KernelVariant::kRbf ||
       value_spec.variant == KernelVariant::kNtk)) {
    value_spec = dyn.model.gp_x.spec();
  }
  ValueModel value = init_value(cfg, value_spec, n_value, seed, opts);

  PolicyIterationResult out{std::move(dyn), std::move(value), {}, {}};
  if (on_iteration) on_iteration(0, out.value);

  const Eigen::MatrixXd anchors = out.value.support.leftCols(2);
  for (int iter = 1; iter <= max_iter; ++iter) {
    const auto t0 = Clock::now();
    SweepResult sweep = value_sweep(out.dynamics.model, out.value, anchors, cfg, n_force);
    out.value.values = sweep.new_values;
    out.value.gp = out.value.gp.with_targets(sweep.new_values);
    out.policy = std::move(sweep.policy);
    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();

    out.diagnostics.max_delta.push_back(sweep.max_delta);
    out.diagnostics.mean_delta.push_back(sweep.mean_delta);
    out.diagnostics.wall_time_s.push_back(wall);
    out.diagnostics.iterations = iter;
    if (on_iteration) on_iteration(iter, out.value);

    const double threshold = tol * std::max(1.0, out.value.values.maxCoeff());
    if (sweep.max_delta < threshold) {
      out.diagnostics.converged = true;
      break;
    }
  }
  return out;
}

std::vector<TrajectoryPoint> greedy_rollout(const ValueModel& val,
                                            const DynamicsModel& dyn,
                                            const EnvConfig& cfg, EnvState s0,
                                            int horizon, int n_force) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (s0.x < kMinX || s0.x > kMaxX || s0.xdot < kMinXdot || s0.xdot > kMaxXdot) {
    throw std::invalid_argument("initial state outside the state box");
  }
  const Eigen::VectorXd grid = force_grid(n_force);

  std::vector<TrajectoryPoint> traj;
  traj.reserve(static_cast<std::size_t>(horizon) + 1);
  EnvState s = s0;
  for (int t = 0; t <= horizon; ++t) {
    const double f = best_force(dyn, val, s, grid);
    traj.push_back({t, s.x, s.xdot, f, reward(s, cfg)});
    if (t < horizon) s = step(s, f, cfg);
  }
  return traj;
}

double best_force(const DynamicsModel& dyn, const ValueModel& val, const EnvState& s,
                  const Eigen::VectorXd& grid) {
  Eigen::MatrixXd state(1, 2);
  state << s.x, s.xdot;
  const Eigen::MatrixXd scores = score_forces(dyn, val, state, grid);
  return grid(argmax_forces(scores.row(0), grid));
}

}  // namespace dualgp
