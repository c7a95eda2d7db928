#include "dualgp/cli/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <vector>

#include "dualgp/cli/csv.hpp"
#include "dualgp/cli/manifest.hpp"
#include "dualgp/cli/model_io.hpp"
#include "dualgp/gp.hpp"
#include "dualgp/hyperopt.hpp"
#include "dualgp/policy_iteration.hpp"
#include "dualgp/rng.hpp"

namespace dualgp::cli {

namespace {

Eigen::VectorXd linspace(double lo, double hi, int n) {
  Eigen::VectorXd out(n);
  if (n == 1) {
    out(0) = lo;
    return out;
  }
  for (int i = 0; i < n; ++i) {
    out(i) = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  }
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

EnvConfig env_from_config(const Config& cfg) {
  EnvConfig env;
  env.gravity = cfg.get_double("gravity");
  env.dt = cfg.get_double("dt");
  env.substeps = cfg.get_int("substeps");
  env.reward_x = cfg.get_double("reward_x");
  env.reward_xdot = cfg.get_double("reward_xdot");
  env.reward_sigma = cfg.get_double("reward_sigma");
  env.discount = cfg.get_double("discount");
  return env;
}

RlOptions rl_options_from_config(const Config& cfg) {
  RlOptions opts;
  opts.mcmc_steps = cfg.get_int("mcmc_steps");
  opts.proposal_scale = cfg.get_double("mcmc_proposal_scale");
  opts.prior_shape = cfg.get_double("prior_shape");
  opts.prior_scale = cfg.get_double("prior_scale");
  opts.noise_floor = cfg.get_double("noise_floor");
  opts.base_noise = cfg.get_double("noise_var");
  opts.holdout = cfg.get_int("holdout");
  return opts;
}

// Log-spaced grid axis: `per_decade` points per factor of ten across
// [lo, hi], endpoints included.
std::vector<double> log_axis(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw std::invalid_argument("grid bounds must satisfy 0 < lo < hi");
  }
  if (per_decade < 1) throw std::invalid_argument("grid_per_decade must be positive");
  const double decades = std::log10(hi / lo);
  const int n = static_cast<int>(std::round(decades * per_decade)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.push_back(lo * std::pow(10.0, decades * static_cast<double>(i) / (n - 1)));
  }
  return out;
}

std::vector<ParamVector> toy_grid(KernelVariant variant, const std::vector<double>& axis) {
  std::vector<ParamVector> grid;
  if (variant == KernelVariant::kRbf) {
    grid.reserve(axis.size() * axis.size());
    for (double ell : axis) {
      for (double noise : axis) {
        ParamVector p;
        p.set_value("lengthscale", ell);
        p.set_value("noise_var", noise);
        grid.push_back(std::move(p));
      }
    }
    return grid;
  }
  grid.reserve(axis.size() * axis.size() * axis.size());
  for (double sw : axis) {
    for (double sb : axis) {
      for (double noise : axis) {
        ParamVector p;
        p.set_value("sigma_w", sw);
        p.set_value("sigma_b", sb);
        p.set_value("noise_var", noise);
        grid.push_back(std::move(p));
      }
    }
  }
  return grid;
}

const char* kernel_name_of(KernelVariant v) {
  switch (v) {
    case KernelVariant::kRbf:
      return "rbf";
    case KernelVariant::kCk:
      return "ck";
    case KernelVariant::kNtk:
      return "ntk";
  }
  return "unknown";
}

}  // namespace

double toy_dynamics(double x, double theta, double a) {
  if (x == a) throw std::invalid_argument("toy growth curve has a pole at x = a");
  return theta * x / (1.0 - x / a);
}

KernelVariant parse_kernel_name(const std::string& name) {
  if (name == "rbf") return KernelVariant::kRbf;
  if (name == "ck") return KernelVariant::kCk;
  if (name == "ntk") return KernelVariant::kNtk;
  throw std::invalid_argument("unknown kernel '" + name + "' (expected rbf, ck or ntk)");
}

KernelSpec kernel_from_config(const Config& cfg, KernelVariant variant, int input_dim) {
  switch (variant) {
    case KernelVariant::kRbf:
      return KernelSpec::Rbf(cfg.get_double("lengthscale"));
    case KernelVariant::kCk:
      return KernelSpec::Ck(input_dim, cfg.get_int("kernel_depth"),
                            cfg.get_double("sigma_w"), cfg.get_double("sigma_b"));
    case KernelVariant::kNtk:
      return KernelSpec::Ntk(input_dim, cfg.get_int("kernel_depth"),
                             cfg.get_double("sigma_w"), cfg.get_double("sigma_b"));
  }
  throw std::invalid_argument("unknown kernel variant");
}

// ------- toy study -------

int cmd_toy(const Config& cfg, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);

  const double theta = cfg.get_double("toy_theta");
  const double a = cfg.get_double("toy_a");
  const double noise_sd = cfg.get_double("toy_noise");
  const int n_train = cfg.get_int("toy_train_n");
  const int n_query = cfg.get_int("toy_query_n");
  if (n_train < 2 || n_query < 1) {
    throw std::invalid_argument("toy_train_n must be >= 2 and toy_query_n >= 1");
  }

  const Eigen::VectorXd x_train =
      linspace(cfg.get_double("toy_train_lo"), cfg.get_double("toy_train_hi"), n_train);
  const Eigen::VectorXd x_query =
      linspace(cfg.get_double("toy_query_lo"), cfg.get_double("toy_query_hi"), n_query);

  Rng rng(derive_seed(cfg.get_u64("seed"), 100));
  Eigen::VectorXd y_train(n_train);
  for (int i = 0; i < n_train; ++i) {
    y_train(i) = toy_dynamics(x_train(i), theta, a) + noise_sd * rng.normal();
  }

  std::vector<std::string> files;

  {
    CsvWriter truth(out_dir / "toy_truth_obs.csv", {"series", "x", "y"});
    for (int i = 0; i < n_query; ++i) {
      truth.row({"truth", format_sig9(x_query(i)),
                 format_sig9(toy_dynamics(x_query(i), theta, a))});
    }
    for (int i = 0; i < n_train; ++i) {
      truth.row({"observation", format_sig9(x_train(i)), format_sig9(y_train(i))});
    }
    truth.close();
    files.push_back("toy_truth_obs.csv");
  }

  const std::vector<double> axis = log_axis(
      cfg.get_double("grid_lo"), cfg.get_double("grid_hi"), cfg.get_int("grid_per_decade"));
  const Eigen::MatrixXd X = x_train;
  const Eigen::MatrixXd Q = x_query;

  for (KernelVariant variant :
       {KernelVariant::kRbf, KernelVariant::kCk, KernelVariant::kNtk}) {
    const KernelSpec base = kernel_from_config(cfg, variant, 1);
    const GridSearchResult pick =
        grid_search(X, y_train, base, cfg.get_double("noise_var"), toy_grid(variant, axis));
    const GPModel model =
        GPModel::fit(X, y_train, apply_params(base, pick.params),
                     noise_from(pick.params, cfg.get_double("noise_var")));
    const PosteriorSummary post = model.posterior(Q);

    const std::string file = std::string("toy_") + kernel_name_of(variant) + ".csv";
    CsvWriter csv(out_dir / file, {"x_query", "post_mean", "post_var", "ci_lo", "ci_hi"});
    for (int i = 0; i < n_query; ++i) {
      const double sd = std::sqrt(post.var(i));
      csv.row({x_query(i), post.mean(i), post.var(i), post.mean(i) - 1.96 * sd,
               post.mean(i) + 1.96 * sd});
    }
    csv.close();
    files.push_back(file);
    std::cout << "toy " << kernel_name_of(variant)
              << ": log marginal likelihood " << pick.log_marginal << "\n";
  }

  write_manifest(out_dir, files, cfg);
  return kExitOk;
}

// ------- policy-iteration training run -------

namespace {

void write_value_surface(const std::filesystem::path& out_dir, int iteration,
                         const ValueModel& val, int surface_n,
                         std::vector<std::string>* files) {
  char name[64];
  std::snprintf(name, sizeof(name), "value_surface_iter%03d.csv", iteration);
  const Eigen::VectorXd xs = linspace(kMinX, kMaxX, surface_n);
  const Eigen::VectorXd vs = linspace(kMinXdot, kMaxXdot, surface_n);
  Eigen::MatrixXd q(surface_n * surface_n, 3);
  Eigen::Index r = 0;
  for (int i = 0; i < surface_n; ++i) {
    for (int j = 0; j < surface_n; ++j, ++r) {
      q(r, 0) = xs(i);
      q(r, 1) = vs(j);
      q(r, 2) = 0.0;
    }
  }
  const Eigen::VectorXd surface = val.gp.posterior_mean(q);
  CsvWriter csv(out_dir / name, {"x", "xdot", "value"});
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    csv.row({q(i, 0), q(i, 1), surface(i)});
  }
  csv.close();
  files->push_back(name);
}

void write_quiver(const std::filesystem::path& out_dir, const DynamicsModel& dyn,
                  const EnvConfig& env, int quiver_n, std::vector<std::string>* files) {
  const Eigen::VectorXd xs = linspace(kMinX, kMaxX, quiver_n);
  const Eigen::VectorXd vs = linspace(kMinXdot, kMaxXdot, quiver_n);
  Eigen::MatrixXd q(quiver_n * quiver_n, 3);
  Eigen::Index r = 0;
  for (int i = 0; i < quiver_n; ++i) {
    for (int j = 0; j < quiver_n; ++j, ++r) {
      q(r, 0) = xs(i);
      q(r, 1) = vs(j);
      q(r, 2) = 0.0;
    }
  }
  const Eigen::VectorXd px = dyn.gp_x.posterior_mean(q).cwiseMin(kMaxX).cwiseMax(kMinX);
  const Eigen::VectorXd pv =
      dyn.gp_xdot.posterior_mean(q).cwiseMin(kMaxXdot).cwiseMax(kMinXdot);

  CsvWriter csv(out_dir / "dynamics_quiver.csv",
                {"x", "xdot", "true_next_x", "true_next_xdot", "pred_next_x",
                 "pred_next_xdot"});
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    const EnvState truth = step({q(i, 0), q(i, 1)}, 0.0, env);
    csv.row({q(i, 0), q(i, 1), truth.x, truth.xdot, px(i), pv(i)});
  }
  csv.close();
  files->push_back("dynamics_quiver.csv");
}

}  // namespace

int cmd_train(const Config& cfg, const std::string& kernel_name,
              const std::filesystem::path& out_dir) {
  const KernelVariant variant = parse_kernel_name(kernel_name);
  ensure_dir(out_dir);

  const EnvConfig env = env_from_config(cfg);
  const RlOptions opts = rl_options_from_config(cfg);
  const KernelSpec spec = kernel_from_config(cfg, variant, 3);
  const int n_force = cfg.get_int("n_force");
  const int surface_n = cfg.get_int("surface_n");

  std::vector<std::string> files;
  std::vector<std::string> surfaces;
  const auto observer = [&](int iteration, const ValueModel& val) {
    write_value_surface(out_dir, iteration, val, surface_n, &surfaces);
  };

  const PolicyIterationResult result = run_policy_iteration(
      env, KernelSpecs{spec, spec}, cfg.get_int("n_dynamics"), cfg.get_int("n_value"),
      n_force, cfg.get_u64("seed"), cfg.get_double("tol"), cfg.get_int("max_iter"),
      opts, observer);

  write_quiver(out_dir, result.dynamics.model, env, cfg.get_int("quiver_n"), &files);
  files.insert(files.end(), surfaces.begin(), surfaces.end());

  {
    CsvWriter csv(out_dir / "policy.csv", {"x", "xdot", "action"});
    for (Eigen::Index i = 0; i < result.policy.anchors.rows(); ++i) {
      csv.row({result.policy.anchors(i, 0), result.policy.anchors(i, 1),
               result.policy.actions(i)});
    }
    csv.close();
    files.push_back("policy.csv");
  }

  {
    // Wall times are reported on stdout only, so reruns stay byte-identical.
    CsvWriter csv(out_dir / "diagnostics.csv",
                  {"iteration", "max_delta", "mean_delta", "converged"});
    const auto& d = result.diagnostics;
    for (std::size_t i = 0; i < d.max_delta.size(); ++i) {
      const bool last = i + 1 == d.max_delta.size();
      csv.row({std::to_string(i + 1), format_sig9(d.max_delta[i]),
               format_sig9(d.mean_delta[i]), (last && d.converged) ? "1" : "0"});
    }
    csv.close();
    files.push_back("diagnostics.csv");
  }

  save_models(out_dir / kModelFileName,
              TrainedModels{env, n_force, result.dynamics.model, result.value});
  files.push_back(kModelFileName);

  write_manifest(out_dir, files, cfg);

  const auto& d = result.diagnostics;
  std::cout << "train " << kernel_name << ": " << d.iterations << " iterations, "
            << (d.converged ? "converged" : "did not converge");
  double total_wall = 0.0;
  for (double w : d.wall_time_s) total_wall += w;
  std::cout << ", sweep wall time " << total_wall << " s\n";
  std::cout << "dynamics holdout rmse: x " << result.dynamics.rmse_x << ", xdot "
            << result.dynamics.rmse_xdot << "\n";

  return d.converged ? kExitOk : kExitNonConverged;
}

// ------- rollout -------

int cmd_rollout(const Config& cfg, const std::filesystem::path& model_dir,
                const std::filesystem::path& out_dir, int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  const TrainedModels models = load_models(model_dir / kModelFileName);
  ensure_dir(out_dir);

  const auto traj = greedy_rollout(models.value, models.dynamics, models.env,
                                   {-0.5, 0.0}, horizon, models.n_force);

  CsvWriter csv(out_dir / "trajectory.csv", {"t", "x", "xdot", "force", "reward"});
  for (const auto& p : traj) {
    csv.row({std::to_string(p.t), format_sig9(p.x), format_sig9(p.xdot),
             format_sig9(p.force), format_sig9(p.reward)});
  }
  csv.close();

  write_manifest(out_dir, {"trajectory.csv"}, cfg);
  return kExitOk;
}

// ------- manifest verification -------

int cmd_verify_manifest(const std::filesystem::path& dir) {
  const VerifyReport report = verify_manifest(dir);
  for (const auto& line : report.lines) std::cout << line << "\n";
  if (!report.ok) {
    std::cout << "manifest verification FAILED\n";
    return kExitIo;
  }
  std::cout << "manifest verified\n";
  return kExitOk;
}

}  // namespace dualgp::cli
