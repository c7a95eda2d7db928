#pragma once

#include <filesystem>
#include <string>

#include "dualgp/cli/config.hpp"
#include "dualgp/kernels.hpp"

namespace dualgp::cli {

// Process exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitArgument = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitNonConverged = 4;
inline constexpr int kExitIo = 5;

// Saturating-growth curve theta * x / (1 - x / a); x = a is a pole and is
// rejected.
double toy_dynamics(double x, double theta, double a);

KernelVariant parse_kernel_name(const std::string& name);

// Builds the kernel for a variant from config defaults (depth, sigma_w,
// sigma_b, lengthscale) with the given input dimension.
KernelSpec kernel_from_config(const Config& cfg, KernelVariant variant, int input_dim);

// One-dimensional regression study: noisy draws from the growth curve,
// hyperparameters grid-searched by marginal likelihood per kernel, posterior
// summaries written per kernel plus a truth/observation table and the run
// manifest.
int cmd_toy(const Config& cfg, const std::filesystem::path& out_dir);

// Full policy-iteration run for one kernel. Writes the dynamics quiver
// table, one value-surface table per iteration, the final policy and
// per-iteration diagnostics, the fitted models container and the manifest.
// Returns kExitNonConverged when the value iteration hit max_iter.
int cmd_train(const Config& cfg, const std::string& kernel_name,
              const std::filesystem::path& out_dir);

// Greedy closed-loop rollout using a saved model container.
int cmd_rollout(const Config& cfg, const std::filesystem::path& model_dir,
                const std::filesystem::path& out_dir, int horizon);

// Re-checksums everything listed in dir/manifest.txt; prints one status line
// per file. Returns kExitIo when anything is missing or altered.
int cmd_verify_manifest(const std::filesystem::path& dir);

}  // namespace dualgp::cli
