// Command-line front end for the GP regression and mountain-car experiments.
//
//   dualgp toy --out DIR [--config PATH] [--seed N]
//   dualgp train --kernel {rbf|ck|ntk} --out DIR [--config PATH] [--seed N]
//   dualgp rollout --model-dir DIR --out DIR [--config PATH] [--horizon N]
//   dualgp verify-manifest --out DIR
//
// Exit codes: 0 success, 2 bad arguments, 3 numerical failure,
// 4 policy iteration did not converge, 5 I/O or verification failure.

#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dualgp/cli/experiments.hpp"
#include "dualgp/errors.hpp"

namespace {

dualgp::cli::Config load_config(const std::string& config_path,
                                std::optional<std::uint64_t> seed,
                                std::optional<int> horizon) {
  using dualgp::cli::Config;
  Config cfg = config_path.empty() ? Config::defaults() : Config::load(config_path);
  if (seed) cfg.set_int("seed", static_cast<long long>(*seed));
  if (horizon) cfg.set_int("horizon", *horizon);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process regression with network dual kernels"};
  app.require_subcommand(1);

  std::string config_path;
  std::string kernel = "rbf";
  std::string out_dir;
  std::string model_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;

  auto add_common = [&](CLI::App* cmd, bool with_seed) {
    cmd->add_option("--config", config_path, "Key = value run configuration file");
    cmd->add_option("--out", out_dir, "Output directory")->required();
    if (with_seed) cmd->add_option("--seed", seed, "Override the config seed");
  };

  CLI::App* toy = app.add_subcommand("toy", "One-dimensional regression study");
  add_common(toy, true);

  CLI::App* train = app.add_subcommand("train", "Policy-iteration training run");
  add_common(train, true);
  train->add_option("--kernel", kernel, "Kernel: rbf, ck or ntk")->required();

  CLI::App* rollout = app.add_subcommand("rollout", "Greedy rollout from a saved model");
  add_common(rollout, false);
  rollout->add_option("--model-dir", model_dir, "Directory holding models.bin")
      ->required();
  rollout->add_option("--horizon", horizon, "Number of control steps");

  CLI::App* verify =
      app.add_subcommand("verify-manifest", "Re-checksum a run's artifacts");
  verify->add_option("--out", out_dir, "Directory holding manifest.txt")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return dualgp::cli::kExitArgument;
  }

  try {
    if (toy->parsed()) {
      return dualgp::cli::cmd_toy(load_config(config_path, seed, horizon), out_dir);
    }
    if (train->parsed()) {
      return dualgp::cli::cmd_train(load_config(config_path, seed, horizon), kernel,
                                    out_dir);
    }
    if (rollout->parsed()) {
      const auto cfg = load_config(config_path, seed, horizon);
      return dualgp::cli::cmd_rollout(cfg, model_dir, out_dir, cfg.get_int("horizon"));
    }
    if (verify->parsed()) {
      return dualgp::cli::cmd_verify_manifest(out_dir);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return dualgp::cli::kExitArgument;
  } catch (const dualgp::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return dualgp::cli::kExitNumerical;
  } catch (const dualgp::cli::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return dualgp::cli::kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return dualgp::cli::kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return dualgp::cli::kExitNumerical;
  }
  return dualgp::cli::kExitArgument;
}
