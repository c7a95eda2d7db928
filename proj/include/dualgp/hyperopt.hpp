#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dualgp/gp.hpp"
#include "dualgp/kernels.hpp"

namespace dualgp {

// Named positive hyperparameters stored in log-space. Recognized names are
// "lengthscale", "sigma_w", "sigma_b" and "noise_var"; which subset applies
// depends on the kernel variant.
class ParamVector {
 public:
  ParamVector() = default;

  static ParamVector FromValues(const std::map<std::string, double>& values);

  void set_value(const std::string& name, double v);  // v must be positive
  void set_log(const std::string& name, double log_v);

  double value(const std::string& name) const;
  double log_value(const std::string& name) const;
  bool has(const std::string& name) const;

  std::vector<std::string> names() const;  // sorted
  std::size_t size() const { return log_values_.size(); }

  bool operator==(const ParamVector&) const = default;

 private:
  std::map<std::string, double> log_values_;
};

struct InvGammaPrior {
  double shape = 2.0;  // alpha
  double scale = 1.0;  // beta

  double mode() const { return scale / (shape + 1.0); }
};

// log p(v) = alpha log beta - lgamma(alpha) - (alpha + 1) log v - beta / v
double inv_gamma_logpdf(double v, double shape, double scale);

// Names tuned for a variant: RBF has {lengthscale, noise_var}; the network
// kernels have {sigma_w, sigma_b, noise_var}.
std::vector<std::string> tunable_names(KernelVariant variant);
std::map<std::string, InvGammaPrior> default_priors(KernelVariant variant);

// base_spec overridden by whichever recognized names `params` carries; the
// result is validated. Noise is resolved separately via noise_from.
KernelSpec apply_params(const KernelSpec& base_spec, const ParamVector& params);
double noise_from(const ParamVector& params, double base_noise,
                  double noise_floor = 0.0);

struct GridSearchResult {
  ParamVector params;
  double log_marginal = 0.0;
};

// Exhaustive scan maximizing the exact log marginal likelihood. Ties keep the
// earliest grid entry. Grid points whose factorization fails are skipped; if
// every point fails a NumericalError is thrown.
GridSearchResult grid_search(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const KernelSpec& base_spec, double base_noise,
                             const std::vector<ParamVector>& grid);

struct McmcOptions {
  double proposal_scale = 0.25;  // isotropic log-space random walk
  int cv_folds = 4;
  double noise_floor = 1e-6;
};

struct McmcResult {
  ParamVector params;       // highest-density sample seen
  double log_target = 0.0;  // its target density
  double acceptance_rate = 0.0;
};

// Random-walk Metropolis over log-hyperparameters. The target is
// -MSE(theta)/tau + sum of inverse-Gamma log-priors, where MSE is the k-fold
// cross-validated predictive error and the temperature tau is var(y)/n, so
// the data term scales with n like a log-likelihood. The chain starts from
// the prior modes; `steps` counts target evaluations, so steps = 1 returns
// the initial point untouched. Returns the highest-density sample seen
// anywhere in the chain. Deterministic per seed.
McmcResult mcmc_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const KernelSpec& base_spec, double base_noise,
                    const std::map<std::string, InvGammaPrior>& priors, int steps,
                    std::uint64_t seed, const McmcOptions& opts = {});

}  // namespace dualgp
