#include "dualgp/cli/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dualgp::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::defaults() {
  Config c;
  auto& e = c.entries_;
  // environment
  e["gravity"] = "9.81";
  e["dt"] = "0.3";
  e["substeps"] = "30";
  e["discount"] = "0.9";
  e["reward_x"] = "0.6";
  e["reward_xdot"] = "0";
  e["reward_sigma"] = "0.05";
  // kernel defaults
  e["kernel_depth"] = "3";
  e["sigma_w"] = "1";
  e["sigma_b"] = "0.1";
  e["lengthscale"] = "1";
  e["noise_var"] = "0.01";
  // policy iteration
  e["n_dynamics"] = "128";
  e["n_value"] = "512";
  e["n_force"] = "128";
  e["tol"] = "0.01";
  e["max_iter"] = "15";
  e["seed"] = "42";
  e["holdout"] = "32";
  // hyperparameter MCMC
  e["mcmc_steps"] = "4000";
  e["mcmc_proposal_scale"] = "0.25";
  e["prior_shape"] = "2";
  e["prior_scale"] = "1";
  e["noise_floor"] = "1e-06";
  // toy regression study
  e["toy_theta"] = "0.65";
  e["toy_a"] = "10";
  e["toy_noise"] = "0.1";
  e["toy_train_n"] = "11";
  e["toy_train_lo"] = "0.1";
  e["toy_train_hi"] = "4";
  e["toy_query_n"] = "100";
  e["toy_query_lo"] = "0.2";
  e["toy_query_hi"] = "9";
  e["grid_per_decade"] = "8";
  e["grid_lo"] = "0.01";
  e["grid_hi"] = "100";
  // rollout and rendering grids
  e["horizon"] = "100";
  e["quiver_n"] = "20";
  e["surface_n"] = "50";
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  Config c = defaults();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << path.string() << ":" << lineno << ": expected key = value";
      throw std::invalid_argument(msg.str());
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      std::ostringstream msg;
      msg << path.string() << ":" << lineno << ": empty key or value";
      throw std::invalid_argument(msg.str());
    }
    if (c.entries_.count(key) == 0) {
      std::ostringstream msg;
      msg << path.string() << ":" << lineno << ": unknown key '" << key << "'";
      throw std::invalid_argument(msg.str());
    }
    c.entries_[key] = value;
  }
  if (in.bad()) throw IoError("error reading config file: " + path.string());
  return c;
}

double Config::get_double(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw std::invalid_argument("unknown config key: " + key);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0' || errno == ERANGE) {
    throw std::invalid_argument("config key " + key + " is not a number: " + it->second);
  }
  return v;
}

int Config::get_int(const std::string& key) const {
  const double v = get_double(key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw std::invalid_argument("config key " + key + " must be an integer");
  }
  return i;
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw std::invalid_argument("unknown config key: " + key);
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0' || errno == ERANGE) {
    throw std::invalid_argument("config key " + key +
                                " is not an unsigned integer: " + it->second);
  }
  return v;
}

void Config::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

void Config::set_double(const std::string& key, double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  entries_[key] = buf;
}

void Config::set_int(const std::string& key, long long value) {
  entries_[key] = std::to_string(value);
}

std::string Config::serialize() const {
  std::ostringstream out;
  for (const auto& [key, value] : entries_) {
    out << key << " = " << value << "\n";
  }
  return out.str();
}

}  // namespace dualgp::cli
