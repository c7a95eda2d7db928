#include "dualgp/cli/model_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "dualgp/cli/config.hpp"

namespace dualgp::cli {

namespace {

constexpr char kMagic[4] = {'D', 'G', 'P', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

void put_bytes(std::ofstream& out, const void* data, std::size_t size) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
}

void put_u32(std::ofstream& out, std::uint32_t v) { put_bytes(out, &v, sizeof v); }
void put_i64(std::ofstream& out, std::int64_t v) { put_bytes(out, &v, sizeof v); }
void put_f64(std::ofstream& out, double v) { put_bytes(out, &v, sizeof v); }

void put_matrix(std::ofstream& out, const Eigen::MatrixXd& M) {
  put_i64(out, M.rows());
  put_i64(out, M.cols());
  put_bytes(out, M.data(), sizeof(double) * static_cast<std::size_t>(M.size()));
}

void put_vector(std::ofstream& out, const Eigen::VectorXd& v) {
  put_i64(out, v.size());
  put_bytes(out, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

void put_spec(std::ofstream& out, const KernelSpec& spec) {
  put_u32(out, static_cast<std::uint32_t>(spec.variant));
  put_f64(out, spec.lengthscale);
  put_f64(out, spec.sigma_w);
  put_f64(out, spec.sigma_b);
  put_u32(out, static_cast<std::uint32_t>(spec.depth));
  put_u32(out, static_cast<std::uint32_t>(spec.input_dim));
}

void put_gp(std::ofstream& out, const GPModel& gp) {
  put_spec(out, gp.spec());
  put_f64(out, gp.noise_var());
  put_matrix(out, gp.inputs());
  put_vector(out, gp.targets());
}

class Reader {
 public:
  Reader(std::ifstream& in, std::string path) : in_(in), path_(std::move(path)) {}

  void bytes(void* data, std::size_t size) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (in_.gcount() != static_cast<std::streamsize>(size)) {
      throw IoError("corrupt model container (truncated): " + path_);
    }
  }

  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, sizeof v);
    return v;
  }

  std::int64_t i64() {
    std::int64_t v;
    bytes(&v, sizeof v);
    return v;
  }

  double f64() {
    double v;
    bytes(&v, sizeof v);
    return v;
  }

  Eigen::MatrixXd matrix() {
    const std::int64_t rows = i64();
    const std::int64_t cols = i64();
    if (rows < 0 || cols < 0 || rows * cols > (1 << 26)) {
      throw IoError("corrupt model container (bad matrix shape): " + path_);
    }
    Eigen::MatrixXd M(rows, cols);
    bytes(M.data(), sizeof(double) * static_cast<std::size_t>(M.size()));
    return M;
  }

  Eigen::VectorXd vector() {
    const std::int64_t n = i64();
    if (n < 0 || n > (1 << 26)) {
      throw IoError("corrupt model container (bad vector length): " + path_);
    }
    Eigen::VectorXd v(n);
    bytes(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
    return v;
  }

  KernelSpec spec() {
    KernelSpec s;
    const std::uint32_t variant = u32();
    if (variant > 2) throw IoError("corrupt model container (bad kernel): " + path_);
    s.variant = static_cast<KernelVariant>(variant);
    s.lengthscale = f64();
    s.sigma_w = f64();
    s.sigma_b = f64();
    s.depth = static_cast<int>(u32());
    s.input_dim = static_cast<int>(u32());
    return s;
  }

  GPModel gp() {
    const KernelSpec s = spec();
    const double noise = f64();
    Eigen::MatrixXd X = matrix();
    Eigen::VectorXd y = vector();
    return GPModel::fit(std::move(X), std::move(y), s, noise);
  }

 private:
  std::ifstream& in_;
  std::string path_;
};

}  // namespace

void save_models(const std::filesystem::path& path, const TrainedModels& models) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());

  put_bytes(out, kMagic, sizeof kMagic);
  put_u32(out, kFormatVersion);
  put_f64(out, models.env.gravity);
  put_f64(out, models.env.dt);
  put_u32(out, static_cast<std::uint32_t>(models.env.substeps));
  put_f64(out, models.env.reward_x);
  put_f64(out, models.env.reward_xdot);
  put_f64(out, models.env.reward_sigma);
  put_f64(out, models.env.discount);
  put_u32(out, static_cast<std::uint32_t>(models.n_force));

  put_gp(out, models.dynamics.gp_x);
  put_gp(out, models.dynamics.gp_xdot);
  put_gp(out, models.value.gp);

  out.flush();
  if (!out) throw IoError("error writing: " + path.string());
}

TrainedModels load_models(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model container: " + path.string());
  Reader r(in, path.string());

  char magic[4];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw IoError("corrupt model container (bad magic): " + path.string());
  }
  if (r.u32() != kFormatVersion) {
    throw IoError("unsupported model container version: " + path.string());
  }

  EnvConfig env;
  env.gravity = r.f64();
  env.dt = r.f64();
  env.substeps = static_cast<int>(r.u32());
  env.reward_x = r.f64();
  env.reward_xdot = r.f64();
  env.reward_sigma = r.f64();
  env.discount = r.f64();
  const int n_force = static_cast<int>(r.u32());

  GPModel gp_x = r.gp();
  GPModel gp_xdot = r.gp();
  GPModel gp_v = r.gp();
  Eigen::MatrixXd support = gp_v.inputs();
  Eigen::VectorXd values = gp_v.targets();
  return TrainedModels{env, n_force,
                       DynamicsModel{std::move(gp_x), std::move(gp_xdot)},
                       ValueModel{std::move(gp_v), std::move(support),
                                  std::move(values), ParamVector{}}};
}

}  // namespace dualgp::cli
