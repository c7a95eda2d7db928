#include "dualgp/cli/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "dualgp/version.hpp"

namespace dualgp::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for hashing: " + path.string());

  const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                    EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("cannot initialize SHA-256");
  }

  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    const std::streamsize got = in.gcount();
    if (got > 0 && EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(got)) != 1) {
      throw IoError("SHA-256 update failed");
    }
  }
  if (in.bad()) throw IoError("error reading for hashing: " + path.string());

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw IoError("SHA-256 finalize failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char b[3];
    std::snprintf(b, sizeof(b), "%02x", digest[i]);
    hex += b;
  }
  return hex;
}

void write_manifest(const std::filesystem::path& dir,
                    const std::vector<std::string>& files, const Config& config) {
  const std::filesystem::path path = dir / kManifestName;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  for (const auto& name : files) {
    out << name << ' ' << sha256_file(dir / name) << '\n';
  }
  out << "\n[config]\n";
  out << "version = " << kVersion << "\n";
  out << config.serialize();
  out.flush();
  if (!out) throw IoError("error writing: " + path.string());
}

VerifyReport verify_manifest(const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / kManifestName;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());

  VerifyReport report;
  report.ok = true;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "[config]") break;
    std::istringstream fields(line);
    std::string name, recorded;
    if (!(fields >> name >> recorded)) {
      report.ok = false;
      report.lines.push_back(line + " malformed");
      continue;
    }
    const std::filesystem::path target = dir / name;
    if (!std::filesystem::exists(target)) {
      report.ok = false;
      report.lines.push_back(name + " missing");
      continue;
    }
    const std::string actual = sha256_file(target);
    if (actual == recorded) {
      report.lines.push_back(name + " ok");
    } else {
      report.ok = false;
      report.lines.push_back(name + " mismatch");
    }
  }
  if (in.bad()) throw IoError("error reading manifest: " + path.string());
  return report;
}

}  // namespace dualgp::cli
