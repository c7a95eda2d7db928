#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

namespace dualgp::cli {

// A file or directory could not be read or written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Flat `key = value` run configuration ('#' starts a comment). Every run
// constant has a default; a config file overrides defaults key by key, and
// unknown keys are rejected so typos cannot silently revert a setting.
class Config {
 public:
  static Config defaults();

  // Defaults overlaid with the file's entries. Throws IoError when the file
  // cannot be read and std::invalid_argument on malformed lines or unknown
  // keys.
  static Config load(const std::filesystem::path& path);

  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);
  void set_int(const std::string& key, long long value);

  const std::map<std::string, std::string>& entries() const { return entries_; }

  // Sorted `key = value` lines, one per entry.
  std::string serialize() const;

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace dualgp::cli
