#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace tcas::cli {

std::string sha256_file(const std::filesystem::path& p);

/// Config snapshot plus content hashes of every file read and written.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void input(const std::filesystem::path& p);
  void output(const std::filesystem::path& p);
  void config(nlohmann::json c) { config_ = std::move(c); }

  /// Writes `<dir>/manifest_<command>.json`.
  void write(const std::filesystem::path& dir) const;

 private:
  std::string command_;
  nlohmann::json config_ = nlohmann::json::object();
  std::vector<std::filesystem::path> inputs_, outputs_;
};

}  // namespace tcas::cli
