#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace noisewalk::app {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Shortest round-trip decimal form of a double ("nan", "inf" spelled out).
std::string fmt_double(double x);

/// Comma-separated table with a header row.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& row(const std::vector<std::string>& cells);
  std::string str() const;

 private:
  std::size_t width_;
  std::string text_;
};

/// Writes artifacts into one output directory and remembers their digests
/// for the manifest.
class OutputDir {
 public:
  struct Entry {
    std::string file;
    std::string sha256;
    std::size_t bytes = 0;
  };

  explicit OutputDir(std::filesystem::path dir);

  void write(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const nlohmann::json& j);
  const std::vector<Entry>& entries() const { return entries_; }
  const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<Entry> entries_;
};

/// UTC wall-clock time in ISO 8601. Used only in the manifest.
std::string utc_timestamp();

}  // namespace noisewalk::app
