#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "noisewalk/group.hpp"
#include "noisewalk/measure.hpp"

namespace noisewalk::app {

inline constexpr int kSchemaVersion = 1;

struct GroupSpec {
  std::string type = "free";  // free | presentation
  int rank = 2;
  std::vector<std::string> generators;  // default a, b, c, ...
  std::vector<std::string> relators;
  int radius = 8;
};

struct MeasureSpec {
  std::string type = "uniform_generators";  // uniform_generators | atoms
  std::vector<std::pair<std::string, double>> atoms;
};

struct SpeedSpec {
  std::size_t steps = 2000;
  std::size_t trajectories = 200;
};

struct ExactTvSpec {
  std::vector<double> s_grid{0.0, 1.0};
  std::uint64_t table_cap = 50'000'000;
};

struct LimitLawsSpec {
  std::size_t clt_time = 4096;
  std::size_t clt_trajectories = 10000;
  std::size_t lil_first = 64;
  std::size_t lil_last = 65536;
  std::size_t lil_trajectories = 200;
  std::size_t ellipse_time = 2048;
  std::size_t ellipse_pairs = 10000;
  std::size_t gap_trajectories = 500;
  bool svg = true;
};

struct SeparationSpec {
  double rho = 0.0;
  double rho_prime = 1.0;
  std::size_t scales = 8;
  double confidence = 0.95;
  std::vector<int> exact_n{2, 3, 4};
};

struct EntropySpec {
  std::string method = "exact";  // exact | sampled
};

/// Parsed and validated experiment configuration.
struct Config {
  int schema_version = kSchemaVersion;
  std::optional<std::uint64_t> seed;
  GroupSpec group;
  MeasureSpec measure;
  std::vector<double> homomorphism;  // default: 1 on the first generator
  std::vector<double> rho{0.0, 0.5, 1.0};
  double alpha = 0.25;
  std::optional<std::vector<std::size_t>> n_grid;
  std::size_t samples = 10000;
  bool strict_hypotheses = false;
  SpeedSpec speed;
  ExactTvSpec exact_tv;
  LimitLawsSpec limit_laws;
  SeparationSpec separation;
  EntropySpec entropy;

  MarkedGroup make_group() const;
  FiniteMeasure make_measure(const MarkedGroup& group) const;
  Homomorphism make_homomorphism(const MarkedGroup& group) const;
  std::uint64_t master_seed() const;
  std::vector<std::size_t> grid_or(std::vector<std::size_t> fallback) const;

  /// Full echo of the effective configuration, defaults included. The echo
  /// parses back to the same configuration.
  nlohmann::json to_json() const;
};

/// Throws ConfigError on syntax errors, unknown keys or invalid values.
Config parse_config(const std::string& yaml_text);
Config load_config(const std::filesystem::path& path);

}  // namespace noisewalk::app
