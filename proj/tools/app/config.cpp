#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "noisewalk/error.hpp"

namespace noisewalk::app {

namespace {

// Masses may be off by this much in a config file; they are renormalized.
constexpr double kConfigMassTolerance = 1e-9;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) fail(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get(const YAML::Node& node, const std::string& key, const std::string& where) {
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    fail(where + "." + key + ": invalid value");
  }
}

template <class T>
void read(const YAML::Node& node, const std::string& key, const std::string& where, T& out) {
  if (node[key]) out = get<T>(node, key, where);
}

void require(bool ok, const std::string& msg) {
  if (!ok) fail(msg);
}

void parse_group(const YAML::Node& node, GroupSpec& g) {
  check_keys(node, "group", {"type", "rank", "generators", "relators", "radius"});
  read(node, "type", "group", g.type);
  read(node, "rank", "group", g.rank);
  read(node, "generators", "group", g.generators);
  read(node, "relators", "group", g.relators);
  read(node, "radius", "group", g.radius);
  require(g.type == "free" || g.type == "presentation", "group.type must be 'free' or 'presentation'");
  if (!g.generators.empty()) g.rank = static_cast<int>(g.generators.size());
  require(g.rank >= 1 && g.rank <= 26, "group.rank must be in [1, 26]");
  require(g.type == "presentation" || g.relators.empty(), "group.relators needs type 'presentation'");
  require(g.radius >= 1, "group.radius must be positive");
}

void parse_measure(const YAML::Node& node, MeasureSpec& m) {
  check_keys(node, "measure", {"type", "atoms"});
  read(node, "type", "measure", m.type);
  require(m.type == "uniform_generators" || m.type == "atoms", "measure.type must be 'uniform_generators' or 'atoms'");
  if (m.type == "uniform_generators") {
    require(!node["atoms"], "measure.atoms needs type 'atoms'");
    return;
  }
  const auto atoms = node["atoms"];
  require(atoms && atoms.IsSequence() && atoms.size() > 0, "measure.atoms must be a non-empty list");
  double total = 0.0;
  for (const auto& a : atoms) {
    check_keys(a, "measure.atoms[]", {"word", "mass"});
    const auto word = get<std::string>(a, "word", "measure.atoms[]");
    const auto mass = get<double>(a, "mass", "measure.atoms[]");
    require(std::isfinite(mass) && mass > 0.0, "measure.atoms[].mass must be positive");
    m.atoms.emplace_back(word, mass);
    total += mass;
  }
  require(std::abs(total - 1.0) <= kConfigMassTolerance, "measure.atoms masses must sum to 1");
  for (auto& [w, p] : m.atoms) p /= total;
}

void check_grid(const std::vector<std::size_t>& grid, const std::string& where) {
  require(!grid.empty(), where + " must be non-empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] >= 1, where + " entries must be positive");
    require(i == 0 || grid[i] > grid[i - 1], where + " must be strictly increasing");
  }
}

}  // namespace

Config parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    fail(std::string("config parse error: ") + e.what());
  }
  if (root.IsNull()) fail("empty config");
  check_keys(root, "config",
             {"schema_version", "seed", "group", "measure", "homomorphism", "rho", "alpha", "n_grid", "samples",
              "strict_hypotheses", "speed", "exact_tv", "limit_laws", "separation", "entropy"});

  Config c;
  read(root, "schema_version", "config", c.schema_version);
  require(c.schema_version == kSchemaVersion, "unsupported schema_version " + std::to_string(c.schema_version));
  if (root["seed"]) c.seed = get<std::uint64_t>(root, "seed", "config");
  if (root["group"]) parse_group(root["group"], c.group);
  if (root["measure"]) parse_measure(root["measure"], c.measure);
  read(root, "homomorphism", "config", c.homomorphism);
  read(root, "rho", "config", c.rho);
  read(root, "alpha", "config", c.alpha);
  if (root["n_grid"]) c.n_grid = get<std::vector<std::size_t>>(root, "n_grid", "config");
  read(root, "samples", "config", c.samples);
  read(root, "strict_hypotheses", "config", c.strict_hypotheses);

  if (const auto s = root["speed"]) {
    check_keys(s, "speed", {"steps", "trajectories"});
    read(s, "steps", "speed", c.speed.steps);
    read(s, "trajectories", "speed", c.speed.trajectories);
  }
  if (const auto s = root["exact_tv"]) {
    check_keys(s, "exact_tv", {"s_grid", "table_cap"});
    read(s, "s_grid", "exact_tv", c.exact_tv.s_grid);
    read(s, "table_cap", "exact_tv", c.exact_tv.table_cap);
  }
  if (const auto s = root["limit_laws"]) {
    check_keys(s, "limit_laws",
               {"clt_time", "clt_trajectories", "lil_window", "lil_trajectories", "ellipse_time", "ellipse_pairs",
                "gap_trajectories", "svg"});
    auto& l = c.limit_laws;
    read(s, "clt_time", "limit_laws", l.clt_time);
    read(s, "clt_trajectories", "limit_laws", l.clt_trajectories);
    if (s["lil_window"]) {
      const auto w = get<std::vector<std::size_t>>(s, "lil_window", "limit_laws");
      require(w.size() == 2, "limit_laws.lil_window must be [first, last]");
      l.lil_first = w[0];
      l.lil_last = w[1];
    }
    read(s, "lil_trajectories", "limit_laws", l.lil_trajectories);
    read(s, "ellipse_time", "limit_laws", l.ellipse_time);
    read(s, "ellipse_pairs", "limit_laws", l.ellipse_pairs);
    read(s, "gap_trajectories", "limit_laws", l.gap_trajectories);
    read(s, "svg", "limit_laws", l.svg);
  }
  if (const auto s = root["separation"]) {
    check_keys(s, "separation", {"rho", "rho_prime", "scales", "confidence", "exact_n"});
    read(s, "rho", "separation", c.separation.rho);
    read(s, "rho_prime", "separation", c.separation.rho_prime);
    read(s, "scales", "separation", c.separation.scales);
    read(s, "confidence", "separation", c.separation.confidence);
    read(s, "exact_n", "separation", c.separation.exact_n);
  }
  if (const auto s = root["entropy"]) {
    check_keys(s, "entropy", {"method"});
    read(s, "method", "entropy", c.entropy.method);
  }

  for (double r : c.rho) require(r >= 0.0 && r <= 1.0, "rho values must lie in [0, 1]");
  for (double r : {c.separation.rho, c.separation.rho_prime})
    require(r >= 0.0 && r <= 1.0, "separation.rho and rho_prime must lie in [0, 1]");
  require(c.alpha >= 0.0 && c.alpha < 1.0, "alpha must lie in [0, 1)");
  if (c.n_grid) check_grid(*c.n_grid, "n_grid");
  require(c.samples >= 1, "samples must be positive");
  require(c.speed.steps >= 100 && c.speed.trajectories >= 10, "speed needs steps >= 100 and trajectories >= 10");
  for (double s : c.exact_tv.s_grid) require(s >= 0.0, "exact_tv.s_grid entries must be non-negative");
  require(c.limit_laws.lil_first >= 3 && c.limit_laws.lil_first < c.limit_laws.lil_last,
          "limit_laws.lil_window needs 3 <= first < last");
  require(c.limit_laws.clt_time >= 1 && c.limit_laws.ellipse_time >= 1, "limit_laws times must be positive");
  require(c.separation.confidence > 0.0 && c.separation.confidence < 1.0, "separation.confidence must lie in (0, 1)");
  require(c.entropy.method == "exact" || c.entropy.method == "sampled", "entropy.method must be 'exact' or 'sampled'");
  if (!c.homomorphism.empty())
    require(static_cast<int>(c.homomorphism.size()) == c.group.rank, "homomorphism needs one weight per generator");
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

MarkedGroup Config::make_group() const {
  std::vector<std::string> names = group.generators;
  if (names.empty())
    for (int i = 0; i < group.rank; ++i) names.emplace_back(1, static_cast<char>('a' + i));
  if (group.type == "free") return MarkedGroup::free_group(group.rank, names);
  return MarkedGroup::presentation(names, group.relators, group.radius);
}

FiniteMeasure Config::make_measure(const MarkedGroup& g) const {
  if (measure.type == "uniform_generators") return FiniteMeasure::uniform_generators(g);
  std::vector<FiniteMeasure::Atom> atoms;
  for (const auto& [w, p] : measure.atoms) atoms.emplace_back(g.parse(w), p);
  return FiniteMeasure(atoms);
}

Homomorphism Config::make_homomorphism(const MarkedGroup& g) const {
  if (!homomorphism.empty()) return Homomorphism(g, homomorphism);
  std::vector<double> w(static_cast<std::size_t>(g.rank()), 0.0);
  w[0] = 1.0;
  return Homomorphism(g, w);
}

std::uint64_t Config::master_seed() const {
  if (!seed) throw ConfigError("seed is mandatory (config key 'seed' or --seed)");
  return *seed;
}

std::vector<std::size_t> Config::grid_or(std::vector<std::size_t> fallback) const {
  return n_grid ? *n_grid : fallback;
}

nlohmann::json Config::to_json() const {
  nlohmann::json j;
  j["schema_version"] = schema_version;
  if (seed) j["seed"] = *seed;
  j["group"] = {{"type", group.type},
                {"rank", group.rank},
                {"generators", group.generators},
                {"relators", group.relators},
                {"radius", group.radius}};
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& [w, p] : measure.atoms) atoms.push_back({{"word", w}, {"mass", p}});
  j["measure"] = {{"type", measure.type}};
  if (measure.type == "atoms") j["measure"]["atoms"] = atoms;
  j["homomorphism"] = homomorphism;
  j["rho"] = rho;
  j["alpha"] = alpha;
  if (n_grid) j["n_grid"] = *n_grid;
  j["samples"] = samples;
  j["strict_hypotheses"] = strict_hypotheses;
  j["speed"] = {{"steps", speed.steps}, {"trajectories", speed.trajectories}};
  j["exact_tv"] = {{"s_grid", exact_tv.s_grid}, {"table_cap", exact_tv.table_cap}};
  const auto& l = limit_laws;
  j["limit_laws"] = {{"clt_time", l.clt_time},
                     {"clt_trajectories", l.clt_trajectories},
                     {"lil_window", {l.lil_first, l.lil_last}},
                     {"lil_trajectories", l.lil_trajectories},
                     {"ellipse_time", l.ellipse_time},
                     {"ellipse_pairs", l.ellipse_pairs},
                     {"gap_trajectories", l.gap_trajectories},
                     {"svg", l.svg}};
  j["separation"] = {{"rho", separation.rho},
                     {"rho_prime", separation.rho_prime},
                     {"scales", separation.scales},
                     {"confidence", separation.confidence},
                     {"exact_n", separation.exact_n}};
  j["entropy"] = {{"method", entropy.method}};
  return j;
}

}  // namespace noisewalk::app
