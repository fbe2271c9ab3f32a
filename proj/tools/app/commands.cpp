#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <fstream>
#include <map>
#include <ostream>

#include "noisewalk/error.hpp"
#include "noisewalk/exact.hpp"
#include "noisewalk/numerics.hpp"
#include "noisewalk/parallel.hpp"
#include "noisewalk/stats.hpp"
#include "output.hpp"

#ifndef NOISEWALK_VERSION
#define NOISEWALK_VERSION "unknown"
#endif

namespace noisewalk::app {

namespace {

using nlohmann::json;

// Substreams of the master seed, one per estimator.
enum Stream : std::uint64_t {
  kStreamSpeed = 1,
  kStreamClt = 2,
  kStreamLil = 3,
  kStreamEllipse = 4,
  kStreamGap = 5,
  kStreamSeparation = 6,
  kStreamEntropy = 7,
};

std::string str(std::size_t x) { return std::to_string(x); }
std::string str(int x) { return std::to_string(x); }
std::string str(double x) { return fmt_double(x); }
std::string str(bool x) { return x ? "true" : "false"; }

// State shared by all commands.
struct Context {
  const Config& config;
  const RunOptions& options;
  std::ostream& log;
  MarkedGroup group;
  FiniteMeasure mu;
  Homomorphism phi;
  std::uint64_t seed;
  bool strict;
  SpeedEstimate speed;
  double var_phi = 0.0;
  double mean_phi = 0.0;
  json warnings = json::array();

  void warn(const std::string& msg) {
    log << "warning: " << msg << "\n";
    warnings.push_back(msg);
  }

  void hypothesis(bool ok, const std::string& msg) {
    if (ok) return;
    if (strict) throw HypothesisError(msg);
    warn(msg);
  }

  std::uint64_t stream(Stream s) const { return derive_seed(seed, s); }
  unsigned workers() const { return options.workers; }

  json formula_inputs() const {
    return {{"lambda_hat", speed.lambda},
            {"lambda_half_width", speed.half_width},
            {"lambda_steps", speed.steps},
            {"lambda_trajectories", speed.trajectories},
            {"phi_mean", mean_phi},
            {"phi_variance", var_phi}};
  }

  json summary_base(const std::string& command) const {
    return {{"schema_version", kSchemaVersion},
            {"command", command},
            {"master_seed", seed},
            {"config", config.to_json()},
            {"formula_inputs", formula_inputs()}};
  }
};

// Samples that ran past the end of their endpoint word are dropped; the
// count is reported next to every statistic.
template <class Fn>
std::vector<double> collect(std::size_t count, unsigned workers, std::size_t& dropped, Fn&& fn) {
  auto raw = parallel_map(count, workers, [&](std::size_t i) -> std::optional<double> {
    try {
      return fn(i);
    } catch (const HorizonExhaustedError&) {
      return std::nullopt;
    }
  });
  std::vector<double> out;
  dropped = 0;
  for (const auto& r : raw) {
    if (r)
      out.push_back(*r);
    else
      ++dropped;
  }
  return out;
}

// ---------------------------------------------------------------------------

json cmd_exact_tv(Context& ctx, OutputDir& out) {
  const auto grid = ctx.config.grid_or({1, 2, 3, 4});
  const int nmax = static_cast<int>(grid.back());
  const EngineOptions engine{ctx.config.exact_tv.table_cap, ctx.workers()};
  const auto& s_grid = ctx.config.exact_tv.s_grid;

  std::vector<std::string> header{"rho", "n", "atoms", "tv"};
  for (double s : s_grid) header.push_back("U_s=" + fmt_double(s));
  Csv csv(header);
  json rows = json::array();

  ExactEngine independent_engine(ctx.group, engine);
  const auto independent = independent_engine.convolve_pair_series(product_measure(ctx.mu), nmax);
  for (double rho : ctx.config.rho) {
    ctx.log << "[exact-tv] rho=" << fmt_double(rho) << "\n";
    ExactEngine coupled_engine(ctx.group, engine);
    const auto coupled = coupled_engine.convolve_pair_series(noisy_coupling(ctx.mu, rho), nmax);
    for (std::size_t n : grid) {
      const auto& p = coupled[n];
      const auto& q = independent[n];
      const double tv = tv_distance(p, q);
      std::vector<std::string> cells{str(rho), str(n), str(p.size()), str(tv)};
      json u = json::array();
      for (double s : s_grid) {
        const double v = separation_U(ctx.group, p, q, s);
        cells.push_back(str(v));
        u.push_back({{"s", s}, {"U", v}});
      }
      csv.row(cells);
      rows.push_back({{"rho", rho}, {"n", n}, {"atoms", p.size()}, {"tv", tv}, {"U", u}});
    }
  }
  out.write("exact_tv.csv", csv.str());
  auto summary = ctx.summary_base("exact-tv");
  summary["rows"] = rows;
  return summary;
}

// ---------------------------------------------------------------------------

std::string ellipse_svg(std::span<const std::array<double, 2>> points, const CovarianceMatrix2& predicted, double rho) {
  const auto root = predicted.sqrt();
  const double radius = 3.5 * std::sqrt(std::max(predicted.eigenvalues()[1], 1e-12));
  const double size = 400.0, half = size / 2;
  const auto px = [&](double x) { return half + x / radius * (half - 10); };
  const auto py = [&](double y) { return half - y / radius * (half - 10); };
  char buf[128];
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n";
  std::snprintf(buf, sizeof buf, "<title>rho=%s</title>\n", fmt_double(rho).c_str());
  s += buf;
  s += "<line x1=\"0\" y1=\"200\" x2=\"400\" y2=\"200\" stroke=\"#ccc\"/>\n";
  s += "<line x1=\"200\" y1=\"0\" x2=\"200\" y2=\"400\" stroke=\"#ccc\"/>\n";
  const std::size_t shown = std::min<std::size_t>(points.size(), 2000);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto [x, y] = points[i];
    if (std::abs(x) > radius || std::abs(y) > radius) continue;
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.2\" fill=\"#4477aa\" fill-opacity=\"0.4\"/>\n",
                  px(x), py(y));
    s += buf;
  }
  s += "<polyline fill=\"none\" stroke=\"#cc3311\" stroke-width=\"2\" points=\"";
  for (int k = 0; k <= 128; ++k) {
    const double th = 2 * M_PI * k / 128;
    const double c = std::cos(th), sn = std::sin(th);
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(root.xx * c + root.xy * sn), py(root.xy * c + root.yy * sn));
    s += buf;
  }
  s += "\"/>\n</svg>\n";
  return s;
}

json cmd_limit_laws(Context& ctx, OutputDir& out) {
  const auto& cfg = ctx.config.limit_laws;
  const double lambda = ctx.speed.lambda;
  auto summary = ctx.summary_base("limit-laws");

  out.write("speed.csv", Csv({"steps", "trajectories", "lambda", "half_width", "sample_sd", "sigma", "degenerate"})
                             .row({str(ctx.speed.steps), str(ctx.speed.trajectories), str(ctx.speed.lambda),
                                   str(ctx.speed.half_width), str(ctx.speed.sample_sd), str(ctx.speed.sigma),
                                   str(ctx.speed.degenerate)})
                             .str());
  summary["speed"] = {{"lambda", ctx.speed.lambda},   {"half_width", ctx.speed.half_width},
                      {"sigma", ctx.speed.sigma},     {"degenerate", ctx.speed.degenerate}};

  const bool centered = std::abs(ctx.mean_phi) <= kCenteringTolerance;
  ctx.hypothesis(centered, "phi is not centered under mu; winding laws skipped");
  if (!centered) return summary;
  if (lambda <= 0.0) {
    ctx.warn("estimated speed is zero; winding laws skipped");
    return summary;
  }

  const WalkSampler walks(ctx.group, ctx.mu);
  const double kappa2 = ctx.var_phi / lambda;

  {
    const std::size_t t = cfg.clt_time;
    const std::size_t horizon = horizon_for_ray_time(lambda, t);
    ctx.log << "[limit-laws] clt t=" << t << " horizon=" << horizon << "\n";
    std::size_t dropped = 0;
    const std::vector<std::size_t> times{t};
    const auto xs = collect(cfg.clt_trajectories, ctx.workers(), dropped, [&](std::size_t i) {
      const auto w = walks(horizon, SeedRecord{ctx.stream(kStreamClt), i});
      return ray_winding(w, ctx.phi, times, lambda).values[0] / std::sqrt(static_cast<double>(t));
    });
    const auto ks = clt_check(xs, kappa2);
    out.write("clt.csv", Csv({"t", "trajectories", "dropped", "kappa2", "ks", "degenerate", "inconsistent"})
                             .row({str(t), str(cfg.clt_trajectories), str(dropped), str(kappa2), str(ks.statistic),
                                   str(ks.degenerate), str(ks.inconsistent)})
                             .str());
    summary["clt"] = {{"t", t}, {"kappa2", kappa2}, {"ks", ks.statistic}, {"dropped", dropped},
                      {"degenerate", ks.degenerate}};
  }

  {
    const std::size_t last = cfg.lil_last;
    const std::size_t horizon = horizon_for_ray_time(lambda, last);
    ctx.log << "[limit-laws] lil window=[" << cfg.lil_first << ", " << last << "] horizon=" << horizon << "\n";
    auto ext = parallel_map(cfg.lil_trajectories, ctx.workers(), [&](std::size_t i) -> std::optional<LilExtremes> {
      const auto w = walks(horizon, SeedRecord{ctx.stream(kStreamLil), i});
      if (w.endpoint().size() < last) return std::nullopt;
      return lil_window(full_ray_winding(w, ctx.phi, last, lambda), cfg.lil_first, last);
    });
    Csv csv({"trajectory", "max", "min"});
    std::vector<double> maxima, minima;
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < ext.size(); ++i) {
      if (!ext[i]) {
        ++dropped;
        continue;
      }
      csv.row({str(i), str(ext[i]->max), str(ext[i]->min)});
      maxima.push_back(ext[i]->max);
      minima.push_back(ext[i]->min);
    }
    out.write("lil.csv", csv.str());
    summary["lil"] = {{"window", {cfg.lil_first, last}},
                      {"kappa", std::sqrt(kappa2)},
                      {"median_max", maxima.empty() ? NAN : median(maxima)},
                      {"median_min", minima.empty() ? NAN : median(minima)},
                      {"dropped", dropped}};
  }

  {
    const std::size_t t = cfg.ellipse_time;
    const std::size_t horizon = horizon_for_ray_time(lambda, t);
    Csv csv({"rho", "t", "pairs", "dropped", "emp_xx", "emp_xy", "emp_yy", "pred_xx", "pred_xy", "pred_yy",
             "discrepancy", "offdiag_half_width"});
    json rows = json::array();
    for (std::size_t r = 0; r < ctx.config.rho.size(); ++r) {
      const double rho = ctx.config.rho[r];
      ctx.log << "[limit-laws] ellipse rho=" << fmt_double(rho) << "\n";
      const ResamplingSampler pairs(ctx.group, ctx.mu, rho);
      const std::uint64_t stream = derive_seed(ctx.stream(kStreamEllipse), r);
      auto raw = parallel_map(cfg.ellipse_pairs, ctx.workers(), [&](std::size_t i) -> std::optional<std::array<double, 2>> {
        try {
          return pair_winding_point(pairs(horizon, SeedRecord{stream, i}), ctx.phi, t, lambda);
        } catch (const HorizonExhaustedError&) {
          return std::nullopt;
        }
      });
      std::vector<std::array<double, 2>> points;
      for (const auto& p : raw)
        if (p) points.push_back(*p);
      const std::size_t dropped = raw.size() - points.size();
      const auto check = joint_ellipse_check(ctx.mu, ctx.phi, rho, lambda, points);
      const auto& e = check.empirical;
      const auto& p = check.predicted;
      csv.row({str(rho), str(t), str(cfg.ellipse_pairs), str(dropped), str(e.xx), str(e.xy), str(e.yy), str(p.xx),
               str(p.xy), str(p.yy), str(check.discrepancy), str(check.offdiag_half_width)});
      rows.push_back({{"rho", rho},
                      {"empirical", {e.xx, e.xy, e.yy}},
                      {"predicted", {p.xx, p.xy, p.yy}},
                      {"discrepancy", check.discrepancy},
                      {"dropped", dropped}});
      if (cfg.svg) out.write("ellipse_" + str(r) + ".svg", ellipse_svg(points, p, rho));
    }
    out.write("ellipse.csv", csv.str());
    summary["ellipse"] = rows;
  }

  {
    const auto grid = ctx.config.grid_or({256, 1024, 4096, 16384});
    Csv csv({"n", "trajectories", "dropped", "median", "mean"});
    json rows = json::array();
    for (std::size_t n : grid) {
      const auto t = static_cast<std::size_t>(std::floor(lambda * static_cast<double>(n)));
      const std::size_t horizon = std::max(n, horizon_for_ray_time(lambda, std::max<std::size_t>(t, 1)));
      ctx.log << "[limit-laws] marginal gap n=" << n << "\n";
      std::size_t dropped = 0;
      const auto gaps = collect(cfg.gap_trajectories, ctx.workers(), dropped, [&](std::size_t i) {
        const auto w = walks(horizon, SeedRecord{derive_seed(ctx.stream(kStreamGap), n), i});
        return marginal_gap(ctx.mu, w, ctx.phi, lambda, n);
      });
      const double med = gaps.empty() ? NAN : median(gaps);
      csv.row({str(n), str(cfg.gap_trajectories), str(dropped), str(med), str(mean(gaps))});
      rows.push_back({{"n", n}, {"median", med}, {"dropped", dropped}});
    }
    out.write("marginal_gap.csv", csv.str());
    summary["marginal_gap"] = rows;
  }
  return summary;
}

// ---------------------------------------------------------------------------

json cmd_separation(Context& ctx, OutputDir& out) {
  const auto& cfg = ctx.config.separation;
  const double lambda = ctx.speed.lambda;
  const double alpha = ctx.config.alpha;
  if (!(alpha < lambda))
    throw HypothesisError("alpha = " + fmt_double(alpha) + " is not below the estimated speed " + fmt_double(lambda));

  const auto grid = ctx.config.grid_or({1024, 4096, 16384});
  const std::uint64_t stream = ctx.stream(kStreamSeparation);
  auto run = [&](std::size_t n) {
    return separation_lower_bound(ctx.group, ctx.mu, ctx.phi, cfg.rho, cfg.rho_prime, alpha, n, cfg.scales,
                                  ctx.config.samples, derive_seed(stream, n), lambda, cfg.confidence, ctx.workers());
  };

  Csv csv({"n", "rho", "rho_prime", "alpha", "scales", "threshold", "bound", "raw", "correction", "confidence",
           "samples", "p_decide_rho", "p_decide_rho_prime", "p_short_rho", "p_short_rho_prime"});
  json rows = json::array();
  bool trend = true;
  const SeparationLowerBound* prev = nullptr;
  std::vector<SeparationLowerBound> results;
  results.reserve(grid.size());
  for (std::size_t n : grid) {
    ctx.log << "[separation] n=" << n << "\n";
    results.push_back(run(n));
    const auto& b = results.back();
    csv.row({str(n), str(b.rho), str(b.rho_prime), str(b.alpha), str(b.scales.size() - 1), str(b.threshold),
             str(b.bound), str(b.raw), str(b.correction), str(b.confidence), str(b.samples), str(b.p_decide_rho),
             str(b.p_decide_rho_prime), str(b.p_short_rho), str(b.p_short_rho_prime)});
    rows.push_back({{"n", n}, {"bound", b.bound}, {"raw", b.raw}, {"correction", b.correction}});
    if (prev && b.raw < prev->raw - (b.correction + prev->correction)) trend = false;
    prev = &b;
  }
  out.write("separation.csv", csv.str());

  Csv exact({"n", "bound", "raw", "correction", "exact_U", "consistent"});
  json exact_rows = json::array();
  if (!cfg.exact_n.empty()) {
    const int nmax = *std::max_element(cfg.exact_n.begin(), cfg.exact_n.end());
    const EngineOptions engine{ctx.config.exact_tv.table_cap, ctx.workers()};
    ExactEngine e1(ctx.group, engine), e2(ctx.group, engine);
    const auto t1 = e1.convolve_pair_series(noisy_coupling(ctx.mu, cfg.rho), nmax);
    const auto t2 = e2.convolve_pair_series(noisy_coupling(ctx.mu, cfg.rho_prime), nmax);
    for (int n : cfg.exact_n) {
      if (n < 1) throw ConfigError("separation.exact_n entries must be positive");
      ctx.log << "[separation] exact n=" << n << "\n";
      const auto nn = static_cast<std::size_t>(n);
      const double u = separation_U(ctx.group, t1[nn], t2[nn], alpha * n);
      const auto b = run(nn);
      const bool ok = b.bound <= u + 1e-12;
      exact.row({str(n), str(b.bound), str(b.raw), str(b.correction), str(u), str(ok)});
      exact_rows.push_back({{"n", n}, {"bound", b.bound}, {"exact_U", u}, {"consistent", ok}});
    }
  }
  out.write("separation_exact.csv", exact.str());

  auto summary = ctx.summary_base("separation");
  summary["rows"] = rows;
  summary["non_decreasing_within_ci"] = trend;
  summary["exact_rows"] = exact_rows;
  return summary;
}

// ---------------------------------------------------------------------------

json cmd_entropy(Context& ctx, OutputDir& out) {
  const auto grid_sz = ctx.config.grid_or({3, 4, 5, 6});
  if (grid_sz.size() < 3) throw ConfigError("entropy needs an n_grid with at least 3 points");
  std::vector<int> grid(grid_sz.begin(), grid_sz.end());

  EntropyOptions opts;
  opts.method = ctx.config.entropy.method == "sampled" ? EntropyMethod::Sampled : EntropyMethod::Exact;
  opts.samples = ctx.config.samples;
  opts.seed = ctx.stream(kStreamEntropy);
  if (ctx.speed.lambda > 0.0) opts.lambda = ctx.speed.lambda;
  opts.engine = EngineOptions{ctx.config.exact_tv.table_cap, ctx.workers()};

  Csv values({"series", "rho", "n", "h"});
  Csv fits({"series", "rho", "h_inf", "slope", "dimension"});
  json rows = json::array();
  auto record = [&](const std::string& series, const EntropyEstimate& e) {
    for (std::size_t i = 0; i < e.grid.size(); ++i) values.row({series, str(e.rho), str(e.grid[i]), str(e.h[i])});
    const double dim = e.dimension.value_or(NAN);
    fits.row({series, str(e.rho), str(e.h_inf), str(e.slope), str(dim)});
    rows.push_back({{"series", series}, {"rho", e.rho}, {"h", e.h}, {"h_inf", e.h_inf}, {"slope", e.slope},
                    {"dimension", e.dimension ? json(dim) : json(nullptr)}});
  };

  ctx.log << "[entropy] single walk\n";
  record("single", estimate_single_entropy(ctx.group, ctx.mu, grid, opts));
  for (double rho : ctx.config.rho) {
    ctx.log << "[entropy] rho=" << fmt_double(rho) << "\n";
    record("coupled", estimate_entropy(ctx.group, ctx.mu, rho, grid, opts));
  }
  out.write("entropy.csv", values.str());
  out.write("entropy_fit.csv", fits.str());
  auto summary = ctx.summary_base("entropy");
  summary["method"] = ctx.config.entropy.method;
  summary["rows"] = rows;
  return summary;
}

using Command = json (*)(Context&, OutputDir&);

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{{"exact-tv", cmd_exact_tv},
                                                    {"limit-laws", cmd_limit_laws},
                                                    {"separation", cmd_separation},
                                                    {"entropy", cmd_entropy}};
  return table;
}

int run_checked(const std::string& command, Config config, const RunOptions& options, std::ostream& log) {
  const auto it = commands().find(command);
  if (it == commands().end()) throw ConfigError("unknown command '" + command + "'");
  if (options.seed) config.seed = options.seed;
  if (options.strict) config.strict_hypotheses = true;
  const std::string started = utc_timestamp();

  // Bad words or weights in the config are config errors, not library failures.
  auto build = [&](auto&& fn) {
    try {
      return fn();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  };
  const MarkedGroup group = build([&] { return config.make_group(); });
  Context ctx{config,
              options,
              log,
              group,
              build([&] { return config.make_measure(group); }),
              build([&] { return config.make_homomorphism(group); }),
              config.master_seed(),
              config.strict_hypotheses,
              {}};
  const auto report = validate_measure(ctx.group, ctx.mu);
  for (const auto& w : report.warnings) ctx.warn(w);
  ctx.hypothesis(report.non_elementary, "measure failed the non-elementary heuristic");
  ctx.mean_phi = winding_mean(ctx.mu, ctx.phi);
  ctx.var_phi = winding_variance(ctx.mu, ctx.phi);
  ctx.log << "[" << command << "] estimating speed\n";
  ctx.speed = estimate_speed(ctx.group, ctx.mu, config.speed.steps, config.speed.trajectories,
                             ctx.stream(kStreamSpeed), ctx.workers());

  OutputDir out(options.out);
  auto summary = it->second(ctx, out);
  summary["warnings"] = ctx.warnings;
  out.write_json("summary.json", summary);

  json outputs = json::array();
  for (const auto& e : out.entries()) outputs.push_back({{"file", e.file}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  const json manifest{{"schema_version", kSchemaVersion},
                      {"command", command},
                      {"artifact_version", NOISEWALK_VERSION},
                      {"config_hash", sha256_hex(config.to_json().dump())},
                      {"master_seed", ctx.seed},
                      {"workers", options.workers},
                      {"started_at", started},
                      {"finished_at", utc_timestamp()},
                      {"formula_inputs", ctx.formula_inputs()},
                      {"outputs", outputs}};
  std::ofstream(options.out / "manifest.json") << manifest.dump(2) << "\n";
  log << "[" << command << "] wrote " << out.entries().size() << " files to " << options.out.string() << "\n";
  return kExitOk;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"exact-tv", "limit-laws", "separation", "entropy"};
  return names;
}

int run_command(const std::string& command, Config config, const RunOptions& options, std::ostream& log) {
  try {
    return run_checked(command, std::move(config), options, log);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CapExceededError& e) {
    log << "resource cap: " << e.what() << " (projected size " << e.projected() << ")\n";
    return kExitCap;
  } catch (const HypothesisError& e) {
    log << "hypothesis violation: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run_command(const std::string& command, const std::filesystem::path& config_path, const RunOptions& options,
                std::ostream& log) {
  Config config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return run_command(command, std::move(config), options, log);
}

}  // namespace noisewalk::app
