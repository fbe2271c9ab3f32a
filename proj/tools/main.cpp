#include <iostream>

#include <CLI11.hpp>

#include "app/commands.hpp"

int main(int argc, char** argv) {
  using namespace noisewalk::app;
  CLI::App cli{"Noisy random-walk couplings on free and hyperbolic groups"};
  cli.require_subcommand(1);
  cli.set_version_flag("--version", NOISEWALK_VERSION);

  std::string config;
  std::uint64_t seed = 0;
  RunOptions options;
  const char* help[] = {"exact TV and U^s between coupled and independent pair laws",
                        "escape rate, CLT, LIL windows, joint ellipse and marginal gap",
                        "Monte Carlo lower bound on U^{alpha n} with exact cross-checks",
                        "entropy of the coupled walk with 1/n extrapolation"};
  std::size_t k = 0;
  for (const auto& name : command_names()) {
    auto* sub = cli.add_subcommand(name, help[k++]);
    sub->add_option("--config", config, "YAML experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", options.workers, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--out", options.out, "output directory");
    sub->add_flag("--strict", options.strict, "fail on hypothesis violations");
  }
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  auto* sub = cli.get_subcommands().front();
  if (sub->count("--seed")) options.seed = seed;
  return run_command(sub->get_name(), config, options, std::cerr);
}
