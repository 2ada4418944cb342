#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "msdlab/errors.hpp"
#include "msdlab/experiment.hpp"
#include "msdlab/version.hpp"

namespace {

struct Invocation {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t workers = 0;
  bool workers_set = false;
};

void add_common_options(CLI::App* sub, Invocation& inv) {
  // no ExistingFile check: a missing config must surface as the I/O exit
  // code, not a CLI11 parse error
  sub->add_option("-c,--config", inv.config_path, "JSON config file")->required();
  sub->add_option("-o,--out", inv.out_dir,
                  "output directory (default: the config's output.directory)");
  sub->add_option("--seed", inv.seed, "override the config seed")
      ->each([&](const std::string&) { inv.seed_set = true; });
  sub->add_option("--workers", inv.workers, "override the config worker count")
      ->each([&](const std::string&) { inv.workers_set = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"marginal supply-demand book laboratory"};
  app.set_version_flag("--version", std::string(msd::kToolName) + " " + msd::kVersion);
  app.require_subcommand(1);

  Invocation inv;
  using Command = void (*)(const msd::ExperimentConfig&, const std::string&);
  struct Entry {
    CLI::App* sub;
    Command run;
  };
  std::vector<Entry> entries;
  const auto add = [&](const char* name, const char* help, Command run) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common_options(sub, inv);
    entries.push_back({sub, run});
  };
  add("stationary", "stationary book profile and closed-form cross-check", msd::cmd_stationary);
  add("evolve", "advance the book by t and optionally compare the propagator solution",
      msd::cmd_evolve);
  add("auction-sweep", "auction cycles over a list of clearing intervals", msd::cmd_auction_sweep);
  add("wiener-hopf", "universal pre-auction book shape and cycle comparison",
      msd::cmd_wiener_hopf);
  add("agent-sim", "microscopic order-flow simulation", msd::cmd_agent_sim);
  add("ingest", "average book snapshots and fit the V shape", msd::cmd_ingest);
  add("impact", "impact curve and liquidity summary", msd::cmd_impact);

  CLI11_PARSE(app, argc, argv);

  try {
    msd::ExperimentConfig config = msd::load_config(inv.config_path);
    if (inv.seed_set) config.seed = inv.seed;
    if (inv.workers_set) config.workers = inv.workers;
    if (config.workers == 0) throw msd::ValidationError("workers must be >= 1");
    const std::string out_dir = inv.out_dir.empty() ? config.output.directory : inv.out_dir;
    for (const Entry& entry : entries) {
      if (entry.sub->parsed()) {
        entry.run(config, out_dir);
        return 0;
      }
    }
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const msd::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const msd::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const msd::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
