#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msdlab/evolution.hpp"
#include "msdlab/lob_ingest.hpp"
#include "msdlab/params.hpp"

namespace msd {

/// Config file sections. Every field has a default; unknown keys anywhere in
/// the file are rejected. The resolved (fully defaulted) config is written
/// beside the outputs of every run.
struct GridSection {
  double y_min = -4.0;
  double y_max = 4.0;
  std::size_t n = 800;
};

struct EvolutionSection {
  double dt = 1e-3;
  Scheme scheme = Scheme::crank_nicolson;
  Boundary boundary = Boundary::dirichlet_stationary;
  double t = 1.0;
  std::string initial = "stationary";  ///< zero | stationary | stationary_truncated | gaussian
  double gaussian_center = 0.0;
  double gaussian_width = 0.5;
  double gaussian_mass = 1.0;
  bool compare_green = false;
};

struct AuctionSection {
  double tau = 0.1;
  std::size_t n_auctions = 200;
  bool stop_on_cycle = true;
  double cycle_tol = 1e-7;
  std::vector<double> tau_list;      ///< sweep points (empty -> {tau})
  std::vector<double> q_factors;     ///< impact probes in units of L D tau
  double lambda_probe = 0.05;        ///< central-difference volume, units of L D tau
  double grid_points_per_width = 10; ///< dy = sqrt(D tau) / this
  double domain_half_width = 2.0;
};

struct WienerHopfSection {
  double u_max = 16.0;
  double du = 0.025;
  double tol = 1e-9;
  std::size_t max_iterations = 4000;
  std::vector<double> compare_tau_list;
};

struct AgentSimSection {
  double epsilon = 0.25;
  double dt = 0.01;
  double beta_variance = 0.0;
  double mood_variance = 0.0;
  double sigma_i_mean = 1.0;
  double sigma_i_stddev = 0.0;
  double horizon = 50.0;
  double deposit_half_width = 4.0;
  std::size_t n_paths = 128;
  std::size_t msd_sample_stride = 1;
  std::size_t msd_burn_in = 0;
};

struct IngestSection {
  std::string input;
  double bin_width = 0.05;
  double max_offset = 2.0;
  double window_lo = 0.05;
  double window_hi = 1.0;
  std::optional<SyntheticBookSpec> synthetic;
};

struct OutputSection {
  std::string directory = "out";
};

struct ExperimentConfig {
  ModelParams model;
  GridSection grid;
  EvolutionSection evolution;
  AuctionSection auction;
  WienerHopfSection wiener_hopf;
  AgentSimSection agent_sim;
  IngestSection ingest;
  OutputSection output;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// Parses and validates the JSON config file (strict: unknown keys rejected).
ExperimentConfig load_config(const std::string& path);

/// Serializes the fully resolved config.
std::string resolved_config_json(const ExperimentConfig& config);

PriceGrid make_grid(const GridSection& section);

/// Subcommand bodies; out_dir is created if missing and the resolved config
/// is written into it. All outputs are byte-stable for a fixed config.
void cmd_stationary(const ExperimentConfig& config, const std::string& out_dir);
void cmd_evolve(const ExperimentConfig& config, const std::string& out_dir);
void cmd_auction_sweep(const ExperimentConfig& config, const std::string& out_dir);
void cmd_wiener_hopf(const ExperimentConfig& config, const std::string& out_dir);
void cmd_agent_sim(const ExperimentConfig& config, const std::string& out_dir);
void cmd_ingest(const ExperimentConfig& config, const std::string& out_dir);
void cmd_impact(const ExperimentConfig& config, const std::string& out_dir);

}  // namespace msd
