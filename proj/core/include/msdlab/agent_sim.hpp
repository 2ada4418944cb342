#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msdlab/curve.hpp"
#include "msdlab/params.hpp"

namespace msd {

/// One resting intention. y is the reservation price offset from the current
/// market price estimate; beta the quenched news sensitivity drawn at
/// deposition; sigma_i the idiosyncratic revision volatility; volume the
/// remaining unfilled size (epsilon at birth, smaller after a partial fill).
struct Intention {
  Side side = Side::buy;
  double y = 0.0;
  double beta = 1.0;
  double sigma_i = 0.0;
  double volume = 0.0;
};

using Population = std::vector<Intention>;

struct DistributionSpec {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Microscopic simulation parameters. The mechanisms and their named RNG
/// sub-streams:
///   deposition  - Poisson arrivals at intensity omega_side(y)/epsilon per
///                 unit price and time within |y| <= deposit_half_width;
///                 position, beta and sigma_i are drawn here
///   cancellation - each intention dies with probability 1 - e^{-nu(y) dt}
///   revision    - reservation prices move by beta_i dxi + sigma_i sqrt(dt) eta_i
///   news        - common innovation dxi = sigma sqrt(dt) eta
///   mood        - per-step common reaction shift: every live intention reacts
///                 with beta_i + (b_t - 1), b_t ~ N(1, mood_variance)
/// beta_variance is the cross-sectional (quenched) dispersion and feeds the
/// effective diffusivity; mood_variance drives the aggregate pricing error.
/// Quenched betas persisting across re-deposition of the same agent are a
/// documented extension point, not implemented.
struct SimConfig {
  ModelParams params;             ///< nu, omega, sigma (news volatility), tau
  double epsilon = 1.0;           ///< volume per intention
  double dt = 0.01;
  double beta_variance = 0.0;
  double mood_variance = 0.0;
  DistributionSpec sigma_i{1.0, 0.0};
  std::uint64_t seed = 0;
  double horizon = 10.0;
  double deposit_half_width = 4.0;
  bool record_events = true;
  bool record_price_path = true;
  std::size_t msd_sample_stride = 1;  ///< average the book every k-th auction
  std::size_t msd_burn_in_auctions = 0;  ///< auctions skipped before averaging
  std::optional<PriceGrid> msd_grid;
};

enum class EventType { deposit, cancel, match };

struct Event {
  double time = 0.0;
  EventType type = EventType::deposit;
  Side side = Side::buy;
  double y = 0.0;
  double volume = 0.0;
};

struct AuctionRecord {
  std::size_t index = 0;
  double time = 0.0;
  double y_star = 0.0;
  double v_star = 0.0;
  bool skipped = false;  ///< a side was empty or nothing crossed
};

struct SimResult {
  std::vector<Event> events;
  std::vector<AuctionRecord> auctions;
  std::optional<MsdCurve> mean_pre_auction_msd;
  std::size_t msd_samples = 0;
  std::vector<double> times;   ///< price path sample times
  std::vector<double> p_fund;
  std::vector<double> p_mkt;
  Population final_population;
};

/// Runs deposition / cancellation / revision with a batch auction every
/// params.tau (highest buyers against lowest sellers, marginal intention
/// filled fractionally, matched volume removed). Deterministic for a given
/// seed.
SimResult simulate(const SimConfig& config);

/// Histogram of the population on node-centered bins of width grid.dy(),
/// scaled to volume per unit price. Intentions outside the grid are dropped.
MsdCurve empirical_msd(const Population& population, const PriceGrid& grid);

struct PathEnsembleStats {
  double var_fund = 0.0;        ///< Var(p^F_T) across paths
  double var_err = 0.0;         ///< Var(p_mkt - p^F at T)
  double var_mkt = 0.0;         ///< Var(p_mkt at T)
  double ratio_err = 0.0;       ///< var_err / var_fund
  double ratio_mkt = 0.0;       ///< var_mkt / var_fund
  double se_ratio_err = 0.0;    ///< jackknife standard errors
  double se_ratio_mkt = 0.0;
  std::size_t n_paths = 0;
  std::vector<double> times;    ///< representative path (first seed)
  std::vector<double> p_fund;
  std::vector<double> p_mkt;
};

/// Ensemble of independent paths of (fundamental, market) prices where the
/// market price accrues E_i[beta] dxi per step, the expectation running over
/// the live population (an empty book falls back to the baseline sensitivity
/// 1; the mood shift applies either way). Ratios follow Var(p_mkt - p_fund)/Var(p_fund) =
/// mood_variance and Var(p_mkt)/Var(p_fund) = 1 + mood_variance; both exact
/// when the variance knobs are zero.
PathEnsembleStats price_paths(const SimConfig& config, std::size_t n_paths);

/// Volume-weighted consensus of agent estimates; weights must be non-negative
/// and sum to 1 within 1e-9. A dxi shift of estimate i moves the consensus by
/// weight_i * dxi.
double consensus_price(std::span<const double> estimates, std::span<const double> weights);

/// D = (E[sigma_i^2] + sigma^2 Var(beta)) / 2 with E[sigma_i^2] = mean^2 +
/// stddev^2.
double effective_diffusivity(double beta_variance, const DistributionSpec& sigma_i, double sigma);

struct DiffusionMeasurement {
  double diffusivity = 0.0;   ///< mean of the per-replica estimates
  double stderr_mean = 0.0;   ///< s.e. of that mean across replicas
  std::vector<double> replica_estimates;
};

/// Measures the diffusivity of reservation-price offsets directly: n_agents
/// intentions start at y = 0 with beta and sigma_i drawn as in simulate, are
/// revised (no deposition, cancellation or auctions) for t_max, and each
/// replica reports Var_i(y_i) / (2 t_max). The mean converges to
/// effective_diffusivity as n_agents grows.
DiffusionMeasurement measure_offset_diffusion(const SimConfig& config, std::size_t n_agents,
                                              std::size_t n_replicas, double t_max);

/// Writes `time,event,side,y,volume` rows.
void write_events_csv(const std::vector<Event>& events, const std::string& path);

/// Writes `time,p_fund,p_mkt` rows.
void write_price_path_csv(const std::vector<double>& times, const std::vector<double>& p_fund,
                          const std::vector<double>& p_mkt, const std::string& path);

}  // namespace msd
