#include "msdlab/agent_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msdlab/csv.hpp"
#include "msdlab/errors.hpp"
#include "msdlab/numerics.hpp"
#include "msdlab/rng.hpp"

namespace msd {

namespace {

struct Streams {
  Rng deposition;
  Rng cancellation;
  Rng revision;
  Rng news;
  Rng mood;

  explicit Streams(std::uint64_t seed)
      : deposition(seed, "deposition"),
        cancellation(seed, "cancellation"),
        revision(seed, "revision"),
        news(seed, "news"),
        mood(seed, "mood") {}
};

double rate_envelope(const RateFunction& rate, double half_width) {
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          return r.level;
        } else if constexpr (std::is_same_v<T, ExponentialPairRate>) {
          const double peak = std::exp(r.mu * half_width);
          return std::max(r.omega_plus, r.omega_minus) * peak;
        } else if constexpr (std::is_same_v<T, StepPairRate>) {
          return std::max(r.omega0_plus, r.omega0_minus);
        } else {
          double peak = 0.0;
          for (const double v : r.buy_values) peak = std::max(peak, v);
          for (const double v : r.sell_values) peak = std::max(peak, v);
          return peak;
        }
      },
      rate.spec());
}

double population_mean_beta(const Population& population) {
  if (population.empty()) return 1.0;
  double sum = 0.0;
  for (const Intention& p : population) sum += p.beta;
  return sum / static_cast<double>(population.size());
}

struct MatchResult {
  double y_star = 0.0;
  double volume = 0.0;
  bool crossed = false;
};

// Batch auction: highest buys against lowest sells, marginal pair filled
// fractionally, uniform price at the midpoint of the marginal matched pair.
MatchResult run_auction(Population& population, std::vector<Event>* events, double time) {
  std::vector<std::size_t> buys;
  std::vector<std::size_t> sells;
  for (std::size_t i = 0; i < population.size(); ++i) {
    (population[i].side == Side::buy ? buys : sells).push_back(i);
  }
  std::stable_sort(buys.begin(), buys.end(), [&](std::size_t a, std::size_t b) {
    return population[a].y > population[b].y;
  });
  std::stable_sort(sells.begin(), sells.end(), [&](std::size_t a, std::size_t b) {
    return population[a].y < population[b].y;
  });

  MatchResult result;
  std::size_t bi = 0;
  std::size_t si = 0;
  double last_buy_y = 0.0;
  double last_sell_y = 0.0;
  while (bi < buys.size() && si < sells.size()) {
    Intention& buy = population[buys[bi]];
    Intention& sell = population[sells[si]];
    if (buy.y < sell.y) break;
    const double fill = std::min(buy.volume, sell.volume);
    buy.volume -= fill;
    sell.volume -= fill;
    result.volume += fill;
    result.crossed = true;
    last_buy_y = buy.y;
    last_sell_y = sell.y;
    if (events != nullptr) {
      events->push_back(Event{time, EventType::match, Side::buy, buy.y, fill});
      events->push_back(Event{time, EventType::match, Side::sell, sell.y, fill});
    }
    if (buy.volume <= 0.0) ++bi;
    if (sell.volume <= 0.0) ++si;
  }
  if (result.crossed) {
    result.y_star = 0.5 * (last_buy_y + last_sell_y);
    population.erase(std::remove_if(population.begin(), population.end(),
                                    [](const Intention& p) { return p.volume <= 0.0; }),
                     population.end());
  }
  return result;
}

void validate_config(const SimConfig& config) {
  validate(config.params);
  if (!(config.epsilon > 0.0)) throw ValidationError("sim: epsilon must be > 0");
  if (!(config.dt > 0.0)) throw ValidationError("sim: dt must be > 0");
  if (config.beta_variance < 0.0 || config.mood_variance < 0.0) {
    throw ValidationError("sim: variances must be >= 0");
  }
  if (!(config.horizon >= 0.0)) throw ValidationError("sim: horizon must be >= 0");
  if (!(config.deposit_half_width > 0.0)) {
    throw ValidationError("sim: deposit_half_width must be > 0");
  }
  if (config.msd_sample_stride == 0) throw ValidationError("sim: msd_sample_stride must be >= 1");
  if (config.params.tau > 0.0) {
    const double steps = config.params.tau / config.dt;
    if (std::abs(steps - std::llround(steps)) > 1e-9) {
      throw ValidationError("sim: tau must be an integer multiple of dt");
    }
  }
}

}  // namespace

SimResult simulate(const SimConfig& config) {
  validate_config(config);
  Streams streams(config.seed);
  const double beta_sd = std::sqrt(config.beta_variance);
  const double mood_sd = std::sqrt(config.mood_variance);
  const double half_width = config.deposit_half_width;
  const double envelope = rate_envelope(config.params.omega, half_width);
  const double sqrt_dt = std::sqrt(config.dt);
  const auto n_steps = static_cast<std::size_t>(std::llround(config.horizon / config.dt));
  const std::size_t steps_per_auction =
      config.params.tau > 0.0
          ? static_cast<std::size_t>(std::llround(config.params.tau / config.dt))
          : 0;

  SimResult result;
  Population population;
  std::vector<Event>* events = config.record_events ? &result.events : nullptr;
  std::vector<double> msd_acc_s;
  std::vector<double> msd_acc_d;
  if (config.msd_grid) {
    msd_acc_s.assign(config.msd_grid->nodes(), 0.0);
    msd_acc_d.assign(config.msd_grid->nodes(), 0.0);
  }
  double p_fund = 0.0;
  double p_mkt = 0.0;
  if (config.record_price_path) {
    result.times.push_back(0.0);
    result.p_fund.push_back(0.0);
    result.p_mkt.push_back(0.0);
  }
  std::size_t auction_count = 0;

  for (std::size_t step = 1; step <= n_steps; ++step) {
    const double time = config.dt * static_cast<double>(step);

    // Deposition: inhomogeneous Poisson via thinning from a constant envelope.
    for (const Side side : {Side::buy, Side::sell}) {
      const double mean = envelope * 2.0 * half_width * config.dt / config.epsilon;
      const std::uint64_t proposals = streams.deposition.poisson(mean);
      for (std::uint64_t p = 0; p < proposals; ++p) {
        const double y = streams.deposition.uniform(-half_width, half_width);
        const double accept = streams.deposition.uniform();
        if (accept * envelope >= config.params.omega(side, y)) continue;
        Intention intent;
        intent.side = side;
        intent.y = y;
        intent.beta = 1.0 + beta_sd * streams.deposition.normal();
        intent.sigma_i = config.sigma_i.mean + config.sigma_i.stddev * streams.deposition.normal();
        intent.volume = config.epsilon;
        population.push_back(intent);
        if (events != nullptr) {
          events->push_back(Event{time, EventType::deposit, side, y, config.epsilon});
        }
      }
    }

    // Cancellation: exponential thinning at the local rate.
    for (std::size_t i = 0; i < population.size();) {
      const Intention& p = population[i];
      const double death = 1.0 - std::exp(-config.params.nu(p.side, p.y) * config.dt);
      if (streams.cancellation.uniform() < death) {
        if (events != nullptr) {
          events->push_back(Event{time, EventType::cancel, p.side, p.y, p.volume});
        }
        population[i] = population.back();
        population.pop_back();
      } else {
        ++i;
      }
    }

    // Revision: common news plus idiosyncratic noise; the market estimate
    // accrues the population-average reaction, so only relative sensitivity
    // moves the offsets and the mood shift cancels out of them.
    const double d_xi = config.params.sigma * sqrt_dt * streams.news.normal();
    const double mood = 1.0 + mood_sd * streams.mood.normal();
    const double mean_beta = population_mean_beta(population);
    for (Intention& p : population) {
      p.y += (p.beta - mean_beta) * d_xi + p.sigma_i * sqrt_dt * streams.revision.normal();
    }
    p_fund += d_xi;
    p_mkt += (mean_beta + (mood - 1.0)) * d_xi;
    if (config.record_price_path) {
      result.times.push_back(time);
      result.p_fund.push_back(p_fund);
      result.p_mkt.push_back(p_mkt);
    }

    if (steps_per_auction != 0 && step % steps_per_auction == 0) {
      ++auction_count;
      const bool sampled = config.msd_grid &&
                           auction_count > config.msd_burn_in_auctions &&
                           (auction_count - 1) % config.msd_sample_stride == 0;
      if (sampled) {
        const MsdCurve snapshot = empirical_msd(population, *config.msd_grid);
        for (std::size_t k = 0; k < msd_acc_s.size(); ++k) {
          msd_acc_s[k] += snapshot.rho_s[k];
          msd_acc_d[k] += snapshot.rho_d[k];
        }
        ++result.msd_samples;
      }
      const MatchResult match = run_auction(population, events, time);
      AuctionRecord record;
      record.index = auction_count - 1;
      record.time = time;
      record.y_star = match.y_star;
      record.v_star = match.volume;
      record.skipped = !match.crossed;
      result.auctions.push_back(record);
    }
  }

  if (config.msd_grid && result.msd_samples > 0) {
    const double norm = static_cast<double>(result.msd_samples);
    for (double& v : msd_acc_s) v /= norm;
    for (double& v : msd_acc_d) v /= norm;
    result.mean_pre_auction_msd =
        MsdCurve(*config.msd_grid, std::move(msd_acc_s), std::move(msd_acc_d));
  }
  result.final_population = std::move(population);
  return result;
}

MsdCurve empirical_msd(const Population& population, const PriceGrid& grid) {
  std::vector<double> rho_s(grid.nodes(), 0.0);
  std::vector<double> rho_d(grid.nodes(), 0.0);
  const double dy = grid.dy();
  for (const Intention& p : population) {
    const double offset = (p.y - grid.y_min()) / dy;
    const double shifted = std::floor(offset + 0.5);
    if (shifted < 0.0 || shifted > static_cast<double>(grid.cells())) continue;
    const auto k = static_cast<std::size_t>(shifted);
    (p.side == Side::sell ? rho_s : rho_d)[k] += p.volume / dy;
  }
  return MsdCurve(grid, std::move(rho_s), std::move(rho_d));
}

PathEnsembleStats price_paths(const SimConfig& config, std::size_t n_paths) {
  if (n_paths < 2) throw ValidationError("price paths: need at least 2 paths");
  std::vector<double> fund(n_paths);
  std::vector<double> err(n_paths);
  std::vector<double> mkt(n_paths);
  PathEnsembleStats stats;
  for (std::size_t j = 0; j < n_paths; ++j) {
    SimConfig path_config = config;
    path_config.seed = Rng::derive(config.seed, "path-" + std::to_string(j));
    path_config.record_events = false;
    path_config.record_price_path = true;
    path_config.msd_grid.reset();
    SimResult run = simulate(path_config);
    fund[j] = run.p_fund.back();
    mkt[j] = run.p_mkt.back();
    err[j] = mkt[j] - fund[j];
    if (j == 0) {
      stats.times = std::move(run.times);
      stats.p_fund = std::move(run.p_fund);
      stats.p_mkt = std::move(run.p_mkt);
    }
  }

  const auto variance = [](const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    return ss / (n - 1.0);
  };
  stats.var_fund = variance(fund);
  stats.var_err = variance(err);
  stats.var_mkt = variance(mkt);
  if (!(stats.var_fund > 0.0)) {
    throw NumericError("price paths: fundamental variance vanished; need sigma > 0");
  }
  stats.ratio_err = stats.var_err / stats.var_fund;
  stats.ratio_mkt = stats.var_mkt / stats.var_fund;
  stats.n_paths = n_paths;

  // Jackknife over paths for the two variance ratios.
  const auto jackknife = [&](const std::vector<double>& numerator, double full_ratio) {
    const std::size_t n = numerator.size();
    std::vector<double> loo(n);
    const auto loo_var = [&](const std::vector<double>& xs, std::size_t skip) {
      const double count = static_cast<double>(n - 1);
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i != skip) mean += xs[i];
      }
      mean /= count;
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i != skip) ss += (xs[i] - mean) * (xs[i] - mean);
      }
      return ss / (count - 1.0);
    };
    for (std::size_t i = 0; i < n; ++i) {
      const double denom = loo_var(fund, i);
      loo[i] = denom > 0.0 ? loo_var(numerator, i) / denom : full_ratio;
    }
    const double mean = std::accumulate(loo.begin(), loo.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (const double v : loo) ss += (v - mean) * (v - mean);
    return std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
  };
  stats.se_ratio_err = jackknife(err, stats.ratio_err);
  stats.se_ratio_mkt = jackknife(mkt, stats.ratio_mkt);
  return stats;
}

double consensus_price(std::span<const double> estimates, std::span<const double> weights) {
  if (estimates.size() != weights.size() || estimates.empty()) {
    throw ValidationError("consensus: need matching non-empty estimates and weights");
  }
  double total_weight = 0.0;
  double value = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw ValidationError("consensus: weights must be >= 0");
    total_weight += weights[i];
    value += weights[i] * estimates[i];
  }
  if (std::abs(total_weight - 1.0) > 1e-9) {
    throw ValidationError("consensus: weights must sum to 1");
  }
  return value;
}

double effective_diffusivity(double beta_variance, const DistributionSpec& sigma_i, double sigma) {
  const double second_moment = sigma_i.mean * sigma_i.mean + sigma_i.stddev * sigma_i.stddev;
  return 0.5 * (second_moment + sigma * sigma * beta_variance);
}

DiffusionMeasurement measure_offset_diffusion(const SimConfig& config, std::size_t n_agents,
                                              std::size_t n_replicas, double t_max) {
  validate_config(config);
  if (n_agents < 2 || n_replicas < 2) {
    throw ValidationError("diffusion measurement: need >= 2 agents and >= 2 replicas");
  }
  if (!(t_max > 0.0)) throw ValidationError("diffusion measurement: t_max must be > 0");
  const auto n_steps = static_cast<std::size_t>(std::llround(t_max / config.dt));
  const double sqrt_dt = std::sqrt(config.dt);
  const double beta_sd = std::sqrt(config.beta_variance);

  DiffusionMeasurement out;
  out.replica_estimates.reserve(n_replicas);
  for (std::size_t rep = 0; rep < n_replicas; ++rep) {
    const std::uint64_t seed = Rng::derive(config.seed, "diffusion-" + std::to_string(rep));
    Rng draw(seed, "deposition");
    Rng revision(seed, "revision");
    Rng news(seed, "news");
    std::vector<double> y(n_agents, 0.0);
    std::vector<double> beta(n_agents);
    std::vector<double> sigma_i(n_agents);
    double beta_sum = 0.0;
    for (std::size_t i = 0; i < n_agents; ++i) {
      beta[i] = 1.0 + beta_sd * draw.normal();
      sigma_i[i] = config.sigma_i.mean + config.sigma_i.stddev * draw.normal();
      beta_sum += beta[i];
    }
    const double mean_beta = beta_sum / static_cast<double>(n_agents);
    for (std::size_t step = 0; step < n_steps; ++step) {
      const double d_xi = config.params.sigma * sqrt_dt * news.normal();
      for (std::size_t i = 0; i < n_agents; ++i) {
        y[i] += (beta[i] - mean_beta) * d_xi + sigma_i[i] * sqrt_dt * revision.normal();
      }
    }
    double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n_agents);
    double ss = 0.0;
    for (const double v : y) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(n_agents - 1);
    out.replica_estimates.push_back(var / (2.0 * config.dt * static_cast<double>(n_steps)));
  }
  double mean = std::accumulate(out.replica_estimates.begin(), out.replica_estimates.end(), 0.0) /
                static_cast<double>(n_replicas);
  double ss = 0.0;
  for (const double v : out.replica_estimates) ss += (v - mean) * (v - mean);
  out.diffusivity = mean;
  out.stderr_mean =
      std::sqrt(ss / static_cast<double>(n_replicas - 1) / static_cast<double>(n_replicas));
  return out;
}

void write_events_csv(const std::vector<Event>& events, const std::string& path) {
  CsvWriter out(path, {"time", "event", "side", "y", "volume"});
  for (const Event& e : events) {
    const char* type = e.type == EventType::deposit ? "deposit"
                       : e.type == EventType::cancel ? "cancel"
                                                     : "match";
    out.row({format_double(e.time), type, e.side == Side::buy ? "buy" : "sell",
             format_double(e.y), format_double(e.volume)});
  }
}

void write_price_path_csv(const std::vector<double>& times, const std::vector<double>& p_fund,
                          const std::vector<double>& p_mkt, const std::string& path) {
  if (times.size() != p_fund.size() || times.size() != p_mkt.size()) {
    throw ValidationError("price path csv: series lengths differ");
  }
  CsvWriter out(path, {"time", "p_fund", "p_mkt"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.row_values({times[i], p_fund[i], p_mkt[i]});
  }
}

}  // namespace msd
