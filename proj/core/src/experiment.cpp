#include "msdlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "msdlab/agent_sim.hpp"
#include "msdlab/analytics.hpp"
#include "msdlab/auction.hpp"
#include "msdlab/csv.hpp"
#include "msdlab/errors.hpp"
#include "msdlab/wiener_hopf.hpp"

namespace msd {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

void check_keys(const ojson& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError("config: " + where + " must be an object");
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) {
      throw ValidationError("config: unknown key '" + item.key() + "' in " + where);
    }
  }
}

double get_number(const ojson& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const ojson& v = j.at(key);
  if (!v.is_number()) throw ValidationError(std::string("config: ") + key + " must be a number");
  return v.get<double>();
}

std::size_t get_count(const ojson& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const ojson& v = j.at(key);
  if (!v.is_number_unsigned()) {
    throw ValidationError(std::string("config: ") + key + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

bool get_flag(const ojson& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const ojson& v = j.at(key);
  if (!v.is_boolean()) throw ValidationError(std::string("config: ") + key + " must be a boolean");
  return v.get<bool>();
}

std::string get_string(const ojson& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const ojson& v = j.at(key);
  if (!v.is_string()) throw ValidationError(std::string("config: ") + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> get_number_list(const ojson& j, const char* key,
                                    const std::vector<double>& fallback) {
  if (!j.contains(key)) return fallback;
  const ojson& v = j.at(key);
  if (!v.is_array()) throw ValidationError(std::string("config: ") + key + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const ojson& item : v) {
    if (!item.is_number()) {
      throw ValidationError(std::string("config: ") + key + " must contain only numbers");
    }
    out.push_back(item.get<double>());
  }
  return out;
}

RateFunction parse_rate(const ojson& j, const std::string& where) {
  if (!j.is_object() || !j.contains("type")) {
    throw ValidationError("config: " + where + " must be an object with a 'type'");
  }
  const std::string type = get_string(j, "type", "");
  if (type == "constant") {
    check_keys(j, where, {"type", "level"});
    return RateFunction::constant(get_number(j, "level", 0.0));
  }
  if (type == "exponential_pair") {
    check_keys(j, where, {"type", "omega_plus", "omega_minus", "mu"});
    return RateFunction::exponential_pair(get_number(j, "omega_plus", 0.0),
                                          get_number(j, "omega_minus", 0.0),
                                          get_number(j, "mu", 0.0));
  }
  if (type == "step_pair") {
    check_keys(j, where, {"type", "omega0_plus", "omega0_minus"});
    return RateFunction::step_pair(get_number(j, "omega0_plus", 0.0),
                                   get_number(j, "omega0_minus", 0.0));
  }
  if (type == "tabulated") {
    check_keys(j, where, {"type", "y", "buy_values", "sell_values"});
    return RateFunction::tabulated(get_number_list(j, "y", {}),
                                   get_number_list(j, "buy_values", {}),
                                   get_number_list(j, "sell_values", {}));
  }
  throw ValidationError("config: " + where + " has unknown type '" + type + "'");
}

ojson rate_to_json(const RateFunction& rate) {
  return std::visit(
      [](const auto& r) -> ojson {
        using T = std::decay_t<decltype(r)>;
        ojson out;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          out["type"] = "constant";
          out["level"] = r.level;
        } else if constexpr (std::is_same_v<T, ExponentialPairRate>) {
          out["type"] = "exponential_pair";
          out["omega_plus"] = r.omega_plus;
          out["omega_minus"] = r.omega_minus;
          out["mu"] = r.mu;
        } else if constexpr (std::is_same_v<T, StepPairRate>) {
          out["type"] = "step_pair";
          out["omega0_plus"] = r.omega0_plus;
          out["omega0_minus"] = r.omega0_minus;
        } else {
          out["type"] = "tabulated";
          out["y"] = r.y;
          out["buy_values"] = r.buy_values;
          out["sell_values"] = r.sell_values;
        }
        return out;
      },
      rate.spec());
}

Scheme parse_scheme(const std::string& name) {
  if (name == "explicit_euler") return Scheme::explicit_euler;
  if (name == "crank_nicolson") return Scheme::crank_nicolson;
  throw ValidationError("config: unknown scheme '" + name + "'");
}

const char* scheme_name(Scheme scheme) {
  return scheme == Scheme::explicit_euler ? "explicit_euler" : "crank_nicolson";
}

Boundary parse_boundary(const std::string& name) {
  if (name == "dirichlet_stationary") return Boundary::dirichlet_stationary;
  if (name == "dirichlet_hold") return Boundary::dirichlet_hold;
  if (name == "zero_flux") return Boundary::zero_flux;
  throw ValidationError("config: unknown boundary '" + name + "'");
}

const char* boundary_name(Boundary boundary) {
  switch (boundary) {
    case Boundary::dirichlet_stationary: return "dirichlet_stationary";
    case Boundary::dirichlet_hold: return "dirichlet_hold";
    default: return "zero_flux";
  }
}

fs::path prepare_out(const ExperimentConfig& config, const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const fs::path config_path = dir / "config.json";
  std::ofstream out(config_path);
  if (!out) throw IoError("cannot write " + config_path.string());
  out << resolved_config_json(config);
  if (!out) throw IoError("failed writing " + config_path.string());
  return dir;
}

EvolutionConfig evolution_config(const ExperimentConfig& config) {
  return EvolutionConfig{config.evolution.dt, config.evolution.scheme,
                         config.evolution.boundary};
}

bool has_constant_positive_nu(const ModelParams& params) {
  const std::optional<double> level = params.nu.constant_level();
  return level.has_value() && *level > 0.0;
}

MsdCurve stationary_curve(const PriceGrid& grid, const ExperimentConfig& config) {
  if (has_constant_positive_nu(config.model)) {
    return stationary_closed_form(grid, config.model);
  }
  EvolutionConfig ev = evolution_config(config);
  if (ev.boundary == Boundary::dirichlet_hold) ev.boundary = Boundary::zero_flux;
  return stationary_numeric(grid, config.model, ev);
}

MsdCurve initial_curve(const PriceGrid& grid, const ExperimentConfig& config) {
  const std::string& kind = config.evolution.initial;
  if (kind == "zero") return MsdCurve::zero(grid);
  if (kind == "stationary") return stationary_curve(grid, config);
  if (kind == "stationary_truncated") {
    const MsdCurve st = stationary_curve(grid, config);
    return truncate(st, clear(st).y_star);
  }
  if (kind == "gaussian") {
    const double width = config.evolution.gaussian_width;
    const double center = config.evolution.gaussian_center;
    const double mass = config.evolution.gaussian_mass;
    if (!(width > 0.0)) throw ValidationError("config: gaussian_width must be > 0");
    std::vector<double> rho(grid.nodes());
    const double norm = mass / (width * std::sqrt(2.0 * 3.14159265358979323846));
    for (std::size_t k = 0; k < grid.nodes(); ++k) {
      const double z = (grid.node(k) - center) / width;
      rho[k] = norm * std::exp(-0.5 * z * z);
    }
    return MsdCurve(grid, rho, rho);
  }
  throw ValidationError("config: unknown initial state '" + kind + "'");
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t stop = std::min(e.byte, text.size());
    const long line = 1 + static_cast<long>(std::count(text.begin(), text.begin() + stop, '\n'));
    throw ParseError(std::string("config: ") + e.what(), line);
  }
  check_keys(j, "config",
             {"model", "grid", "evolution", "auction", "wiener_hopf", "agent_sim", "ingest",
              "output", "seed", "workers"});

  ExperimentConfig cfg;
  if (j.contains("model")) {
    const ojson& m = j.at("model");
    check_keys(m, "model", {"diffusivity", "nu", "omega", "tau", "sigma"});
    cfg.model.diffusivity = get_number(m, "diffusivity", cfg.model.diffusivity);
    if (m.contains("nu")) cfg.model.nu = parse_rate(m.at("nu"), "model.nu");
    if (m.contains("omega")) cfg.model.omega = parse_rate(m.at("omega"), "model.omega");
    cfg.model.tau = get_number(m, "tau", cfg.model.tau);
    cfg.model.sigma = get_number(m, "sigma", cfg.model.sigma);
  }
  if (j.contains("grid")) {
    const ojson& g = j.at("grid");
    check_keys(g, "grid", {"y_min", "y_max", "n"});
    cfg.grid.y_min = get_number(g, "y_min", cfg.grid.y_min);
    cfg.grid.y_max = get_number(g, "y_max", cfg.grid.y_max);
    cfg.grid.n = get_count(g, "n", cfg.grid.n);
  }
  if (j.contains("evolution")) {
    const ojson& e = j.at("evolution");
    check_keys(e, "evolution",
               {"dt", "scheme", "boundary", "t", "initial", "gaussian_center", "gaussian_width",
                "gaussian_mass", "compare_green"});
    cfg.evolution.dt = get_number(e, "dt", cfg.evolution.dt);
    cfg.evolution.scheme = parse_scheme(get_string(e, "scheme", scheme_name(cfg.evolution.scheme)));
    cfg.evolution.boundary =
        parse_boundary(get_string(e, "boundary", boundary_name(cfg.evolution.boundary)));
    cfg.evolution.t = get_number(e, "t", cfg.evolution.t);
    cfg.evolution.initial = get_string(e, "initial", cfg.evolution.initial);
    cfg.evolution.gaussian_center = get_number(e, "gaussian_center", cfg.evolution.gaussian_center);
    cfg.evolution.gaussian_width = get_number(e, "gaussian_width", cfg.evolution.gaussian_width);
    cfg.evolution.gaussian_mass = get_number(e, "gaussian_mass", cfg.evolution.gaussian_mass);
    cfg.evolution.compare_green = get_flag(e, "compare_green", cfg.evolution.compare_green);
  }
  if (j.contains("auction")) {
    const ojson& a = j.at("auction");
    check_keys(a, "auction",
               {"tau", "n_auctions", "stop_on_cycle", "cycle_tol", "tau_list", "q_factors",
                "lambda_probe", "grid_points_per_width", "domain_half_width"});
    cfg.auction.tau = get_number(a, "tau", cfg.auction.tau);
    cfg.auction.n_auctions = get_count(a, "n_auctions", cfg.auction.n_auctions);
    cfg.auction.stop_on_cycle = get_flag(a, "stop_on_cycle", cfg.auction.stop_on_cycle);
    cfg.auction.cycle_tol = get_number(a, "cycle_tol", cfg.auction.cycle_tol);
    cfg.auction.tau_list = get_number_list(a, "tau_list", cfg.auction.tau_list);
    cfg.auction.q_factors = get_number_list(a, "q_factors", cfg.auction.q_factors);
    cfg.auction.lambda_probe = get_number(a, "lambda_probe", cfg.auction.lambda_probe);
    cfg.auction.grid_points_per_width =
        get_number(a, "grid_points_per_width", cfg.auction.grid_points_per_width);
    cfg.auction.domain_half_width =
        get_number(a, "domain_half_width", cfg.auction.domain_half_width);
  }
  if (j.contains("wiener_hopf")) {
    const ojson& w = j.at("wiener_hopf");
    check_keys(w, "wiener_hopf", {"u_max", "du", "tol", "max_iterations", "compare_tau_list"});
    cfg.wiener_hopf.u_max = get_number(w, "u_max", cfg.wiener_hopf.u_max);
    cfg.wiener_hopf.du = get_number(w, "du", cfg.wiener_hopf.du);
    cfg.wiener_hopf.tol = get_number(w, "tol", cfg.wiener_hopf.tol);
    cfg.wiener_hopf.max_iterations =
        get_count(w, "max_iterations", cfg.wiener_hopf.max_iterations);
    cfg.wiener_hopf.compare_tau_list =
        get_number_list(w, "compare_tau_list", cfg.wiener_hopf.compare_tau_list);
  }
  if (j.contains("agent_sim")) {
    const ojson& s = j.at("agent_sim");
    check_keys(s, "agent_sim",
               {"epsilon", "dt", "beta_variance", "mood_variance", "sigma_i_mean",
                "sigma_i_stddev", "horizon", "deposit_half_width", "n_paths",
                "msd_sample_stride", "msd_burn_in"});
    cfg.agent_sim.epsilon = get_number(s, "epsilon", cfg.agent_sim.epsilon);
    cfg.agent_sim.dt = get_number(s, "dt", cfg.agent_sim.dt);
    cfg.agent_sim.beta_variance = get_number(s, "beta_variance", cfg.agent_sim.beta_variance);
    cfg.agent_sim.mood_variance = get_number(s, "mood_variance", cfg.agent_sim.mood_variance);
    cfg.agent_sim.sigma_i_mean = get_number(s, "sigma_i_mean", cfg.agent_sim.sigma_i_mean);
    cfg.agent_sim.sigma_i_stddev = get_number(s, "sigma_i_stddev", cfg.agent_sim.sigma_i_stddev);
    cfg.agent_sim.horizon = get_number(s, "horizon", cfg.agent_sim.horizon);
    cfg.agent_sim.deposit_half_width =
        get_number(s, "deposit_half_width", cfg.agent_sim.deposit_half_width);
    cfg.agent_sim.n_paths = get_count(s, "n_paths", cfg.agent_sim.n_paths);
    cfg.agent_sim.msd_sample_stride =
        get_count(s, "msd_sample_stride", cfg.agent_sim.msd_sample_stride);
    cfg.agent_sim.msd_burn_in = get_count(s, "msd_burn_in", cfg.agent_sim.msd_burn_in);
  }
  if (j.contains("ingest")) {
    const ojson& g = j.at("ingest");
    check_keys(g, "ingest",
               {"input", "bin_width", "max_offset", "window_lo", "window_hi", "synthetic"});
    cfg.ingest.input = get_string(g, "input", cfg.ingest.input);
    cfg.ingest.bin_width = get_number(g, "bin_width", cfg.ingest.bin_width);
    cfg.ingest.max_offset = get_number(g, "max_offset", cfg.ingest.max_offset);
    cfg.ingest.window_lo = get_number(g, "window_lo", cfg.ingest.window_lo);
    cfg.ingest.window_hi = get_number(g, "window_hi", cfg.ingest.window_hi);
    if (g.contains("synthetic")) {
      const ojson& y = g.at("synthetic");
      check_keys(y, "ingest.synthetic",
                 {"liquidity", "y0", "saturation", "noise", "mid", "tick", "depth",
                  "n_snapshots", "seed"});
      SyntheticBookSpec spec;
      spec.liquidity = get_number(y, "liquidity", spec.liquidity);
      spec.y0 = get_number(y, "y0", spec.y0);
      spec.saturation = get_number(y, "saturation", spec.saturation);
      spec.noise = get_number(y, "noise", spec.noise);
      spec.mid = get_number(y, "mid", spec.mid);
      spec.tick = get_number(y, "tick", spec.tick);
      spec.depth = get_number(y, "depth", spec.depth);
      spec.n_snapshots = get_count(y, "n_snapshots", spec.n_snapshots);
      spec.seed = get_count(y, "seed", spec.seed);
      cfg.ingest.synthetic = spec;
    }
  }
  if (j.contains("output")) {
    const ojson& o = j.at("output");
    check_keys(o, "output", {"directory"});
    cfg.output.directory = get_string(o, "directory", cfg.output.directory);
  }
  if (j.contains("seed")) {
    const ojson& v = j.at("seed");
    if (!v.is_number_unsigned()) {
      throw ValidationError("config: seed must be a non-negative integer");
    }
    cfg.seed = v.get<std::uint64_t>();
  }
  cfg.workers = get_count(j, "workers", cfg.workers);
  if (cfg.workers == 0) throw ValidationError("config: workers must be >= 1");
  return cfg;
}

std::string resolved_config_json(const ExperimentConfig& config) {
  ojson j;
  j["model"]["diffusivity"] = config.model.diffusivity;
  j["model"]["nu"] = rate_to_json(config.model.nu);
  j["model"]["omega"] = rate_to_json(config.model.omega);
  j["model"]["tau"] = config.model.tau;
  j["model"]["sigma"] = config.model.sigma;
  j["grid"]["y_min"] = config.grid.y_min;
  j["grid"]["y_max"] = config.grid.y_max;
  j["grid"]["n"] = config.grid.n;
  j["evolution"]["dt"] = config.evolution.dt;
  j["evolution"]["scheme"] = scheme_name(config.evolution.scheme);
  j["evolution"]["boundary"] = boundary_name(config.evolution.boundary);
  j["evolution"]["t"] = config.evolution.t;
  j["evolution"]["initial"] = config.evolution.initial;
  j["evolution"]["gaussian_center"] = config.evolution.gaussian_center;
  j["evolution"]["gaussian_width"] = config.evolution.gaussian_width;
  j["evolution"]["gaussian_mass"] = config.evolution.gaussian_mass;
  j["evolution"]["compare_green"] = config.evolution.compare_green;
  j["auction"]["tau"] = config.auction.tau;
  j["auction"]["n_auctions"] = config.auction.n_auctions;
  j["auction"]["stop_on_cycle"] = config.auction.stop_on_cycle;
  j["auction"]["cycle_tol"] = config.auction.cycle_tol;
  j["auction"]["tau_list"] = config.auction.tau_list;
  j["auction"]["q_factors"] = config.auction.q_factors;
  j["auction"]["lambda_probe"] = config.auction.lambda_probe;
  j["auction"]["grid_points_per_width"] = config.auction.grid_points_per_width;
  j["auction"]["domain_half_width"] = config.auction.domain_half_width;
  j["wiener_hopf"]["u_max"] = config.wiener_hopf.u_max;
  j["wiener_hopf"]["du"] = config.wiener_hopf.du;
  j["wiener_hopf"]["tol"] = config.wiener_hopf.tol;
  j["wiener_hopf"]["max_iterations"] = config.wiener_hopf.max_iterations;
  j["wiener_hopf"]["compare_tau_list"] = config.wiener_hopf.compare_tau_list;
  j["agent_sim"]["epsilon"] = config.agent_sim.epsilon;
  j["agent_sim"]["dt"] = config.agent_sim.dt;
  j["agent_sim"]["beta_variance"] = config.agent_sim.beta_variance;
  j["agent_sim"]["mood_variance"] = config.agent_sim.mood_variance;
  j["agent_sim"]["sigma_i_mean"] = config.agent_sim.sigma_i_mean;
  j["agent_sim"]["sigma_i_stddev"] = config.agent_sim.sigma_i_stddev;
  j["agent_sim"]["horizon"] = config.agent_sim.horizon;
  j["agent_sim"]["deposit_half_width"] = config.agent_sim.deposit_half_width;
  j["agent_sim"]["n_paths"] = config.agent_sim.n_paths;
  j["agent_sim"]["msd_sample_stride"] = config.agent_sim.msd_sample_stride;
  j["agent_sim"]["msd_burn_in"] = config.agent_sim.msd_burn_in;
  j["ingest"]["input"] = config.ingest.input;
  j["ingest"]["bin_width"] = config.ingest.bin_width;
  j["ingest"]["max_offset"] = config.ingest.max_offset;
  j["ingest"]["window_lo"] = config.ingest.window_lo;
  j["ingest"]["window_hi"] = config.ingest.window_hi;
  if (config.ingest.synthetic) {
    const SyntheticBookSpec& s = *config.ingest.synthetic;
    ojson y;
    y["liquidity"] = s.liquidity;
    y["y0"] = s.y0;
    y["saturation"] = s.saturation;
    y["noise"] = s.noise;
    y["mid"] = s.mid;
    y["tick"] = s.tick;
    y["depth"] = s.depth;
    y["n_snapshots"] = s.n_snapshots;
    y["seed"] = s.seed;
    j["ingest"]["synthetic"] = y;
  }
  j["output"]["directory"] = config.output.directory;
  j["seed"] = config.seed;
  j["workers"] = config.workers;
  return j.dump(2) + "\n";
}

PriceGrid make_grid(const GridSection& section) {
  return PriceGrid(section.y_min, section.y_max, section.n);
}

void cmd_stationary(const ExperimentConfig& config, const std::string& out_dir) {
  const fs::path dir = prepare_out(config, out_dir);
  validate(config.model);
  const PriceGrid grid = make_grid(config.grid);
  EvolutionConfig ev = evolution_config(config);
  if (ev.boundary == Boundary::dirichlet_hold) ev.boundary = Boundary::zero_flux;
  const MsdCurve numeric = stationary_numeric(grid, config.model, ev);
  write_curve_csv(numeric, (dir / "stationary.csv").string());

  std::vector<std::pair<std::string, std::string>> items;
  items.emplace_back("scheme", scheme_name(ev.scheme));
  items.emplace_back("boundary", boundary_name(ev.boundary));
  items.emplace_back("total_supply", format_double(numeric.total_supply()));
  items.emplace_back("total_demand", format_double(numeric.total_demand()));
  if (has_constant_positive_nu(config.model)) {
    const MsdCurve closed = stationary_closed_form(grid, config.model);
    write_curve_csv(closed, (dir / "stationary_closed_form.csv").string());
    items.emplace_back("rel_linf_numeric_vs_closed",
                       format_double(relative_linf_distance(numeric, closed)));
    items.emplace_back("kyle_lambda", format_double(kyle_lambda(config.model)));
    items.emplace_back("liquidity", format_double(liquidity_L(config.model)));
  }
  write_key_values((dir / "summary.txt").string(), items);
}

void cmd_evolve(const ExperimentConfig& config, const std::string& out_dir) {
  const fs::path dir = prepare_out(config, out_dir);
  validate(config.model);
  const PriceGrid grid = make_grid(config.grid);
  const MsdCurve initial = initial_curve(grid, config);
  write_curve_csv(initial, (dir / "initial.csv").string());
  const EvolutionConfig ev = evolution_config(config);
  EvolveStats stats;
  const MsdCurve evolved = evolve(initial, config.model, ev, config.evolution.t, &stats);
  write_curve_csv(evolved, (dir / "evolved.csv").string());

  std::vector<std::pair<std::string, std::string>> items;
  items.emplace_back("t", format_double(config.evolution.t));
  items.emplace_back("steps", std::to_string(stats.steps));
  items.emplace_back("clamped_mass", format_double(stats.clamped_mass));
  items.emplace_back("total_supply", format_double(evolved.total_supply()));
  items.emplace_back("total_demand", format_double(evolved.total_demand()));
  if (config.evolution.compare_green) {
    const MsdCurve green = evolve_green(initial, config.model, config.evolution.t);
    write_curve_csv(green, (dir / "evolved_green.csv").string());
    items.emplace_back("rel_linf_numeric_vs_green",
                       format_double(relative_linf_distance(evolved, green)));
  }
  write_key_values((dir / "summary.txt").string(), items);
}

void cmd_auction_sweep(const ExperimentConfig& config, const std::string& out_dir) {
  const fs::path dir = prepare_out(config, out_dir);
  validate(config.model);
  std::vector<double> taus = config.auction.tau_list;
  if (taus.empty()) taus.push_back(config.auction.tau);
  const double liquidity = liquidity_L(config.model);
  const double diffusivity = config.model.diffusivity;

  CsvWriter summary((dir / "sweep_summary.csv").string(),
                    {"tau", "n_auctions", "converged_at", "v_star", "v_star_over_LDtau",
                     "lambda_measured", "lambda_cycle"});
  std::vector<std::vector<std::string>> probe_rows;
  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    const double tau = taus[ti];
    if (!(tau > 0.0)) throw ValidationError("config: auction tau values must be > 0");
    const double width = std::sqrt(diffusivity * tau);
    const double dy = width / config.auction.grid_points_per_width;
    const double half = config.auction.domain_half_width;
    const auto half_cells = static_cast<std::size_t>(std::ceil(half / dy));
    const PriceGrid grid(-dy * static_cast<double>(half_cells),
                         dy * static_cast<double>(half_cells), 2 * half_cells);
    ModelParams params = config.model;
    params.tau = tau;
    const MsdCurve initial = absorbing_stationary_curve(grid, params);
    EvolutionConfig ev;
    ev.dt = tau / 50.0;
    ev.scheme = Scheme::crank_nicolson;
    ev.boundary = Boundary::dirichlet_hold;
    SequenceOptions options;
    options.stop_on_cycle = config.auction.stop_on_cycle;
    options.cycle_tol = config.auction.cycle_tol;
    const AuctionSeries series =
        run_auction_sequence(initial, params, ev, config.auction.n_auctions, options);
    write_auction_series_csv(series,
                             (dir / ("auctions_tau" + std::to_string(ti) + ".csv")).string());

    const double v_ref = liquidity * diffusivity * tau;
    const AuctionOutcome base = clear(series.final_pre_curve);
    const double q_probe = config.auction.lambda_probe * v_ref;
    const double up = clear_with_extra(series.final_pre_curve, q_probe).y_star;
    const double down = clear_with_extra(series.final_pre_curve, -q_probe).y_star;
    const double lambda_measured = (up - down) / (2.0 * q_probe);
    const LiquidityReport cycle = cycle_liquidity_report(params, tau);
    summary.row({format_double(tau), std::to_string(series.outcomes.size()),
                 series.converged_at ? std::to_string(*series.converged_at) : "-1",
                 format_double(base.v_star), format_double(base.v_star / v_ref),
                 format_double(lambda_measured), format_double(cycle.lambda)});

    for (const double factor : config.auction.q_factors) {
      const double volume = factor * v_ref;
      const double moved = clear_with_extra(series.final_pre_curve, volume).y_star;
      const double predicted = impact_full(volume, liquidity, diffusivity, tau);
      probe_rows.push_back({format_double(tau), format_double(factor), format_double(volume),
                            format_double(moved - base.y_star), format_double(predicted)});
    }
  }
  if (!probe_rows.empty()) {
    CsvWriter probes((dir / "impact_probes.csv").string(),
                     {"tau", "q_factor", "volume", "measured", "predicted"});
    for (const auto& row : probe_rows) probes.row(row);
  }
}

void cmd_wiener_hopf(const ExperimentConfig& config, const std::string& out_dir) {
  const fs::path dir = prepare_out(config, out_dir);
  FixedPointOptions options;
  options.u_max = config.wiener_hopf.u_max;
  options.du = config.wiener_hopf.du;
  options.tol = config.wiener_hopf.tol;
  options.max_iterations = config.wiener_hopf.max_iterations;
  const PhiSolution solution = solve_fixed_point(options);
  write_phi_csv(solution, (dir / "phi.csv").string(), (dir / "phi_meta.txt").string());
  if (!config.wiener_hopf.compare_tau_list.empty()) {
    validate(config.model);
    const std::vector<CycleComparison> rows = compare_with_auction_sequence(
        config.model, config.wiener_hopf.compare_tau_list, solution);
    CsvWriter out((dir / "cycle_comparison.csv").string(), {"tau", "deviation"});
    for (const CycleComparison& row : rows) {
      out.row_values({row.tau, row.deviation});
    }
  }
}

void cmd_agent_sim(const ExperimentConfig& config, const std::string& out_dir) {
  const fs::path dir = prepare_out(config, out_dir);
  SimConfig sim;
  sim.params = config.model;
  sim.epsilon = config.agent_sim.epsilon;
  sim.dt = config.agent_sim.dt;
  sim.beta_variance = config.agent_sim.beta_variance;
  sim.mood_variance = config.agent_sim.mood_variance;
  sim.sigma_i = DistributionSpec{config.agent_sim.sigma_i_mean, config.agent_sim.sigma_i_stddev};
  sim.seed = config.seed;
  sim.horizon = config.agent_sim.horizon;
  sim.deposit_half_width = config.agent_sim.deposit_half_width;
  sim.record_events = true;
  sim.record_price_path = true;
  sim.msd_sample_stride = config.agent_sim.msd_sample_stride;
  sim.msd_burn_in_auctions = config.agent_sim.msd_burn_in;
  sim.msd_grid = make_grid(config.grid);
  const SimResult result = simulate(sim);
  write_events_csv(result.events, (dir / "events.csv").string());
  write_price_path_csv(result.times, result.p_fund, result.p_mkt,
                       (dir / "price_path.csv").string());
  {
    CsvWriter out((dir / "auctions.csv").string(),
                  {"auction_index", "time", "y_star", "v_star", "skipped"});
    for (const AuctionRecord& a : result.auctions) {
      out.row({std::to_string(a.index), format_double(a.time), format_double(a.y_star),
               format_double(a.v_star), a.skipped ? "1" : "0"});
    }
  }
  if (result.mean_pre_auction_msd) {
    write_curve_csv(*result.mean_pre_auction_msd, (dir / "msd_mean.csv").string());
  }

  std::vector<std::pair<std::string, std::string>> items;
  items.emplace_back("msd_samples", std::to_string(result.msd_samples));
  items.emplace_back("final_population", std::to_string(result.final_population.size()));
  items.emplace_back(
      "effective_diffusivity",
      format_double(effective_diffusivity(sim.beta_variance, sim.sigma_i, sim.params.sigma)));
  if (config.agent_sim.n_paths >= 2 && sim.params.sigma > 0.0) {
    const PathEnsembleStats stats = price_paths(sim, config.agent_sim.n_paths);
    items.emplace_back("n_paths", std::to_string(stats.n_paths));
    items.emplace_back("var_fund", format_double(stats.var_fund));
    items.emplace_back("var_err", format_double(stats.var_err));
    items.emplace_back("var_mkt", format_double(stats.var_mkt));
    items.emplace_back("ratio_err", format_double(stats.ratio_err));
    items.emplace_back("ratio_mkt", format_double(stats.ratio_mkt));
    items.emplace_back("se_ratio_err", format_double(stats.se_ratio_err));
    items.emplace_back("se_ratio_mkt", format_double(stats.se_ratio_mkt));
  }
  write_key_values((dir / "summary.txt").string(), items);
}

void cmd_ingest(const ExperimentConfig& config, const std::string& out_dir) {
  const fs::path dir = prepare_out(config, out_dir);
  std::vector<Snapshot> snapshots;
  if (config.ingest.synthetic) {
    snapshots = generate_synthetic(*config.ingest.synthetic);
    write_snapshots_csv(snapshots, (dir / "snapshots.csv").string());
  } else {
    if (config.ingest.input.empty()) {
      throw ValidationError("config: ingest needs an input file or a synthetic block");
    }
    snapshots = load_snapshots(config.ingest.input);
  }
  const AverageMsd averaged =
      average_msd(snapshots, config.ingest.bin_width, config.ingest.max_offset);
  write_curve_csv(averaged.curve, (dir / "msd_mean.csv").string());
  {
    CsvWriter out((dir / "bin_counts.csv").string(), {"y", "count_s", "count_d"});
    for (std::size_t k = 0; k < averaged.curve.grid.nodes(); ++k) {
      out.row({format_double(averaged.curve.grid.node(k)), std::to_string(averaged.counts_s[k]),
               std::to_string(averaged.counts_d[k])});
    }
  }
  const VShapeFit fit = fit_v_shape(averaged, config.ingest.window_lo, config.ingest.window_hi);
  write_key_values((dir / "fit.txt").string(),
                   {{"n_snapshots", std::to_string(averaged.n_snapshots)},
                    {"slope_bid", format_double(fit.slope_bid)},
                    {"slope_ask", format_double(fit.slope_ask)},
                    {"intercept_bid", format_double(fit.intercept_bid)},
                    {"intercept_ask", format_double(fit.intercept_ask)},
                    {"stderr_bid", format_double(fit.stderr_bid)},
                    {"stderr_ask", format_double(fit.stderr_ask)},
                    {"r2_bid", format_double(fit.r2_bid)},
                    {"r2_ask", format_double(fit.r2_ask)},
                    {"n_bins_bid", std::to_string(fit.n_bins_bid)},
                    {"n_bins_ask", std::to_string(fit.n_bins_ask)}});
}

void cmd_impact(const ExperimentConfig& config, const std::string& out_dir) {
  const fs::path dir = prepare_out(config, out_dir);
  validate(config.model);
  const double tau = config.auction.tau;
  if (!(tau > 0.0)) throw ValidationError("config: auction.tau must be > 0 for impact");
  const double liquidity = liquidity_L(config.model);
  double q_min = 1e-3;
  double q_max = 1e3;
  if (config.auction.q_factors.size() >= 2) {
    const auto [lo, hi] =
        std::minmax_element(config.auction.q_factors.begin(), config.auction.q_factors.end());
    q_min = *lo;
    q_max = *hi;
  }
  const ImpactCurve curve =
      impact_curve(q_min, q_max, 121, liquidity, config.model.diffusivity, tau);
  write_impact_csv(curve, (dir / "impact.csv").string());

  const LiquidityReport cycle = cycle_liquidity_report(config.model, tau);
  std::vector<std::pair<std::string, std::string>> items;
  items.emplace_back("liquidity", format_double(cycle.liquidity));
  items.emplace_back("tau", format_double(tau));
  items.emplace_back("v_star", format_double(cycle.v_star));
  items.emplace_back("lambda_cycle", format_double(cycle.lambda));
  const std::optional<bool> stationary = config.model.stationary_state_exists();
  if (stationary.value_or(false)) {
    const LiquidityReport walras = walrasian_liquidity_report(config.model);
    items.emplace_back("lambda_walrasian", format_double(walras.lambda));
    items.emplace_back("v_star_walrasian", format_double(walras.v_star));
  }
  write_key_values((dir / "summary.txt").string(), items);
}

}  // namespace msd
