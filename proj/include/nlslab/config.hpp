#pragma once

// ExperimentConfig: JSON in, JSON out. Every key is checked; unknown keys
// are errors with their full path.

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlslab/multilinear.hpp"
#include "nlslab/solver.hpp"

namespace nlslab {

inline constexpr const char* kCodeVersion = "nlslab 1.0.0";
inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { kSimulate, kEnergyDecay, kGapDecay, kCommutatorDecay, kMorawetz, kIncrement, kGwp };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kSimulate: return "simulate";
    case ExperimentKind::kEnergyDecay: return "energy-decay";
    case ExperimentKind::kGapDecay: return "gap-decay";
    case ExperimentKind::kCommutatorDecay: return "commutator-decay";
    case ExperimentKind::kMorawetz: return "morawetz";
    case ExperimentKind::kIncrement: return "increment";
    case ExperimentKind::kGwp: return "gwp";
  }
  return "?";
}

inline ExperimentKind parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::kSimulate, ExperimentKind::kEnergyDecay, ExperimentKind::kGapDecay,
                 ExperimentKind::kCommutatorDecay, ExperimentKind::kMorawetz, ExperimentKind::kIncrement,
                 ExperimentKind::kGwp})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

struct GridConfig {
  double box_length = 1.0;
  int modes = 64;
};

struct DataConfig {
  std::string kind = "random";  // random | gaussian
  int band = 8;
  double decay = 1.0;
  double l2_norm = 1.0;
  double amplitude = 1.0;
  double sigma = 1.0;
  double nu = 0.0;
  double x0 = 0.0;
};

struct MorawetzConfig {
  int runs = 20;
  double weight_ell = 1.0;
  std::array<double, 2> amplitude_range{0.5, 1.5};
  std::array<double, 2> sigma_range{0.7, 1.5};
  std::array<double, 2> nu_range{-0.5, 0.5};
  std::array<double, 2> x0_range{-2.0, 2.0};
};

struct InteractionConfig {
  bool enabled = true;
  int modes = 48;
  int time_stride = 1;
};

struct IncrementConfig {
  int band = 5;
};

struct GwpConfig {
  double T0 = 1.0;
  double mu = 0.0;  // <= 0: mu_factor * ||I u0^lambda||_{L2}^6
  double mu_factor = 0.1;
  double bootstrap_K = 1.0;
  int checkpoints = 8;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSimulate;
  double s = 0.5;
  std::vector<double> N_list;
  std::uint64_t seed = 1;
  GridConfig grid;
  SolverConfig solver;
  DataConfig data;
  WorkBudget budget;
  M6Options m6;
  MorawetzConfig morawetz;
  InteractionConfig interaction;
  IncrementConfig increment;
  GwpConfig gwp;
  std::string output_stem;
};

namespace detail {

// Reads keys from one JSON object and remembers which were consumed.
class Reader {
 public:
  Reader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be a table");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad value for " + join(key) + ": " + e.what());
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  Reader table(const char* key) {
    seen_.insert(key);
    return Reader(j_.contains(key) ? j_.at(key) : empty(), join(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError("unknown config key '" + join(k) + "'");
  }

 private:
  static const nlohmann::json& empty() {
    static const nlohmann::json e = nlohmann::json::object();
    return e;
  }
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline std::string default_stem(ExperimentKind k) {
  std::string s = to_string(k);
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  if (!(c.s > 0.0 && c.s <= 1.0)) throw ConfigError("s must lie in (0, 1]");
  if (c.grid.modes < 4 || c.grid.modes % 2 != 0) throw ConfigError("grid.modes must be even and >= 4");
  if (!(c.grid.box_length > 0.0)) throw ConfigError("grid.box_length must be positive");
  if (c.data.kind != "random" && c.data.kind != "gaussian") throw ConfigError("data.kind must be random or gaussian");
  for (std::size_t i = 0; i < c.N_list.size(); ++i) {
    if (!(c.N_list[i] >= 1.0)) throw ConfigError("N_list entries must be >= 1");
    if (i > 0 && !(c.N_list[i] > c.N_list[i - 1])) throw ConfigError("N_list must be strictly ascending");
  }
  const bool fits = c.kind == ExperimentKind::kEnergyDecay || c.kind == ExperimentKind::kGapDecay ||
                    c.kind == ExperimentKind::kCommutatorDecay;
  if (fits && c.N_list.size() < 3) throw ConfigError("N_list needs at least 3 entries for a slope fit");
  if (c.kind == ExperimentKind::kEnergyDecay && !(c.s > 0.25)) throw ConfigError("energy-decay needs s > 1/4");
  if ((c.kind == ExperimentKind::kGapDecay || c.kind == ExperimentKind::kGwp) && !(c.s > 1.0 / 3.0))
    throw ConfigError(std::string(to_string(c.kind)) + " needs s > 1/3");
  if (c.morawetz.runs < 1) throw ConfigError("morawetz.runs must be >= 1");
  if (c.interaction.modes > 48 || c.interaction.modes < 6) throw ConfigError("interaction.modes must lie in [6, 48]");
  if (c.interaction.time_stride < 1) throw ConfigError("interaction.time_stride must be >= 1");
  if (!(c.gwp.T0 > 0.0)) throw ConfigError("gwp.T0 must be positive");
  if (c.gwp.checkpoints < 2) throw ConfigError("gwp.checkpoints must be >= 2");
  (void)solver_steps(c.solver, SpectralGrid(c.grid.box_length, c.grid.modes));
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig c;
  detail::Reader r(j, "");
  std::string kind;
  r.get("kind", kind);
  if (kind.empty()) throw ConfigError("missing config key 'kind'");
  c.kind = parse_kind(kind);
  r.get("s", c.s);
  r.get("N_list", c.N_list);
  r.get("seed", c.seed);
  {
    auto t = r.table("grid");
    t.get("box_length", c.grid.box_length);
    t.get("modes", c.grid.modes);
    t.finish();
  }
  {
    auto t = r.table("solver");
    t.get("dt", c.solver.dt);
    t.get("t_end", c.solver.t_end);
    t.get("record_every", c.solver.record_every);
    t.get("dealias", c.solver.dealias);
    std::string step = c.solver.nonlinear_step == NonlinearStep::kGalerkin ? "galerkin" : "phase";
    t.get("nonlinear_step", step);
    if (step == "galerkin") c.solver.nonlinear_step = NonlinearStep::kGalerkin;
    else if (step == "phase") c.solver.nonlinear_step = NonlinearStep::kPhase;
    else throw ConfigError("solver.nonlinear_step must be phase or galerkin");
    t.finish();
  }
  {
    auto t = r.table("data");
    t.get("kind", c.data.kind);
    t.get("band", c.data.band);
    t.get("decay", c.data.decay);
    t.get("l2_norm", c.data.l2_norm);
    t.get("amplitude", c.data.amplitude);
    t.get("sigma", c.data.sigma);
    t.get("nu", c.data.nu);
    t.get("x0", c.data.x0);
    t.finish();
  }
  {
    auto t = r.table("budget");
    t.get("max_tuples", c.budget.max_tuples);
    t.get("max_increment_band", c.budget.max_increment_band);
    t.finish();
  }
  {
    auto t = r.table("m6");
    t.get("eps_res", c.m6.eps_res);
    std::string norm = c.m6.normalization == M6Normalization::kUnit ? "unit" : "displayed";
    t.get("normalization", norm);
    if (norm == "unit") c.m6.normalization = M6Normalization::kUnit;
    else if (norm == "displayed") c.m6.normalization = M6Normalization::kDisplayed;
    else throw ConfigError("m6.normalization must be unit or displayed");
    t.finish();
  }
  {
    auto t = r.table("morawetz");
    t.get("runs", c.morawetz.runs);
    t.get("weight_ell", c.morawetz.weight_ell);
    t.get("amplitude_range", c.morawetz.amplitude_range);
    t.get("sigma_range", c.morawetz.sigma_range);
    t.get("nu_range", c.morawetz.nu_range);
    t.get("x0_range", c.morawetz.x0_range);
    t.finish();
  }
  {
    auto t = r.table("interaction");
    t.get("enabled", c.interaction.enabled);
    t.get("modes", c.interaction.modes);
    t.get("time_stride", c.interaction.time_stride);
    t.finish();
  }
  {
    auto t = r.table("increment");
    t.get("band", c.increment.band);
    t.finish();
  }
  {
    auto t = r.table("gwp");
    t.get("T0", c.gwp.T0);
    t.get("mu", c.gwp.mu);
    t.get("mu_factor", c.gwp.mu_factor);
    t.get("bootstrap_K", c.gwp.bootstrap_K);
    t.get("checkpoints", c.gwp.checkpoints);
    t.finish();
  }
  {
    auto t = r.table("output");
    t.get("stem", c.output_stem);
    t.finish();
  }
  r.finish();
  if (c.output_stem.empty()) c.output_stem = detail::default_stem(c.kind);
  validate(c);
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Canonical echo: every field, defaults filled in.
inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json o;
  o["kind"] = to_string(c.kind);
  o["s"] = c.s;
  o["N_list"] = c.N_list;
  o["seed"] = c.seed;
  o["grid"] = {{"box_length", c.grid.box_length}, {"modes", c.grid.modes}};
  o["solver"] = {{"dt", c.solver.dt},
                 {"t_end", c.solver.t_end},
                 {"record_every", c.solver.record_every},
                 {"dealias", c.solver.dealias},
                 {"nonlinear_step", c.solver.nonlinear_step == NonlinearStep::kGalerkin ? "galerkin" : "phase"}};
  o["data"] = {{"kind", c.data.kind},       {"band", c.data.band}, {"decay", c.data.decay}, {"l2_norm", c.data.l2_norm},
               {"amplitude", c.data.amplitude}, {"sigma", c.data.sigma}, {"nu", c.data.nu},       {"x0", c.data.x0}};
  o["budget"] = {{"max_tuples", c.budget.max_tuples}, {"max_increment_band", c.budget.max_increment_band}};
  o["m6"] = {{"eps_res", c.m6.eps_res},
             {"normalization", c.m6.normalization == M6Normalization::kUnit ? "unit" : "displayed"}};
  o["morawetz"] = {{"runs", c.morawetz.runs},
                   {"weight_ell", c.morawetz.weight_ell},
                   {"amplitude_range", c.morawetz.amplitude_range},
                   {"sigma_range", c.morawetz.sigma_range},
                   {"nu_range", c.morawetz.nu_range},
                   {"x0_range", c.morawetz.x0_range}};
  o["interaction"] = {
      {"enabled", c.interaction.enabled}, {"modes", c.interaction.modes}, {"time_stride", c.interaction.time_stride}};
  o["increment"] = {{"band", c.increment.band}};
  o["gwp"] = {{"T0", c.gwp.T0},
              {"mu", c.gwp.mu},
              {"mu_factor", c.gwp.mu_factor},
              {"bootstrap_K", c.gwp.bootstrap_K},
              {"checkpoints", c.gwp.checkpoints}};
  o["output"] = {{"stem", c.output_stem}};
  return o;
}

}  // namespace nlslab
