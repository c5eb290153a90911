#pragma once

// CSV / JSON / SVG emission for experiment results. Numbers are written in
// shortest round-trip form so repeated runs are byte-identical and JSON
// reloads exactly.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlslab/config.hpp"
#include "nlslab/experiments.hpp"
#include "nlslab/fit.hpp"

namespace nlslab {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += "\n";
  }
  return out;
}

struct PlotSpec {
  std::string title, xlabel, ylabel;
  std::vector<std::pair<double, double>> points;
  bool loglog = true;
  std::optional<std::pair<double, double>> line;  // (slope, intercept) in log space
};

struct Report {
  std::string stem;
  nlohmann::json json;
  Table table;
  std::optional<PlotSpec> plot;
};

// ---------------------------------------------------------------------------
// DecayFit <-> JSON

inline nlohmann::json fit_to_json(const DecayFit& f) {
  nlohmann::json j;
  j["status"] = to_string(f.status);
  j["floor"] = f.floor;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [n, v] : f.points) pts.push_back({n, v});
  j["points"] = pts;
  if (f.status == FitStatus::kOk) {
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["r2"] = f.r2;
  } else {
    j["slope"] = nullptr;
    j["intercept"] = nullptr;
    j["r2"] = nullptr;
  }
  return j;
}

inline DecayFit fit_from_json(const nlohmann::json& j) {
  DecayFit f;
  const std::string st = j.at("status").get<std::string>();
  if (st == to_string(FitStatus::kOk)) f.status = FitStatus::kOk;
  else if (st == to_string(FitStatus::kAtFloor)) f.status = FitStatus::kAtFloor;
  else if (st == to_string(FitStatus::kEmpty)) f.status = FitStatus::kEmpty;
  else throw ReportError("unknown fit status '" + st + "'");
  f.floor = j.at("floor").get<double>();
  for (const auto& p : j.at("points")) f.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  if (f.status == FitStatus::kOk) {
    f.slope = j.at("slope").get<double>();
    f.intercept = j.at("intercept").get<double>();
    f.r2 = j.at("r2").get<double>();
  }
  return f;
}

namespace detail {

inline nlohmann::json header(const ExperimentConfig& c) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["code_version"] = kCodeVersion;
  j["experiment"] = to_string(c.kind);
  j["config"] = config_to_json(c);
  return j;
}

inline PlotSpec fit_plot(const DecayFit& f, const std::string& title, const std::string& ylabel) {
  PlotSpec p{title, "N", ylabel, f.points, true, std::nullopt};
  if (f.status == FitStatus::kOk) p.line = std::make_pair(f.slope, f.intercept);
  return p;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// per-experiment reports

inline Report make_report(const ExperimentConfig& c, const EnergyDecayResult& r) {
  Report rep{c.output_stem, detail::header(c), {{"N", "increment", "e2_t0", "e2_t1"}, {}}, std::nullopt};
  for (const auto& row : r.rows) rep.table.rows.push_back({row.N, row.increment, row.e2_t0, row.e2_t1});
  rep.json["fit"] = fit_to_json(r.fit);
  rep.json["energy_drift"] = r.energy_drift;
  rep.json["window"] = {r.t0, r.t1};
  rep.json["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows)
    rep.json["rows"].push_back({{"N", row.N}, {"increment", row.increment}, {"e2_t0", row.e2_t0}, {"e2_t1", row.e2_t1}});
  rep.plot = detail::fit_plot(r.fit, "|E2(t1) - E2(t0)| vs N", "increment");
  return rep;
}

inline Report make_report(const ExperimentConfig& c, const GapDecayResult& r) {
  Report rep{c.output_stem, detail::header(c), {{"N", "gap", "e1", "e2"}, {}}, std::nullopt};
  for (const auto& row : r.rows) rep.table.rows.push_back({row.N, row.gap, row.e1, row.e2});
  rep.json["fit"] = fit_to_json(r.fit);
  rep.json["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows)
    rep.json["rows"].push_back({{"N", row.N}, {"gap", row.gap}, {"e1", row.e1}, {"e2", row.e2}});
  rep.plot = detail::fit_plot(r.fit, "|E2 - E1| vs N", "gap");
  return rep;
}

inline Report make_report(const ExperimentConfig& c, const CommutatorDecayResult& r) {
  Report rep{c.output_stem,
             detail::header(c),
             {{"N", "c1", "c0", "zi", "interaction_error", "interaction_error_reduced", "factored_bound", "violation"}, {}},
             std::nullopt};
  for (const auto& row : r.rows)
    rep.table.rows.push_back({row.N, row.c1, row.c0, row.zi, row.interaction, row.interaction_reduced, row.bound,
                              row.violation ? 1.0 : 0.0});
  rep.json["fit"] = fit_to_json(r.fit);
  rep.json["interaction_checked"] = r.interaction_checked;
  rep.json["interaction_modes"] = r.interaction_modes;
  rep.json["violations"] = r.violations;
  rep.json["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows)
    rep.json["rows"].push_back({{"N", row.N},
                                {"c1", row.c1},
                                {"c0", row.c0},
                                {"zi", row.zi},
                                {"interaction_error", row.interaction},
                                {"interaction_error_reduced", row.interaction_reduced},
                                {"factored_bound", row.bound},
                                {"violation", row.violation}});
  rep.plot = detail::fit_plot(r.fit, "||d(I N - N(Iu))||_{L1 L2} vs N", "c1");
  return rep;
}

inline Report make_report(const ExperimentConfig& c, const MorawetzResult& r) {
  Report rep{c.output_stem,
             detail::header(c),
             {{"run", "amplitude", "sigma", "nu", "x0", "residual_coarse", "residual_fine", "residual_ratio", "violations",
               "min_dMdt", "l8_ratio_T", "l8_ratio_2T", "l8_growth", "l8i_ratio_T", "l8i_ratio_2T"},
              {}},
             std::nullopt};
  PlotSpec plot{"L8 ratio lhs/rhs per run at T and 2T", "run", "ratio", {}, false, std::nullopt};
  for (const auto& k : r.runs) {
    rep.table.rows.push_back({static_cast<double>(k.run), k.amplitude, k.sigma, k.nu, k.x0, k.residual_coarse,
                              k.residual_fine, k.residual_ratio, static_cast<double>(k.violations), k.min_derivative,
                              k.l8_ratio_T, k.l8_ratio_2T, k.l8_growth, k.l8i_ratio_T, k.l8i_ratio_2T});
    plot.points.emplace_back(static_cast<double>(k.run), k.l8_ratio_2T);
  }
  rep.json["T"] = r.T;
  rep.json["runs"] = static_cast<int>(r.runs.size());
  rep.json["total_violations"] = r.total_violations;
  rep.json["min_residual_ratio"] = r.min_residual_ratio;
  rep.json["max_residual_ratio"] = r.max_residual_ratio;
  rep.json["max_l8_ratio_T"] = r.max_l8_ratio_T;
  rep.json["max_l8_ratio_2T"] = r.max_l8_ratio_2T;
  rep.json["max_l8_growth"] = r.max_l8_growth;
  rep.plot = plot;
  return rep;
}

inline Report make_report(const ExperimentConfig& c, const IncrementExperiment& r) {
  Report rep{c.output_stem, detail::header(c), {{"dt", "dt_sample", "lhs", "rhs", "resonant", "residual"}, {}},
             std::nullopt};
  PlotSpec plot{"increment identity residual vs dt_sample", "dt_sample", "residual", {}, true, std::nullopt};
  for (const auto& row : r.rows) {
    rep.table.rows.push_back({row.dt, row.dt_sample, row.lhs, row.rhs, row.resonant, row.residual});
    if (row.residual > 0.0) plot.points.emplace_back(row.dt_sample, row.residual);
  }
  rep.json["N"] = r.N;
  rep.json["band"] = r.band;
  rep.json["refinement_ratio"] = r.ratio;
  rep.plot = plot;
  return rep;
}

inline Report make_report(const ExperimentConfig& c, const GwpReport& r) {
  Report rep{c.output_stem, detail::header(c), {{"t_start", "t_end", "l6_mass"}, {}}, std::nullopt};
  for (const auto& iv : r.intervals) rep.table.rows.push_back({iv.t_start, iv.t_end, iv.l6_mass});
  auto& j = rep.json;
  j["s"] = r.s;
  j["N"] = r.N;
  j["lambda"] = r.lambda;
  j["mu"] = r.mu;
  j["window"] = r.window;
  j["total_l6_mass"] = r.total_mass;
  j["L_count"] = r.L_count;
  j["predicted_L"] = r.predicted_L;
  j["partition_ok"] = r.partition_ok;
  j["failure"] = r.failure;
  j["tiling_ok"] = gwp_tiling_ok(r);
  j["growth_exponent_observed"] = r.growth_exponent_observed;
  j["growth_exponent_predicted"] = r.growth_exponent_predicted;
  j["intervals"] = nlohmann::json::array();
  for (const auto& iv : r.intervals) j["intervals"].push_back({iv.t_start, iv.t_end, iv.l6_mass});
  j["h1_trace"] = nlohmann::json::array();
  for (const auto& [t, h] : r.h1_trace) j["h1_trace"].push_back({t, h});
  j["hs_sup"] = nlohmann::json::array();
  for (const auto& [t, h] : r.hs_sup) j["hs_sup"].push_back({t, h});
  j["T0_sweep"] = nlohmann::json::array();
  for (const auto& pt : r.sweep)
    j["T0_sweep"].push_back({{"T0", pt.T0}, {"L_count", pt.L_count}, {"predicted_L", pt.predicted_L}});
  PlotSpec plot{"||I u^lambda||_{H1} along the rescaled window", "t", "H1 norm", r.h1_trace, false, std::nullopt};
  rep.plot = plot;
  return rep;
}

inline Report make_report(const ExperimentConfig& c, const SimulateResult& r) {
  Report rep{c.output_stem, detail::header(c), {{"t", "mass", "energy", "momentum"}, {}}, std::nullopt};
  PlotSpec plot{"energy along the run", "t", "energy", {}, false, std::nullopt};
  for (const auto& s : r.samples) {
    rep.table.rows.push_back({s[0], s[1], s[2], s[3]});
    plot.points.emplace_back(s[0], s[2]);
  }
  rep.json["mass_drift"] = r.mass_drift;
  rep.json["energy_drift"] = r.energy_drift;
  rep.plot = plot;
  return rep;
}

// ---------------------------------------------------------------------------
// SVG

inline std::string to_svg(const PlotSpec& p) {
  const double W = 640, H = 440, ml = 70, mr = 20, mt = 40, mb = 55;
  std::vector<std::pair<double, double>> pts;
  for (const auto& [x, y] : p.points) {
    if (p.loglog && (!(x > 0.0) || !(y > 0.0))) continue;
    pts.emplace_back(p.loglog ? std::log10(x) : x, p.loglog ? std::log10(y) : y);
  }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << " " << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << p.title << "</text>\n";
  const std::string xl = p.loglog ? "log10 " + p.xlabel : p.xlabel, yl = p.loglog ? "log10 " + p.ylabel : p.ylabel;
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
     << xl << "</text>\n";
  os << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
     << "transform=\"rotate(-90 16 " << H / 2 << ")\">" << yl << "</text>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (pts.empty()) {
    os << "<text x=\"" << W / 2 << "\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\">no data</text>\n";
    os << "</svg>\n";
    return os.str();
  }
  double x0 = pts[0].first, x1 = x0, y0 = pts[0].second, y1 = y0;
  for (const auto& [x, y] : pts) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  if (x1 == x0) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double px = 0.05 * (x1 - x0), py = 0.05 * (y1 - y0);
  x0 -= px;
  x1 += px;
  y0 -= py;
  y1 += py;
  auto sx = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto sy = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };
  auto num = [](double v) { return format_number(std::round(v * 100.0) / 100.0); };
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    os << "<text x=\"" << num(sx(xv)) << "\" y=\"" << H - mb + 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << num(xv) << "</text>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << num(sy(yv) + 3)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(yv) << "</text>\n";
  }
  if (!p.loglog) {
    os << "<polyline fill=\"none\" stroke=\"#555\" stroke-width=\"1\" points=\"";
    for (const auto& [x, y] : pts) os << num(sx(x)) << "," << num(sy(y)) << " ";
    os << "\"/>\n";
  }
  for (const auto& [x, y] : pts)
    os << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"3.5\" fill=\"#1f5fa8\"/>\n";
  if (p.line) {
    // log10 y = slope log10 x + intercept / ln 10
    const double a = p.line->first, b = p.line->second / std::log(10.0);
    const double xa = x0 + px, xb = x1 - px;
    os << "<line x1=\"" << num(sx(xa)) << "\" y1=\"" << num(sy(a * xa + b)) << "\" x2=\"" << num(sx(xb)) << "\" y2=\""
       << num(sy(a * xb + b)) << "\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << W - mr - 6 << "\" y=\"" << mt + 16
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">slope " << num(a) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// files

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ReportError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ReportError("write failed for '" + path.string() + "'");
}

/// stem.csv, stem.json and stem.svg under dir (created if missing).
inline std::vector<std::filesystem::path> emit_reports(const Report& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ReportError("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> out;
  out.push_back(dir / (r.stem + ".csv"));
  write_file(out.back(), to_csv(r.table));
  out.push_back(dir / (r.stem + ".json"));
  write_file(out.back(), r.json.dump(2) + "\n");
  if (r.plot) {
    out.push_back(dir / (r.stem + ".svg"));
    write_file(out.back(), to_svg(*r.plot));
  }
  return out;
}

inline nlohmann::json load_report_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ReportError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ReportError("bad JSON in '" + path.string() + "': " + e.what());
  }
}

/// Run the configured experiment and build its report.
inline Report run_experiment(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::kSimulate: return make_report(c, run_simulate(c));
    case ExperimentKind::kEnergyDecay: return make_report(c, run_energy_decay(c));
    case ExperimentKind::kGapDecay: return make_report(c, run_gap_decay(c));
    case ExperimentKind::kCommutatorDecay: return make_report(c, run_commutator_decay(c));
    case ExperimentKind::kMorawetz: return make_report(c, run_morawetz(c));
    case ExperimentKind::kIncrement: return make_report(c, run_increment(c));
    case ExperimentKind::kGwp: return make_report(c, run_gwp(c));
  }
  throw ConfigError("unhandled experiment kind");
}

}  // namespace nlslab
