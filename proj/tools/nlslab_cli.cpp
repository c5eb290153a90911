// nlslab: run one experiment from a JSON config and write CSV/JSON/SVG.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "nlslab/nlslab.hpp"

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw nlslab::ConfigError("cannot open config '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw nlslab::ConfigError("config parse error in '" + path + "': " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlslab: quintic NLS experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  bool deterministic = false;
  app.add_option("--threads", threads, "worker threads (overrides " + std::string(nlslab::parallel::kThreadsEnv) + ")")
      ->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", deterministic, "ordered reductions: byte-identical outputs");

  std::string config_path, out_dir = ".";
  const char* kinds[] = {"simulate", "energy-decay", "gap-decay", "commutator-decay", "morawetz", "increment", "gwp"};
  for (const char* k : kinds) {
    auto* sub = app.add_subcommand(k, std::string("run the ") + k + " experiment");
    sub->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string kind = app.get_subcommands().front()->get_name();
  try {
    const int n = nlslab::parallel::resolve_threads(threads);
    if (n > 0) nlslab::parallel::set_threads(n);
    nlslab::parallel::set_deterministic(deterministic);

    auto j = read_json(config_path);
    if (!j.is_object()) throw nlslab::ConfigError("config must be a table");
    if (!j.contains("kind")) j["kind"] = kind;
    if (j["kind"] != kind)
      throw nlslab::ConfigError("config kind '" + j["kind"].dump() + "' does not match subcommand '" + kind + "'");
    const auto cfg = nlslab::parse_config(j);
    const auto report = nlslab::run_experiment(cfg);
    for (const auto& p : nlslab::emit_reports(report, out_dir)) std::cout << p.string() << "\n";
  } catch (const nlslab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
