// psd: run scenarios and oscillator analyses, sweep parameter grids, re-verify channel trees.
//
// Exit status: 0 all verdicts pass, 1 a verdict failed, 2 bad command line or
// config, 3 numerical abort.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include "psd/cli/analysis.hpp"
#include "psd/core/errors.hpp"

namespace {

using nlohmann::json;
using namespace psd;

enum Exit { ok = 0, verdict_failed = 1, config_error = 2, numerical_abort = 3 };

struct Overrides {
  std::optional<int> seed;
  std::optional<double> tol_w;
  std::optional<double> horizon;

  void apply(json& config) const {
    if (seed) config["seed"] = *seed;
    if (tol_w) config["epsilon_w"] = *tol_w;
    if (horizon) config["horizon"] = *horizon;
  }
};

void print_verdicts(const ScenarioResult& r) {
  for (const auto& v : r.verdicts) fmt::print("{} {}: {}\n", v.passed ? "PASS" : "FAIL", v.name, v.detail);
  for (const auto& n : r.notes) fmt::print("note: {}\n", n);
  const auto passed = std::count_if(r.verdicts.begin(), r.verdicts.end(), [](const Verdict& v) { return v.passed; });
  fmt::print("{}: {}/{} verdicts passed\n", r.kind, passed, r.verdicts.size());
}

// Runs `body`, mapping library exceptions onto exit codes.
template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const cli::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return config_error;
  } catch (const ResolvabilityError& e) {
    fmt::print(stderr, "config error: constraint '{}' violated: {}\n", e.constraint(), e.what());
    return config_error;
  } catch (const InvalidArgument& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return config_error;
  } catch (const json::exception& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return config_error;
  } catch (const NumericalAbort& e) {
    fmt::print(stderr, "numerical abort: {}\n", e.what());
    return numerical_abort;
  }
}

int cmd_run(const std::string& config_path, const std::string& out, const Overrides& o) {
  json config = cli::load_config(config_path);
  o.apply(config);
  const ScenarioSpec spec = cli::resolve_config(config);
  const ScenarioResult r = cli::run_config(spec);
  const auto files = cli::write_artifacts(r, out);
  print_verdicts(r);
  fmt::print("wrote {}\nwrote {}\n", files.csv.string(), files.json.string());
  return r.passed() ? ok : verdict_failed;
}

int cmd_verify_tree(const std::string& config_path, const std::string& out, const Overrides& o) {
  json config = cli::load_config(config_path);
  o.apply(config);
  const ScenarioSpec spec = cli::resolve_config(config);
  const ScenarioResult r = cli::run_config(spec);
  if (!r.tree || !r.tree_verdict) throw InvalidArgument("scenario '" + spec.kind + "' builds no channel tree");
  const TreeVerdict& v = *r.tree_verdict;
  const auto line = [](const char* name, const ConditionCheck& c) {
    fmt::print("{} {}: {}\n", c.passed ? "PASS" : "FAIL", name, c.detail);
  };
  line("sum", v.sum);
  line("refinement", v.refinement);
  line("overlap", v.overlap);
  fmt::print("branch events: {}\n", fmt::join(r.tree->branch_events, ", "));
  std::filesystem::create_directories(out);
  const auto path = std::filesystem::path(out) / (cli::artifact_stem(spec) + "-tree.json");
  json j{{"config", spec.to_json()}, {"tree", to_json(*r.tree)}, {"verdict", to_json(v)}};
  std::ofstream(path, std::ios::binary) << j.dump(2) << "\n";
  fmt::print("wrote {}\n", path.string());
  return v.passed() ? ok : verdict_failed;
}

struct SweepRow {
  std::string status;
  std::size_t passed = 0, total = 0;
  json observables = json::object();
  std::string error;
};

std::string cell(const json& v) {
  if (v.is_number()) return fmt::format("{:.12g}", v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  std::replace(s.begin(), s.end(), ',', ';');
  return s;
}

int cmd_sweep(const std::string& config_path, const std::string& out, const Overrides& o, unsigned jobs) {
  const json config = cli::load_config(config_path);
  if (!config.is_object() || !config.contains("base") || !config.contains("grid"))
    throw cli::ConfigError("sweep config needs 'base' and 'grid'");
  json base = config["base"];
  o.apply(base);
  const cli::SweepGrid grid = cli::parse_sweep_grid(config["grid"]);
  const std::size_t n = grid.size();
  std::vector<SweepRow> rows(n);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      json c = base;
      const auto p = grid.point(i);
      for (std::size_t k = 0; k < p.size(); ++k) c[grid.keys[k]] = p[k];
      SweepRow& row = rows[i];
      try {
        const ScenarioResult r = cli::run_config(cli::resolve_config(c));
        row.total = r.verdicts.size();
        row.passed = static_cast<std::size_t>(
            std::count_if(r.verdicts.begin(), r.verdicts.end(), [](const Verdict& v) { return v.passed; }));
        row.status = r.passed() ? "pass" : "fail";
        for (const auto& [key, value] : r.observables.items())
          if (value.is_number()) row.observables[key] = value;
      } catch (const ResolvabilityError& e) {
        row.status = "invalid";
        row.error = e.constraint();
      } catch (const NumericalAbort& e) {
        row.status = "abort";
        row.error = e.what();
      } catch (const Error& e) {
        row.status = "invalid";
        row.error = e.what();
      } catch (const json::exception& e) {
        row.status = "invalid";
        row.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n))); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::set<std::string> observed;
  for (const auto& r : rows)
    for (const auto& [key, value] : r.observables.items()) observed.insert(key);
  // embed the base with its defaults materialized when it resolves on its own
  json full_base = base;
  try {
    full_base = cli::resolve_config(base).to_json();
  } catch (const std::exception&) {
  }
  json resolved{{"base", full_base}, {"grid", config["grid"]}};
  std::string csv = "# config: " + resolved.dump() + "\n";
  std::vector<std::string> header = grid.keys;
  for (const char* h : {"status", "verdicts_passed", "verdicts_total"}) header.emplace_back(h);
  header.insert(header.end(), observed.begin(), observed.end());
  header.emplace_back("error");
  csv += fmt::format("{}\n", fmt::join(header, ","));
  std::size_t failed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = rows[i];
    std::vector<std::string> fields;
    for (const auto& v : grid.point(i)) fields.push_back(cell(v));
    fields.push_back(r.status);
    fields.push_back(std::to_string(r.passed));
    fields.push_back(std::to_string(r.total));
    for (const auto& key : observed) fields.push_back(r.observables.contains(key) ? cell(r.observables[key]) : "");
    fields.push_back(cell(json(r.error)));
    csv += fmt::format("{}\n", fmt::join(fields, ","));
    if (r.status != "pass") ++failed;
    fmt::print("{} point {}: {}\n", r.status == "pass" ? "PASS" : "FAIL", i, r.status + (r.error.empty() ? "" : " (" + r.error + ")"));
  }
  std::filesystem::create_directories(out);
  const auto path = std::filesystem::path(out) / ("sweep-" + cli::fnv1a_hex(resolved.dump()) + ".csv");
  std::ofstream(path, std::ios::binary) << csv;
  fmt::print("sweep: {}/{} points passed\nwrote {}\n", n - failed, n, path.string());
  return failed == 0 ? ok : verdict_failed;
}

int cmd_oscillator(const std::string& model, const std::string& config_path, const std::string& out, const Overrides& o) {
  static const std::map<std::string, std::string> kinds{{"lindblad", "oscillator-lindblad"},
                                                        {"superposition", "oscillator-superposition"},
                                                        {"ideal-model", "ideal-model"},
                                                        {"completeness", "coherent-completeness"}};
  const auto it = kinds.find(model);
  if (it == kinds.end()) throw cli::ConfigError("unknown oscillator model '" + model + "'");
  json config = config_path.empty() ? json::object() : cli::load_config(config_path);
  if (!config.is_object()) throw cli::ConfigError("oscillator config must be a JSON object");
  config["kind"] = it->second;
  if (o.seed) config["seed"] = *o.seed;
  if (o.horizon) config["t"] = *o.horizon;
  const ScenarioSpec spec = cli::resolve_config(config);
  const ScenarioResult r = cli::run_config(spec);
  const auto files = cli::write_artifacts(r, out);
  print_verdicts(r);
  fmt::print("wrote {}\nwrote {}\n", files.csv.string(), files.json.string());
  return r.passed() ? ok : verdict_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Permanent spatial decomposition toolkit"};
  app.require_subcommand(1);
  std::string config, out = ".", model;
  Overrides o;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only print errors from the library log");

  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* c = sub->add_option("--config", config, "JSON config file");
    if (need_config) c->required();
    sub->add_option("--out", out, "Output directory")->capture_default_str();
    sub->add_option_function<int>("--seed", [&](int v) { o.seed = v; }, "Seed for randomized partition search");
    sub->add_option_function<double>("--tol-w", [&](double v) { o.tol_w = v; }, "Overlap tolerance epsilon_w");
    sub->add_option_function<double>("--horizon", [&](double v) { o.horizon = v; }, "Final time");
  };
  auto* run = app.add_subcommand("run", "Run one scenario or analysis");
  add_common(run, true);
  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid, one CSV row per point");
  add_common(sweep, true);
  sweep->add_option("--jobs", jobs, "Concurrent workers")->check(CLI::PositiveNumber);
  auto* verify = app.add_subcommand("verify-tree", "Re-check the channel tree of a scenario");
  add_common(verify, true);
  auto* osc = app.add_subcommand("oscillator", "Damped-oscillator and ideal decoherence models");
  osc->add_option("model", model, "lindblad | superposition | ideal-model | completeness")->required();
  add_common(osc, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }
  spdlog::set_level(quiet ? spdlog::level::err : spdlog::level::warn);

  if (*run) return guarded([&] { return cmd_run(config, out, o); });
  if (*sweep) return guarded([&] { return cmd_sweep(config, out, o, jobs); });
  if (*verify) return guarded([&] { return cmd_verify_tree(config, out, o); });
  return guarded([&] { return cmd_oscillator(model, config, out, o); });
}
