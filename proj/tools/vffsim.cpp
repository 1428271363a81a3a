// vffsim: run figure presets or JSON experiment files and write CSV.
//
//   vffsim run --preset fig4 --runs 200 --seed 7 --out fig4.csv
//   vffsim run --config exp.json --out exp.csv --algorithms ctvff,fixed
//   vffsim validate exp.json
//   vffsim preset fig9 > fig9.json
//
// Exit codes: 0 ok, 2 usage or configuration error, 3 every run diverged.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vffrls/config.hpp"
#include "vffrls/error.hpp"
#include "vffrls/harness.hpp"

using namespace vffrls;

namespace {

constexpr int kUsage    = 2;
constexpr int kDiverged = 3;

struct RunArgs
{
  std::string              preset;
  std::string              config;
  std::string              out;
  std::optional<int>       runs;
  std::optional<uint64_t>  seed;
  std::vector<std::string> algorithms;
  std::int64_t             q_experiments = 1000;
};

void apply_overrides(std::vector<ExperimentCase> &cases, RunArgs const &a)
{
  std::vector<std::string> errs;
  for (auto &ec : cases) {
    if (a.runs) { ec.config.runs = *a.runs; }
    if (a.seed) { ec.config.seed = *a.seed; }
    if (!a.algorithms.empty()) {
      std::vector<ReceiverConfig> keep;
      for (auto const &rc : ec.config.receivers) {
        if (std::find(a.algorithms.begin(), a.algorithms.end(), rc.label()) != a.algorithms.end()) { keep.push_back(rc); }
      }
      ec.config.receivers = std::move(keep);
    }
    for (auto const &e : validation_errors(ec.config)) { errs.push_back((ec.label.empty() ? "" : ec.label + ": ") + e); }
  }
  for (auto const &name : a.algorithms) {
    try {
      parse_receiver_kind(name);
    } catch (Error const &) {
      errs.push_back("--algorithms: unknown receiver '" + name + "'");
    }
  }
  if (!errs.empty()) { throw ConfigError(errs); }
}

std::string timestamp()
{
  auto const  now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm     tm{};
  char        buf[32];
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run(RunArgs const &a)
{
  std::vector<ExperimentCase> cases;
  std::vector<std::string>    assumed;
  std::string                 source;
  if (!a.preset.empty()) {
    auto p  = find_preset(a.preset);
    cases   = std::move(p.cases);
    assumed = std::move(p.assumed);
    source  = "preset:" + a.preset;
  } else {
    cases  = load_experiment(a.config);
    source = "config:" + a.config;
  }
  apply_overrides(cases, a);

  bool const sweeping = cases.front().sweep_axis.has_value();
  for (auto const &ec : cases) {
    if (ec.sweep_axis.has_value() != sweeping) { throw ConfigError({"cannot mix sweep and trace cases in one run"}); }
  }

  nlohmann::ordered_json divergence = nlohmann::ordered_json::array();
  std::ostringstream     csv;
  if (sweeping) {
    write_sweep_header(csv);
  } else {
    write_trace_header(csv);
  }

  for (auto const &ec : cases) {
    std::string const suffix = cases.size() > 1 ? "/" + ec.label : "";
    if (!sweeping) {
      std::cerr << "running " << (ec.label.empty() ? source : ec.label) << " (" << ec.config.runs << " runs)\n";
      auto const trace = run_monte_carlo(ec.config);
      write_trace_rows(csv, trace, suffix);
      for (auto const &t : trace.algorithms) {
        divergence.push_back({{"case", ec.label}, {"algorithm", t.algorithm}, {"diverged_runs", t.diverged_runs}});
      }
      if (ec.analytical) {
        write_prediction_rows(csv, predict_scenario(ec.config, a.q_experiments), ec.config.total_symbols, suffix);
      }
      continue;
    }
    auto const axis = parse_sweep_axis(*ec.sweep_axis);
    for (double v : ec.sweep_values) {
      std::cerr << "sweep " << (ec.label.empty() ? source : ec.label) << ": " << *ec.sweep_axis << " = " << v << '\n';
      write_sweep_rows(csv, sweep(ec.config, *ec.sweep_axis, {v}), suffix);
      if (ec.analytical) {
        write_sweep_prediction_rows(csv, v, predict_scenario(with_axis(ec.config, axis, v), a.q_experiments), suffix);
      }
    }
  }

  std::ofstream out(a.out, std::ios::binary);
  if (!out) { throw ConfigError({"cannot write '" + a.out + "'"}); }
  out << csv.str();

  nlohmann::ordered_json meta;
  meta["tool"]                = "vffsim";
  meta["version"]             = kVersion;
  meta["source"]              = source;
  meta["seed"]                = cases.front().config.seed;
  meta["runs"]                = cases.front().config.runs;
  meta["sinr_averaging"]      = "linear domain across runs, converted to dB";
  meta["steady_state_window"] = "final 20% of symbols";
  meta["q_experiments"]       = a.q_experiments;
  meta["assumed_parameters"]  = assumed;
  meta["diverged"]            = divergence;
  meta["experiment"]          = nlohmann::ordered_json::parse(to_json(cases));
  meta["created"]             = timestamp();
  std::ofstream(a.out + ".meta.json") << meta.dump(2) << '\n';
  return 0;
}

int validate(std::string const &path)
{
  auto const cases = load_experiment(path);
  std::cout << to_json(cases) << '\n';
  return 0;
}

int dump_preset(std::string const &name)
{
  auto const p = find_preset(name);
  std::cout << to_json(p.cases) << '\n';
  return 0;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Variable forgetting factor RLS receivers for DS-CDMA: simulation and analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  RunArgs ra;
  auto   *run_cmd = app.add_subcommand("run", "run a preset or a config file and write CSV");
  auto   *preset  = run_cmd->add_option("--preset", ra.preset, "figure preset name");
  auto   *config  = run_cmd->add_option("--config", ra.config, "JSON experiment file");
  preset->excludes(config);
  run_cmd->add_option("--out", ra.out, "CSV output path")->required();
  run_cmd->add_option("--runs", ra.runs, "Monte Carlo runs per point")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", ra.seed, "scenario seed");
  run_cmd->add_option("--algorithms", ra.algorithms, "receivers to keep, e.g. ctvff,gvff")->delimiter(',');
  run_cmd->add_option("--q-experiments", ra.q_experiments, "experiments for the drift covariance estimate")
    ->check(CLI::PositiveNumber);

  std::string path;
  auto       *val_cmd = app.add_subcommand("validate", "check a config file and print it with defaults filled");
  val_cmd->add_option("file", path, "JSON experiment file")->required();

  std::string name;
  auto       *pre_cmd = app.add_subcommand("preset", "print a preset as a JSON experiment file");
  pre_cmd->add_option("name", name, "preset name")->required();

  app.add_subcommand("presets", "list preset names");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    int const code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*run_cmd) {
      if (ra.preset.empty() && ra.config.empty()) { throw ConfigError({"run needs --preset or --config"}); }
      return run(ra);
    }
    if (*val_cmd) { return validate(path); }
    if (*pre_cmd) { return dump_preset(name); }
    for (auto const &n : preset_names()) { std::cout << n << '\n'; }
    return 0;
  } catch (ConfigError const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (EmptyAverage const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDiverged;
  } catch (std::exception const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
