#include "vffrls/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vffrls/error.hpp"
#include "vffrls/harness.hpp"

namespace vffrls {

using Json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------------------------
// Reading

class Reader
{
public:
  explicit Reader(std::vector<std::string> &errs) : errs_(errs) {}

  template <typename T> void get(Json const &obj, char const *key, std::string const &where, T &out)
  {
    auto it = obj.find(key);
    if (it == obj.end()) { return; }
    try {
      out = it->template get<T>();
    } catch (nlohmann::json::exception const &) {
      errs_.push_back(where + key + ": wrong type (" + std::string(it->type_name()) + ")");
    }
  }

  void only(Json const &obj, std::set<std::string> const &allowed, std::string const &where)
  {
    for (auto const &[k, v] : obj.items()) {
      if (!allowed.count(k)) { errs_.push_back(where + k + ": unknown key"); }
    }
  }

  void error(std::string msg) { errs_.push_back(std::move(msg)); }

private:
  std::vector<std::string> &errs_;
};

ReceiverConfig read_receiver(Json const &j, std::string const &where, Reader &rd)
{
  ReceiverConfig rc;
  if (!j.is_object()) {
    rd.error(where + "must be an object");
    return rc;
  }
  std::string kind = "ctvff";
  rd.get(j, "kind", where, kind);
  try {
    rc.kind = parse_receiver_kind(kind);
  } catch (Error const &) {
    rd.error(where + "kind: unknown receiver '" + kind + "' (fixed, gvff, ctvff, sg, rake)");
    return rc;
  }

  switch (rc.kind) {
  case ReceiverKind::Fixed:
    rd.only(j, {"kind", "lambda"}, where);
    rd.get(j, "lambda", where, rc.fixed.lambda);
    break;
  case ReceiverKind::Gvff:
    rd.only(j, {"kind", "mu", "lambda_minus", "lambda_plus", "lambda0"}, where);
    rd.get(j, "mu", where, rc.gvff.mu);
    rd.get(j, "lambda_minus", where, rc.gvff.lambda_minus);
    rd.get(j, "lambda_plus", where, rc.gvff.lambda_plus);
    rd.get(j, "lambda0", where, rc.gvff.lambda0);
    break;
  case ReceiverKind::Ctvff: {
    rd.only(j, {"kind", "delta1", "delta2", "delta3", "lambda_minus", "lambda_plus", "error_convention"}, where);
    rd.get(j, "delta1", where, rc.ctvff.delta1);
    rd.get(j, "delta2", where, rc.ctvff.delta2);
    rd.get(j, "delta3", where, rc.ctvff.delta3);
    rd.get(j, "lambda_minus", where, rc.ctvff.lambda_minus);
    rd.get(j, "lambda_plus", where, rc.ctvff.lambda_plus);
    std::string conv = "a_priori";
    rd.get(j, "error_convention", where, conv);
    if (conv == "a_priori") {
      rc.convention = ErrorConvention::APriori;
    } else if (conv == "a_posteriori") {
      rc.convention = ErrorConvention::APosteriori;
    } else {
      rd.error(where + "error_convention: expected a_priori or a_posteriori");
    }
    break;
  }
  case ReceiverKind::Sg:
    rd.only(j, {"kind", "sg_step"}, where);
    rd.get(j, "sg_step", where, rc.sg_step);
    break;
  case ReceiverKind::Rake: rd.only(j, {"kind"}, where); break;
  }
  return rc;
}

ScenarioConfig read_scenario(Json const &j, std::string const &where, Reader &rd)
{
  ScenarioConfig c;
  rd.get(j, "N", where, c.N);
  rd.get(j, "K_initial", where, c.K_initial);
  rd.get(j, "power_offsets_db", where, c.power_offsets_db);
  rd.get(j, "snr_db", where, c.snr_db);
  rd.get(j, "path_powers_db", where, c.path_powers_db);
  rd.get(j, "f_dT", where, c.f_dT);
  rd.get(j, "training_symbols", where, c.training_symbols);
  rd.get(j, "total_symbols", where, c.total_symbols);
  rd.get(j, "runs", where, c.runs);
  rd.get(j, "seed", where, c.seed);

  if (j.contains("L_p")) {
    int lp = 0;
    rd.get(j, "L_p", where, lp);
    if (lp != static_cast<int>(c.path_powers_db.size())) {
      rd.error(where + "L_p: " + std::to_string(lp) + " disagrees with path_powers_db (" +
               std::to_string(c.path_powers_db.size()) + " paths)");
    }
  }

  std::string model = "jakes";
  rd.get(j, "channel_model", where, model);
  if (model == "jakes") {
    c.channel_model = ChannelModel::Jakes;
  } else if (model == "static") {
    c.channel_model = ChannelModel::Static;
  } else {
    rd.error(where + "channel_model: expected static or jakes");
  }

  if (j.contains("code_file")) {
    std::string path;
    rd.get(j, "code_file", where, path);
    c.code_file = path;
  }

  if (auto it = j.find("receivers"); it != j.end()) {
    if (!it->is_array()) {
      rd.error(where + "receivers: must be an array");
    } else {
      for (std::size_t i = 0; i < it->size(); ++i) {
        c.receivers.push_back(read_receiver((*it)[i], where + "receivers[" + std::to_string(i) + "].", rd));
      }
    }
  }

  if (auto it = j.find("events"); it != j.end()) {
    if (!it->is_array()) {
      rd.error(where + "events: must be an array");
    } else {
      for (std::size_t i = 0; i < it->size(); ++i) {
        auto const       &e = (*it)[i];
        std::string const w = where + "events[" + std::to_string(i) + "].";
        if (!e.is_object()) {
          rd.error(w + "must be an object");
          continue;
        }
        rd.only(e, {"symbol", "power_offsets_db"}, w);
        EntryEvent ev;
        rd.get(e, "symbol", w, ev.symbol);
        rd.get(e, "power_offsets_db", w, ev.power_offsets_db);
        c.events.push_back(std::move(ev));
      }
    }
  }
  return c;
}

std::set<std::string> const kCaseKeys{"label",          "sweep",    "analytical",       "N",
                                      "L_p",            "K_initial", "power_offsets_db", "snr_db",
                                      "channel_model",  "path_powers_db", "f_dT",        "receivers",
                                      "training_symbols", "total_symbols", "events",     "runs",
                                      "seed",           "code_file"};

ExperimentCase read_case(Json const &j, std::string const &where, Reader &rd)
{
  ExperimentCase ec;
  if (!j.is_object()) {
    rd.error(where + "must be an object");
    return ec;
  }
  rd.only(j, kCaseKeys, where);
  rd.get(j, "label", where, ec.label);
  rd.get(j, "analytical", where, ec.analytical);
  ec.config = read_scenario(j, where, rd);

  if (auto it = j.find("sweep"); it != j.end()) {
    std::string const w = where + "sweep.";
    if (!it->is_object()) {
      rd.error(w + "must be an object");
    } else {
      rd.only(*it, {"axis", "values"}, w);
      std::string axis;
      rd.get(*it, "axis", w, axis);
      try {
        parse_sweep_axis(axis);
        ec.sweep_axis = axis;
      } catch (Error const &) {
        rd.error(w + "axis: unsupported '" + axis + "' (delta1, delta2, delta3, SNR, K, f_dT, lambda)");
      }
      rd.get(*it, "values", w, ec.sweep_values);
      if (ec.sweep_values.empty()) { rd.error(w + "values: must list at least one value"); }
    }
  }
  return ec;
}

// ---------------------------------------------------------------------------------------------
// Writing

Json receiver_json(ReceiverConfig const &rc)
{
  Json j;
  j["kind"] = std::string(to_string(rc.kind));
  switch (rc.kind) {
  case ReceiverKind::Fixed: j["lambda"] = rc.fixed.lambda; break;
  case ReceiverKind::Gvff:
    j["mu"]           = rc.gvff.mu;
    j["lambda_minus"] = rc.gvff.lambda_minus;
    j["lambda_plus"]  = rc.gvff.lambda_plus;
    j["lambda0"]      = rc.gvff.lambda0;
    break;
  case ReceiverKind::Ctvff:
    j["delta1"]           = rc.ctvff.delta1;
    j["delta2"]           = rc.ctvff.delta2;
    j["delta3"]           = rc.ctvff.delta3;
    j["lambda_minus"]     = rc.ctvff.lambda_minus;
    j["lambda_plus"]      = rc.ctvff.lambda_plus;
    j["error_convention"] = rc.convention == ErrorConvention::APriori ? "a_priori" : "a_posteriori";
    break;
  case ReceiverKind::Sg: j["sg_step"] = rc.sg_step; break;
  case ReceiverKind::Rake: break;
  }
  return j;
}

Json scenario_json(ScenarioConfig const &c)
{
  Json j;
  j["N"]                = c.N;
  j["L_p"]              = c.path_powers_db.size();
  j["K_initial"]        = c.K_initial;
  j["power_offsets_db"] = c.power_offsets_db;
  j["snr_db"]           = c.snr_db;
  j["channel_model"]    = c.channel_model == ChannelModel::Static ? "static" : "jakes";
  j["path_powers_db"]   = c.path_powers_db;
  j["f_dT"]             = c.f_dT;
  j["receivers"]        = Json::array();
  for (auto const &rc : c.receivers) { j["receivers"].push_back(receiver_json(rc)); }
  j["training_symbols"] = c.training_symbols;
  j["total_symbols"]    = c.total_symbols;
  j["events"]           = Json::array();
  for (auto const &e : c.events) { j["events"].push_back({{"symbol", e.symbol}, {"power_offsets_db", e.power_offsets_db}}); }
  j["runs"] = c.runs;
  j["seed"] = c.seed;
  if (c.code_file) { j["code_file"] = *c.code_file; }
  return j;
}

Json case_json(ExperimentCase const &ec)
{
  Json j;
  if (!ec.label.empty()) { j["label"] = ec.label; }
  if (ec.sweep_axis) { j["sweep"] = {{"axis", *ec.sweep_axis}, {"values", ec.sweep_values}}; }
  if (ec.analytical) { j["analytical"] = true; }
  j.update(scenario_json(ec.config));
  return j;
}

// ---------------------------------------------------------------------------------------------
// Presets

ReceiverConfig fixed_rx(double lambda)
{
  ReceiverConfig rc;
  rc.kind         = ReceiverKind::Fixed;
  rc.fixed.lambda = lambda;
  return rc;
}

ReceiverConfig gvff_rx(double mu, double lo, double hi, double l0)
{
  ReceiverConfig rc;
  rc.kind = ReceiverKind::Gvff;
  rc.gvff = {mu, lo, hi, l0};
  return rc;
}

ReceiverConfig ctvff_rx(double d1, double d2, double d3)
{
  ReceiverConfig rc;
  rc.kind  = ReceiverKind::Ctvff;
  rc.ctvff = {d1, d2, d3, 0.98, 0.99998};
  return rc;
}

ReceiverConfig sg_rx()
{
  ReceiverConfig rc;
  rc.kind = ReceiverKind::Sg;
  return rc;
}

ReceiverConfig rake_rx()
{
  ReceiverConfig rc;
  rc.kind = ReceiverKind::Rake;
  return rc;
}

ScenarioConfig base(int K, std::vector<double> offsets = {})
{
  ScenarioConfig c;
  c.N                = 15;
  c.K_initial        = K;
  c.power_offsets_db = std::move(offsets);
  c.snr_db           = 15.0;
  c.path_powers_db   = {0.0, -6.0, -10.0};
  c.f_dT             = 1e-5;
  c.training_symbols = 250;
  c.total_symbols    = 2000;
  c.runs             = 200;
  c.seed             = 1;
  return c;
}

ExperimentCase single(ScenarioConfig c) { return {"", std::move(c), std::nullopt, {}, false}; }

Preset fig4()
{
  auto c = base(6, {3, 3, 6, 0, 0});
  c.events = {{1000, {3, 3, 6, 0}}};
  c.receivers = {ctvff_rx(0.934, 0.005, 0.99), gvff_rx(0.0025, 0.992, 0.99998, 0.998), fixed_rx(0.997), sg_rx()};
  return {"fig4", "SINR versus symbols, nonstationary fading scenario with entering interferers", {single(c)},
          {"sg_step = 0.025 (SG step size not stated)"}};
}

Preset fig5()
{
  auto p        = fig4();
  p.name        = "fig5";
  p.description = "CTVFF forgetting factor trace in the nonstationary scenario";
  p.cases[0].config.receivers = {ctvff_rx(0.934, 0.005, 0.99)};
  p.assumed.clear();
  return p;
}

Preset fig6()
{
  auto c           = base(6);
  c.channel_model  = ChannelModel::Static;
  c.path_powers_db = {0.0, -3.0, -6.0};
  c.receivers = {ctvff_rx(0.9879, 0.001, 0.99), gvff_rx(0.006, 0.992, 0.99998, 0.998), fixed_rx(0.9995), sg_rx()};
  return {"fig6", "SINR versus symbols, static channel, six equal-power users", {single(c)},
          {"sg_step = 0.025 (SG step size not stated)", "total_symbols = 2000 (run length not stated)"}};
}

Preset fig7()
{
  auto c          = base(5);
  c.total_symbols = 1500;
  c.receivers     = {ctvff_rx(0.988, 0.001, 0.99), gvff_rx(0.003, 0.993, 0.99998, 0.998), fixed_rx(0.997), sg_rx()};
  ExperimentCase ec{"", c, "f_dT", {1e-5, 5e-5, 1e-4, 2e-4, 5e-4, 1e-3}, false};
  return {"fig7", "BER versus normalised Doppler", {ec},
          {"fixed lambda = 0.997 at every f_dT (per-point tuned values not stated)",
           "gvff lambda0 = 0.998 (not stated)", "sg_step = 0.025 (SG step size not stated)",
           "f_dT grid 1e-5 .. 1e-3 (grid not stated)"}};
}

ScenarioConfig fig8_base()
{
  auto c          = base(5);
  c.f_dT          = 1e-4;
  c.total_symbols = 1500;
  c.receivers     = {ctvff_rx(0.988, 0.001, 0.99), gvff_rx(0.003, 0.993, 0.99998, 0.998), fixed_rx(0.997), sg_rx(),
                     rake_rx()};
  return c;
}

std::vector<std::string> fig8_assumed()
{
  return {"receiver parameters taken from the fading-rate experiment (not stated)", "fixed lambda = 0.997",
          "sg_step = 0.025 (SG step size not stated)"};
}

Preset fig8a()
{
  auto a = fig8_assumed();
  a.push_back("K = 5 (user count not stated)");
  a.push_back("SNR grid 0 .. 20 dB (grid not stated)");
  return {"fig8a", "BER versus SNR, f_dT = 1e-4", {{"", fig8_base(), "SNR", {0, 4, 8, 12, 16, 20}, false}}, a};
}

Preset fig8b()
{
  auto a = fig8_assumed();
  a.push_back("SNR = 15 dB (not stated)");
  a.push_back("K grid 2 .. 12 (grid not stated)");
  return {"fig8b", "BER versus number of users, f_dT = 1e-4", {{"", fig8_base(), "K", {2, 4, 6, 8, 10, 12}, false}}, a};
}

std::pair<ScenarioConfig, ScenarioConfig> analysis_pair()
{
  auto s          = base(4);
  s.channel_model = ChannelModel::Static;
  s.receivers     = {ctvff_rx(0.99, 0.0035, 0.995)};
  auto t          = base(4);
  t.receivers     = {ctvff_rx(0.99, 0.0004, 0.99)};
  return {s, t};
}

Preset fig9()
{
  auto [s, t] = analysis_pair();
  return {"fig9", "Simulated versus analytical MSE, static and fading channels",
          {{"static", s, std::nullopt, {}, true}, {"tracking", t, std::nullopt, {}, true}},
          {"total_symbols = 2000 (run length not stated)"}};
}

Preset fig10()
{
  auto [s, t]     = analysis_pair();
  s.total_symbols = 1500;
  t.total_symbols = 1500;
  std::vector<double> snr{0, 5, 10, 15, 20};
  return {"fig10", "Steady-state MSE versus SNR, simulated and analytical",
          {{"static", s, "SNR", snr, true}, {"tracking", t, "SNR", snr, true}},
          {"SNR grid 0 .. 20 dB (grid not stated)",
           "delta parameters taken from the simulated-versus-analytical MSE experiment (not stated)"}};
}

Preset sweep_delta()
{
  Preset p{"sweep-delta", "Steady-state SINR versus delta1 for several delta2, static channel, K = 6", {},
           {"delta1 grid 0.90 .. 0.995 (grid not stated)"}};
  for (double d2 : {0.015, 0.005, 0.001, 0.0005, 0.0001}) {
    auto c          = base(6);
    c.channel_model = ChannelModel::Static;
    c.receivers     = {ctvff_rx(0.934, d2, 0.99)};
    std::ostringstream label;
    label << "delta2=" << d2;
    p.cases.push_back({label.str(), c, "delta1", {0.90, 0.92, 0.94, 0.96, 0.97, 0.98, 0.985, 0.99, 0.995}, false});
  }
  return p;
}

} // namespace

// ---------------------------------------------------------------------------------------------

std::vector<std::string> preset_names()
{
  return {"fig4", "fig5", "fig6", "fig7", "fig8a", "fig8b", "fig9", "fig10", "sweep-delta"};
}

Preset find_preset(std::string_view name)
{
  if (name == "fig4") { return fig4(); }
  if (name == "fig5") { return fig5(); }
  if (name == "fig6") { return fig6(); }
  if (name == "fig7") { return fig7(); }
  if (name == "fig8a") { return fig8a(); }
  if (name == "fig8b") { return fig8b(); }
  if (name == "fig9") { return fig9(); }
  if (name == "fig10") { return fig10(); }
  if (name == "sweep-delta") { return sweep_delta(); }
  std::string known;
  for (auto const &n : preset_names()) { known += (known.empty() ? "" : ", ") + n; }
  throw ConfigError({"unknown preset '" + std::string(name) + "' (known: " + known + ")"});
}

std::string to_json(ScenarioConfig const &config, int indent) { return scenario_json(config).dump(indent); }

std::string to_json(std::vector<ExperimentCase> const &cases, int indent)
{
  if (cases.size() == 1) { return case_json(cases.front()).dump(indent); }
  Json j;
  j["cases"] = Json::array();
  for (auto const &ec : cases) { j["cases"].push_back(case_json(ec)); }
  return j.dump(indent);
}

std::vector<ExperimentCase> parse_experiment(std::string_view text)
{
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (nlohmann::json::parse_error const &e) {
    throw ConfigError({std::string("not valid JSON: ") + e.what()});
  }

  std::vector<std::string>    errs;
  Reader                      rd(errs);
  std::vector<ExperimentCase> cases;
  if (doc.is_object() && doc.contains("cases")) {
    rd.only(doc, {"cases"}, "");
    if (!doc["cases"].is_array() || doc["cases"].empty()) {
      rd.error("cases: must be a non-empty array");
    } else {
      for (std::size_t i = 0; i < doc["cases"].size(); ++i) {
        cases.push_back(read_case(doc["cases"][i], "cases[" + std::to_string(i) + "].", rd));
      }
    }
  } else {
    cases.push_back(read_case(doc, "", rd));
  }

  if (errs.empty()) {
    for (std::size_t i = 0; i < cases.size(); ++i) {
      std::string const prefix = cases.size() > 1 ? "cases[" + std::to_string(i) + "]: " : "";
      for (auto const &e : validation_errors(cases[i].config)) { errs.push_back(prefix + e); }
      bool has_ctvff = false;
      for (auto const &rc : cases[i].config.receivers) { has_ctvff |= rc.kind == ReceiverKind::Ctvff; }
      if (cases[i].analytical && !has_ctvff) { errs.push_back(prefix + "analytical: needs a ctvff receiver"); }
    }
  }
  if (!errs.empty()) { throw ConfigError(std::move(errs)); }
  return cases;
}

std::vector<ExperimentCase> load_experiment(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in) { throw ConfigError({"cannot open config file '" + path.string() + "': file not found or unreadable"}); }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str());
}

} // namespace vffrls
