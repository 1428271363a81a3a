#include "vffrls/scenario.hpp"

#include <cmath>
#include <sstream>

#include "vffrls/error.hpp"
#include "vffrls/signal_model.hpp"

namespace vffrls {

ReceiverKind parse_receiver_kind(std::string_view name)
{
  if (name == "fixed") { return ReceiverKind::Fixed; }
  if (name == "gvff") { return ReceiverKind::Gvff; }
  if (name == "ctvff") { return ReceiverKind::Ctvff; }
  if (name == "sg") { return ReceiverKind::Sg; }
  if (name == "rake") { return ReceiverKind::Rake; }
  throw UnsupportedMechanism("unsupported receiver '" + std::string(name) + "'");
}

std::string_view to_string(ReceiverKind kind)
{
  switch (kind) {
  case ReceiverKind::Fixed: return "fixed";
  case ReceiverKind::Gvff: return "gvff";
  case ReceiverKind::Ctvff: return "ctvff";
  case ReceiverKind::Sg: return "sg";
  case ReceiverKind::Rake: return "rake";
  }
  return "unknown";
}

int ScenarioConfig::total_users() const
{
  int k = K_initial;
  for (auto const &e : events) { k += static_cast<int>(e.power_offsets_db.size()); }
  return k;
}

double ScenarioConfig::noise_variance() const { return db_to_linear(-snr_db); }

namespace {

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

void check_receiver(ReceiverConfig const &rc, std::size_t idx, std::vector<std::string> &errs)
{
  std::string const where = "receivers[" + std::to_string(idx) + "] (" + rc.label() + "): ";
  auto bounds = [&](double lo, double hi) {
    if (!(lo > 0.0 && lo <= hi && hi <= 1.0)) { errs.push_back(where + "need 0 < lambda_minus <= lambda_plus <= 1"); }
  };
  switch (rc.kind) {
  case ReceiverKind::Fixed:
    if (!(rc.fixed.lambda > 0.0 && rc.fixed.lambda <= 1.0)) { errs.push_back(where + "lambda must lie in (0, 1]"); }
    break;
  case ReceiverKind::Ctvff:
    if (!in_open_unit(rc.ctvff.delta1)) { errs.push_back(where + "delta1 must lie in (0, 1)"); }
    if (!(rc.ctvff.delta2 > 0.0)) { errs.push_back(where + "delta2 must be > 0"); }
    if (!in_open_unit(rc.ctvff.delta3)) { errs.push_back(where + "delta3 must lie in (0, 1)"); }
    bounds(rc.ctvff.lambda_minus, rc.ctvff.lambda_plus);
    break;
  case ReceiverKind::Gvff:
    if (!(rc.gvff.mu >= 0.0)) { errs.push_back(where + "mu must be >= 0"); }
    bounds(rc.gvff.lambda_minus, rc.gvff.lambda_plus);
    if (!(rc.gvff.lambda0 >= rc.gvff.lambda_minus && rc.gvff.lambda0 <= rc.gvff.lambda_plus)) {
      errs.push_back(where + "lambda0 must lie in [lambda_minus, lambda_plus]");
    }
    break;
  case ReceiverKind::Sg:
    if (!(rc.sg_step > 0.0)) { errs.push_back(where + "sg_step must be > 0"); }
    break;
  case ReceiverKind::Rake: break;
  }
}

} // namespace

std::vector<std::string> validation_errors(ScenarioConfig const &c)
{
  std::vector<std::string> errs;
  if (c.N < 2) { errs.push_back("N must be >= 2"); }
  if (c.K_initial < 1) { errs.push_back("K_initial must be >= 1"); }
  if (static_cast<int>(c.power_offsets_db.size()) > std::max(0, c.K_initial - 1)) {
    errs.push_back("power_offsets_db lists more interferers than K_initial - 1");
  }
  if (c.path_powers_db.empty()) { errs.push_back("path_powers_db must name at least one path (L_p >= 1)"); }
  for (double p : c.path_powers_db) {
    if (!std::isfinite(p)) { errs.push_back("path_powers_db entries must be finite"); }
  }
  if (!std::isfinite(c.snr_db)) { errs.push_back("snr_db must be finite"); }
  if (c.channel_model == ChannelModel::Jakes && !(c.f_dT >= 0.0)) { errs.push_back("f_dT must be >= 0"); }
  if (c.total_symbols < 1) { errs.push_back("total_symbols must be >= 1"); }
  if (c.training_symbols < 0) { errs.push_back("training_symbols must be >= 0"); }
  if (c.training_symbols > c.total_symbols) { errs.push_back("training_symbols must not exceed total_symbols"); }
  if (c.runs < 1) { errs.push_back("runs must be >= 1"); }
  if (c.receivers.empty()) { errs.push_back("receivers must list at least one receiver"); }

  std::int64_t last = 0;
  for (std::size_t e = 0; e < c.events.size(); ++e) {
    auto const &ev = c.events[e];
    if (ev.symbol <= last) { errs.push_back("events[" + std::to_string(e) + "].symbol must be strictly increasing and > 0"); }
    if (ev.symbol >= c.total_symbols) { errs.push_back("events[" + std::to_string(e) + "].symbol must be < total_symbols"); }
    if (ev.power_offsets_db.empty()) { errs.push_back("events[" + std::to_string(e) + "] adds no users"); }
    last = ev.symbol;
  }

  if (c.N >= 2 && !c.code_file) {
    auto const cap = code_family_capacity(c.N);
    if (static_cast<std::size_t>(std::max(c.total_users(), 0)) > cap) {
      errs.push_back("total users " + std::to_string(c.total_users()) + " exceed the code family capacity " +
                     std::to_string(cap) + " at N=" + std::to_string(c.N));
    }
  }

  for (std::size_t i = 0; i < c.receivers.size(); ++i) { check_receiver(c.receivers[i], i, errs); }
  return errs;
}

void require_valid(ScenarioConfig const &config)
{
  auto errs = validation_errors(config);
  if (!errs.empty()) { throw ConfigError(std::move(errs)); }
}

} // namespace vffrls
