#include "vffrls/harness.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "vffrls/error.hpp"
#include "vffrls/parallel.hpp"

namespace vffrls {

namespace {

constexpr std::uint64_t kNoiseStream   = 2;
constexpr std::uint64_t kChannelStream = 1;
constexpr std::uint64_t kSymbolStream  = 100;
constexpr std::uint64_t kTrialStream   = 0x7000;
constexpr std::uint64_t kQStream       = 0x51;

double const kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x)
{
  if (std::isnan(x)) { return "nan"; }
  if (std::isinf(x)) { return x > 0 ? "inf" : "-inf"; }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

} // namespace

// ---------------------------------------------------------------------------------------------

std::vector<SpreadingCode> scenario_codes(ScenarioConfig const &config)
{
  int const K = config.total_users();
  if (config.code_file) {
    auto codes = load_codes(*config.code_file);
    if (static_cast<int>(codes.size()) < K) {
      throw CapacityError("code file holds " + std::to_string(codes.size()) + " codes, scenario needs " +
                          std::to_string(K));
    }
    if (codes.front().length() != config.N) { throw ConfigError({"code file length differs from N"}); }
    codes.resize(static_cast<std::size_t>(K));
    return codes;
  }
  return gen_spreading_codes(K, config.N, config.seed).codes;
}

RealVector scenario_amplitudes(ScenarioConfig const &config)
{
  RealVector A(config.total_users());
  Index      k = 0;
  A[k++]       = 1.0;
  for (int u = 1; u < config.K_initial; ++u) {
    auto const idx = static_cast<std::size_t>(u - 1);
    double     db  = idx < config.power_offsets_db.size() ? config.power_offsets_db[idx] : 0.0;
    A[k++]         = std::sqrt(db_to_linear(db));
  }
  for (auto const &ev : config.events) {
    for (double db : ev.power_offsets_db) { A[k++] = std::sqrt(db_to_linear(db)); }
  }
  return A;
}

ChannelState trial_channel(ScenarioConfig const &config, std::uint64_t seed)
{
  if (config.channel_model == ChannelModel::Static) { return make_static_channel(config.path_powers_db); }
  Rng rng(child_seed(seed, kChannelStream));
  return make_jakes_channel(config.path_powers_db, config.f_dT, rng);
}

std::uint64_t trial_seed(ScenarioConfig const &config, int run)
{
  return child_seed(config.seed, kTrialStream + static_cast<std::uint64_t>(run));
}

std::unique_ptr<Receiver> make_receiver(ReceiverConfig const &rc, Index M)
{
  switch (rc.kind) {
  case ReceiverKind::Fixed: return std::make_unique<FixedRlsReceiver>(M, rc.fixed);
  case ReceiverKind::Gvff: return std::make_unique<GvffRlsReceiver>(M, rc.gvff);
  case ReceiverKind::Ctvff: return std::make_unique<CtvffRlsReceiver>(M, rc.ctvff, rc.convention);
  case ReceiverKind::Sg: return std::make_unique<SgReceiver>(M, rc.sg_step);
  case ReceiverKind::Rake: return std::make_unique<RakeReceiver>(M);
  }
  throw UnsupportedMechanism("unsupported receiver");
}

// ---------------------------------------------------------------------------------------------

ScenarioSimulator::ScenarioSimulator(ScenarioConfig config, std::uint64_t seed)
  : config_(std::move(config))
  , codes_(scenario_codes(config_))
  , amplitudes_(scenario_amplitudes(config_))
  , channel_(trial_channel(config_, seed))
  , noise_rng_(child_seed(seed, kNoiseStream))
{
  first_symbol_.assign(static_cast<std::size_t>(config_.K_initial), 1);
  for (auto const &ev : config_.events) { first_symbol_.insert(first_symbol_.end(), ev.power_offsets_db.size(), ev.symbol + 1); }

  std::bernoulli_distribution coin(0.5);
  symbols_.resize(codes_.size());
  for (std::size_t k = 0; k < codes_.size(); ++k) {
    Rng rng(child_seed(seed, kSymbolStream + k));
    symbols_[k].resize(static_cast<std::size_t>(config_.total_symbols + 2));
    for (auto &b : symbols_[k]) { b = coin(rng) ? 1 : -1; }
  }
}

int ScenarioSimulator::active_at(std::int64_t symbol) const
{
  int n = 0;
  while (n < static_cast<int>(first_symbol_.size()) && first_symbol_[static_cast<std::size_t>(n)] <= symbol) { ++n; }
  return n;
}

void ScenarioSimulator::refresh_environment(int active)
{
  std::vector<SpreadingCode> const live(codes_.begin(), codes_.begin() + active);
  RealVector const                 amps = amplitudes_.head(active);
  columns_                                = signal_columns(live, channel_, amps);
  env_                                    = env_from_columns(columns_, amps, config_.noise_variance(), 0);
  env_users_                              = active;
}

SymbolFrame const &ScenarioSimulator::next()
{
  symbol_ += 1;
  if (symbol_ > 1) { channel_ = jakes_step(std::move(channel_)); }

  int const active = active_at(symbol_);
  if (channel_.fading || active != env_users_) { refresh_environment(active); }

  auto const i = static_cast<std::size_t>(symbol_);
  CxVector   beta(3 * active);
  for (int k = 0; k < active; ++k) {
    auto const &b   = symbols_[static_cast<std::size_t>(k)];
    beta[3 * k]     = b[i];
    beta[3 * k + 1] = b[i - 1];
    beta[3 * k + 2] = b[i + 1];
  }
  frame_.r = columns_ * beta;
  add_noise(frame_.r, config_.noise_variance(), noise_rng_);

  frame_.symbol         = symbol_;
  frame_.desired_symbol = symbols_[0][i];
  frame_.training       = symbol_ <= config_.training_symbols;
  frame_.active_users   = active;
  frame_.env            = &env_;
  return frame_;
}

// ---------------------------------------------------------------------------------------------

AlgorithmTrace const &MetricsTrace::at(std::string_view algorithm) const
{
  for (auto const &a : algorithms) {
    if (a.algorithm == algorithm) { return a; }
  }
  throw Error("no trace for algorithm '" + std::string(algorithm) + "'");
}

double sinr_of(CxVector const &w, AnalyticalEnv const &env)
{
  double const A      = env.amplitudes[env.desired];
  double const signal = A * A * std::norm(w.dot(env.signature));
  double const total  = std::real(w.dot(env.Rbar * w));
  if (!(total > 0.0) || signal <= 1e-24 * total) { return -std::numeric_limits<double>::infinity(); }
  double const rest = total - signal;
  if (rest <= 1e-12 * total) { return std::numeric_limits<double>::infinity(); }
  return linear_to_db(signal / rest);
}

MetricsTrace run_trial(ScenarioConfig const &config, std::uint64_t seed)
{
  ScenarioSimulator sim(config, seed);
  Index const       M = config.filter_length();
  auto const        T = static_cast<std::size_t>(config.total_symbols);

  std::vector<std::unique_ptr<Receiver>> receivers;
  MetricsTrace                           out;
  out.runs = 1;
  for (auto const &rc : config.receivers) {
    receivers.push_back(make_receiver(rc, M));
    AlgorithmTrace t;
    t.algorithm = rc.label();
    t.runs      = 1;
    t.sinr_db.reserve(T);
    t.mse.reserve(T);
    t.lambda.reserve(T);
    t.ops.reserve(T);
    out.algorithms.push_back(std::move(t));
  }

  while (!sim.done()) {
    auto const              &frame = sim.next();
    std::optional<int> const training =
      frame.training ? std::optional<int>(frame.desired_symbol) : std::nullopt;
    for (std::size_t a = 0; a < receivers.size(); ++a) {
      auto &trace = out.algorithms[a];
      if (trace.diverged_runs) { continue; }
      SymbolReport rep;
      try {
        rep = receivers[a]->process(frame.r, training, *frame.env);
      } catch (NumericalDivergence const &) {
        trace.diverged_runs = 1;
        continue;
      }
      trace.mse.push_back(std::norm(Cx(frame.desired_symbol, 0.0) - rep.z));
      trace.sinr_db.push_back(sinr_of(receivers[a]->filter(), *frame.env));
      trace.lambda.push_back(rep.lambda);
      trace.ops.push_back(receivers[a]->extra_ops());
      if (!frame.training) {
        trace.dd_symbols += 1;
        trace.dd_errors += rep.decision != frame.desired_symbol ? 1 : 0;
      }
    }
  }

  for (auto &t : out.algorithms) {
    if (t.dd_symbols > 0) { t.ber = static_cast<double>(t.dd_errors) / static_cast<double>(t.dd_symbols); }
    if (t.diverged_runs) { out.diverged_runs = 1; }
  }
  return out;
}

MetricsTrace run_monte_carlo(ScenarioConfig const &config)
{
  require_valid(config);
  auto const  T = static_cast<std::size_t>(config.total_symbols);
  std::size_t A = config.receivers.size();

  struct Accumulator
  {
    std::vector<double>  sinr_lin, mse, lambda;
    std::vector<OpCount> ops;
    std::int64_t         dd_symbols = 0, dd_errors = 0;
    int                  runs = 0, diverged = 0;
  };
  std::vector<Accumulator> acc(A);
  for (auto &a : acc) {
    a.sinr_lin.assign(T, 0.0);
    a.mse.assign(T, 0.0);
    a.lambda.assign(T, 0.0);
  }
  int trials_diverged = 0;

  ordered_parallel(
    config.runs, [&](std::int64_t r) { return run_trial(config, trial_seed(config, static_cast<int>(r))); },
    [&](std::int64_t, MetricsTrace trial) {
      trials_diverged += trial.diverged_runs;
      for (std::size_t a = 0; a < A; ++a) {
        auto const &t = trial.algorithms[a];
        auto       &s = acc[a];
        if (t.diverged_runs) {
          s.diverged += 1;
          continue;
        }
        for (std::size_t i = 0; i < T; ++i) {
          s.sinr_lin[i] += std::pow(10.0, t.sinr_db[i] / 10.0);
          s.mse[i] += t.mse[i];
          s.lambda[i] += t.lambda[i];
        }
        if (s.ops.empty()) { s.ops = t.ops; }
        s.dd_symbols += t.dd_symbols;
        s.dd_errors += t.dd_errors;
        s.runs += 1;
      }
    });

  MetricsTrace out;
  out.runs          = config.runs;
  out.diverged_runs = trials_diverged;
  bool any          = false;
  for (std::size_t a = 0; a < A; ++a) {
    auto          &s = acc[a];
    AlgorithmTrace t;
    t.algorithm     = config.receivers[a].label();
    t.runs          = s.runs;
    t.diverged_runs = s.diverged;
    t.dd_symbols    = s.dd_symbols;
    t.dd_errors     = s.dd_errors;
    if (s.runs > 0) {
      any            = true;
      double const n = s.runs;
      t.sinr_db.resize(T);
      t.mse.resize(T);
      t.lambda.resize(T);
      for (std::size_t i = 0; i < T; ++i) {
        t.sinr_db[i] = linear_to_db(s.sinr_lin[i] / n);
        t.mse[i]     = s.mse[i] / n;
        t.lambda[i]  = s.lambda[i] / n;
      }
      t.ops = std::move(s.ops);
      if (s.dd_symbols > 0) { t.ber = static_cast<double>(s.dd_errors) / static_cast<double>(s.dd_symbols); }
    } else {
      t.sinr_db.assign(T, kNaN);
      t.mse.assign(T, kNaN);
      t.lambda.assign(T, kNaN);
      t.ops.assign(T, OpCount{});
    }
    out.algorithms.push_back(std::move(t));
  }
  if (!any) { throw EmptyAverage("every trial diverged; nothing to average"); }
  return out;
}

SteadyState window_mean(AlgorithmTrace const &trace, std::int64_t first, std::int64_t last)
{
  auto const n = static_cast<std::int64_t>(trace.mse.size());
  first        = std::max<std::int64_t>(first, 1);
  last         = std::min(last, n);
  if (first > last) { throw DomainError("empty averaging window"); }
  double sinr = 0.0, mse = 0.0, lambda = 0.0;
  for (std::int64_t i = first; i <= last; ++i) {
    auto const k = static_cast<std::size_t>(i - 1);
    sinr += std::pow(10.0, trace.sinr_db[k] / 10.0);
    mse += trace.mse[k];
    lambda += trace.lambda[k];
  }
  double const count = static_cast<double>(last - first + 1);
  return {linear_to_db(sinr / count), mse / count, lambda / count};
}

SteadyState steady_state(AlgorithmTrace const &trace, double fraction)
{
  auto const n     = static_cast<std::int64_t>(trace.mse.size());
  auto const width = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(fraction * static_cast<double>(n))));
  return window_mean(trace, n - width + 1, n);
}

// ---------------------------------------------------------------------------------------------

SweepAxis parse_sweep_axis(std::string_view name)
{
  if (name == "delta1") { return SweepAxis::Delta1; }
  if (name == "delta2") { return SweepAxis::Delta2; }
  if (name == "delta3") { return SweepAxis::Delta3; }
  if (name == "SNR" || name == "snr") { return SweepAxis::Snr; }
  if (name == "K") { return SweepAxis::K; }
  if (name == "f_dT") { return SweepAxis::FdT; }
  if (name == "lambda") { return SweepAxis::Lambda; }
  throw UnsupportedAxis("unsupported sweep axis '" + std::string(name) + "'");
}

std::string_view to_string(SweepAxis axis)
{
  switch (axis) {
  case SweepAxis::Delta1: return "delta1";
  case SweepAxis::Delta2: return "delta2";
  case SweepAxis::Delta3: return "delta3";
  case SweepAxis::Snr: return "SNR";
  case SweepAxis::K: return "K";
  case SweepAxis::FdT: return "f_dT";
  case SweepAxis::Lambda: return "lambda";
  }
  return "unknown";
}

ScenarioConfig with_axis(ScenarioConfig config, SweepAxis axis, double value)
{
  for (auto &rc : config.receivers) {
    if (rc.kind == ReceiverKind::Ctvff) {
      if (axis == SweepAxis::Delta1) { rc.ctvff.delta1 = value; }
      if (axis == SweepAxis::Delta2) { rc.ctvff.delta2 = value; }
      if (axis == SweepAxis::Delta3) { rc.ctvff.delta3 = value; }
    }
    if (rc.kind == ReceiverKind::Fixed && axis == SweepAxis::Lambda) { rc.fixed.lambda = value; }
  }
  if (axis == SweepAxis::Snr) { config.snr_db = value; }
  if (axis == SweepAxis::K) { config.K_initial = static_cast<int>(std::lround(value)); }
  if (axis == SweepAxis::FdT) { config.f_dT = value; }
  return config;
}

std::vector<SweepRow> sweep(ScenarioConfig const &config, std::string_view axis_name, std::vector<double> const &values)
{
  SweepAxis const       axis = parse_sweep_axis(axis_name);
  std::vector<SweepRow> rows;
  for (double v : values) {
    auto const trace = run_monte_carlo(with_axis(config, axis, v));
    for (auto const &t : trace.algorithms) {
      if (t.runs == 0) { continue; }
      rows.push_back({v, t.algorithm, steady_state(t, 0.2), t.ber});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------------------------

FadingScenario fading_scenario(ScenarioConfig const &config, std::int64_t horizon)
{
  FadingScenario fs;
  fs.codes          = scenario_codes(config);
  fs.amplitudes     = scenario_amplitudes(config);
  fs.path_powers_db = config.path_powers_db;
  fs.f_dT           = config.f_dT;
  fs.sigma_sq       = config.noise_variance();
  fs.horizon        = horizon;
  fs.seed           = child_seed(config.seed, kQStream);
  fs.fading         = config.channel_model == ChannelModel::Jakes;
  return fs;
}

ScenarioPrediction predict_scenario(ScenarioConfig const &config, std::int64_t q_experiments)
{
  require_valid(config);
  ReceiverConfig const *ctvff = nullptr;
  for (auto const &rc : config.receivers) {
    if (rc.kind == ReceiverKind::Ctvff) {
      ctvff = &rc;
      break;
    }
  }
  if (!ctvff) { throw ConfigError({"analytical prediction needs a ctvff receiver"}); }
  auto const &p = ctvff->ctvff;

  auto const   codes = scenario_codes(config);
  auto const   amps  = scenario_amplitudes(config);
  double const sigma = config.noise_variance();
  Index const  M     = config.filter_length();

  ScenarioPrediction out;
  out.M = M;
  if (config.channel_model == ChannelModel::Static) {
    auto const env = compute_analytical_env(codes, frozen(make_static_channel(config.path_powers_db)), amps, sigma);
    auto const lam = predict_lambda_inf(p.delta1, p.delta2, p.delta3, env.xi_min);
    out.xi_min     = env.xi_min;
    out.sigma0_sq  = env.sigma0_sq;
    out.ctvff      = {lam.gamma_inf, lam.lambda_inf, predict_ss_mse(lam.lambda_inf, env.sigma0_sq, M, env.xi_min), {}};
    return out;
  }

  CxMatrix const Q    = estimate_q_covariance(fading_scenario(config), q_experiments).Q;
  CxMatrix       Rbar = CxMatrix::Zero(M, M);
  double         xi = 0, s0 = 0;
  for (int r = 0; r < config.runs; ++r) {
    ChannelState ch   = trial_channel(config, trial_seed(config, r));
    CxVector     mean = CxVector::Zero(ch.paths());
    for (std::int64_t i = 1; i <= config.total_symbols; ++i) { mean += jakes_gains(ch.oscillators, i); }
    ch.h = ch.power_profile.cast<Cx>().cwiseProduct(mean / static_cast<double>(config.total_symbols));
    auto const env = compute_analytical_env(codes, frozen(ch), amps, sigma);
    xi += env.xi_min;
    s0 += env.sigma0_sq;
    Rbar += env.Rbar;
  }
  double const n = config.runs;
  Rbar /= n;
  out.xi_min     = xi / n;
  out.sigma0_sq  = s0 / n;
  out.trace_RQ   = std::real((Rbar * Q).trace());
  auto const lam = predict_lambda_inf(p.delta1, p.delta2, p.delta3, out.xi_min);
  out.ctvff      = {lam.gamma_inf, lam.lambda_inf, predict_ss_mse(lam.lambda_inf, out.sigma0_sq, M, out.xi_min),
                    predict_tracking_mse(lam.lambda_inf, out.sigma0_sq, M, out.xi_min, Rbar, Q)};
  return out;
}

// ---------------------------------------------------------------------------------------------

void write_trace_header(std::ostream &out) { out << "symbol,algorithm,sinr_db,mse,lambda,mult_ops,add_ops,source\n"; }

void write_trace_rows(std::ostream &out, MetricsTrace const &trace, std::string const &suffix)
{
  for (auto const &t : trace.algorithms) {
    for (std::size_t i = 0; i < t.mse.size(); ++i) {
      out << (i + 1) << ',' << t.algorithm << suffix << ',' << num(t.sinr_db[i]) << ',' << num(t.mse[i]) << ','
          << num(t.lambda[i]) << ',' << t.ops[i].mult << ',' << t.ops[i].add << ",simulated\n";
    }
  }
}

void write_prediction_rows(std::ostream             &out,
                           ScenarioPrediction const &prediction,
                           std::int64_t              total_symbols,
                           std::string const        &suffix)
{
  double const mse = prediction.ctvff.tracking_mse.value_or(prediction.ctvff.ss_mse);
  for (std::int64_t i = 1; i <= total_symbols; ++i) {
    out << i << ",ctvff" << suffix << ",," << num(mse) << ',' << num(prediction.ctvff.lambda_inf) << ",,,analytical\n";
  }
}

void write_sweep_header(std::ostream &out) { out << "axis_value,statistic,value,algorithm,source\n"; }

void write_sweep_rows(std::ostream &out, std::vector<SweepRow> const &rows, std::string const &suffix)
{
  for (auto const &r : rows) {
    auto const v = num(r.axis_value);
    auto const a = r.algorithm + suffix;
    out << v << ",sinr_db," << num(r.steady.sinr_db) << ',' << a << ",simulated\n";
    out << v << ",mse," << num(r.steady.mse) << ',' << a << ",simulated\n";
    out << v << ",lambda," << num(r.steady.lambda) << ',' << a << ",simulated\n";
    out << v << ",ber," << (r.ber ? num(*r.ber) : std::string("nan")) << ',' << a << ",simulated\n";
  }
}

void write_sweep_prediction_rows(std::ostream &out, double axis_value, ScenarioPrediction const &prediction,
                                 std::string const &suffix)
{
  auto const v   = num(axis_value);
  double const m = prediction.ctvff.tracking_mse.value_or(prediction.ctvff.ss_mse);
  out << v << ",mse," << num(m) << ",ctvff" << suffix << ",analytical\n";
  out << v << ",lambda," << num(prediction.ctvff.lambda_inf) << ",ctvff" << suffix << ",analytical\n";
}

} // namespace vffrls
