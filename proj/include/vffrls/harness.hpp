#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "analysis.hpp"
#include "receiver.hpp"
#include "scenario.hpp"

namespace vffrls {

// ---------------------------------------------------------------------------------------------
// Symbol-by-symbol scenario playback

struct SymbolFrame
{
  std::int64_t         symbol = 0; // 1-based
  CxVector             r;
  int                  desired_symbol = 1;
  bool                 training       = true;
  int                  active_users   = 0;
  AnalyticalEnv const *env            = nullptr;
};

// Codes come from the scenario seed; channel, symbols and noise from the trial seed, each on its
// own stream so that adding users never perturbs the others.
class ScenarioSimulator
{
public:
  ScenarioSimulator(ScenarioConfig config, std::uint64_t trial_seed);

  bool               done() const { return symbol_ >= config_.total_symbols; }
  SymbolFrame const &next();

  ScenarioConfig const             &config() const { return config_; }
  std::vector<SpreadingCode> const &codes() const { return codes_; }
  RealVector const                 &amplitudes() const { return amplitudes_; }
  ChannelState const               &channel() const { return channel_; }

private:
  int  active_at(std::int64_t symbol) const;
  void refresh_environment(int active);

  ScenarioConfig                    config_;
  std::vector<SpreadingCode>        codes_;
  RealVector                        amplitudes_;
  std::vector<std::int64_t>         first_symbol_; // per user
  std::vector<std::vector<int>>     symbols_;      // per user, index 0 .. total + 1
  ChannelState                      channel_;
  Rng                               noise_rng_;
  std::int64_t                      symbol_ = 0;
  int                               env_users_ = -1;
  CxMatrix                          columns_;
  AnalyticalEnv                     env_;
  SymbolFrame                       frame_;
};

// Codes for every user the scenario ever holds (code file or seeded family).
std::vector<SpreadingCode> scenario_codes(ScenarioConfig const &config);
RealVector                 scenario_amplitudes(ScenarioConfig const &config);
ChannelState               trial_channel(ScenarioConfig const &config, std::uint64_t trial_seed);
std::uint64_t              trial_seed(ScenarioConfig const &config, int run);

std::unique_ptr<Receiver> make_receiver(ReceiverConfig const &rc, Index M);

// ---------------------------------------------------------------------------------------------
// Metrics

struct AlgorithmTrace
{
  std::string           algorithm;
  std::vector<double>   sinr_db;
  std::vector<double>   mse;
  std::vector<double>   lambda;
  std::vector<OpCount>  ops; // cumulative extra operations of the mechanism
  std::optional<double> ber; // decision-directed symbols only
  std::int64_t          dd_symbols    = 0;
  std::int64_t          dd_errors     = 0;
  int                   runs          = 0;
  int                   diverged_runs = 0;
};

struct MetricsTrace
{
  std::vector<AlgorithmTrace> algorithms;
  int                         runs          = 0;
  int                         diverged_runs = 0; // trials in which any receiver diverged

  AlgorithmTrace const &at(std::string_view algorithm) const;
};

// Output SINR of a linear filter against the exact covariance, in dB:
// A^2 |w^H C h|^2 / (w^H Rbar w - A^2 |w^H C h|^2). +inf when nothing interferes, -inf without signal.
double sinr_of(CxVector const &w, AnalyticalEnv const &env);

MetricsTrace run_trial(ScenarioConfig const &config, std::uint64_t trial_seed);

// Pointwise mean over config.runs trials. SINR is averaged in the linear domain, then converted.
// Throws EmptyAverage if every trial of every receiver diverged.
MetricsTrace run_monte_carlo(ScenarioConfig const &config);

struct SteadyState
{
  double sinr_db = 0.0;
  double mse     = 0.0;
  double lambda  = 0.0;
};

// Means over the final `fraction` of the trace (SINR averaged linearly).
SteadyState steady_state(AlgorithmTrace const &trace, double fraction = 0.2);

// Means over symbols [first, last] (1-based, inclusive).
SteadyState window_mean(AlgorithmTrace const &trace, std::int64_t first, std::int64_t last);

// ---------------------------------------------------------------------------------------------
// Sweeps

enum class SweepAxis
{
  Delta1,
  Delta2,
  Delta3,
  Snr,
  K,
  FdT,
  Lambda,
};

SweepAxis        parse_sweep_axis(std::string_view name);
std::string_view to_string(SweepAxis axis);
ScenarioConfig   with_axis(ScenarioConfig config, SweepAxis axis, double value);

struct SweepRow
{
  double                axis_value = 0.0;
  std::string           algorithm;
  SteadyState           steady;
  std::optional<double> ber;
};

std::vector<SweepRow> sweep(ScenarioConfig const &config, std::string_view axis, std::vector<double> const &values);

// ---------------------------------------------------------------------------------------------
// Analytical predictions for a scenario

struct ScenarioPrediction
{
  Index           M         = 0;
  double          xi_min    = 0.0;
  double          sigma0_sq = 0.0;
  double          trace_RQ  = 0.0;
  CtvffPrediction ctvff;
};

FadingScenario fading_scenario(ScenarioConfig const &config, std::int64_t horizon = 1000);

// Uses the first CTVFF receiver's parameters and the users active at the end of the run.
// Static channels are exact. Fading channels predict once from ensemble means of xi_min, sigma_0^2
// and Rbar over the trials' time-averaged channels, with Q from `q_experiments` experiments.
// (Per-trial predictions blow up: 1 / (1 - lambda^2) is steep where xi_min is small.)
ScenarioPrediction predict_scenario(ScenarioConfig const &config, std::int64_t q_experiments = 1000);

// ---------------------------------------------------------------------------------------------
// CSV

void write_trace_header(std::ostream &out);
void write_trace_rows(std::ostream &out, MetricsTrace const &trace, std::string const &label_suffix = "");
void write_prediction_rows(std::ostream               &out,
                           ScenarioPrediction const   &prediction,
                           std::int64_t                total_symbols,
                           std::string const          &label_suffix = "");

void write_sweep_header(std::ostream &out);
void write_sweep_rows(std::ostream &out, std::vector<SweepRow> const &rows, std::string const &label_suffix = "");
void write_sweep_prediction_rows(std::ostream             &out,
                                 double                    axis_value,
                                 ScenarioPrediction const &prediction,
                                 std::string const        &label_suffix = "");

} // namespace vffrls
