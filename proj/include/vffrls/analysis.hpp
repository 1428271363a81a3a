#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "signal_model.hpp"

// Closed-form steady-state predictors for the CTVFF-driven RLS receiver.
// All MSE values are linear; conversion to dB happens only at reporting time.

namespace vffrls {

struct LambdaPrediction
{
  double gamma_inf  = 0.0; // E[gamma(inf)]
  double lambda_inf = 1.0; // E[lambda(inf)]
};

struct CtvffPrediction
{
  double                gamma_inf  = 0.0;
  double                lambda_inf = 1.0;
  double                ss_mse     = 0.0;
  std::optional<double> tracking_mse;
};

struct QCovariance
{
  CxMatrix     Q;
  std::int64_t n_samples = 0;
};

// E[gamma(inf)] = d2 (1 - d3) xi^2 / ((1 - d1)(1 + d3)) and E[lambda(inf)] = 1 / (1 + E[gamma(inf)]),
// the latter evaluated in the rational form. Throws DomainError outside d1, d3 in (0,1), d2 > 0.
LambdaPrediction predict_lambda_inf(double delta1, double delta2, double delta3, double xi_min);

// xi(inf) = xi_min + (1 - lambda)/(1 + lambda) sigma0^2 M.
double predict_ss_mse(double lambda_inf, double sigma0_sq, Index M, double xi_min);

// Steady-state MSE plus the lag term tr[Rbar Q] / (1 - lambda^2).
double predict_tracking_mse(double          lambda_inf,
                            double          sigma0_sq,
                            Index           M,
                            double          xi_min,
                            CxMatrix const &Rbar,
                            CxMatrix const &Q);

// Everything needed to evolve the optimum filter w0(i) = Rbar(i)^{-1} s(i) along a fading channel.
struct FadingScenario
{
  std::vector<SpreadingCode> codes;
  RealVector                 amplitudes;
  std::vector<double>        path_powers_db;
  double                     f_dT     = 0.0;
  double                     sigma_sq = 0.0;
  int                        desired  = 0;
  std::int64_t               horizon  = 1000; // q samples per experiment
  std::uint64_t              seed     = 1;
  bool                       fading   = true;
};

// Q = sum q(i) q^H(i) / N_e over independent channel realisations, q(i) = w0(i) - w0(i-1).
// A static scenario returns the exact zero matrix.
QCovariance estimate_q_covariance(FadingScenario const &scenario, std::int64_t n_experiments);

} // namespace vffrls
