#include "vffrls/analysis.hpp"

#include "vffrls/error.hpp"
#include "vffrls/parallel.hpp"

namespace vffrls {

LambdaPrediction predict_lambda_inf(double delta1, double delta2, double delta3, double xi_min)
{
  if (delta1 == 1.0) { throw DomainError("delta1 = 1 makes the steady-state gamma unbounded"); }
  if (!(delta1 > 0.0 && delta1 < 1.0)) { throw DomainError("delta1 must lie in (0, 1)"); }
  if (!(delta3 > 0.0 && delta3 < 1.0)) { throw DomainError("delta3 must lie in (0, 1)"); }
  if (!(delta2 >= 0.0)) { throw DomainError("delta2 must be positive"); }
  if (!(xi_min > 0.0 && xi_min <= 1.0)) { throw DomainError("xi_min must lie in (0, 1]"); }

  double const den    = (1.0 - delta1) * (1.0 + delta3);
  double const driven = delta2 * (1.0 - delta3) * xi_min * xi_min;
  return {driven / den, den / (den + driven)};
}

double predict_ss_mse(double lambda_inf, double sigma0_sq, Index M, double xi_min)
{
  if (!(lambda_inf > 0.0 && lambda_inf <= 1.0)) { throw DomainError("lambda_inf must lie in (0, 1]"); }
  return xi_min + (1.0 - lambda_inf) / (1.0 + lambda_inf) * sigma0_sq * static_cast<double>(M);
}

double predict_tracking_mse(double          lambda_inf,
                            double          sigma0_sq,
                            Index           M,
                            double          xi_min,
                            CxMatrix const &Rbar,
                            CxMatrix const &Q)
{
  if (lambda_inf == 1.0) { throw DomainError("lambda_inf = 1 leaves the tracking lag unbounded"); }
  double const lag = std::real((Rbar * Q).trace()) / (1.0 - lambda_inf * lambda_inf);
  return predict_ss_mse(lambda_inf, sigma0_sq, M, xi_min) + lag;
}

QCovariance estimate_q_covariance(FadingScenario const &scenario, std::int64_t n_experiments)
{
  Index const M = scenario.codes.front().length() + static_cast<Index>(scenario.path_powers_db.size()) - 1;
  QCovariance out{CxMatrix::Zero(M, M), 0};
  if (!scenario.fading || scenario.f_dT == 0.0 || n_experiments <= 0) { return out; }

  auto const experiment = [&](std::int64_t e) {
    Rng          rng(child_seed(scenario.seed, static_cast<std::uint64_t>(e)));
    ChannelState channel = make_jakes_channel(scenario.path_powers_db, scenario.f_dT, rng);
    CxVector     prev    = compute_analytical_env(scenario.codes, channel, scenario.amplitudes, scenario.sigma_sq,
                                                  scenario.desired)
                      .w0;
    CxMatrix acc = CxMatrix::Zero(M, M);
    for (std::int64_t i = 0; i < scenario.horizon; ++i) {
      channel     = jakes_step(std::move(channel));
      CxVector w0 = compute_analytical_env(scenario.codes, channel, scenario.amplitudes, scenario.sigma_sq,
                                           scenario.desired)
                      .w0;
      CxVector const q = w0 - prev;
      acc.noalias() += q * q.adjoint();
      prev = std::move(w0);
    }
    return acc;
  };

  out.Q         = ordered_parallel_sum<CxMatrix>(n_experiments, experiment, CxMatrix::Zero(M, M));
  out.n_samples = n_experiments * scenario.horizon;
  out.Q /= static_cast<double>(out.n_samples);
  out.Q = (0.5 * (out.Q + out.Q.adjoint())).eval();
  return out;
}

} // namespace vffrls
