#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "types.hpp"

// Synchronous DS-CDMA downlink seen through a chip-rate, post-matched-filter receiver.
// One observation window spans M = N + L_p - 1 chips and carries the current symbol plus
// the ISI tails of the previous and next symbols.

namespace vffrls {

using Rng = std::mt19937_64;

// Decorrelated child seed for stream `stream` of a parent seed (splitmix64 finaliser).
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t stream);

struct SpreadingCode
{
  RealVector chips; // +-1/sqrt(N)
  int        user_index = 0;

  Index length() const { return chips.size(); }
};

struct CodeSet
{
  std::vector<SpreadingCode> codes;
  bool random_fallback = false; // N has no shift-register family; codes are seeded random +-1
};

// Number of distinct codes available at length N (N + 2 for Gold-like families).
std::size_t code_family_capacity(int N);

// The whole Gold-like family at length N in generation order: u, v, u^T^0 v, ..., u^T^{N-1} v.
// Throws CapacityError when N has no supported polynomial pair.
std::vector<SpreadingCode> gold_family(int N);

CodeSet gen_spreading_codes(int K, int N, std::uint64_t seed);

// One code per line, chips as space-separated +-1 integers. Normalisation is applied on load.
std::vector<SpreadingCode> load_codes(std::filesystem::path const &path);

// M x L_p matrix whose column j is the code delayed by j chips.
RealMatrix build_constraint_matrix(SpreadingCode const &code, Index paths);

struct JakesOscillators
{
  RealMatrix omega; // paths x N_osc angular Doppler per symbol
  RealMatrix phase; // paths x N_osc
};

inline constexpr int kJakesOscillators = 8;

struct ChannelState
{
  CxVector         h;      // gains at symbol i
  CxVector         h_prev; // gains at symbol i - 1
  CxVector         h_next; // gains at symbol i + 1
  RealVector       power_profile; // p_f, sum p_f^2 = 1
  double           f_dT = 0.0;
  bool             fading = false;
  std::int64_t     symbol = 1;
  JakesOscillators oscillators;

  Index paths() const { return h.size(); }
};

// Amplitude profile p_f from per-path powers in dB, normalised to unit total power.
RealVector normalized_profile(std::vector<double> const &path_powers_db);

// Time-invariant channel h_f = p_f.
ChannelState make_static_channel(std::vector<double> const &path_powers_db);

// Rayleigh channel h_f(i) = p_f alpha_f(i), alpha_f from a sum-of-sinusoids Jakes generator
// with per-path random angle offset and oscillator phases drawn from `rng`.
ChannelState make_jakes_channel(std::vector<double> const &path_powers_db, double f_dT, Rng &rng);

// Unit-power fading coefficient of every path at absolute symbol index `symbol`.
CxVector jakes_gains(JakesOscillators const &osc, std::int64_t symbol);

// Advance one symbol: h_prev <- h, h <- h_next, h_next <- gains at i + 2.
ChannelState jakes_step(ChannelState state);

// Copy of `channel` with h_prev = h_next = h.
ChannelState frozen(ChannelState channel);

struct IsiMatrices
{
  CxMatrix pre;  // H^p, M x N, built from h_prev
  CxMatrix post; // H^s, M x N, built from h_next
};

IsiMatrices build_isi_matrices(ChannelState const &channel, Index N);

struct UserSymbols
{
  int prev = 1;
  int cur  = 1;
  int next = 1;
};

struct ReceivedVector
{
  CxVector                 r;
  std::vector<UserSymbols> symbols;
};

// Noise-free contribution of every user: r = sum_k A_k (b_k(i) C_k h + b_k(i-1) H^p p_k + b_k(i+1) H^s p_k).
CxVector noiseless_received(std::vector<SpreadingCode> const &codes,
                            ChannelState const               &channel,
                            std::vector<UserSymbols> const   &symbols,
                            RealVector const                 &amplitudes);

ReceivedVector synth_received(std::vector<SpreadingCode> const &codes,
                              ChannelState const               &channel,
                              std::vector<UserSymbols> const   &symbols,
                              RealVector const                 &amplitudes,
                              double                            sigma_sq,
                              Rng                              &rng);

// Columns whose outer products sum (with sigma^2 I) to the received covariance: for each user
// A_k C_k h, A_k H^p p_k and A_k H^s p_k.
CxMatrix signal_columns(std::vector<SpreadingCode> const &codes,
                        ChannelState const               &channel,
                        RealVector const                 &amplitudes);

struct AnalyticalEnv
{
  CxMatrix   Rbar;
  CxVector   s;         // cross-correlation E[b_k^* r] = A_k C_k h
  CxVector   w0;        // MMSE filter
  CxVector   signature; // C_k h of the desired user
  RealVector amplitudes;
  double     xi_min    = 1.0;
  double     sigma0_sq = 1.0;
  double     sigma_sq  = 0.0;
  int        desired   = 0;
};

// Statistics from precomputed signal columns G (Rbar = G G^H + sigma^2 I); the desired user's
// direct-path column is G.col(3 * desired).
AnalyticalEnv env_from_columns(CxMatrix const &G, RealVector const &amplitudes, double sigma_sq, int desired = 0);

// Adds circular complex Gaussian noise of total variance sigma_sq per entry.
void add_noise(CxVector &r, double sigma_sq, Rng &rng);

// Exact second-order statistics for the channel as given (use `frozen` for a constant channel).
// Throws NotPositiveDefinite if the covariance cannot be factored.
AnalyticalEnv compute_analytical_env(std::vector<SpreadingCode> const &codes,
                                     ChannelState const               &channel,
                                     RealVector const                 &amplitudes,
                                     double                            sigma_sq,
                                     int                               desired = 0);

// E|b_k - w^H r|^2 = 1 - 2 Re(w^H s) + w^H Rbar w.
double mse_of(CxVector const &w, AnalyticalEnv const &env);

// sigma_0^2 = 1 - A_k w^H C_k h - A_k h^H C_k^H w + w^H Rbar w at an arbitrary filter.
double measurement_error_variance(CxVector const &w, AnalyticalEnv const &env);

} // namespace vffrls
