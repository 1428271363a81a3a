#include "vffrls/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "vffrls/error.hpp"

namespace vffrls {

namespace {

// Primitive polynomial pairs (octal, bit i = coefficient of x^i) per register degree.
// Degree 4 has no preferred pair; x^4+x+1 and x^4+x^3+1 still give a usable family.
struct PolyPair
{
  int      degree;
  unsigned first;
  unsigned second;
};

constexpr PolyPair kPolyPairs[] = {
  {3, 013, 015},     {4, 023, 031},     {5, 045, 075},       {6, 0103, 0147},
  {7, 0211, 0217},   {9, 01021, 01131}, {10, 02011, 02415},
};

PolyPair const *pair_for_length(int N)
{
  for (auto const &p : kPolyPairs) {
    if ((1 << p.degree) - 1 == N) { return &p; }
  }
  return nullptr;
}

// Fibonacci LFSR: s[k+n] = sum_{i<n} c_i s[k+i] (mod 2), seeded with 0...01.
std::vector<int> m_sequence(unsigned poly, int degree)
{
  int const        length = (1 << degree) - 1;
  std::vector<int> s(length + degree, 0);
  s[degree - 1] = 1;
  for (int k = 0; k + degree < static_cast<int>(s.size()); ++k) {
    int bit = 0;
    for (int i = 0; i < degree; ++i) {
      if ((poly >> i) & 1U) { bit ^= s[k + i]; }
    }
    s[k + degree] = bit;
  }
  s.resize(length);
  return s;
}

SpreadingCode code_from_bits(std::vector<int> const &bits, int user)
{
  double const  scale = 1.0 / std::sqrt(static_cast<double>(bits.size()));
  SpreadingCode code;
  code.chips.resize(static_cast<Index>(bits.size()));
  for (std::size_t n = 0; n < bits.size(); ++n) {
    code.chips[static_cast<Index>(n)] = bits[n] ? -scale : scale;
  }
  code.user_index = user;
  return code;
}

} // namespace

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t stream)
{
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::size_t code_family_capacity(int N)
{
  if (pair_for_length(N)) { return static_cast<std::size_t>(N) + 2; }
  // Random +-1 codes, distinct up to sign.
  int const bits = std::min(N - 1, 62);
  return std::size_t{1} << bits;
}

std::vector<SpreadingCode> gold_family(int N)
{
  auto const *pair = pair_for_length(N);
  if (!pair) { throw CapacityError("no shift-register code family of length " + std::to_string(N)); }
  auto const u = m_sequence(pair->first, pair->degree);
  auto const v = m_sequence(pair->second, pair->degree);

  std::vector<SpreadingCode> family;
  family.reserve(static_cast<std::size_t>(N) + 2);
  family.push_back(code_from_bits(u, 0));
  family.push_back(code_from_bits(v, 1));
  std::vector<int> mixed(static_cast<std::size_t>(N));
  for (int shift = 0; shift < N; ++shift) {
    for (int n = 0; n < N; ++n) { mixed[n] = u[n] ^ v[(n + shift) % N]; }
    family.push_back(code_from_bits(mixed, shift + 2));
  }
  return family;
}

CodeSet gen_spreading_codes(int K, int N, std::uint64_t seed)
{
  if (N < 2) { throw CapacityError("code length must be at least 2"); }
  if (K < 1) { throw CapacityError("at least one code is required"); }
  if (static_cast<std::size_t>(K) > code_family_capacity(N)) {
    throw CapacityError(std::to_string(K) + " users exceed the " + std::to_string(code_family_capacity(N)) +
                        "-code family at N=" + std::to_string(N));
  }

  Rng     rng(child_seed(seed, 0xC0DE));
  CodeSet out;
  if (pair_for_length(N)) {
    auto family = gold_family(N);
    std::vector<std::size_t> order(family.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int k = 0; k < K; ++k) {
      out.codes.push_back(family[order[k]]);
      out.codes.back().user_index = k;
    }
    return out;
  }

  out.random_fallback = true;
  std::set<std::vector<int>>  seen;
  std::bernoulli_distribution coin(0.5);
  while (static_cast<int>(out.codes.size()) < K) {
    std::vector<int> bits(static_cast<std::size_t>(N));
    for (auto &b : bits) { b = coin(rng) ? 1 : 0; }
    std::vector<int> negated(bits);
    for (auto &b : negated) { b ^= 1; }
    if (seen.count(bits) || seen.count(negated)) { continue; }
    seen.insert(bits);
    out.codes.push_back(code_from_bits(bits, static_cast<int>(out.codes.size())));
  }
  return out;
}

std::vector<SpreadingCode> load_codes(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in) { throw Error("cannot open code file " + path.string()); }
  std::vector<SpreadingCode> codes;
  std::string                line;
  std::size_t                length = 0;
  int                        lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) { continue; }
    std::istringstream ss(line);
    std::vector<int>   bits;
    int                chip = 0;
    while (ss >> chip) {
      if (chip != 1 && chip != -1) {
        throw Error(path.string() + ":" + std::to_string(lineno) + ": chips must be +1 or -1");
      }
      bits.push_back(chip == 1 ? 0 : 1);
    }
    if (!ss.eof()) { throw Error(path.string() + ":" + std::to_string(lineno) + ": unparsable chip"); }
    if (length == 0) { length = bits.size(); }
    if (bits.size() != length || length < 2) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": inconsistent code length");
    }
    codes.push_back(code_from_bits(bits, static_cast<int>(codes.size())));
  }
  if (codes.empty()) { throw Error("code file " + path.string() + " holds no codes"); }
  return codes;
}

RealMatrix build_constraint_matrix(SpreadingCode const &code, Index paths)
{
  Index const N = code.length();
  RealMatrix  C = RealMatrix::Zero(N + paths - 1, paths);
  for (Index j = 0; j < paths; ++j) { C.col(j).segment(j, N) = code.chips; }
  return C;
}

RealVector normalized_profile(std::vector<double> const &path_powers_db)
{
  RealVector p(static_cast<Index>(path_powers_db.size()));
  for (std::size_t f = 0; f < path_powers_db.size(); ++f) {
    p[static_cast<Index>(f)] = std::sqrt(db_to_linear(path_powers_db[f]));
  }
  return p / p.norm();
}

ChannelState make_static_channel(std::vector<double> const &path_powers_db)
{
  ChannelState ch;
  ch.power_profile = normalized_profile(path_powers_db);
  ch.h             = ch.power_profile.cast<Cx>();
  ch.h_prev        = ch.h;
  ch.h_next        = ch.h;
  return ch;
}

ChannelState make_jakes_channel(std::vector<double> const &path_powers_db, double f_dT, Rng &rng)
{
  ChannelState ch;
  ch.power_profile = normalized_profile(path_powers_db);
  ch.f_dT          = f_dT;
  ch.fading        = true;

  Index const paths = ch.power_profile.size();
  ch.oscillators.omega.resize(paths, kJakesOscillators);
  ch.oscillators.phase.resize(paths, kJakesOscillators);
  std::uniform_real_distribution<double> uniform_angle(-std::numbers::pi, std::numbers::pi);
  double const                           wd = 2.0 * std::numbers::pi * f_dT;
  for (Index f = 0; f < paths; ++f) {
    // Arrival angles (2 pi n - pi + theta) / N_osc tile the circle once theta is uniform,
    // which makes the ensemble autocorrelation exactly J0(2 pi f_dT l).
    double const theta = uniform_angle(rng);
    for (int n = 0; n < kJakesOscillators; ++n) {
      double const angle = (2.0 * std::numbers::pi * (n + 1) - std::numbers::pi + theta) / kJakesOscillators;
      ch.oscillators.omega(f, n) = wd * std::cos(angle);
      ch.oscillators.phase(f, n) = uniform_angle(rng);
    }
  }
  auto const p = ch.power_profile.cast<Cx>();
  ch.symbol    = 1;
  ch.h_prev    = p.cwiseProduct(jakes_gains(ch.oscillators, 0));
  ch.h         = p.cwiseProduct(jakes_gains(ch.oscillators, 1));
  ch.h_next    = p.cwiseProduct(jakes_gains(ch.oscillators, 2));
  return ch;
}

CxVector jakes_gains(JakesOscillators const &osc, std::int64_t symbol)
{
  double const scale = 1.0 / std::sqrt(static_cast<double>(osc.omega.cols()));
  double const t     = static_cast<double>(symbol);
  CxVector     alpha(osc.omega.rows());
  for (Index f = 0; f < osc.omega.rows(); ++f) {
    Cx sum{0.0, 0.0};
    for (Index n = 0; n < osc.omega.cols(); ++n) { sum += std::polar(1.0, osc.omega(f, n) * t + osc.phase(f, n)); }
    alpha[f] = scale * sum;
  }
  return alpha;
}

ChannelState jakes_step(ChannelState state)
{
  state.symbol += 1;
  if (!state.fading) { return state; }
  state.h_prev = std::move(state.h);
  state.h      = std::move(state.h_next);
  state.h_next = state.power_profile.cast<Cx>().cwiseProduct(jakes_gains(state.oscillators, state.symbol + 1));
  return state;
}

ChannelState frozen(ChannelState channel)
{
  channel.h_prev = channel.h;
  channel.h_next = channel.h;
  return channel;
}

IsiMatrices build_isi_matrices(ChannelState const &channel, Index N)
{
  Index const paths = channel.paths();
  Index const M     = N + paths - 1;
  IsiMatrices isi{CxMatrix::Zero(M, N), CxMatrix::Zero(M, N)};
  // Previous symbol: chip n on path f lands on row n + f - N.
  for (Index f = 1; f < paths; ++f) {
    for (Index n = N - f; n < N; ++n) { isi.pre(n + f - N, n) = channel.h_prev[f]; }
  }
  // Next symbol: chip n on path f lands on row n + f + N, inside the window only for f <= L_p - 2.
  for (Index f = 0; f + 1 < paths; ++f) {
    for (Index n = 0; n + f + N < M; ++n) { isi.post(n + f + N, n) = channel.h_next[f]; }
  }
  return isi;
}

CxVector noiseless_received(std::vector<SpreadingCode> const &codes,
                            ChannelState const               &channel,
                            std::vector<UserSymbols> const   &symbols,
                            RealVector const                 &amplitudes)
{
  Index const N   = codes.front().length();
  Index const M   = N + channel.paths() - 1;
  auto const  isi = build_isi_matrices(channel, N);
  CxVector    r   = CxVector::Zero(M);
  for (std::size_t k = 0; k < codes.size(); ++k) {
    auto const   C = build_constraint_matrix(codes[k], channel.paths());
    double const A = amplitudes[static_cast<Index>(k)];
    auto const   p = codes[k].chips.cast<Cx>();
    r.noalias() += (A * symbols[k].cur) * (C.cast<Cx>() * channel.h);
    r.noalias() += (A * symbols[k].prev) * (isi.pre * p);
    r.noalias() += (A * symbols[k].next) * (isi.post * p);
  }
  return r;
}

ReceivedVector synth_received(std::vector<SpreadingCode> const &codes,
                              ChannelState const               &channel,
                              std::vector<UserSymbols> const   &symbols,
                              RealVector const                 &amplitudes,
                              double                            sigma_sq,
                              Rng                              &rng)
{
  ReceivedVector out;
  out.r       = noiseless_received(codes, channel, symbols, amplitudes);
  out.symbols = symbols;
  add_noise(out.r, sigma_sq, rng);
  return out;
}

void add_noise(CxVector &r, double sigma_sq, Rng &rng)
{
  if (sigma_sq <= 0.0) { return; }
  std::normal_distribution<double> gauss(0.0, std::sqrt(sigma_sq / 2.0));
  for (Index m = 0; m < r.size(); ++m) {
    double const re = gauss(rng);
    double const im = gauss(rng);
    r[m] += Cx{re, im};
  }
}

CxMatrix signal_columns(std::vector<SpreadingCode> const &codes,
                        ChannelState const               &channel,
                        RealVector const                 &amplitudes)
{
  Index const N   = codes.front().length();
  Index const M   = N + channel.paths() - 1;
  auto const  isi = build_isi_matrices(channel, N);
  auto const  K   = static_cast<Index>(codes.size());
  CxMatrix    G(M, 3 * K);
  for (Index k = 0; k < K; ++k) {
    auto const  &code = codes[static_cast<std::size_t>(k)];
    double const A    = amplitudes[k];
    auto const   p    = code.chips.cast<Cx>();
    G.col(3 * k)      = A * (build_constraint_matrix(code, channel.paths()).cast<Cx>() * channel.h);
    G.col(3 * k + 1)  = A * (isi.pre * p);
    G.col(3 * k + 2)  = A * (isi.post * p);
  }
  return G;
}

AnalyticalEnv compute_analytical_env(std::vector<SpreadingCode> const &codes,
                                     ChannelState const               &channel,
                                     RealVector const                 &amplitudes,
                                     double                            sigma_sq,
                                     int                               desired)
{
  return env_from_columns(signal_columns(codes, channel, amplitudes), amplitudes, sigma_sq, desired);
}

AnalyticalEnv env_from_columns(CxMatrix const &G, RealVector const &amplitudes, double sigma_sq, int desired)
{
  AnalyticalEnv env;
  env.amplitudes = amplitudes;
  env.sigma_sq   = sigma_sq;
  env.desired    = desired;
  env.Rbar       = G * G.adjoint();
  env.Rbar.diagonal().array() += sigma_sq;
  env.Rbar = 0.5 * (env.Rbar + env.Rbar.adjoint()).eval();

  double const A = amplitudes[desired];
  env.signature  = G.col(3 * desired) / A;
  env.s          = G.col(3 * desired);

  Eigen::LLT<CxMatrix> llt(env.Rbar);
  if (llt.info() != Eigen::Success) { throw NotPositiveDefinite("received covariance is not positive definite"); }
  env.w0        = llt.solve(env.s);
  env.xi_min    = 1.0 - std::real(env.s.dot(env.w0));
  env.sigma0_sq = measurement_error_variance(env.w0, env);
  return env;
}

double mse_of(CxVector const &w, AnalyticalEnv const &env)
{
  return 1.0 - 2.0 * std::real(w.dot(env.s)) + std::real(w.dot(env.Rbar * w));
}

double measurement_error_variance(CxVector const &w, AnalyticalEnv const &env)
{
  double const A = env.amplitudes[env.desired];
  Cx const     a = A * w.dot(env.signature);              // A_k w^H C_k h
  Cx const     b = A * env.signature.dot(w);              // A_k h^H C_k^H w
  return std::real(Cx{1.0, 0.0} - a - b + w.dot(env.Rbar * w));
}

} // namespace vffrls
