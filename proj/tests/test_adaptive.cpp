#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "vffrls/error.hpp"
#include "vffrls/harness.hpp"
#include "vffrls/receiver.hpp"

using namespace vffrls;

namespace {

CxVector random_vector(Index M, Rng &rng)
{
  std::normal_distribution<double> g(0.0, 1.0);
  CxVector                         v(M);
  for (Index m = 0; m < M; ++m) { v[m] = Cx(g(rng), g(rng)); }
  return v;
}

// Minimiser of lambda^i (w - w(0))^H (w - w(0)) + sum_n lambda^(i-n) |b(n) - w^H r(n)|^2.
CxVector weighted_ls(std::vector<CxVector> const &r, std::vector<Cx> const &b, double lambda, CxVector const &w_init)
{
  Index const  M = w_init.size();
  auto const   i = static_cast<int>(r.size());
  CxMatrix     Phi = std::pow(lambda, i) * CxMatrix::Identity(M, M);
  CxVector     theta = std::pow(lambda, i) * w_init;
  for (int n = 1; n <= i; ++n) {
    double const wgt = std::pow(lambda, i - n);
    Phi += wgt * r[n - 1] * r[n - 1].adjoint();
    theta += wgt * r[n - 1] * std::conj(b[n - 1]);
  }
  return Phi.fullPivLu().solve(theta);
}

double rel(CxVector const &a, CxVector const &b) { return (a - b).norm() / b.norm(); }

} // namespace

TEST_CASE("scalar RLS step by hand")
{
  RlsState<Cx> s{CxVector::Zero(1), CxMatrix::Identity(1, 1), 0};
  CxVector     r(1);
  r << 1.0;
  auto const out = rls_step(s, r, Cx(1.0, 0.0), 1.0);
  CHECK(std::abs(out.k[0] - 0.5) < 1e-15);
  CHECK(std::abs(out.e - 1.0) < 1e-15);
  CHECK(std::abs(out.z) < 1e-15);
  CHECK(std::abs(s.w[0] - 0.5) < 1e-15);
  CHECK(std::abs(s.Rinv(0, 0) - 0.5) < 1e-15);
}

TEST_CASE("zero error leaves the filter unchanged")
{
  Rng          rng(1);
  auto         s = RlsState<Cx>::initial(4);
  CxVector     r = random_vector(4, rng);
  CxVector     w = s.w;
  Cx const     b = w.dot(r);
  rls_step(s, r, b, 0.99);
  CHECK(s.w == w);
}

TEST_CASE("RLS equals the initialisation-corrected weighted LS solve")
{
  for (double lambda : {0.9, 0.99, 1.0}) {
    Rng                   rng(static_cast<std::uint64_t>(lambda * 1000));
    auto                  s = RlsState<Cx>::initial(4);
    CxVector const        w_init = s.w;
    std::vector<CxVector> rs;
    std::vector<Cx>       bs;
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < 50; ++i) {
      rs.push_back(random_vector(4, rng));
      bs.emplace_back(coin(rng) ? 1.0 : -1.0, 0.0);
      rls_step(s, rs.back(), bs.back(), lambda);
    }
    CHECK(rel(s.w, weighted_ls(rs, bs, lambda, w_init)) < 1e-8);
  }
}

TEST_CASE("property: LS equivalence on random short instances")
{
  Rng                                    rng(77);
  std::uniform_real_distribution<double> lam(0.8, 1.0);
  std::uniform_int_distribution<int>     dim(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    Index const           M      = dim(rng);
    double const          lambda = lam(rng);
    auto                  s      = RlsState<Cx>::initial(M);
    CxVector const        w_init = s.w;
    std::vector<CxVector> rs;
    std::vector<Cx>       bs;
    for (int i = 0; i < 10; ++i) {
      rs.push_back(random_vector(M, rng));
      bs.push_back(random_vector(1, rng)[0]);
      rls_step(s, rs.back(), bs.back(), lambda);
    }
    CHECK(rel(s.w, weighted_ls(rs, bs, lambda, w_init)) < 1e-8);
  }
}

TEST_CASE("gain identity and Hermitian inverse hold every symbol")
{
  Rng  rng(3);
  auto s = RlsState<Cx>::initial(17);
  for (int i = 0; i < 2000; ++i) {
    CxVector const r   = random_vector(17, rng);
    auto const     out = rls_step(s, r, Cx(i % 3 ? 1.0 : -1.0, 0.0), 0.995);
    CHECK((out.k - s.Rinv * r).norm() / out.k.norm() <= 1e-10);
    CHECK((s.Rinv - s.Rinv.adjoint()).norm() <= 1e-9);
  }
}

TEST_CASE("RLS rejects bad forgetting factors and non-finite data")
{
  auto     s = RlsState<Cx>::initial(2);
  CxVector r = CxVector::Ones(2);
  CHECK_THROWS_AS(rls_step(s, r, Cx(1.0, 0.0), 0.0), DomainError);
  CHECK_THROWS_AS(rls_step(s, r, Cx(1.0, 0.0), 1.5), DomainError);
  r[0] = Cx(std::numeric_limits<double>::infinity(), 0.0);
  CHECK_THROWS_AS(rls_step(s, r, Cx(1.0, 0.0), 0.99), NumericalDivergence);

  auto t = RlsState<Cx>::initial(2);
  try {
    for (int i = 0; i < 10; ++i) { rls_step(t, CxVector::Ones(2).eval(), Cx(1.0, 0.0), 1e-200); }
    FAIL("expected divergence");
  } catch (NumericalDivergence const &e) {
    CHECK(e.symbol >= 1);
  }
}

TEST_CASE("CTVFF: zero state emits the upper bound")
{
  CtvffState s(CtvffParams{});
  CHECK(ctvff_update(s, 0.7) == 0.99998);
  CHECK(s.rho == 0.0);
  CHECK(s.gamma == 0.0);
  CHECK(s.prev_abs_err == 0.7);
}

TEST_CASE("CTVFF: hand evaluation")
{
  CtvffParams const p{0.5, 1.0, 0.5, 0.0, 1.0};
  CtvffState        s(p);
  s.rho          = 0.2;
  s.gamma        = 0.1;
  s.prev_abs_err = 1.0;
  double const lambda = ctvff_update(s, 1.0);

  double const rho   = 0.5 * 0.2 + (1.0 - 0.5) * 1.0 * 1.0;
  double const gamma = 0.5 * 0.1 + 1.0 * rho * rho;
  CHECK(s.rho == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(s.gamma == doctest::Approx(0.41).epsilon(1e-14));
  CHECK(std::abs(lambda - 1.0 / (1.0 + gamma)) < 1e-15);
  CHECK(lambda == doctest::Approx(0.70922).epsilon(1e-5));
}

TEST_CASE("CTVFF: larger error never raises lambda")
{
  CtvffParams const p{0.9, 0.5, 0.9, 0.0, 1.0};
  CtvffState        a(p), b(p);
  a.rho = b.rho = 0.1;
  a.gamma = b.gamma = 0.05;
  a.prev_abs_err = b.prev_abs_err = 0.3;
  CHECK(ctvff_update(a, 2.0) <= ctvff_update(b, 0.5));
}

TEST_CASE("property: CTVFF state stays nonnegative and lambda clamped")
{
  Rng                                    rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    CtvffParams p;
    p.delta1       = 0.01 + 0.98 * u(rng);
    p.delta2       = 2.0 * u(rng);
    p.delta3       = 0.01 + 0.98 * u(rng);
    p.lambda_minus = 0.5 + 0.4 * u(rng);
    p.lambda_plus  = p.lambda_minus + (1.0 - p.lambda_minus) * u(rng);
    CtvffState s(p);
    for (int i = 0; i < 500; ++i) {
      double const lambda = ctvff_update(s, 3.0 * u(rng));
      CHECK(s.rho >= 0.0);
      CHECK(s.gamma >= 0.0);
      CHECK(lambda >= p.lambda_minus);
      CHECK(lambda <= p.lambda_plus);
    }
  }
}

TEST_CASE("GVFF: zero gradient and zero step keep lambda")
{
  GvffState<Cx> s(GvffParams{}, 3);
  Rng           rng(2);
  CHECK(gvff_forgetting_factor(s, random_vector(3, rng), Cx(0.4, 0.1)) == 0.998);

  GvffParams p;
  p.mu = 0.0;
  GvffRlsReceiver rx(5, p);
  AnalyticalEnv   env;
  for (int i = 0; i < 200; ++i) {
    auto const rep = rx.process(random_vector(5, rng), i % 2 ? 1 : -1, env);
    CHECK(rep.lambda == 0.998);
  }
}

TEST_CASE("GVFF: scalar run against a hand transcription")
{
  GvffParams p{0.05, 0.5, 1.0, 0.9};
  GvffState<double> s(p, 1);
  RlsState<double>  rls{Vector<double>::Constant(1, 0.01), Matrix<double>::Identity(1, 1), 0};

  double lam = 0.9, w = 0.01, P = 1.0, dP = 1.0, psi = 0.0;
  double const rs[3] = {0.8, -1.3, 0.5};
  double const bs[3] = {1.0, -1.0, -1.0};
  for (int i = 0; i < 3; ++i) {
    double const r = rs[i];
    double const e = bs[i] - w * r;
    lam            = std::clamp(lam + p.mu * psi * r * e, p.lambda_minus, p.lambda_plus);
    double const k = P * r / (lam + r * P * r);
    w += k * e;
    P  = (P - k * r * P) / lam;
    dP = ((1.0 - k * r) * dP * (1.0 - r * k) + k * k - P) / lam;
    psi = (1.0 - k * r) * psi + dP * r * e;

    Vector<double> rv = Vector<double>::Constant(1, r);
    double const   e_lib = bs[i] - rls.w.dot(rv);
    double const   l_lib = gvff_forgetting_factor(s, rv, e_lib);
    auto const     out   = rls_step(rls, rv, bs[i], l_lib);
    gvff_update_derivatives(s, rls, rv, out.k, out.e);

    CHECK(std::abs(l_lib - lam) < 1e-12);
    CHECK(std::abs(rls.w[0] - w) < 1e-12);
    CHECK(std::abs(rls.Rinv(0, 0) - P) < 1e-12);
    CHECK(std::abs(s.dRinv(0, 0) - dP) < 1e-12);
    CHECK(std::abs(s.dw[0] - psi) < 1e-12);
  }
}

TEST_CASE("property: GVFF lambda stays inside its bounds")
{
  Rng        rng(12);
  GvffParams p{0.5, 0.95, 0.999, 0.97};
  GvffRlsReceiver rx(6, p);
  AnalyticalEnv   env;
  for (int i = 0; i < 1000; ++i) {
    auto const rep = rx.process(random_vector(6, rng), i % 3 ? 1 : -1, env);
    CHECK(rep.lambda >= 0.95);
    CHECK(rep.lambda <= 0.999);
  }
}

TEST_CASE("extra operation counts")
{
  CHECK(count_extra_ops("ctvff", 17) == OpCount{7, 3});
  CHECK(count_extra_ops("ctvff", 1) == OpCount{7, 3});
  CHECK(count_extra_ops("gvff", 16) == OpCount{1858, 1808});
  CHECK(count_extra_ops("gvff", 17) == OpCount{7 * 289 + 4 * 17 + 2, 7 * 289 + 17});
  CHECK(count_extra_ops("fixed", 9) == OpCount{0, 0});
  CHECK_THROWS_AS(count_extra_ops("wgvff", 9), UnsupportedMechanism);
  CHECK_THROWS_AS(count_extra_ops("ctvff", 0), DomainError);
}

TEST_CASE("instrumented counters tick exactly the tabulated amount per symbol")
{
  Rng           rng(5);
  AnalyticalEnv env;
  for (Index M : {Index{1}, Index{4}, Index{16}, Index{17}}) {
    GvffRlsReceiver  g(M, GvffParams{});
    CtvffRlsReceiver c(M, CtvffParams{});
    for (int i = 1; i <= 20; ++i) {
      CxVector const r = random_vector(M, rng);
      g.process(r, 1, env);
      c.process(r, 1, env);
      auto const og = count_extra_ops(MechanismKind::Gvff, M);
      CHECK(g.extra_ops() == OpCount{og.mult * i, og.add * i});
      CHECK(c.extra_ops() == OpCount{7 * i, 3 * i});
    }
  }
}

TEST_CASE("SG step")
{
  SgState<Cx> s{CxVector::Ones(2), 0.1};
  CxVector    r(2);
  r << Cx(1.0, 1.0), Cx(0.5, -2.0);
  CxVector const w0 = s.w;
  sg_step(s, r, s.w.dot(r));
  CHECK(s.w == w0);

  SgState<Cx> z{CxVector::Ones(2), 0.0};
  sg_step(z, r, Cx(5.0, 0.0));
  CHECK(z.w == w0);

  // two steps by hand, M = 2
  SgState<Cx> h{CxVector::Zero(2), 0.5};
  CxVector    r2(2);
  r2 << Cx(0.0, 1.0), Cx(2.0, 0.0);
  Cx const e1 = sg_step(h, r, Cx(1.0, 0.0));
  CHECK(std::abs(e1 - Cx(1.0, 0.0)) < 1e-14);
  CxVector w1(2);
  w1 << Cx(0.5, 0.5), Cx(0.25, -1.0);
  CHECK((h.w - w1).norm() < 1e-14);
  // z = w1^H r2 = conj(0.5+0.5i) i + conj(0.25-i) 2 = (0.5 + 0.5i) + (0.5 + 2i) = 1 + 2.5i
  Cx const e2 = sg_step(h, r2, Cx(-1.0, 0.0));
  CHECK(std::abs(e2 - Cx(-2.0, -2.5)) < 1e-14);
  // w2 = w1 + 0.5 r2 conj(e2) = w1 + 0.5 r2 (-2 + 2.5i)
  CxVector w2 = w1 + 0.5 * r2 * Cx(-2.0, 2.5);
  CHECK((h.w - w2).norm() < 1e-14);
}

TEST_CASE("Rake filter")
{
  auto const codes = gen_spreading_codes(1, 15, 1).codes;
  RealVector A(1);
  A << 1.0;
  auto ch = make_static_channel({0.0});
  ch.h[0] = Cx(0.6, 0.8);
  ch      = frozen(ch);
  auto const env = compute_analytical_env(codes, ch, A, 0.1);
  CHECK((rake_filter(env) - codes[0].chips.cast<Cx>() * Cx(0.6, 0.8)).norm() < 1e-14);
}

TEST_CASE("Rake agrees with MMSE decisions for one noiseless user")
{
  auto const codes = gen_spreading_codes(1, 15, 1).codes;
  RealVector A(1);
  A << 1.0;
  auto const ch  = make_static_channel({0.0, -6.0, -10.0});
  auto const env = compute_analytical_env(codes, ch, A, 1e-8);
  Rng        rng(1);
  for (int i = 0; i < 64; ++i) {
    UserSymbols const b{i & 1 ? 1 : -1, i & 2 ? 1 : -1, i & 4 ? 1 : -1};
    auto const        r = noiseless_received(codes, ch, {b}, A);
    int const         d = detect(rake_filter(env).dot(r));
    CHECK(d == detect(env.w0.dot(r)));
    CHECK(d == b.cur);
  }
}

TEST_CASE("Rake SINR does not beat MMSE SINR")
{
  auto const codes = gen_spreading_codes(6, 15, 2).codes;
  RealVector A(6);
  A << 1.0, 1.4, 1.4, 2.0, 1.0, 1.0;
  Rng  rng(4);
  auto ch = make_jakes_channel({0.0, -6.0, -10.0}, 1e-4, rng);
  for (int i = 0; i < 5; ++i) {
    ch             = jakes_step(std::move(ch));
    auto const env = compute_analytical_env(codes, ch, A, 0.0316);
    CHECK(sinr_of(rake_filter(env), env) <= sinr_of(env.w0, env) + 1e-12);
  }
}

TEST_CASE("detection")
{
  CHECK(detect(Cx(0.3, -7.0)) == 1);
  CHECK(detect(Cx(-0.001, 0.0)) == -1);
  CHECK(detect(Cx(0.0, 0.0)) == 1);
  CHECK(detect(Cx(0.0, -3.0)) == 1);
}

TEST_CASE("a-posteriori convention feeds the updated error")
{
  Rng              rng(6);
  CtvffParams      p{0.9, 0.5, 0.9, 0.5, 1.0};
  CtvffRlsReceiver pri(3, p, ErrorConvention::APriori);
  CtvffRlsReceiver post(3, p, ErrorConvention::APosteriori);
  AnalyticalEnv    env;
  double           lp = 0.0, lq = 0.0;
  for (int i = 0; i < 30; ++i) {
    CxVector const r = random_vector(3, rng);
    lp               = pri.process(r, 1, env).lambda;
    lq               = post.process(r, 1, env).lambda;
  }
  CHECK(lp != lq);
  CHECK(lq >= 0.5);
}
