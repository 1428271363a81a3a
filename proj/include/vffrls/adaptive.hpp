#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <variant>

#include "error.hpp"
#include "types.hpp"

// RLS receive filters with pluggable forgetting-factor mechanisms, plus SG and Rake baselines.
//
// Everything is templated on the filter scalar so that real-valued scalar runs can be checked
// against hand transcriptions and complex runs drive the CDMA receiver.

namespace vffrls {

// Complex multiplications and additions, tallied by the mechanism updates themselves.
struct OpCount
{
  std::int64_t mult = 0;
  std::int64_t add  = 0;

  OpCount &operator+=(OpCount const &o)
  {
    mult += o.mult;
    add += o.add;
    return *this;
  }
  friend bool operator==(OpCount const &, OpCount const &) = default;
};

enum class MechanismKind
{
  Fixed,
  Gvff,
  Ctvff,
};

MechanismKind    parse_mechanism_kind(std::string_view name);
std::string_view to_string(MechanismKind kind);

// Extra arithmetic per symbol that a forgetting-factor mechanism adds on top of plain RLS.
OpCount count_extra_ops(MechanismKind kind, std::int64_t M);
OpCount count_extra_ops(std::string_view kind, std::int64_t M);

namespace detail {

template <typename Scalar> RealOf<Scalar> real_part(Scalar const &x) { return Eigen::numext::real(x); }
template <typename Scalar> Scalar conj(Scalar const &x) { return Eigen::numext::conj(x); }

template <typename Derived> void require_finite(Eigen::MatrixBase<Derived> const &m, std::int64_t symbol, char const *what)
{
  if (!m.allFinite()) { throw NumericalDivergence(symbol, what); }
}

} // namespace detail

// ---------------------------------------------------------------------------------------------
// RLS

template <typename Scalar> struct RlsState
{
  Vector<Scalar> w;
  Matrix<Scalar> Rinv;
  std::int64_t   symbol = 0;

  // w(0) = 0.01 * 1, R^{-1}(0) = I.
  static RlsState initial(Index M)
  {
    return RlsState{Vector<Scalar>::Constant(M, Scalar(0.01)), Matrix<Scalar>::Identity(M, M), 0};
  }
  Index size() const { return w.size(); }
};

template <typename Scalar> struct RlsOutput
{
  Scalar         e; // a-priori error b - w^H(i-1) r
  Scalar         z; // w^H(i-1) r, the detector input
  Vector<Scalar> k; // gain vector
};

template <typename Scalar>
RlsOutput<Scalar> rls_step(RlsState<Scalar> &state, Vector<Scalar> const &r, Scalar b_ref, RealOf<Scalar> lambda)
{
  using Real = RealOf<Scalar>;
  if (!(lambda > Real(0) && lambda <= Real(1))) { throw DomainError("forgetting factor must lie in (0, 1]"); }
  state.symbol += 1;

  RlsOutput<Scalar> out;
  out.z = state.w.dot(r);
  out.e = b_ref - out.z;

  Vector<Scalar> const Pr    = state.Rinv * r;
  Real const           denom = lambda + detail::real_part(r.dot(Pr));
  out.k                      = Pr / denom;

  state.w.noalias() += out.k * detail::conj(out.e);
  // R^{-1} r^H ... uses r^H R^{-1} = (R^{-1} r)^H for Hermitian R^{-1}.
  state.Rinv.noalias() -= out.k * Pr.adjoint();
  state.Rinv /= lambda;
  state.Rinv = (Real(0.5) * (state.Rinv + state.Rinv.adjoint())).eval();

  detail::require_finite(state.w, state.symbol, "receive filter");
  detail::require_finite(state.Rinv, state.symbol, "inverse correlation");
  return out;
}

// ---------------------------------------------------------------------------------------------
// Forgetting-factor mechanisms

struct FixedFf
{
  double lambda = 0.998;
};

struct CtvffParams
{
  double delta1       = 0.934;
  double delta2       = 0.005;
  double delta3       = 0.99;
  double lambda_minus = 0.98;
  double lambda_plus  = 0.99998;
};

// Error-correlation driven forgetting factor: rho tracks |e(i-1)||e(i)|, gamma smooths rho^2
// and lambda = 1 / (1 + gamma) clamped to [lambda-, lambda+].
struct CtvffState
{
  CtvffParams params;
  double      gamma        = 0.0;
  double      rho          = 0.0;
  double      prev_abs_err = 0.0;
  double      lambda       = 1.0;
  OpCount     ops;

  explicit CtvffState(CtvffParams p = {})
    : params(p)
    , lambda(p.lambda_plus)
    , one_minus_delta3_(1.0 - p.delta3)
  {
  }

  double one_minus_delta3() const { return one_minus_delta3_; }

private:
  double one_minus_delta3_;
};

inline double ctvff_update(CtvffState &s, double abs_err)
{
  auto const &p = s.params;
  // rho(i) = d3 rho(i-1) + (1 - d3) |e(i-1)| |e(i)|
  s.rho = p.delta3 * s.rho + (s.one_minus_delta3() * s.prev_abs_err) * abs_err;
  s.ops += OpCount{3, 1};
  // gamma(i) = d1 gamma(i-1) + d2 rho^2(i)
  s.gamma = p.delta1 * s.gamma + p.delta2 * (s.rho * s.rho);
  s.ops += OpCount{3, 1};
  s.lambda = std::clamp(1.0 / (1.0 + s.gamma), p.lambda_minus, p.lambda_plus);
  s.ops += OpCount{1, 1};
  s.prev_abs_err = abs_err;
  return s.lambda;
}

struct GvffParams
{
  double mu           = 0.0025;
  double lambda_minus = 0.992;
  double lambda_plus  = 0.99998;
  double lambda0      = 0.998;
};

// Gradient forgetting factor. It keeps dw/dlambda and dR^{-1}/dlambda alongside the filter.
template <typename Scalar> struct GvffState
{
  GvffParams     params;
  double         lambda = 0.998;
  Vector<Scalar> dw;    // psi = dw/dlambda
  Matrix<Scalar> dRinv; // dR^{-1}/dlambda
  OpCount        ops;

  GvffState() = default;
  GvffState(GvffParams p, Index M)
    : params(p)
    , lambda(p.lambda0)
    , dw(Vector<Scalar>::Zero(M))
    , dRinv(Matrix<Scalar>::Identity(M, M))
  {
  }
};

// lambda(i) = [lambda(i-1) + mu Re(psi^H(i-1) r e^*)] truncated to [lambda-, lambda+].
template <typename Scalar> double gvff_forgetting_factor(GvffState<Scalar> &s, Vector<Scalar> const &r, Scalar e)
{
  auto const M = static_cast<std::int64_t>(r.size());

  Scalar const g = s.dw.dot(r);
  s.ops += OpCount{M, M - 1};
  Scalar const ge = g * detail::conj(e);
  s.ops.mult += 1;
  double const re = detail::real_part(ge); // Re(a b^*) = a_r b_r + a_i b_i
  s.ops.add += 1;
  double const step = s.params.mu * re;
  s.ops.mult += 1;
  s.lambda = std::clamp(s.lambda + step, s.params.lambda_minus, s.params.lambda_plus);
  s.ops.add += 1;
  return s.lambda;
}

// Derivative recursions after the RLS step that used lambda(i):
//   dR^{-1}(i) = lambda^{-1} [(I - k r^H) dR^{-1}(i-1) (I - r k^H) + k k^H - R^{-1}(i)]
//   psi(i)     = (I - k r^H) psi(i-1) + dR^{-1}(i) r e^*
template <typename Scalar>
void gvff_update_derivatives(GvffState<Scalar>     &s,
                             RlsState<Scalar> const &rls,
                             Vector<Scalar> const   &r,
                             Vector<Scalar> const   &k,
                             Scalar                  e)
{
  using Real   = RealOf<Scalar>;
  auto const M = static_cast<std::int64_t>(r.size());
  auto const M2 = M * M;

  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> const rD = r.adjoint() * s.dRinv;
  s.ops += OpCount{M2, M * (M - 1)};
  Matrix<Scalar> X = s.dRinv - k * rD;
  s.ops += OpCount{M2, M2};
  Vector<Scalar> const Xr = X * r;
  s.ops += OpCount{M2, M * (M - 1)};
  X.noalias() -= Xr * k.adjoint();
  s.ops += OpCount{M2, M2};
  X.noalias() += k * k.adjoint();
  s.ops += OpCount{M2, M2};
  X -= rls.Rinv;
  s.ops.add += M2;
  X /= Real(s.lambda);
  s.ops.mult += M2;
  s.dRinv = (Real(0.5) * (X + X.adjoint())).eval();

  Scalar const d = r.dot(s.dw);
  s.ops += OpCount{M, M - 1};
  s.dw -= k * d;
  s.ops += OpCount{M, M};
  Vector<Scalar> const v = s.dRinv * r;
  s.ops += OpCount{M2, M * (M - 1)};
  s.dw += v * detail::conj(e);
  s.ops += OpCount{M, M};

  detail::require_finite(s.dRinv, rls.symbol, "dR^{-1}/dlambda");
  detail::require_finite(s.dw, rls.symbol, "dw/dlambda");
}

// ---------------------------------------------------------------------------------------------
// Baselines and detection

template <typename Scalar> struct SgState
{
  Vector<Scalar> w;
  double         step = 0.025;
};

// Plain LMS: e = b - w^H r, w <- w + step r e^*.
template <typename Scalar> Scalar sg_step(SgState<Scalar> &s, Vector<Scalar> const &r, Scalar b_ref)
{
  Scalar const e = b_ref - s.w.dot(r);
  s.w.noalias() += (RealOf<Scalar>(s.step) * detail::conj(e)) * r;
  return e;
}

// sign(Re z); a zero real part decides +1.
template <typename Scalar> int detect(Scalar z) { return detail::real_part(z) < 0 ? -1 : 1; }

} // namespace vffrls
