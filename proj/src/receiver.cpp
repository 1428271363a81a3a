#include "vffrls/receiver.hpp"

#include <cmath>

namespace vffrls {

namespace {

Cx reference_for(std::optional<int> training, Cx z) { return Cx(training ? *training : detect(z), 0.0); }

} // namespace

FixedRlsReceiver::FixedRlsReceiver(Index M, FixedFf ff)
  : rls_(RlsState<Cx>::initial(M))
  , ff_(ff)
{
}

SymbolReport FixedRlsReceiver::process(CxVector const &r, std::optional<int> training, AnalyticalEnv const &)
{
  Cx const z = rls_.w.dot(r);
  rls_step(rls_, r, reference_for(training, z), ff_.lambda);
  return {z, detect(z), ff_.lambda};
}

CtvffRlsReceiver::CtvffRlsReceiver(Index M, CtvffParams params, ErrorConvention convention)
  : rls_(RlsState<Cx>::initial(M))
  , ff_(params)
  , convention_(convention)
{
}

SymbolReport CtvffRlsReceiver::process(CxVector const &r, std::optional<int> training, AnalyticalEnv const &)
{
  Cx const z   = rls_.w.dot(r);
  Cx const ref = reference_for(training, z);
  if (convention_ == ErrorConvention::APriori) {
    double const lambda = ctvff_update(ff_, std::abs(ref - z));
    rls_step(rls_, r, ref, lambda);
    return {z, detect(z), lambda};
  }
  double const lambda = ff_.lambda;
  rls_step(rls_, r, ref, lambda);
  ctvff_update(ff_, std::abs(ref - rls_.w.dot(r)));
  return {z, detect(z), lambda};
}

GvffRlsReceiver::GvffRlsReceiver(Index M, GvffParams params)
  : rls_(RlsState<Cx>::initial(M))
  , ff_(params, M)
{
}

SymbolReport GvffRlsReceiver::process(CxVector const &r, std::optional<int> training, AnalyticalEnv const &)
{
  Cx const     z      = rls_.w.dot(r);
  Cx const     ref    = reference_for(training, z);
  double const lambda = gvff_forgetting_factor(ff_, r, ref - z);
  auto const   out    = rls_step(rls_, r, ref, lambda);
  gvff_update_derivatives(ff_, rls_, r, out.k, out.e);
  return {z, detect(z), lambda};
}

SgReceiver::SgReceiver(Index M, double step)
  : sg_{CxVector::Constant(M, Cx(0.01, 0.0)), step}
{
}

SymbolReport SgReceiver::process(CxVector const &r, std::optional<int> training, AnalyticalEnv const &)
{
  Cx const z = sg_.w.dot(r);
  sg_step(sg_, r, reference_for(training, z));
  if (!sg_.w.allFinite()) { throw NumericalDivergence(0, "SG filter"); }
  return {z, detect(z)};
}

RakeReceiver::RakeReceiver(Index M)
  : w_(CxVector::Zero(M))
{
}

SymbolReport RakeReceiver::process(CxVector const &r, std::optional<int>, AnalyticalEnv const &env)
{
  w_         = rake_filter(env);
  Cx const z = w_.dot(r);
  return {z, detect(z)};
}

} // namespace vffrls
