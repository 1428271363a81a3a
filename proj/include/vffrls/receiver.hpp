#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "adaptive.hpp"
#include "signal_model.hpp"

namespace vffrls {

// Which error magnitude drives the CTVFF statistic.
//   APriori:     |b(i) - w^H(i-1) r(i)| of the current symbol, lambda(i) used immediately.
//   APosteriori: |b(i) - w^H(i) r(i)| after the update, lambda applies from the next symbol.
enum class ErrorConvention
{
  APriori,
  APosteriori,
};

struct SymbolReport
{
  Cx     z;        // w^H(i-1) r(i)
  int    decision; // sign(Re z)
  double lambda = std::numeric_limits<double>::quiet_NaN();
};

// Matched filter C_k h of the desired user.
inline CxVector rake_filter(AnalyticalEnv const &env) { return env.signature; }

class Receiver
{
public:
  virtual ~Receiver() = default;

  // `training` carries the known symbol in TR mode; in DD mode the decision is the reference.
  virtual SymbolReport process(CxVector const &r, std::optional<int> training, AnalyticalEnv const &env) = 0;

  virtual CxVector const &filter() const = 0;
  virtual OpCount         extra_ops() const { return {}; }
  virtual std::string     name() const = 0;
};

class FixedRlsReceiver final : public Receiver
{
public:
  FixedRlsReceiver(Index M, FixedFf ff);
  SymbolReport    process(CxVector const &r, std::optional<int> training, AnalyticalEnv const &env) override;
  CxVector const &filter() const override { return rls_.w; }
  std::string     name() const override { return "fixed"; }

  RlsState<Cx> const &rls() const { return rls_; }

private:
  RlsState<Cx> rls_;
  FixedFf      ff_;
};

class CtvffRlsReceiver final : public Receiver
{
public:
  CtvffRlsReceiver(Index M, CtvffParams params, ErrorConvention convention = ErrorConvention::APriori);
  SymbolReport    process(CxVector const &r, std::optional<int> training, AnalyticalEnv const &env) override;
  CxVector const &filter() const override { return rls_.w; }
  OpCount         extra_ops() const override { return ff_.ops; }
  std::string     name() const override { return "ctvff"; }

  RlsState<Cx> const &rls() const { return rls_; }
  CtvffState const   &mechanism() const { return ff_; }

private:
  RlsState<Cx>    rls_;
  CtvffState      ff_;
  ErrorConvention convention_;
};

class GvffRlsReceiver final : public Receiver
{
public:
  GvffRlsReceiver(Index M, GvffParams params);
  SymbolReport    process(CxVector const &r, std::optional<int> training, AnalyticalEnv const &env) override;
  CxVector const &filter() const override { return rls_.w; }
  OpCount         extra_ops() const override { return ff_.ops; }
  std::string     name() const override { return "gvff"; }

  RlsState<Cx> const  &rls() const { return rls_; }
  GvffState<Cx> const &mechanism() const { return ff_; }

private:
  RlsState<Cx>  rls_;
  GvffState<Cx> ff_;
};

class SgReceiver final : public Receiver
{
public:
  SgReceiver(Index M, double step);
  SymbolReport    process(CxVector const &r, std::optional<int> training, AnalyticalEnv const &env) override;
  CxVector const &filter() const override { return sg_.w; }
  std::string     name() const override { return "sg"; }

private:
  SgState<Cx> sg_;
};

// Non-adaptive matched filter that knows the current channel.
class RakeReceiver final : public Receiver
{
public:
  explicit RakeReceiver(Index M);
  SymbolReport    process(CxVector const &r, std::optional<int> training, AnalyticalEnv const &env) override;
  CxVector const &filter() const override { return w_; }
  std::string     name() const override { return "rake"; }

private:
  CxVector w_;
};

} // namespace vffrls
