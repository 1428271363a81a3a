#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vffrls {

struct Error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// A recursion produced a non-finite value. Trials carrying one are flagged, not averaged.
struct NumericalDivergence : Error
{
  NumericalDivergence(std::int64_t symbol, std::string const &what)
    : Error("numerical divergence at symbol " + std::to_string(symbol) + ": " + what)
    , symbol(symbol)
  {
  }
  std::int64_t symbol;
};

struct CapacityError : Error
{
  using Error::Error;
};

struct NotPositiveDefinite : Error
{
  using Error::Error;
};

struct UnsupportedMechanism : Error
{
  using Error::Error;
};

struct UnsupportedAxis : Error
{
  using Error::Error;
};

struct EmptyAverage : Error
{
  using Error::Error;
};

struct DomainError : Error
{
  using Error::Error;
};

struct ConfigError : Error
{
  explicit ConfigError(std::vector<std::string> problems)
    : Error(join(problems))
    , problems(std::move(problems))
  {
  }
  std::vector<std::string> problems;

private:
  static std::string join(std::vector<std::string> const &ps)
  {
    std::string out = "invalid configuration:";
    for (auto const &p : ps) { out += "\n  " + p; }
    return out;
  }
};

} // namespace vffrls
