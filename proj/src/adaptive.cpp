#include "vffrls/adaptive.hpp"

#include <string>

namespace vffrls {

MechanismKind parse_mechanism_kind(std::string_view name)
{
  if (name == "fixed") { return MechanismKind::Fixed; }
  if (name == "gvff") { return MechanismKind::Gvff; }
  if (name == "ctvff") { return MechanismKind::Ctvff; }
  throw UnsupportedMechanism("unsupported forgetting-factor mechanism '" + std::string(name) + "'");
}

std::string_view to_string(MechanismKind kind)
{
  switch (kind) {
  case MechanismKind::Fixed: return "fixed";
  case MechanismKind::Gvff: return "gvff";
  case MechanismKind::Ctvff: return "ctvff";
  }
  throw UnsupportedMechanism("unsupported forgetting-factor mechanism");
}

OpCount count_extra_ops(MechanismKind kind, std::int64_t M)
{
  if (M < 1) { throw DomainError("filter length must be positive"); }
  switch (kind) {
  case MechanismKind::Fixed: return {0, 0};
  case MechanismKind::Ctvff: return {7, 3};
  case MechanismKind::Gvff: return {7 * M * M + 4 * M + 2, 7 * M * M + M};
  }
  throw UnsupportedMechanism("unsupported forgetting-factor mechanism");
}

OpCount count_extra_ops(std::string_view kind, std::int64_t M) { return count_extra_ops(parse_mechanism_kind(kind), M); }

} // namespace vffrls
