#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adaptive.hpp"
#include "receiver.hpp"

namespace vffrls {

enum class ChannelModel
{
  Static,
  Jakes,
};

enum class ReceiverKind
{
  Fixed,
  Gvff,
  Ctvff,
  Sg,
  Rake,
};

ReceiverKind     parse_receiver_kind(std::string_view name);
std::string_view to_string(ReceiverKind kind);

struct ReceiverConfig
{
  ReceiverKind    kind = ReceiverKind::Ctvff;
  FixedFf         fixed;
  GvffParams      gvff;
  CtvffParams     ctvff;
  ErrorConvention convention = ErrorConvention::APriori;
  double          sg_step    = 0.025;

  std::string label() const { return std::string(to_string(kind)); }
};

// Users joining at `symbol`; they are active from symbol + 1 onwards.
struct EntryEvent
{
  std::int64_t        symbol = 0;
  std::vector<double> power_offsets_db;
};

struct ScenarioConfig
{
  int                         N         = 15;
  int                         K_initial = 1;
  std::vector<double>         power_offsets_db; // interferers 2..K_initial relative to the desired user, default 0
  double                      snr_db = 15.0;
  ChannelModel                channel_model = ChannelModel::Jakes;
  std::vector<double>         path_powers_db{0.0, -6.0, -10.0};
  double                      f_dT = 1e-5;
  std::vector<ReceiverConfig> receivers;
  std::int64_t                training_symbols = 250;
  std::int64_t                total_symbols    = 2000;
  std::vector<EntryEvent>     events;
  int                         runs = 200;
  std::uint64_t               seed = 1;
  std::optional<std::string>  code_file;

  Index  paths() const { return static_cast<Index>(path_powers_db.size()); }
  Index  filter_length() const { return N + paths() - 1; }
  int    total_users() const;
  double noise_variance() const; // sigma^2 = A_1^2 10^(-SNR/10), A_1 = 1
};

// Every violated invariant, one human-readable line each. Empty means valid.
std::vector<std::string> validation_errors(ScenarioConfig const &config);

// Throws ConfigError listing all problems.
void require_valid(ScenarioConfig const &config);

} // namespace vffrls
