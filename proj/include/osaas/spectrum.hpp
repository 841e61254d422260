#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "osaas/errors.hpp"

namespace osaas {

// Frequencies live on a 25 GHz grid and are stored as integer GHz so channel
// placement and adjacency arithmetic stay exact.
struct FrequencyGhz {
  int ghz = 0;

  friend bool operator==(FrequencyGhz a, FrequencyGhz b) { return a.ghz == b.ghz; }
  friend bool operator!=(FrequencyGhz a, FrequencyGhz b) { return a.ghz != b.ghz; }
  friend bool operator<(FrequencyGhz a, FrequencyGhz b) { return a.ghz < b.ghz; }
};

constexpr int kGridGhz = 25;

enum class UserId { User1 = 0, User2 = 1, User3 = 2 };

enum class Label { NoInterference = 0, User1 = 1, User2 = 2, User3 = 3 };

enum class InterferenceKind { None = 0, PowerIncrease = 1, AddDrop = 2, Ook = 3 };

enum class ChannelKind { CoherentLike = 0, Ook = 1 };

std::string to_string(UserId u);
std::string to_string(Label l);
std::string to_string(InterferenceKind k);
Label label_from_string(const std::string& s);
InterferenceKind kind_from_string(const std::string& s);
Label label_of(UserId u);

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

inline double mw_to_dbm(double mw) {
  if (mw <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(mw);
}

// A leased spectrum window: the service hand-over is the demarcation points
// plus these limits; the operator does not see inside the window.
struct OsaasWindow {
  UserId user;
  FrequencyGhz start;
  FrequencyGhz end;
  double max_power_dbm = 10.0;
  double max_psd_dbm_per_ghz = -15.0;
  int add_node = 0;  // 0-based ROADM index where this user's spectrum enters

  int width_ghz() const { return end.ghz - start.ghz; }
};

// A channel a user lights inside its window. For kind=Ook this is a 10 Gbit/s
// intensity-modulated carrier occupying one 50 GHz slot.
struct UserChannel {
  FrequencyGhz center;
  double width_ghz = 50.0;
  double launch_power_dbm = 0.0;
  ChannelKind kind = ChannelKind::CoherentLike;
};

// Operator-owned DP-64QAM probe channel in the guard band between windows.
struct OperatorChannel {
  int index = 0;
  FrequencyGhz center;
  double width_ghz = 50.0;
  double launch_power_dbm = 0.0;
  std::string modulation = "dp_64qam";
};

struct Topology {
  int roadm_count = 4;
  std::vector<double> span_lengths_km{50.0, 45.0, 50.0, 45.0};
  double edfa_gain_db = 18.0;
  double fiber_att_db_per_km = 0.2;

  double span_loss_db(std::size_t span) const {
    return span_lengths_km.at(span) * fiber_att_db_per_km;
  }
};

struct Plan {
  Topology topology;
  std::array<OsaasWindow, 3> windows;
  std::array<OperatorChannel, 4> operator_channels;

  const OsaasWindow& window(UserId u) const {
    return windows[static_cast<std::size_t>(u)];
  }
  void validate() const;
};

// The fixed line plan: three 400 GHz windows with four operator probes in the
// guard gaps / band edges, over a 4-ROADM line totaling 190 km of fiber.
Plan default_plan();

// Peak per-channel power spectral density inside a window, dBm/GHz.
// Empty channel list -> -inf (no signal).
double window_psd(const OsaasWindow& w, const std::vector<UserChannel>& channels);

// Total window power, dBm (mW-domain sum). Empty list -> -inf.
double total_window_power(const OsaasWindow& w, const std::vector<UserChannel>& channels);

// The fully loaded steady configuration of a window: 8 x 50 GHz coherent
// channels at 0 dBm, centers at start + 25 + 50*i.
std::vector<UserChannel> steady_channels(const OsaasWindow& w);

nlohmann::json plan_to_json(const Plan& p);
Plan plan_from_json(const nlohmann::json& j);

}  // namespace osaas
