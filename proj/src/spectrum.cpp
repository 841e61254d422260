#include "osaas/spectrum.hpp"

#include <algorithm>
#include <numeric>

namespace osaas {

std::string to_string(UserId u) {
  switch (u) {
    case UserId::User1: return "user1";
    case UserId::User2: return "user2";
    case UserId::User3: return "user3";
  }
  throw ValidationError("bad UserId");
}

std::string to_string(Label l) {
  switch (l) {
    case Label::NoInterference: return "no_interference";
    case Label::User1: return "user1";
    case Label::User2: return "user2";
    case Label::User3: return "user3";
  }
  throw ValidationError("bad Label");
}

std::string to_string(InterferenceKind k) {
  switch (k) {
    case InterferenceKind::None: return "none";
    case InterferenceKind::PowerIncrease: return "power_increase";
    case InterferenceKind::AddDrop: return "add_drop";
    case InterferenceKind::Ook: return "ook";
  }
  throw ValidationError("bad InterferenceKind");
}

Label label_from_string(const std::string& s) {
  if (s == "no_interference") return Label::NoInterference;
  if (s == "user1") return Label::User1;
  if (s == "user2") return Label::User2;
  if (s == "user3") return Label::User3;
  throw IoError("unknown label: " + s);
}

InterferenceKind kind_from_string(const std::string& s) {
  if (s == "none") return InterferenceKind::None;
  if (s == "power_increase") return InterferenceKind::PowerIncrease;
  if (s == "add_drop") return InterferenceKind::AddDrop;
  if (s == "ook") return InterferenceKind::Ook;
  throw IoError("unknown interference kind: " + s);
}

Label label_of(UserId u) {
  return static_cast<Label>(static_cast<int>(u) + 1);
}

void Plan::validate() const {
  if (topology.roadm_count < 2) throw ValidationError("plan: need at least 2 ROADMs");
  if (topology.span_lengths_km.size() != static_cast<std::size_t>(topology.roadm_count))
    throw ValidationError("plan: span count must equal ROADM count (line + terminal span)");
  for (double s : topology.span_lengths_km)
    if (s <= 0.0) throw ValidationError("plan: non-positive span length");

  for (const auto& w : windows) {
    if (w.start.ghz % kGridGhz != 0 || w.end.ghz % kGridGhz != 0)
      throw ValidationError("plan: window bounds off the 25 GHz grid");
    if (w.width_ghz() != 400)
      throw ValidationError("plan: window width must be 400 GHz");
    if (w.add_node < 0 || w.add_node >= topology.roadm_count)
      throw ValidationError("plan: window add_node out of range");
  }
  for (std::size_t i = 0; i + 1 < windows.size(); ++i) {
    if (!(windows[i].end < windows[i + 1].start))
      throw ValidationError("plan: windows must be disjoint and ascending");
  }
  for (const auto& oc : operator_channels) {
    if (oc.center.ghz % kGridGhz != 0)
      throw ValidationError("plan: operator channel off the 25 GHz grid");
    for (const auto& w : windows) {
      if (oc.center.ghz >= w.start.ghz && oc.center.ghz <= w.end.ghz)
        throw ValidationError("plan: operator channel inside a leased window");
    }
  }
}

Plan default_plan() {
  Plan p;
  p.windows = {
      OsaasWindow{UserId::User1, {192400}, {192800}, 10.0, -15.0, 0},
      OsaasWindow{UserId::User2, {192850}, {193250}, 10.0, -15.0, 0},
      OsaasWindow{UserId::User3, {193300}, {193700}, 10.0, -15.0, 1},
  };
  p.operator_channels = {
      OperatorChannel{0, {192375}},
      OperatorChannel{1, {192825}},
      OperatorChannel{2, {193275}},
      OperatorChannel{3, {193725}},
  };
  p.validate();
  return p;
}

static void check_channel_in_window(const OsaasWindow& w, const UserChannel& c) {
  const double lo = c.center.ghz - c.width_ghz / 2.0;
  const double hi = c.center.ghz + c.width_ghz / 2.0;
  if (lo < w.start.ghz - 1e-9 || hi > w.end.ghz + 1e-9)
    throw ValidationError("channel at " + std::to_string(c.center.ghz) +
                          " GHz extends outside window of " + to_string(w.user));
}

double window_psd(const OsaasWindow& w, const std::vector<UserChannel>& channels) {
  double peak_mw_per_ghz = 0.0;
  for (const auto& c : channels) {
    check_channel_in_window(w, c);
    if (c.width_ghz <= 0.0) throw ValidationError("channel width must be positive");
    peak_mw_per_ghz = std::max(peak_mw_per_ghz, dbm_to_mw(c.launch_power_dbm) / c.width_ghz);
  }
  return mw_to_dbm(peak_mw_per_ghz);
}

double total_window_power(const OsaasWindow& w, const std::vector<UserChannel>& channels) {
  double sum_mw = 0.0;
  for (const auto& c : channels) {
    check_channel_in_window(w, c);
    sum_mw += dbm_to_mw(c.launch_power_dbm);
  }
  return mw_to_dbm(sum_mw);
}

std::vector<UserChannel> steady_channels(const OsaasWindow& w) {
  std::vector<UserChannel> out;
  out.reserve(8);
  for (int i = 0; i < 8; ++i) {
    out.push_back(UserChannel{{w.start.ghz + 25 + 50 * i}, 50.0, 0.0, ChannelKind::CoherentLike});
  }
  return out;
}

nlohmann::json plan_to_json(const Plan& p) {
  nlohmann::json j;
  j["topology"] = {
      {"roadm_count", p.topology.roadm_count},
      {"span_lengths_km", p.topology.span_lengths_km},
      {"edfa_gain_db", p.topology.edfa_gain_db},
      {"fiber_att_db_per_km", p.topology.fiber_att_db_per_km},
  };
  for (const auto& w : p.windows) {
    j["windows"].push_back({
        {"user", to_string(w.user)},
        {"start_ghz", w.start.ghz},
        {"end_ghz", w.end.ghz},
        {"max_power_dbm", w.max_power_dbm},
        {"max_psd_dbm_per_ghz", w.max_psd_dbm_per_ghz},
        {"add_node", w.add_node},
    });
  }
  for (const auto& oc : p.operator_channels) {
    j["operator_channels"].push_back({
        {"index", oc.index},
        {"center_ghz", oc.center.ghz},
        {"width_ghz", oc.width_ghz},
        {"launch_power_dbm", oc.launch_power_dbm},
        {"modulation", oc.modulation},
    });
  }
  return j;
}

static UserId user_from_string(const std::string& s) {
  if (s == "user1") return UserId::User1;
  if (s == "user2") return UserId::User2;
  if (s == "user3") return UserId::User3;
  throw IoError("unknown user: " + s);
}

Plan plan_from_json(const nlohmann::json& j) {
  Plan p;
  const auto& t = j.at("topology");
  p.topology.roadm_count = t.at("roadm_count").get<int>();
  p.topology.span_lengths_km = t.at("span_lengths_km").get<std::vector<double>>();
  p.topology.edfa_gain_db = t.at("edfa_gain_db").get<double>();
  p.topology.fiber_att_db_per_km = t.at("fiber_att_db_per_km").get<double>();
  const auto& jw = j.at("windows");
  if (jw.size() != p.windows.size()) throw IoError("plan: expected 3 windows");
  for (std::size_t i = 0; i < p.windows.size(); ++i) {
    auto& w = p.windows[i];
    w.user = user_from_string(jw[i].at("user").get<std::string>());
    w.start.ghz = jw[i].at("start_ghz").get<int>();
    w.end.ghz = jw[i].at("end_ghz").get<int>();
    w.max_power_dbm = jw[i].at("max_power_dbm").get<double>();
    w.max_psd_dbm_per_ghz = jw[i].at("max_psd_dbm_per_ghz").get<double>();
    w.add_node = jw[i].at("add_node").get<int>();
  }
  const auto& jo = j.at("operator_channels");
  if (jo.size() != p.operator_channels.size()) throw IoError("plan: expected 4 operator channels");
  for (std::size_t i = 0; i < p.operator_channels.size(); ++i) {
    auto& oc = p.operator_channels[i];
    oc.index = jo[i].at("index").get<int>();
    oc.center.ghz = jo[i].at("center_ghz").get<int>();
    oc.width_ghz = jo[i].at("width_ghz").get<double>();
    oc.launch_power_dbm = jo[i].at("launch_power_dbm").get<double>();
    oc.modulation = jo[i].at("modulation").get<std::string>();
  }
  p.validate();
  return p;
}

}  // namespace osaas
