#include "osaas/sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "osaas/rng.hpp"

namespace osaas {

namespace {

constexpr int kStages = 4;
// 10*log10(h*nu*B_ref / 1 mW) at 1550 nm with B_ref = 12.5 GHz, i.e. the
// -58 dBm ASE floor behind the classic OSNR = P_in + 58 - NF rule.
constexpr double kAseFloorDb = 58.0;

struct LineChannel {
  double center_ghz = 0.0;
  double launch_dbm = 0.0;  // effective, user offset applied
  double launch_mw = 0.0;
  int add_node = 0;
  bool is_ook = false;
  int op_index = -1;  // >= 0 for operator probes
};

bool present_at(const LineChannel& c, int stage) { return c.add_node <= stage; }

std::vector<LineChannel> build_channels(const Plan& plan, const NetworkState& state) {
  std::vector<LineChannel> out;
  for (const auto& oc : plan.operator_channels) {
    LineChannel lc;
    lc.center_ghz = oc.center.ghz;
    lc.launch_dbm = oc.launch_power_dbm;
    lc.launch_mw = dbm_to_mw(lc.launch_dbm);
    lc.add_node = 0;
    lc.op_index = oc.index;
    out.push_back(lc);
  }
  for (std::size_t u = 0; u < state.user_channels.size(); ++u) {
    const auto& w = plan.windows[u];
    for (const auto& ch : state.user_channels[u]) {
      LineChannel lc;
      lc.center_ghz = ch.center.ghz;
      lc.launch_dbm = ch.launch_power_dbm + state.power_offset_db[u];
      lc.launch_mw = dbm_to_mw(lc.launch_dbm);
      lc.add_node = w.add_node;
      out.push_back(lc);
    }
  }
  if (state.ook) {
    const auto& w = plan.window(state.ook->user);
    LineChannel lc;
    lc.center_ghz = state.ook->center.ghz;
    lc.launch_dbm = state.ook->launch_power_dbm;
    lc.launch_mw = dbm_to_mw(lc.launch_dbm);
    lc.add_node = w.add_node;
    lc.is_ook = true;
    out.push_back(lc);
  }
  return out;
}

// Linear, zero-mean gain tilt across the operator band: -1/2 at the lowest
// probe frequency, +1/2 at the highest.
double band_tilt(const Plan& plan, double f_ghz) {
  double lo = plan.operator_channels.front().center.ghz;
  double hi = plan.operator_channels.front().center.ghz;
  for (const auto& oc : plan.operator_channels) {
    lo = std::min(lo, static_cast<double>(oc.center.ghz));
    hi = std::max(hi, static_cast<double>(oc.center.ghz));
  }
  return (f_ghz - 0.5 * (lo + hi)) / (hi - lo);
}

struct LineSolution {
  std::vector<LineChannel> channels;
  std::array<double, kStages> dp_db{};  // coherent total-power deviation per stage
  // p_out[stage] per channel, NaN where absent
  std::vector<std::array<double, kStages>> p_out_dbm;
  std::array<std::array<double, 4>, kStages> port_mw{};  // [stage][add,drop,in,out]
};

LineSolution solve_line(const Plan& plan, const NetworkState& state, const SimParams& params) {
  if (plan.topology.roadm_count != kStages)
    throw ValidationError("telemetry geometry requires a 4-ROADM line");
  state.validate(plan);

  LineSolution sol;
  sol.channels = build_channels(plan, state);
  const auto steady_chans = build_channels(plan, NetworkState::steady(plan, state.added_ase_osnr_db));

  for (int s = 0; s < kStages; ++s) {
    double cur = 0.0, ref = 0.0;
    for (const auto& c : sol.channels)
      if (!c.is_ook && present_at(c, s)) cur += c.launch_mw;
    for (const auto& c : steady_chans)
      if (!c.is_ook && present_at(c, s)) ref += c.launch_mw;
    sol.dp_db[s] = 10.0 * std::log10(cur / ref);
    if (!std::isfinite(sol.dp_db[s]))
      throw SimulationError("non-finite aggregate power at ROADM " + std::to_string(s + 1));
  }

  // Per-channel power trajectory: the WSS re-equalizes each channel to its
  // launch target at every node, leaving only the accumulated AGC gain error.
  sol.p_out_dbm.assign(sol.channels.size(), {});
  for (std::size_t i = 0; i < sol.channels.size(); ++i) {
    const auto& c = sol.channels[i];
    const double tilt = band_tilt(plan, c.center_ghz);
    double cum_eps = 0.0;
    for (int s = 0; s < kStages; ++s) {
      if (!present_at(c, s)) {
        sol.p_out_dbm[i][s] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      cum_eps += params.agc_tilt_coeff * sol.dp_db[s] * tilt;
      sol.p_out_dbm[i][s] = c.launch_dbm + cum_eps;
      if (!std::isfinite(sol.p_out_dbm[i][s]))
        throw SimulationError("non-finite channel power at ROADM " + std::to_string(s + 1));
    }
  }

  for (int s = 0; s < kStages; ++s) {
    double add = 0.0, in = 0.0, out = 0.0;
    for (std::size_t i = 0; i < sol.channels.size(); ++i) {
      const auto& c = sol.channels[i];
      if (c.add_node == s) add += c.launch_mw;
      if (c.add_node < s)
        in += dbm_to_mw(sol.p_out_dbm[i][s - 1] - plan.topology.span_loss_db(s - 1));
      if (present_at(c, s)) out += dbm_to_mw(sol.p_out_dbm[i][s]);
    }
    sol.port_mw[s] = {add, 0.0, in, out};
  }
  return sol;
}

double port_reading_dbm(double mw, const SimParams& params) {
  if (mw <= 0.0) return params.monitor_floor_dbm;
  return std::max(mw_to_dbm(mw), params.monitor_floor_dbm);
}

double clamp_ber(double ber) { return std::clamp(ber, 1e-8, 0.5); }
double clamp_osnr(double osnr) { return std::clamp(osnr, 5.0, 40.0); }

Telemetry expected_telemetry(const Plan& plan, const NetworkState& state, const SimParams& params) {
  const LineSolution sol = solve_line(plan, state, params);

  std::array<std::array<double, 4>, kStages> ports{};
  for (int s = 0; s < kStages; ++s)
    for (int p = 0; p < 4; ++p) ports[s][p] = port_reading_dbm(sol.port_mw[s][p], params);

  Telemetry tele{};
  for (std::size_t i = 0; i < sol.channels.size(); ++i) {
    const auto& c = sol.channels[i];
    if (c.op_index < 0) continue;
    ChannelTelemetry& t = tele[static_cast<std::size_t>(c.op_index)];

    // ASE chain: booster input sits one full gain below the add level; the
    // downstream preamps see the channel after each span loss. The loaded
    // broadband ASE source sets an extra OSNR floor.
    double nsr_ase = 0.0;
    for (int s = 0; s < kStages; ++s) {
      const double p_in = s == 0 ? c.launch_dbm - plan.topology.edfa_gain_db
                                 : c.launch_dbm - plan.topology.span_loss_db(s - 1);
      nsr_ase += std::pow(10.0, -edfa_stage_osnr_db(p_in, params.nf_db) / 10.0);
    }
    nsr_ase += std::pow(10.0, -state.added_ase_osnr_db / 10.0);

    // Kerr crosstalk from every co-propagating coherent carrier, per span,
    // rolled off with walk-off distance. The rogue OOK carrier is handled by
    // the dedicated intensity/polarization terms below instead.
    double nli_sum = 0.0;
    for (int s = 0; s < kStages; ++s) {
      for (const auto& o : sol.channels) {
        if (o.is_ook || !present_at(o, s)) continue;
        const double df = (o.center_ghz - c.center_ghz) / 50.0;
        nli_sum += o.launch_mw * o.launch_mw / (1.0 + df * df);
      }
    }
    const double nsr_nli = params.nli_coeff * nli_sum;

    double nsr_xpm = 0.0;
    double sop = params.sop_base_krad_s;
    if (state.ook) {
      const double df = std::abs(state.ook->center.ghz - c.center_ghz);
      const double ook_mw = dbm_to_mw(state.ook->launch_power_dbm);
      const int shared_spans = kStages - plan.window(state.ook->user).add_node;
      double weight = 0.0;
      if (df <= params.xpm_range_ghz) weight = 1.0;
      else if (df <= params.xpol_range_ghz) weight = params.xpm_far_weight;
      nsr_xpm = params.xpm_coeff * ook_mw * weight * shared_spans;
      if (df <= params.xpol_range_ghz) sop += params.sop_coeff_krad_per_mw * ook_mw;
    }

    // Gain misadjustment hurts the modem whichever direction it points; only
    // power excursions above the provisioned load drive it.
    const double tilt = band_tilt(plan, c.center_ghz);
    double agc_pen = 0.0;
    for (int s = 0; s < kStages; ++s)
      agc_pen += params.agc_tilt_coeff * std::max(sol.dp_db[s], 0.0) * std::abs(tilt);

    const double nsr_total = nsr_ase + nsr_nli + nsr_xpm;
    if (!std::isfinite(nsr_total) || nsr_total <= 0.0)
      throw SimulationError("non-finite noise accumulation on probe " + std::to_string(c.op_index + 1));
    const double snr_eff_db = -10.0 * std::log10(nsr_total) - agc_pen;

    t.q_factor_db = snr_eff_db - params.qam_snr_gap_db;
    t.prefec_ber = q_to_ber(t.q_factor_db);
    t.osnr_db = clamp_osnr(-10.0 * std::log10(nsr_ase));
    t.esnr_db = snr_eff_db - params.esnr_gap_db;
    t.rx_power_dbm = sol.p_out_dbm[i][kStages - 1] - plan.topology.span_loss_db(kStages - 1);
    t.sop_rate_krad_s = sop;
    t.cfo_mhz = params.cfo_mhz[c.op_index];
    t.cdc_ps_per_nm = params.cdc_ps_per_nm[c.op_index];
    t.dgd_ps = params.dgd_ps[c.op_index];
    t.pdl_db = params.pdl_db[c.op_index];
    for (int s = 0; s < kStages; ++s) t.ocm_power_dbm[s] = sol.p_out_dbm[i][s];
    for (int s = 0; s < kStages; ++s) t.port_powers_dbm[s] = ports[s];
  }
  return tele;
}

}  // namespace

double edfa_stage_osnr_db(double input_power_dbm, double nf_db) {
  return input_power_dbm + kAseFloorDb - nf_db;
}

double q_to_ber(double q_db) {
  const double q_lin = std::pow(10.0, q_db / 20.0);
  return clamp_ber(0.5 * std::erfc(q_lin / std::sqrt(2.0)));
}

double ber_to_q_db(double ber) {
  if (ber <= 1e-8 || ber >= 0.5) throw ValidationError("ber_to_q_db: ber outside invertible range");
  double lo = -40.0, hi = 40.0;  // q_to_ber is decreasing in q
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (q_to_ber(mid) > ber ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

NetworkState NetworkState::steady(const Plan& plan, double added_ase_osnr_db,
                                  std::uint64_t noise_seed) {
  NetworkState s;
  for (std::size_t u = 0; u < s.user_channels.size(); ++u)
    s.user_channels[u] = steady_channels(plan.windows[u]);
  s.added_ase_osnr_db = added_ase_osnr_db;
  s.noise_seed = noise_seed;
  return s;
}

void NetworkState::validate(const Plan& plan) const {
  for (std::size_t u = 0; u < user_channels.size(); ++u) {
    const auto& w = plan.windows[u];
    for (const auto& c : user_channels[u]) {
      if (c.kind != ChannelKind::CoherentLike)
        throw ValidationError("rogue carriers go in the ook field, not user_channels");
      const double lo = c.center.ghz - c.width_ghz / 2.0;
      const double hi = c.center.ghz + c.width_ghz / 2.0;
      if (lo < w.start.ghz - 1e-9 || hi > w.end.ghz + 1e-9)
        throw ValidationError("channel outside window of " + to_string(w.user));
    }
    if (power_offset_db[u] < 0.0 || power_offset_db[u] > 12.0)
      throw ValidationError("power offset outside [0, 12] dB for " + to_string(w.user));
  }
  if (added_ase_osnr_db < 10.0 || added_ase_osnr_db > 40.0)
    throw ValidationError("added ASE operating point outside [10, 40] dB OSNR");
  if (ook) {
    const auto& w = plan.window(ook->user);
    if (ook->center.ghz - 25 < w.start.ghz || ook->center.ghz + 25 > w.end.ghz)
      throw ValidationError("ook carrier slot outside window of " + to_string(ook->user));
    if (ook->launch_power_dbm < 0.0 || ook->launch_power_dbm > 12.0)
      throw ValidationError("ook launch power outside [0, 12] dBm");
    // Co-channels must be dropped so the window stays at its power cap; above
    // the cap the rogue carrier has to be alone.
    double coherent_mw = 0.0;
    for (const auto& c : user_channels[static_cast<std::size_t>(ook->user)])
      coherent_mw += dbm_to_mw(c.launch_power_dbm + power_offset_db[static_cast<std::size_t>(ook->user)]);
    const double budget = std::max(0.0, dbm_to_mw(w.max_power_dbm) - dbm_to_mw(ook->launch_power_dbm));
    if (coherent_mw > budget + 1e-9)
      throw ValidationError("window of " + to_string(ook->user) +
                            " exceeds its power cap alongside the ook carrier");
  }
}

std::vector<UserId> NetworkState::deviating_users(const Plan& plan) const {
  std::vector<UserId> out;
  for (std::size_t u = 0; u < user_channels.size(); ++u) {
    bool dev = std::abs(power_offset_db[u]) > 1e-12;
    if (ook && ook->user == plan.windows[u].user) dev = true;
    const auto ref = steady_channels(plan.windows[u]);
    if (user_channels[u].size() != ref.size()) dev = true;
    if (!dev) {
      for (std::size_t i = 0; i < ref.size(); ++i) {
        const auto& a = user_channels[u][i];
        const auto& b = ref[i];
        if (a.center != b.center || std::abs(a.launch_power_dbm - b.launch_power_dbm) > 1e-9 ||
            std::abs(a.width_ghz - b.width_ghz) > 1e-9 || a.kind != b.kind) {
          dev = true;
          break;
        }
      }
    }
    if (dev) out.push_back(plan.windows[u].user);
  }
  return out;
}

Telemetry propagate_expected(const Plan& plan, const NetworkState& state, const SimParams& params) {
  return expected_telemetry(plan, state, params);
}

Telemetry propagate(const Plan& plan, const NetworkState& state, const SimParams& params) {
  Telemetry t = expected_telemetry(plan, state, params);
  Rng rng(state.noise_seed);
  const MeasNoise& n = params.noise;

  // Port aggregates are one shared physical reading; jitter them once and
  // replicate across the four probe rows.
  std::array<std::array<double, 4>, 4> ports = t[0].port_powers_dbm;
  for (auto& roadm : ports)
    for (double& v : roadm) v += rng.gaussian(0.0, n.power_db);

  for (auto& ch : t) {
    ch.port_powers_dbm = ports;
    for (double& v : ch.ocm_power_dbm) v += rng.gaussian(0.0, n.power_db);
    ch.cfo_mhz += rng.gaussian(0.0, n.cfo_mhz);
    ch.prefec_ber = clamp_ber(ch.prefec_ber * std::exp(rng.gaussian(0.0, n.ber_ln)));
    ch.cdc_ps_per_nm += rng.gaussian(0.0, n.cdc_ps_per_nm);
    ch.dgd_ps = std::max(0.0, ch.dgd_ps + rng.gaussian(0.0, n.dgd_ps));
    ch.rx_power_dbm += rng.gaussian(0.0, n.power_db);
    ch.osnr_db = clamp_osnr(ch.osnr_db + rng.gaussian(0.0, n.osnr_db));
    ch.q_factor_db += rng.gaussian(0.0, n.q_db);
    ch.pdl_db = std::max(0.0, ch.pdl_db + rng.gaussian(0.0, n.pdl_db));
    ch.sop_rate_krad_s = std::max(0.0, ch.sop_rate_krad_s + rng.gaussian(0.0, n.sop_krad_s));
    ch.esnr_db += rng.gaussian(0.0, n.esnr_db);
  }
  return t;
}

LineTrace trace_line(const Plan& plan, const NetworkState& state, const SimParams& params) {
  const LineSolution sol = solve_line(plan, state, params);
  LineTrace tr;
  for (std::size_t i = 0; i < sol.channels.size(); ++i) {
    const auto& c = sol.channels[i];
    LineTrace::ChannelPath cp;
    cp.center.ghz = static_cast<int>(c.center_ghz);
    cp.add_node = c.add_node;
    cp.is_ook = c.is_ook;
    cp.launch_dbm = c.launch_dbm;
    for (int s = 0; s < kStages; ++s) {
      cp.p_out_dbm[s] = sol.p_out_dbm[i][s];
      cp.p_in_dbm[s] = (c.add_node < s)
                           ? sol.p_out_dbm[i][s - 1] - plan.topology.span_loss_db(s - 1)
                           : std::numeric_limits<double>::quiet_NaN();
    }
    tr.channels.push_back(cp);
  }
  for (int s = 0; s < kStages; ++s)
    for (int p = 0; p < 4; ++p)
      tr.port_powers_dbm[s][p] = port_reading_dbm(sol.port_mw[s][p], params);
  return tr;
}

Label label_state(const Telemetry& observed, const Telemetry& baseline,
                  const NetworkState& state, const Plan& plan, const SimParams& params) {
  double max_drop = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < observed.size(); ++i)
    max_drop = std::max(max_drop, baseline[i].q_factor_db - observed[i].q_factor_db);
  if (!(max_drop > params.q_threshold_db)) return Label::NoInterference;

  const auto devs = state.deviating_users(plan);
  if (devs.empty())
    throw SimulationError("probe Q dropped with no deviating user in the state");
  if (devs.size() > 1)
    throw ValidationError("scenario has " + std::to_string(devs.size()) +
                          " deviating users; exactly one is allowed");
  return label_of(devs.front());
}

std::vector<int> adjacent_operator_channels(const Plan& plan, UserId user) {
  const auto& w = plan.window(user);
  std::vector<int> out;
  for (const auto& oc : plan.operator_channels) {
    if (std::abs(oc.center.ghz - w.start.ghz) <= 50 || std::abs(oc.center.ghz - w.end.ghz) <= 50)
      out.push_back(oc.index);
  }
  return out;
}

namespace {

double bisect_increasing(const std::function<double(double)>& f, double target,
                         const std::string& what) {
  double hi = 1e-9;
  int guard = 0;
  while (f(hi) < target && guard++ < 220) hi *= 2.0;
  if (f(hi) < target) throw ConfigError("calibration target unreachable: " + what);
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double max_probe_drop(const Plan& plan, const NetworkState& st, const SimParams& p,
                      const Telemetry& base) {
  const Telemetry t = propagate_expected(plan, st, p);
  double d = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i)
    d = std::max(d, base[i].q_factor_db - t[i].q_factor_db);
  return d;
}

}  // namespace

SimParams calibrate(const Plan& plan, SimParams base, const CalibrationTargets& targets) {
  SimParams p = base;
  p.nli_coeff = 0.0;
  p.agc_tilt_coeff = 0.0;
  p.xpm_coeff = 0.0;

  // The user entering furthest down the line couples through the fewest spans;
  // solving on that user makes the targets hold for everyone.
  UserId weakest = UserId::User1;
  for (const auto& w : plan.windows)
    if (w.add_node > plan.window(weakest).add_node) weakest = w.user;
  const std::size_t wi = static_cast<std::size_t>(weakest);

  NetworkState probe = NetworkState::steady(plan);
  probe.power_offset_db[wi] = targets.type1_probe_offset_db;

  // 1) AGC share: with the other couplings off, the worst-probe Q drop equals
  //    the AGC penalty exactly.
  {
    SimParams q = p;
    const Telemetry base_t = propagate_expected(plan, NetworkState::steady(plan), q);
    p.agc_tilt_coeff = bisect_increasing(
        [&](double c) {
          q.agc_tilt_coeff = c;
          return max_probe_drop(plan, probe, q, base_t);
        },
        targets.agc_share_db, "agc gain-error share");
  }

  // 2) Kerr coupling: drive the worst probe adjacent to the offending window
  //    a fixed margin past the FEC limit.
  {
    SimParams q = p;
    const auto adj = adjacent_operator_channels(plan, weakest);
    p.nli_coeff = bisect_increasing(
        [&](double c) {
          q.nli_coeff = c;
          const Telemetry t = propagate_expected(plan, probe, q);
          double worst = 0.0;
          for (int idx : adj) worst = std::max(worst, t[static_cast<std::size_t>(idx)].prefec_ber);
          return worst;
        },
        targets.fec_ber_margin * p.fec_ber, "post-FEC crossing at the probe offset");
  }

  // 3) OOK visibility: a rogue carrier in the first slot of the head-end user
  //    reaches (almost) the labeling threshold at the visibility launch power.
  {
    UserId strongest = UserId::User1;
    for (const auto& w : plan.windows)
      if (w.add_node < plan.window(strongest).add_node) strongest = w.user;
    const std::size_t si = static_cast<std::size_t>(strongest);

    NetworkState ook_state = NetworkState::steady(plan);
    auto& chans = ook_state.user_channels[si];
    const FrequencyGhz slot0 = chans.front().center;
    chans.erase(chans.begin());
    ook_state.ook = OokChannelConfig{strongest, slot0, targets.ook_visible_above_dbm};

    SimParams q = p;
    const Telemetry base_t = propagate_expected(plan, NetworkState::steady(plan), q);
    p.xpm_coeff = bisect_increasing(
        [&](double c) {
          q.xpm_coeff = c;
          return max_probe_drop(plan, ook_state, q, base_t);
        },
        targets.ook_drop_fraction * p.q_threshold_db, "ook visibility threshold");

    const Telemetry base_f = propagate_expected(plan, NetworkState::steady(plan), p);
    if (!(max_probe_drop(plan, ook_state, p, base_f) < p.q_threshold_db))
      throw ConfigError("calibration check failed: ook carrier already visible at " +
                        std::to_string(targets.ook_visible_above_dbm) + " dBm");
    ook_state.ook->launch_power_dbm = targets.ook_visible_above_dbm + 1.0;
    if (!(max_probe_drop(plan, ook_state, p, base_f) > p.q_threshold_db))
      throw ConfigError("calibration check failed: ook carrier invisible above " +
                        std::to_string(targets.ook_visible_above_dbm) + " dBm");
  }

  // Verify the power-offset targets for every user.
  const Telemetry base_t = propagate_expected(plan, NetworkState::steady(plan), p);
  for (const auto& w : plan.windows) {
    const std::size_t u = static_cast<std::size_t>(w.user);
    NetworkState st = NetworkState::steady(plan);
    st.power_offset_db[u] = targets.type1_probe_offset_db;
    const Telemetry t = propagate_expected(plan, st, p);
    double worst_ber = 0.0;
    for (int idx : adjacent_operator_channels(plan, w.user))
      worst_ber = std::max(worst_ber, t[static_cast<std::size_t>(idx)].prefec_ber);
    if (!(worst_ber >= p.fec_ber))
      throw ConfigError("calibration check failed: " + to_string(w.user) + " at +" +
                        std::to_string(targets.type1_probe_offset_db) +
                        " dB does not cross the FEC limit");
    st.power_offset_db[u] = targets.type1_quiet_offset_db;
    if (!(max_probe_drop(plan, st, p, base_t) < p.q_threshold_db))
      throw ConfigError("calibration check failed: " + to_string(w.user) + " at +" +
                        std::to_string(targets.type1_quiet_offset_db) + " dB is not sub-threshold");
  }
  return p;
}

nlohmann::json sim_params_to_json(const SimParams& p) {
  nlohmann::json j;
  j["nf_db"] = p.nf_db;
  j["nli_coeff"] = p.nli_coeff;
  j["agc_tilt_coeff"] = p.agc_tilt_coeff;
  j["xpm_coeff"] = p.xpm_coeff;
  j["xpm_range_ghz"] = p.xpm_range_ghz;
  j["xpol_range_ghz"] = p.xpol_range_ghz;
  j["xpm_far_weight"] = p.xpm_far_weight;
  j["q_threshold_db"] = p.q_threshold_db;
  j["fec_ber"] = p.fec_ber;
  j["qam_snr_gap_db"] = p.qam_snr_gap_db;
  j["monitor_floor_dbm"] = p.monitor_floor_dbm;
  j["sop_base_krad_s"] = p.sop_base_krad_s;
  j["sop_coeff_krad_per_mw"] = p.sop_coeff_krad_per_mw;
  j["esnr_gap_db"] = p.esnr_gap_db;
  j["cfo_mhz"] = p.cfo_mhz;
  j["cdc_ps_per_nm"] = p.cdc_ps_per_nm;
  j["dgd_ps"] = p.dgd_ps;
  j["pdl_db"] = p.pdl_db;
  j["noise"] = {
      {"power_db", p.noise.power_db},       {"osnr_db", p.noise.osnr_db},
      {"q_db", p.noise.q_db},               {"esnr_db", p.noise.esnr_db},
      {"ber_ln", p.noise.ber_ln},           {"cfo_mhz", p.noise.cfo_mhz},
      {"cdc_ps_per_nm", p.noise.cdc_ps_per_nm}, {"dgd_ps", p.noise.dgd_ps},
      {"pdl_db", p.noise.pdl_db},           {"sop_krad_s", p.noise.sop_krad_s},
  };
  return j;
}

SimParams sim_params_from_json(const nlohmann::json& j) {
  SimParams p;
  p.nf_db = j.value("nf_db", p.nf_db);
  p.nli_coeff = j.value("nli_coeff", p.nli_coeff);
  p.agc_tilt_coeff = j.value("agc_tilt_coeff", p.agc_tilt_coeff);
  p.xpm_coeff = j.value("xpm_coeff", p.xpm_coeff);
  p.xpm_range_ghz = j.value("xpm_range_ghz", p.xpm_range_ghz);
  p.xpol_range_ghz = j.value("xpol_range_ghz", p.xpol_range_ghz);
  p.xpm_far_weight = j.value("xpm_far_weight", p.xpm_far_weight);
  p.q_threshold_db = j.value("q_threshold_db", p.q_threshold_db);
  p.fec_ber = j.value("fec_ber", p.fec_ber);
  p.qam_snr_gap_db = j.value("qam_snr_gap_db", p.qam_snr_gap_db);
  p.monitor_floor_dbm = j.value("monitor_floor_dbm", p.monitor_floor_dbm);
  p.sop_base_krad_s = j.value("sop_base_krad_s", p.sop_base_krad_s);
  p.sop_coeff_krad_per_mw = j.value("sop_coeff_krad_per_mw", p.sop_coeff_krad_per_mw);
  p.esnr_gap_db = j.value("esnr_gap_db", p.esnr_gap_db);
  if (j.contains("cfo_mhz")) p.cfo_mhz = j.at("cfo_mhz").get<std::array<double, 4>>();
  if (j.contains("cdc_ps_per_nm")) p.cdc_ps_per_nm = j.at("cdc_ps_per_nm").get<std::array<double, 4>>();
  if (j.contains("dgd_ps")) p.dgd_ps = j.at("dgd_ps").get<std::array<double, 4>>();
  if (j.contains("pdl_db")) p.pdl_db = j.at("pdl_db").get<std::array<double, 4>>();
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    p.noise.power_db = n.value("power_db", p.noise.power_db);
    p.noise.osnr_db = n.value("osnr_db", p.noise.osnr_db);
    p.noise.q_db = n.value("q_db", p.noise.q_db);
    p.noise.esnr_db = n.value("esnr_db", p.noise.esnr_db);
    p.noise.ber_ln = n.value("ber_ln", p.noise.ber_ln);
    p.noise.cfo_mhz = n.value("cfo_mhz", p.noise.cfo_mhz);
    p.noise.cdc_ps_per_nm = n.value("cdc_ps_per_nm", p.noise.cdc_ps_per_nm);
    p.noise.dgd_ps = n.value("dgd_ps", p.noise.dgd_ps);
    p.noise.pdl_db = n.value("pdl_db", p.noise.pdl_db);
    p.noise.sop_krad_s = n.value("sop_krad_s", p.noise.sop_krad_s);
  }
  return p;
}

}  // namespace osaas
