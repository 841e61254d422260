#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "osaas/spectrum.hpp"

namespace osaas {

// Per-OPM Gaussian jitter scales applied on top of the deterministic
// expectation. Powers/OSNR/Q in dB, BER multiplicatively in log-space,
// tracking-style features in their native units.
struct MeasNoise {
  double power_db = 0.1;   // port powers, OCM, rx power
  double osnr_db = 0.1;
  double q_db = 0.1;
  double esnr_db = 0.1;
  double ber_ln = 0.05;    // sigma of ln(BER) perturbation, ~5 % relative
  double cfo_mhz = 2.0;
  double cdc_ps_per_nm = 1.0;
  double dgd_ps = 0.03;
  double pdl_db = 0.02;
  double sop_krad_s = 0.05;
};

struct SimParams {
  double nf_db = 5.0;

  // Interference couplings. The defaults are zero; calibrate() solves them
  // against the visibility targets below before any dataset generation.
  double nli_coeff = 0.0;        // per-span, per mW^2 weighted interferer sum
  double agc_tilt_coeff = 0.0;   // dB gain error per dB total-power deviation at band edge
  double xpm_coeff = 0.0;        // per-span SNR hit per mW of co-propagating OOK carrier

  double xpm_range_ghz = 400.0;   // full-strength intensity-crosstalk reach
  double xpol_range_ghz = 1000.0; // polarization-crosstalk reach (SOP + weak XPM)
  double xpm_far_weight = 0.15;   // XPM weight between xpm_range and xpol_range

  double q_threshold_db = 0.5;    // Q drop that counts as interference
  double fec_ber = 2e-2;          // soft-decision FEC limit
  double qam_snr_gap_db = 15.5;   // effective-SNR to Q-factor offset of the 64QAM modem

  double monitor_floor_dbm = -60.0;
  double sop_base_krad_s = 0.05;
  double sop_coeff_krad_per_mw = 0.2;
  double esnr_gap_db = 2.0;

  // Label-independent per-channel constants of the four operator transceivers.
  std::array<double, 4> cfo_mhz{180.0, -140.0, 90.0, -60.0};
  std::array<double, 4> cdc_ps_per_nm{3228.0, 3233.0, 3238.0, 3243.0};
  std::array<double, 4> dgd_ps{1.31, 1.45, 1.22, 1.57};
  std::array<double, 4> pdl_db{0.6, 0.8, 0.7, 0.9};

  MeasNoise noise;
};

nlohmann::json sim_params_to_json(const SimParams& p);
SimParams sim_params_from_json(const nlohmann::json& j);

struct OokChannelConfig {
  UserId user;
  FrequencyGhz center;
  double launch_power_dbm = 0.0;
};

// Everything the line carries plus the operating point; the operator never
// observes this directly, only the telemetry propagate() derives from it.
struct NetworkState {
  std::array<std::vector<UserChannel>, 3> user_channels;
  std::array<double, 3> power_offset_db{0.0, 0.0, 0.0};
  std::optional<OokChannelConfig> ook;
  double added_ase_osnr_db = 25.0;  // broadband ASE loading at the head ROADM
  std::uint64_t noise_seed = 0;

  static NetworkState steady(const Plan& plan, double added_ase_osnr_db = 25.0,
                             std::uint64_t noise_seed = 0);

  void validate(const Plan& plan) const;
  std::vector<UserId> deviating_users(const Plan& plan) const;
};

struct ChannelTelemetry {
  // Transceiver OPMs
  double cfo_mhz = 0.0;
  double prefec_ber = 0.0;
  double cdc_ps_per_nm = 0.0;
  double dgd_ps = 0.0;
  double rx_power_dbm = 0.0;
  double osnr_db = 0.0;
  double q_factor_db = 0.0;
  double pdl_db = 0.0;
  double sop_rate_krad_s = 0.0;
  double esnr_db = 0.0;
  // Per-ROADM monitoring: this channel's OCM power and the shared port
  // aggregates [add, drop, line_in, line_out] (identical across channels).
  std::array<double, 4> ocm_power_dbm{};
  std::array<std::array<double, 4>, 4> port_powers_dbm{};
};

using Telemetry = std::array<ChannelTelemetry, 4>;

// OSNR (0.1 nm reference) contributed by one EDFA stage.
double edfa_stage_osnr_db(double input_power_dbm, double nf_db);

// Gaussian Q/BER bridge for the probe modems; clamped to [1e-8, 0.5].
double q_to_ber(double q_db);

// Q factor (dB) at which q_to_ber crosses the given BER.
double ber_to_q_db(double ber);

// Deterministic expectation of the operator telemetry (no measurement jitter).
Telemetry propagate_expected(const Plan& plan, const NetworkState& state, const SimParams& params);

// Expectation plus seeded measurement jitter; fixed (state, params) and seed
// give bit-identical telemetry.
Telemetry propagate(const Plan& plan, const NetworkState& state, const SimParams& params);

// Per-channel power bookkeeping along the line, for conservation checks.
struct LineTrace {
  struct ChannelPath {
    FrequencyGhz center;
    int add_node = 0;           // 0-based
    bool is_ook = false;
    double launch_dbm = 0.0;    // effective (offset applied)
    std::array<double, 4> p_in_dbm{};   // at each ROADM's line input; NaN where absent
    std::array<double, 4> p_out_dbm{};  // at each ROADM's line output; NaN where absent
  };
  std::vector<ChannelPath> channels;
  std::array<std::array<double, 4>, 4> port_powers_dbm{};  // [roadm][add,drop,in,out]
};

LineTrace trace_line(const Plan& plan, const NetworkState& state, const SimParams& params);

// Indices of the operator probes bordering the user's window (one per side).
std::vector<int> adjacent_operator_channels(const Plan& plan, UserId user);

// Compares expected telemetry against the matching steady baseline. Returns
// NoInterference when no probe drops by more than q_threshold_db; otherwise
// the single deviating user. Throws if the drop cannot be attributed to
// exactly one deviating user.
Label label_state(const Telemetry& observed, const Telemetry& baseline,
                  const NetworkState& state, const Plan& plan, const SimParams& params);

// Visibility targets the interference couplings are solved against.
struct CalibrationTargets {
  double type1_probe_offset_db = 5.0;   // offset that must push a neighbor past FEC
  double fec_ber_margin = 1.25;         // land this factor above the FEC limit
  double type1_quiet_offset_db = 0.5;   // offset that must stay invisible
  double agc_share_db = 0.25;           // AGC part of the Q penalty at the probe offset
  double ook_visible_above_dbm = 3.0;   // OOK launch where the probe drop reaches...
  double ook_drop_fraction = 0.98;      // ...this fraction of the labeling threshold
};

// Solves nli_coeff, agc_tilt_coeff and xpm_coeff by 1-D bisection so that the
// targets above hold on the given plan, then verifies them. Throws
// ConfigError when a target is unreachable.
SimParams calibrate(const Plan& plan, SimParams base, const CalibrationTargets& targets = {});

}  // namespace osaas
