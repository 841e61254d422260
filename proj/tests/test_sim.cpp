#include <cmath>

#include "doctest.h"
#include "osaas/sim.hpp"

using namespace osaas;

namespace {

const SimParams& calibrated() {
  static const SimParams p = calibrate(default_plan(), SimParams{}, CalibrationTargets{});
  return p;
}

double max_drop(const Telemetry& base, const Telemetry& t) {
  double d = -1e300;
  for (std::size_t i = 0; i < t.size(); ++i)
    d = std::max(d, base[i].q_factor_db - t[i].q_factor_db);
  return d;
}

}  // namespace

TEST_CASE("single-stage amplifier osnr") {
  // 0 dBm launch into an 18 dB gain stage: input -18 dBm, NF 5 dB.
  CHECK(edfa_stage_osnr_db(-18.0, 5.0) == doctest::Approx(35.0));
  CHECK(edfa_stage_osnr_db(-10.0, 5.0) == doctest::Approx(43.0));
}

TEST_CASE("gaussian q/ber bridge") {
  // Linear Q of 3 <-> 9.5424 dB <-> BER 1.35e-3.
  const double q_db = 20.0 * std::log10(3.0);
  CHECK(q_to_ber(q_db) == doctest::Approx(1.3499e-3).epsilon(1e-3));
  CHECK(q_to_ber(40.0) == doctest::Approx(1e-8));    // floor clamp
  CHECK(q_to_ber(-300.0) == doctest::Approx(0.5));   // erfc(0+) -> 1, capped ceiling
  CHECK(q_to_ber(-30.0) == doctest::Approx(0.487386).epsilon(1e-4));
  CHECK(ber_to_q_db(2e-2) == doctest::Approx(6.2513).epsilon(1e-3));
  CHECK(q_to_ber(ber_to_q_db(1e-3)) == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK_THROWS_AS(ber_to_q_db(0.7), ValidationError);
}

TEST_CASE("steady-state telemetry with couplings off") {
  const Plan plan = default_plan();
  const SimParams params{};  // zero couplings
  const NetworkState st = NetworkState::steady(plan);
  const Telemetry t = propagate_expected(plan, st, params);

  // Four-stage ASE chain: inputs -18, -10, -9, -10 dBm give stage OSNRs
  // 35/43/44/43 dB, 33.408 dB chained; the 25 dB loading floor pulls the
  // total to 24.415 dB.
  for (const auto& ch : t) {
    CHECK(ch.osnr_db == doctest::Approx(24.4152).epsilon(1e-4));
    CHECK(ch.q_factor_db == doctest::Approx(8.9152).epsilon(1e-4));
    CHECK(ch.esnr_db == doctest::Approx(22.4152).epsilon(1e-4));
    CHECK(ch.rx_power_dbm == doctest::Approx(-9.0));
    CHECK(ch.prefec_ber == doctest::Approx(q_to_ber(ch.q_factor_db)));
    CHECK(ch.sop_rate_krad_s == doctest::Approx(0.05));
    for (int s = 0; s < 4; ++s) CHECK(ch.ocm_power_dbm[s] == doctest::Approx(0.0));
  }
  CHECK(t[0].cfo_mhz == doctest::Approx(180.0));
  CHECK(t[3].cdc_ps_per_nm == doctest::Approx(3243.0));

  // Port aggregates: users 1+2 and the probes enter at the head (20 mW),
  // user 3 adds 8 mW at the second ROADM; drops stay dark at the floor.
  const auto& ports = t[0].port_powers_dbm;
  CHECK(ports[0][0] == doctest::Approx(13.0103).epsilon(1e-4));
  CHECK(ports[0][1] == doctest::Approx(-60.0));
  CHECK(ports[0][2] == doctest::Approx(-60.0));
  CHECK(ports[0][3] == doctest::Approx(13.0103).epsilon(1e-4));
  CHECK(ports[1][0] == doctest::Approx(9.0309).epsilon(1e-4));
  CHECK(ports[1][2] == doctest::Approx(3.0103).epsilon(1e-4));
  CHECK(ports[1][3] == doctest::Approx(14.4716).epsilon(1e-4));
  CHECK(ports[2][0] == doctest::Approx(-60.0));
  CHECK(ports[2][2] == doctest::Approx(5.4716).epsilon(1e-4));
  CHECK(ports[2][3] == doctest::Approx(14.4716).epsilon(1e-4));
  CHECK(ports[3][2] == doctest::Approx(4.4716).epsilon(1e-4));
  CHECK(ports[3][3] == doctest::Approx(14.4716).epsilon(1e-4));

  // Every probe row reports the same shared port block.
  for (int ch = 1; ch < 4; ++ch)
    for (int r = 0; r < 4; ++r)
      for (int p = 0; p < 4; ++p)
        CHECK(t[ch].port_powers_dbm[r][p] == doctest::Approx(t[0].port_powers_dbm[r][p]));
}

TEST_CASE("added ase loading moves reported osnr") {
  const Plan plan = default_plan();
  const SimParams params{};
  const double o22 = propagate_expected(plan, NetworkState::steady(plan, 22.0), params)[0].osnr_db;
  const double o25 = propagate_expected(plan, NetworkState::steady(plan, 25.0), params)[0].osnr_db;
  const double o30 = propagate_expected(plan, NetworkState::steady(plan, 30.0), params)[0].osnr_db;
  CHECK(o22 < o25);
  CHECK(o25 < o30);
  CHECK(o22 == doctest::Approx(21.697).epsilon(1e-3));
}

TEST_CASE("measurement jitter is seeded and reproducible") {
  const Plan plan = default_plan();
  const SimParams& params = calibrated();
  NetworkState st = NetworkState::steady(plan);
  st.noise_seed = 1234;
  const Telemetry a = propagate(plan, st, params);
  const Telemetry b = propagate(plan, st, params);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].q_factor_db == b[i].q_factor_db);
    CHECK(a[i].prefec_ber == b[i].prefec_ber);
    CHECK(a[i].ocm_power_dbm == b[i].ocm_power_dbm);
    CHECK(a[i].port_powers_dbm == b[i].port_powers_dbm);
  }
  st.noise_seed = 1235;
  const Telemetry c = propagate(plan, st, params);
  CHECK(a[0].q_factor_db != c[0].q_factor_db);

  // Jitter stays small around the expectation.
  const Telemetry e = propagate_expected(plan, st, params);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i].q_factor_db - e[i].q_factor_db) < 1.0);
    CHECK(std::abs(a[i].rx_power_dbm - e[i].rx_power_dbm) < 1.0);
  }
}

TEST_CASE("calibration hits its visibility targets") {
  const Plan plan = default_plan();
  const SimParams& p = calibrated();
  CHECK(p.nli_coeff > 0.0);
  CHECK(p.agc_tilt_coeff > 0.0);
  CHECK(p.xpm_coeff > 0.0);

  const Telemetry base = propagate_expected(plan, NetworkState::steady(plan), p);
  for (int u = 0; u < 3; ++u) {
    NetworkState st = NetworkState::steady(plan);
    st.power_offset_db[u] = 5.0;
    const Telemetry t = propagate_expected(plan, st, p);
    double worst_ber = 0.0;
    for (int idx : adjacent_operator_channels(plan, static_cast<UserId>(u)))
      worst_ber = std::max(worst_ber, t[idx].prefec_ber);
    CHECK(worst_ber >= p.fec_ber);  // +5 dB pushes a neighbor past the FEC limit

    st.power_offset_db[u] = 0.5;
    CHECK(max_drop(base, propagate_expected(plan, st, p)) < p.q_threshold_db);
  }

  // Rogue carrier in user-1 slot 0: invisible at 3 dBm, visible at 4 dBm.
  NetworkState ook = NetworkState::steady(plan);
  auto& chans = ook.user_channels[0];
  const FrequencyGhz slot0 = chans.front().center;
  chans.erase(chans.begin());
  ook.ook = OokChannelConfig{UserId::User1, slot0, 3.0};
  CHECK(max_drop(base, propagate_expected(plan, ook, p)) < p.q_threshold_db);
  ook.ook->launch_power_dbm = 4.0;
  CHECK(max_drop(base, propagate_expected(plan, ook, p)) > p.q_threshold_db);
}

TEST_CASE("probe penalty grows monotonically with the power offset") {
  const Plan plan = default_plan();
  const SimParams& p = calibrated();
  const Telemetry base = propagate_expected(plan, NetworkState::steady(plan), p);
  for (int u = 0; u < 3; ++u) {
    double prev = 0.0;
    for (double off = 1.0; off <= 5.0; off += 1.0) {
      NetworkState st = NetworkState::steady(plan);
      st.power_offset_db[u] = off;
      const double d = max_drop(base, propagate_expected(plan, st, p));
      CHECK(d > prev);
      prev = d;
    }
  }
}

TEST_CASE("agc gain error tilts the band edges in opposite directions") {
  const Plan plan = default_plan();
  const SimParams& p = calibrated();
  NetworkState st = NetworkState::steady(plan);
  st.power_offset_db[2] = 5.0;
  const Telemetry t = propagate_expected(plan, st, p);
  // Excess load drives the gain error; the lowest probe sits at tilt -1/2,
  // the highest at +1/2, and user 3 is present from the second ROADM on.
  CHECK(t[0].ocm_power_dbm[3] < -1e-4);
  CHECK(t[3].ocm_power_dbm[3] > 1e-4);
  CHECK(t[0].ocm_power_dbm[3] == doctest::Approx(-t[3].ocm_power_dbm[3]).epsilon(1e-9));
  CHECK(t[0].ocm_power_dbm[0] == doctest::Approx(0.0));  // head stage load unchanged
}

TEST_CASE("ook crosstalk is local to 1000 GHz") {
  const Plan plan = default_plan();
  const SimParams& p = calibrated();

  // User-1 slot 0 sits 850 GHz below the third probe and 1300 GHz below the
  // fourth: adding the carrier must leave the fourth probe bit-identical.
  // An 8 mW carrier leaves room for only 2 mW of coherent load under the cap.
  NetworkState without = NetworkState::steady(plan);
  auto& chans = without.user_channels[0];
  const FrequencyGhz slot0 = chans.front().center;
  chans.erase(chans.begin());
  chans.erase(chans.begin() + 2, chans.end());
  NetworkState with = without;
  with.ook = OokChannelConfig{UserId::User1, slot0, 9.0};

  const Telemetry a = propagate_expected(plan, without, p);
  const Telemetry b = propagate_expected(plan, with, p);
  CHECK(b[3].q_factor_db == a[3].q_factor_db);
  CHECK(b[3].sop_rate_krad_s == a[3].sop_rate_krad_s);
  CHECK(b[3].sop_rate_krad_s == doctest::Approx(p.sop_base_krad_s));
  // Probes within reach do feel it.
  CHECK(b[0].q_factor_db < a[0].q_factor_db);
  CHECK(b[2].q_factor_db < a[2].q_factor_db);
  CHECK(b[2].sop_rate_krad_s > a[2].sop_rate_krad_s);
  // Polarization stirring scales with the carrier's linear power.
  CHECK(b[0].sop_rate_krad_s ==
        doctest::Approx(p.sop_base_krad_s + p.sop_coeff_krad_per_mw * dbm_to_mw(9.0)));
}

TEST_CASE("probe drop grows with ook launch power") {
  const Plan plan = default_plan();
  const SimParams& p = calibrated();
  const Telemetry base = propagate_expected(plan, NetworkState::steady(plan), p);
  double prev = -1e300;
  for (int power = 6; power <= 12; ++power) {
    NetworkState st = NetworkState::steady(plan);
    st.user_channels[1].clear();  // carrier rides alone, clear of the power cap
    st.ook = OokChannelConfig{UserId::User2, FrequencyGhz{192875}, static_cast<double>(power)};
    const double d = max_drop(base, propagate_expected(plan, st, p));
    CHECK(d > prev);
    prev = d;
  }
}

TEST_CASE("network state validation") {
  const Plan plan = default_plan();
  NetworkState st = NetworkState::steady(plan);

  SUBCASE("steady state is valid") { CHECK_NOTHROW(st.validate(plan)); }
  SUBCASE("channel outside its window") {
    st.user_channels[1][0].center.ghz = 192825;
    CHECK_THROWS_AS(st.validate(plan), ValidationError);
  }
  SUBCASE("offset outside range") {
    st.power_offset_db[0] = 12.5;
    CHECK_THROWS_AS(st.validate(plan), ValidationError);
  }
  SUBCASE("rogue carrier must displace co-channels above the cap") {
    st.ook = OokChannelConfig{UserId::User1, FrequencyGhz{192425}, 10.0};
    CHECK_THROWS_AS(st.validate(plan), ValidationError);  // 8 mW coherent + 10 mW carrier
    st.user_channels[0].clear();
    CHECK_NOTHROW(st.validate(plan));  // alone it may exceed the cap
    st.ook->launch_power_dbm = 12.0;
    CHECK_NOTHROW(st.validate(plan));
  }
  SUBCASE("rogue carrier slot must sit inside the window") {
    st.user_channels[0].clear();
    st.ook = OokChannelConfig{UserId::User1, FrequencyGhz{192825}, 3.0};
    CHECK_THROWS_AS(st.validate(plan), ValidationError);
  }
}

TEST_CASE("deviating users") {
  const Plan plan = default_plan();
  NetworkState st = NetworkState::steady(plan);
  CHECK(st.deviating_users(plan).empty());

  st.power_offset_db[2] = 3.0;
  REQUIRE(st.deviating_users(plan).size() == 1);
  CHECK(st.deviating_users(plan)[0] == UserId::User3);

  st = NetworkState::steady(plan);
  st.user_channels[1].erase(st.user_channels[1].begin());
  REQUIRE(st.deviating_users(plan).size() == 1);
  CHECK(st.deviating_users(plan)[0] == UserId::User2);

  st = NetworkState::steady(plan);
  st.user_channels[0].pop_back();
  st.ook = OokChannelConfig{UserId::User1, FrequencyGhz{192425}, 2.0};
  st.power_offset_db[2] = 1.0;
  CHECK(st.deviating_users(plan).size() == 2);
}

TEST_CASE("labeling against the matching baseline") {
  const Plan plan = default_plan();
  const SimParams& p = calibrated();
  const Telemetry base = propagate_expected(plan, NetworkState::steady(plan), p);

  NetworkState st = NetworkState::steady(plan);
  CHECK(label_state(propagate_expected(plan, st, p), base, st, plan, p) == Label::NoInterference);

  st.power_offset_db[1] = 5.0;
  CHECK(label_state(propagate_expected(plan, st, p), base, st, plan, p) == Label::User2);

  st.power_offset_db[1] = 0.1;  // far below visibility
  CHECK(label_state(propagate_expected(plan, st, p), base, st, plan, p) == Label::NoInterference);

  // A supra-threshold drop with two deviating users cannot be attributed.
  st.power_offset_db[1] = 5.0;
  st.power_offset_db[0] = 5.0;
  CHECK_THROWS_AS(label_state(propagate_expected(plan, st, p), base, st, plan, p), ValidationError);
}

TEST_CASE("line trace keeps per-channel power books consistent") {
  const Plan plan = default_plan();
  const SimParams& p = calibrated();
  NetworkState st = NetworkState::steady(plan);
  st.power_offset_db[2] = 5.0;
  const LineTrace tr = trace_line(plan, st, p);
  REQUIRE(tr.channels.size() == 4 + 24);

  for (const auto& c : tr.channels) {
    for (int s = 0; s < 4; ++s) {
      if (s < c.add_node) {
        CHECK(std::isnan(c.p_out_dbm[s]));
        continue;
      }
      if (s > c.add_node) {
        // Line input power is the previous output through the span loss.
        CHECK(c.p_in_dbm[s] ==
              doctest::Approx(c.p_out_dbm[s - 1] - plan.topology.span_loss_db(s - 1)));
      }
      CHECK(std::isfinite(c.p_out_dbm[s]));
    }
  }

  // Port totals equal the channel sums.
  for (int s = 0; s < 4; ++s) {
    double out_mw = 0.0, add_mw = 0.0;
    for (const auto& c : tr.channels) {
      if (c.add_node <= s) out_mw += dbm_to_mw(c.p_out_dbm[s]);
      if (c.add_node == s) add_mw += dbm_to_mw(c.launch_dbm);
    }
    CHECK(tr.port_powers_dbm[s][3] == doctest::Approx(mw_to_dbm(out_mw)));
    CHECK(tr.port_powers_dbm[s][0] == doctest::Approx(add_mw > 0 ? mw_to_dbm(add_mw) : -60.0));
    CHECK(tr.port_powers_dbm[s][1] == doctest::Approx(-60.0));
  }
}

TEST_CASE("extreme offsets stay finite") {
  const Plan plan = default_plan();
  const SimParams& p = calibrated();
  NetworkState st = NetworkState::steady(plan);
  st.power_offset_db[0] = 12.0;
  st.power_offset_db[1] = 12.0;
  st.power_offset_db[2] = 12.0;
  const Telemetry t = propagate_expected(plan, st, p);
  for (const auto& ch : t) {
    CHECK(std::isfinite(ch.q_factor_db));
    CHECK(ch.prefec_ber <= 0.5);
    CHECK(ch.prefec_ber >= 1e-8);
    CHECK(ch.osnr_db >= 5.0);
    CHECK(ch.osnr_db <= 40.0);
  }
}
