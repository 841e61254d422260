#include "osaas/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include "osaas/rng.hpp"

namespace osaas {

FeatureMatrix build_matrix(const Telemetry& t) {
  FeatureMatrix m{};
  for (int ch = 0; ch < kFeatureRows; ++ch) {
    auto& row = m[ch];
    const auto& c = t[ch];
    for (int r = 0; r < 4; ++r) {
      for (int p = 0; p < 4; ++p) row[5 * r + p] = c.port_powers_dbm[r][p];
      row[5 * r + 4] = c.ocm_power_dbm[r];
    }
    row[20] = c.cfo_mhz;
    row[21] = std::log10(c.prefec_ber);
    row[22] = c.cdc_ps_per_nm;
    row[23] = c.dgd_ps;
    row[24] = c.rx_power_dbm;
    row[25] = c.osnr_db;
    row[26] = c.q_factor_db;
    row[27] = c.pdl_db;
    row[28] = c.sop_rate_krad_s;
    row[29] = c.esnr_db;
  }
  return m;
}

void Normalization::apply(FeatureMatrix& m) const {
  for (auto& row : m)
    for (int j = 0; j < kFeatureCols; ++j) row[j] = (row[j] - mean[j]) / stdev[j];
}

nlohmann::json Normalization::to_json() const {
  return {{"mean", mean}, {"stdev", stdev}};
}

Normalization Normalization::from_json(const nlohmann::json& j) {
  Normalization n;
  n.mean = j.at("mean").get<std::array<double, kFeatureCols>>();
  n.stdev = j.at("stdev").get<std::array<double, kFeatureCols>>();
  return n;
}

Normalization fit_normalization(const std::vector<Sample>& samples) {
  Normalization n;
  std::array<double, kFeatureCols> sum{}, sq{};
  std::size_t rows = 0;
  for (const auto& s : samples) {
    if (s.test) continue;
    for (const auto& row : s.features) {
      for (int j = 0; j < kFeatureCols; ++j) {
        sum[j] += row[j];
        sq[j] += row[j] * row[j];
      }
      ++rows;
    }
  }
  if (rows == 0) throw ValidationError("cannot fit normalization without training samples");
  for (int j = 0; j < kFeatureCols; ++j) {
    n.mean[j] = sum[j] / rows;
    const double var = std::max(0.0, sq[j] / rows - n.mean[j] * n.mean[j]);
    n.stdev[j] = std::sqrt(var);
    if (n.stdev[j] < 1e-9) n.stdev[j] = 1.0;  // constant column, pass through centered
  }
  return n;
}

nlohmann::json generation_config_to_json(const GenerationConfig& c) {
  return {{"seed", c.seed},
          {"none_count", c.none_count},
          {"power_count", c.power_count},
          {"add_drop_count", c.add_drop_count},
          {"ook_count", c.ook_count},
          {"none_margin_db", c.none_margin_db},
          {"threads", c.threads}};
}

GenerationConfig generation_config_from_json(const nlohmann::json& j) {
  GenerationConfig c;
  c.seed = j.value("seed", c.seed);
  c.none_count = j.value("none_count", c.none_count);
  c.power_count = j.value("power_count", c.power_count);
  c.add_drop_count = j.value("add_drop_count", c.add_drop_count);
  c.ook_count = j.value("ook_count", c.ook_count);
  c.none_margin_db = j.value("none_margin_db", c.none_margin_db);
  c.threads = j.value("threads", c.threads);
  return c;
}

std::vector<std::size_t> Dataset::train_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (!samples[i].test) out.push_back(i);
  return out;
}

std::vector<std::size_t> Dataset::test_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].test) out.push_back(i);
  return out;
}

std::string split_hash_hex(const std::vector<Sample>& samples) {
  std::vector<std::string> ids;
  for (const auto& s : samples)
    if (!s.test) ids.push_back(s.scenario_id);
  std::sort(ids.begin(), ids.end());
  std::string joined;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) joined.push_back('\n');
    joined += ids[i];
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(joined)));
  return buf;
}

namespace {

struct Candidate {
  std::string base_id;
  NetworkState state;
  InterferenceKind kind = InterferenceKind::None;
  Label label = Label::NoInterference;
};

std::string fmt(const char* pattern, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, pattern, static_cast<int>(std::lround(v * 100.0)));
  return buf;
}

double max_expected_drop(const Telemetry& base, const Telemetry& t) {
  double d = -1e300;
  for (std::size_t i = 0; i < t.size(); ++i)
    d = std::max(d, base[i].q_factor_db - t[i].q_factor_db);
  return d;
}

// Spread `total` across the three users, handing remainders to whoever has
// been given the fewest scenarios so far (ties to the lower user index).
std::array<int, 3> balanced_allocation(int total, std::array<int, 3>& running) {
  std::array<int, 3> alloc{total / 3, total / 3, total / 3};
  int rest = total - 3 * (total / 3);
  std::array<int, 3> provisional = running;
  while (rest-- > 0) {
    int pick = 0;
    for (int u = 1; u < 3; ++u)
      if (provisional[u] < provisional[pick]) pick = u;
    ++alloc[pick];
    ++provisional[pick];
  }
  for (int u = 0; u < 3; ++u) running[u] += alloc[u];
  return alloc;
}

}  // namespace

Dataset generate_dataset(const Plan& plan, const SimParams& params, const GenerationConfig& cfg) {
  plan.validate();
  if (cfg.none_count < 0 || cfg.power_count < 0 || cfg.add_drop_count < 0 || cfg.ook_count < 0)
    throw ConfigError("scenario counts must be non-negative");
  if (!(cfg.none_margin_db >= 0.0 && cfg.none_margin_db < params.q_threshold_db))
    throw ConfigError("none_margin_db must lie in [0, q_threshold_db)");

  const std::array<double, 3> kind_osnrs{23.0, 25.0, 27.0};
  std::map<int, Telemetry> baselines;  // keyed by round(osnr*100)
  auto baseline_for = [&](double osnr) -> const Telemetry& {
    const int key = static_cast<int>(std::lround(osnr * 100.0));
    auto it = baselines.find(key);
    if (it == baselines.end())
      it = baselines.emplace(key, propagate_expected(plan, NetworkState::steady(plan, osnr), params)).first;
    return it->second;
  };

  // --- candidate enumeration -------------------------------------------------
  std::vector<Candidate> steady_pool;       // true steady states across the OSNR sweep
  std::vector<Candidate> quiet_pool;        // interference states safely below threshold
  std::array<std::array<std::vector<Candidate>, 3>, 3> buckets;  // [kind-1][user]

  auto consider = [&](Candidate c, double osnr) {
    c.state.added_ase_osnr_db = osnr;
    const Telemetry expected = propagate_expected(plan, c.state, params);
    const Telemetry& base = baseline_for(osnr);
    const double drop = max_expected_drop(base, expected);
    if (drop > params.q_threshold_db) {
      const Label lab = label_state(expected, base, c.state, plan, params);
      c.label = lab;
      const int user = static_cast<int>(lab) - 1;
      buckets[static_cast<int>(c.kind) - 1][user].push_back(c);
    } else if (drop <= cfg.none_margin_db) {
      c.label = Label::NoInterference;
      c.kind = InterferenceKind::None;
      quiet_pool.push_back(c);
    }  // candidates inside the margin band are discarded
  };

  for (double osnr = 22.0; osnr <= 30.0 + 1e-9; osnr += 0.5) {
    Candidate c;
    c.base_id = "ni_o" + fmt("%04d", osnr);
    c.state = NetworkState::steady(plan, osnr);
    steady_pool.push_back(c);
  }

  for (int u = 0; u < 3; ++u) {
    for (double off = 0.5; off <= 12.0 + 1e-9; off += 0.5) {
      for (double osnr : kind_osnrs) {
        Candidate c;
        c.base_id = "pi_u" + std::to_string(u + 1) + "_off" + fmt("%04d", off) + "_o" + fmt("%04d", osnr);
        c.state = NetworkState::steady(plan, osnr);
        c.state.power_offset_db[u] = off;
        c.kind = InterferenceKind::PowerIncrease;
        consider(c, osnr);
      }
    }
  }

  for (int u = 0; u < 3; ++u) {
    const auto& w = plan.windows[u];
    const auto full = steady_channels(w);
    const double total_mw = [&] {
      double t = 0.0;
      for (const auto& ch : full) t += dbm_to_mw(ch.launch_power_dbm);
      return t;
    }();
    for (int mask = 1; mask < (1 << 8) - 1; ++mask) {
      const int k = __builtin_popcount(static_cast<unsigned>(mask));
      for (int mode = 0; mode < 2; ++mode) {  // 0: keep total power, 1: keep per-channel power
        std::vector<UserChannel> chans;
        for (int i = 0; i < 8; ++i) {
          if (!(mask & (1 << i))) continue;
          UserChannel ch = full[static_cast<std::size_t>(i)];
          if (mode == 0) ch.launch_power_dbm = mw_to_dbm(total_mw / k);
          chans.push_back(ch);
        }
        for (double osnr : kind_osnrs) {
          char mb[8];
          std::snprintf(mb, sizeof mb, "%03d", mask);
          Candidate c;
          c.base_id = "ad_u" + std::to_string(u + 1) + "_m" + mb + (mode == 0 ? "_t" : "_c") +
                      "_o" + fmt("%04d", osnr);
          c.state = NetworkState::steady(plan, osnr);
          c.state.user_channels[u] = chans;
          c.kind = InterferenceKind::AddDrop;
          consider(c, osnr);
        }
      }
    }
  }

  for (int u = 0; u < 3; ++u) {
    const auto& w = plan.windows[u];
    const auto full = steady_channels(w);
    for (int slot = 0; slot < 8; ++slot) {
      for (int p = 0; p <= 12; ++p) {
        const double ook_mw = dbm_to_mw(p);
        const double cap_mw = dbm_to_mw(w.max_power_dbm);
        const int n_co =
            std::clamp(static_cast<int>(std::floor(cap_mw - ook_mw + 1e-9)), 0, 7);
        std::vector<UserChannel> chans;
        for (int i = 0; i < 8 && static_cast<int>(chans.size()) < n_co; ++i)
          if (i != slot) chans.push_back(full[static_cast<std::size_t>(i)]);
        for (double osnr : kind_osnrs) {
          Candidate c;
          c.base_id = "ok_u" + std::to_string(u + 1) + "_s" + std::to_string(slot) + "_p" +
                      fmt("%04d", static_cast<double>(p)) + "_o" + fmt("%04d", osnr);
          c.state = NetworkState::steady(plan, osnr);
          c.state.user_channels[u] = chans;
          c.state.ook = OokChannelConfig{w.user, full[static_cast<std::size_t>(slot)].center,
                                         static_cast<double>(p)};
          c.kind = InterferenceKind::Ook;
          consider(c, osnr);
        }
      }
    }
  }

  // --- fill the configured histogram ----------------------------------------
  struct Selected {
    const Candidate* cand;
    int rep;
    std::string id;
  };
  std::vector<Selected> picks;

  auto cycle = [&](const std::vector<Candidate>& pool, int count, std::vector<Selected>& out) {
    for (int i = 0; i < count; ++i) {
      const Candidate& c = pool[static_cast<std::size_t>(i) % pool.size()];
      const int rep = i / static_cast<int>(pool.size());
      char rb[16];
      std::snprintf(rb, sizeof rb, "%04d", rep);
      out.push_back({&c, rep, c.base_id + "_r" + rb});
    }
  };

  if (quiet_pool.empty()) {
    cycle(steady_pool, cfg.none_count, picks);  // degenerate margin setting
  } else {
    const int none_steady = cfg.none_count / 2;
    cycle(steady_pool, none_steady, picks);
    cycle(quiet_pool, cfg.none_count - none_steady, picks);
  }

  std::array<int, 3> running{0, 0, 0};
  const std::array<int, 3> kind_counts{cfg.power_count, cfg.add_drop_count, cfg.ook_count};
  for (int k = 0; k < 3; ++k) {
    const auto alloc = balanced_allocation(kind_counts[static_cast<std::size_t>(k)], running);
    for (int u = 0; u < 3; ++u) {
      if (alloc[u] == 0) continue;
      const auto& bucket = buckets[k][u];
      if (bucket.empty())
        throw ConfigError("no eligible " + to_string(static_cast<InterferenceKind>(k + 1)) +
                          " scenarios for user" + std::to_string(u + 1) +
                          "; couplings too weak for the labeling threshold");
      cycle(bucket, alloc[u], picks);
    }
  }

  std::sort(picks.begin(), picks.end(),
            [](const Selected& a, const Selected& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < picks.size(); ++i)
    if (picks[i].id == picks[i - 1].id)
      throw SimulationError("duplicate scenario id " + picks[i].id);

  // --- measure every selected scenario (independent per-scenario seeds) -----
  Dataset ds;
  ds.plan = plan;
  ds.params = params;
  ds.generation = cfg;
  ds.samples.resize(picks.size());

  auto measure_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Selected& sel = picks[i];
      Sample s;
      s.scenario_id = sel.id;
      s.kind = sel.cand->kind;
      s.label = sel.cand->label;
      NetworkState st = sel.cand->state;
      st.noise_seed = derive_seed(cfg.seed, sel.id);
      s.features = build_matrix(propagate(plan, st, params));
      ds.samples[i] = std::move(s);
    }
  };
  const int threads = std::max(1, cfg.threads);
  if (threads == 1 || picks.size() < 64) {
    measure_range(0, picks.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (picks.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t lo = std::min(picks.size(), static_cast<std::size_t>(t) * chunk);
      const std::size_t hi = std::min(picks.size(), lo + chunk);
      if (lo < hi) pool.emplace_back(measure_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // --- stratified 3:1 split per label class ----------------------------------
  Rng split_rng(derive_seed(cfg.seed, "split"));
  std::array<std::vector<std::size_t>, 4> by_label;
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    by_label[static_cast<std::size_t>(ds.samples[i].label)].push_back(i);
  for (auto& idx : by_label) {
    if (idx.empty()) continue;
    if (idx.size() < 4)
      throw ConfigError("label class with fewer than 4 samples cannot be split 3:1");
    split_rng.shuffle(idx);
    const std::size_t n_test = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround(idx.size() / 4.0)), 1, idx.size() - 1);
    for (std::size_t i = 0; i < n_test; ++i) ds.samples[idx[i]].test = true;
  }

  ds.norm = fit_normalization(ds.samples);
  ds.split_hash = split_hash_hex(ds.samples);
  return ds;
}

namespace {

nlohmann::json sample_to_json(const Sample& s) {
  nlohmann::json feats = nlohmann::json::array();
  for (const auto& row : s.features) feats.push_back(row);
  return {{"scenario_id", s.scenario_id},
          {"kind", to_string(s.kind)},
          {"label", to_string(s.label)},
          {"split", s.test ? "test" : "train"},
          {"features", feats}};
}

Sample sample_from_json(const nlohmann::json& j) {
  Sample s;
  s.scenario_id = j.at("scenario_id").get<std::string>();
  s.kind = kind_from_string(j.at("kind").get<std::string>());
  s.label = label_from_string(j.at("label").get<std::string>());
  const std::string split = j.at("split").get<std::string>();
  if (split != "train" && split != "test") throw IoError("sample split must be train or test");
  s.test = split == "test";
  const auto& feats = j.at("features");
  if (feats.size() != kFeatureRows) throw IoError("sample feature matrix must have 4 rows");
  for (int r = 0; r < kFeatureRows; ++r)
    s.features[r] = feats.at(r).get<std::array<double, kFeatureCols>>();
  return s;
}

}  // namespace

void save_dataset(const Dataset& d, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir + "/dataset.jsonl", std::ios::binary);
    if (!out) throw IoError("cannot write " + dir + "/dataset.jsonl");
    for (const auto& s : d.samples) out << sample_to_json(s).dump() << '\n';
  }
  nlohmann::json by_kind, by_label;
  int train = 0, test = 0;
  std::map<std::string, int> kind_counts, label_counts;
  for (const auto& s : d.samples) {
    ++kind_counts[to_string(s.kind)];
    ++label_counts[to_string(s.label)];
    ++(s.test ? test : train);
  }
  for (const auto& [k, v] : kind_counts) by_kind[k] = v;
  for (const auto& [k, v] : label_counts) by_label[k] = v;
  nlohmann::json manifest{{"plan", plan_to_json(d.plan)},
                          {"sim_params", sim_params_to_json(d.params)},
                          {"generation", generation_config_to_json(d.generation)},
                          {"normalization", d.norm.to_json()},
                          {"split_hash", d.split_hash},
                          {"stats",
                           {{"total", d.samples.size()},
                            {"train", train},
                            {"test", test},
                            {"by_kind", by_kind},
                            {"by_label", by_label}}}};
  std::ofstream out(dir + "/manifest.json", std::ios::binary);
  if (!out) throw IoError("cannot write " + dir + "/manifest.json");
  out << manifest.dump(2) << '\n';
}

Dataset load_dataset(const std::string& dir) {
  std::ifstream mf(dir + "/manifest.json", std::ios::binary);
  if (!mf) throw IoError("cannot read " + dir + "/manifest.json");
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest.json: " + std::string(e.what()));
  }

  Dataset d;
  try {
    d.plan = plan_from_json(manifest.at("plan"));
    d.params = sim_params_from_json(manifest.at("sim_params"));
    d.generation = generation_config_from_json(manifest.at("generation"));
    d.norm = Normalization::from_json(manifest.at("normalization"));
    d.split_hash = manifest.at("split_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest.json missing fields: " + std::string(e.what()));
  }

  std::ifstream in(dir + "/dataset.jsonl", std::ios::binary);
  if (!in) throw IoError("cannot read " + dir + "/dataset.jsonl");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      d.samples.push_back(sample_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("dataset.jsonl line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (d.samples.empty()) throw IoError("dataset.jsonl holds no samples");
  if (!std::is_sorted(d.samples.begin(), d.samples.end(),
                      [](const Sample& a, const Sample& b) { return a.scenario_id < b.scenario_id; }))
    throw IoError("dataset.jsonl is not sorted by scenario_id");

  const std::string rehash = split_hash_hex(d.samples);
  if (rehash != d.split_hash)
    throw IoError("train split hash mismatch: manifest says " + d.split_hash + ", files give " +
                  rehash);
  return d;
}

}  // namespace osaas
