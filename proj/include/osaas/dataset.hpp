#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "osaas/sim.hpp"

namespace osaas {

constexpr int kFeatureRows = 4;   // operator probes, ascending frequency
constexpr int kFeatureCols = 30;  // 5 monitoring values x 4 ROADMs + 10 transceiver OPMs

// Row layout: for ROADM r, columns 5r..5r+4 hold [add, drop, line-in,
// line-out, this channel's OCM]; columns 20..29 hold [CFO, log10(preFEC BER),
// CDC, DGD, rx power, OSNR, Q, PDL, SOP rate, eSNR].
using FeatureMatrix = std::array<std::array<double, kFeatureCols>, kFeatureRows>;

FeatureMatrix build_matrix(const Telemetry& t);

struct Sample {
  std::string scenario_id;
  InterferenceKind kind = InterferenceKind::None;
  Label label = Label::NoInterference;
  bool test = false;
  FeatureMatrix features{};
};

// Per-column affine normalization fitted on the training rows.
struct Normalization {
  std::array<double, kFeatureCols> mean{};
  std::array<double, kFeatureCols> stdev{};

  void apply(FeatureMatrix& m) const;
  nlohmann::json to_json() const;
  static Normalization from_json(const nlohmann::json& j);
};

Normalization fit_normalization(const std::vector<Sample>& samples);  // train rows only

struct GenerationConfig {
  std::uint64_t seed = 42;
  int none_count = 6200;
  int power_count = 168;
  int add_drop_count = 556;
  int ook_count = 356;
  // Sub-threshold states this close to the labeling threshold are kept out of
  // the NoInterference class so label noise cannot leak across it.
  double none_margin_db = 0.35;
  int threads = 1;
};

nlohmann::json generation_config_to_json(const GenerationConfig& c);
GenerationConfig generation_config_from_json(const nlohmann::json& j);

struct Dataset {
  Plan plan;
  SimParams params;
  GenerationConfig generation;
  std::vector<Sample> samples;  // sorted by scenario_id
  Normalization norm;
  std::string split_hash;  // FNV-1a64 (hex) over newline-joined sorted train ids

  std::vector<std::size_t> train_indices() const;
  std::vector<std::size_t> test_indices() const;
};

// Deterministic scenario synthesis: enumerate candidate network states, label
// them against matching jitter-free baselines, fill the configured per-kind
// counts cycling through the eligible states (balanced across users), then
// measure each selected scenario once with its own jitter seed.
Dataset generate_dataset(const Plan& plan, const SimParams& params, const GenerationConfig& cfg);

std::string split_hash_hex(const std::vector<Sample>& samples);

// dir/dataset.jsonl (one sample per line) + dir/manifest.json.
void save_dataset(const Dataset& d, const std::string& dir);
Dataset load_dataset(const std::string& dir);

}  // namespace osaas
