#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "osaas/dataset.hpp"
#include "osaas/tensor.hpp"

namespace osaas {

// Branch input assembly: a normalized feature matrix (rows x cols, row-major)
// becomes a two-channel block whose channels carry the value plus a sin/cos
// tag of the feature column index (radians, 0-based), so the network knows
// which telemetry quantity each lane holds.
//   spectral branch: cols sequences of length rows (convolves across probes)
//   feature branch:  rows sequences of length cols (convolves along the OPM vector)
void encode_spectral_branch(const double* x, int rows, int cols, double* out);  // (2, cols, rows)
void encode_feature_branch(const double* x, int rows, int cols, double* out);   // (2, rows, cols)

struct CnnConfig {
  int rows = 4;
  int cols = 30;
  std::array<int, 3> conv_channels{8, 16, 16};
  int kernel = 3;
  // The classifier head flattens conv_channels.back() x (base + pad)
  // positions; the two branch outputs land centered in that budget and the
  // rest stays zero, so moderate input-size changes leave the head unchanged.
  int fc_base_positions = 240;
  int fc_pad_positions = 80;
  int hidden = 100;
  int classes = 4;
};

struct MlpConfig {
  int rows = 4;
  int cols = 30;
  std::vector<int> hidden{100, 100, 100, 100};
  int classes = 4;
};

class Model {
 public:
  virtual ~Model() = default;
  virtual std::string kind() const = 0;
  virtual int input_rows() const = 0;
  virtual int input_cols() const = 0;
  virtual int classes() const = 0;
  // x: batch x (rows*cols) normalized features, row-major. Caches the
  // activations backward() consumes; one backward per forward.
  virtual void forward(const double* x, double* logits, int batch) = 0;
  virtual void backward(const double* glogits) = 0;
  virtual std::vector<std::pair<std::string, Param*>> named_params() = 0;
  virtual nlohmann::json arch_json() const = 0;
};

std::unique_ptr<Model> make_cnn(const CnnConfig& cfg, Rng& init_rng);
std::unique_ptr<Model> make_mlp(const MlpConfig& cfg, Rng& init_rng);

// Softmax argmax with an abstention rule: below 0.5 peak probability the
// sample is called clean. Ties go to the lowest class index.
Label classify(const double* probs, int classes);

struct TrainConfig {
  int epochs = 1200;
  int batch_size = 32;
  double lr0 = 1e-3;
  double lr_decay = 0.9975;  // multiplicative, per epoch
  std::uint64_t seed = 7;
  std::string curves_path;  // per-epoch loss CSV; empty = don't write
};

nlohmann::json train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct EpochPoint {
  int epoch = 0;  // 1-based
  double lr = 0.0;
  double train_ce = 0.0;  // mean of minibatch losses seen during the epoch
  double test_ce = 0.0;   // full test pass at epoch end
};

struct TrainResult {
  std::vector<EpochPoint> curves;
};

// Deterministic minibatch Adam training on the dataset's train split;
// the test split is only ever evaluated, never stepped on.
TrainResult train_model(Model& model, const Dataset& ds, const TrainConfig& cfg);

void write_curves_csv(const std::string& path, const std::vector<EpochPoint>& curves);
std::vector<EpochPoint> read_curves_csv(const std::string& path);

void save_checkpoint(Model& model, const Normalization& norm, const std::string& split_hash,
                     const TrainConfig& train, const std::string& path);

struct LoadedModel {
  std::unique_ptr<Model> model;
  Normalization norm;
  std::string split_hash;
  TrainConfig train;
};

LoadedModel load_checkpoint(const std::string& path);

}  // namespace osaas
