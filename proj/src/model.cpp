#include "osaas/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace osaas {

void encode_spectral_branch(const double* x, int rows, int cols, double* out) {
  for (int ch = 0; ch < 2; ++ch)
    for (int j = 0; j < cols; ++j) {
      const double tag = ch == 0 ? std::sin(static_cast<double>(j)) : std::cos(static_cast<double>(j));
      for (int k = 0; k < rows; ++k)
        out[(static_cast<std::size_t>(ch) * cols + j) * rows + k] = x[k * cols + j] + tag;
    }
}

void encode_feature_branch(const double* x, int rows, int cols, double* out) {
  for (int ch = 0; ch < 2; ++ch)
    for (int k = 0; k < rows; ++k)
      for (int j = 0; j < cols; ++j) {
        const double tag = ch == 0 ? std::sin(static_cast<double>(j)) : std::cos(static_cast<double>(j));
        out[(static_cast<std::size_t>(ch) * rows + k) * cols + j] = x[k * cols + j] + tag;
      }
}

Label classify(const double* probs, int classes) {
  int arg = 0;
  for (int i = 1; i < classes; ++i)
    if (probs[i] > probs[arg]) arg = i;
  if (probs[arg] >= 0.5) return static_cast<Label>(arg);
  return Label::NoInterference;
}

namespace {

struct ConvStack {
  Conv1d c1, c2, c3;
  int seqs = 0, len = 0;

  ConvStack() = default;
  ConvStack(const CnnConfig& cfg, int seqs_, int len_, Rng& rng)
      : c1(2, cfg.conv_channels[0], cfg.kernel, rng),
        c2(cfg.conv_channels[0], cfg.conv_channels[1], cfg.kernel, rng),
        c3(cfg.conv_channels[1], cfg.conv_channels[2], cfg.kernel, rng),
        seqs(seqs_),
        len(len_) {}
};

// Activation + gradient workspaces for one conv stack, batch-major.
struct StackBuffers {
  std::vector<double> in, z1, a1, z2, a2, z3, a3;
  std::vector<double> g_z1, g_a1, g_z2, g_a2, g_z3, g_a3;

  void ensure(const ConvStack& s, const CnnConfig& cfg, int batch) {
    const std::size_t pos = static_cast<std::size_t>(s.seqs) * s.len;
    in.resize(static_cast<std::size_t>(batch) * 2 * pos);
    const std::size_t n1 = static_cast<std::size_t>(batch) * cfg.conv_channels[0] * pos;
    const std::size_t n2 = static_cast<std::size_t>(batch) * cfg.conv_channels[1] * pos;
    const std::size_t n3 = static_cast<std::size_t>(batch) * cfg.conv_channels[2] * pos;
    z1.resize(n1); a1.resize(n1); g_z1.resize(n1); g_a1.resize(n1);
    z2.resize(n2); a2.resize(n2); g_z2.resize(n2); g_a2.resize(n2);
    z3.resize(n3); a3.resize(n3); g_z3.resize(n3); g_a3.resize(n3);
  }
};

class CnnModel final : public Model {
 public:
  CnnModel(const CnnConfig& cfg, Rng& rng)
      : cfg_(cfg),
        spectral_(cfg, cfg.cols, cfg.rows, rng),
        feature_(cfg, cfg.rows, cfg.cols, rng),
        fc1_(cfg.conv_channels[2] * (cfg.fc_base_positions + cfg.fc_pad_positions), cfg.hidden, rng),
        fc2_(cfg.hidden, cfg.classes, rng) {
    if (cfg.rows <= 0 || cfg.cols <= 0) throw ConfigError("cnn input must be non-empty");
    if (cfg.kernel % 2 == 0 || cfg.kernel <= 0) throw ConfigError("cnn kernel must be odd");
    for (int c : cfg.conv_channels)
      if (c <= 0) throw ConfigError("cnn conv channels must be positive");
    if (cfg.hidden <= 0 || cfg.classes <= 0) throw ConfigError("cnn head sizes must be positive");
    const int need = 2 * cfg.rows * cfg.cols;
    if (need > cfg.fc_base_positions + cfg.fc_pad_positions)
      throw ConfigError("cnn input occupies " + std::to_string(need) +
                        " positions but the classifier head reserves only " +
                        std::to_string(cfg.fc_base_positions + cfg.fc_pad_positions));
  }

  std::string kind() const override { return "cnn"; }
  int input_rows() const override { return cfg_.rows; }
  int input_cols() const override { return cfg_.cols; }
  int classes() const override { return cfg_.classes; }

  void forward(const double* x, double* logits, int batch) override {
    ensure(batch);
    last_batch_ = batch;
    const int in_dim = cfg_.rows * cfg_.cols;
    const std::size_t sp_block = 2 * static_cast<std::size_t>(cfg_.cols) * cfg_.rows;
    const std::size_t fe_block = 2 * static_cast<std::size_t>(cfg_.rows) * cfg_.cols;
    for (int b = 0; b < batch; ++b) {
      encode_spectral_branch(x + static_cast<std::size_t>(b) * in_dim, cfg_.rows, cfg_.cols,
                             sb_.in.data() + b * sp_block);
      encode_feature_branch(x + static_cast<std::size_t>(b) * in_dim, cfg_.rows, cfg_.cols,
                            fb_.in.data() + b * fe_block);
    }
    run_stack(spectral_, sb_, batch);
    run_stack(feature_, fb_, batch);

    const int c_last = cfg_.conv_channels[2];
    const std::size_t width = static_cast<std::size_t>(c_last) * fc_positions();
    std::fill(fc_in_.begin(), fc_in_.begin() + static_cast<std::size_t>(batch) * width, 0.0);
    const std::size_t mn = static_cast<std::size_t>(cfg_.rows) * cfg_.cols;
    for (int b = 0; b < batch; ++b)
      for (int c = 0; c < c_last; ++c) {
        double* dst = fc_in_.data() + b * width + static_cast<std::size_t>(c) * fc_positions() + pad_left();
        const double* s_src = sb_.a3.data() + (static_cast<std::size_t>(b) * c_last + c) * mn;
        const double* f_src = fb_.a3.data() + (static_cast<std::size_t>(b) * c_last + c) * mn;
        std::copy(s_src, s_src + mn, dst);
        std::copy(f_src, f_src + mn, dst + mn);
      }

    fc1_.forward(fc_in_.data(), fc_z1_.data(), batch);
    selu_forward(fc_z1_.data(), fc_a1_.data(), static_cast<std::size_t>(batch) * cfg_.hidden);
    fc2_.forward(fc_a1_.data(), logits, batch);
  }

  void backward(const double* glogits) override {
    const int batch = last_batch_;
    const int c_last = cfg_.conv_channels[2];
    const std::size_t width = static_cast<std::size_t>(c_last) * fc_positions();
    fc2_.backward(fc_a1_.data(), glogits, g_fc_a1_.data(), batch);
    selu_backward(fc_z1_.data(), g_fc_a1_.data(), g_fc_z1_.data(),
                  static_cast<std::size_t>(batch) * cfg_.hidden);
    fc1_.backward(fc_in_.data(), g_fc_z1_.data(), g_fc_in_.data(), batch);

    const std::size_t mn = static_cast<std::size_t>(cfg_.rows) * cfg_.cols;
    for (int b = 0; b < batch; ++b)
      for (int c = 0; c < c_last; ++c) {
        const double* src = g_fc_in_.data() + b * width + static_cast<std::size_t>(c) * fc_positions() + pad_left();
        double* s_dst = sb_.g_a3.data() + (static_cast<std::size_t>(b) * c_last + c) * mn;
        double* f_dst = fb_.g_a3.data() + (static_cast<std::size_t>(b) * c_last + c) * mn;
        std::copy(src, src + mn, s_dst);
        std::copy(src + mn, src + 2 * mn, f_dst);
      }
    back_stack(spectral_, sb_, batch);
    back_stack(feature_, fb_, batch);
  }

  std::vector<std::pair<std::string, Param*>> named_params() override {
    return {{"spectral.conv1.w", &spectral_.c1.w}, {"spectral.conv1.b", &spectral_.c1.b},
            {"spectral.conv2.w", &spectral_.c2.w}, {"spectral.conv2.b", &spectral_.c2.b},
            {"spectral.conv3.w", &spectral_.c3.w}, {"spectral.conv3.b", &spectral_.c3.b},
            {"feature.conv1.w", &feature_.c1.w},   {"feature.conv1.b", &feature_.c1.b},
            {"feature.conv2.w", &feature_.c2.w},   {"feature.conv2.b", &feature_.c2.b},
            {"feature.conv3.w", &feature_.c3.w},   {"feature.conv3.b", &feature_.c3.b},
            {"fc1.w", &fc1_.w},                    {"fc1.b", &fc1_.b},
            {"fc2.w", &fc2_.w},                    {"fc2.b", &fc2_.b}};
  }

  nlohmann::json arch_json() const override {
    return {{"type", "cnn"},
            {"rows", cfg_.rows},
            {"cols", cfg_.cols},
            {"conv_channels", cfg_.conv_channels},
            {"kernel", cfg_.kernel},
            {"fc_base_positions", cfg_.fc_base_positions},
            {"fc_pad_positions", cfg_.fc_pad_positions},
            {"hidden", cfg_.hidden},
            {"classes", cfg_.classes}};
  }

 private:
  int fc_positions() const { return cfg_.fc_base_positions + cfg_.fc_pad_positions; }
  int pad_left() const { return (fc_positions() - 2 * cfg_.rows * cfg_.cols) / 2; }

  void ensure(int batch) {
    if (batch <= batch_cap_) return;
    batch_cap_ = batch;
    sb_.ensure(spectral_, cfg_, batch);
    fb_.ensure(feature_, cfg_, batch);
    const std::size_t width = static_cast<std::size_t>(cfg_.conv_channels[2]) * fc_positions();
    fc_in_.resize(static_cast<std::size_t>(batch) * width);
    g_fc_in_.resize(fc_in_.size());
    fc_z1_.resize(static_cast<std::size_t>(batch) * cfg_.hidden);
    fc_a1_.resize(fc_z1_.size());
    g_fc_z1_.resize(fc_z1_.size());
    g_fc_a1_.resize(fc_z1_.size());
  }

  void run_stack(const ConvStack& s, StackBuffers& b, int batch) {
    const std::size_t pos = static_cast<std::size_t>(s.seqs) * s.len;
    s.c1.forward(b.in.data(), b.z1.data(), batch, s.seqs, s.len);
    selu_forward(b.z1.data(), b.a1.data(), static_cast<std::size_t>(batch) * cfg_.conv_channels[0] * pos);
    s.c2.forward(b.a1.data(), b.z2.data(), batch, s.seqs, s.len);
    selu_forward(b.z2.data(), b.a2.data(), static_cast<std::size_t>(batch) * cfg_.conv_channels[1] * pos);
    s.c3.forward(b.a2.data(), b.z3.data(), batch, s.seqs, s.len);
    selu_forward(b.z3.data(), b.a3.data(), static_cast<std::size_t>(batch) * cfg_.conv_channels[2] * pos);
  }

  void back_stack(ConvStack& s, StackBuffers& b, int batch) {
    const std::size_t pos = static_cast<std::size_t>(s.seqs) * s.len;
    selu_backward(b.z3.data(), b.g_a3.data(), b.g_z3.data(),
                  static_cast<std::size_t>(batch) * cfg_.conv_channels[2] * pos);
    s.c3.backward(b.a2.data(), b.g_z3.data(), b.g_a2.data(), batch, s.seqs, s.len);
    selu_backward(b.z2.data(), b.g_a2.data(), b.g_z2.data(),
                  static_cast<std::size_t>(batch) * cfg_.conv_channels[1] * pos);
    s.c2.backward(b.a1.data(), b.g_z2.data(), b.g_a1.data(), batch, s.seqs, s.len);
    selu_backward(b.z1.data(), b.g_a1.data(), b.g_z1.data(),
                  static_cast<std::size_t>(batch) * cfg_.conv_channels[0] * pos);
    s.c1.backward(b.in.data(), b.g_z1.data(), nullptr, batch, s.seqs, s.len);
  }

  CnnConfig cfg_;
  ConvStack spectral_, feature_;
  Dense fc1_, fc2_;
  StackBuffers sb_, fb_;
  std::vector<double> fc_in_, fc_z1_, fc_a1_;
  std::vector<double> g_fc_in_, g_fc_z1_, g_fc_a1_;
  int batch_cap_ = 0;
  int last_batch_ = 0;
};

class MlpModel final : public Model {
 public:
  MlpModel(const MlpConfig& cfg, Rng& rng) : cfg_(cfg) {
    if (cfg.rows <= 0 || cfg.cols <= 0) throw ConfigError("mlp input must be non-empty");
    if (cfg.hidden.empty()) throw ConfigError("mlp needs at least one hidden layer");
    int in = cfg.rows * cfg.cols;
    for (int h : cfg.hidden) {
      if (h <= 0) throw ConfigError("mlp hidden sizes must be positive");
      layers_.emplace_back(in, h, rng);
      in = h;
    }
    layers_.emplace_back(in, cfg.classes, rng);
  }

  std::string kind() const override { return "mlp"; }
  int input_rows() const override { return cfg_.rows; }
  int input_cols() const override { return cfg_.cols; }
  int classes() const override { return cfg_.classes; }

  void forward(const double* x, double* logits, int batch) override {
    ensure(batch);
    last_batch_ = batch;
    const std::size_t in_dim = static_cast<std::size_t>(cfg_.rows) * cfg_.cols;
    std::copy(x, x + batch * in_dim, a_[0].begin());
    const std::size_t n_hidden = layers_.size() - 1;
    for (std::size_t l = 0; l < n_hidden; ++l) {
      layers_[l].forward(a_[l].data(), z_[l].data(), batch);
      relu_forward(z_[l].data(), a_[l + 1].data(),
                   static_cast<std::size_t>(batch) * layers_[l].out_features);
    }
    layers_.back().forward(a_[n_hidden].data(), logits, batch);
  }

  void backward(const double* glogits) override {
    const int batch = last_batch_;
    const std::size_t n_hidden = layers_.size() - 1;
    layers_.back().backward(a_[n_hidden].data(), glogits, g_a_[n_hidden].data(), batch);
    for (std::size_t l = n_hidden; l-- > 0;) {
      relu_backward(z_[l].data(), g_a_[l + 1].data(), g_z_[l].data(),
                    static_cast<std::size_t>(batch) * layers_[l].out_features);
      layers_[l].backward(a_[l].data(), g_z_[l].data(), l > 0 ? g_a_[l].data() : nullptr, batch);
    }
  }

  std::vector<std::pair<std::string, Param*>> named_params() override {
    std::vector<std::pair<std::string, Param*>> out;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      out.emplace_back("fc" + std::to_string(l + 1) + ".w", &layers_[l].w);
      out.emplace_back("fc" + std::to_string(l + 1) + ".b", &layers_[l].b);
    }
    return out;
  }

  nlohmann::json arch_json() const override {
    return {{"type", "mlp"},
            {"rows", cfg_.rows},
            {"cols", cfg_.cols},
            {"hidden", cfg_.hidden},
            {"classes", cfg_.classes}};
  }

 private:
  void ensure(int batch) {
    if (batch <= batch_cap_) return;
    batch_cap_ = batch;
    const std::size_t n_hidden = layers_.size() - 1;
    a_.resize(n_hidden + 1);
    g_a_.resize(n_hidden + 1);
    z_.resize(n_hidden);
    g_z_.resize(n_hidden);
    a_[0].resize(static_cast<std::size_t>(batch) * cfg_.rows * cfg_.cols);
    g_a_[0].resize(a_[0].size());
    for (std::size_t l = 0; l < n_hidden; ++l) {
      z_[l].resize(static_cast<std::size_t>(batch) * layers_[l].out_features);
      g_z_[l].resize(z_[l].size());
      a_[l + 1].resize(z_[l].size());
      g_a_[l + 1].resize(z_[l].size());
    }
  }

  MlpConfig cfg_;
  std::vector<Dense> layers_;
  std::vector<std::vector<double>> a_, z_, g_a_, g_z_;
  int batch_cap_ = 0;
  int last_batch_ = 0;
};

}  // namespace

std::unique_ptr<Model> make_cnn(const CnnConfig& cfg, Rng& init_rng) {
  return std::make_unique<CnnModel>(cfg, init_rng);
}

std::unique_ptr<Model> make_mlp(const MlpConfig& cfg, Rng& init_rng) {
  return std::make_unique<MlpModel>(cfg, init_rng);
}

nlohmann::json train_config_to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"lr0", c.lr0},
          {"lr_decay", c.lr_decay},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr0 = j.value("lr0", c.lr0);
  c.lr_decay = j.value("lr_decay", c.lr_decay);
  c.seed = j.value("seed", c.seed);
  return c;
}

namespace {

void gather(const Dataset& ds, const std::vector<std::size_t>& idx, std::vector<double>& x,
            std::vector<int>& y) {
  const std::size_t dim = static_cast<std::size_t>(kFeatureRows) * kFeatureCols;
  x.resize(idx.size() * dim);
  y.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    FeatureMatrix m = ds.samples[idx[i]].features;
    ds.norm.apply(m);
    for (int r = 0; r < kFeatureRows; ++r)
      std::copy(m[r].begin(), m[r].end(), x.begin() + i * dim + static_cast<std::size_t>(r) * kFeatureCols);
    y[i] = static_cast<int>(ds.samples[idx[i]].label);
  }
}

double mean_ce(Model& model, const std::vector<double>& x, const std::vector<int>& y,
               int batch_size, std::vector<double>& logits_buf) {
  const std::size_t dim = static_cast<std::size_t>(model.input_rows()) * model.input_cols();
  const int classes = model.classes();
  double loss_sum = 0.0;
  std::size_t done = 0;
  while (done < y.size()) {
    const int bs = static_cast<int>(std::min<std::size_t>(batch_size, y.size() - done));
    logits_buf.resize(static_cast<std::size_t>(bs) * classes);
    model.forward(x.data() + done * dim, logits_buf.data(), bs);
    loss_sum += cross_entropy_loss(logits_buf.data(), y.data() + done, bs, classes) * bs;
    done += static_cast<std::size_t>(bs);
  }
  return loss_sum / static_cast<double>(y.size());
}

}  // namespace

TrainResult train_model(Model& model, const Dataset& ds, const TrainConfig& cfg) {
  if (model.input_rows() != kFeatureRows || model.input_cols() != kFeatureCols)
    throw ConfigError("model input shape does not match the telemetry feature matrix");
  if (cfg.epochs <= 0 || cfg.batch_size <= 0) throw ConfigError("epochs and batch size must be positive");
  if (!(cfg.lr0 > 0.0) || !(cfg.lr_decay > 0.0 && cfg.lr_decay <= 1.0))
    throw ConfigError("learning-rate schedule out of range");

  const auto train_idx = ds.train_indices();
  const auto test_idx = ds.test_indices();
  if (train_idx.empty() || test_idx.empty())
    throw ValidationError("training needs non-empty train and test splits");

  std::vector<double> x_train, x_test;
  std::vector<int> y_train, y_test;
  gather(ds, train_idx, x_train, y_train);
  gather(ds, test_idx, x_test, y_test);
  // ReLU-style activations silently flush NaN to zero, so poisoned inputs
  // must be rejected here rather than left to the loss guard.
  check_finite(x_train.data(), x_train.size(), "normalized training features");
  check_finite(x_test.data(), x_test.size(), "normalized test features");

  const std::size_t dim = static_cast<std::size_t>(kFeatureRows) * kFeatureCols;
  const int classes = model.classes();
  const std::size_t n = y_train.size();

  Rng order_rng(derive_seed(cfg.seed, "order"));
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;

  std::vector<double> xb(static_cast<std::size_t>(cfg.batch_size) * dim);
  std::vector<int> yb(static_cast<std::size_t>(cfg.batch_size));
  std::vector<double> logits(static_cast<std::size_t>(cfg.batch_size) * classes);
  std::vector<double> probs(logits.size()), glogits(logits.size());
  std::vector<double> eval_logits;

  auto params = model.named_params();
  TrainResult res;
  int step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.lr0 * std::pow(cfg.lr_decay, epoch);
    order_rng.shuffle(perm);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const int bs = static_cast<int>(std::min<std::size_t>(cfg.batch_size, n - start));
      for (int b = 0; b < bs; ++b) {
        const std::size_t src = perm[start + b];
        std::copy(x_train.begin() + src * dim, x_train.begin() + (src + 1) * dim,
                  xb.begin() + static_cast<std::size_t>(b) * dim);
        yb[static_cast<std::size_t>(b)] = y_train[src];
      }
      model.forward(xb.data(), logits.data(), bs);
      const double loss =
          softmax_cross_entropy(logits.data(), yb.data(), bs, classes, probs.data(), glogits.data());
      if (!std::isfinite(loss))
        throw SimulationError("training diverged: non-finite loss at epoch " +
                              std::to_string(epoch + 1) + ", batch " +
                              std::to_string(start / cfg.batch_size + 1));
      loss_sum += loss * bs;
      for (auto& [name, p] : params) p->zero_grad();
      model.backward(glogits.data());
      ++step;
      for (auto& [name, p] : params) adam_step(*p, lr, step);
    }
    EpochPoint pt;
    pt.epoch = epoch + 1;
    pt.lr = lr;
    pt.train_ce = loss_sum / static_cast<double>(n);
    pt.test_ce = mean_ce(model, x_test, y_test, cfg.batch_size, eval_logits);
    res.curves.push_back(pt);
  }
  if (!cfg.curves_path.empty()) write_curves_csv(cfg.curves_path, res.curves);
  return res;
}

void write_curves_csv(const std::string& path, const std::vector<EpochPoint>& curves) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "epoch,lr,train_ce,test_ce\n";
  char buf[128];
  for (const auto& p : curves) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", p.epoch, p.lr, p.train_ce, p.test_ce);
    out << buf;
  }
}

std::vector<EpochPoint> read_curves_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != "epoch,lr,train_ce,test_ce")
    throw IoError(path + " is not a training-curves CSV");
  std::vector<EpochPoint> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    EpochPoint p;
    if (std::sscanf(line.c_str(), "%d,%lg,%lg,%lg", &p.epoch, &p.lr, &p.train_ce, &p.test_ce) != 4)
      throw IoError(path + ": malformed row '" + line + "'");
    out.push_back(p);
  }
  return out;
}

void save_checkpoint(Model& model, const Normalization& norm, const std::string& split_hash,
                     const TrainConfig& train, const std::string& path) {
  nlohmann::json params = nlohmann::json::object();
  for (auto& [name, p] : model.named_params()) params[name] = doubles_to_json(p->value);
  nlohmann::json j{{"format", "osaas-checkpoint-v1"},
                   {"model", model.arch_json()},
                   {"normalization", norm.to_json()},
                   {"split_hash", split_hash},
                   {"train", train_config_to_json(train)},
                   {"params", params}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

LoadedModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed checkpoint " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "osaas-checkpoint-v1")
      throw IoError("unsupported checkpoint format in " + path);
    LoadedModel lm;
    lm.norm = Normalization::from_json(j.at("normalization"));
    lm.split_hash = j.at("split_hash").get<std::string>();
    lm.train = train_config_from_json(j.at("train"));
    const auto& arch = j.at("model");
    const std::string type = arch.at("type").get<std::string>();
    Rng dummy(0);
    if (type == "cnn") {
      CnnConfig c;
      c.rows = arch.at("rows").get<int>();
      c.cols = arch.at("cols").get<int>();
      c.conv_channels = arch.at("conv_channels").get<std::array<int, 3>>();
      c.kernel = arch.at("kernel").get<int>();
      c.fc_base_positions = arch.at("fc_base_positions").get<int>();
      c.fc_pad_positions = arch.at("fc_pad_positions").get<int>();
      c.hidden = arch.at("hidden").get<int>();
      c.classes = arch.at("classes").get<int>();
      lm.model = make_cnn(c, dummy);
    } else if (type == "mlp") {
      MlpConfig c;
      c.rows = arch.at("rows").get<int>();
      c.cols = arch.at("cols").get<int>();
      c.hidden = arch.at("hidden").get<std::vector<int>>();
      c.classes = arch.at("classes").get<int>();
      lm.model = make_mlp(c, dummy);
    } else {
      throw IoError("unknown model type '" + type + "' in " + path);
    }
    const auto& params = j.at("params");
    for (auto& [name, p] : lm.model->named_params()) {
      if (!params.contains(name)) throw IoError("checkpoint missing tensor '" + name + "'");
      auto vals = doubles_from_json(params.at(name));
      if (vals.size() != p->value.size())
        throw IoError("checkpoint tensor '" + name + "' holds " + std::to_string(vals.size()) +
                      " values, expected " + std::to_string(p->value.size()));
      p->value = std::move(vals);
    }
    return lm;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("checkpoint " + path + " missing fields: " + e.what());
  }
}

}  // namespace osaas
