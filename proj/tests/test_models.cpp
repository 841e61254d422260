#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "osaas/model.hpp"

using namespace osaas;
namespace fs = std::filesystem;

namespace {

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Synthetic-but-learnable dataset at the native feature shape: each label
// paints its own column stripe, plus small per-sample noise.
Dataset toy_dataset(int per_class = 10) {
  Dataset ds;
  Rng rng(77);
  int counter = 0;
  for (int cls = 0; cls < 4; ++cls) {
    for (int i = 0; i < per_class; ++i) {
      Sample s;
      char id[32];
      std::snprintf(id, sizeof id, "toy_%04d", counter++);
      s.scenario_id = id;
      s.label = static_cast<Label>(cls);
      s.kind = cls == 0 ? InterferenceKind::None : InterferenceKind::PowerIncrease;
      s.test = (i % 4 == 3);
      for (int r = 0; r < kFeatureRows; ++r)
        for (int j = 0; j < kFeatureCols; ++j)
          s.features[r][j] = (j % 4 == cls ? 2.0 : 0.0) + 0.05 * rng.gaussian();
      ds.samples.push_back(s);
    }
  }
  std::sort(ds.samples.begin(), ds.samples.end(),
            [](const Sample& a, const Sample& b) { return a.scenario_id < b.scenario_id; });
  ds.norm = fit_normalization(ds.samples);
  ds.split_hash = split_hash_hex(ds.samples);
  return ds;
}

TrainConfig quick_train(int epochs) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 8;
  cfg.lr0 = 3e-3;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("branch encodings tag each feature column with its index") {
  // rows 2 x cols 3 toy matrix.
  const double x[6] = {1, 2, 3, 4, 5, 6};
  std::vector<double> spec(2 * 3 * 2), feat(2 * 2 * 3);
  encode_spectral_branch(x, 2, 3, spec.data());
  encode_feature_branch(x, 2, 3, feat.data());

  // Spectral branch: one sequence per column, len = rows.
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 2; ++k) {
      CHECK(spec[(0 * 3 + j) * 2 + k] == doctest::Approx(x[k * 3 + j] + std::sin(j)));
      CHECK(spec[(1 * 3 + j) * 2 + k] == doctest::Approx(x[k * 3 + j] + std::cos(j)));
    }
  // Feature branch: one sequence per row, len = cols.
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 3; ++j) {
      CHECK(feat[(0 * 2 + k) * 3 + j] == doctest::Approx(x[k * 3 + j] + std::sin(j)));
      CHECK(feat[(1 * 2 + k) * 3 + j] == doctest::Approx(x[k * 3 + j] + std::cos(j)));
    }
  CHECK(spec[(0 * 3 + 1) * 2 + 0] == doctest::Approx(2.0 + 0.8414709848));
  CHECK(feat[(1 * 2 + 0) * 3 + 1] == doctest::Approx(2.0 + 0.5403023059));

  // Swapping two probes (rows) permutes positions inside each spectral
  // sequence but changes no values: the tag depends on the column only.
  double xs[6] = {4, 5, 6, 1, 2, 3};
  std::vector<double> spec2(2 * 3 * 2);
  encode_spectral_branch(xs, 2, 3, spec2.data());
  for (int c = 0; c < 2; ++c)
    for (int j = 0; j < 3; ++j) {
      CHECK(spec2[(c * 3 + j) * 2 + 0] == doctest::Approx(spec[(c * 3 + j) * 2 + 1]));
      CHECK(spec2[(c * 3 + j) * 2 + 1] == doctest::Approx(spec[(c * 3 + j) * 2 + 0]));
    }
}

TEST_CASE("classifier argmax with abstention") {
  const double confident[4] = {0.1, 0.62, 0.18, 0.1};
  CHECK(classify(confident, 4) == Label::User1);
  const double clean[4] = {0.8, 0.1, 0.05, 0.05};
  CHECK(classify(clean, 4) == Label::NoInterference);
  const double hedged[4] = {0.3, 0.3, 0.2, 0.2};  // peak below 0.5
  CHECK(classify(hedged, 4) == Label::NoInterference);
  const double tie[4] = {0.0, 0.5, 0.5, 0.0};  // strict argmax keeps the lower index
  CHECK(classify(tie, 4) == Label::User1);
}

TEST_CASE("cnn head budget is independent of moderate input sizes") {
  Rng rng(3);
  CnnConfig base;  // 4 x 30
  auto m1 = make_cnn(base, rng);

  CnnConfig wider = base;
  wider.rows = 5;
  wider.cols = 31;  // 2*5*31 = 310 of 320 positions
  Rng rng2(3);
  auto m2 = make_cnn(wider, rng2);

  auto p1 = m1->named_params();
  auto p2 = m2->named_params();
  REQUIRE(p1.size() == p2.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    CHECK(p1[i].first == p2[i].first);
    if (p1[i].first.rfind("fc", 0) == 0) CHECK(p1[i].second->size() == p2[i].second->size());
  }

  // Both must actually run forward at their own input shapes.
  std::vector<double> xa(4 * 30, 0.1), xb(5 * 31, 0.1), logits(4);
  m1->forward(xa.data(), logits.data(), 1);
  for (double v : logits) CHECK(std::isfinite(v));
  m2->forward(xb.data(), logits.data(), 1);
  for (double v : logits) CHECK(std::isfinite(v));

  CnnConfig too_big = base;
  too_big.rows = 5;
  too_big.cols = 33;  // 330 positions exceed the 320 budget
  Rng rng3(3);
  CHECK_THROWS_AS(make_cnn(too_big, rng3), ConfigError);
}

TEST_CASE("cnn parameter inventory") {
  Rng rng(5);
  auto m = make_cnn(CnnConfig{}, rng);
  CHECK(m->kind() == "cnn");
  CHECK(m->input_rows() == 4);
  CHECK(m->input_cols() == 30);
  std::size_t total = 0;
  bool saw_spec = false, saw_feat = false, saw_fc = false;
  for (auto& [name, p] : m->named_params()) {
    total += p->size();
    saw_spec = saw_spec || name.rfind("spectral.", 0) == 0;
    saw_feat = saw_feat || name.rfind("feature.", 0) == 0;
    saw_fc = saw_fc || name.rfind("fc", 0) == 0;
  }
  CHECK(saw_spec);
  CHECK(saw_feat);
  CHECK(saw_fc);
  // Two conv stacks of (2->8->16->16, k=3) plus 5120->100->4 head.
  CHECK(total == 2 * (48 + 8 + 384 + 16 + 768 + 16) + (5120 * 100 + 100) + (100 * 4 + 4));
}

TEST_CASE("cnn gradients match finite differences") {
  CnnConfig cfg;
  cfg.rows = 3;
  cfg.cols = 4;
  cfg.conv_channels = {2, 3, 3};
  cfg.fc_base_positions = 24;  // 2*3*4 exactly
  cfg.fc_pad_positions = 6;
  cfg.hidden = 5;
  Rng rng(17);
  auto m = make_cnn(cfg, rng);

  const int batch = 3, classes = 4;
  std::vector<double> x(batch * cfg.rows * cfg.cols);
  Rng data_rng(23);
  for (auto& v : x) v = data_rng.gaussian();
  const int labels[3] = {0, 2, 3};

  std::vector<double> logits(batch * classes), probs(batch * classes), g(batch * classes);
  m->forward(x.data(), logits.data(), batch);
  softmax_cross_entropy(logits.data(), labels, batch, classes, probs.data(), g.data());
  for (auto& [name, p] : m->named_params()) p->zero_grad();
  m->backward(g.data());

  auto loss = [&] {
    m->forward(x.data(), logits.data(), batch);
    return cross_entropy_loss(logits.data(), labels, batch, classes);
  };
  const double h = 1e-6;
  int checked = 0;
  for (auto& [name, p] : m->named_params()) {
    const std::size_t stride = std::max<std::size_t>(1, p->size() / 7);
    for (std::size_t j = 0; j < p->size(); j += stride) {
      const double keep = p->value[j];
      p->value[j] = keep + h;
      const double lp = loss();
      p->value[j] = keep - h;
      const double lm = loss();
      p->value[j] = keep;
      const double fd = (lp - lm) / (2 * h);
      INFO(name << "[" << j << "]");
      CHECK(rel_err(p->grad[j], fd) < 1e-4);
      ++checked;
    }
  }
  CHECK(checked >= 20 * 2);
}

TEST_CASE("mlp gradients match finite differences") {
  MlpConfig cfg;
  cfg.rows = 2;
  cfg.cols = 5;
  cfg.hidden = {6, 6};
  Rng rng(29);
  auto m = make_mlp(cfg, rng);
  CHECK(m->kind() == "mlp");

  const int batch = 4, classes = 4;
  std::vector<double> x(batch * cfg.rows * cfg.cols);
  Rng data_rng(31);
  for (auto& v : x) v = data_rng.gaussian();
  const int labels[4] = {1, 0, 3, 2};

  std::vector<double> logits(batch * classes), probs(batch * classes), g(batch * classes);
  m->forward(x.data(), logits.data(), batch);
  softmax_cross_entropy(logits.data(), labels, batch, classes, probs.data(), g.data());
  for (auto& [name, p] : m->named_params()) p->zero_grad();
  m->backward(g.data());

  auto loss = [&] {
    m->forward(x.data(), logits.data(), batch);
    return cross_entropy_loss(logits.data(), labels, batch, classes);
  };
  const double h = 1e-6;
  int checked = 0;
  for (auto& [name, p] : m->named_params()) {
    const std::size_t stride = std::max<std::size_t>(1, p->size() / 9);
    for (std::size_t j = 0; j < p->size(); j += stride) {
      const double keep = p->value[j];
      p->value[j] = keep + h;
      const double lp = loss();
      p->value[j] = keep - h;
      const double lm = loss();
      p->value[j] = keep;
      INFO(name << "[" << j << "]");
      CHECK(rel_err(p->grad[j], (lp - lm) / (2 * h)) < 1e-4);
      ++checked;
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("training learns a separable toy problem deterministically") {
  const Dataset ds = toy_dataset();
  const TrainConfig cfg = quick_train(40);

  Rng init(derive_seed(cfg.seed, "init"));
  auto m = make_mlp(MlpConfig{}, init);
  const TrainResult res = train_model(*m, ds, cfg);
  REQUIRE(static_cast<int>(res.curves.size()) == cfg.epochs);
  CHECK(res.curves.front().epoch == 1);
  CHECK(res.curves.back().epoch == cfg.epochs);
  // Learning rate follows the per-epoch decay schedule.
  CHECK(res.curves[0].lr == doctest::Approx(cfg.lr0));
  CHECK(res.curves[5].lr == doctest::Approx(cfg.lr0 * std::pow(cfg.lr_decay, 5)));
  // The stripes are trivially separable: the loss must collapse.
  CHECK(res.curves.back().train_ce < 0.25 * res.curves.front().train_ce);
  CHECK(res.curves.back().test_ce < res.curves.front().test_ce);

  // Bitwise repeatability, via checkpoints.
  const fs::path dir = fs::temp_directory_path() / "osaas_test_models";
  fs::create_directories(dir);
  const std::string ck1 = (dir / "det1.json").string(), ck2 = (dir / "det2.json").string();
  save_checkpoint(*m, ds.norm, ds.split_hash, cfg, ck1);

  Rng init2(derive_seed(cfg.seed, "init"));
  auto m2 = make_mlp(MlpConfig{}, init2);
  const TrainResult res2 = train_model(*m2, ds, cfg);
  save_checkpoint(*m2, ds.norm, ds.split_hash, cfg, ck2);
  CHECK(file_bytes(ck1) == file_bytes(ck2));
  for (std::size_t e = 0; e < res.curves.size(); ++e) {
    CHECK(res.curves[e].train_ce == res2.curves[e].train_ce);
    CHECK(res.curves[e].test_ce == res2.curves[e].test_ce);
  }

  // A different ordering seed trains a different model.
  TrainConfig other = cfg;
  other.seed = 12;
  Rng init3(derive_seed(other.seed, "init"));
  auto m3 = make_mlp(MlpConfig{}, init3);
  train_model(*m3, ds, other);
  const std::string ck3 = (dir / "det3.json").string();
  save_checkpoint(*m3, ds.norm, ds.split_hash, other, ck3);
  CHECK(file_bytes(ck1) != file_bytes(ck3));
}

TEST_CASE("checkpoints round trip bit-exactly") {
  const Dataset ds = toy_dataset(6);
  const TrainConfig cfg = quick_train(3);
  Rng init(derive_seed(cfg.seed, "init"));
  auto m = make_cnn(CnnConfig{}, init);
  train_model(*m, ds, cfg);

  const fs::path dir = fs::temp_directory_path() / "osaas_test_models";
  fs::create_directories(dir);
  const std::string path = (dir / "roundtrip_cnn.json").string();
  save_checkpoint(*m, ds.norm, ds.split_hash, cfg, path);

  LoadedModel back = load_checkpoint(path);
  CHECK(back.model->kind() == "cnn");
  CHECK(back.split_hash == ds.split_hash);
  CHECK(back.train.epochs == cfg.epochs);
  CHECK(back.train.batch_size == cfg.batch_size);
  CHECK(back.train.lr0 == cfg.lr0);
  CHECK(back.train.seed == cfg.seed);
  for (int j = 0; j < kFeatureCols; ++j) {
    CHECK(back.norm.mean[j] == ds.norm.mean[j]);
    CHECK(back.norm.stdev[j] == ds.norm.stdev[j]);
  }

  auto pa = m->named_params();
  auto pb = back.model->named_params();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i].first == pb[i].first);
    REQUIRE(pa[i].second->size() == pb[i].second->size());
    for (std::size_t j = 0; j < pa[i].second->size(); ++j)
      CHECK(pa[i].second->value[j] == pb[i].second->value[j]);
  }

  std::vector<double> x(kFeatureRows * kFeatureCols);
  Rng rng(41);
  for (auto& v : x) v = rng.gaussian();
  std::vector<double> la(4), lb(4);
  m->forward(x.data(), la.data(), 1);
  back.model->forward(x.data(), lb.data(), 1);
  for (int k = 0; k < 4; ++k) CHECK(la[k] == lb[k]);

  CHECK_THROWS_AS(load_checkpoint((dir / "missing.json").string()), IoError);
}

TEST_CASE("training rejects mismatched shapes and divergent losses") {
  const Dataset ds = toy_dataset(6);
  const TrainConfig cfg = quick_train(2);

  MlpConfig small;
  small.rows = 2;
  small.cols = 5;
  Rng rng(1);
  auto tiny = make_mlp(small, rng);
  CHECK_THROWS_AS(train_model(*tiny, ds, cfg), ConfigError);

  Dataset poisoned = ds;
  poisoned.samples[0].test = false;
  poisoned.samples[0].features[0][0] = std::nan("");
  Rng rng2(1);
  auto m = make_mlp(MlpConfig{}, rng2);
  CHECK_THROWS_AS(train_model(*m, poisoned, cfg), SimulationError);
}

TEST_CASE("curves csv round trips") {
  std::vector<EpochPoint> pts;
  for (int e = 1; e <= 5; ++e)
    pts.push_back({e, 1e-3 * std::pow(0.9975, e - 1), 1.0 / e, 1.1 / e});
  const fs::path dir = fs::temp_directory_path() / "osaas_test_models";
  fs::create_directories(dir);
  const std::string path = (dir / "curves.csv").string();
  write_curves_csv(path, pts);
  const auto back = read_curves_csv(path);
  REQUIRE(back.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(back[i].epoch == pts[i].epoch);
    CHECK(back[i].lr == pts[i].lr);
    CHECK(back[i].train_ce == pts[i].train_ce);
    CHECK(back[i].test_ce == pts[i].test_ce);
  }
  std::ofstream(path) << "nonsense\n";
  CHECK_THROWS_AS(read_curves_csv(path), IoError);
}

TEST_CASE("train config json round trip") {
  TrainConfig c;
  c.epochs = 300;
  c.batch_size = 16;
  c.lr0 = 2e-3;
  c.lr_decay = 0.99;
  c.seed = 123;
  const TrainConfig back = train_config_from_json(train_config_to_json(c));
  CHECK(back.epochs == 300);
  CHECK(back.batch_size == 16);
  CHECK(back.lr0 == doctest::Approx(2e-3));
  CHECK(back.lr_decay == doctest::Approx(0.99));
  CHECK(back.seed == 123);
}
