#include "osaas/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace osaas {

int ConfusionMatrix::total() const {
  int t = 0;
  for (const auto& row : counts)
    for (int c : row) t += c;
  return t;
}

int ConfusionMatrix::correct() const {
  int t = 0;
  for (int i = 0; i < 4; ++i) t += counts[i][i];
  return t;
}

std::array<std::array<double, 4>, 4> ConfusionMatrix::row_normalized() const {
  std::array<std::array<double, 4>, 4> out{};
  for (int i = 0; i < 4; ++i) {
    int row_sum = 0;
    for (int c : counts[i]) row_sum += c;
    if (row_sum == 0) continue;
    for (int j = 0; j < 4; ++j) out[i][j] = static_cast<double>(counts[i][j]) / row_sum;
  }
  return out;
}

ClassMetrics one_vs_all(const ConfusionMatrix& cm, int cls) {
  int tp = cm.counts[cls][cls], fp = 0, fn = 0;
  for (int i = 0; i < 4; ++i) {
    if (i == cls) continue;
    fp += cm.counts[i][cls];
    fn += cm.counts[cls][i];
  }
  ClassMetrics m;
  m.support = tp + fn;
  m.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

EvalPanel make_panel(const ConfusionMatrix& cm) {
  EvalPanel p;
  p.confusion = cm;
  double f1_sum = 0.0;
  for (int c = 0; c < 4; ++c) {
    p.per_class[c] = one_vs_all(cm, c);
    f1_sum += p.per_class[c].f1;
  }
  p.accuracy = cm.total() > 0 ? static_cast<double>(cm.correct()) / cm.total() : 0.0;
  p.macro_f1 = f1_sum / 4.0;
  return p;
}

std::vector<PredictionRow> predict_test(Model& model, const Dataset& ds, int batch_size) {
  if (model.input_rows() != kFeatureRows || model.input_cols() != kFeatureCols)
    throw ConfigError("model input shape does not match the telemetry feature matrix");
  const auto idx = ds.test_indices();
  if (idx.empty()) throw ValidationError("dataset has no test split to evaluate");

  const std::size_t dim = static_cast<std::size_t>(kFeatureRows) * kFeatureCols;
  const int classes = model.classes();
  std::vector<PredictionRow> rows(idx.size());
  std::vector<double> x(static_cast<std::size_t>(batch_size) * dim);
  std::vector<double> logits(static_cast<std::size_t>(batch_size) * classes);
  std::vector<double> probs(static_cast<std::size_t>(classes));

  std::size_t done = 0;
  while (done < idx.size()) {
    const int bs = static_cast<int>(std::min<std::size_t>(batch_size, idx.size() - done));
    for (int b = 0; b < bs; ++b) {
      FeatureMatrix m = ds.samples[idx[done + b]].features;
      ds.norm.apply(m);
      for (int r = 0; r < kFeatureRows; ++r)
        std::copy(m[r].begin(), m[r].end(),
                  x.begin() + static_cast<std::size_t>(b) * dim + static_cast<std::size_t>(r) * kFeatureCols);
    }
    model.forward(x.data(), logits.data(), bs);
    for (int b = 0; b < bs; ++b) {
      const Sample& s = ds.samples[idx[done + b]];
      PredictionRow& row = rows[done + b];
      row.scenario_id = s.scenario_id;
      row.kind = s.kind;
      row.truth = s.label;
      softmax(logits.data() + static_cast<std::size_t>(b) * classes, probs.data(), classes);
      for (int c = 0; c < classes && c < 4; ++c) row.probs[c] = probs[c];
      row.pred = classify(probs.data(), classes);
    }
    done += static_cast<std::size_t>(bs);
  }
  return rows;
}

Evaluation evaluate(const std::vector<PredictionRow>& rows) {
  if (rows.empty()) throw ValidationError("nothing to evaluate");
  Evaluation e;

  ConfusionMatrix overall{};
  std::array<int, 4> truth_counts{};
  for (const auto& r : rows) {
    ++overall.counts[static_cast<int>(r.truth)][static_cast<int>(r.pred)];
    ++truth_counts[static_cast<int>(r.truth)];
    ++e.test_counts_by_kind[to_string(r.kind)];
  }
  e.overall = make_panel(overall);
  e.majority_baseline_accuracy =
      static_cast<double>(*std::max_element(truth_counts.begin(), truth_counts.end())) /
      static_cast<double>(rows.size());

  for (InterferenceKind k :
       {InterferenceKind::PowerIncrease, InterferenceKind::AddDrop, InterferenceKind::Ook}) {
    ConfusionMatrix cm{};
    for (const auto& r : rows)
      if (r.kind == k || r.kind == InterferenceKind::None)
        ++cm.counts[static_cast<int>(r.truth)][static_cast<int>(r.pred)];
    e.by_kind[to_string(k)] = make_panel(cm);
  }
  return e;
}

namespace {

nlohmann::json panel_to_json(const EvalPanel& p) {
  nlohmann::json per_class = nlohmann::json::object();
  for (int c = 0; c < 4; ++c) {
    per_class[to_string(static_cast<Label>(c))] = {{"precision", p.per_class[c].precision},
                                                   {"recall", p.per_class[c].recall},
                                                   {"f1", p.per_class[c].f1},
                                                   {"support", p.per_class[c].support}};
  }
  return {{"accuracy", p.accuracy},
          {"macro_f1", p.macro_f1},
          {"per_class", per_class},
          {"confusion_counts", p.confusion.counts},
          {"confusion_row_normalized", p.confusion.row_normalized()}};
}

}  // namespace

nlohmann::json evaluation_to_json(const Evaluation& e) {
  nlohmann::json by_kind = nlohmann::json::object();
  for (const auto& [k, p] : e.by_kind) by_kind[k] = panel_to_json(p);
  return {{"overall", panel_to_json(e.overall)},
          {"by_kind", by_kind},
          {"test_counts_by_kind", e.test_counts_by_kind},
          {"majority_baseline_accuracy", e.majority_baseline_accuracy}};
}

void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm, bool normalized) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "true\\pred";
  for (int c = 0; c < 4; ++c) out << ',' << to_string(static_cast<Label>(c));
  out << '\n';
  const auto norm = cm.row_normalized();
  char buf[64];
  for (int i = 0; i < 4; ++i) {
    out << to_string(static_cast<Label>(i));
    for (int j = 0; j < 4; ++j) {
      if (normalized) {
        std::snprintf(buf, sizeof buf, ",%.17g", norm[i][j]);
        out << buf;
      } else {
        out << ',' << cm.counts[i][j];
      }
    }
    out << '\n';
  }
}

void write_predictions_csv(const std::string& path, const std::vector<PredictionRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "scenario_id,kind,true_label,predicted_label,p_none,p_user1,p_user2,p_user3\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%.17g\n", r.probs[0], r.probs[1], r.probs[2],
                  r.probs[3]);
    out << r.scenario_id << ',' << to_string(r.kind) << ',' << to_string(r.truth) << ','
        << to_string(r.pred) << buf;
  }
}

}  // namespace osaas
