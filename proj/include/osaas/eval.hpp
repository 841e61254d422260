#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "osaas/model.hpp"

namespace osaas {

struct ConfusionMatrix {
  std::array<std::array<int, 4>, 4> counts{};  // [true label][predicted label]

  int total() const;
  int correct() const;  // diagonal sum
  // Rows scaled to sum to 1; an empty row stays all zero.
  std::array<std::array<double, 4>, 4> row_normalized() const;
};

struct ClassMetrics {
  double precision = 0.0;  // 0/0 counts as 0
  double recall = 0.0;
  double f1 = 0.0;
  int support = 0;
};

ClassMetrics one_vs_all(const ConfusionMatrix& cm, int cls);

struct EvalPanel {
  ConfusionMatrix confusion;
  std::array<ClassMetrics, 4> per_class;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

EvalPanel make_panel(const ConfusionMatrix& cm);

struct PredictionRow {
  std::string scenario_id;
  InterferenceKind kind = InterferenceKind::None;
  Label truth = Label::NoInterference;
  Label pred = Label::NoInterference;
  std::array<double, 4> probs{};
};

// Runs the model over the dataset's test split (normalized with the
// checkpoint's statistics, which must equal the dataset's).
std::vector<PredictionRow> predict_test(Model& model, const Dataset& ds, int batch_size = 32);

struct Evaluation {
  EvalPanel overall;
  // Per-mechanism panels: that kind's test rows plus every clean test row,
  // so false alarms count against each mechanism's score.
  std::map<std::string, EvalPanel> by_kind;
  std::map<std::string, int> test_counts_by_kind;  // raw partition of the test split
  double majority_baseline_accuracy = 0.0;
};

Evaluation evaluate(const std::vector<PredictionRow>& rows);

nlohmann::json evaluation_to_json(const Evaluation& e);
void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm, bool normalized);
void write_predictions_csv(const std::string& path, const std::vector<PredictionRow>& rows);

}  // namespace osaas
