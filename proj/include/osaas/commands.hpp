#pragma once

#include <string>

#include "osaas/dataset.hpp"
#include "osaas/model.hpp"

namespace osaas {

struct GenerateOptions {
  std::string out_dir = "data";
  GenerationConfig gen;
};

struct TrainOptions {
  std::string data_dir = "data";
  std::string model = "cnn";  // or "mlp"
  std::string out_path;       // default: checkpoint_<model>.json
  TrainConfig train;          // empty curves_path -> <out stem>_curves.csv
};

struct EvalOptions {
  std::string data_dir = "data";
  std::string checkpoint_path;
  std::string out_dir = "eval";
  int batch_size = 32;
};

struct ReportOptions {
  std::string curves_path;
  std::string eval_dir = "eval";  // reads report.json written by eval
  std::string out_dir = "report";
  int window = 25;  // trailing moving-average width for the loss curves
};

void run_generate(const GenerateOptions& opts);
void run_train(const TrainOptions& opts);
void run_eval(const EvalOptions& opts);
void run_report(const ReportOptions& opts);

}  // namespace osaas
