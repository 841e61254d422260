#include "osaas/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "osaas/config.hpp"
#include "osaas/eval.hpp"

namespace osaas {

namespace {

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string strip_extension(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
  return path.substr(0, dot);
}

}  // namespace

void run_generate(const GenerateOptions& opts) {
  const Plan plan = default_plan();
  log_info("calibrating interference couplings...");
  const SimParams params = calibrate(plan, SimParams{}, CalibrationTargets{});
  log_debug("  nli_coeff=" + std::to_string(params.nli_coeff) +
            " agc_tilt_coeff=" + std::to_string(params.agc_tilt_coeff) +
            " xpm_coeff=" + std::to_string(params.xpm_coeff));

  const Dataset ds = generate_dataset(plan, params, opts.gen);
  save_dataset(ds, opts.out_dir);

  int train = 0, test = 0;
  for (const auto& s : ds.samples) ++(s.test ? test : train);
  log_info("wrote " + std::to_string(ds.samples.size()) + " scenarios (" + std::to_string(train) +
           " train / " + std::to_string(test) + " test) to " + opts.out_dir +
           ", train-split hash " + ds.split_hash);
}

void run_train(const TrainOptions& opts) {
  if (opts.model != "cnn" && opts.model != "mlp")
    throw ConfigError("unknown model '" + opts.model + "' (expected cnn or mlp)");
  const Dataset ds = load_dataset(opts.data_dir);
  log_info("loaded " + std::to_string(ds.samples.size()) + " scenarios from " + opts.data_dir);

  TrainOptions o = opts;
  if (o.out_path.empty()) o.out_path = "checkpoint_" + o.model + ".json";
  if (o.train.curves_path.empty()) o.train.curves_path = strip_extension(o.out_path) + "_curves.csv";

  Rng init_rng(derive_seed(o.train.seed, "init"));
  std::unique_ptr<Model> model =
      o.model == "cnn" ? make_cnn(CnnConfig{}, init_rng) : make_mlp(MlpConfig{}, init_rng);

  log_info("training " + o.model + " for " + std::to_string(o.train.epochs) + " epochs (batch " +
           std::to_string(o.train.batch_size) + ")");
  const TrainResult res = train_model(*model, ds, o.train);
  for (const auto& p : res.curves)
    if (p.epoch % 100 == 0 || p.epoch == static_cast<int>(res.curves.size()))
      log_debug("  epoch " + std::to_string(p.epoch) + " train_ce=" + fmt3(p.train_ce) +
                " test_ce=" + fmt3(p.test_ce));

  save_checkpoint(*model, ds.norm, ds.split_hash, o.train, o.out_path);
  log_info("final train CE " + fmt3(res.curves.back().train_ce) + ", test CE " +
           fmt3(res.curves.back().test_ce));
  log_info("saved checkpoint " + o.out_path + " and curves " + o.train.curves_path);
}

void run_eval(const EvalOptions& opts) {
  if (opts.checkpoint_path.empty()) throw ConfigError("eval needs --checkpoint");
  const Dataset ds = load_dataset(opts.data_dir);
  LoadedModel lm = load_checkpoint(opts.checkpoint_path);
  if (lm.split_hash != ds.split_hash)
    throw ConfigError("checkpoint " + opts.checkpoint_path + " was trained against train-split " +
                      lm.split_hash + " but " + opts.data_dir + " holds " + ds.split_hash);
  for (int j = 0; j < kFeatureCols; ++j)
    if (lm.norm.mean[j] != ds.norm.mean[j] || lm.norm.stdev[j] != ds.norm.stdev[j])
      throw ConfigError("checkpoint normalization differs from the dataset's; refusing to mix them");

  const auto rows = predict_test(*lm.model, ds, opts.batch_size);
  const Evaluation e = evaluate(rows);

  std::filesystem::create_directories(opts.out_dir);
  nlohmann::json report = evaluation_to_json(e);
  report["checkpoint"] = opts.checkpoint_path;
  report["data_dir"] = opts.data_dir;
  report["model"] = lm.model->kind();
  report["split_hash"] = ds.split_hash;
  {
    std::ofstream out(opts.out_dir + "/report.json", std::ios::binary);
    if (!out) throw IoError("cannot write " + opts.out_dir + "/report.json");
    out << report.dump(2) << '\n';
  }
  write_confusion_csv(opts.out_dir + "/confusion.csv", e.overall.confusion, true);
  write_confusion_csv(opts.out_dir + "/confusion_counts.csv", e.overall.confusion, false);
  write_predictions_csv(opts.out_dir + "/predictions.csv", rows);

  log_info("test accuracy " + fmt3(e.overall.accuracy) + " (majority baseline " +
           fmt3(e.majority_baseline_accuracy) + "), macro F1 " + fmt3(e.overall.macro_f1));
  log_info("wrote report to " + opts.out_dir);
}

void run_report(const ReportOptions& opts) {
  if (opts.curves_path.empty()) throw ConfigError("report needs --curves");
  if (opts.window <= 0) throw ConfigError("smoothing window must be positive");
  const auto curves = read_curves_csv(opts.curves_path);
  if (curves.empty()) throw IoError(opts.curves_path + " holds no epochs");

  std::ifstream in(opts.eval_dir + "/report.json", std::ios::binary);
  if (!in) throw IoError("cannot read " + opts.eval_dir + "/report.json (run eval first)");
  nlohmann::json report;
  try {
    in >> report;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed " + opts.eval_dir + "/report.json: " + std::string(e.what()));
  }

  std::filesystem::create_directories(opts.out_dir);
  {
    std::ofstream out(opts.out_dir + "/curves_smoothed.csv", std::ios::binary);
    if (!out) throw IoError("cannot write " + opts.out_dir + "/curves_smoothed.csv");
    out << "epoch,train_ce_smoothed,test_ce_smoothed\n";
    char buf[96];
    double tr_sum = 0.0, te_sum = 0.0;
    for (std::size_t i = 0; i < curves.size(); ++i) {
      tr_sum += curves[i].train_ce;
      te_sum += curves[i].test_ce;
      if (i >= static_cast<std::size_t>(opts.window)) {
        tr_sum -= curves[i - opts.window].train_ce;
        te_sum -= curves[i - opts.window].test_ce;
      }
      const double denom = static_cast<double>(std::min<std::size_t>(i + 1, opts.window));
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", curves[i].epoch, tr_sum / denom,
                    te_sum / denom);
      out << buf;
    }
  }

  std::ofstream out(opts.out_dir + "/summary.txt", std::ios::binary);
  if (!out) throw IoError("cannot write " + opts.out_dir + "/summary.txt");
  const auto& overall = report.at("overall");
  out << "interference localization summary\n";
  out << "=================================\n";
  out << "model: " << report.value("model", std::string("?")) << "  (checkpoint "
      << report.value("checkpoint", std::string("?")) << ")\n";
  out << "train-split hash: " << report.value("split_hash", std::string("?")) << "\n\n";
  out << "test accuracy: " << fmt3(overall.at("accuracy").get<double>()) << "  (majority baseline "
      << fmt3(report.at("majority_baseline_accuracy").get<double>()) << ")\n";
  out << "macro F1: " << fmt3(overall.at("macro_f1").get<double>()) << "\n\n";
  out << "per class (one-vs-all):\n";
  for (const auto& [cls, m] : overall.at("per_class").items())
    out << "  " << cls << ": precision " << fmt3(m.at("precision").get<double>()) << ", recall "
        << fmt3(m.at("recall").get<double>()) << ", F1 " << fmt3(m.at("f1").get<double>())
        << ", support " << m.at("support").get<int>() << "\n";
  out << "\nper mechanism (mechanism rows + all clean rows):\n";
  for (const auto& [kind, panel] : report.at("by_kind").items())
    out << "  " << kind << ": accuracy " << fmt3(panel.at("accuracy").get<double>()) << ", macro F1 "
        << fmt3(panel.at("macro_f1").get<double>()) << "\n";
  out << "\ntraining (smoothed over last " << opts.window << " epochs of " << curves.size() << "):\n";
  double tr = 0.0, te = 0.0;
  const std::size_t lo = curves.size() > static_cast<std::size_t>(opts.window)
                             ? curves.size() - opts.window
                             : 0;
  for (std::size_t i = lo; i < curves.size(); ++i) {
    tr += curves[i].train_ce;
    te += curves[i].test_ce;
  }
  out << "  train CE " << fmt3(tr / (curves.size() - lo)) << ", test CE "
      << fmt3(te / (curves.size() - lo)) << "\n";
  log_info("wrote " + opts.out_dir + "/summary.txt and " + opts.out_dir + "/curves_smoothed.csv");
}

}  // namespace osaas
