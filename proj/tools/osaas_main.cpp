#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "osaas/commands.hpp"
#include "osaas/config.hpp"

namespace {

template <typename T>
void from_config(const nlohmann::json& j, const char* key, bool flag_passed, T& target) {
  if (flag_passed || !j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw osaas::ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-user optical line system: telemetry synthesis and interference localization"};
  app.require_subcommand(1);

  osaas::GenerateOptions gen;
  std::string gen_config;
  auto* g = app.add_subcommand("generate", "Calibrate the line model and synthesize the dataset");
  g->add_option("--out", gen.out_dir, "Output directory")->capture_default_str();
  g->add_option("--seed", gen.gen.seed, "Master seed")->capture_default_str();
  g->add_option("--none-count", gen.gen.none_count, "Clean scenarios")->capture_default_str();
  g->add_option("--power-count", gen.gen.power_count, "Power-increase scenarios")->capture_default_str();
  g->add_option("--add-drop-count", gen.gen.add_drop_count, "Add/drop scenarios")->capture_default_str();
  g->add_option("--ook-count", gen.gen.ook_count, "Rogue-carrier scenarios")->capture_default_str();
  g->add_option("--none-margin", gen.gen.none_margin_db,
                "Q-drop margin (dB) below which a scenario may serve as clean")
      ->capture_default_str();
  g->add_option("--threads", gen.gen.threads, "Worker threads for measurement")->capture_default_str();
  g->add_option("--config", gen_config, "JSON config file (flags win)");

  osaas::TrainOptions tr;
  std::string tr_config;
  auto* t = app.add_subcommand("train", "Train a classifier on a generated dataset");
  t->add_option("--data", tr.data_dir, "Dataset directory")->capture_default_str();
  t->add_option("--model", tr.model, "cnn or mlp")->capture_default_str();
  t->add_option("--out", tr.out_path, "Checkpoint path (default checkpoint_<model>.json)");
  t->add_option("--epochs", tr.train.epochs, "Training epochs")->capture_default_str();
  t->add_option("--batch-size", tr.train.batch_size, "Minibatch size")->capture_default_str();
  t->add_option("--lr", tr.train.lr0, "Initial learning rate")->capture_default_str();
  t->add_option("--lr-decay", tr.train.lr_decay, "Per-epoch learning-rate factor")->capture_default_str();
  t->add_option("--seed", tr.train.seed, "Training seed")->capture_default_str();
  t->add_option("--curves", tr.train.curves_path, "Loss-curves CSV (default <out>_curves.csv)");
  t->add_option("--config", tr_config, "JSON config file (flags win)");

  osaas::EvalOptions ev;
  std::string ev_config;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  e->add_option("--data", ev.data_dir, "Dataset directory")->capture_default_str();
  e->add_option("--checkpoint", ev.checkpoint_path, "Checkpoint to evaluate");
  e->add_option("--out", ev.out_dir, "Report output directory")->capture_default_str();
  e->add_option("--batch-size", ev.batch_size, "Inference batch size")->capture_default_str();
  e->add_option("--config", ev_config, "JSON config file (flags win)");

  osaas::ReportOptions rp;
  std::string rp_config;
  auto* r = app.add_subcommand("report", "Summarize training curves and evaluation results");
  r->add_option("--curves", rp.curves_path, "Loss-curves CSV from train");
  r->add_option("--eval", rp.eval_dir, "Directory holding eval's report.json")->capture_default_str();
  r->add_option("--out", rp.out_dir, "Summary output directory")->capture_default_str();
  r->add_option("--window", rp.window, "Moving-average window (epochs)")->capture_default_str();
  r->add_option("--config", rp_config, "JSON config file (flags win)");

  try {
    app.parse(argc, argv);

    if (g->parsed()) {
      if (!gen_config.empty()) {
        const auto j = osaas::load_config_file(
            gen_config, {"out", "seed", "none_count", "power_count", "add_drop_count", "ook_count",
                         "none_margin_db", "threads"});
        from_config(j, "out", g->count("--out") > 0, gen.out_dir);
        from_config(j, "seed", g->count("--seed") > 0, gen.gen.seed);
        from_config(j, "none_count", g->count("--none-count") > 0, gen.gen.none_count);
        from_config(j, "power_count", g->count("--power-count") > 0, gen.gen.power_count);
        from_config(j, "add_drop_count", g->count("--add-drop-count") > 0, gen.gen.add_drop_count);
        from_config(j, "ook_count", g->count("--ook-count") > 0, gen.gen.ook_count);
        from_config(j, "none_margin_db", g->count("--none-margin") > 0, gen.gen.none_margin_db);
        from_config(j, "threads", g->count("--threads") > 0, gen.gen.threads);
      }
      osaas::run_generate(gen);
    } else if (t->parsed()) {
      if (!tr_config.empty()) {
        const auto j = osaas::load_config_file(
            tr_config,
            {"data", "model", "out", "epochs", "batch_size", "lr0", "lr_decay", "seed", "curves"});
        from_config(j, "data", t->count("--data") > 0, tr.data_dir);
        from_config(j, "model", t->count("--model") > 0, tr.model);
        from_config(j, "out", t->count("--out") > 0, tr.out_path);
        from_config(j, "epochs", t->count("--epochs") > 0, tr.train.epochs);
        from_config(j, "batch_size", t->count("--batch-size") > 0, tr.train.batch_size);
        from_config(j, "lr0", t->count("--lr") > 0, tr.train.lr0);
        from_config(j, "lr_decay", t->count("--lr-decay") > 0, tr.train.lr_decay);
        from_config(j, "seed", t->count("--seed") > 0, tr.train.seed);
        from_config(j, "curves", t->count("--curves") > 0, tr.train.curves_path);
      }
      osaas::run_train(tr);
    } else if (e->parsed()) {
      if (!ev_config.empty()) {
        const auto j =
            osaas::load_config_file(ev_config, {"data", "checkpoint", "out", "batch_size"});
        from_config(j, "data", e->count("--data") > 0, ev.data_dir);
        from_config(j, "checkpoint", e->count("--checkpoint") > 0, ev.checkpoint_path);
        from_config(j, "out", e->count("--out") > 0, ev.out_dir);
        from_config(j, "batch_size", e->count("--batch-size") > 0, ev.batch_size);
      }
      osaas::run_eval(ev);
    } else if (r->parsed()) {
      if (!rp_config.empty()) {
        const auto j = osaas::load_config_file(rp_config, {"curves", "eval", "out", "window"});
        from_config(j, "curves", r->count("--curves") > 0, rp.curves_path);
        from_config(j, "eval", r->count("--eval") > 0, rp.eval_dir);
        from_config(j, "out", r->count("--out") > 0, rp.out_dir);
        from_config(j, "window", r->count("--window") > 0, rp.window);
      }
      osaas::run_report(rp);
    }
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
