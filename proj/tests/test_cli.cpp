#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "osaas/commands.hpp"
#include "osaas/config.hpp"
#include "osaas/eval.hpp"

using namespace osaas;
namespace fs = std::filesystem;

namespace {

fs::path work_root() {
  static const fs::path p = [] {
    fs::path root = fs::temp_directory_path() / "osaas_test_cli";
    fs::remove_all(root);
    fs::create_directories(root);
    return root;
  }();
  return p;
}

GenerateOptions smoke_generate(const std::string& out) {
  GenerateOptions g;
  g.out_dir = out;
  g.gen.seed = 42;
  g.gen.none_count = 40;
  g.gen.power_count = 4;
  g.gen.add_drop_count = 8;
  g.gen.ook_count = 8;
  return g;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config files reject unknown keys") {
  const fs::path dir = work_root() / "cfg";
  fs::create_directories(dir);
  const fs::path good = dir / "good.json";
  std::ofstream(good) << R"({"seed": 7, "none_count": 12})";
  const nlohmann::json j = load_config_file(good.string(), {"seed", "none_count"});
  CHECK(j.at("seed").get<int>() == 7);

  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"sead": 7})";
  CHECK_THROWS_AS(load_config_file(bad.string(), {"seed", "none_count"}), ConfigError);

  const fs::path arr = dir / "arr.json";
  std::ofstream(arr) << R"([1,2,3])";
  CHECK_THROWS_AS(load_config_file(arr.string(), {"seed"}), ConfigError);

  CHECK_THROWS_AS(load_config_file((dir / "absent.json").string(), {"seed"}), IoError);
}

TEST_CASE("full pipeline at smoke scale") {
  const fs::path root = work_root();
  const std::string data = (root / "data").string();

  run_generate(smoke_generate(data));
  REQUIRE(fs::exists(fs::path(data) / "dataset.jsonl"));
  REQUIRE(fs::exists(fs::path(data) / "manifest.json"));

  const Dataset ds = load_dataset(data);
  CHECK(ds.samples.size() == 60);

  // Train both model families briefly.
  TrainOptions tr;
  tr.data_dir = data;
  tr.model = "mlp";
  tr.out_path = (root / "mlp.json").string();
  tr.train.epochs = 8;
  tr.train.batch_size = 16;
  tr.train.seed = 5;
  run_train(tr);
  REQUIRE(fs::exists(root / "mlp.json"));
  REQUIRE(fs::exists(root / "mlp_curves.csv"));
  const auto curves = read_curves_csv((root / "mlp_curves.csv").string());
  CHECK(curves.size() == 8);

  TrainOptions tc = tr;
  tc.model = "cnn";
  tc.out_path = (root / "cnn.json").string();
  tc.train.epochs = 2;
  run_train(tc);
  const LoadedModel lm = load_checkpoint(tc.out_path);
  CHECK(lm.model->kind() == "cnn");
  CHECK(lm.split_hash == ds.split_hash);

  // Evaluate the MLP checkpoint and inspect the artifacts.
  EvalOptions ev;
  ev.data_dir = data;
  ev.checkpoint_path = tr.out_path;
  ev.out_dir = (root / "eval").string();
  run_eval(ev);
  REQUIRE(fs::exists(root / "eval" / "report.json"));
  REQUIRE(fs::exists(root / "eval" / "confusion.csv"));
  REQUIRE(fs::exists(root / "eval" / "confusion_counts.csv"));
  REQUIRE(fs::exists(root / "eval" / "predictions.csv"));

  nlohmann::json report;
  std::ifstream(root / "eval" / "report.json") >> report;
  CHECK(report.at("model").get<std::string>() == "mlp");
  CHECK(report.at("split_hash").get<std::string>() == ds.split_hash);
  CHECK(report.at("overall").at("confusion_counts").is_array());
  int total = 0;
  for (const auto& cmrow : report.at("overall").at("confusion_counts"))
    for (const auto& v : cmrow) total += v.get<int>();
  CHECK(total == 16);  // 10 clean + 2 per user under the stratified 3:1 split

  // Summarize.
  ReportOptions rp;
  rp.curves_path = (root / "mlp_curves.csv").string();
  rp.eval_dir = (root / "eval").string();
  rp.out_dir = (root / "report").string();
  rp.window = 4;
  run_report(rp);
  REQUIRE(fs::exists(root / "report" / "summary.txt"));
  REQUIRE(fs::exists(root / "report" / "curves_smoothed.csv"));
  const std::string summary = slurp(root / "report" / "summary.txt");
  CHECK(summary.find("accuracy") != std::string::npos);
  CHECK(summary.find("macro F1") != std::string::npos);
  CHECK(summary.find("majority") != std::string::npos);

  std::ifstream smooth(root / "report" / "curves_smoothed.csv");
  std::string header;
  std::getline(smooth, header);
  CHECK(header == "epoch,train_ce_smoothed,test_ce_smoothed");
  int lines = 0;
  for (std::string l; std::getline(smooth, l);) ++lines;
  CHECK(lines == 8);
}

TEST_CASE("eval refuses a checkpoint from a different split") {
  const fs::path root = work_root();
  const std::string data2 = (root / "data2").string();
  GenerateOptions g = smoke_generate(data2);
  g.gen.seed = 43;  // different split hash
  run_generate(g);

  EvalOptions ev;
  ev.data_dir = data2;
  ev.checkpoint_path = (root / "mlp.json").string();  // trained on seed-42 data
  ev.out_dir = (root / "eval_bad").string();
  CHECK_THROWS_AS(run_eval(ev), ConfigError);
}

TEST_CASE("train validates the model name") {
  const fs::path root = work_root();
  TrainOptions tr;
  tr.data_dir = (root / "data").string();
  tr.model = "transformer";
  tr.out_path = (root / "x.json").string();
  tr.train.epochs = 1;
  CHECK_THROWS_AS(run_train(tr), ConfigError);
}

TEST_CASE("generated artifacts are deterministic in the seed") {
  const fs::path root = work_root();
  const std::string a = (root / "det_a").string();
  const std::string b = (root / "det_b").string();
  run_generate(smoke_generate(a));
  run_generate(smoke_generate(b));
  CHECK(slurp(fs::path(a) / "dataset.jsonl") == slurp(fs::path(b) / "dataset.jsonl"));
  CHECK(slurp(fs::path(a) / "manifest.json") == slurp(fs::path(b) / "manifest.json"));
}
