// evertest: command-line front end for the sequential classifier-test experiments.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "evertest/harness.hpp"

using namespace evertest;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<std::size_t> threads;
};

struct RunFlags {
  std::vector<std::string> confusions;
  std::string gaussian;
  std::string train_gaussian;
  std::vector<double> alphas;
  std::vector<double> alpha_geom;  // lo hi count
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> max_steps;
  std::optional<Label> theta;
  std::optional<Label> pre;
  std::optional<Label> post;
  std::optional<std::uint64_t> change_at;
  std::vector<double> weights;
  std::optional<std::size_t> prune;
  std::optional<std::size_t> grid_size;
  std::optional<std::size_t> train_per_class;
  std::string out;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--confusion", f.confusions,
                  "Confusion matrix (.json/.csv path or builtin:<name>); repeat for mixture channels");
  cmd->add_option("--gaussian", f.gaussian, "Gaussian tuple JSON (classifier trained by nearest centroid)");
  cmd->add_option("--train-gaussian", f.train_gaussian, "Gaussian tuple used for training, if different");
  cmd->add_option("--train-per-class", f.train_per_class, "Offline samples per class");
  cmd->add_option("--alpha", f.alphas, "Significance level; repeat for a grid");
  cmd->add_option("--alpha-geom", f.alpha_geom, "Geometric alpha grid: LO HI COUNT")->expected(3);
  cmd->add_option("--trials", f.trials, "Monte-Carlo trials per alpha");
  cmd->add_option("--max-steps", f.max_steps, "Horizon per trial");
  cmd->add_option("--theta", f.theta, "True class of the stream");
  cmd->add_option("--pre", f.pre, "Pre-change class");
  cmd->add_option("--post", f.post, "Post-change class");
  cmd->add_option("--change-at", f.change_at, "First post-change step");
  cmd->add_option("--weights", f.weights, "Mixture weights, one per channel");
  cmd->add_option("--prune", f.prune, "Keep at most this many detector starts");
  cmd->add_option("--grid-size", f.grid_size, "Evaluate wealth on a K-point lambda grid");
  cmd->add_option("--out", f.out, "Write the per-trial CSV here");
}

json ref(const std::string& text) {
  return json(text);
}

ExperimentConfig build_config(Mode mode, const Common& common, const RunFlags& f) {
  json doc = json::object();
  std::filesystem::path base;
  if (!common.config_path.empty()) {
    std::ifstream in(common.config_path);
    if (!in) throw std::runtime_error("cannot open " + common.config_path);
    doc = json::parse(in);
    base = std::filesystem::path(common.config_path).parent_path();
  }
  doc["mode"] = to_string(mode);
  if (!f.gaussian.empty()) {
    json src = {{"kind", "gaussian"}, {"gaussian", ref(f.gaussian)}};
    if (!f.train_gaussian.empty()) src["train_gaussian"] = ref(f.train_gaussian);
    if (f.train_per_class) src["train_per_class"] = *f.train_per_class;
    doc["source"] = src;
  } else if (!f.confusions.empty()) {
    json list = json::array();
    for (const auto& c : f.confusions) list.push_back(ref(c));
    doc["source"] = {{"kind", "confusion"}, {"confusions", list}};
  } else if (f.train_per_class && doc.contains("source")) {
    doc["source"]["train_per_class"] = *f.train_per_class;
  }
  if (!f.alphas.empty()) doc["alpha_grid"] = f.alphas;
  if (!f.alpha_geom.empty()) doc["alpha_grid"] = {{"geom", f.alpha_geom}};
  if (f.trials) doc["trials"] = *f.trials;
  if (f.max_steps) doc["max_steps"] = *f.max_steps;
  if (f.theta) doc["theta"] = *f.theta;
  if (f.pre) doc["pre"] = *f.pre;
  if (f.post) doc["post"] = *f.post;
  if (f.change_at) doc["change_at"] = *f.change_at;
  if (!f.weights.empty()) doc["weights"] = f.weights;
  if (f.prune) doc["prune"] = *f.prune;
  if (f.grid_size) doc["grid_size"] = *f.grid_size;
  if (common.seed) doc["seed"] = *common.seed;
  if (common.threads) doc["threads"] = *common.threads;
  if (mode == Mode::erm && !doc.contains("alpha_grid")) doc["alpha_grid"] = {0.05};
  if (mode != Mode::erm && !doc.contains("alpha_grid")) doc["alpha_grid"] = {{"geom", {1e-3, 1e-1, 10}}};

  auto config = config_from_json(doc, base);
  config.out_dir.clear();
  if (!common.out_dir.empty()) config.out_dir = common.out_dir;
  return config;
}

void emit(const ExperimentOutput& output, const Common& common, const std::string& csv_path) {
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write " + csv_path);
    out << output.results_csv;
  }
  if (common.out_dir.empty()) std::cout << output.summary.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evertest: anytime-valid sequential tests and change detection driven by a classifier"};
  app.require_subcommand(1);

  Common common;
  app.add_option("--config", common.config_path, "JSON experiment config");
  app.add_option("--seed", common.seed, "Base seed");
  app.add_option("--out-dir", common.out_dir, "Write results.csv, summary.json and meta.json here");
  app.add_option("--threads", common.threads, "Worker threads for trials");

  RunFlags flags;
  struct ModeCommand {
    Mode mode;
    CLI::App* cmd;
  };
  std::vector<ModeCommand> modes;
  modes.push_back({Mode::test, app.add_subcommand("test", "Power-one test of H0: theta = 0")});
  modes.push_back({Mode::detect, app.add_subcommand("detect", "Sequential change detection")});
  modes.push_back({Mode::mixture, app.add_subcommand("mixture", "Test driven by a mixture of classifiers")});
  modes.push_back({Mode::erm, app.add_subcommand("erm", "Gap-maximizing ERM over a threshold family")});
  for (auto& m : modes) {
    add_run_flags(m.cmd, flags);
    m.cmd->fallthrough();
  }
  std::vector<double> thresholds;
  modes[3].cmd->add_option("--thresholds", thresholds, "LO HI COUNT")->expected(3);

  auto* bounds = app.add_subcommand("bounds", "Closed-form bound calculators (prints JSON)");
  bounds->fallthrough();
  std::string kind = "tau";
  double alpha = 0.05, delta = 0.0, gamma = 0.0, dim = 0.0, n = 0.0, max_kl = 0.0;
  double cap_b = 0.0, train_n = 0.0, curvature_m = 0.0;
  std::uint64_t num_alt = 1;
  std::string train_cm, test_cm, metric = "kl", gaussian, lorden_cm;
  Label pre = 0, post = 1;
  bounds->add_option("--kind", kind, "tau | training-size | mismatch | vc | minimax | lorden")->required();
  bounds->add_option("--alpha", alpha);
  bounds->add_option("--delta", delta, "Gap (tau), confidence (vc) or separation (minimax)");
  bounds->add_option("--L", num_alt, "Number of alternatives");
  bounds->add_option("--gamma", gamma);
  bounds->add_option("--d", dim, "VC dimension");
  bounds->add_option("--n", n);
  bounds->add_option("--max-kl", max_kl);
  bounds->add_option("--B", cap_b);
  bounds->add_option("--N", train_n);
  bounds->add_option("--M", curvature_m);
  bounds->add_option("--train", train_cm, "Training confusion matrix");
  bounds->add_option("--test", test_cm, "Test confusion matrix");
  bounds->add_option("--metric", metric, "kl | tv");
  bounds->add_option("--gaussian", gaussian, "Gaussian tuple JSON for training-size");
  bounds->add_option("--confusion", lorden_cm, "Confusion matrix for lorden");
  bounds->add_option("--pre", pre);
  bounds->add_option("--post", post);

  auto* recipe_cmd = app.add_subcommand("recipe", "Run a named experiment recipe");
  recipe_cmd->fallthrough();
  std::string recipe_name;
  std::optional<std::size_t> recipe_trials;
  recipe_cmd->add_option("name", recipe_name, "fig1 | fig1-cifar | fig2 | fig3 | fig4 | fig5")->required();
  recipe_cmd->add_option("--trials", recipe_trials, "Override trials per alpha");

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto& m : modes) {
      if (!m.cmd->parsed()) continue;
      auto config = build_config(m.mode, common, flags);
      if (!thresholds.empty()) {
        config.threshold_lo = thresholds[0];
        config.threshold_hi = thresholds[1];
        config.threshold_count = static_cast<std::size_t>(thresholds[2]);
      }
      emit(run_experiment(config), common, flags.out);
      return 0;
    }
    if (bounds->parsed()) {
      json request = {{"kind", kind}, {"alpha", alpha}, {"L", num_alt}};
      if (kind == "tau" || kind == "minimax" || kind == "vc") request["delta"] = delta;
      if (kind == "vc") request.update({{"gamma", gamma}, {"d", dim}});
      if (kind == "minimax") {
        request.update({{"n", n}, {"max_kl", max_kl}, {"B", cap_b}, {"N", train_n}, {"M", curvature_m}});
      }
      if (kind == "mismatch") {
        request.update({{"train", train_cm}, {"metric", metric}});
        if (!test_cm.empty()) request["test"] = test_cm;
      }
      if (kind == "training-size") {
        std::ifstream in(gaussian);
        if (!in) throw std::runtime_error("--gaussian is required for training-size");
        request["gaussian"] = json::parse(in);
      }
      if (kind == "lorden") request.update({{"confusion", lorden_cm}, {"pre", pre}, {"post", post}});
      std::cout << evaluate_bounds(request).dump(2) << '\n';
      return 0;
    }
    if (recipe_cmd->parsed()) {
      json all = json::array();
      for (auto config : recipe(recipe_name)) {
        if (common.seed) config.seed = *common.seed;
        if (common.threads) config.threads = *common.threads;
        if (recipe_trials) config.trials = *recipe_trials;
        if (!common.out_dir.empty()) config.out_dir = std::filesystem::path(common.out_dir) / config.name;
        all.push_back(run_experiment(config).summary);
      }
      if (common.out_dir.empty()) std::cout << all.dump(2) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
