#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evertest/classifier_sim.hpp"
#include "evertest/core_stats.hpp"
#include "evertest/rng.hpp"

namespace evertest {

enum class Mode { test, detect, mixture, erm, bounds };

Mode parse_mode(const std::string& name);
std::string to_string(Mode mode);

/// Where labels come from: published/loaded confusion matrices, or raw Gaussian
/// draws pushed through a nearest-centroid classifier trained on offline data.
struct SourceConfig {
  enum class Kind { confusion, gaussian };
  Kind kind = Kind::confusion;
  /// One matrix per classifier channel (mixture mode uses several).
  std::vector<ConfusionMatrix> confusions;
  /// Test-time distributions; `train_gaussian` (if set) is what the classifier is trained on.
  std::optional<GaussianTupleSpec> gaussian;
  std::optional<GaussianTupleSpec> train_gaussian;
  std::size_t train_per_class = 1000;
  std::size_t n_eval = 20000;
};

struct ExperimentConfig {
  std::string name;
  Mode mode = Mode::test;
  SourceConfig source;
  std::vector<double> alpha_grid;
  std::size_t trials = 300;
  std::uint64_t max_steps = 100000;
  std::uint64_t seed = 7;
  Label theta = 1;
  Label pre = 0;
  Label post = 1;
  /// First post-change step; unset means no change (pure pre-change stream).
  std::optional<std::uint64_t> change_at;
  std::vector<double> weights;
  std::optional<std::size_t> prune;
  std::size_t grid_size = 0;
  std::size_t threads = 1;
  std::filesystem::path out_dir;
  // erm
  double threshold_lo = -2.0;
  double threshold_hi = 2.0;
  std::size_t threshold_count = 41;
  // bounds
  nlohmann::json bounds;

  void validate() const;
};

/// Parses the config JSON. Relative file references resolve against `base_dir`.
/// Confusion sources accept a path, an inline {"rows": ...} object, or "builtin:<name>".
ExperimentConfig config_from_json(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Parses {"geom": [lo, hi, n]}, {"linear": [lo, hi, n]} or a plain list.
std::vector<double> parse_alpha_grid(const nlohmann::json& doc);

ConfusionMatrix builtin_confusion(const std::string& name);

/// key = mix(mix(base_seed + golden) ^ mix((trial << 24) ^ alpha_index ^ 0xa5a5a5a5a5a5a5a5)),
/// with `mix` the splitmix64 finalizer. Distinct (trial < 2^40, alpha_index < 2^24)
/// pairs map to distinct keys for a fixed seed.
CounterRng derive_trial_rng(std::uint64_t base_seed, std::uint64_t trial,
                            std::uint64_t alpha_index);

struct ExperimentOutput {
  std::string results_csv;
  nlohmann::json summary;
  nlohmann::json meta;
};

ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Writes results.csv, summary.json and meta.json into `dir` (created if needed).
void write_outputs(const ExperimentOutput& output, const std::filesystem::path& dir);

/// Evaluates a bound calculator request, e.g. {"kind": "tau", "alpha": .., "delta": .., "L": ..}.
nlohmann::json evaluate_bounds(const nlohmann::json& request);

/// Named experiment recipes: fig1, fig1-cifar, fig2, fig3 (matched + shifted),
/// fig4, fig5 (mixture + null check).
std::vector<ExperimentConfig> recipe(const std::string& name);
std::vector<std::string> recipe_names();

}  // namespace evertest
