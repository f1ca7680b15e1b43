#include "evertest/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "evertest/change_detector.hpp"
#include "evertest/published_tables.hpp"
#include "evertest/sequential_test.hpp"
#include "evertest/summary.hpp"
#include "evertest/theory_bounds.hpp"

namespace evertest {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSetupTrial = (std::uint64_t{1} << 40) - 1;
constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& ref) {
  std::filesystem::path p(ref);
  return p.is_absolute() || base.empty() ? p : base / p;
}

ConfusionMatrix confusion_from_ref(const json& ref, const std::filesystem::path& base) {
  if (ref.is_object() || ref.is_array()) return confusion_from_json(ref.dump());
  const auto text = ref.get<std::string>();
  if (text.rfind("builtin:", 0) == 0) return builtin_confusion(text.substr(8));
  return read_confusion(resolve(base, text));
}

GaussianTupleSpec gaussian_from_ref(const json& ref, const std::filesystem::path& base) {
  if (ref.is_object()) return gaussian_spec_from_json(ref.dump());
  const auto text = ref.get<std::string>();
  if (text == "builtin:gaussian_ten_dim") return published::gaussian_ten_dim();
  if (text == "builtin:gaussian_two_dim") return published::gaussian_two_dim();
  if (text == "builtin:gaussian_two_dim_shifted") return published::gaussian_two_dim_shifted();
  return gaussian_spec_from_json(read_file(resolve(base, text)));
}

json matrix_json(const ConfusionMatrix& cm) { return json::parse(to_json(cm)); }

/// Runs fn(i) for i in [0, count) over `threads` workers; slots are index-addressed,
/// so results do not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += threads) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

struct PreparedSource {
  std::vector<ConfusionMatrix> confusions;  // induced / published matrices per channel
  std::optional<CentroidClassifier> classifier;
  std::vector<std::string> warnings;
};

PreparedSource prepare_source(const ExperimentConfig& config) {
  PreparedSource prepared;
  const auto& src = config.source;
  if (src.kind == SourceConfig::Kind::confusion) {
    prepared.confusions = src.confusions;
  } else {
    const GaussianTupleSpec& test_spec = *src.gaussian;
    const GaussianTupleSpec& train_spec = src.train_gaussian ? *src.train_gaussian : test_spec;
    CounterRng rng = derive_trial_rng(config.seed, kSetupTrial, 0);
    const auto data = draw_dataset(train_spec, static_cast<Eigen::Index>(src.train_per_class), rng);
    prepared.classifier = train_centroid(data);
    prepared.confusions.push_back(
        estimate_confusion(*prepared.classifier, test_spec, src.n_eval, rng));
  }
  for (std::size_t c = 0; c < prepared.confusions.size(); ++c) {
    if (!is_separable(prepared.confusions[c])) {
      prepared.warnings.push_back("classifier channel " + std::to_string(c) +
                                  " is not separable; the test stays level-alpha but may not stop");
    }
  }
  for (const auto& w : prepared.warnings) std::cerr << "warning: " << w << '\n';
  return prepared;
}

LabelStream make_stream(const ExperimentConfig& config, const PreparedSource& prepared,
                        Label theta, CounterRng rng) {
  const auto& cm = prepared.confusions.front();
  if (config.source.kind == SourceConfig::Kind::confusion) {
    return multinomial_stream(cm.row(theta), rng);
  }
  return classified_gaussian_stream(*config.source.gaussian, theta, *prepared.classifier,
                                    cm.num_labels(), rng);
}

json fit_json(const QuadraticFit& fit) {
  json curve = json::array();
  for (const auto& [a, t] : fit.curve) curve.push_back({a, t});
  return {{"c", fit.c}, {"curve", curve}};
}

// ---------------------------------------------------------------------------
// test

ExperimentOutput run_test_mode(const ExperimentConfig& config) {
  const auto prepared = prepare_source(config);
  const auto& cm = prepared.confusions.front();
  const std::size_t num_labels = cm.num_labels();
  if (config.theta >= num_labels) throw std::invalid_argument("theta out of range");
  const double delta = gaps(cm).null_gaps[static_cast<Eigen::Index>(config.theta)];

  TestConfig test;
  test.max_steps = config.max_steps;
  test.evaluator = config.grid_size ? Evaluator::grid(config.grid_size) : Evaluator::exact();

  const std::size_t n_alpha = config.alpha_grid.size();
  std::vector<TestResult> results(n_alpha * config.trials);
  parallel_for(results.size(), config.threads, [&](std::size_t idx) {
    const std::size_t ai = idx / config.trials;
    const std::size_t trial = idx % config.trials;
    TestConfig local = test;
    local.alpha = config.alpha_grid[ai];
    auto stream = make_stream(config, prepared, config.theta, derive_trial_rng(config.seed, trial, ai));
    results[idx] = run_test(stream, local);
  });

  std::ostringstream csv;
  csv << "trial,alpha,stopped,tau,j_hat,log_wealth\n";
  json levels = json::array();
  std::vector<double> mean_taus, log_inv_alpha, fit_alphas;
  for (std::size_t ai = 0; ai < n_alpha; ++ai) {
    const double alpha = config.alpha_grid[ai];
    std::vector<double> taus;
    std::vector<std::size_t> j_counts(num_labels, 0);
    for (std::size_t trial = 0; trial < config.trials; ++trial) {
      const auto& r = results[ai * config.trials + trial];
      const std::uint64_t tau = r.stopped ? r.tau : r.steps_consumed;
      csv << trial << ',' << fmt(alpha) << ',' << (r.stopped ? 1 : 0) << ',' << tau << ','
          << r.j_hat_at_stop << ',' << fmt(r.final_log_wealth) << '\n';
      if (r.stopped) {
        taus.push_back(static_cast<double>(r.tau));
        ++j_counts[r.j_hat_at_stop];
      }
    }
    json level = {{"alpha", alpha},
                  {"trials", config.trials},
                  {"stopped", taus.size()},
                  {"stop_fraction", static_cast<double>(taus.size()) / static_cast<double>(config.trials)}};
    json ratios = json::array();
    for (std::size_t k = 0; k < num_labels; ++k) {
      ratios.push_back(static_cast<double>(j_counts[k]) / static_cast<double>(config.trials));
    }
    level["ratios"] = ratios;
    if (!taus.empty()) {
      level["mean_tau"] = mean(taus);
      level["se_tau"] = standard_error(taus);
      mean_taus.push_back(mean(taus));
      log_inv_alpha.push_back(std::log(1.0 / alpha));
      fit_alphas.push_back(alpha);
    } else {
      level["mean_tau"] = nullptr;
      level["se_tau"] = nullptr;
    }
    if (delta > 0.0) {
      level["tau_bound"] = tau_upper_bound(alpha, delta, num_labels - 1).total;
    }
    levels.push_back(std::move(level));
  }

  json summary = {{"mode", "test"},
                  {"theta", config.theta},
                  {"delta", delta},
                  {"separable", is_separable(cm)},
                  {"confusion", matrix_json(cm)},
                  {"levels", levels},
                  {"warnings", prepared.warnings}};
  if (mean_taus.size() >= 2) {
    summary["pearson_mean_tau_log_inv_alpha"] = pearson_correlation(mean_taus, log_inv_alpha);
  }
  if (delta > 0.0 && !mean_taus.empty()) {
    bool fit_ok = true;
    for (double a : fit_alphas) fit_ok = fit_ok && a * delta < 1.0;
    if (fit_ok) summary["quadratic_fit"] = fit_json(quadratic_fit(fit_alphas, mean_taus, delta));
  }
  return {csv.str(), summary, {}};
}

// ---------------------------------------------------------------------------
// detect

ExperimentOutput run_detect_mode(const ExperimentConfig& config) {
  const auto prepared = prepare_source(config);
  const auto& cm = prepared.confusions.front();
  const std::size_t num_labels = cm.num_labels();
  if (config.pre >= num_labels || config.post >= num_labels) {
    throw std::invalid_argument("pre/post class out of range");
  }
  const double delta = gaps(cm).null_gaps[static_cast<Eigen::Index>(config.post)];
  const std::uint64_t change = config.change_at.value_or(0);

  const std::size_t n_alpha = config.alpha_grid.size();
  std::vector<DetectionRecord> records(n_alpha * config.trials);
  parallel_for(records.size(), config.threads, [&](std::size_t idx) {
    const std::size_t ai = idx / config.trials;
    const std::size_t trial = idx % config.trials;
    CounterRng rng = derive_trial_rng(config.seed, trial, ai);
    LabelStream stream = [&]() {
      if (config.source.kind == SourceConfig::Kind::confusion) {
        const LabelPmf pre_row = cm.row(config.pre);
        const LabelPmf post_row = cm.row(config.post);
        return LabelStream(num_labels, [pre_row, post_row, change, rng,
                                        t = std::uint64_t{0}]() mutable -> std::optional<Label> {
          ++t;
          const bool after = change > 0 && t >= change;
          return inverse_cdf_label(after ? post_row : pre_row, rng.uniform());
        });
      }
      const auto spec = *config.source.gaussian;
      const auto clf = *prepared.classifier;
      return LabelStream(num_labels, [spec, clf, pre = config.pre, post = config.post, change, rng,
                                      t = std::uint64_t{0}]() mutable -> std::optional<Label> {
        ++t;
        const bool after = change > 0 && t >= change;
        return clf(sample(spec, after ? post : pre, rng));
      });
    }();
    records[idx] = run_detector(stream, config.alpha_grid[ai], config.max_steps, config.prune);
  });

  std::ostringstream csv;
  csv << "trial,alpha,alarmed,alarm_time,delay\n";
  json levels = json::array();
  std::vector<double> mean_delays, log_inv_alpha, fit_alphas;
  for (std::size_t ai = 0; ai < n_alpha; ++ai) {
    const double alpha = config.alpha_grid[ai];
    std::vector<double> delays, alarm_times;
    std::size_t false_alarms = 0;
    for (std::size_t trial = 0; trial < config.trials; ++trial) {
      const auto& r = records[ai * config.trials + trial];
      csv << trial << ',' << fmt(alpha) << ',' << (r.alarmed ? 1 : 0) << ',';
      if (r.alarmed) {
        const std::uint64_t delay = change > 0 && r.alarm_time > change ? r.alarm_time - change : 0;
        csv << r.alarm_time << ',' << delay << '\n';
        alarm_times.push_back(static_cast<double>(r.alarm_time));
        if (change > 0) {
          delays.push_back(static_cast<double>(delay));
          if (r.alarm_time < change) ++false_alarms;
        }
      } else {
        csv << r.steps_consumed << ",\n";
      }
    }
    json level = {{"alpha", alpha},
                  {"trials", config.trials},
                  {"alarmed", alarm_times.size()},
                  {"missed", config.trials - alarm_times.size()},
                  {"false_alarms", false_alarms}};
    // Truncated mean: unalarmed runs count at the horizon.
    std::vector<double> truncated = alarm_times;
    truncated.resize(config.trials, static_cast<double>(config.max_steps));
    level["truncated_mean_alarm_time"] = mean(truncated);
    if (!delays.empty()) {
      level["mean_delay"] = mean(delays);
      level["se_delay"] = standard_error(delays);
      mean_delays.push_back(mean(delays));
      log_inv_alpha.push_back(std::log(1.0 / alpha));
      fit_alphas.push_back(alpha);
    }
    levels.push_back(std::move(level));
  }
  json summary = {{"mode", "detect"},
                  {"pre", config.pre},
                  {"post", config.post},
                  {"change_at", config.change_at ? json(change) : json(nullptr)},
                  {"delta", delta},
                  {"confusion", matrix_json(cm)},
                  {"levels", levels},
                  {"warnings", prepared.warnings}};
  if (mean_delays.size() >= 2) {
    summary["pearson_mean_delay_log_inv_alpha"] = pearson_correlation(mean_delays, log_inv_alpha);
  }
  if (delta > 0.0 && !mean_delays.empty()) {
    summary["quadratic_fit"] = fit_json(quadratic_fit(fit_alphas, mean_delays, delta));
    try {
      json lorden = json::array();
      for (double a : fit_alphas) lorden.push_back({a, lorden_delay_lower(a, cm.row(config.post), cm.row(config.pre))});
      summary["lorden_reference"] = lorden;
    } catch (const std::domain_error&) {
    }
  }
  return {csv.str(), summary, {}};
}

// ---------------------------------------------------------------------------
// mixture

ExperimentOutput run_mixture_mode(const ExperimentConfig& config) {
  if (config.source.kind != SourceConfig::Kind::confusion || config.source.confusions.size() < 2) {
    throw std::invalid_argument("mixture mode needs at least two confusion-matrix channels");
  }
  const auto prepared = prepare_source(config);
  const auto& channels = prepared.confusions;
  const std::size_t n_channels = channels.size();
  std::vector<LabelPmf> rows;
  for (const auto& cm : channels) {
    if (config.theta >= cm.num_labels()) throw std::invalid_argument("theta out of range");
    rows.push_back(cm.row(config.theta));
  }
  TestConfig test;
  test.max_steps = config.max_steps;
  test.evaluator = config.grid_size ? Evaluator::grid(config.grid_size) : Evaluator::exact();

  // Per trial: the mixture plus each channel alone on the identical label sequence.
  struct TrialOut {
    MixtureTestResult mixture;
    std::vector<TestResult> singles;
  };
  const std::size_t n_alpha = config.alpha_grid.size();
  std::vector<TrialOut> out(n_alpha * config.trials);
  parallel_for(out.size(), config.threads, [&](std::size_t idx) {
    const std::size_t ai = idx / config.trials;
    const std::size_t trial = idx % config.trials;
    TestConfig local = test;
    local.alpha = config.alpha_grid[ai];
    const CounterRng rng = derive_trial_rng(config.seed, trial, ai);
    auto coupled = coupled_multinomial_stream(rows, rng);
    out[idx].mixture = run_mixture_test(coupled, config.weights, local);
    for (std::size_t c = 0; c < n_channels; ++c) {
      auto single = multinomial_stream(rows[c], rng);
      out[idx].singles.push_back(run_test(single, local));
    }
  });

  std::ostringstream csv;
  csv << "trial,alpha,variant,stopped,tau,log_wealth\n";
  json levels = json::array();
  for (std::size_t ai = 0; ai < n_alpha; ++ai) {
    const double alpha = config.alpha_grid[ai];
    std::vector<double> mix_taus;
    std::vector<std::vector<double>> single_taus(n_channels);
    for (std::size_t trial = 0; trial < config.trials; ++trial) {
      const auto& t = out[ai * config.trials + trial];
      csv << trial << ',' << fmt(alpha) << ",mixture," << (t.mixture.stopped ? 1 : 0) << ','
          << t.mixture.tau << ',' << fmt(t.mixture.final_log_wealth) << '\n';
      if (t.mixture.stopped) mix_taus.push_back(static_cast<double>(t.mixture.tau));
      for (std::size_t c = 0; c < n_channels; ++c) {
        const auto& s = t.singles[c];
        csv << trial << ',' << fmt(alpha) << ",single_" << c << ',' << (s.stopped ? 1 : 0) << ','
            << (s.stopped ? s.tau : s.steps_consumed) << ',' << fmt(s.final_log_wealth) << '\n';
        if (s.stopped) single_taus[c].push_back(static_cast<double>(s.tau));
      }
    }
    json level = {{"alpha", alpha},
                  {"trials", config.trials},
                  {"mixture_stopped", mix_taus.size()},
                  {"mixture_stop_fraction",
                   static_cast<double>(mix_taus.size()) / static_cast<double>(config.trials)},
                  {"mixture_mean_tau", mix_taus.empty() ? json(nullptr) : json(mean(mix_taus))}};
    json singles = json::array();
    for (std::size_t c = 0; c < n_channels; ++c) {
      singles.push_back(
          {{"channel", c},
           {"stopped", single_taus[c].size()},
           {"stop_fraction",
            static_cast<double>(single_taus[c].size()) / static_cast<double>(config.trials)},
           {"mean_tau", single_taus[c].empty() ? json(nullptr) : json(mean(single_taus[c]))}});
    }
    level["singles"] = singles;
    levels.push_back(std::move(level));
  }
  json confusions = json::array();
  for (const auto& cm : channels) confusions.push_back(matrix_json(cm));
  json summary = {{"mode", "mixture"},     {"theta", config.theta},
                  {"weights", config.weights}, {"coupling", "shared-uniform"},
                  {"confusions", confusions},  {"levels", levels},
                  {"warnings", prepared.warnings}};
  return {csv.str(), summary, {}};
}

// ---------------------------------------------------------------------------
// erm

ExperimentOutput run_erm_mode(const ExperimentConfig& config) {
  if (config.source.kind != SourceConfig::Kind::gaussian) {
    throw std::invalid_argument("erm mode needs a gaussian source");
  }
  const GaussianTupleSpec& spec = *config.source.gaussian;
  if (spec.num_labels() != 2) throw std::invalid_argument("threshold ERM supports two classes");
  const auto family = threshold_family(config.threshold_lo, config.threshold_hi, config.threshold_count);
  const auto classifiers = as_classifiers(family);

  struct RepeatOut {
    ErmResult erm;
    double true_gap = 0.0;
  };
  std::vector<RepeatOut> out(config.trials);
  parallel_for(config.trials, config.threads, [&](std::size_t rep) {
    CounterRng rng = derive_trial_rng(config.seed, rep, 0);
    const auto data = draw_dataset(spec, static_cast<Eigen::Index>(config.source.train_per_class), rng);
    out[rep].erm = erm_max_gap(classifiers, data);
    const auto cm = estimate_confusion(classifiers[out[rep].erm.index], spec, config.source.n_eval, rng);
    out[rep].true_gap = gaps(cm).min_pairwise_gap;
  });

  std::ostringstream csv;
  csv << "repeat,index,threshold,empirical_gap,estimated_true_gap,separable\n";
  std::size_t separable = 0;
  for (std::size_t rep = 0; rep < config.trials; ++rep) {
    const auto& r = out[rep];
    const bool ok = r.true_gap > 0.0;
    separable += ok ? 1 : 0;
    csv << rep << ',' << r.erm.index << ',' << fmt(family[r.erm.index].threshold) << ','
        << fmt(r.erm.gap) << ',' << fmt(r.true_gap) << ',' << (ok ? 1 : 0) << '\n';
  }
  json summary = {{"mode", "erm"},
                  {"repeats", config.trials},
                  {"train_per_class", config.source.train_per_class},
                  {"family_size", family.size()},
                  {"separable_fraction",
                   static_cast<double>(separable) / static_cast<double>(config.trials)}};
  return {csv.str(), summary, {}};
}

Mode mode_or_throw(const json& doc) { return parse_mode(doc.at("mode").get<std::string>()); }

}  // namespace

Mode parse_mode(const std::string& name) {
  if (name == "test") return Mode::test;
  if (name == "detect") return Mode::detect;
  if (name == "mixture") return Mode::mixture;
  if (name == "erm") return Mode::erm;
  if (name == "bounds") return Mode::bounds;
  throw std::invalid_argument("unknown mode '" + name + "'");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::test: return "test";
    case Mode::detect: return "detect";
    case Mode::mixture: return "mixture";
    case Mode::erm: return "erm";
    case Mode::bounds: return "bounds";
  }
  return "?";
}

ConfusionMatrix builtin_confusion(const std::string& name) {
  if (name == "gaussian_three_class") return published::gaussian_three_class();
  if (name == "cifar_three_class") return published::cifar_three_class();
  if (name == "mismatch_train") return published::mismatch_train();
  if (name == "mismatch_test") return published::mismatch_test();
  if (name == "change_detection") return published::change_detection();
  if (name == "mixture_strong") return published::mixture_strong();
  if (name == "mixture_weak") return published::mixture_weak();
  throw std::invalid_argument("unknown builtin confusion matrix '" + name + "'");
}

CounterRng derive_trial_rng(std::uint64_t base_seed, std::uint64_t trial, std::uint64_t alpha_index) {
  const std::uint64_t seed_key = CounterRng::mix(base_seed + 0x9e3779b97f4a7c15ULL);
  const std::uint64_t cell = CounterRng::mix((trial << 24) ^ alpha_index ^ 0xa5a5a5a5a5a5a5a5ULL);
  return CounterRng(CounterRng::mix(seed_key ^ cell));
}

void ExperimentConfig::validate() const {
  if (mode == Mode::bounds) {
    if (!bounds.is_object()) throw std::invalid_argument("bounds mode needs a bounds request");
    return;
  }
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (mode != Mode::erm) {
    if (alpha_grid.empty()) throw std::invalid_argument("alpha grid is empty");
    for (double a : alpha_grid) {
      if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("alpha grid values must lie in (0, 1)");
    }
    if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  }
  if (source.kind == SourceConfig::Kind::confusion && source.confusions.empty()) {
    throw std::invalid_argument("confusion source has no matrix");
  }
  if (source.kind == SourceConfig::Kind::gaussian && !source.gaussian) {
    throw std::invalid_argument("gaussian source has no spec");
  }
  if (mode == Mode::mixture) {
    if (weights.size() != source.confusions.size()) {
      throw std::invalid_argument("mixture needs one weight per classifier channel");
    }
    validate_weights(weights);
  }
}

std::vector<double> parse_alpha_grid(const json& doc) {
  if (doc.is_array()) return doc.get<std::vector<double>>();
  if (doc.is_number()) return {doc.get<double>()};
  if (doc.contains("geom")) {
    const auto& g = doc.at("geom");
    return geomspace(g.at(0).get<double>(), g.at(1).get<double>(), g.at(2).get<std::size_t>());
  }
  if (doc.contains("linear")) {
    const auto& g = doc.at("linear");
    return linspace(g.at(0).get<double>(), g.at(1).get<double>(), g.at(2).get<std::size_t>());
  }
  throw std::invalid_argument("alpha_grid must be a list, {\"geom\": [...]}, or {\"linear\": [...]}");
}

ExperimentConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  c.mode = mode_or_throw(doc);
  c.name = doc.value("name", to_string(c.mode));
  if (doc.contains("source")) {
    const auto& src = doc.at("source");
    const auto kind = src.value("kind", std::string("confusion"));
    if (kind == "confusion") {
      c.source.kind = SourceConfig::Kind::confusion;
      if (src.contains("confusion")) c.source.confusions.push_back(confusion_from_ref(src.at("confusion"), base_dir));
      if (src.contains("confusions")) {
        for (const auto& ref : src.at("confusions")) c.source.confusions.push_back(confusion_from_ref(ref, base_dir));
      }
    } else if (kind == "gaussian") {
      c.source.kind = SourceConfig::Kind::gaussian;
      c.source.gaussian = gaussian_from_ref(src.at("gaussian"), base_dir);
      if (src.contains("train_gaussian")) c.source.train_gaussian = gaussian_from_ref(src.at("train_gaussian"), base_dir);
      c.source.train_per_class = src.value("train_per_class", c.source.train_per_class);
      c.source.n_eval = src.value("n_eval", c.source.n_eval);
    } else {
      throw std::invalid_argument("unknown source kind '" + kind + "'");
    }
  }
  if (doc.contains("alpha_grid")) c.alpha_grid = parse_alpha_grid(doc.at("alpha_grid"));
  c.trials = doc.value("trials", c.trials);
  c.max_steps = doc.value("max_steps", c.max_steps);
  c.seed = doc.value("seed", c.seed);
  c.theta = doc.value("theta", c.theta);
  c.pre = doc.value("pre", c.pre);
  c.post = doc.value("post", c.post);
  if (doc.contains("change_at") && !doc.at("change_at").is_null()) {
    c.change_at = doc.at("change_at").get<std::uint64_t>();
  }
  if (doc.contains("weights")) c.weights = doc.at("weights").get<std::vector<double>>();
  if (doc.contains("prune") && !doc.at("prune").is_null()) c.prune = doc.at("prune").get<std::size_t>();
  c.grid_size = doc.value("grid_size", c.grid_size);
  c.threads = doc.value("threads", c.threads);
  if (doc.contains("out_dir")) c.out_dir = resolve(base_dir, doc.at("out_dir").get<std::string>());
  if (doc.contains("thresholds")) {
    const auto& t = doc.at("thresholds");
    c.threshold_lo = t.at(0).get<double>();
    c.threshold_hi = t.at(1).get<double>();
    c.threshold_count = t.at(2).get<std::size_t>();
  }
  if (doc.contains("bounds")) c.bounds = doc.at("bounds");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return config_from_json(json::parse(read_file(path)), path.parent_path());
}

json to_json(const ExperimentConfig& c) {
  json doc = {{"name", c.name},
              {"mode", to_string(c.mode)},
              {"alpha_grid", c.alpha_grid},
              {"trials", c.trials},
              {"max_steps", c.max_steps},
              {"seed", c.seed},
              {"theta", c.theta},
              {"pre", c.pre},
              {"post", c.post},
              {"change_at", c.change_at ? json(*c.change_at) : json(nullptr)},
              {"weights", c.weights},
              {"prune", c.prune ? json(*c.prune) : json(nullptr)},
              {"grid_size", c.grid_size},
              {"threads", c.threads},
              {"thresholds", {c.threshold_lo, c.threshold_hi, c.threshold_count}}};
  json src;
  if (c.source.kind == SourceConfig::Kind::confusion) {
    src["kind"] = "confusion";
    src["confusions"] = json::array();
    for (const auto& cm : c.source.confusions) src["confusions"].push_back(matrix_json(cm));
  } else {
    src["kind"] = "gaussian";
    src["gaussian"] = json::parse(to_json(*c.source.gaussian));
    if (c.source.train_gaussian) src["train_gaussian"] = json::parse(to_json(*c.source.train_gaussian));
    src["train_per_class"] = c.source.train_per_class;
    src["n_eval"] = c.source.n_eval;
  }
  doc["source"] = src;
  if (!c.bounds.is_null()) doc["bounds"] = c.bounds;
  return doc;
}

json evaluate_bounds(const json& request) {
  const auto kind = request.at("kind").get<std::string>();
  auto num = [&](const char* key) { return request.at(key).get<double>(); };
  if (kind == "tau") {
    const auto r = tau_upper_bound(num("alpha"), num("delta"), request.at("L").get<std::uint64_t>());
    return {{"kind", kind}, {"n0", r.n0}, {"n1", r.n1}, {"alpha_term", r.alpha_term},
            {"constant", r.constant}, {"total", r.total}};
  }
  if (kind == "training-size") {
    Eigen::MatrixXd j;
    if (request.contains("gaussian")) {
      const auto spec = gaussian_spec_from_json(request.at("gaussian").dump());
      const auto n = static_cast<Eigen::Index>(spec.num_labels());
      j = Eigen::MatrixXd::Zero(n, n);
      for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
          if (a != b) {
            j(a, b) = j_symmetrized_gaussian_diag(spec.means[static_cast<std::size_t>(a)],
                                                  spec.means[static_cast<std::size_t>(b)], spec.variances);
          }
        }
      }
    } else {
      const auto rows = request.at("j").get<std::vector<std::vector<double>>>();
      const auto n = static_cast<Eigen::Index>(rows.size());
      j.resize(n, n);
      for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) j(a, b) = rows.at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(b));
      }
    }
    return {{"kind", kind}, {"min_training_size", min_training_size(num("alpha"), j)}};
  }
  if (kind == "mismatch") {
    const auto train = confusion_from_ref(request.at("train"), {});
    const auto metric = parse_divergence(request.value("metric", std::string("kl")));
    const auto report = gaps(train);
    json out = {{"kind", kind}, {"metric", to_string(metric)},
                {"min_pairwise_gap", report.min_pairwise_gap},
                {"tolerance", mismatch_tolerance(report, metric)}};
    if (request.contains("test")) {
      const auto test = confusion_from_ref(request.at("test"), {});
      const double eps = max_row_divergence(train, test, metric);
      out["max_row_divergence"] = eps;
      out["within_tolerance"] = eps < mismatch_tolerance(report, metric);
      const auto test_gaps = gaps(test);
      json env = json::array();
      if (eps <= mismatch_tolerance(report, metric)) {
        const auto intervals = tilde_delta_envelope(report, eps, metric);
        for (std::size_t t = 0; t < intervals.size(); ++t) {
          const double measured = test_gaps.null_gaps[static_cast<Eigen::Index>(t)];
          env.push_back({{"theta", t}, {"lo", intervals[t].lo}, {"hi", intervals[t].hi},
                         {"measured", measured}, {"inside", intervals[t].contains(measured)}});
        }
      }
      out["envelope"] = env;
    }
    return out;
  }
  if (kind == "vc") {
    return {{"kind", kind},
            {"sample_size", vc_sample_size(num("gamma"), num("d"), request.at("L").get<std::uint64_t>(), num("delta"))}};
  }
  if (kind == "minimax") {
    return {{"kind", kind},
            {"log_psi_lower", minimax_log_psi_lower(num("n"), num("alpha"), num("max_kl"), num("B"), num("N"),
                                                    num("M"), request.at("L").get<std::uint64_t>(), num("delta"))}};
  }
  if (kind == "lorden") {
    const auto cm = confusion_from_ref(request.at("confusion"), {});
    const auto pre = request.value("pre", std::size_t{0});
    const auto post = request.value("post", std::size_t{1});
    return {{"kind", kind}, {"delay_lower", lorden_delay_lower(num("alpha"), cm.row(post), cm.row(pre))}};
  }
  throw std::invalid_argument("unknown bounds kind '" + kind + "'");
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentOutput output;
  switch (config.mode) {
    case Mode::test: output = run_test_mode(config); break;
    case Mode::detect: output = run_detect_mode(config); break;
    case Mode::mixture: output = run_mixture_mode(config); break;
    case Mode::erm: output = run_erm_mode(config); break;
    case Mode::bounds:
      output.summary = evaluate_bounds(config.bounds);
      break;
  }
  output.summary["name"] = config.name;

  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream stamp;
  stamp << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  output.meta = {{"config", to_json(config)},
                 {"generator", std::string(CounterRng::kGeneratorId)},
                 {"seed", config.seed},
                 {"trial_key_derivation",
                  "mix(mix(seed + 0x9e3779b97f4a7c15) ^ mix((trial << 24) ^ alpha_index ^ 0xa5a5a5a5a5a5a5a5))"},
                 {"version", kVersion},
                 {"timestamp", stamp.str()}};

  if (!config.out_dir.empty()) write_outputs(output, config.out_dir);
  return output;
}

void write_outputs(const ExperimentOutput& output, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << text;
  };
  if (!output.results_csv.empty()) write("results.csv", output.results_csv);
  write("summary.json", output.summary.dump(2) + "\n");
  write("meta.json", output.meta.dump(2) + "\n");
}

std::vector<std::string> recipe_names() {
  return {"fig1", "fig1-cifar", "fig2", "fig3", "fig4", "fig5"};
}

std::vector<ExperimentConfig> recipe(const std::string& name) {
  const auto fig1_grid = geomspace(1e-3, 1e-1, 10);
  auto base_test = [&](const std::string& label, ConfusionMatrix cm, Label theta) {
    ExperimentConfig c;
    c.name = label;
    c.mode = Mode::test;
    c.source.confusions = {std::move(cm)};
    c.alpha_grid = fig1_grid;
    c.trials = 300;
    c.max_steps = 100000;
    c.theta = theta;
    return c;
  };
  if (name == "fig1" || name == "fig2") {
    return {base_test(name, published::gaussian_three_class(), 2)};
  }
  if (name == "fig1-cifar") return {base_test(name, published::cifar_three_class(), 2)};
  if (name == "fig3") {
    return {base_test("fig3-matched", published::mismatch_train(), 1),
            base_test("fig3-shifted", published::mismatch_test(), 1)};
  }
  if (name == "fig4") {
    ExperimentConfig c;
    c.name = name;
    c.mode = Mode::detect;
    c.source.confusions = {published::change_detection()};
    c.alpha_grid = geomspace(1e-4, 1e-3, 50);
    c.trials = 500;
    c.max_steps = 100000;
    c.pre = 0;
    c.post = 1;
    c.change_at = 10;
    return {c};
  }
  if (name == "fig5") {
    ExperimentConfig c;
    c.name = name;
    c.mode = Mode::mixture;
    c.source.confusions = {published::mixture_weak(), published::mixture_strong()};
    c.weights = {0.1, 0.9};
    c.alpha_grid = fig1_grid;
    c.trials = 300;
    c.max_steps = 100000;
    c.theta = 2;
    ExperimentConfig null = c;
    null.name = "fig5-null";
    null.theta = 0;
    null.alpha_grid = {0.1};
    null.trials = 2000;
    null.max_steps = 10000;
    return {c, null};
  }
  throw std::invalid_argument("unknown recipe '" + name + "'");
}

}  // namespace evertest
