#include "evertest/change_detector.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "evertest/classifier_sim.hpp"
#include "evertest/published_tables.hpp"
#include "evertest/sequential_test.hpp"

namespace evertest {
namespace {

TEST(Detector, FirstNullStepIsNeutral) {
  auto d = make_detector(2);
  EXPECT_DOUBLE_EQ(detector_step(d, 0).value, 1.0);
  EXPECT_EQ(d.starts.size(), 1u);
}

TEST(Detector, HandTrace) {
  auto d = make_detector(2);
  detector_step(d, 1);
  detector_step(d, 1);
  const auto m = detector_step(d, 1);
  EXPECT_NEAR(m.value, 7.0 / 3.0, 1e-14);
}

TEST(Detector, NullStreamStaysBelowOne) {
  auto d = make_detector(3);
  for (int t = 0; t < 100; ++t) EXPECT_LE(detector_step(d, 0).value, 1.0);
}

TEST(Detector, PerfectPostChangeAlarmsAtThree) {
  const LabelPmf post(std::vector<double>{0.0, 1.0});
  auto stream = multinomial_stream(post, CounterRng(1));
  const auto r = run_detector(stream, 0.5, 100);
  ASSERT_TRUE(r.alarmed);
  EXPECT_EQ(r.alarm_time, 3u);
}

TEST(Detector, RestartSemantics) {
  // Long null prefix then label 1: the newest starts back label 1 immediately.
  auto d = make_detector(2);
  for (int t = 0; t < 50; ++t) detector_step(d, 0);
  Wealth m;
  for (int t = 0; t < 3; ++t) m = detector_step(d, 1);
  EXPECT_NEAR(m.value, 7.0 / 3.0, 1e-14);
}

TEST(Detector, PruningNeverRaisesMax) {
  const auto cm = published::change_detection();
  for (int r = 0; r < 50; ++r) {
    CounterRng rng(CounterRng::mix(300 + r));
    auto full = make_detector(2);
    auto pruned = make_detector(2, 8);
    for (int t = 1; t <= 400; ++t) {
      const Label l = inverse_cdf_label(t < 10 ? cm.row(0) : cm.row(1), rng.uniform());
      const auto mf = detector_step(full, l);
      const auto mp = detector_step(pruned, l);
      ASSERT_LE(mp.log_value, mf.log_value + 1e-12);
      ASSERT_LE(pruned.starts.size(), 9u);
    }
  }
}

TEST(Detector, DelayDominatedByPostChangeTest) {
  const auto cm = published::change_detection();
  constexpr std::uint64_t kChange = 10;
  constexpr int kReps = 300;
  double delay_sum = 0.0, tau_sum = 0.0, tau_sq = 0.0;
  for (int r = 0; r < kReps; ++r) {
    const std::uint64_t key = CounterRng::mix(7000 + r);
    auto pre = multinomial_stream(cm.row(0), CounterRng(key ^ 1));
    auto post = multinomial_stream(cm.row(1), CounterRng(key));
    auto stream = LabelStream::switching(std::move(pre), std::move(post), kChange);
    const auto rec = run_detector(stream, 1e-3, 100000);
    ASSERT_TRUE(rec.alarmed);
    delay_sum += rec.alarm_time > kChange ? static_cast<double>(rec.alarm_time - kChange) : 0.0;

    auto post_only = multinomial_stream(cm.row(1), CounterRng(key));
    TestConfig config;
    config.alpha = 1e-3;
    const auto t = run_test(post_only, config);
    ASSERT_TRUE(t.stopped);
    tau_sum += static_cast<double>(t.tau);
    tau_sq += static_cast<double>(t.tau) * static_cast<double>(t.tau);
  }
  const double mean_tau = tau_sum / kReps;
  const double se = std::sqrt((tau_sq / kReps - mean_tau * mean_tau) / (kReps - 1));
  EXPECT_LE(delay_sum / kReps, mean_tau + 3.0 * se);
}

TEST(Detector, PruningBoundsPerStepCost) {
  const auto row = published::change_detection().row(0);
  auto run = [&](std::optional<std::size_t> cap) {
    auto stream = multinomial_stream(row, CounterRng(5));
    auto d = make_detector(2, cap);
    const auto t0 = std::chrono::steady_clock::now();
    for (int t = 0; t < 4000; ++t) detector_step(d, *stream.next());
    const auto elapsed = std::chrono::steady_clock::now() - t0;
    return std::make_pair(d.starts.size(), std::chrono::duration<double>(elapsed).count());
  };
  const auto [full_starts, full_time] = run(std::nullopt);
  const auto [pruned_starts, pruned_time] = run(16);
  EXPECT_EQ(full_starts, 4000u);
  EXPECT_LE(pruned_starts, 17u);
  EXPECT_LT(pruned_time, full_time);
  std::cout << "detector 4000 steps: full " << full_time << " s, cap 16 " << pruned_time << " s\n";
}

TEST(Detector, RejectsBadAlpha) {
  auto stream = LabelStream::constant(2, 0);
  EXPECT_THROW(run_detector(stream, 0.0, 10), std::invalid_argument);
  EXPECT_THROW(make_detector(2, 0), std::invalid_argument);
}

}  // namespace
}  // namespace evertest
