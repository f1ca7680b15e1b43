#include "evertest/sequential_test.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "evertest/classifier_sim.hpp"
#include "evertest/published_tables.hpp"

namespace evertest {
namespace {

TEST(RunTest, HandTracedStop) {
  auto stream = LabelStream::constant(2, 1);
  TestConfig config;
  config.alpha = 0.5;
  config.record_trajectory = true;
  const auto r = run_test(stream, config);
  ASSERT_TRUE(r.stopped);
  EXPECT_EQ(r.tau, 3u);
  EXPECT_EQ(r.j_hat_at_stop, 1u);
  EXPECT_EQ(stream.consumed(), 3u);
  ASSERT_EQ(r.trajectory.size(), 3u);
  EXPECT_DOUBLE_EQ(std::exp(r.trajectory[0].log_wealth), 1.0);
  EXPECT_NEAR(std::exp(r.trajectory[1].log_wealth), 1.5, 1e-15);
  EXPECT_NEAR(std::exp(r.trajectory[2].log_wealth), 7.0 / 3.0, 1e-14);
}

TEST(RunTest, NullStreamNeverStops) {
  auto stream = LabelStream::constant(2, 0);
  TestConfig config;
  config.alpha = 0.5;
  config.max_steps = 10000;
  const auto r = run_test(stream, config);
  EXPECT_FALSE(r.stopped);
  EXPECT_EQ(r.steps_consumed, 10000u);
  EXPECT_LE(r.final_log_wealth, 0.0);
}

TEST(RunTest, LargeAlphaStopsAtTwo) {
  auto stream = LabelStream::constant(2, 1);
  TestConfig config;
  config.alpha = 0.99;
  const auto r = run_test(stream, config);
  EXPECT_TRUE(r.stopped);
  EXPECT_EQ(r.tau, 2u);
}

TEST(RunTest, ExhaustedStreamEndsUnstopped) {
  auto stream = LabelStream::from_labels(2, {1, 1});
  TestConfig config;
  config.alpha = 0.01;
  const auto r = run_test(stream, config);
  EXPECT_FALSE(r.stopped);
  EXPECT_EQ(r.steps_consumed, 2u);
}

TEST(RunTest, ConfigValidation) {
  TestConfig config;
  config.alpha = 1.0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config.alpha = 0.1;
  config.max_steps = 0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
}

TEST(RunTest, GridEvaluatorAgreesOnHandTrace) {
  auto stream = LabelStream::constant(2, 1);
  TestConfig config;
  config.alpha = 0.5;
  config.evaluator = Evaluator::grid(4096);
  EXPECT_EQ(run_test(stream, config).tau, 3u);
}

TEST(Identification, Examples) {
  auto all_two = LabelStream::constant(3, 2);
  EXPECT_EQ(identification_trace(all_two, 4), (std::vector<Label>{0, 2, 2, 2}));
  auto alternating = LabelStream::from_labels(2, {0, 1, 0, 1, 0, 1});
  EXPECT_EQ(identification_trace(alternating, 6), (std::vector<Label>(6, 0)));
}

TEST(Identification, MisidentificationDecays) {
  const auto row = published::gaussian_three_class().row(2);
  constexpr int kReps = 2000;
  const std::vector<std::size_t> checkpoints{10, 50, 200};
  std::vector<int> wrong(checkpoints.size(), 0);
  for (int r = 0; r < kReps; ++r) {
    auto stream = multinomial_stream(row, CounterRng(CounterRng::mix(900 + r)));
    const auto trace = identification_trace(stream, 200);
    for (std::size_t c = 0; c < checkpoints.size(); ++c) wrong[c] += trace[checkpoints[c] - 1] != 2;
  }
  EXPECT_GT(wrong[0], wrong[1]);
  EXPECT_GT(wrong[1], wrong[2]);
}

TEST(RunTest, Deterministic) {
  const auto row = published::gaussian_three_class().row(2);
  TestConfig config;
  config.alpha = 1e-3;
  auto s1 = multinomial_stream(row, CounterRng(42));
  auto s2 = multinomial_stream(row, CounterRng(42));
  const auto a = run_test(s1, config);
  const auto b = run_test(s2, config);
  EXPECT_EQ(a.tau, b.tau);
  EXPECT_EQ(a.j_hat_at_stop, b.j_hat_at_stop);
  EXPECT_EQ(a.final_log_wealth, b.final_log_wealth);
}

TEST(RunTest, PowerOneProxy) {
  const auto row = published::gaussian_three_class().row(2);
  TestConfig config;
  config.alpha = 1e-3;
  config.max_steps = 10000;
  for (int r = 0; r < 300; ++r) {
    auto stream = multinomial_stream(row, CounterRng(CounterRng::mix(5000 + r)));
    ASSERT_TRUE(run_test(stream, config).stopped) << r;
  }
}

TEST(Mixture, SingleChannelMatchesPlainTest) {
  const auto row = published::gaussian_three_class().row(2);
  TestConfig config;
  config.alpha = 0.01;
  auto coupled = coupled_multinomial_stream({row}, CounterRng(9));
  auto plain = multinomial_stream(row, CounterRng(9));
  const auto m = run_mixture_test(coupled, {1.0}, config);
  const auto p = run_test(plain, config);
  EXPECT_EQ(m.stopped, p.stopped);
  EXPECT_EQ(m.tau, p.tau);
  EXPECT_NEAR(m.final_log_wealth, p.final_log_wealth, 1e-12);
}

TEST(Mixture, RejectsBadWeights) {
  const auto row = published::gaussian_three_class().row(2);
  auto coupled = coupled_multinomial_stream({row, row}, CounterRng(9));
  TestConfig config;
  EXPECT_THROW(run_mixture_test(coupled, {0.5}, config), std::invalid_argument);
  EXPECT_THROW(run_mixture_test(coupled, {0.7, 0.7}, config), std::invalid_argument);
}

}  // namespace
}  // namespace evertest
