#include "evertest/eprocess.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "evertest/classifier_sim.hpp"
#include "evertest/published_tables.hpp"
#include "oracles.hpp"

namespace evertest {
namespace {

double rel_err(double x, double ref) { return std::fabs(x - ref) / std::fabs(ref); }

TEST(SelectJ, Examples) {
  const std::vector<std::uint64_t> zero{0, 0, 0}, tie{3, 5, 5}, unique{2, 7, 1};
  EXPECT_EQ(select_j(zero), 0u);
  EXPECT_EQ(select_j(tie), 1u);
  EXPECT_EQ(select_j(unique), 1u);
}

TEST(Step, HandTrace) {
  auto s = step(make_engine(2), 1);
  EXPECT_EQ(s.bet, (BetCounts{0, 0}));
  EXPECT_EQ(s.label_counts, (std::vector<std::uint64_t>{0, 1}));

  Label j = advance(s, 1);
  EXPECT_EQ(j, 1u);
  EXPECT_EQ(s.bet, (BetCounts{0, 1}));
  EXPECT_EQ(s.label_counts, (std::vector<std::uint64_t>{0, 2}));

  EngineState null_side = make_engine(2);
  null_side.label_counts = {5, 1};
  null_side.steps = 6;
  EXPECT_EQ(advance(null_side, 0), 0u);
  EXPECT_EQ(null_side.bet, (BetCounts{0, 0}));
}

TEST(Step, RejectsBadLabel) {
  auto s = make_engine(3);
  EXPECT_THROW(advance(s, 3), std::out_of_range);
}

TEST(Step, Deterministic) {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<Label> pick(0, 2);
  auto a = make_engine(3, 16), b = make_engine(3, 16);
  for (int t = 0; t < 500; ++t) {
    const Label x = pick(gen);
    advance(a, x);
    advance(b, x);
    ASSERT_EQ(a.label_counts, b.label_counts);
    ASSERT_EQ(a.bet, b.bet);
    ASSERT_EQ(a.grid_log_products, b.grid_log_products);
  }
}

TEST(WealthExact, SmallCases) {
  EXPECT_DOUBLE_EQ(wealth_exact({0, 0}).value, 1.0);
  EXPECT_DOUBLE_EQ(wealth_exact({1, 0}).value, 0.5);
  EXPECT_DOUBLE_EQ(wealth_exact({0, 1}).value, 1.5);
  EXPECT_NEAR(wealth_exact({1, 1}).value, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(wealth_exact({0, 2}).value, 7.0 / 3.0, 1e-15);
}

TEST(WealthExact, MatchesQuadrature) {
  const double ref = static_cast<double>(oracle::wealth_quadrature(2, 5));
  EXPECT_LE(rel_err(wealth_exact({2, 5}).value, ref), 1e-10);
  for (unsigned a = 0; a <= 20; ++a) {
    for (unsigned b = 0; a + b <= 20; ++b) {
      const double q = static_cast<double>(oracle::wealth_quadrature(a, b));
      EXPECT_LE(rel_err(wealth_exact({a, b}).value, q), 1e-10) << a << "," << b;
    }
  }
}

TEST(WealthExact, LogStaysFiniteWhenValueSaturates) {
  const auto w = wealth_exact({10, 5000});
  EXPECT_TRUE(std::isinf(w.value));
  EXPECT_TRUE(std::isfinite(w.log_value));
  // Large b: W ~ 2^(b+1)/(b+1) dominated near u = 1.
  EXPECT_GT(w.log_value, 3000.0);
  const auto big_a = wealth_exact({100000, 0});
  EXPECT_NEAR(big_a.value, 1.0 / 100001.0, 1e-18);
}

TEST(WealthExact, Monotone) {
  for (std::uint64_t a = 0; a < 40; ++a) {
    for (std::uint64_t b = 0; b < 40; ++b) {
      EXPECT_LT(wealth_exact({a, b}).log_value, wealth_exact({a, b + 1}).log_value);
      EXPECT_GT(wealth_exact({a, b}).log_value, wealth_exact({a + 1, b}).log_value);
    }
  }
}

TEST(WealthGrid, Examples) {
  EXPECT_DOUBLE_EQ(wealth_grid(make_engine(2, 7)).value, 1.0);

  auto single = make_engine(2, 1);
  for (int t = 0; t < 4; ++t) advance(single, 1);  // first step is neutral
  EXPECT_EQ(single.bet, (BetCounts{0, 3}));
  EXPECT_NEAR(wealth_grid(single).value, 3.375, 1e-12);

  auto s = make_engine(2, 1024);
  for (int t = 0; t < 11; ++t) advance(s, 1);
  EXPECT_EQ(s.bet, (BetCounts{0, 10}));
  EXPECT_LE(rel_err(wealth_grid(s).value, wealth_exact(s.bet).value), 1e-3);
  EXPECT_THROW(wealth_grid(make_engine(2)), std::logic_error);
}

TEST(WealthGrid, ConsistentOnRandomPaths) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<Label> pick(0, 2);
  for (int rep = 0; rep < 30; ++rep) {
    auto s = make_engine(3, 1024);
    for (int t = 0; t < 200; ++t) {
      advance(s, pick(gen));
      if (s.bet.null_hits + s.bet.target_hits > 200) break;
      ASSERT_LE(rel_err(wealth_grid(s).value, wealth_exact(s.bet).value), 1e-3);
    }
  }
}

TEST(Wealth, DependsOnlyOnBetCounts) {
  // Two different histories reaching the same (a, b).
  auto x = make_engine(2), y = make_engine(2);
  for (Label l : {1, 1, 0, 1, 0}) advance(x, l);
  for (Label l : {1, 1, 1, 0, 0}) advance(y, l);
  ASSERT_EQ(x.bet, y.bet);
  EXPECT_EQ(wealth_exact(x.bet).value, wealth_exact(y.bet).value);
}

TEST(Mixture, Examples) {
  auto s = make_engine(3);
  for (Label l : {2, 2, 0, 2, 1}) advance(s, l);
  const std::vector<EngineState> one{s};
  const std::vector<double> w1{1.0};
  EXPECT_DOUBLE_EQ(mixture_wealth(one, w1).value, wealth_exact(s.bet).value);

  const std::vector<EngineState> two{s, s};
  const std::vector<double> half{0.5, 0.5};
  EXPECT_NEAR(mixture_wealth(two, half).value, wealth_exact(s.bet).value, 1e-14);

  auto t = make_engine(3);
  for (Label l : {1, 1, 0, 0, 0}) advance(t, l);
  const std::vector<EngineState> pair{s, t};
  const std::vector<double> w{0.1, 0.9};
  EXPECT_NEAR(mixture_wealth(pair, w).value,
              0.1 * wealth_exact(s.bet).value + 0.9 * wealth_exact(t.bet).value, 1e-14);

  const std::vector<double> bad{0.5, 0.6};
  EXPECT_THROW(mixture_wealth(pair, bad), std::invalid_argument);
  const std::vector<double> negative{-0.1, 1.1};
  EXPECT_THROW(mixture_wealth(pair, negative), std::invalid_argument);
}

TEST(Threshold, LinearAndLogComparison) {
  EXPECT_TRUE(crosses_threshold({2.0, std::log(2.0)}, 0.5));
  EXPECT_FALSE(crosses_threshold({1.5, std::log(1.5)}, 0.5));
  EXPECT_TRUE(crosses_threshold(wealth_exact({0, 5000}), 1e-300));
}

TEST(LogSumExp, Basics) {
  const std::vector<double> xs{std::log(1.0), std::log(3.0)};
  EXPECT_NEAR(log_sum_exp(xs), std::log(4.0), 1e-15);
  EXPECT_EQ(log_sum_exp(std::vector<double>{}), -INFINITY);
}

TEST(Trajectory, CsvHeader) {
  std::ostringstream os;
  const std::vector<TrajectoryRow> rows{{1, 1, 0, {0, 0}, 0.0}};
  write_trajectory_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "step,label,j_hat,a,b,log_wealth");
}

// Null side: E[W_n] <= 1 for labels drawn from row 0 of a separable matrix.
TEST(Properties, SupermartingaleUnderNull) {
  const auto row = published::gaussian_three_class().row(0);
  constexpr int kReps = 10000;
  for (int n : {10, 50, 200}) {
    double sum = 0.0, sum_sq = 0.0;
    for (int r = 0; r < kReps; ++r) {
      auto stream = multinomial_stream(row, CounterRng(CounterRng::mix(1000003ULL * n + r)));
      auto s = make_engine(3);
      for (int t = 0; t < n; ++t) advance(s, *stream.next());
      const double w = wealth_exact(s.bet).value;
      sum += w;
      sum_sq += w * w;
    }
    const double mean = sum / kReps;
    const double se = std::sqrt((sum_sq / kReps - mean * mean) / (kReps - 1));
    EXPECT_LE(mean, 1.0 + 3.0 * se) << "n=" << n;
  }
}

// Alternative side: ln W_n / n at n = 2000 stays above Delta^2/32.
TEST(Properties, GrowthUnderAlternative) {
  const auto cm = published::gaussian_three_class();
  const double delta = 0.35503;
  for (int r = 0; r < 20; ++r) {
    auto stream = multinomial_stream(cm.row(2), CounterRng(CounterRng::mix(77 + r)));
    auto s = make_engine(3);
    for (int t = 0; t < 2000; ++t) advance(s, *stream.next());
    EXPECT_GE(wealth_exact(s.bet).log_value / 2000.0, delta * delta / 32.0);
  }
}

}  // namespace
}  // namespace evertest
