#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "polytame/metrics.hpp"
#include "polytame/solve.hpp"

using namespace polytame;

namespace {

std::vector<double> powers_of_ten(int base, int count) {
  std::vector<double> e;
  for (int k = 0; k < count; ++k) e.push_back(std::pow(10.0, -std::pow(base, k)));
  return e;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::precondition;
}

}  // namespace

TEST(EstimateOrder, SyntheticSequences) {
  EXPECT_NEAR(estimate_order(powers_of_ten(2, 6)), 2.0, 1e-6);
  EXPECT_NEAR(estimate_order(powers_of_ten(3, 5)), 3.0, 1e-6);
}

TEST(EstimateOrder, RejectsBadTails) {
  const std::vector<double> short_tail{1e-1, 1e-2, 1e-4};
  EXPECT_EQ(code_of([&] { estimate_order(short_tail); }), Errc::insufficient_data);
  const std::vector<double> zero{1e-1, 1e-2, 0.0, 1e-8};
  EXPECT_EQ(code_of([&] { estimate_order(zero); }), Errc::insufficient_data);
  const std::vector<double> flat{1e-1, 1e-2, 1e-2, 1e-3};
  EXPECT_EQ(code_of([&] { estimate_order(flat); }), Errc::stagnation);
}

TEST(SuperlinearTail, DropsRoundoffAndPreasymptoticEntries) {
  const std::vector<double> raw{0.5, 0.8, 0.3, 1e-2, 1e-4, 1e-8, 1e-16, 1e-17, 3e-17};
  const auto tail = superlinear_tail(raw, 1e-13);
  const std::vector<double> want{1e-2, 1e-4, 1e-8};
  EXPECT_EQ(tail, (std::vector<double>{0.3, 1e-2, 1e-4, 1e-8}));
  EXPECT_EQ(superlinear_tail(raw, 1e-13, 3), want);
  EXPECT_TRUE(superlinear_tail(std::vector<double>{}, 1e-13).empty());
  EXPECT_FALSE(order_from_history(want, 1.0).has_value());
}

TEST(Efficiency, KnownValues) {
  EXPECT_NEAR(efficiency(2.0, 2.0), 1.414, 5e-4);
  EXPECT_NEAR(efficiency(3.0, 3.0), 1.442, 5e-4);
  EXPECT_DOUBLE_EQ(efficiency(1.0, 7.0), 1.0);
  EXPECT_EQ(code_of([] { efficiency(0.5, 2.0); }), Errc::precondition);
  EXPECT_EQ(code_of([] { efficiency(2.0, 0.0); }), Errc::precondition);
}

TEST(Efficiency, Monotonicity) {
  double last = 0.0;
  for (double q = 1.0; q <= 4.0; q += 0.25) {
    const double e = efficiency(q, 2.5);
    EXPECT_GE(e, 1.0);
    EXPECT_GT(e, last);
    last = e;
  }
  last = 1e9;
  for (double alpha = 0.5; alpha <= 5.0; alpha += 0.5) {
    const double e = efficiency(2.0, alpha);
    EXPECT_LT(e, last);
    last = e;
  }
}

TEST(RunMetrics, NewtonOnSqrt2) {
  const Polynomial p({-2.0, 0.0, 1.0});
  const auto report = run(Method::newton, p, {2.0}, StoppingCriterion(1e-15, 0.0, 50));
  ASSERT_TRUE(report.roots[0].order.has_value());
  EXPECT_GE(*report.roots[0].order, 1.7);
  EXPECT_LE(*report.roots[0].order, 2.3);
  EXPECT_DOUBLE_EQ(report.alpha, 2.0);
  ASSERT_TRUE(report.efficiency.has_value());
  EXPECT_DOUBLE_EQ(*report.efficiency, efficiency(*report.order, report.alpha));
}

TEST(RunMetrics, CounterConservation) {
  const Polynomial p({-1.0, 0.0, 0.0, 1.0});
  const std::vector<Complex> init{Complex(1.2, 0.1), Complex(-0.4, 0.9), Complex(-0.6, -0.8)};
  for (auto method : {Method::newton, Method::weierstrass, Method::ehrlich}) {
    const auto report = run(method, p, init, StoppingCriterion(1e-13));
    const double per_pass = method == Method::ehrlich ? 3.0 : 2.0;
    EXPECT_EQ(report.counter.evaluations, static_cast<std::uint64_t>(per_pass) * report.total_passes());
    EXPECT_DOUBLE_EQ(report.alpha, per_pass);
  }
}

TEST(Median, OddAndEven) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_THROW(median({}), Error);
}
