#include <gtest/gtest.h>

#include <cmath>

#include "online_alloc/schedule.hpp"

namespace online_alloc {
namespace {

TEST(Kappa, BoundaryValues) {
  // n = 100, eps = 0.25: w = 25, L = 2.
  EXPECT_EQ(kappa(75, 100, 0.25), 1);
  EXPECT_EQ(kappa(50, 100, 0.25), 2);
  EXPECT_EQ(kappa(1, 100, 0.25), 2);  // floor(log2(99 / 25)) + 1
  EXPECT_THROW(kappa(76, 100, 0.25), std::out_of_range);
  EXPECT_THROW(kappa(0, 100, 0.25), std::out_of_range);
}

TEST(Eta, BucketEdges) {
  // n = 160, eps = 0.05: w = 8.
  EXPECT_EQ(eta(9, 160, 0.05), 1);
  EXPECT_EQ(eta(16, 160, 0.05), 1);
  EXPECT_EQ(eta(17, 160, 0.05), 2);
  EXPECT_EQ(eta(33, 160, 0.05), 3);
  EXPECT_EQ(eta(160, 160, 0.05), 5);  // clamped to L = 5
  EXPECT_THROW(eta(8, 160, 0.05), std::out_of_range);
}

TEST(Theta, Values) {
  EXPECT_NEAR(theta(0, 0.25), 0.35355339059327373, 1e-15);
  EXPECT_NEAR(theta(1, 0.25), 0.25, 1e-15);
  EXPECT_NEAR(theta(3, 0.05), 0.25 * std::sqrt(0.05), 1e-15);
}

TEST(Schedule, StepSizes) {
  const Schedule s = build_schedule(1000, 0.1, 0.01);
  EXPECT_NEAR(s.nu(), 9.531017980432486, 1e-12);
  EXPECT_NEAR(s.nu_prime(), 10.536051565782628, 1e-12);
}

TEST(Schedule, BetaClosedForm) {
  const double n = 160;
  const double eps = 0.05;
  const double gamma = 1.0 / 30.0;
  const Schedule s = build_schedule(160, eps, gamma);
  // t = n(1 - eps) = 152: kappa = 1, eta = 5.
  const double scale = eps / (gamma * n);
  const double beta = scale * (1.0 + std::sqrt(0.5) * std::sqrt(eps));
  const double r = std::pow(2.0, -2.5) * std::sqrt(eps);
  const double alpha = (1.0 - r) / (1.0 + 2.0 * r);
  const double beta_prime = scale * (1.0 - std::sqrt(0.5) * std::sqrt(eps)) * alpha;
  EXPECT_NEAR(s.beta(152), beta, 1e-15);
  EXPECT_NEAR(s.alpha(152), alpha, 1e-15);
  EXPECT_NEAR(s.beta_prime(152), beta_prime, 1e-15);
  EXPECT_NEAR(scale, 0.009375, 1e-15);
}

TEST(Schedule, RejectsBadInputs) {
  EXPECT_THROW(build_schedule(100, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(build_schedule(100, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(build_schedule(100, 0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(build_schedule(5, 0.1, 1.0), std::invalid_argument);
}

TEST(Schedule, Breakpoints) {
  const Schedule s = build_schedule(96, 0.05, 1.0 / 30);  // w = 5
  EXPECT_EQ(s.warmup(), 5U);
  EXPECT_EQ(s.levels(), 5);
  EXPECT_EQ(s.breakpoint(0), 5U);
  EXPECT_EQ(s.breakpoint(1), 10U);
  EXPECT_EQ(s.breakpoint(3), 40U);
  EXPECT_EQ(s.breakpoint(4), 48U);  // capped at n / 2
}

class ScheduleProperties : public ::testing::TestWithParam<std::tuple<std::size_t, double>> {};

TEST_P(ScheduleProperties, TablesAgreeWithDefinitions) {
  const auto [n, eps] = GetParam();
  const Schedule s = build_schedule(n, eps, 0.02);
  const std::size_t w = s.warmup();
  const int levels = s.levels();
  for (std::size_t t = 1; t + w <= n; ++t) {
    const int k = kappa(t, n, eps);
    // n - 2^k w < t <= n - 2^(k-1) w, the lower edge open at the top level.
    EXPECT_LE(static_cast<double>(t), static_cast<double>(n) - std::ldexp(static_cast<double>(w), k - 1));
    if (k < levels) EXPECT_GT(static_cast<double>(t), static_cast<double>(n) - std::ldexp(static_cast<double>(w), k));
    if (t > w) EXPECT_EQ(eta(n - t + 1, n, eps), k);
  }
  double previous_beta = 0.0;
  int previous_kappa = 0;
  for (std::size_t t = w + 1; t <= n + 1; ++t) {
    const std::size_t frozen = std::min(t, n - w);
    EXPECT_LE(s.beta_prime(t), s.beta(t) * s.alpha(frozen) + 1e-18);
    EXPECT_LE(s.beta(t) * s.alpha(frozen), s.beta(t));
    EXPECT_GT(s.beta(t), 0.0);
    EXPECT_GE(s.beta_prime(t), 0.0);
    EXPECT_GT(s.alpha(frozen), 0.0);
    EXPECT_LE(s.alpha(frozen), 1.0);
    const int k = s.kappa_at(frozen);
    if (k == previous_kappa) EXPECT_EQ(s.beta(t), previous_beta);
    previous_kappa = k;
    previous_beta = s.beta(t);
  }
  EXPECT_EQ(s.beta(n + 1), s.beta(n - w));
  EXPECT_EQ(s.beta_prime(n + 1), s.beta_prime(n - w));
}

INSTANTIATE_TEST_SUITE_P(Grid, ScheduleProperties,
                         ::testing::Values(std::tuple{100U, 0.25}, std::tuple{96U, 0.05}, std::tuple{189U, 0.05},
                                           std::tuple{1000U, 0.1}, std::tuple{3630U, 0.05}, std::tuple{37U, 0.3}));

}  // namespace
}  // namespace online_alloc
