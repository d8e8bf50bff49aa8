#include <gtest/gtest.h>

#include <cmath>

#include "online_alloc/generators.hpp"
#include "online_alloc/model.hpp"
#include "test_support.hpp"

namespace online_alloc {
namespace {

using testing::make_instance;
using testing::scalar_item;

TEST(EvalUtility, LinearSimplexVertex) {
  const auto f = UtilityFunction::linear_simplex({3, 1});
  EXPECT_DOUBLE_EQ(*eval_utility(f, std::vector<double>{1, 0}), 3.0);
}

TEST(EvalUtility, OutsideSimplexIsMinusInfinity) {
  const auto f = UtilityFunction::linear_simplex({3, 1});
  EXPECT_FALSE(eval_utility(f, std::vector<double>{0.6, 0.6}).has_value());
}

TEST(EvalUtility, PowerUtility) {
  const auto f = UtilityFunction::power(1.0, 0.5);
  EXPECT_DOUBLE_EQ(*eval_utility(f, std::vector<double>{0.25}), 0.5);
}

TEST(EvalUtility, EqualitySimplexExcludesZero) {
  const auto f = UtilityFunction::linear_simplex_eq({1, 2});
  EXPECT_FALSE(eval_utility(f, std::vector<double>{0, 0}).has_value());
  EXPECT_DOUBLE_EQ(*eval_utility(f, std::vector<double>{0.5, 0.5}), 1.5);
}

TEST(EvalUtility, DimensionMismatchThrows) {
  const auto f = UtilityFunction::linear_simplex({3, 1});
  EXPECT_THROW(eval_utility(f, std::vector<double>{1}), std::invalid_argument);
}

TEST(UtilityFunction, RejectsInvalidParameters) {
  EXPECT_THROW(UtilityFunction::linear_simplex({-1.0}), std::invalid_argument);
  EXPECT_THROW(UtilityFunction::power(1.0, 1.5), std::invalid_argument);
  EXPECT_THROW(UtilityFunction::log(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(UtilityFunction::custom("convex", [](double x) { return x * x; }, [](double x) { return 2 * x; }),
               std::invalid_argument);
}

TEST(AssignFromDual, PicksBestReducedCost) {
  const auto f = UtilityFunction::linear_simplex({3, 1});
  EXPECT_EQ(assign_from_dual(f, std::vector<double>{2, 2}), (Decision{1, 0}));
}

TEST(AssignFromDual, RejectsWhenNothingPays) {
  const auto f = UtilityFunction::linear_simplex({1, 1});
  EXPECT_EQ(assign_from_dual(f, std::vector<double>{2, 2}), (Decision{0, 0}));
}

TEST(AssignFromDual, ZeroReducedCostIsRejected) {
  const auto f = UtilityFunction::linear_simplex({2});
  EXPECT_EQ(assign_from_dual(f, std::vector<double>{2}), (Decision{0}));
}

TEST(AssignFromDual, TiesGoToLowestIndex) {
  const auto f = UtilityFunction::linear_simplex({3, 3});
  EXPECT_EQ(assign_from_dual(f, std::vector<double>{1, 1}), (Decision{1, 0}));
  const auto g = UtilityFunction::linear_simplex_eq({0, 0, 0});
  EXPECT_EQ(assign_from_dual(g, std::vector<double>{2, 1, 1}), (Decision{0, 1, 0}));
}

TEST(AssignFromDual, PowerUtilityInverse) {
  // f'(x) = 0.5 x^(-1/2) = 1 at x = 0.25.
  const auto f = UtilityFunction::power(1.0, 0.5);
  const Decision x = assign_from_dual(f, std::vector<double>{1.0});
  EXPECT_NEAR(x[0], 0.25, 1e-12);
  // Grid oracle for the minimizer of v x - f(x).
  const double at_x = x[0] - std::sqrt(x[0]);
  for (int i = 0; i <= 10000; ++i) {
    const double z = i * 1e-4;
    EXPECT_GE(z - std::sqrt(z), at_x - 1e-12);
  }
}

TEST(AssignFromDual, ScalarEndpoints) {
  const auto f = UtilityFunction::log(2.0, 1.0);  // f'(x) = 2 / (1 + x): f'(0) = 2, f'(1) = 1
  EXPECT_EQ(assign_from_dual(f, std::vector<double>{2.5}), (Decision{0.0}));
  EXPECT_EQ(assign_from_dual(f, std::vector<double>{0.5}), (Decision{1.0}));
  EXPECT_NEAR(assign_from_dual(f, std::vector<double>{1.6})[0], 0.25, 1e-12);
}

TEST(AssignFromDual, CustomUsesBisection) {
  const auto f = UtilityFunction::custom(
      "sqrt", [](double x) { return std::sqrt(x); }, [](double x) { return 0.5 / std::sqrt(std::max(x, 1e-300)); });
  EXPECT_NEAR(assign_from_dual(f, std::vector<double>{1.0})[0], 0.25, 1e-12);
}

TEST(ConjugateValue, Examples) {
  const auto f = UtilityFunction::linear_simplex({3, 1});
  EXPECT_DOUBLE_EQ(conjugate_value(f, std::vector<double>{2, 2}), -1.0);
  const auto g = UtilityFunction::linear_simplex({1, 1});
  EXPECT_DOUBLE_EQ(conjugate_value(g, std::vector<double>{2, 2}), 0.0);
  const auto p = UtilityFunction::power(1.0, 0.5);
  EXPECT_NEAR(conjugate_value(p, std::vector<double>{1.0}), -0.25, 1e-12);
}

// Fenchel property: v.z - f(z) >= f*(v) for random z in the domain.
TEST(ConjugateValue, LowerBoundsEveryDomainPoint) {
  Rng rng(7);
  const std::vector<UtilityFunction> family{UtilityFunction::linear_simplex({0.3, 0.9, 0.5}),
                                            UtilityFunction::power(2.0, 0.3), UtilityFunction::log(1.5, 4.0)};
  for (const auto& f : family) {
    const std::size_t k = f.options();
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> v(k);
      for (double& x : v) x = rng.uniform(0.0, 3.0);
      const double conj = conjugate_value(f, v);
      const Decision best = assign_from_dual(f, v);
      double inner = 0.0;
      for (std::size_t j = 0; j < k; ++j) inner += v[j] * best[j];
      EXPECT_NEAR(conj, inner - *eval_utility(f, best), 1e-12);
      for (int s = 0; s < 1000; ++s) {
        std::vector<double> z(k);
        double total = 0.0;
        for (double& x : z) {
          x = rng.uniform();
          total += x;
        }
        const double scale = k == 1 ? 1.0 : rng.uniform() / total;
        double zv = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          z[j] *= scale;
          zv += v[j] * z[j];
        }
        EXPECT_GE(zv - *eval_utility(f, z), conj - 1e-9);
      }
    }
  }
}

TEST(AssignFromDual, LinearScaleCovariance) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> c(4);
    std::vector<double> v(4);
    for (double& x : c) x = rng.uniform();
    for (double& x : v) x = rng.uniform();
    const double lambda = rng.uniform(0.1, 10.0);
    std::vector<double> c2 = c;
    std::vector<double> v2 = v;
    for (double& x : c2) x *= lambda;
    for (double& x : v2) x *= lambda;
    EXPECT_EQ(assign_from_dual(UtilityFunction::linear_simplex(c), v),
              assign_from_dual(UtilityFunction::linear_simplex(c2), v2));
  }
}

TEST(AssignFromDual, ScalarMonotoneInPrice) {
  const auto f = UtilityFunction::log(3.0, 2.0);
  double previous = 2.0;
  for (double v = 0.0; v <= 4.0; v += 0.01) {
    const double x = assign_from_dual(f, std::vector<double>{v})[0];
    EXPECT_LE(x, previous + 1e-15);
    previous = x;
  }
}

TEST(Objective, Examples) {
  const auto one = make_instance({1.0}, {scalar_item(4, {1})});
  EXPECT_DOUBLE_EQ(*objective(one, std::vector<Decision>{{1.0}}), 4.0);
  EXPECT_DOUBLE_EQ(*objective(one, std::vector<Decision>{{0.0}}), 0.0);
  const auto two = make_instance({1.0}, {scalar_item(1, {1}), scalar_item(1, {1})});
  EXPECT_FALSE(objective(two, std::vector<Decision>{{1.0}, {1.0}}).has_value());
}

TEST(Objective, InvariantUnderJointShuffle) {
  const Instance instance = random_linear_instance(12, 3, 2, 0.5, 5);
  std::vector<Decision> decisions;
  Rng rng(3);
  for (std::size_t t = 0; t < instance.n(); ++t) {
    Decision x(2, 0.0);
    x[rng.below(2)] = rng.uniform(0.0, 0.5);
    decisions.push_back(x);
  }
  const auto order = sample_permutation(instance.n(), rng);
  std::vector<Decision> shuffled;
  for (std::size_t idx : order) shuffled.push_back(decisions[idx]);
  EXPECT_NEAR(*objective(instance.permuted(order), shuffled), *objective(instance, decisions), 1e-12);
}

TEST(Instance, ValidateRejectsBadShapes) {
  Instance bad = make_instance({1.0}, {scalar_item(1, {1})});
  bad.b = {0.0};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  Instance negative = make_instance({1.0}, {scalar_item(1, {1})});
  negative.items[0].A(0, 0) = -1.0;
  EXPECT_THROW(negative.validate(), std::invalid_argument);
}

TEST(GammaOfInstance, Examples) {
  const auto one = make_instance({1.0}, {scalar_item(4, {0.5})});
  const GammaBound g = gamma_of_instance(one, 4.0);
  EXPECT_DOUBLE_EQ(g.bid_ratio, 0.5);
  EXPECT_DOUBLE_EQ(g.value(), 1.0);
  EXPECT_THROW(gamma_of_instance(one, 0.0), std::invalid_argument);

  const auto zero = make_instance({1.0}, {scalar_item(2, {0.0}), scalar_item(1, {0.0})});
  EXPECT_DOUBLE_EQ(gamma_of_instance(zero, 3.0).bid_ratio, 0.0);
  EXPECT_DOUBLE_EQ(gamma_of_instance(zero, 3.0).value(), 2.0 / 3.0);
}

TEST(GammaOfInstance, WorstCaseBidRatioIsOneOverC) {
  const Instance instance = build_worst_case({3, 30.0, 1});
  EXPECT_NEAR(bid_to_budget_ratio(instance), 1.0 / 30.0, 1e-15);
}

}  // namespace
}  // namespace online_alloc
