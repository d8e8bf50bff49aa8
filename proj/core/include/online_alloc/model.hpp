#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace online_alloc {

/// Slack allowed when checking that a decision lies in a utility's domain.
inline constexpr double kDomainTolerance = 1e-12;
/// Relative slack allowed on budget constraints (consumption <= b + tol * b).
inline constexpr double kBudgetTolerance = 1e-9;
/// Iterations used to invert a derivative oracle without a closed form.
inline constexpr int kInverseBisectionSteps = 80;

/// Dense row-major matrix. Small by construction (m x k per item).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  const std::vector<double>& data() const { return data_; }

  /// A x.
  std::vector<double> apply(std::span<const double> x) const;
  /// A^T y.
  std::vector<double> apply_transpose(std::span<const double> y) const;

  double max_entry() const;
  double min_entry() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// c^T x on {x in [0,1]^k : sum x <= 1}.
struct LinearSimplex {
  std::vector<double> c;
};

/// c^T x on the probability simplex {x >= 0 : sum x = 1}. 0 is not in the domain.
struct LinearSimplexEq {
  std::vector<double> c;
};

/// a * x^p on [0,1], p in (0,1].
struct PowerUtility {
  double a = 1.0;
  double p = 1.0;
};

/// a * ln(1 + s x) / s on [0,1], s > 0.
struct LogUtility {
  double a = 1.0;
  double s = 1.0;
};

/// Any concave differentiable f on [0,1] with f(0) = 0, given by value and
/// derivative callbacks. The derivative inverse falls back to bisection.
/// Not serializable.
struct CustomScalar {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// Scalar (k = 1) concave utility on [0,1].
class ConcaveScalar {
 public:
  using Shape = std::variant<PowerUtility, LogUtility, CustomScalar>;

  explicit ConcaveScalar(Shape shape);

  const Shape& shape() const { return shape_; }

  double value(double x) const;
  double derivative(double x) const;
  /// l(v) = min{x in [0,1] : v >= f'(x)}; only meaningful when f'(1) <= v < f'(0).
  double inverse_derivative(double v) const;

 private:
  Shape shape_;
};

enum class UtilityKind { linear_simplex, linear_simplex_eq, concave_scalar };

/// Tagged utility family. Immutable after construction; construction
/// validates the family invariants and throws std::invalid_argument.
class UtilityFunction {
 public:
  using Payload = std::variant<LinearSimplex, LinearSimplexEq, ConcaveScalar>;

  static UtilityFunction linear_simplex(std::vector<double> c);
  static UtilityFunction linear_simplex_eq(std::vector<double> c);
  static UtilityFunction power(double a, double p);
  static UtilityFunction log(double a, double s);
  static UtilityFunction custom(std::string name, std::function<double(double)> value,
                                std::function<double(double)> derivative);

  UtilityKind kind() const;
  /// Number of options k.
  std::size_t options() const;
  const Payload& payload() const { return payload_; }

  /// Largest value over the domain's extreme points (vertices, or x = 1 for
  /// scalar families).
  double max_value() const;

 private:
  explicit UtilityFunction(Payload payload) : payload_(std::move(payload)) {}
  Payload payload_;
};

using Decision = std::vector<double>;

struct Item {
  UtilityFunction f;
  Matrix A;  // m x k, entrywise nonnegative
};

struct Instance {
  std::size_t m = 0;
  std::size_t k = 0;
  std::vector<double> b;
  std::vector<Item> items;

  std::size_t n() const { return items.size(); }

  /// Throws std::invalid_argument when b <= 0, shapes disagree or A has a
  /// negative entry.
  void validate() const;

  /// Items reordered so that position t holds items[order[t]].
  Instance permuted(std::span<const std::size_t> order) const;
};

struct GammaBound {
  double bid_ratio = 0.0;      // max (A x)_i / b_i over extreme points with f >= 0
  double utility_ratio = 0.0;  // max f / P*
  double value() const { return bid_ratio > utility_ratio ? bid_ratio : utility_ratio; }
};

struct RunResult {
  std::vector<std::size_t> order;     // arrival order: position t holds item order[t]
  std::vector<Decision> decisions;    // guarded decisions in arrival order
  double objective = 0.0;             // sum of utilities over the guarded decisions
  std::vector<double> consumption;    // sum of A x over the guarded decisions
  bool feasible = true;               // consumption <= b + kBudgetTolerance * b
  double elapsed_seconds = 0.0;
  std::size_t lp_solves = 0;
};

/// f(x), or std::nullopt for -infinity (x outside the domain by more than
/// kDomainTolerance). Throws std::invalid_argument on dimension mismatch.
std::optional<double> eval_utility(const UtilityFunction& f, std::span<const double> x);

/// A minimizer of v^T z - f(z) over dom f, i.e. an element of the conjugate's
/// supergradient at v. Linear families break ties on the lowest option index.
Decision assign_from_dual(const UtilityFunction& f, std::span<const double> v);

/// f*(v) = inf_z v^T z - f(z), evaluated at assign_from_dual(f, v).
double conjugate_value(const UtilityFunction& f, std::span<const double> v);

/// Sum of utilities plus the budget indicator; std::nullopt encodes -infinity.
/// decisions[t] is paired with instance.items[t].
std::optional<double> objective(const Instance& instance, std::span<const Decision> decisions);

/// Sum over t of A_t x_t.
std::vector<double> total_consumption(const Instance& instance,
                                      std::span<const Decision> decisions);

bool within_budget(std::span<const double> consumption, std::span<const double> b);

/// Bid-to-budget part of gamma only (does not need P*).
double bid_to_budget_ratio(const Instance& instance);

/// Throws std::invalid_argument when p_star <= 0.
GammaBound gamma_of_instance(const Instance& instance, double p_star);

}  // namespace online_alloc
