#include "online_alloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace online_alloc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(want) + ", got " + std::to_string(got));
  }
}

void require_nonnegative(const std::vector<double>& c, const char* what) {
  for (double v : c) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument(std::string(what) + ": coefficients must be finite and >= 0");
    }
  }
  if (c.empty()) throw std::invalid_argument(std::string(what) + ": needs at least one option");
}

// Lowest-index argmin of v_j - c_j.
std::size_t best_reduced_cost(std::span<const double> v, const std::vector<double>& c,
                              double& reduced) {
  std::size_t best = 0;
  reduced = v[0] - c[0];
  for (std::size_t j = 1; j < c.size(); ++j) {
    const double r = v[j] - c[j];
    if (r < reduced) {
      reduced = r;
      best = j;
    }
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("Matrix: data size does not match shape");
  }
}

std::vector<double> Matrix::apply(std::span<const double> x) const {
  require_size(x.size(), cols_, "Matrix::apply");
  std::vector<double> out(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) acc += data_[r * cols_ + c] * x[c];
    out[r] = acc;
  }
  return out;
}

std::vector<double> Matrix::apply_transpose(std::span<const double> y) const {
  require_size(y.size(), rows_, "Matrix::apply_transpose");
  std::vector<double> out(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (y[r] == 0.0) continue;
    for (std::size_t c = 0; c < cols_; ++c) out[c] += data_[r * cols_ + c] * y[r];
  }
  return out;
}

double Matrix::max_entry() const {
  return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

double Matrix::min_entry() const {
  return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

// ---------------------------------------------------------------------------
// ConcaveScalar

ConcaveScalar::ConcaveScalar(Shape shape) : shape_(std::move(shape)) {}

double ConcaveScalar::value(double x) const {
  x = std::clamp(x, 0.0, 1.0);
  return std::visit(overloaded{
                        [x](const PowerUtility& u) { return x == 0.0 ? 0.0 : u.a * std::pow(x, u.p); },
                        [x](const LogUtility& u) { return u.a * std::log1p(u.s * x) / u.s; },
                        [x](const CustomScalar& u) { return u.value(x); },
                    },
                    shape_);
}

double ConcaveScalar::derivative(double x) const {
  x = std::clamp(x, 0.0, 1.0);
  return std::visit(
      overloaded{
          [x](const PowerUtility& u) {
            if (u.p == 1.0) return u.a;
            if (x == 0.0) return u.a > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
            return u.a * u.p * std::pow(x, u.p - 1.0);
          },
          [x](const LogUtility& u) { return u.a / (1.0 + u.s * x); },
          [x](const CustomScalar& u) { return u.derivative(x); },
      },
      shape_);
}

double ConcaveScalar::inverse_derivative(double v) const {
  return std::visit(
      overloaded{
          [v](const PowerUtility& u) {
            if (u.p == 1.0 || u.a == 0.0 || v <= 0.0) return 1.0;
            return std::clamp(std::pow(v / (u.a * u.p), 1.0 / (u.p - 1.0)), 0.0, 1.0);
          },
          [v](const LogUtility& u) {
            if (v <= 0.0) return 1.0;
            return std::clamp((u.a / v - 1.0) / u.s, 0.0, 1.0);
          },
          [this, v](const CustomScalar&) {
            double lo = 0.0;
            double hi = 1.0;
            for (int i = 0; i < kInverseBisectionSteps; ++i) {
              const double mid = 0.5 * (lo + hi);
              if (v >= derivative(mid)) {
                hi = mid;
              } else {
                lo = mid;
              }
            }
            return hi;
          },
      },
      shape_);
}

// ---------------------------------------------------------------------------
// UtilityFunction

UtilityFunction UtilityFunction::linear_simplex(std::vector<double> c) {
  require_nonnegative(c, "linear_simplex");
  return UtilityFunction(LinearSimplex{std::move(c)});
}

UtilityFunction UtilityFunction::linear_simplex_eq(std::vector<double> c) {
  require_nonnegative(c, "linear_simplex_eq");
  return UtilityFunction(LinearSimplexEq{std::move(c)});
}

UtilityFunction UtilityFunction::power(double a, double p) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("power utility: a must be >= 0");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("power utility: p must lie in (0, 1]");
  return UtilityFunction(ConcaveScalar(PowerUtility{a, p}));
}

UtilityFunction UtilityFunction::log(double a, double s) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("log utility: a must be >= 0");
  if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("log utility: s must be > 0");
  return UtilityFunction(ConcaveScalar(LogUtility{a, s}));
}

UtilityFunction UtilityFunction::custom(std::string name, std::function<double(double)> value,
                                        std::function<double(double)> derivative) {
  if (!value || !derivative) throw std::invalid_argument("custom utility: callbacks required");
  if (std::abs(value(0.0)) > kDomainTolerance) {
    throw std::invalid_argument("custom utility: f(0) must be 0");
  }
  // Concavity is checked by sampling the derivative.
  constexpr int kSamples = 101;
  double previous = derivative(0.0);
  for (int i = 1; i < kSamples; ++i) {
    const double current = derivative(static_cast<double>(i) / (kSamples - 1));
    if (current > previous + 1e-12 * (1.0 + std::abs(previous))) {
      throw std::invalid_argument("custom utility: derivative must be nonincreasing on [0,1]");
    }
    previous = current;
  }
  return UtilityFunction(
      ConcaveScalar(CustomScalar{std::move(name), std::move(value), std::move(derivative)}));
}

UtilityKind UtilityFunction::kind() const {
  switch (payload_.index()) {
    case 0:
      return UtilityKind::linear_simplex;
    case 1:
      return UtilityKind::linear_simplex_eq;
    default:
      return UtilityKind::concave_scalar;
  }
}

std::size_t UtilityFunction::options() const {
  return std::visit(overloaded{
                        [](const LinearSimplex& u) { return u.c.size(); },
                        [](const LinearSimplexEq& u) { return u.c.size(); },
                        [](const ConcaveScalar&) { return std::size_t{1}; },
                    },
                    payload_);
}

double UtilityFunction::max_value() const {
  return std::visit(overloaded{
                        [](const LinearSimplex& u) {
                          return std::max(0.0, *std::max_element(u.c.begin(), u.c.end()));
                        },
                        [](const LinearSimplexEq& u) { return *std::max_element(u.c.begin(), u.c.end()); },
                        [](const ConcaveScalar& u) {
                          if (u.derivative(1.0) >= 0.0) return u.value(1.0);
                          if (u.derivative(0.0) <= 0.0) return 0.0;
                          return u.value(u.inverse_derivative(0.0));
                        },
                    },
                    payload_);
}

// ---------------------------------------------------------------------------
// Operations

std::optional<double> eval_utility(const UtilityFunction& f, std::span<const double> x) {
  require_size(x.size(), f.options(), "eval_utility");
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("eval_utility: x must be finite");
  }
  return std::visit(
      overloaded{
          [x](const LinearSimplex& u) -> std::optional<double> {
            double sum = 0.0;
            double value = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) {
              if (x[j] < -kDomainTolerance || x[j] > 1.0 + kDomainTolerance) return std::nullopt;
              sum += x[j];
              value += u.c[j] * x[j];
            }
            if (sum > 1.0 + kDomainTolerance) return std::nullopt;
            return value;
          },
          [x](const LinearSimplexEq& u) -> std::optional<double> {
            double sum = 0.0;
            double value = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) {
              if (x[j] < -kDomainTolerance) return std::nullopt;
              sum += x[j];
              value += u.c[j] * x[j];
            }
            if (std::abs(sum - 1.0) > kDomainTolerance) return std::nullopt;
            return value;
          },
          [x](const ConcaveScalar& u) -> std::optional<double> {
            if (x[0] < -kDomainTolerance || x[0] > 1.0 + kDomainTolerance) return std::nullopt;
            return u.value(x[0]);
          },
      },
      f.payload());
}

Decision assign_from_dual(const UtilityFunction& f, std::span<const double> v) {
  require_size(v.size(), f.options(), "assign_from_dual");
  return std::visit(overloaded{
                        [v](const LinearSimplex& u) {
                          Decision x(u.c.size(), 0.0);
                          double reduced = 0.0;
                          const std::size_t j = best_reduced_cost(v, u.c, reduced);
                          if (reduced < -kDomainTolerance) x[j] = 1.0;
                          return x;
                        },
                        [v](const LinearSimplexEq& u) {
                          Decision x(u.c.size(), 0.0);
                          double reduced = 0.0;
                          x[best_reduced_cost(v, u.c, reduced)] = 1.0;
                          return x;
                        },
                        [v](const ConcaveScalar& u) {
                          const double s = v[0];
                          if (u.derivative(0.0) <= s) return Decision{0.0};
                          if (u.derivative(1.0) > s) return Decision{1.0};
                          return Decision{u.inverse_derivative(s)};
                        },
                    },
                    f.payload());
}

double conjugate_value(const UtilityFunction& f, std::span<const double> v) {
  const Decision x = assign_from_dual(f, v);
  double inner = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) inner += v[j] * x[j];
  return inner - *eval_utility(f, x);
}

std::vector<double> total_consumption(const Instance& instance,
                                      std::span<const Decision> decisions) {
  require_size(decisions.size(), instance.n(), "total_consumption");
  std::vector<double> total(instance.m, 0.0);
  for (std::size_t t = 0; t < decisions.size(); ++t) {
    const auto load = instance.items[t].A.apply(decisions[t]);
    for (std::size_t i = 0; i < instance.m; ++i) total[i] += load[i];
  }
  return total;
}

bool within_budget(std::span<const double> consumption, std::span<const double> b) {
  require_size(consumption.size(), b.size(), "within_budget");
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (consumption[i] > b[i] + kBudgetTolerance * b[i]) return false;
  }
  return true;
}

std::optional<double> objective(const Instance& instance, std::span<const Decision> decisions) {
  require_size(decisions.size(), instance.n(), "objective");
  double total = 0.0;
  for (std::size_t t = 0; t < decisions.size(); ++t) {
    const auto value = eval_utility(instance.items[t].f, decisions[t]);
    if (!value) return std::nullopt;
    total += *value;
  }
  if (!within_budget(total_consumption(instance, decisions), instance.b)) return std::nullopt;
  return total;
}

double bid_to_budget_ratio(const Instance& instance) {
  double ratio = 0.0;
  for (const Item& item : instance.items) {
    // Extreme points with f >= 0: vertices e_j for linear families (c >= 0),
    // the largest x with f(x) >= 0 for scalar ones.
    double scale = 1.0;
    if (const auto* scalar = std::get_if<ConcaveScalar>(&item.f.payload())) {
      if (scalar->value(1.0) < 0.0) {
        double lo = scalar->derivative(0.0) <= 0.0 ? 0.0 : scalar->inverse_derivative(0.0);
        double hi = 1.0;
        for (int i = 0; i < kInverseBisectionSteps; ++i) {
          const double mid = 0.5 * (lo + hi);
          (scalar->value(mid) >= 0.0 ? lo : hi) = mid;
        }
        scale = lo;
      }
    }
    for (std::size_t i = 0; i < instance.m; ++i) {
      for (std::size_t j = 0; j < item.A.cols(); ++j) {
        ratio = std::max(ratio, scale * item.A(i, j) / instance.b[i]);
      }
    }
  }
  return ratio;
}

GammaBound gamma_of_instance(const Instance& instance, double p_star) {
  if (!(p_star > 0.0)) throw std::invalid_argument("gamma_of_instance: p_star must be > 0");
  GammaBound bound;
  bound.bid_ratio = bid_to_budget_ratio(instance);
  for (const Item& item : instance.items) {
    bound.utility_ratio = std::max(bound.utility_ratio, item.f.max_value() / p_star);
  }
  return bound;
}

// ---------------------------------------------------------------------------
// Instance

void Instance::validate() const {
  if (m == 0 || k == 0) throw std::invalid_argument("Instance: m and k must be positive");
  require_size(b.size(), m, "Instance budget");
  for (double v : b) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("Instance: budget must be > 0");
  }
  for (const Item& item : items) {
    if (item.A.rows() != m || item.A.cols() != k) {
      throw std::invalid_argument("Instance: item consumption matrix must be m x k");
    }
    require_size(item.f.options(), k, "Instance item utility");
    for (double v : item.A.data()) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("Instance: consumption entries must be finite and >= 0");
      }
    }
  }
}

Instance Instance::permuted(std::span<const std::size_t> order) const {
  require_size(order.size(), n(), "Instance::permuted");
  Instance out{m, k, b, {}};
  out.items.reserve(order.size());
  for (std::size_t idx : order) out.items.push_back(items.at(idx));
  return out;
}

}  // namespace online_alloc
