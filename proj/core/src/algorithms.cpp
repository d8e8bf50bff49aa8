#include "online_alloc/algorithms.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <variant>

#include "online_alloc/lp.hpp"

namespace online_alloc {

namespace {

constexpr double kGuardSlack = 1e-12;
constexpr double kTieSlack = 1e-9;

using Clock = std::chrono::steady_clock;

std::vector<const Item*> arrival_sequence(const Instance& instance, std::span<const std::size_t> order) {
  if (order.size() != instance.n()) throw std::invalid_argument("order must be a permutation of the items");
  std::vector<const Item*> items;
  items.reserve(order.size());
  for (std::size_t idx : order) items.push_back(&instance.items.at(idx));
  return items;
}

// Tracks raw and accepted consumption and decides acceptance.
class Guard {
 public:
  Guard(std::span<const double> b, GuardMode mode)
      : b_(b.begin(), b.end()), mode_(mode), raw_(b.size(), 0.0), checked_(b.size(), 0.0) {}

  bool admit(const std::vector<double>& load) {
    for (std::size_t i = 0; i < b_.size(); ++i) raw_[i] += load[i];
    const auto& base = mode_ == GuardMode::raw_cumulative ? raw_ : checked_;
    const double extra = mode_ == GuardMode::raw_cumulative ? 0.0 : 1.0;
    for (std::size_t i = 0; i < b_.size(); ++i) {
      if (base[i] + extra * load[i] > b_[i] + kGuardSlack * b_[i]) return false;
    }
    for (std::size_t i = 0; i < b_.size(); ++i) checked_[i] += load[i];
    return true;
  }

  const std::vector<double>& raw() const { return raw_; }
  const std::vector<double>& checked() const { return checked_; }

 private:
  std::vector<double> b_;
  GuardMode mode_;
  std::vector<double> raw_;
  std::vector<double> checked_;
};

// Shared driver for algorithms that pick x_t = assign_from_dual(f, A^T y)
// from a piecewise-constant dual estimate.
template <class RefreshFn>
RunResult dual_price_run(const Instance& instance, std::span<const std::size_t> order,
                         std::size_t skip, const RunOptions& options, RefreshFn&& refresh) {
  const auto start = Clock::now();
  const auto items = arrival_sequence(instance, order);
  RunResult result;
  result.order.assign(order.begin(), order.end());
  result.decisions.assign(instance.n(), Decision(instance.k, 0.0));

  Guard guard(instance.b, options.guard);
  DualVector prices{std::vector<double>(instance.m, 0.0)};
  for (std::size_t t = skip + 1; t <= instance.n(); ++t) {
    if (refresh(t, items, prices)) ++result.lp_solves;
    const Item& item = *items[t - 1];
    Decision x = assign_at_price(item.f, item.A.apply_transpose(prices.y), options.ties);
    if (guard.admit(item.A.apply(x))) {
      result.objective += *eval_utility(item.f, x);
      result.decisions[t - 1] = std::move(x);
    }
  }
  result.consumption = guard.checked();
  result.feasible = within_budget(result.consumption, instance.b);
  result.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace

Decision assign_at_price(const UtilityFunction& f, std::span<const double> v, TieRule ties) {
  const auto* linear = std::get_if<LinearSimplex>(&f.payload());
  if (ties == TieRule::reject || linear == nullptr) return assign_from_dual(f, v);
  Decision x(linear->c.size(), 0.0);
  std::size_t best = 0;
  for (std::size_t j = 1; j < x.size(); ++j) {
    if (v[j] - linear->c[j] < v[best] - linear->c[best]) best = j;
  }
  const double scale = std::max(1.0, std::abs(linear->c[best]));
  if (linear->c[best] > 0.0 && v[best] - linear->c[best] <= kTieSlack * scale) x[best] = 1.0;
  return x;
}

EsaState esa_initial_state(const Schedule& schedule, std::size_t m) {
  const std::size_t first = schedule.warmup() + 1;
  EsaState state;
  state.t = first;
  state.log_y.assign(m, -schedule.beta(first) - std::log(static_cast<double>(m)));
  state.log_y_prime = schedule.beta_prime(first);
  state.q = schedule.eps();
  state.raw_consumption.assign(m, 0.0);
  state.checked_consumption.assign(m, 0.0);
  return state;
}

Decision esa_assign(const EsaState& state, const Item& item, std::span<const double> b) {
  const double log_scale = std::log(state.q) - state.log_y_prime;
  std::vector<double> prices(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) prices[i] = std::exp(log_scale + state.log_y[i]) / b[i];
  return assign_from_dual(item.f, item.A.apply_transpose(prices));
}

EsaState esa_update(EsaState state, const Item& item, const Decision& x, const Schedule& schedule,
                    std::span<const double> b) {
  const auto load = item.A.apply(x);
  const double value = *eval_utility(item.f, x);
  const double beta = schedule.beta(state.t + 1);
  const double beta_prime = schedule.beta_prime(state.t + 1);
  for (std::size_t i = 0; i < b.size(); ++i) {
    state.log_y[i] += schedule.nu() / b[i] * load[i] - beta;
    state.raw_consumption[i] += load[i];
  }
  state.log_y_prime += -schedule.nu_prime() / state.q * value + beta_prime;
  ++state.t;
  return state;
}

double estimate_prefix_value(std::span<const Item* const> prefix, int h, double eps,
                             std::span<const double> b, std::size_t n) {
  if (prefix.empty() || n == 0) throw std::invalid_argument("estimate_prefix_value: empty prefix");
  const double fraction = static_cast<double>(prefix.size()) / static_cast<double>(n);
  const double th = theta(h, eps);
  std::vector<double> budget(b.begin(), b.end());
  for (double& v : budget) v *= fraction * (1.0 + th);
  return solve_allocation(prefix, budget).value / (fraction * (1.0 - th));
}

DualVector dual_estimate(std::span<const Item* const> prefix, int h, double eps,
                         std::span<const double> b, std::size_t n) {
  if (prefix.empty() || n == 0) throw std::invalid_argument("dual_estimate: empty prefix");
  const double fraction = static_cast<double>(prefix.size()) / static_cast<double>(n);
  const double shrink = 1.0 - std::pow(2.0, -h / 2.0) * std::sqrt(eps);
  std::vector<double> budget(b.begin(), b.end());
  for (double& v : budget) v *= fraction * shrink;
  return {solve_allocation(prefix, budget).duals};
}

RunResult esa_run(const Instance& instance, std::span<const std::size_t> order, double eps, double gamma,
                  const RunOptions& options, EsaTrace* trace) {
  const auto start = Clock::now();
  const std::size_t n = instance.n();
  const Schedule schedule = build_schedule(n, eps, gamma);
  const auto items = arrival_sequence(instance, order);
  const std::size_t w = schedule.warmup();

  RunResult result;
  result.order.assign(order.begin(), order.end());
  result.decisions.assign(n, Decision(instance.k, 0.0));
  if (trace) *trace = {};

  Guard guard(instance.b, options.guard);
  EsaState state = esa_initial_state(schedule, instance.m);
  int level = 0;
  for (std::size_t t = w + 1; t <= n; ++t) {
    if (const int current = schedule.eta_at(t); current != level) {
      level = current;
      const std::size_t length = schedule.breakpoint(level - 1);
      const double estimate = estimate_prefix_value(std::span(items).first(length), level - 1, eps,
                                                    instance.b, n);
      ++result.lp_solves;
      state.q = estimate > 0.0 ? estimate : eps;
    }
    const Item& item = *items[t - 1];
    Decision x = esa_assign(state, item, instance.b);
    const double value = *eval_utility(item.f, x);
    if (trace) {
      trace->raw_decisions.push_back(x);
      trace->q.push_back(state.q);
      trace->utilities.push_back(value);
    }
    state = esa_update(std::move(state), item, x, schedule, instance.b);
    if (guard.admit(item.A.apply(x))) {
      state.utility += value;
      result.decisions[t - 1] = std::move(x);
    }
    state.checked_consumption = guard.checked();
  }
  result.objective = state.utility;
  result.consumption = guard.checked();
  result.feasible = within_budget(result.consumption, instance.b);
  result.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

RunResult ola_run(const Instance& instance, std::span<const std::size_t> order, double eps,
                  const RunOptions& options) {
  const std::size_t n = instance.n();
  const std::size_t w = warmup_length(n, eps);
  return dual_price_run(instance, order, w, options,
                        [&](std::size_t t, const std::vector<const Item*>& items, DualVector& prices) {
                          if (t != w + 1) return false;
                          prices = dual_estimate(std::span(items).first(w), 0, eps, instance.b, n);
                          return true;
                        });
}

RunResult dla_run(const Instance& instance, std::span<const std::size_t> order, double eps,
                  const RunOptions& options) {
  const std::size_t n = instance.n();
  // Only the breakpoints are needed; gamma does not enter them.
  const Schedule schedule = build_schedule(n, eps, 1.0);
  int level = 0;
  return dual_price_run(instance, order, schedule.warmup(), options,
                        [&](std::size_t t, const std::vector<const Item*>& items, DualVector& prices) {
                          const int current = schedule.eta_at(t);
                          if (current == level) return false;
                          level = current;
                          const std::size_t length = schedule.breakpoint(level - 1);
                          prices = dual_estimate(std::span(items).first(length), level - 1, eps,
                                                 instance.b, n);
                          return true;
                        });
}

RunResult krtv_run(const Instance& instance, std::span<const std::size_t> order, std::size_t period,
                   const RunOptions& options) {
  if (period == 0) throw std::invalid_argument("krtv_run: period must be >= 1");
  const std::size_t n = instance.n();
  return dual_price_run(instance, order, 0, options,
                        [&](std::size_t t, const std::vector<const Item*>& items, DualVector& prices) {
                          if ((t - 1) % period != 0 && t != n) return false;
                          std::vector<double> budget(instance.b);
                          const double fraction = static_cast<double>(t) / static_cast<double>(n);
                          for (double& v : budget) v *= fraction;
                          prices.y = solve_allocation(std::span(items).first(t), budget).duals;
                          return true;
                        });
}

std::vector<std::vector<double>> feasibility_greedy_run(const Instance& instance, std::span<const std::size_t> order,
                                                double eps, double gamma) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("feasibility_greedy_run: eps must lie in (0, 1)");
  if (!(gamma > 0.0)) throw std::invalid_argument("feasibility_greedy_run: gamma must be > 0");
  for (double v : instance.b) {
    if (std::abs(v - 1.0) > 1e-12) throw std::invalid_argument("feasibility_greedy_run: budget must be all ones");
  }
  const auto items = arrival_sequence(instance, order);
  for (const Item* item : items) {
    if (item->f.kind() != UtilityKind::linear_simplex_eq) {
      throw std::invalid_argument("feasibility_greedy_run: items must have equality-simplex utilities");
    }
  }

  const double nu = std::log1p(eps) / gamma;
  const std::size_t m = instance.m;
  std::vector<double> load(m, 0.0);
  std::vector<double> weights(m);
  std::vector<std::vector<double>> path;
  path.reserve(items.size());
  for (const Item* item : items) {
    // exp(nu * load_i), shifted by the max exponent; the argmin is scale free.
    const double top = nu * *std::max_element(load.begin(), load.end());
    for (std::size_t i = 0; i < m; ++i) weights[i] = std::exp(nu * load[i] - top);
    const auto cost = item->A.apply_transpose(weights);
    const std::size_t j = static_cast<std::size_t>(std::min_element(cost.begin(), cost.end()) - cost.begin());
    for (std::size_t i = 0; i < m; ++i) load[i] += item->A(i, j);
    path.push_back(load);
  }
  return path;
}

std::string AlgorithmSpec::name() const {
  switch (kind) {
    case Kind::esa:
      return "esa";
    case Kind::ola:
      return "ola";
    case Kind::dla:
      return "dla";
    case Kind::krtv:
      return period == 1 ? "krtv" : "krtv" + std::to_string(period);
  }
  return "unknown";
}

AlgorithmSpec parse_algorithm(const std::string& text) {
  if (text == "esa") return {AlgorithmSpec::Kind::esa, 1};
  if (text == "ola") return {AlgorithmSpec::Kind::ola, 1};
  if (text == "dla") return {AlgorithmSpec::Kind::dla, 1};
  if (text.rfind("krtv", 0) == 0) {
    if (text.size() == 4) return {AlgorithmSpec::Kind::krtv, 1};
    std::size_t period = 0;
    const char* first = text.data() + 4;
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, period);
    if (ec == std::errc() && ptr == last && period > 0) return {AlgorithmSpec::Kind::krtv, period};
  }
  throw std::invalid_argument("unknown algorithm '" + text + "'");
}

RunResult run_algorithm(const AlgorithmSpec& spec, const Instance& instance,
                        std::span<const std::size_t> order, double eps, double gamma,
                        const RunOptions& options) {
  switch (spec.kind) {
    case AlgorithmSpec::Kind::esa:
      return esa_run(instance, order, eps, gamma, options);
    case AlgorithmSpec::Kind::ola:
      return ola_run(instance, order, eps, options);
    case AlgorithmSpec::Kind::dla:
      return dla_run(instance, order, eps, options);
    case AlgorithmSpec::Kind::krtv:
      return krtv_run(instance, order, spec.period, options);
  }
  throw std::logic_error("unreachable");
}

}  // namespace online_alloc
