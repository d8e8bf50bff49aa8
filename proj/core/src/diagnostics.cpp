#include "online_alloc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "online_alloc/algorithms.hpp"
#include "online_alloc/generators.hpp"
#include "online_alloc/lp.hpp"
#include "online_alloc/parallel.hpp"
#include "online_alloc/schedule.hpp"

namespace online_alloc {

namespace {

constexpr double kEstimateSlack = 1e-9;

void require_feasible(const Instance& instance, std::span<const Decision> x_star) {
  if (x_star.size() != instance.n()) throw std::invalid_argument("x_star must hold one decision per item");
  if (!objective(instance, x_star)) throw std::invalid_argument("x_star is infeasible for the instance");
}

void require_order(const Instance& instance, std::span<const std::size_t> order) {
  if (order.size() != instance.n()) throw std::invalid_argument("order must be a permutation of the items");
}

// (1/(n-t+1)) sum_{s>=t} values[s] - offset for t = 1..n.
std::vector<double> suffix_averages(const std::vector<double>& values, double offset) {
  const std::size_t n = values.size();
  std::vector<double> out(n);
  double tail = 0.0;
  for (std::size_t s = n; s >= 1; --s) {
    tail += values[s - 1];
    out[s - 1] = tail / static_cast<double>(n - s + 1) - offset;
  }
  return out;
}

std::vector<double> resource_path(const Instance& instance, std::span<const Decision> x_star,
                                  std::span<const std::size_t> order, std::size_t i) {
  std::vector<double> path(order.size());
  for (std::size_t s = 0; s < order.size(); ++s) {
    const auto& item = instance.items[order[s]];
    const auto row = item.A.row(i);
    const auto& x = x_star[order[s]];
    path[s] = std::inner_product(row.begin(), row.end(), x.begin(), 0.0);
  }
  return path;
}

std::vector<double> utility_path(const Instance& instance, std::span<const Decision> x_star,
                                 std::span<const std::size_t> order) {
  std::vector<double> path(order.size());
  for (std::size_t s = 0; s < order.size(); ++s) {
    path[s] = *eval_utility(instance.items[order[s]].f, x_star[order[s]]);
  }
  return path;
}

// B_t and C_t from the R / S sequences at step t, 1 <= t <= n - w.
bool resource_event(const std::vector<std::vector<double>>& R, std::span<const double> b, std::size_t t,
                    std::size_t n, double slack) {
  for (std::size_t i = 0; i < R.size(); ++i) {
    if (R[i][t - 1] > b[i] * slack / static_cast<double>(n)) return false;
  }
  return true;
}

bool utility_event(const std::vector<double>& S, double p_star, std::size_t t, std::size_t n, double slack) {
  return S[t - 1] >= -p_star * slack / static_cast<double>(n);
}

double level_slack(int level, double eps) { return std::pow(2.0, -level / 2.0) * std::sqrt(eps); }

}  // namespace

MartingaleTrace martingale_R(const Instance& instance, std::span<const Decision> x_star,
                             std::span<const std::size_t> order, std::size_t i) {
  require_feasible(instance, x_star);
  require_order(instance, order);
  if (i >= instance.m) throw std::out_of_range("martingale_R: resource index out of range");
  const double offset = instance.b[i] / static_cast<double>(instance.n());
  return {TraceKind::resource, i, 1, suffix_averages(resource_path(instance, x_star, order, i), offset)};
}

MartingaleTrace martingale_S(const Instance& instance, std::span<const Decision> x_star, double p_star,
                             std::span<const std::size_t> order) {
  require_feasible(instance, x_star);
  require_order(instance, order);
  const double offset = p_star / static_cast<double>(instance.n());
  return {TraceKind::utility, 0, 1, suffix_averages(utility_path(instance, x_star, order), offset)};
}

MartingaleCheck exact_martingale_check(const Instance& instance, std::span<const Decision> x_star,
                                       double p_star) {
  require_feasible(instance, x_star);
  const std::size_t n = instance.n();
  const std::size_t m = instance.m;
  if (n < 2 || n > 8) throw std::invalid_argument("exact_martingale_check: needs 2 <= n <= 8");

  struct Group {
    std::vector<double> current;  // R_t per resource, then S_t
    std::vector<double> next_sum;
    std::size_t count = 0;
  };
  std::map<std::pair<std::size_t, std::uint64_t>, Group> groups;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  MartingaleCheck check;
  do {
    ++check.permutations;
    std::vector<std::vector<double>> seqs;
    for (std::size_t i = 0; i < m; ++i) {
      seqs.push_back(suffix_averages(resource_path(instance, x_star, order, i),
                                     instance.b[i] / static_cast<double>(n)));
    }
    seqs.push_back(suffix_averages(utility_path(instance, x_star, order), p_star / static_cast<double>(n)));

    std::uint64_t code = 0;
    for (std::size_t t = 1; t < n; ++t) {
      // code encodes sigma(1..t-1), which fixes R_t.
      Group& g = groups[{t, code}];
      if (g.count == 0) {
        g.current.resize(m + 1);
        g.next_sum.assign(m + 1, 0.0);
        for (std::size_t j = 0; j <= m; ++j) g.current[j] = seqs[j][t - 1];
      }
      for (std::size_t j = 0; j <= m; ++j) g.next_sum[j] += seqs[j][t];
      ++g.count;
      code = code * n + order[t - 1];
    }
  } while (std::next_permutation(order.begin(), order.end()));

  for (const auto& [key, g] : groups) {
    for (std::size_t j = 0; j <= m; ++j) {
      const double error = std::abs(g.next_sum[j] / static_cast<double>(g.count) - g.current[j]);
      double& slot = j < m ? check.max_error_R : check.max_error_S;
      slot = std::max(slot, error);
    }
  }
  return check;
}

MartingaleTrace phi_trace(const Instance& instance, std::span<const std::size_t> order, double eps,
                          double gamma, std::span<const Decision> x_star, double p_star) {
  require_feasible(instance, x_star);
  require_order(instance, order);
  const std::size_t n = instance.n();
  const std::size_t m = instance.m;
  const Schedule schedule = build_schedule(n, eps, gamma);
  const std::size_t w = schedule.warmup();
  const std::size_t last = std::max(w, n > 2 * w ? n - 2 * w : w);

  EsaTrace trace;
  esa_run(instance, order, eps, gamma, {}, &trace);

  std::vector<std::vector<double>> R;
  for (std::size_t i = 0; i < m; ++i) R.push_back(martingale_R(instance, x_star, order, i).values);
  const auto S = martingale_S(instance, x_star, p_star, order).values;

  MartingaleTrace out{TraceKind::potential, 0, w, {2.0 * static_cast<double>(m)}};
  std::vector<double> log_phi(m, 0.0);
  double log_chi = 0.0;
  bool alive = true;
  for (std::size_t s = w + 1; s <= last; ++s) {
    const std::size_t j = s - w - 1;
    const Item& item = instance.items[order[s - 1]];
    const auto load = item.A.apply(trace.raw_decisions[j]);
    const double q = trace.q[j];
    for (std::size_t i = 0; i < m; ++i) log_phi[i] += schedule.nu() / instance.b[i] * load[i] - schedule.beta(s);
    log_chi += -schedule.nu_prime() / q * trace.utilities[j] + schedule.beta_prime(s);

    const double slack = level_slack(schedule.kappa_at(s), eps);
    alive = alive && resource_event(R, instance.b, s, n, slack) && utility_event(S, p_star, s, n, slack) &&
            p_star <= q * (1.0 + kEstimateSlack) && q * schedule.alpha(s) <= p_star * (1.0 + kEstimateSlack);
    double value = 0.0;
    if (alive) {
      for (double lp : log_phi) value += std::exp(lp);
      value += static_cast<double>(m) * std::exp(log_chi);
    }
    out.values.push_back(value);
  }
  return out;
}

SandwichBounds sandwich_bounds(const Instance& instance, std::span<const std::size_t> order,
                               std::span<const Decision> x_star, std::span<const double> y_star,
                               std::size_t prefix_length, int h, double eps) {
  require_feasible(instance, x_star);
  require_order(instance, order);
  const std::size_t n = instance.n();
  if (prefix_length == 0 || prefix_length > n) throw std::invalid_argument("sandwich_bounds: bad prefix length");
  if (y_star.size() != instance.m) throw std::invalid_argument("sandwich_bounds: y_star must have m entries");

  std::vector<const Item*> prefix;
  for (std::size_t s = 0; s < prefix_length; ++s) prefix.push_back(&instance.items[order[s]]);
  const double fraction = static_cast<double>(prefix_length) / static_cast<double>(n);
  const double th = theta(h, eps);

  SandwichBounds out;
  out.value = estimate_prefix_value(prefix, h, eps, instance.b, n);

  double utility = 0.0;
  double dual_sum = 0.0;
  std::vector<double> load(instance.m, 0.0);
  for (std::size_t s = 0; s < prefix_length; ++s) {
    const Item& item = *prefix[s];
    const Decision& x = x_star[order[s]];
    utility += *eval_utility(item.f, x);
    const auto used = item.A.apply(x);
    for (std::size_t i = 0; i < instance.m; ++i) load[i] += used[i];
    dual_sum += -conjugate_value(item.f, item.A.apply_transpose(y_star));
  }
  bool fits = true;
  for (std::size_t i = 0; i < instance.m; ++i) {
    if (load[i] > fraction * (1.0 + th) * instance.b[i] * (1.0 + kBudgetTolerance)) fits = false;
  }
  if (fits) out.lower = utility / (fraction * (1.0 - th));
  const double by = std::inner_product(instance.b.begin(), instance.b.end(), y_star.begin(), 0.0);
  out.upper = dual_sum / (fraction * (1.0 - th)) + (1.0 + th) / (1.0 - th) * by;
  return out;
}

EventStats event_stats(const Instance& instance, double eps, double gamma, std::size_t perm_count,
                       std::uint64_t seed) {
  if (perm_count == 0) throw std::invalid_argument("event_stats: perm_count must be >= 1");
  const std::size_t n = instance.n();
  const std::size_t m = instance.m;
  const Schedule schedule = build_schedule(n, eps, gamma);
  const std::size_t w = schedule.warmup();
  const int levels = schedule.levels();
  const OfflineSolution offline = offline_optimum(instance);
  const double p_star = offline.value;
  if (!(p_star > 0.0)) throw std::invalid_argument("event_stats: needs P* > 0");

  struct Hits {
    bool resource = false;
    bool utility = false;
    bool below = false;
    bool above = false;
  };
  std::vector<Hits> hits(perm_count);
  parallel_for(perm_count, resolve_thread_count(), [&](std::size_t p) {
    Rng rng(permutation_seed(seed, p));
    const auto order = sample_permutation(n, rng);
    std::vector<std::vector<double>> R;
    for (std::size_t i = 0; i < m; ++i) R.push_back(martingale_R(instance, offline.decisions, order, i).values);
    const auto S = martingale_S(instance, offline.decisions, p_star, order).values;
    Hits& out = hits[p];
    for (std::size_t t = 1; t + w <= n; ++t) {
      const double slack = level_slack(kappa(t, n, eps), eps);
      out.resource = out.resource || !resource_event(R, instance.b, t, n, slack);
      out.utility = out.utility || !utility_event(S, p_star, t, n, slack);
    }
    std::vector<const Item*> items;
    for (std::size_t idx : order) items.push_back(&instance.items[idx]);
    for (int h = 0; h < levels; ++h) {
      const std::size_t length = schedule.breakpoint(h);
      const double estimate = estimate_prefix_value(std::span(items).first(length), h, eps, instance.b, n);
      const double th = theta(h, eps);
      out.below = out.below || estimate < p_star * (1.0 - kEstimateSlack);
      out.above = out.above || estimate > (1.0 + 2.0 * th) / (1.0 - th) * p_star * (1.0 + kEstimateSlack);
    }
  });

  const double e6 = std::exp(-eps * eps / (6.0 * gamma));
  const double e4 = std::exp(-eps * eps / (4.0 * gamma));
  const double dm = static_cast<double>(m);
  const double dl = static_cast<double>(levels);
  EventStats stats;
  stats.events = {
      {"resource_deviation", 0, perm_count, dm * dl * e6},
      {"utility_deviation", 0, perm_count, dl * e4},
      {"estimate_below_optimum", 0, perm_count, dl * (e4 + dm * e6)},
      {"estimate_above_band", 0, perm_count, dl * e6},
  };
  for (const Hits& h : hits) {
    stats.events[0].hits += h.resource ? 1 : 0;
    stats.events[1].hits += h.utility ? 1 : 0;
    stats.events[2].hits += h.below ? 1 : 0;
    stats.events[3].hits += h.above ? 1 : 0;
  }
  return stats;
}

EventEstimate max_load_stats(const Instance& instance, double eps, double gamma, std::size_t perm_count,
                             std::uint64_t seed) {
  if (perm_count == 0) throw std::invalid_argument("max_load_stats: perm_count must be >= 1");
  const std::size_t n = instance.n();
  const std::size_t horizon = n - warmup_length(n, eps);
  if (horizon == 0) throw std::invalid_argument("max_load_stats: horizon n - w must be positive");
  const double limit = 1.0 + 2.0 * eps;

  std::vector<char> hit(perm_count, 0);
  parallel_for(perm_count, resolve_thread_count(), [&](std::size_t p) {
    Rng rng(permutation_seed(seed, p));
    const auto order = sample_permutation(n, rng);
    const auto path = feasibility_greedy_run(instance, order, eps, gamma);
    const auto& load = path[horizon - 1];
    hit[p] = *std::max_element(load.begin(), load.end()) > limit ? 1 : 0;
  });

  const double m = static_cast<double>(instance.m);
  const bool applies = eps <= 0.25 && gamma <= eps * eps / (12.0 * std::log(m / eps));
  EventEstimate out{"max_load_above_1_plus_2eps", 0, perm_count, applies ? eps : 1.0};
  out.hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
  return out;
}

}  // namespace online_alloc
