#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "online_alloc/model.hpp"

namespace online_alloc {

enum class TraceKind { resource, utility, potential };

/// values[j] is the sequence at step first_t + j (1-based steps).
struct MartingaleTrace {
  TraceKind kind = TraceKind::resource;
  std::size_t resource = 0;  // resource traces only
  std::size_t first_t = 1;
  std::vector<double> values;

  double at(std::size_t t) const { return values.at(t - first_t); }
  std::size_t last_t() const { return first_t + values.size() - 1; }
};

/// R_t = (sum_{s >= t} (A x*)_i at position s) / (n - t + 1) - b_i / n for
/// t = 1..n. x_star is indexed like instance.items. Throws
/// std::invalid_argument when x_star is infeasible.
MartingaleTrace martingale_R(const Instance& instance, std::span<const Decision> x_star,
                             std::span<const std::size_t> order, std::size_t i);

/// S_t = (sum_{s >= t} f(x*) at position s) / (n - t + 1) - P* / n.
MartingaleTrace martingale_S(const Instance& instance, std::span<const Decision> x_star, double p_star,
                             std::span<const std::size_t> order);

struct MartingaleCheck {
  std::size_t permutations = 0;
  double max_error_R = 0.0;  // over every resource, step and prefix
  double max_error_S = 0.0;
  bool passed(double tolerance) const { return max_error_R <= tolerance && max_error_S <= tolerance; }
};

/// Enumerates all n! orders and compares the mean of R_{t+1} (and S_{t+1})
/// over the orders sharing each prefix sigma(1..t-1) with R_t (S_t), which
/// that prefix determines. Requires n <= 8.
MartingaleCheck exact_martingale_check(const Instance& instance, std::span<const Decision> x_star,
                                       double p_star);

/// Phi^t = (sum_i phi_i^t + m chi^t) prod_{s <= t} 1{F_s} for t = w..T with
/// T = max(w, n - 2w), where F_s = B_s and C_s and P* <= q_s <= P*/alpha_s.
/// x_s and q_s come from an ESA run on the same order; Phi^w = 2m.
MartingaleTrace phi_trace(const Instance& instance, std::span<const std::size_t> order, double eps,
                          double gamma, std::span<const Decision> x_star, double p_star);

/// Sandwich around the prefix estimate at level h, built from a full-horizon
/// optimal pair (x*, y*). lower is empty when the prefix of x* overflows the
/// scaled budget.
struct SandwichBounds {
  std::optional<double> lower;  // P~_h
  double value = 0.0;           // P_h
  double upper = 0.0;           // D~_h
};

SandwichBounds sandwich_bounds(const Instance& instance, std::span<const std::size_t> order,
                               std::span<const Decision> x_star, std::span<const double> y_star,
                               std::size_t prefix_length, int h, double eps);

struct EventEstimate {
  std::string name;
  std::size_t hits = 0;
  std::size_t samples = 0;
  double bound = 0.0;  // analytic reference

  double frequency() const { return samples == 0 ? 0.0 : static_cast<double>(hits) / samples; }
  bool vacuous() const { return bound >= 1.0; }
  bool consistent() const { return vacuous() || frequency() <= bound; }
};

/// Monte-Carlo frequencies over random orders, each next to its reference
/// bound (unions over t <= n - w and over h = 0..L-1):
///   some B_t fails              m L exp(-eps^2 / (6 gamma))
///   some C_t fails              L exp(-eps^2 / (4 gamma))
///   some P_h < P*               L (exp(-eps^2 / (4 gamma)) + m exp(-eps^2 / (6 gamma)))
///   some P_h > (1+2 theta_h)/(1-theta_h) P*   L exp(-eps^2 / (6 gamma))
struct EventStats {
  std::vector<EventEstimate> events;
};

EventStats event_stats(const Instance& instance, double eps, double gamma, std::size_t perm_count,
                       std::uint64_t seed);

/// Frequency of max_i load_i > 1 + 2 eps after T = n - w steps of the
/// multiplicative-potential greedy. The bound is eps when eps <= 1/4 and
/// gamma <= eps^2 / (12 ln(m / eps)), and 1 (vacuous) otherwise.
EventEstimate max_load_stats(const Instance& instance, double eps, double gamma, std::size_t perm_count,
                             std::uint64_t seed);

}  // namespace online_alloc
