#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "online_alloc/model.hpp"
#include "online_alloc/schedule.hpp"

namespace online_alloc {

/// Which cumulative sum the acceptance guard compares against the budget.
enum class GuardMode {
  /// Sum of A x over every raw decision since the warmup. Once a resource
  /// overflows, nothing is accepted afterwards.
  raw_cumulative,
  /// Sum of A x over accepted decisions only: an item is accepted iff it fits.
  checked_cumulative,
};

/// How the dual-price baselines treat an option whose reduced cost is zero
/// at the estimated duals. LP duals put every fractionally accepted item of
/// the prefix exactly on this boundary.
enum class TieRule {
  /// Accept the tied option when its utility is positive.
  accept,
  /// Reject it, as assign_from_dual does.
  reject,
};

struct RunOptions {
  GuardMode guard = GuardMode::raw_cumulative;
  TieRule ties = TieRule::accept;  // OLA, DLA and KRTV only
};

/// assign_from_dual with the tie rule applied to the linear inequality family.
Decision assign_at_price(const UtilityFunction& f, std::span<const double> v, TieRule ties);

/// Dual state of the exponentiated subgradient algorithm. The weights are
/// stored as logarithms; y and y' are exp(log_y) and exp(log_y_prime).
struct EsaState {
  std::size_t t = 0;  // 1-based step about to be processed
  std::vector<double> log_y;
  double log_y_prime = 0.0;
  double q = 0.0;  // current estimate of the offline optimum
  std::vector<double> raw_consumption;
  std::vector<double> checked_consumption;
  double utility = 0.0;  // over guarded decisions
};

/// Fixed dual estimate used between recomputations by the LP-based baselines.
struct DualVector {
  std::vector<double> y;
};

/// Initial state at t = w + 1: y_i = exp(-beta_{w+1}) / m, y' = exp(beta'_{w+1}).
EsaState esa_initial_state(const Schedule& schedule, std::size_t m);

/// argmin_z sum_i (y_i / b_i)(A z)_i - (y' / q) f(z), computed as
/// assign_from_dual(f, A^T y'') with y'' = (q / y') [y_1/b_1, ..., y_m/b_m].
Decision esa_assign(const EsaState& state, const Item& item, std::span<const double> b);

/// Multiplicative update of (y, y') for step state.t using beta_{t+1},
/// beta'_{t+1}; advances t and the raw consumption.
EsaState esa_update(EsaState state, const Item& item, const Decision& x, const Schedule& schedule,
                    std::span<const double> b);

/// Offline optimum over the prefix with budget fraction * (1 + theta_h) * b,
/// divided by fraction * (1 - theta_h), where fraction = prefix.size() / n.
double estimate_prefix_value(std::span<const Item* const> prefix, int h, double eps,
                             std::span<const double> b, std::size_t n);

/// Budget-row duals of the prefix LP with budget
/// fraction * (1 - 2^(-h/2) sqrt(eps)) * b.
DualVector dual_estimate(std::span<const Item* const> prefix, int h, double eps,
                         std::span<const double> b, std::size_t n);

/// Per-step record of an ESA run, indexed by t - w - 1.
struct EsaTrace {
  std::vector<Decision> raw_decisions;
  std::vector<double> q;
  std::vector<double> utilities;  // f(x_t) over raw decisions
};

RunResult esa_run(const Instance& instance, std::span<const std::size_t> order, double eps,
                  double gamma, const RunOptions& options = {}, EsaTrace* trace = nullptr);

/// One dual estimate at the end of the warmup, reused for the rest of the run.
RunResult ola_run(const Instance& instance, std::span<const std::size_t> order, double eps,
                  const RunOptions& options = {});

/// Dual estimate refreshed at every doubling breakpoint.
RunResult dla_run(const Instance& instance, std::span<const std::size_t> order, double eps,
                  const RunOptions& options = {});

/// Duals recomputed from the prefix LP (budget t/n * b) at steps t with
/// (t - 1) % period == 0 and at t = n.
RunResult krtv_run(const Instance& instance, std::span<const std::size_t> order,
                   std::size_t period, const RunOptions& options = {});

/// Multiplicative-potential greedy over the probability simplex with b = 1.
/// Returns the cumulative consumption after each step (n rows of m values).
std::vector<std::vector<double>> feasibility_greedy_run(const Instance& instance,
                                                std::span<const std::size_t> order, double eps,
                                                double gamma);

struct AlgorithmSpec {
  enum class Kind { esa, ola, dla, krtv };
  Kind kind = Kind::esa;
  std::size_t period = 1;  // krtv only

  bool uses_eps() const { return kind != Kind::krtv; }
  std::string name() const;
};

/// Accepts esa, ola, dla, krtv and krtvK for a positive integer K.
AlgorithmSpec parse_algorithm(const std::string& text);

RunResult run_algorithm(const AlgorithmSpec& spec, const Instance& instance,
                        std::span<const std::size_t> order, double eps, double gamma,
                        const RunOptions& options = {});

}  // namespace online_alloc
