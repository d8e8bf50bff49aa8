// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "online_alloc/algorithms.hpp"
#include "online_alloc/bench.hpp"
#include "online_alloc/diagnostics.hpp"
#include "online_alloc/generators.hpp"
#include "online_alloc/lp.hpp"
#include "online_alloc/schedule.hpp"

namespace oa = online_alloc;

namespace {

// Pinned tolerances.
constexpr double kCrWindow = 0.07;
constexpr double kSpeedDlaFactor = 3.0;
constexpr double kSpeedKrtvFactor = 10.0;
constexpr double kBudgetSlack = 1e-9;
constexpr std::size_t kFeasibilityRunsMin = 10000;
constexpr double kLpTolerance = 1e-6;
constexpr std::size_t kLpProblems = 200;
constexpr double kMartingaleTolerance = 1e-12;
constexpr double kMartingaleSeconds = 10.0;
constexpr std::size_t kPhiPerms = 500;
constexpr double kPhiStandardErrors = 2.0;
constexpr std::size_t kMaxLoadPerms = 200;
constexpr double kMaxLoadSeconds = 120.0;
constexpr std::size_t kSandwichPrefixes = 50;
constexpr double kSandwichTolerance = 1e-6;
constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool pass = false;
  std::string summary;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string format(const char* fmt, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, fmt, args...);
  return buffer;
}

struct Reference {
  const char* algorithm;
  double eps;  // 0 when unused
  double c30;
  double c60;
};

constexpr Reference kTable[] = {
    {"esa", 0.05, 0.87, 0.92}, {"dla", 0.05, 0.80, 0.84}, {"ola", 0.1, 0.65, 0.72},
    {"krtv", 0.0, 0.84, 0.88}, {"krtv5", 0.0, 0.87, 0.90},
};

struct CrTable {
  // rows[c][reference index]
  std::vector<std::vector<oa::BenchRow>> rows;
};

oa::BenchRow run_cell(const std::string& spec, const Reference& ref) {
  oa::BenchConfig config;
  config.sources = {oa::InstanceSource::from_generator(spec)};
  config.algorithms = {oa::parse_algorithm(ref.algorithm)};
  if (ref.eps > 0) config.eps = {ref.eps};
  config.perms = 100;
  config.instances = 3;
  config.seed = kSeed;
  config.threads = 1;
  return oa::run_bench(config).rows.at(0);
}

CrTable measure_table() {
  CrTable table;
  for (const char* spec : {"d=3,c=30", "d=3,c=60"}) {
    std::vector<oa::BenchRow> rows;
    for (const auto& ref : kTable) rows.push_back(run_cell(spec, ref));
    table.rows.push_back(std::move(rows));
  }
  return table;
}

Outcome ac1(const CrTable& table) {
  bool pass = true;
  std::string failing;
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t r = 0; r < std::size(kTable); ++r) {
      const auto& ref = kTable[r];
      const auto& row = table.rows[c][r];
      const double target = c == 0 ? ref.c30 : ref.c60;
      const bool ok = std::abs(row.mean_cr - target) <= kCrWindow;
      std::printf("  AC1 %-8s c=%-3d eps=%-5s cr=%.4f std=%.4f target=%.2f +-%.2f %s\n", ref.algorithm,
                  c == 0 ? 30 : 60, row.eps ? format("%.2f", *row.eps).c_str() : "n/a", row.mean_cr, row.std_cr,
                  target, kCrWindow, ok ? "ok" : "outside");
      if (!ok) {
        pass = false;
        failing += format(" %s/c=%d", ref.algorithm, c == 0 ? 30 : 60);
      }
    }
  }
  return {pass, pass ? "all 10 cells within the window" : "outside the window:" + failing};
}

Outcome ac2(const CrTable& table) {
  const auto& rows = table.rows[1];
  const double esa = rows[0].mean_time_s;
  const double dla = rows[1].mean_time_s;
  const double krtv = rows[3].mean_time_s;
  const bool pass = esa < kSpeedDlaFactor * dla && krtv > kSpeedKrtvFactor * esa;
  return {pass, format("c=60 per-order seconds: esa=%.6f dla=%.6f krtv=%.6f (krtv/esa=%.1f)", esa, dla, krtv,
                       krtv / esa)};
}

Outcome ac3() {
  std::vector<std::pair<oa::AlgorithmSpec, double>> algorithms{
      {oa::parse_algorithm("esa"), 0.1},  {oa::parse_algorithm("esa"), 0.25},
      {oa::parse_algorithm("ola"), 0.1},  {oa::parse_algorithm("dla"), 0.1},
      {oa::parse_algorithm("krtv"), 0.0}, {oa::parse_algorithm("krtv5"), 0.0}};
  std::size_t runs = 0;
  std::size_t violations = 0;
  oa::Rng rng(kSeed);
  for (int trial = 0; trial < 120; ++trial) {
    const oa::Instance instance =
        trial % 2 == 0 ? oa::random_linear_instance(30 + rng.below(20), 1 + rng.below(3), 1 + rng.below(3), 0.6,
                                                    rng.next(), 0.05 + 0.2 * rng.uniform())
                       : oa::build_worst_case({1 + static_cast<int>(rng.below(2)), 6.0 + rng.below(6), rng.next()});
    const double p_star = oa::offline_optimum(instance).value;
    const double gamma = p_star > 0 ? oa::gamma_of_instance(instance, p_star).value() : 1.0;
    for (int p = 0; p < 8; ++p) {
      const auto order = oa::sample_permutation(instance.n(), rng);
      const oa::Instance permuted = instance.permuted(order);
      for (const auto& [spec, eps] : algorithms) {
        for (auto guard : {oa::GuardMode::raw_cumulative, oa::GuardMode::checked_cumulative}) {
          oa::RunOptions options;
          options.guard = guard;
          const auto result = oa::run_algorithm(spec, instance, order, eps, gamma, options);
          const auto used = oa::total_consumption(permuted, result.decisions);
          ++runs;
          for (std::size_t i = 0; i < instance.m; ++i) {
            if (used[i] > instance.b[i] * (1.0 + kBudgetSlack)) {
              ++violations;
              break;
            }
          }
        }
      }
    }
  }
  return {runs >= kFeasibilityRunsMin && violations == 0,
          format("%zu runs, %zu budget violations (slack %.0e b)", runs, violations, kBudgetSlack)};
}

Outcome ac4() {
  oa::Rng rng(kSeed + 4);
  std::size_t mismatches = 0;
  std::size_t certificate_failures = 0;
  std::size_t infeasible = 0;
  double worst = 0.0;
  for (std::size_t trial = 0; trial < kLpProblems; ++trial) {
    const std::size_t rows = 1 + rng.below(6);
    const std::size_t cols = 1 + rng.below(14 - rows);
    const bool boxed = rng.coin();
    oa::LpProblem p;
    p.constraints = oa::Matrix(rows, cols);
    for (std::size_t j = 0; j < cols; ++j) p.objective.push_back(rng.uniform(-1.0, 2.0));
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        p.constraints(i, j) = boxed ? rng.uniform(-0.5, 1.5) : rng.uniform(0.05, 1.5);
      }
      p.rhs.push_back(boxed ? rng.uniform(-0.3, 2.0) : rng.uniform(0.1, 2.0));
    }
    if (boxed) {
      for (std::size_t j = 0; j < cols; ++j) p.upper.push_back(rng.uniform(0.2, 3.0));
    }
    const auto oracle = oa::vertex_oracle(p);
    const auto s = oa::solve_lp(p);
    if (!oracle) {
      ++infeasible;
      if (s.status != oa::LpStatus::infeasible) ++mismatches;
      continue;
    }
    if (s.status != oa::LpStatus::optimal) {
      ++mismatches;
      continue;
    }
    const double gap = std::abs(s.value - *oracle);
    worst = std::max(worst, gap);
    if (gap > kLpTolerance) ++mismatches;
    const auto used = p.constraints.apply(s.x);
    bool ok = std::abs(oa::lp_dual_objective(p, s.y) - s.value) <= kLpTolerance * (1 + std::abs(s.value));
    for (std::size_t i = 0; i < rows; ++i) {
      ok = ok && used[i] <= p.rhs[i] + kLpTolerance && s.y[i] >= -kLpTolerance &&
           std::abs(s.y[i] * (p.rhs[i] - used[i])) <= kLpTolerance;
    }
    for (std::size_t j = 0; j < cols; ++j) {
      ok = ok && s.x[j] >= -kLpTolerance && s.x[j] <= p.upper_bound(j) + kLpTolerance;
    }
    if (!ok) ++certificate_failures;
  }
  return {mismatches == 0 && certificate_failures == 0,
          format("%zu problems (%zu infeasible), %zu value mismatches, %zu certificate failures, max gap %.2e",
                 kLpProblems, infeasible, mismatches, certificate_failures, worst)};
}

Outcome ac5() {
  const auto start = std::chrono::steady_clock::now();
  oa::Rng rng(kSeed + 5);
  double worst = 0.0;
  std::size_t checks = 0;
  bool pass = true;
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 6; ++trial) {
      const oa::Instance instance =
          oa::random_linear_instance(n, 1 + rng.below(3), 1 + rng.below(3), 0.8, rng.next(), 0.7);
      const auto opt = oa::offline_optimum(instance);
      const auto check = oa::exact_martingale_check(instance, opt.decisions, opt.value);
      worst = std::max({worst, check.max_error_R, check.max_error_S});
      pass = pass && check.passed(kMartingaleTolerance);
      ++checks;
    }
  }
  const double elapsed = seconds_since(start);
  return {pass && elapsed < kMartingaleSeconds,
          format("%zu instances with n in 2..6, max error %.2e, %.2f s", checks, worst, elapsed)};
}

Outcome ac6() {
  const oa::WorstCaseSpec spec{2, 400.0, kSeed};
  const oa::Instance instance = oa::build_worst_case(spec);
  const auto opt = oa::offline_optimum(instance);
  const double eps = 0.25;
  std::vector<double> finals;
  std::size_t zeros = 0;
  for (std::size_t p = 0; p < kPhiPerms; ++p) {
    oa::Rng rng(oa::permutation_seed(kSeed, p));
    const auto order = oa::sample_permutation(instance.n(), rng);
    const auto trace = oa::phi_trace(instance, order, eps, 1.0 / spec.c, opt.decisions, opt.value);
    finals.push_back(trace.values.back());
    zeros += trace.values.back() == 0.0 ? 1 : 0;
  }
  const double count = static_cast<double>(finals.size());
  double mean = 0.0;
  for (double v : finals) mean += v / count;
  double squares = 0.0;
  for (double v : finals) squares += (v - mean) * (v - mean);
  const double se = std::sqrt(squares / (count - 1.0) / count);
  const double limit = 2.0 * instance.m + kPhiStandardErrors * se;
  return {mean <= limit, format("n=%zu, mean final potential %.4f (se %.4f) vs limit %.4f, %zu of %zu orders hit 0",
                                instance.n(), mean, se, limit, zeros, finals.size())};
}

Outcome ac7() {
  const auto start = std::chrono::steady_clock::now();
  const double eps = 0.25;
  const std::size_t m = 2;
  const double gamma_limit = eps * eps / (12.0 * std::log(m / eps));
  std::size_t n = 2000;
  oa::FeasibilityInstance generated = oa::feasibility_instance(n, m, kSeed);
  while (oa::bid_to_budget_ratio(generated.instance) > gamma_limit && n < 20000) {
    n += 1000;
    generated = oa::feasibility_instance(n, m, kSeed);
  }
  const double gamma = oa::bid_to_budget_ratio(generated.instance);
  const auto stats = oa::max_load_stats(generated.instance, eps, gamma, kMaxLoadPerms, kSeed);
  const double elapsed = seconds_since(start);
  const bool pass = gamma <= gamma_limit && !stats.vacuous() && stats.frequency() <= eps && elapsed < kMaxLoadSeconds;
  return {pass, format("n=%zu gamma=%.5f (limit %.5f), exceed frequency %.4f over %zu orders vs %.2f, %.1f s", n,
                       gamma, gamma_limit, stats.frequency(), stats.samples, eps, elapsed)};
}

Outcome ac8() {
  oa::Rng rng(kSeed + 8);
  std::size_t complete = 0;
  std::size_t upper_only = 0;
  std::size_t failures = 0;
  double worst = 0.0;
  const double eps = 0.1;
  while (complete < kSandwichPrefixes && complete + upper_only < 20 * kSandwichPrefixes) {
    const oa::Instance instance = oa::random_linear_instance(80, 1 + rng.below(3), 1 + rng.below(3), 0.7, rng.next(), 0.05);
    const auto opt = oa::offline_optimum(instance);
    const auto order = oa::sample_permutation(instance.n(), rng);
    const int h = static_cast<int>(rng.below(static_cast<std::uint64_t>(oa::level_count(eps))));
    const std::size_t length = 8 + rng.below(instance.n() / 2 - 7);
    const auto bounds = oa::sandwich_bounds(instance, order, opt.decisions, opt.duals, length, h, eps);
    double violation = bounds.value - bounds.upper;
    if (bounds.lower) {
      violation = std::max(violation, *bounds.lower - bounds.value);
      ++complete;
    } else {
      ++upper_only;
    }
    worst = std::max(worst, violation);
    if (violation > kSandwichTolerance) ++failures;
  }
  return {complete == kSandwichPrefixes && failures == 0,
          format("%zu full sandwiches (+%zu upper-only), %zu violations, max violation %.2e", complete, upper_only,
                 failures, worst)};
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const CrTable table = measure_table();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1", [&] { return ac1(table); }}, {"AC2", [&] { return ac2(table); }}, {"AC3", ac3}, {"AC4", ac4},
      {"AC5", ac5},                        {"AC6", ac6},                        {"AC7", ac7}, {"AC8", ac8},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const Outcome outcome = run();
    std::printf("%s %s %s\n", name, outcome.pass ? "PASS" : "FAIL", outcome.summary.c_str());
    std::fflush(stdout);
    failed += outcome.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed (%.1f s)\n", failed, criteria.size(), seconds_since(start));
  return failed == 0 ? 0 : 1;
}
