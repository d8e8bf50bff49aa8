#include "online_alloc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace online_alloc {

namespace {

enum class Bound : unsigned char { lower, upper, basic };

// Dense bounded-variable tableau. Columns: structural [0, N), slacks
// [N, N + M), artificials after that (one per row with negative rhs).
class Tableau {
 public:
  Tableau(const LpProblem& p, const LpConfig& config)
      : config_(config), rows_(p.rows()), structural_(p.cols()) {
    std::size_t artificials = 0;
    for (double g : p.rhs) artificials += g < 0.0 ? 1 : 0;
    cols_ = structural_ + rows_ + artificials;

    table_.assign(rows_ * cols_, 0.0);
    upper_.assign(cols_, kInfinity);
    status_.assign(cols_, Bound::lower);
    basis_.assign(rows_, 0);
    values_.assign(rows_, 0.0);
    for (std::size_t j = 0; j < structural_; ++j) upper_[j] = p.upper_bound(j);

    std::size_t next_artificial = structural_ + rows_;
    for (std::size_t i = 0; i < rows_; ++i) {
      const double sign = p.rhs[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < structural_; ++j) at(i, j) = sign * p.constraints(i, j);
      at(i, structural_ + i) = sign;
      if (sign < 0.0) {
        at(i, next_artificial) = 1.0;  // -1 in the row, times sign
        basis_[i] = next_artificial++;
      } else {
        basis_[i] = structural_ + i;
      }
      status_[basis_[i]] = Bound::basic;
      values_[i] = sign * p.rhs[i];
    }
    first_artificial_ = structural_ + rows_;
  }

  bool has_artificials() const { return cols_ > first_artificial_; }

  // Maximizes cost^T z from the current basis. Returns false when unbounded.
  bool optimize(const std::vector<double>& cost, std::size_t& iterations, std::size_t cap) {
    reduced_.assign(cols_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) {
      if (status_[j] == Bound::basic) continue;
      double acc = cost[j];
      for (std::size_t i = 0; i < rows_; ++i) acc -= cost[basis_[i]] * at(i, j);
      reduced_[j] = acc;
    }
    const double tol = config_.optimality_tolerance;
    while (true) {
      // Bland: lowest-index improving column.
      std::size_t entering = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (status_[j] == Bound::lower && upper_[j] > 0.0 && reduced_[j] > tol) {
          entering = j;
          break;
        }
        if (status_[j] == Bound::upper && reduced_[j] < -tol) {
          entering = j;
          break;
        }
      }
      if (entering == cols_) return true;
      if (++iterations > cap) {
        throw LpError("simplex exceeded " + std::to_string(cap) + " iterations");
      }
      const double dir = status_[entering] == Bound::lower ? 1.0 : -1.0;

      double step = upper_[entering];  // bound flip
      std::size_t leaving_row = rows_;
      constexpr double kTie = 1e-12;
      for (std::size_t i = 0; i < rows_; ++i) {
        const double alpha = dir * at(i, entering);
        if (std::abs(alpha) <= config_.pivot_tolerance) continue;
        double ratio;
        if (alpha > 0.0) {
          ratio = std::max(values_[i], 0.0) / alpha;
        } else {
          const double cap_i = upper_[basis_[i]];
          if (cap_i == kInfinity) continue;
          ratio = std::max(cap_i - values_[i], 0.0) / -alpha;
        }
        if (ratio < step - kTie) {
          step = ratio;
          leaving_row = i;
        } else if (ratio <= step + kTie && leaving_row < rows_ &&
                   basis_[i] < basis_[leaving_row]) {
          leaving_row = i;
        }
      }
      if (step == kInfinity) return false;

      for (std::size_t i = 0; i < rows_; ++i) values_[i] -= dir * step * at(i, entering);

      if (leaving_row == rows_) {
        status_[entering] = status_[entering] == Bound::lower ? Bound::upper : Bound::lower;
        continue;
      }

      const double start = status_[entering] == Bound::lower ? 0.0 : upper_[entering];
      const std::size_t leaving = basis_[leaving_row];
      const double alpha = dir * at(leaving_row, entering);
      status_[leaving] = alpha > 0.0 ? Bound::lower : Bound::upper;
      pivot(leaving_row, entering);
      basis_[leaving_row] = entering;
      status_[entering] = Bound::basic;
      values_[leaving_row] = start + dir * step;
    }
  }

  double artificial_sum() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] >= first_artificial_) sum += std::max(values_[i], 0.0);
    }
    return sum;
  }

  void fix_artificials() {
    for (std::size_t j = first_artificial_; j < cols_; ++j) upper_[j] = 0.0;
  }

  std::size_t cols() const { return cols_; }

  std::vector<double> primal() const {
    std::vector<double> x(structural_, 0.0);
    for (std::size_t j = 0; j < structural_; ++j) {
      if (status_[j] == Bound::upper) x[j] = upper_[j];
    }
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < structural_) x[basis_[i]] = std::clamp(values_[i], 0.0, upper_[basis_[i]]);
    }
    return x;
  }

  // y_i = -(reduced cost of slack i).
  std::vector<double> duals() const {
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const std::size_t slack = structural_ + i;
      y[i] = status_[slack] == Bound::basic ? 0.0 : std::max(0.0, -reduced_[slack]);
    }
    return y;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return table_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return table_[i * cols_ + j]; }

  void pivot(std::size_t r, std::size_t q) {
    double* pivot_row = &table_[r * cols_];
    const double inv = 1.0 / pivot_row[q];
    for (std::size_t j = 0; j < cols_; ++j) pivot_row[j] *= inv;
    pivot_row[q] = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      double* row = &table_[i * cols_];
      const double factor = row[q];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) row[j] -= factor * pivot_row[j];
      row[q] = 0.0;
    }
    const double factor = reduced_[q];
    if (factor != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= factor * pivot_row[j];
      reduced_[q] = 0.0;
    }
  }

  LpConfig config_;
  std::size_t rows_;
  std::size_t structural_;
  std::size_t cols_ = 0;
  std::size_t first_artificial_ = 0;
  std::vector<double> table_;
  std::vector<double> upper_;
  std::vector<Bound> status_;
  std::vector<std::size_t> basis_;
  std::vector<double> values_;
  std::vector<double> reduced_;
};

void check_problem(const LpProblem& p) {
  if (p.constraints.cols() != p.cols() && p.rows() > 0) {
    throw std::invalid_argument("LpProblem: constraint columns must match objective size");
  }
  if (p.rhs.size() != p.rows()) throw std::invalid_argument("LpProblem: rhs size mismatch");
  if (!p.upper.empty() && p.upper.size() != p.cols()) {
    throw std::invalid_argument("LpProblem: upper bound size mismatch");
  }
  for (double g : p.rhs) {
    if (!std::isfinite(g)) throw std::invalid_argument("LpProblem: rhs must be finite");
  }
  for (std::size_t j = 0; j < p.cols(); ++j) {
    if (!(p.upper_bound(j) >= 0.0)) throw std::invalid_argument("LpProblem: upper bounds must be >= 0");
  }
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const LpConfig& config) {
  check_problem(problem);
  const std::size_t M = problem.rows();
  const std::size_t N = problem.cols();
  const std::size_t cap = 10 * (M + N) * (M + N) + 10;

  Tableau tableau(problem, config);
  LpSolution solution;

  if (tableau.has_artificials()) {
    std::vector<double> phase_one(tableau.cols(), 0.0);
    for (std::size_t j = N + M; j < tableau.cols(); ++j) phase_one[j] = -1.0;
    tableau.optimize(phase_one, solution.iterations, cap);
    if (tableau.artificial_sum() > config.feasibility_tolerance) {
      solution.status = LpStatus::infeasible;
      return solution;
    }
    tableau.fix_artificials();
  }

  std::vector<double> cost(tableau.cols(), 0.0);
  std::copy(problem.objective.begin(), problem.objective.end(), cost.begin());
  const bool bounded = tableau.optimize(cost, solution.iterations, cap);

  solution.x = tableau.primal();
  solution.value = 0.0;
  for (std::size_t j = 0; j < N; ++j) solution.value += problem.objective[j] * solution.x[j];
  if (!bounded) {
    solution.status = LpStatus::unbounded;
    return solution;
  }
  solution.status = LpStatus::optimal;
  solution.y = tableau.duals();
  return solution;
}

double lp_dual_objective(const LpProblem& problem, std::span<const double> y) {
  double value = 0.0;
  for (std::size_t i = 0; i < problem.rows(); ++i) value += problem.rhs[i] * y[i];
  for (std::size_t j = 0; j < problem.cols(); ++j) {
    double reduced = problem.objective[j];
    double scale = std::abs(reduced);
    for (std::size_t i = 0; i < problem.rows(); ++i) {
      reduced -= problem.constraints(i, j) * y[i];
      scale += std::abs(problem.constraints(i, j) * y[i]);
    }
    if (reduced <= 0.0) continue;
    const double u = problem.upper_bound(j);
    if (u == kInfinity) {
      if (reduced <= kDualRoundoff * (1.0 + scale)) continue;
      return kInfinity;
    }
    value += u * reduced;
  }
  return value;
}

std::optional<double> vertex_oracle(const LpProblem& problem) {
  check_problem(problem);
  const std::size_t M = problem.rows();
  const std::size_t N = problem.cols();
  if (M + N > 14) throw std::invalid_argument("vertex_oracle: rows + cols must be <= 14");
  if (N == 0) {
    for (double g : problem.rhs) {
      if (g < 0.0) return std::nullopt;
    }
    return 0.0;
  }

  // Every constraint as a^T x <= beta.
  struct Halfspace {
    std::vector<double> a;
    double beta;
  };
  std::vector<Halfspace> halfspaces;
  for (std::size_t i = 0; i < M; ++i) {
    auto row = problem.constraints.row(i);
    halfspaces.push_back({std::vector<double>(row.begin(), row.end()), problem.rhs[i]});
  }
  for (std::size_t j = 0; j < N; ++j) {
    std::vector<double> a(N, 0.0);
    a[j] = -1.0;
    halfspaces.push_back({a, 0.0});
    if (problem.upper_bound(j) != kInfinity) {
      a[j] = 1.0;
      halfspaces.push_back({a, problem.upper_bound(j)});
    }
  }

  const std::size_t H = halfspaces.size();
  std::optional<double> best;
  std::vector<std::size_t> pick(N);
  for (std::size_t i = 0; i < N; ++i) pick[i] = i;

  std::vector<double> system(N * (N + 1));
  std::vector<double> point(N);
  while (true) {
    // Solve the N active constraints by Gaussian elimination.
    for (std::size_t r = 0; r < N; ++r) {
      const Halfspace& h = halfspaces[pick[r]];
      std::copy(h.a.begin(), h.a.end(), system.begin() + r * (N + 1));
      system[r * (N + 1) + N] = h.beta;
    }
    bool singular = false;
    for (std::size_t col = 0; col < N && !singular; ++col) {
      std::size_t pivot = col;
      for (std::size_t r = col + 1; r < N; ++r) {
        if (std::abs(system[r * (N + 1) + col]) > std::abs(system[pivot * (N + 1) + col])) pivot = r;
      }
      if (std::abs(system[pivot * (N + 1) + col]) < 1e-12) {
        singular = true;
        break;
      }
      if (pivot != col) {
        for (std::size_t c = 0; c <= N; ++c) {
          std::swap(system[pivot * (N + 1) + c], system[col * (N + 1) + c]);
        }
      }
      for (std::size_t r = 0; r < N; ++r) {
        if (r == col) continue;
        const double f = system[r * (N + 1) + col] / system[col * (N + 1) + col];
        if (f == 0.0) continue;
        for (std::size_t c = col; c <= N; ++c) system[r * (N + 1) + c] -= f * system[col * (N + 1) + c];
      }
    }
    if (!singular) {
      for (std::size_t r = 0; r < N; ++r) point[r] = system[r * (N + 1) + N] / system[r * (N + 1) + r];
      bool feasible = true;
      for (const Halfspace& h : halfspaces) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < N; ++j) lhs += h.a[j] * point[j];
        if (lhs > h.beta + 1e-9 * (1.0 + std::abs(h.beta))) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        double value = 0.0;
        for (std::size_t j = 0; j < N; ++j) value += problem.objective[j] * point[j];
        if (!best || value > *best) best = value;
      }
    }

    // Next combination in lexicographic order.
    std::size_t i = N;
    while (i > 0 && pick[i - 1] == H - N + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < N; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

OfflineSolution solve_allocation(std::span<const Item* const> items, std::span<const double> budget) {
  const std::size_t m = budget.size();
  OfflineSolution out;
  out.duals.assign(m, 0.0);
  if (items.empty()) return out;

  // Column layout per item.
  struct Block {
    std::size_t first;
    std::size_t width;
    bool scalar;
  };
  std::vector<Block> blocks;
  blocks.reserve(items.size());
  std::size_t columns = 0;
  std::size_t simplex_rows = 0;
  for (const Item* item : items) {
    if (item->A.rows() != m) throw std::invalid_argument("solve_allocation: item rows must match budget");
    switch (item->f.kind()) {
      case UtilityKind::linear_simplex: {
        const std::size_t k = item->f.options();
        blocks.push_back({columns, k, false});
        columns += k;
        if (k > 1) ++simplex_rows;
        break;
      }
      case UtilityKind::concave_scalar:
        blocks.push_back({columns, kChordPieces, true});
        columns += kChordPieces;
        break;
      case UtilityKind::linear_simplex_eq:
        throw std::invalid_argument("solve_allocation: equality-simplex utilities are not supported");
    }
  }

  LpProblem lp;
  lp.objective.assign(columns, 0.0);
  lp.upper.assign(columns, 1.0);
  lp.constraints = Matrix(m + simplex_rows, columns, 0.0);
  lp.rhs.assign(m + simplex_rows, 1.0);
  std::copy(budget.begin(), budget.end(), lp.rhs.begin());

  std::size_t simplex_row = m;
  for (std::size_t t = 0; t < items.size(); ++t) {
    const Item& item = *items[t];
    const Block& block = blocks[t];
    if (block.scalar) {
      const auto& f = std::get<ConcaveScalar>(item.f.payload());
      const double width = 1.0 / static_cast<double>(kChordPieces);
      double previous = 0.0;
      for (std::size_t p = 0; p < kChordPieces; ++p) {
        const double next = f.value(static_cast<double>(p + 1) * width);
        const std::size_t col = block.first + p;
        lp.objective[col] = (next - previous) / width;
        lp.upper[col] = width;
        for (std::size_t i = 0; i < m; ++i) lp.constraints(i, col) = item.A(i, 0);
        previous = next;
      }
    } else {
      const auto& c = std::get<LinearSimplex>(item.f.payload()).c;
      for (std::size_t j = 0; j < block.width; ++j) {
        const std::size_t col = block.first + j;
        lp.objective[col] = c[j];
        for (std::size_t i = 0; i < m; ++i) lp.constraints(i, col) = item.A(i, j);
        if (block.width > 1) lp.constraints(simplex_row, col) = 1.0;
      }
      if (block.width > 1) ++simplex_row;
    }
  }

  const LpSolution solution = solve_lp(lp);
  if (solution.status != LpStatus::optimal) {
    // x = 0 is feasible and the region is bounded.
    throw LpError("allocation LP did not reach an optimum");
  }

  out.value = solution.value;
  std::copy(solution.y.begin(), solution.y.begin() + static_cast<std::ptrdiff_t>(m), out.duals.begin());
  out.decisions.reserve(items.size());
  for (const Block& block : blocks) {
    if (block.scalar) {
      double total = 0.0;
      for (std::size_t p = 0; p < block.width; ++p) total += solution.x[block.first + p];
      out.decisions.push_back({std::min(total, 1.0)});
    } else {
      out.decisions.emplace_back(solution.x.begin() + static_cast<std::ptrdiff_t>(block.first),
                                 solution.x.begin() + static_cast<std::ptrdiff_t>(block.first + block.width));
    }
  }
  return out;
}

OfflineSolution offline_optimum(const Instance& instance) {
  std::vector<const Item*> items;
  items.reserve(instance.n());
  for (const Item& item : instance.items) items.push_back(&item);
  return solve_allocation(items, instance.b);
}

}  // namespace online_alloc
