#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "online_alloc/model.hpp"

namespace online_alloc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Pieces used to replace a scalar concave utility by its piecewise-linear
/// interpolant in the offline LP. Per-item error <= max|f''| / (2 * 64^2).
inline constexpr std::size_t kChordPieces = 64;

struct LpConfig {
  double pivot_tolerance = 1e-10;
  double optimality_tolerance = 1e-9;
  double feasibility_tolerance = 1e-8;
};

/// maximize c^T x  s.t.  G x <= g,  0 <= x <= u  (u_j may be +inf).
struct LpProblem {
  std::vector<double> objective;
  Matrix constraints;
  std::vector<double> rhs;
  std::vector<double> upper;  // empty means all +inf

  std::size_t rows() const { return constraints.rows(); }
  std::size_t cols() const { return objective.size(); }
  double upper_bound(std::size_t j) const { return upper.empty() ? kInfinity : upper[j]; }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  std::vector<double> y;  // duals of the G x <= g rows, >= 0
  double value = 0.0;
  std::size_t iterations = 0;
};

/// Raised when the simplex exceeds its iteration cap (a tolerance failure).
class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bounded-variable primal simplex (two phases when some g_i < 0) with
/// Bland's rule on a dense tableau. Returns an optimal basic solution with
/// row duals, or a certified infeasible/unbounded status.
LpSolution solve_lp(const LpProblem& problem, const LpConfig& config = {});

/// Relative size of a positive reduced cost treated as rounding when
/// checking dual feasibility of an unbounded column.
inline constexpr double kDualRoundoff = 1e-12;

/// g^T y + sum_j u_j * max(0, c_j - (G^T y)_j). +inf when a column with
/// u_j = +inf has positive reduced cost beyond rounding (y is not dual
/// feasible).
double lp_dual_objective(const LpProblem& problem, std::span<const double> y);

/// Exact optimum by enumerating every basic point of {G x <= g, 0 <= x <= u}.
/// std::nullopt when the region is empty. Requires rows + cols <= 14 and a
/// bounded problem; throws std::invalid_argument beyond that size.
std::optional<double> vertex_oracle(const LpProblem& problem);

struct OfflineSolution {
  double value = 0.0;
  std::vector<Decision> decisions;  // one per item, in the order given
  std::vector<double> duals;        // budget-row duals y*
};

/// Offline optimum of sum f_t(x_t) s.t. sum A_t x_t <= budget over the given
/// items. Scalar concave utilities are replaced by their kChordPieces-piece
/// interpolant. Throws std::invalid_argument for equality-simplex utilities.
OfflineSolution solve_allocation(std::span<const Item* const> items,
                                 std::span<const double> budget);

OfflineSolution offline_optimum(const Instance& instance);

}  // namespace online_alloc
