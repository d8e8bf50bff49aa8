#pragma once

#include <cstddef>
#include <vector>

namespace online_alloc {

// Step indices t are 1-based throughout, matching arrival positions.
//
// The warmup length w = round(n * eps) (at least 1) and the level count
// L = ceil(log2(1 / eps)) are rounded once and used everywhere.

std::size_t warmup_length(std::size_t n, double eps);
int level_count(double eps);

/// floor(log2((n - t) / w)) + 1, clamped to [1, L]. Requires 1 <= t <= n - w;
/// throws std::out_of_range otherwise.
int kappa(std::size_t t, std::size_t n, double eps);

/// h such that w 2^(h-1) < t <= w 2^h, clamped to L. Requires w < t <= n.
int eta(std::size_t t, std::size_t n, double eps);

/// 2^(-(h+1)/2) * sqrt(eps).
double theta(int h, double eps);

/// Precomputed step sizes and normalization tables for the exponentiated
/// subgradient algorithm.
class Schedule {
 public:
  std::size_t n() const { return n_; }
  double eps() const { return eps_; }
  double gamma() const { return gamma_; }
  std::size_t warmup() const { return warmup_; }
  int levels() const { return levels_; }

  /// ln(1 + eps) / gamma.
  double nu() const { return nu_; }
  /// -ln(1 - eps) / gamma.
  double nu_prime() const { return nu_prime_; }

  /// Defined for w < t <= n + 1; frozen past n - w.
  double beta(std::size_t t) const;
  double beta_prime(std::size_t t) const;
  /// Defined for w < t <= n - w; clamped to the last entry beyond.
  double alpha(std::size_t t) const;

  /// kappa / eta on their full domains, clamped instead of throwing.
  int kappa_at(std::size_t t) const;
  int eta_at(std::size_t t) const;

  /// Prefix length used for the estimate at level h: min(w 2^h, n / 2),
  /// never below w.
  std::size_t breakpoint(int h) const;

  friend Schedule build_schedule(std::size_t n, double eps, double gamma);

 private:
  std::size_t n_ = 0;
  double eps_ = 0.0;
  double gamma_ = 0.0;
  std::size_t warmup_ = 0;
  int levels_ = 0;
  double nu_ = 0.0;
  double nu_prime_ = 0.0;
  std::vector<double> beta_;        // index t - w - 1, t in (w, n + 1]
  std::vector<double> beta_prime_;  // same indexing
  std::vector<double> alpha_;       // index t - w - 1, t in (w, max(n - w, w + 1)]
};

/// Throws std::invalid_argument when eps is outside (0,1), gamma <= 0 or
/// n * eps < 1.
Schedule build_schedule(std::size_t n, double eps, double gamma);

}  // namespace online_alloc
