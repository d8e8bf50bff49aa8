#include "online_alloc/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace online_alloc {

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
}

int clamp_level(long level, int levels) {
  return static_cast<int>(std::clamp<long>(level, 1, levels));
}

// floor(log2(ratio)) + 1 for ratio >= 1 without floating log rounding.
long bucket_of(std::size_t numerator, std::size_t denominator) {
  long level = 1;
  std::size_t threshold = denominator * 2;
  while (numerator >= threshold) {
    ++level;
    threshold *= 2;
  }
  return level;
}

int kappa_unchecked(std::size_t t, std::size_t n, std::size_t w, int levels) {
  if (t + w > n) return 1;
  return clamp_level(bucket_of(n - t, w), levels);
}

int eta_unchecked(std::size_t t, std::size_t w, int levels) {
  if (t <= w) return 1;
  // eta(t) = kappa(n - t + 1) = floor(log2((t - 1) / w)) + 1.
  return clamp_level(bucket_of(t - 1, w), levels);
}

}  // namespace

std::size_t warmup_length(std::size_t n, double eps) {
  check_eps(eps);
  const double raw = std::round(static_cast<double>(n) * eps);
  return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

int level_count(double eps) {
  check_eps(eps);
  return std::max(1, static_cast<int>(std::ceil(std::log2(1.0 / eps) - 1e-12)));
}

int kappa(std::size_t t, std::size_t n, double eps) {
  const std::size_t w = warmup_length(n, eps);
  if (t < 1 || t + w > n) {
    throw std::out_of_range("kappa: t=" + std::to_string(t) + " outside [1, n - n*eps]");
  }
  return kappa_unchecked(t, n, w, level_count(eps));
}

int eta(std::size_t t, std::size_t n, double eps) {
  const std::size_t w = warmup_length(n, eps);
  if (t <= w || t > n) throw std::out_of_range("eta: t=" + std::to_string(t) + " outside (n*eps, n]");
  return eta_unchecked(t, w, level_count(eps));
}

double theta(int h, double eps) {
  return std::pow(2.0, -(h + 1) / 2.0) * std::sqrt(eps);
}

Schedule build_schedule(std::size_t n, double eps, double gamma) {
  check_eps(eps);
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be > 0");
  if (static_cast<double>(n) * eps < 1.0) throw std::invalid_argument("n * eps must be >= 1");

  Schedule s;
  s.n_ = n;
  s.eps_ = eps;
  s.gamma_ = gamma;
  s.warmup_ = warmup_length(n, eps);
  s.levels_ = level_count(eps);
  s.nu_ = std::log1p(eps) / gamma;
  s.nu_prime_ = -std::log1p(-eps) / gamma;

  const std::size_t w = s.warmup_;
  const double scale = eps / (gamma * static_cast<double>(n));
  const double root = std::sqrt(eps);
  const std::size_t last_alpha = std::max(n > w ? n - w : 0, w + 1);

  for (std::size_t t = w + 1; t <= last_alpha; ++t) {
    const int h = eta_unchecked(t, w, s.levels_);
    const double r = std::pow(2.0, -h / 2.0) * root;
    s.alpha_.push_back((1.0 - r) / (1.0 + 2.0 * r));
  }

  // Past n - w the tables hold the value at n - w (kappa = 1 there).
  for (std::size_t t = w + 1; t <= n + 1; ++t) {
    const std::size_t frozen = std::min(t, last_alpha);
    const int k = kappa_unchecked(frozen, n, w, s.levels_);
    const double r = std::pow(2.0, -k / 2.0) * root;
    s.beta_.push_back(scale * (1.0 + r));
    s.beta_prime_.push_back(scale * (1.0 - r) * s.alpha_[frozen - w - 1]);
  }
  return s;
}

double Schedule::beta(std::size_t t) const {
  if (t <= warmup_ || t > n_ + 1) throw std::out_of_range("Schedule::beta: t outside (w, n + 1]");
  return beta_[t - warmup_ - 1];
}

double Schedule::beta_prime(std::size_t t) const {
  if (t <= warmup_ || t > n_ + 1) throw std::out_of_range("Schedule::beta_prime: t outside (w, n + 1]");
  return beta_prime_[t - warmup_ - 1];
}

double Schedule::alpha(std::size_t t) const {
  if (t <= warmup_) throw std::out_of_range("Schedule::alpha: t must exceed the warmup");
  return alpha_[std::min(t - warmup_ - 1, alpha_.size() - 1)];
}

int Schedule::kappa_at(std::size_t t) const { return kappa_unchecked(t, n_, warmup_, levels_); }

int Schedule::eta_at(std::size_t t) const { return eta_unchecked(t, warmup_, levels_); }

std::size_t Schedule::breakpoint(int h) const {
  const std::size_t full = warmup_ << h;
  return std::max(warmup_, std::min(full, n_ / 2));
}

}  // namespace online_alloc
