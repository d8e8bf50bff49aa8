#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "online_alloc/model.hpp"

namespace online_alloc {

/// One step of the splitmix64 output function (state advanced by the caller).
std::uint64_t splitmix64(std::uint64_t x);

/// Fixed-increment generator: the state advances by the golden-ratio
/// constant and each output is the splitmix64 mix of the new state. The
/// initial state is splitmix64(seed). Bit-exact on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, bound), unbiased. bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  bool coin() { return (next() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

/// Seed for the permutation with the given index.
std::uint64_t permutation_seed(std::uint64_t seed, std::uint64_t index);

/// Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> sample_permutation(std::size_t n, Rng& rng);

struct BitVectors {
  std::vector<std::vector<double>> v;  // d vectors of length 2^d
  std::vector<std::vector<double>> w;  // w_i = 1 - v_i
};

/// v_i holds bit i of l - 1 for l = 1..2^d, bit 1 being the most significant.
BitVectors bit_vectors(int d);

struct WorstCaseSpec {
  int d = 3;
  double c = 30.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument unless d >= 1 and c >= d.
  void validate() const;
  /// d ceil(c/d) + d ceil(sqrt(c/d)/2) + d ceil(2c/d).
  std::size_t item_count() const;
};

/// The hard multiset with m = 2^d resources, b = c 1 and k = 1. Items are
/// emitted grouped by utility 4, 3, 2, 1 and by i within each group.
Instance build_worst_case(const WorstCaseSpec& spec);

/// Parses "d=3,c=30" (an optional seed=N is accepted too).
WorstCaseSpec parse_worst_case(const std::string& text);

/// Linear instance with b = 1, utilities Uniform(0,1)^k and entries
/// Bernoulli(density) * Uniform(0, max_bid). Every item gets at least one
/// nonzero entry.
Instance random_linear_instance(std::size_t n, std::size_t m, std::size_t k, double density,
                                std::uint64_t seed, double max_bid = 0.1);

struct FeasibilityInstance {
  Instance instance;  // k = m options, equality-simplex utilities, b = 1
  std::vector<Decision> certificate;  // x*_t on the simplex with sum A_t x*_t <= 1
};

/// Random loads with a hidden feasible assignment. Column entries are drawn
/// in [0, 1), then every row is divided by its realized load under x*, so
/// the certificate uses exactly the whole budget.
FeasibilityInstance feasibility_instance(std::size_t n, std::size_t m, std::uint64_t seed);

}  // namespace online_alloc
