#include "online_alloc/generators.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace online_alloc {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

std::size_t ceil_size(double x) { return static_cast<std::size_t>(std::ceil(x - 1e-12)); }

std::size_t half_root_count(const WorstCaseSpec& spec) {
  return ceil_size(0.5 * std::sqrt(spec.c / spec.d));
}

std::size_t low_count(const WorstCaseSpec& spec) { return ceil_size(2.0 * spec.c / spec.d); }

Item column_item(double utility, const std::vector<double>& column) {
  return {UtilityFunction::linear_simplex({utility}), Matrix(column.size(), 1, column)};
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : state_(splitmix64(seed)) {}

std::uint64_t Rng::next() {
  state_ += kGoldenGamma;
  return splitmix64(state_);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

std::uint64_t permutation_seed(std::uint64_t seed, std::uint64_t index) {
  return seed ^ splitmix64(index);
}

std::vector<std::size_t> sample_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

BitVectors bit_vectors(int d) {
  if (d < 1 || d > 30) throw std::invalid_argument("bit_vectors: d must lie in [1, 30]");
  const std::size_t m = std::size_t{1} << d;
  BitVectors out;
  out.v.assign(d, std::vector<double>(m, 0.0));
  out.w.assign(d, std::vector<double>(m, 1.0));
  for (std::size_t l = 0; l < m; ++l) {
    for (int i = 0; i < d; ++i) {
      const bool bit = (l >> (d - 1 - i)) & 1U;
      out.v[i][l] = bit ? 1.0 : 0.0;
      out.w[i][l] = bit ? 0.0 : 1.0;
    }
  }
  return out;
}

void WorstCaseSpec::validate() const {
  if (d < 1 || d > 20) throw std::invalid_argument("worst-case spec: d must lie in [1, 20]");
  if (!(c >= d) || !std::isfinite(c)) throw std::invalid_argument("worst-case spec: c must be >= d");
}

std::size_t WorstCaseSpec::item_count() const {
  validate();
  const auto dd = static_cast<std::size_t>(d);
  return dd * ceil_size(c / d) + dd * half_root_count(*this) + dd * low_count(*this);
}

Instance build_worst_case(const WorstCaseSpec& spec) {
  spec.validate();
  const BitVectors bits = bit_vectors(spec.d);
  const std::size_t m = std::size_t{1} << spec.d;
  const std::size_t high = ceil_size(spec.c / spec.d);
  const std::size_t mid = half_root_count(spec);
  const std::size_t low = low_count(spec);

  Rng rng(spec.seed);
  std::vector<std::size_t> draws(spec.d, 0);
  for (auto& j : draws) {
    for (std::size_t trial = 0; trial < low; ++trial) j += rng.coin() ? 1 : 0;
  }

  Instance instance;
  instance.m = m;
  instance.k = 1;
  instance.b.assign(m, spec.c);
  instance.items.reserve(spec.item_count());
  auto emit = [&](double utility, const std::vector<double>& column, std::size_t count) {
    for (std::size_t r = 0; r < count; ++r) instance.items.push_back(column_item(utility, column));
  };
  for (int i = 0; i < spec.d; ++i) emit(4.0, bits.v[i], high);
  for (int i = 0; i < spec.d; ++i) emit(3.0, bits.w[i], draws[i]);
  for (int i = 0; i < spec.d; ++i) emit(2.0, bits.w[i], mid);
  for (int i = 0; i < spec.d; ++i) emit(1.0, bits.w[i], low - draws[i]);
  return instance;
}

WorstCaseSpec parse_worst_case(const std::string& text) {
  WorstCaseSpec spec;
  bool has_d = false;
  bool has_c = false;
  std::stringstream stream(text);
  std::string field;
  while (std::getline(stream, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key=value in '" + text + "'");
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    std::size_t used = 0;
    try {
      if (key == "d") {
        spec.d = std::stoi(value, &used);
        has_d = true;
      } else if (key == "c") {
        spec.c = std::stod(value, &used);
        has_c = true;
      } else if (key == "seed") {
        spec.seed = std::stoull(value, &used);
      } else {
        throw std::invalid_argument("unknown key '" + key + "' in '" + text + "'");
      }
    } catch (const std::logic_error&) {
      throw std::invalid_argument("bad value for '" + key + "' in '" + text + "'");
    }
    if (used != value.size()) throw std::invalid_argument("bad value for '" + key + "' in '" + text + "'");
  }
  if (!has_d || !has_c) throw std::invalid_argument("generator spec needs d and c: '" + text + "'");
  spec.validate();
  return spec;
}

Instance random_linear_instance(std::size_t n, std::size_t m, std::size_t k, double density,
                                std::uint64_t seed, double max_bid) {
  if (n == 0 || m == 0 || k == 0) throw std::invalid_argument("random_linear_instance: sizes must be >= 1");
  if (!(density >= 0.0 && density <= 1.0)) {
    throw std::invalid_argument("random_linear_instance: density must lie in [0, 1]");
  }
  if (!(max_bid > 0.0)) throw std::invalid_argument("random_linear_instance: max_bid must be > 0");
  Rng rng(seed);
  Instance instance;
  instance.m = m;
  instance.k = k;
  instance.b.assign(m, 1.0);
  instance.items.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> c(k);
    for (double& v : c) v = rng.uniform();
    Matrix A(m, k);
    bool any = false;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const bool on = rng.uniform() < density;
        const double value = rng.uniform(0.0, max_bid);
        if (on && value > 0.0) {
          A(i, j) = value;
          any = true;
        }
      }
    }
    if (!any) {
      const auto i = static_cast<std::size_t>(rng.below(m));
      const auto j = static_cast<std::size_t>(rng.below(k));
      A(i, j) = rng.uniform(0.5, 1.0) * max_bid;
    }
    instance.items.push_back({UtilityFunction::linear_simplex(std::move(c)), std::move(A)});
  }
  return instance;
}

FeasibilityInstance feasibility_instance(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m == 0 || n < m) throw std::invalid_argument("feasibility_instance: need n >= m >= 1");
  Rng rng(seed);
  std::vector<Decision> certificate(n, Decision(m, 0.0));
  std::vector<Matrix> loads(n, Matrix(m, m));
  for (std::size_t t = 0; t < n; ++t) {
    // Uniform point of the simplex from normalized exponential spacings.
    double total = 0.0;
    for (double& x : certificate[t]) {
      x = -std::log1p(-rng.uniform());
      total += x;
    }
    for (double& x : certificate[t]) x /= total;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) loads[t](i, j) = rng.uniform();
    }
  }

  std::vector<double> realized(m, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const auto used = loads[t].apply(certificate[t]);
    for (std::size_t i = 0; i < m; ++i) realized[i] += used[i];
  }
  for (auto& A : loads) {
    for (std::size_t i = 0; i < m; ++i) {
      if (realized[i] <= 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) A(i, j) /= realized[i];
    }
  }

  FeasibilityInstance out;
  out.instance.m = m;
  out.instance.k = m;
  out.instance.b.assign(m, 1.0);
  out.instance.items.reserve(n);
  for (auto& A : loads) {
    out.instance.items.push_back({UtilityFunction::linear_simplex_eq(std::vector<double>(m, 0.0)), std::move(A)});
  }
  out.certificate = std::move(certificate);
  return out;
}

}  // namespace online_alloc
