// online-alloc: generate instances, run benchmarks and diagnostics.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "online_alloc/bench.hpp"
#include "online_alloc/diagnostics.hpp"
#include "online_alloc/generators.hpp"
#include "online_alloc/instance_io.hpp"
#include "online_alloc/lp.hpp"

namespace oa = online_alloc;

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses "key=value,key=value" into numbers, rejecting unknown keys.
std::map<std::string, double> parse_fields(const std::string& text, const std::vector<std::string>& allowed) {
  std::map<std::string, double> out;
  std::stringstream stream(text);
  std::string field;
  while (std::getline(stream, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw UsageError("expected key=value in '" + text + "'");
    const std::string key = field.substr(0, eq);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw UsageError("unknown key '" + key + "' in '" + text + "'");
    }
    try {
      std::size_t used = 0;
      out[key] = std::stod(field.substr(eq + 1), &used);
      if (used != field.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::logic_error&) {
      throw UsageError("bad value for '" + key + "' in '" + text + "'");
    }
  }
  return out;
}

double require_field(const std::map<std::string, double>& fields, const std::string& key) {
  const auto it = fields.find(key);
  if (it == fields.end()) throw UsageError("missing key '" + key + "'");
  return it->second;
}

std::size_t positive_count(const std::map<std::string, double>& fields, const std::string& key) {
  const double value = require_field(fields, key);
  if (!(value >= 1.0) || value != static_cast<double>(static_cast<std::size_t>(value))) {
    throw UsageError("'" + key + "' must be a positive integer");
  }
  return static_cast<std::size_t>(value);
}

oa::WorstCaseSpec worst_case_or_usage(const std::string& text) {
  try {
    return oa::parse_worst_case(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

struct GenOptions {
  std::string worst_case;
  std::string random;
  std::string feasibility;
  std::uint64_t seed = 0;
  std::string out;
};

oa::Instance generate(const GenOptions& opt) {
  const int chosen = !opt.worst_case.empty() + !opt.random.empty() + !opt.feasibility.empty();
  if (chosen != 1) throw UsageError("gen: give exactly one of SPEC, --random or --feasibility");
  if (!opt.worst_case.empty()) {
    oa::WorstCaseSpec spec = worst_case_or_usage(opt.worst_case);
    if (opt.worst_case.find("seed=") == std::string::npos) spec.seed = opt.seed;
    return oa::build_worst_case(spec);
  }
  if (!opt.random.empty()) {
    const auto f = parse_fields(opt.random, {"n", "m", "k", "density", "max_bid"});
    const double density = f.count("density") ? f.at("density") : 1.0;
    const double max_bid = f.count("max_bid") ? f.at("max_bid") : 0.1;
    if (!(density >= 0.0 && density <= 1.0)) throw UsageError("density must lie in [0, 1]");
    if (!(max_bid > 0.0)) throw UsageError("max_bid must be > 0");
    return oa::random_linear_instance(positive_count(f, "n"), positive_count(f, "m"), positive_count(f, "k"),
                                      density, opt.seed, max_bid);
  }
  const auto f = parse_fields(opt.feasibility, {"n", "m"});
  const std::size_t n = positive_count(f, "n");
  const std::size_t m = positive_count(f, "m");
  if (n < m) throw UsageError("feasibility instances need n >= m");
  return oa::feasibility_instance(n, m, opt.seed).instance;
}

int run_gen(const GenOptions& opt) {
  const oa::Instance instance = generate(opt);
  if (opt.out.empty()) {
    std::cout << oa::instance_to_json(instance) << '\n';
  } else {
    oa::write_instance(opt.out, instance);
  }
  // The offline LP does not cover equality-simplex items; report the bid ratio alone.
  const bool equality = instance.items.front().f.kind() == oa::UtilityKind::linear_simplex_eq;
  const double p_star = equality ? 0.0 : oa::offline_optimum(instance).value;
  const double gamma =
      p_star > 0.0 ? oa::gamma_of_instance(instance, p_star).value() : oa::bid_to_budget_ratio(instance);
  std::cerr << "n=" << instance.n() << " m=" << instance.m << " k=" << instance.k << " gamma=" << gamma << '\n';
  return 0;
}

struct BenchOptions {
  std::vector<std::string> generators;
  std::vector<std::string> files;
  std::vector<std::string> algorithms{"esa"};
  std::vector<double> eps{0.05};
  std::size_t perms = 100;
  std::size_t instances = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string format = "csv";
  std::string out;
  bool no_timing = false;
  std::string guard = "raw";
  std::string ties = "accept";
  std::optional<double> gamma;
};

oa::RunOptions run_options(const std::string& guard, const std::string& ties) {
  oa::RunOptions options;
  options.guard = guard == "checked" ? oa::GuardMode::checked_cumulative : oa::GuardMode::raw_cumulative;
  options.ties = ties == "reject" ? oa::TieRule::reject : oa::TieRule::accept;
  return options;
}

int run_bench(const BenchOptions& opt) {
  oa::BenchConfig config;
  for (const auto& g : opt.generators) {
    worst_case_or_usage(g);
    config.sources.push_back(oa::InstanceSource::from_generator(g));
  }
  for (const auto& f : opt.files) config.sources.push_back(oa::InstanceSource::from_file(f));
  for (const auto& a : opt.algorithms) {
    try {
      config.algorithms.push_back(oa::parse_algorithm(a));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  config.eps = opt.eps;
  config.perms = opt.perms;
  config.instances = opt.instances;
  config.seed = opt.seed;
  config.threads = opt.threads;
  config.timing = !opt.no_timing;
  config.gamma = opt.gamma;
  config.options = run_options(opt.guard, opt.ties);
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const oa::BenchReport report = oa::run_bench(config);
  std::ofstream file;
  if (!opt.out.empty()) {
    file.open(opt.out);
    if (!file) throw std::runtime_error("cannot open '" + opt.out + "' for writing");
  }
  std::ostream& out = opt.out.empty() ? std::cout : file;
  if (opt.format == "md") {
    oa::write_markdown(out, report);
  } else {
    oa::write_csv(out, report);
  }
  for (const auto& row : report.rows) {
    if (row.infeasible > 0) {
      std::cerr << "warning: " << row.infeasible << " infeasible runs for " << row.algorithm << '\n';
    }
  }
  return 0;
}

struct DiagOptions {
  std::string generator;
  std::string instance;
  std::string random;
  double eps = 0.25;
  std::optional<double> gamma;
  std::size_t perms = 100;
  std::size_t perm_index = 0;
  std::uint64_t seed = 0;
  std::string out;
};

struct Loaded {
  oa::Instance instance;
  double gamma = 0.0;
};

Loaded load_instance(const DiagOptions& opt) {
  const int chosen = !opt.generator.empty() + !opt.instance.empty() + !opt.random.empty();
  if (chosen != 1) throw UsageError("diag: give exactly one of --gen, --instance or --random");
  Loaded out;
  std::optional<double> default_gamma;
  if (!opt.generator.empty()) {
    oa::WorstCaseSpec spec = worst_case_or_usage(opt.generator);
    if (opt.generator.find("seed=") == std::string::npos) spec.seed = opt.seed;
    out.instance = oa::build_worst_case(spec);
    default_gamma = 1.0 / spec.c;
  } else if (!opt.instance.empty()) {
    out.instance = oa::read_instance(opt.instance);
  } else {
    GenOptions gen;
    gen.random = opt.random;
    gen.seed = opt.seed;
    out.instance = generate(gen);
  }
  if (opt.gamma) {
    out.gamma = *opt.gamma;
  } else if (default_gamma) {
    out.gamma = *default_gamma;
  } else {
    const double p_star = oa::offline_optimum(out.instance).value;
    out.gamma = p_star > 0.0 ? oa::gamma_of_instance(out.instance, p_star).value()
                             : oa::bid_to_budget_ratio(out.instance);
  }
  return out;
}

std::ostream& output_stream(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  return file;
}

void write_trace(std::ostream& out, const oa::MartingaleTrace& trace) {
  out << "t,value\n" << std::setprecision(17);
  for (std::size_t j = 0; j < trace.values.size(); ++j) out << trace.first_t + j << ',' << trace.values[j] << '\n';
}

void write_events(std::ostream& out, const std::vector<oa::EventEstimate>& events) {
  out << std::left << std::setw(30) << "event" << std::setw(12) << "frequency" << std::setw(14) << "bound"
      << "status\n";
  for (const auto& e : events) {
    const char* status = e.vacuous() ? "vacuous" : (e.consistent() ? "ok" : "violated");
    out << std::setw(30) << e.name << std::setw(12) << e.frequency() << std::setw(14) << e.bound << status << '\n';
  }
}

int run_diag_phi(const DiagOptions& opt) {
  const Loaded loaded = load_instance(opt);
  const auto offline = oa::offline_optimum(loaded.instance);
  oa::Rng rng(oa::permutation_seed(opt.seed, opt.perm_index));
  const auto order = oa::sample_permutation(loaded.instance.n(), rng);
  const auto trace = oa::phi_trace(loaded.instance, order, opt.eps, loaded.gamma, offline.decisions, offline.value);
  std::ofstream file;
  write_trace(output_stream(opt.out, file), trace);
  return 0;
}

int run_diag_events(const DiagOptions& opt) {
  const Loaded loaded = load_instance(opt);
  const auto stats = oa::event_stats(loaded.instance, opt.eps, loaded.gamma, opt.perms, opt.seed);
  std::ofstream file;
  write_events(output_stream(opt.out, file), stats.events);
  return 0;
}

int run_diag_martingale(const DiagOptions& opt) {
  const Loaded loaded = load_instance(opt);
  if (loaded.instance.n() > 8) throw UsageError("martingale check needs n <= 8");
  const auto offline = oa::offline_optimum(loaded.instance);
  const auto check = oa::exact_martingale_check(loaded.instance, offline.decisions, offline.value);
  constexpr double kTolerance = 1e-12;
  std::ofstream file;
  std::ostream& out = output_stream(opt.out, file);
  out << "permutations: " << check.permutations << '\n'
      << "max_error_R: " << check.max_error_R << '\n'
      << "max_error_S: " << check.max_error_S << '\n'
      << "exact: " << (check.passed(kTolerance) ? "pass" : "fail") << '\n';
  return check.passed(kTolerance) ? 0 : kRuntimeError;
}

int run_diag_max_load(const DiagOptions& opt, const std::string& feasibility) {
  GenOptions gen;
  gen.feasibility = feasibility;
  gen.seed = opt.seed;
  const oa::Instance instance = generate(gen);
  const double gamma = opt.gamma.value_or(oa::bid_to_budget_ratio(instance));
  const auto estimate = oa::max_load_stats(instance, opt.eps, gamma, opt.perms, opt.seed);
  std::ofstream file;
  write_events(output_stream(opt.out, file), {estimate});
  return 0;
}

void add_diag_source(CLI::App* cmd, DiagOptions& opt) {
  cmd->add_option("--gen", opt.generator, "worst-case spec, e.g. d=2,c=400");
  cmd->add_option("--instance", opt.instance, "instance JSON file");
  cmd->add_option("--random", opt.random, "random linear instance, e.g. n=5,m=2,k=1,density=1");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online resource allocation: instance generation, benchmarks and diagnostics"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "write an instance as JSON");
  gen_cmd->add_option("spec", gen.worst_case, "worst-case spec, e.g. d=3,c=30");
  gen_cmd->add_option("--random", gen.random, "random linear instance n=..,m=..,k=..[,density=..,max_bid=..]");
  gen_cmd->add_option("--feasibility", gen.feasibility, "feasibility instance n=..,m=..");
  gen_cmd->add_option("--seed", gen.seed, "generator seed");
  gen_cmd->add_option("-o,--out", gen.out, "output path (default: stdout)");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "estimate competitive ratios over random orders");
  bench_cmd->add_option("--gen", bench.generators, "worst-case spec, repeatable");
  bench_cmd->add_option("--instance", bench.files, "instance JSON file, repeatable")->check(CLI::ExistingFile);
  bench_cmd->add_option("--alg", bench.algorithms, "esa, ola, dla, krtv or krtvK")->delimiter(',');
  bench_cmd->add_option("--eps", bench.eps, "eps values")->delimiter(',');
  bench_cmd->add_option("--perms", bench.perms, "orders per instance")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--instances", bench.instances, "generated instances per spec")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "base seed");
  bench_cmd->add_option("--threads", bench.threads, "worker threads (ONLINE_ALLOC_THREADS overrides)");
  bench_cmd->add_option("--format", bench.format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
  bench_cmd->add_option("-o,--out", bench.out, "output path (default: stdout)");
  bench_cmd->add_flag("--no-timing", bench.no_timing, "report 0 for every time column");
  bench_cmd->add_option("--guard", bench.guard, "raw or checked")->check(CLI::IsMember({"raw", "checked"}));
  bench_cmd->add_option("--ties", bench.ties, "accept or reject")->check(CLI::IsMember({"accept", "reject"}));
  bench_cmd->add_option("--gamma", bench.gamma, "override gamma");

  DiagOptions diag;
  std::string feasibility = "n=2000,m=2";
  auto* diag_cmd = app.add_subcommand("diag", "martingale and event diagnostics");
  diag_cmd->require_subcommand(1);
  diag_cmd->add_option("--eps", diag.eps, "eps")->check(CLI::Range(0.0, 1.0));
  diag_cmd->add_option("--gamma", diag.gamma, "override gamma");
  diag_cmd->add_option("--perms", diag.perms, "random orders")->check(CLI::PositiveNumber);
  diag_cmd->add_option("--seed", diag.seed, "seed");
  diag_cmd->add_option("-o,--out", diag.out, "output path (default: stdout)");
  auto* phi_cmd = diag_cmd->add_subcommand("phi", "potential trace of one ESA run as CSV");
  add_diag_source(phi_cmd, diag);
  phi_cmd->add_option("--perm-index", diag.perm_index, "which order to trace");
  auto* events_cmd = diag_cmd->add_subcommand("events", "bad-event frequencies against their bounds");
  add_diag_source(events_cmd, diag);
  auto* martingale_cmd = diag_cmd->add_subcommand("martingale", "exhaustive martingale check (n <= 8)");
  add_diag_source(martingale_cmd, diag);
  auto* max_load_cmd = diag_cmd->add_subcommand("maxload", "max-load frequency of the feasibility greedy");
  max_load_cmd->add_option("--feasibility", feasibility, "feasibility instance n=..,m=..");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*bench_cmd) return run_bench(bench);
    if (*phi_cmd) return run_diag_phi(diag);
    if (*events_cmd) return run_diag_events(diag);
    if (*martingale_cmd) return run_diag_martingale(diag);
    if (*max_load_cmd) return run_diag_max_load(diag, feasibility);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}
