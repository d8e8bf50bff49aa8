#include "online_alloc/bench.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "online_alloc/instance_io.hpp"
#include "online_alloc/lp.hpp"
#include "online_alloc/parallel.hpp"

namespace online_alloc {

namespace {

struct Prepared {
  Instance instance;
  double p_star = 0.0;
  double gamma = 0.0;
  std::uint64_t stream = 0;
};

std::vector<Prepared> prepare(const InstanceSource& source, const BenchConfig& config) {
  std::vector<Prepared> out;
  const std::size_t count = source.generator ? config.instances : 1;
  for (std::size_t j = 0; j < count; ++j) {
    Prepared p;
    p.stream = config.seed + j;
    if (source.generator) {
      WorstCaseSpec spec = *source.generator;
      spec.seed = splitmix64(config.seed + j);
      p.instance = build_worst_case(spec);
    } else {
      p.instance = read_instance(*source.path);
    }
    p.p_star = offline_optimum(p.instance).value;
    if (!(p.p_star > 0.0)) throw std::runtime_error("instance '" + source.label + "' has P* = 0");
    if (config.gamma) {
      p.gamma = *config.gamma;
    } else if (source.generator) {
      p.gamma = 1.0 / source.generator->c;
    } else {
      p.gamma = gamma_of_instance(p.instance, p.p_star).value();
    }
    out.push_back(std::move(p));
  }
  return out;
}

struct RunRecord {
  double cr = 0.0;
  double seconds = 0.0;
  bool feasible = true;
};

BenchRow aggregate(const std::vector<RunRecord>& runs, const BenchConfig& config) {
  BenchRow row;
  row.perms = config.perms;
  row.runs = runs.size();
  double sum = 0.0;
  double seconds = 0.0;
  for (const auto& r : runs) {
    sum += r.cr;
    seconds += r.seconds;
    row.infeasible += r.feasible ? 0 : 1;
    row.max_cr = std::max(row.max_cr, r.cr);
  }
  const double count = static_cast<double>(runs.size());
  row.mean_cr = sum / count;
  row.mean_time_s = config.timing ? seconds / count : 0.0;
  double squares = 0.0;
  for (const auto& r : runs) squares += (r.cr - row.mean_cr) * (r.cr - row.mean_cr);
  row.std_cr = runs.size() > 1 ? std::sqrt(squares / (count - 1.0)) : 0.0;
  return row;
}

std::string format_number(double value, int precision) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << value;
  return s.str();
}

std::string eps_text(const BenchRow& row) { return row.eps ? format_number(*row.eps, 4) : "n/a"; }

}  // namespace

InstanceSource InstanceSource::from_generator(const std::string& text) {
  InstanceSource source;
  source.generator = parse_worst_case(text);
  source.label = text;
  return source;
}

InstanceSource InstanceSource::from_file(const std::string& path) {
  InstanceSource source;
  source.path = path;
  source.label = path;
  return source;
}

void BenchConfig::validate() const {
  if (sources.empty()) throw std::invalid_argument("bench: at least one instance source is required");
  if (algorithms.empty()) throw std::invalid_argument("bench: at least one algorithm is required");
  if (perms == 0) throw std::invalid_argument("bench: perms must be >= 1");
  if (instances == 0) throw std::invalid_argument("bench: instances must be >= 1");
  const bool needs_eps = std::any_of(algorithms.begin(), algorithms.end(),
                                     [](const AlgorithmSpec& a) { return a.uses_eps(); });
  if (needs_eps && eps.empty()) throw std::invalid_argument("bench: eps list is empty");
  for (double e : eps) {
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("bench: eps must lie in (0, 1)");
  }
  if (gamma && !(*gamma > 0.0)) throw std::invalid_argument("bench: gamma must be > 0");
}

BenchReport run_bench(const BenchConfig& config) {
  config.validate();
  const std::size_t threads = resolve_thread_count(config.threads);
  BenchReport report;
  for (const auto& source : config.sources) {
    const auto prepared = prepare(source, config);
    for (const auto& algorithm : config.algorithms) {
      std::vector<std::optional<double>> eps_list;
      if (algorithm.uses_eps()) {
        eps_list.assign(config.eps.begin(), config.eps.end());
      } else {
        eps_list.push_back(std::nullopt);
      }
      for (const auto& eps : eps_list) {
        std::vector<RunRecord> runs(prepared.size() * config.perms);
        parallel_for(runs.size(), threads, [&](std::size_t task) {
          const Prepared& p = prepared[task / config.perms];
          const std::size_t index = task % config.perms;
          Rng rng(permutation_seed(p.stream, index));
          const auto order = sample_permutation(p.instance.n(), rng);
          const RunResult result =
              run_algorithm(algorithm, p.instance, order, eps.value_or(0.0), p.gamma, config.options);
          runs[task] = {result.objective / p.p_star, result.elapsed_seconds, result.feasible};
        });
        BenchRow row = aggregate(runs, config);
        row.instance = source.label;
        row.algorithm = algorithm.name();
        row.eps = eps;
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

void write_csv(std::ostream& out, const BenchReport& report) {
  out << "instance,algorithm,eps,mean_cr,std_cr,mean_time_s,perms\n";
  for (const auto& row : report.rows) {
    out << '"' << row.instance << "\"," << row.algorithm << ',' << eps_text(row) << ','
        << format_number(row.mean_cr, 6) << ',' << format_number(row.std_cr, 6) << ','
        << format_number(row.mean_time_s, 9) << ',' << row.perms << '\n';
  }
}

void write_markdown(std::ostream& out, const BenchReport& report) {
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::string>> keys;  // (algorithm, eps)
  for (const auto& row : report.rows) {
    if (std::find(columns.begin(), columns.end(), row.instance) == columns.end()) columns.push_back(row.instance);
    const std::pair key{row.algorithm, eps_text(row)};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }

  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header{"Algorithm", "eps"};
  for (const auto& c : columns) {
    header.push_back(c + " CR");
    header.push_back(c + " time (s)");
  }
  table.push_back(header);
  for (const auto& [algorithm, eps] : keys) {
    std::vector<std::string> line{algorithm, eps};
    for (const auto& c : columns) {
      const auto it = std::find_if(report.rows.begin(), report.rows.end(), [&](const BenchRow& r) {
        return r.instance == c && r.algorithm == algorithm && eps_text(r) == eps;
      });
      line.push_back(it == report.rows.end() ? "" : format_number(it->mean_cr, 3));
      line.push_back(it == report.rows.end() ? "" : format_number(it->mean_time_s, 6));
    }
    table.push_back(line);
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : table) {
    for (std::size_t j = 0; j < line.size(); ++j) width[j] = std::max(width[j], line[j].size());
  }
  auto emit = [&](const std::vector<std::string>& line) {
    out << '|';
    for (std::size_t j = 0; j < line.size(); ++j) out << ' ' << std::left << std::setw(width[j]) << line[j] << " |";
    out << '\n';
  };
  emit(table.front());
  out << '|';
  for (std::size_t w : width) out << std::string(w + 2, '-') << '|';
  out << '\n';
  for (std::size_t r = 1; r < table.size(); ++r) emit(table[r]);
}

}  // namespace online_alloc
