#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "freshcrawl/csv.hpp"
#include "freshcrawl/simharness.hpp"

namespace freshcrawl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;

// Validation failure carrying the offending key or input path.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Experiment configuration: flat dotted-key = value file.

struct ExperimentConfig {
  Architecture arch = Architecture::Centralized;
  ScheduleModel model = ScheduleModel::Poisson;
  SplitStrategy split = SplitStrategy::RrSplit;
  std::vector<int> machines = {1};
  int days = 30;
  double weight = 0.5;
  double trigger = 0.0;
  int span_days = 30;
  QuotaPolicy quota;
  std::size_t population_size = 1000;
  bool population_per_machine = false;  // scale size by machine count
  std::uint64_t population_seed = 1;
  std::vector<std::uint64_t> seeds = {1};
  std::string output_csv;
  std::string output_trace;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

template <typename T>
T parse_config_num(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    if constexpr (std::is_integral_v<T>) {
      if (v != std::floor(v)) throw std::invalid_argument(value);
    }
    return static_cast<T>(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number '" + value + "'");
  }
}

}  // namespace detail

inline Architecture parse_arch(const std::string& v) {
  if (v == "centralized") return Architecture::Centralized;
  if (v == "distributed") return Architecture::Distributed;
  throw ConfigError("arch: unknown value '" + v + "'");
}

inline ScheduleModel parse_model(const std::string& v) {
  if (v == "poisson") return ScheduleModel::Poisson;
  if (v == "hash") return ScheduleModel::Hash;
  if (v == "rr") return ScheduleModel::RoundRobin;
  throw ConfigError("model: unknown value '" + v + "'");
}

inline SplitStrategy parse_split(const std::string& v) {
  if (v == "rr") return SplitStrategy::RrSplit;
  if (v == "setdiv") return SplitStrategy::SetDivision;
  throw ConfigError("split: unknown value '" + v + "'");
}

// Lines of `key = value`; '#' starts a comment; unknown keys rejected.
inline ExperimentConfig parse_experiment_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));

    if (key == "sim.arch") {
      cfg.arch = parse_arch(value);
    } else if (key == "sim.model") {
      cfg.model = parse_model(value);
    } else if (key == "sim.split") {
      cfg.split = parse_split(value);
    } else if (key == "sim.machines") {
      cfg.machines.clear();
      for (const auto& m : detail::split_list(value))
        cfg.machines.push_back(detail::parse_config_num<int>(key, m));
    } else if (key == "sim.days") {
      cfg.days = detail::parse_config_num<int>(key, value);
    } else if (key == "sim.weight") {
      cfg.weight = detail::parse_config_num<double>(key, value);
    } else if (key == "sim.trigger") {
      cfg.trigger = detail::parse_config_num<double>(key, value);
    } else if (key == "sim.span_days") {
      cfg.span_days = detail::parse_config_num<int>(key, value);
    } else if (key == "quota.calls_per_window") {
      cfg.quota.calls_per_window = detail::parse_config_num<int>(key, value);
    } else if (key == "quota.window_minutes") {
      cfg.quota.window_minutes = detail::parse_config_num<int>(key, value);
    } else if (key == "quota.messages_per_call") {
      cfg.quota.messages_per_call = detail::parse_config_num<int>(key, value);
    } else if (key == "population.size") {
      cfg.population_size = detail::parse_config_num<std::size_t>(key, value);
    } else if (key == "population.per_machine") {
      if (value == "true" || value == "1") cfg.population_per_machine = true;
      else if (value == "false" || value == "0") cfg.population_per_machine = false;
      else throw ConfigError(key + ": expected true or false, got '" + value + "'");
    } else if (key == "population.seed") {
      cfg.population_seed = detail::parse_config_num<std::uint64_t>(key, value);
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const auto& s : detail::split_list(value))
        cfg.seeds.push_back(detail::parse_config_num<std::uint64_t>(key, s));
    } else if (key == "output.csv") {
      cfg.output_csv = value;
    } else if (key == "output.trace") {
      cfg.output_trace = value;
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  if (cfg.seeds.empty()) throw ConfigError("seeds: list must be non-empty");
  if (cfg.machines.empty()) throw ConfigError("sim.machines: list must be non-empty");
  for (int m : cfg.machines)
    if (m < 1) throw ConfigError("sim.machines: must be >= 1");
  if (cfg.days <= 0) throw ConfigError("sim.days: must be positive");
  if (cfg.quota.calls_per_window < 1) throw ConfigError("quota.calls_per_window: must be >= 1");
  if (cfg.quota.messages_per_call < 1) throw ConfigError("quota.messages_per_call: must be >= 1");
  if (kMinutesPerDay % cfg.quota.window_minutes != 0)
    throw ConfigError("quota.window_minutes: must divide 24h");
  if (!(cfg.weight > 0.0 && cfg.weight < 1.0)) throw ConfigError("sim.weight: must be in (0,1)");
  if (cfg.population_size == 0) throw ConfigError("population.size: must be >= 1");
  return cfg;
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each returns a process exit code and reports problems on
// `diag`.

inline int cmd_schedule_poisson(std::istream& in, std::ostream& out,
                                std::ostream& diag, double delta) {
  std::vector<RatedUser> users;
  try {
    users = read_rates(in);
  } catch (const CsvError& e) {
    diag << e.what() << '\n';
    return kExitValidation;
  }
  if (users.empty()) {
    diag << "no users\n";
    return kExitValidation;
  }
  std::stable_sort(users.begin(), users.end(), [](const RatedUser& a, const RatedUser& b) {
    return a.lambda != b.lambda ? a.lambda < b.lambda : a.user_id < b.user_id;
  });
  PoissonScheduleInput input;
  input.users = users;
  input.delta = delta;
  const CrawlSchedule schedule = organ_pipe_schedule(input);
  std::unordered_map<std::string, double> rates;
  for (const auto& u : users) rates.emplace(u.user_id, u.lambda);
  write_schedule(out, schedule, rates, delta);
  diag << "total_potentiality=" << detail::fmt_double(schedule.total_potentiality)
       << '\n';
  return kExitOk;
}

inline int cmd_schedule_hash(std::istream& in, std::ostream& out, std::ostream& diag,
                             double capacity, int span, double weight,
                             double remaining) {
  HashScheduleInput input;
  try {
    input = read_hash_profile(in);
  } catch (const CsvError& e) {
    diag << e.what() << '\n';
    return kExitValidation;
  }
  if (input.profile_slots.empty()) {
    diag << "no users\n";
    return kExitValidation;
  }
  input.capacity = capacity;
  input.span_threshold = span;
  input.remaining = remaining;
  HashScheduleOutput result;
  try {
    result = hash_schedule(input, weight);
  } catch (const std::invalid_argument& e) {
    diag << e.what() << '\n';
    return kExitValidation;
  }
  write_hash_schedule(out, result);
  diag << "L=[";
  for (std::size_t j = 0; j < result.crawl_times.size(); ++j) {
    if (j) diag << ',';
    diag << result.crawl_times[j];
  }
  diag << "] new_remaining=" << detail::fmt_double(result.new_remaining) << '\n';
  return kExitOk;
}

// True when the sorted frequencies form f0 + i*delta for constant delta.
inline bool arithmetic_parameters(const FrequencySequence& seq, double& f0,
                                  double& delta) {
  if (seq.entries.size() < 2) return false;
  std::vector<double> f;
  for (const auto& e : seq.entries) f.push_back(e.frequency);
  std::sort(f.begin(), f.end());
  const double d = f[1] - f[0];
  for (std::size_t i = 2; i < f.size(); ++i)
    if (std::abs(f[i] - f[i - 1] - d) > 1e-9) return false;
  f0 = f[0];
  delta = d;
  return true;
}

inline int cmd_partition(std::istream& in, std::ostream& out, std::ostream& diag,
                         const std::string& strategy, std::size_t k, double epsilon,
                         std::uint64_t seed) {
  FrequencySequence seq;
  try {
    seq = read_frequencies(in);
  } catch (const CsvError& e) {
    diag << e.what() << '\n';
    return kExitValidation;
  }
  if (seq.entries.empty()) {
    diag << "no users\n";
    return kExitValidation;
  }

  PartitionAssignment assignment;
  try {
    if (strategy == "rr") {
      FrequencySequence sorted = seq;
      std::stable_sort(sorted.entries.begin(), sorted.entries.end(),
                       [](const FrequencyEntry& a, const FrequencyEntry& b) {
                         return a.frequency != b.frequency ? a.frequency < b.frequency
                                                           : a.user_id < b.user_id;
                       });
      const FrequencySequence piped = apply_organ_pipe(sorted);
      assignment = rr_split(piped, k);
      double f0 = 0.0, delta = 0.0;
      if (k == 2 && arithmetic_parameters(seq, f0, delta)) {
        const double predicted = predict_rr_difference(f0, delta, seq.entries.size());
        const double measured = assignment.part_sums[0] - assignment.part_sums[1];
        diag << "predicted_diff=" << detail::fmt_double(predicted)
             << " measured_diff=" << detail::fmt_double(measured) << '\n';
      }
    } else if (strategy == "halving") {
      if (k == 0 || (k & (k - 1)) != 0) {
        diag << "part count must be a power of 2\n";
        return kExitValidation;
      }
      assignment = recursive_halving(seq, PtasParams::make(epsilon, k));
    } else if (strategy == "setdiv") {
      assignment = set_division(seq, k);
    } else if (strategy == "random") {
      assignment = random_split(seq, k, seed);
    } else {
      diag << "unknown strategy '" << strategy << "'\n";
      return kExitValidation;
    }
  } catch (const std::invalid_argument& e) {
    diag << e.what() << '\n';
    return kExitValidation;
  }

  std::unordered_map<std::string, double> freqs;
  for (const auto& e : seq.entries) freqs.emplace(e.user_id, e.frequency);
  write_partition(out, assignment, freqs);
  diag << "max_min_diff=" << detail::fmt_double(assignment.max_min_diff)
       << " pairwise_diff=" << detail::fmt_double(assignment.pairwise_diff) << '\n';
  return kExitOk;
}

inline int cmd_simulate(const ExperimentConfig& cfg, std::ostream& rows_out,
                        std::ostream& summary) {
  std::ofstream trace;
  if (!cfg.output_trace.empty()) {
    trace.open(cfg.output_trace);
    if (!trace) throw ConfigError("cannot open output '" + cfg.output_trace + "'");
  }
  std::vector<SimReport> rows;
  for (int m : cfg.machines) {
    const std::size_t size =
        cfg.population_per_machine ? cfg.population_size * static_cast<std::size_t>(m)
                                   : cfg.population_size;
    for (std::uint64_t seed : cfg.seeds) {
      SimConfig sc;
      sc.architecture = cfg.arch;
      sc.machines = m;
      sc.model = cfg.model;
      sc.quota = cfg.quota;
      sc.duration_days = cfg.days;
      sc.seed = seed;
      sc.users = make_population(size, cfg.population_seed);
      sc.hash_weight = cfg.weight;
      sc.hash_trigger = cfg.trigger;
      sc.span_days = cfg.span_days;
      sc.split = cfg.split;
      if (trace.is_open()) sc.trace = &trace;
      rows.push_back(Simulation(sc).run());
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SimReport& a, const SimReport& b) {
    return a.machines != b.machines ? a.machines < b.machines : a.seed < b.seed;
  });
  write_sim_reports(rows_out, rows);

  summary << "| machines | mean total messages | speed-up | median workload diff |\n";
  summary << "|---------:|--------------------:|---------:|---------------------:|\n";
  double base_mean = 0.0;
  for (int m : cfg.machines) {
    std::vector<std::int64_t> totals, diffs;
    for (const auto& r : rows)
      if (r.machines == m) {
        totals.push_back(r.total_messages);
        diffs.push_back(r.workload_diff);
      }
    double mean = 0.0;
    for (auto t : totals) mean += static_cast<double>(t);
    mean /= static_cast<double>(totals.size());
    std::sort(diffs.begin(), diffs.end());
    const std::int64_t median = diffs[diffs.size() / 2];
    if (m == cfg.machines.front()) base_mean = mean;
    summary << "| " << m << " | " << detail::fmt_double(mean) << " | "
            << detail::fmt_double(mean / base_mean) << " | " << median << " |\n";
  }
  return kExitOk;
}

inline int cmd_report(const std::vector<std::vector<SimReportRow>>& inputs,
                      std::ostream& out) {
  std::vector<SimReportRow> rows;
  for (const auto& in : inputs) rows.insert(rows.end(), in.begin(), in.end());
  if (rows.empty()) return kExitValidation;

  std::map<int, std::vector<SimReportRow>> by_machines;
  for (const auto& r : rows) by_machines[r.machines].push_back(r);

  out << "| machines | runs | mean total | median total | median workload diff | "
         "mean msgs/call |\n";
  out << "|---------:|-----:|-----------:|-------------:|---------------------:|"
         "---------------:|\n";
  for (auto& [m, group] : by_machines) {
    std::vector<std::int64_t> totals, diffs;
    double avg_sum = 0.0;
    for (const auto& r : group) {
      totals.push_back(r.total_messages);
      diffs.push_back(r.workload_diff);
      avg_sum += r.avg_msgs_per_call;
    }
    std::sort(totals.begin(), totals.end());
    std::sort(diffs.begin(), diffs.end());
    out << "| " << m << " | " << group.size() << " | "
        << detail::fmt_double(static_cast<double>(std::accumulate(
               totals.begin(), totals.end(), std::int64_t{0})) /
           static_cast<double>(totals.size()))
        << " | " << totals[totals.size() / 2] << " | " << diffs[diffs.size() / 2]
        << " | " << detail::fmt_double(avg_sum / static_cast<double>(group.size()))
        << " |\n";
  }

  if (inputs.size() == 2 && !inputs[0].empty() && !inputs[1].empty()) {
    auto mean_total = [](const std::vector<SimReportRow>& v) {
      double s = 0.0;
      for (const auto& r : v) s += static_cast<double>(r.total_messages);
      return s / static_cast<double>(v.size());
    };
    const double a = mean_total(inputs[0]);
    const double b = mean_total(inputs[1]);
    out << "\nimprovement of first over second: "
        << detail::fmt_double((a - b) / b * 100.0) << "%\n";
  }
  return kExitOk;
}

inline int cmd_generate(std::size_t n, int days, std::uint64_t seed,
                        std::ostream& out, std::ostream& diag) {
  if (n == 0) {
    diag << "no users\n";
    return kExitValidation;
  }
  if (days <= 0) {
    diag << "duration must be positive\n";
    return kExitValidation;
  }
  const auto specs = make_population(n, seed);
  out << "user_id,timestamp_minutes\n";
  for (const auto& spec : specs) {
    const MessageHistory h = generate_messages(spec, days);
    for (std::int64_t t : h.timestamps) out << h.user_id << ',' << t << '\n';
  }
  return kExitOk;
}

}  // namespace freshcrawl
