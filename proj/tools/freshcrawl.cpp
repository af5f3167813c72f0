// freshcrawl: crawl scheduling, workload partitioning, and crawl simulation
// for synthetic social-network users.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "freshcrawl/cli.hpp"

namespace {

using namespace freshcrawl;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output '" + path + "'");
  return out;
}

// Output goes to --output when given, else stdout.
struct OutputTarget {
  std::ofstream file;
  std::ostream& stream;

  explicit OutputTarget(const std::string& path)
      : file(path.empty() ? std::ofstream() : open_output(path)),
        stream(path.empty() ? std::cout : file) {}
};

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("FRESHCRAWL_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("FRESHCRAWL_SEED: not a number '") + env + "'");
    }
  }
  return flag_seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crawl scheduling and simulation toolkit"};
  app.require_subcommand(1);

  std::string input, output, config_path, trace_path;
  std::string arch = "centralized", model = "poisson", strategy = "rr";
  std::uint64_t seed = 1;
  std::vector<int> machines;
  double capacity = 100.0, weight = 0.5, epsilon = 0.2, delta = 1.0, remaining = 0.0;
  int span = 24, k = 2, days = 30;
  std::size_t count = 1000;

  auto* sched = app.add_subcommand("schedule", "compute a crawl schedule");
  std::string sched_kind;
  sched->add_option("kind", sched_kind, "poisson or hash")->required();
  sched->add_option("--input", input, "input CSV")->required();
  sched->add_option("--output", output, "output CSV (default stdout)");
  sched->add_option("--delta", delta, "slot duration for the poisson schedule");
  sched->add_option("--c", capacity, "per-call message capacity");
  sched->add_option("--s", span, "max slots between crawls");
  sched->add_option("--weight", weight, "profile decay weight");
  sched->add_option("--remaining", remaining, "uncollected carry-over");

  auto* part = app.add_subcommand("partition", "split frequencies across machines");
  part->add_option("--input", input, "frequency CSV")->required();
  part->add_option("--output", output, "output CSV (default stdout)");
  part->add_option("--strategy", strategy, "rr, halving, setdiv, or random");
  part->add_option("--k", k, "part count");
  part->add_option("--epsilon", epsilon, "halving ratio slack");
  part->add_option("--seed", seed, "seed for the random strategy");

  auto* sim = app.add_subcommand("simulate", "run the crawl simulator");
  sim->add_option("--config", config_path, "experiment config file");
  sim->add_option("--output", output, "report CSV (default stdout)");
  sim->add_option("--seed", seed, "seed (when no config is given)");
  sim->add_option("--machines", machines, "machine counts to sweep");
  sim->add_option("--arch", arch, "centralized or distributed");
  sim->add_option("--model", model, "poisson, hash, or rr");
  sim->add_option("--days", days, "simulated days");
  sim->add_option("--n", count, "population size");
  sim->add_option("--weight", weight, "hash profile decay weight");
  sim->add_option("--c", capacity, "hash trigger capacity");
  sim->add_option("--s", span, "max days between crawls");
  sim->add_option("--trace", trace_path, "event trace output file");

  auto* rep = app.add_subcommand("report", "summarize simulation report CSVs");
  std::vector<std::string> report_inputs;
  rep->add_option("--input", report_inputs, "report CSV files")->required();
  rep->add_option("--output", output, "summary output (default stdout)");

  auto* gen = app.add_subcommand("generate", "synthesize a message corpus");
  gen->add_option("--n", count, "number of users");
  gen->add_option("--days", days, "days of history");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--output", output, "history CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sched->parsed()) {
      auto in = open_input(input);
      OutputTarget out(output);
      if (sched_kind == "poisson")
        return cmd_schedule_poisson(in, out.stream, std::cerr, delta);
      if (sched_kind == "hash")
        return cmd_schedule_hash(in, out.stream, std::cerr, capacity, span, weight,
                                 remaining);
      std::cerr << "unknown schedule kind '" << sched_kind << "'\n";
      return kExitValidation;
    }

    if (part->parsed()) {
      auto in = open_input(input);
      OutputTarget out(output);
      return cmd_partition(in, out.stream, std::cerr, strategy,
                           static_cast<std::size_t>(k), epsilon,
                           effective_seed(seed));
    }

    if (sim->parsed()) {
      ExperimentConfig cfg;
      if (!config_path.empty()) {
        auto in = open_input(config_path);
        cfg = parse_experiment_config(in);
      } else {
        cfg.arch = parse_arch(arch);
        cfg.model = parse_model(model);
        cfg.days = days;
        cfg.weight = weight;
        cfg.trigger = capacity;
        cfg.span_days = span;
        cfg.population_size = count;
        cfg.seeds = {seed};
        if (!machines.empty()) cfg.machines = machines;
      }
      if (const char* env = std::getenv("FRESHCRAWL_SEED"))
        cfg.seeds = {effective_seed(cfg.seeds.front())};
      if (!output.empty()) cfg.output_csv = output;
      if (!trace_path.empty()) cfg.output_trace = trace_path;
      if (cfg.days <= 0) throw ConfigError("sim.days: must be positive");

      OutputTarget rows(cfg.output_csv);
      return cmd_simulate(cfg, rows.stream, std::cout);
    }

    if (rep->parsed()) {
      std::vector<std::vector<SimReportRow>> inputs;
      for (const auto& path : report_inputs) {
        auto in = open_input(path);
        try {
          inputs.push_back(read_sim_reports(in));
        } catch (const CsvError& e) {
          std::cerr << path << ": " << e.what() << '\n';
          return kExitValidation;
        }
      }
      OutputTarget out(output);
      return cmd_report(inputs, out.stream);
    }

    if (gen->parsed()) {
      OutputTarget out(output);
      return cmd_generate(count, days, effective_seed(seed), out.stream, std::cerr);
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
