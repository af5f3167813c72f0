#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "freshcrawl/cli.hpp"

using namespace freshcrawl;

namespace {

std::string six_user_rates() {
  return "user_id,lambda\nu0,0\nu1,1\nu2,2\nu3,3\nu4,4\nu5,5\n";
}

// Runs the built binary when the test driver exports its location.
struct BinRunner {
  std::string bin;
  BinRunner() {
    if (const char* p = std::getenv("FRESHCRAWL_BIN")) bin = p;
  }
  int run(const std::string& args, const std::string& out_file) const {
    const std::string cmd = bin + " " + args + " >" + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("experiment config parsing") {
  SECTION("full round trip of keys") {
    std::istringstream in(
        "sim.arch = distributed\n"
        "sim.model = hash\n"
        "sim.machines = 1, 2, 4\n"
        "sim.days = 10\n"
        "sim.weight = 0.7\n"
        "quota.calls_per_window = 20\n"
        "quota.messages_per_call = 50\n"
        "population.size = 300\n"
        "population.per_machine = true\n"
        "seeds = 5, 6\n"
        "# trailing comment\n"
        "output.csv = /tmp/out.csv\n");
    const auto cfg = parse_experiment_config(in);
    REQUIRE(cfg.arch == Architecture::Distributed);
    REQUIRE(cfg.model == ScheduleModel::Hash);
    REQUIRE(cfg.machines == std::vector<int>{1, 2, 4});
    REQUIRE(cfg.days == 10);
    REQUIRE(cfg.weight == Catch::Approx(0.7));
    REQUIRE(cfg.quota.calls_per_window == 20);
    REQUIRE(cfg.population_size == 300);
    REQUIRE(cfg.population_per_machine);
    REQUIRE(cfg.seeds == std::vector<std::uint64_t>{5, 6});
    REQUIRE(cfg.output_csv == "/tmp/out.csv");
  }
  SECTION("unknown keys rejected") {
    std::istringstream in("sim.speed = 9\n");
    REQUIRE_THROWS_WITH(parse_experiment_config(in), "unknown key 'sim.speed'");
  }
  SECTION("empty seed list rejected") {
    std::istringstream in("seeds =\n");
    REQUIRE_THROWS_AS(parse_experiment_config(in), ConfigError);
  }
  SECTION("bad values carry the key path") {
    std::istringstream in("sim.days = soon\n");
    REQUIRE_THROWS_WITH(parse_experiment_config(in),
                        Catch::Matchers::StartsWith("sim.days"));
  }
}

TEST_CASE("schedule subcommand") {
  SECTION("six-user instance comes out in the organ-pipe order") {
    std::istringstream in(six_user_rates());
    std::ostringstream out, diag;
    REQUIRE(cmd_schedule_poisson(in, out, diag, 1.0) == kExitOk);
    const std::string csv = out.str();
    REQUIRE(csv.find("0,u0,0,0\n") != std::string::npos);
    REQUIRE(csv.find("1,u2,1,2\n") != std::string::npos);
    REQUIRE(csv.find("2,u4,2,4\n") != std::string::npos);
    REQUIRE(csv.find("3,u5,3,5\n") != std::string::npos);
    REQUIRE(csv.find("4,u3,4,3\n") != std::string::npos);
    REQUIRE(csv.find("5,u1,5,1\n") != std::string::npos);
    REQUIRE(csv.find("# total_potentiality=") != std::string::npos);
  }
  SECTION("empty input exits 2 with a reason") {
    std::istringstream in("user_id,lambda\n");
    std::ostringstream out, diag;
    REQUIRE(cmd_schedule_poisson(in, out, diag, 1.0) == kExitValidation);
    REQUIRE(diag.str() == "no users\n");
  }
  SECTION("malformed rows get a line-numbered diagnostic") {
    std::istringstream in("user_id,lambda\nu0,fast\n");
    std::ostringstream out, diag;
    REQUIRE(cmd_schedule_poisson(in, out, diag, 1.0) == kExitValidation);
    REQUIRE(diag.str().find("line 2") != std::string::npos);
  }
  SECTION("hash kind reproduces the worked trace") {
    std::istringstream in(
        "slot,profile,yesterday\n1,0,2\n2,0,0\n3,0,4\n4,0,0\n5,0,0\n6,0,2\n");
    std::ostringstream out, diag;
    REQUIRE(cmd_schedule_hash(in, out, diag, 2.0, 100, 0.5, 0.0) == kExitOk);
    REQUIRE(diag.str().find("L=[3]") != std::string::npos);
    REQUIRE(out.str().find("0,3\n") != std::string::npos);
    REQUIRE(out.str().find("# new_remaining=1\n") != std::string::npos);
  }
}

TEST_CASE("partition subcommand") {
  SECTION("rr on an arithmetic input prints prediction and measurement") {
    std::istringstream in(
        "user_id,frequency\nu0,1\nu1,2\nu2,3\nu3,4\nu4,5\nu5,6\nu6,7\nu7,8\n");
    std::ostringstream out, diag;
    REQUIRE(cmd_partition(in, out, diag, "rr", 2, 0.2, 1) == kExitOk);
    REQUIRE(diag.str().find("predicted_diff=0 measured_diff=0") != std::string::npos);
    REQUIRE(out.str().find("# part_sums=18;18") != std::string::npos);
  }
  SECTION("halving with a non power of two part count") {
    std::istringstream in("user_id,frequency\nu0,1\nu1,2\nu2,3\nu3,4\n");
    std::ostringstream out, diag;
    REQUIRE(cmd_partition(in, out, diag, "halving", 3, 0.2, 1) == kExitValidation);
    REQUIRE(diag.str() == "part count must be a power of 2\n");
  }
  SECTION("unknown strategy") {
    std::istringstream in("user_id,frequency\nu0,1\n");
    std::ostringstream out, diag;
    REQUIRE(cmd_partition(in, out, diag, "zigzag", 2, 0.2, 1) == kExitValidation);
  }
  SECTION("rr beats random on synthetic frequencies") {
    Rng rng(1234);
    std::ostringstream csv;
    csv << "user_id,frequency\n";
    for (int i = 0; i < 2000; ++i) csv << 'u' << i << ',' << rng.uniform(0.0, 20.0) << '\n';
    int rr_wins = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      std::istringstream in1(csv.str()), in2(csv.str());
      std::ostringstream out1, diag1, out2, diag2;
      REQUIRE(cmd_partition(in1, out1, diag1, "rr", 4, 0.2, seed) == kExitOk);
      REQUIRE(cmd_partition(in2, out2, diag2, "random", 4, 0.2, seed) == kExitOk);
      const auto grab = [](const std::string& s) {
        const auto p = s.find("max_min_diff=");
        return std::stod(s.substr(p + 13));
      };
      if (grab(diag1.str()) < grab(diag2.str())) ++rr_wins;
    }
    REQUIRE(rr_wins == 5);
  }
}

TEST_CASE("report subcommand") {
  SimReport r;
  r.machines = 2;
  r.seed = 9;
  r.per_machine = {{120, 4}, {100, 4}};
  r.total_messages = 220;
  r.workload_diff = 20;
  r.freshness_minutes = 33.25;
  r.deferrals = 1;
  r.migrations = 0;

  SECTION("round trip through the CSV layer") {
    std::ostringstream os;
    write_sim_reports(os, {r});
    std::istringstream is(os.str());
    const auto rows = read_sim_reports(is);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].machines == 2);
    REQUIRE(rows[0].seed == 9);
    REQUIRE(rows[0].total_messages == 220);
    REQUIRE(rows[0].workload_diff == 20);
    REQUIRE(rows[0].avg_msgs_per_call == Catch::Approx(27.5));
    REQUIRE(rows[0].freshness_minutes == Catch::Approx(33.25));
  }
  SECTION("single input summarizes to itself") {
    std::ostringstream os;
    write_sim_reports(os, {r});
    std::istringstream is(os.str());
    std::ostringstream out;
    REQUIRE(cmd_report({read_sim_reports(is)}, out) == kExitOk);
    REQUIRE(out.str().find("| 2 | 1 | 220 | 220 | 20 |") != std::string::npos);
  }
  SECTION("pair of inputs gets an improvement percentage") {
    auto better = r;
    better.total_messages = 264;
    std::ostringstream out;
    std::vector<SimReportRow> a, b;
    {
      std::ostringstream os;
      write_sim_reports(os, {better});
      std::istringstream is(os.str());
      a = read_sim_reports(is);
    }
    {
      std::ostringstream os;
      write_sim_reports(os, {r});
      std::istringstream is(os.str());
      b = read_sim_reports(is);
    }
    REQUIRE(cmd_report({a, b}, out) == kExitOk);
    REQUIRE(out.str().find("improvement of first over second: 20%") !=
            std::string::npos);
  }
  SECTION("conflicting column sets are rejected") {
    std::istringstream is("machines,seed,bananas\n");
    REQUIRE_THROWS_AS(read_sim_reports(is), CsvError);
  }
}

TEST_CASE("generate subcommand") {
  std::ostringstream out, diag;
  REQUIRE(cmd_generate(5, 7, 11, out, diag) == kExitOk);
  const std::string csv = out.str();
  REQUIRE(csv.rfind("user_id,timestamp_minutes\n", 0) == 0);

  std::istringstream is(csv);
  const auto hist = read_histories(is);
  REQUIRE(hist.size() <= 5);  // fully silent users produce no rows
  for (const auto& h : hist) REQUIRE(std::is_sorted(h.timestamps.begin(), h.timestamps.end()));

  SECTION("zero users rejected") {
    std::ostringstream o, d;
    REQUIRE(cmd_generate(0, 7, 11, o, d) == kExitValidation);
    REQUIRE(d.str() == "no users\n");
  }
}

TEST_CASE("simulate command emits sorted, re-readable rows") {
  ExperimentConfig cfg;
  cfg.machines = {2, 1};
  cfg.seeds = {4, 3};
  cfg.days = 5;
  cfg.population_size = 60;
  std::ostringstream rows, summary;
  REQUIRE(cmd_simulate(cfg, rows, summary) == kExitOk);

  std::istringstream is(rows.str());
  const auto parsed = read_sim_reports(is);
  REQUIRE(parsed.size() == 4);
  REQUIRE(parsed[0].machines == 1);
  REQUIRE(parsed[0].seed == 3);
  REQUIRE(parsed[3].machines == 2);
  REQUIRE(parsed[3].seed == 4);
  REQUIRE(summary.str().find("| machines |") != std::string::npos);
}

TEST_CASE("installed binary end to end", "[binary]") {
  BinRunner runner;
  if (runner.bin.empty()) {
    SKIP("FRESHCRAWL_BIN not set");
  }
  const std::string dir = "/tmp/freshcrawl_cli_test";
  REQUIRE(std::system(("mkdir -p " + dir).c_str()) == 0);

  SECTION("schedule poisson on the six-user instance") {
    spit(dir + "/rates.csv", six_user_rates());
    const int code = runner.run("schedule poisson --input " + dir + "/rates.csv",
                                dir + "/out.txt");
    REQUIRE(code == 0);
    const auto text = slurp(dir + "/out.txt");
    REQUIRE(text.find("1,u2,1,2") != std::string::npos);
    REQUIRE(text.find("5,u1,5,1") != std::string::npos);
  }
  SECTION("empty input exits with code 2") {
    spit(dir + "/empty.csv", "user_id,lambda\n");
    const int code = runner.run("schedule poisson --input " + dir + "/empty.csv",
                                dir + "/out.txt");
    REQUIRE(code == 2);
    REQUIRE(slurp(dir + "/out.txt").find("no users") != std::string::npos);
  }
  SECTION("seed env override changes the generated corpus") {
    const std::string base = "generate --n 20 --days 3 --seed 1 --output ";
    REQUIRE(runner.run(base + dir + "/a.csv", dir + "/log.txt") == 0);
    REQUIRE(runner.run(base + dir + "/b.csv", dir + "/log.txt") == 0);
    REQUIRE(slurp(dir + "/a.csv") == slurp(dir + "/b.csv"));
    const int code = std::system(("FRESHCRAWL_SEED=99 " + runner.bin + " " + base +
                                  dir + "/c.csv >" + dir + "/log.txt 2>&1")
                                     .c_str());
    REQUIRE(WEXITSTATUS(code) == 0);
    REQUIRE(slurp(dir + "/c.csv") != slurp(dir + "/a.csv"));
  }
  SECTION("simulate with a config file and rerun determinism") {
    spit(dir + "/exp.conf",
         "sim.model = poisson\nsim.days = 4\npopulation.size = 80\nseeds = 2\n"
         "sim.machines = 1,2\noutput.csv = " + dir + "/runs.csv\n");
    REQUIRE(runner.run("simulate --config " + dir + "/exp.conf", dir + "/s1.txt") == 0);
    const auto first = slurp(dir + "/runs.csv");
    REQUIRE(runner.run("simulate --config " + dir + "/exp.conf", dir + "/s2.txt") == 0);
    REQUIRE(first == slurp(dir + "/runs.csv"));
    REQUIRE(runner.run("report --input " + dir + "/runs.csv", dir + "/rep.txt") == 0);
    REQUIRE(slurp(dir + "/rep.txt").find("| machines |") != std::string::npos);
  }
  SECTION("unknown config key names the key and exits 2") {
    spit(dir + "/bad.conf", "sim.warp = 9\n");
    const int code = runner.run("simulate --config " + dir + "/bad.conf",
                                dir + "/out.txt");
    REQUIRE(code == 2);
    REQUIRE(slurp(dir + "/out.txt").find("sim.warp") != std::string::npos);
  }
}
