// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Tolerances and run configurations are pinned here on purpose; loosening
// them is not an acceptable way to make this binary pass.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "freshcrawl/cli.hpp"
#include "freshcrawl/csv.hpp"
#include "freshcrawl/partition.hpp"
#include "freshcrawl/rng.hpp"
#include "freshcrawl/scheduler.hpp"
#include "freshcrawl/simharness.hpp"

using namespace freshcrawl;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  if (!ok) ++failures;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

double elapsed(double since) { return now_seconds() - since; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// --------------------------------------------------------------------------
// 1. organ-pipe schedule equals the exhaustive permutation minimum, n <= 8

double exhaustive_minimum(const std::vector<double>& lambdas, double delta) {
  std::vector<std::size_t> perm(lambdas.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = 1e300;
  do {
    double total = 0.0;
    for (std::size_t j = 0; j < perm.size(); ++j)
      total += user_potentiality(lambdas[perm[j]], static_cast<double>(j) * delta,
                                 perm.size(), delta);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void criterion_1() {
  const double t0 = now_seconds();
  Rng rng(10001);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.next_below(8);
    std::vector<double> lambdas;
    for (std::size_t i = 0; i < n; ++i) lambdas.push_back(rng.uniform(0.0, 10.0));
    std::sort(lambdas.begin(), lambdas.end());
    const double delta = rng.uniform(0.1, 3.0);

    PoissonScheduleInput in;
    in.delta = delta;
    for (std::size_t i = 0; i < n; ++i)
      in.users.push_back({"u" + std::to_string(i), lambdas[i]});
    const auto s = organ_pipe_schedule(in);
    worst = std::max(worst,
                     std::abs(s.total_potentiality - exhaustive_minimum(lambdas, delta)));
  }
  const double secs = elapsed(t0);
  verdict(1, worst <= 1e-9 && secs < 30.0,
          "schedule optimality vs exhaustive search, 200 instances, max error " +
              fmt(worst) + ", " + fmt(secs) + "s");
}

// --------------------------------------------------------------------------
// 2. penalty and potentiality scaling identities

void criterion_2() {
  Rng rng(10002);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.next_below(50);
    const std::size_t i = rng.next_below(n + 1);
    const double delta = rng.uniform(0.01, 10.0);
    const double lambda = rng.uniform(0.0, 20.0);

    const double w_scaled = crawl_penalty(static_cast<double>(i) * delta, n, delta);
    const double w_unit = delta * delta * crawl_penalty(static_cast<double>(i), n, 1.0);
    worst = std::max(worst, std::abs(w_scaled - w_unit) / std::max(1.0, std::abs(w_unit)));

    const double p_scaled =
        user_potentiality(lambda, static_cast<double>(i) * delta, n, delta);
    const double p_unit =
        delta * user_potentiality(lambda, static_cast<double>(i), n, 1.0);
    worst = std::max(worst, std::abs(p_scaled - p_unit) / std::max(1.0, std::abs(p_unit)));
  }
  verdict(2, worst <= 1e-12,
          "slot-width scaling identities, 1000 trials, max relative error " + fmt(worst));
}

// --------------------------------------------------------------------------
// 3. six-user worked schedule

void criterion_3() {
  PoissonScheduleInput in;
  for (int i = 0; i < 6; ++i)
    in.users.push_back({"u" + std::to_string(i), static_cast<double>(i)});
  const auto s = organ_pipe_schedule(in);
  const std::vector<std::string> want{"u0", "u2", "u4", "u5", "u3", "u1"};
  verdict(3, s.order == want, "six-user instance orders as u0,u2,u4,u5,u3,u1");
}

// --------------------------------------------------------------------------
// 4. closed-form two-part difference for arithmetic frequencies

void criterion_4() {
  Rng rng(10004);
  double worst = 0.0;
  bool bounded = true;
  for (std::size_t n = 4; n <= 200; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      const double f0 = rng.uniform(0.0, 10.0);
      const double delta = rng.uniform(0.01, 5.0);
      FrequencySequence seq;
      for (std::size_t i = 0; i < n; ++i)
        seq.entries.push_back(
            {"u" + std::to_string(i), f0 + static_cast<double>(i) * delta});
      const auto a = rr_split(apply_organ_pipe(seq), 2);
      const double measured = a.part_sums[0] - a.part_sums[1];
      worst = std::max(worst, std::abs(measured - predict_rr_difference(f0, delta, n)));
      if (std::abs(measured) > std::max(f0, delta) + 1e-9) bounded = false;
    }
  }
  verdict(4, worst <= 1e-9 && bounded,
          "arithmetic-input split difference closed form, n in [4,200] x 50, max error " +
              fmt(worst));
}

// --------------------------------------------------------------------------
// 5. hash crawl-time list worked traces

void criterion_5() {
  bool ok = true;

  HashScheduleInput a;
  a.profile_slots.assign(24, 0.0);
  a.yesterday_counts.assign(24, 0.0);
  a.capacity = 1.0;
  a.span_threshold = 5;
  const auto ra = hash_schedule(a, 0.5);
  ok = ok && ra.crawl_times == std::vector<int>{6, 12, 18, 24} && ra.new_remaining == 0.0;

  HashScheduleInput b;
  b.profile_slots = {0, 0, 0, 0, 0, 0};
  b.yesterday_counts = {2, 0, 4, 0, 0, 2};
  b.capacity = 2.0;
  b.span_threshold = 100;
  const auto rb = hash_schedule(b, 0.5);
  ok = ok && rb.updated_slots == std::vector<double>{1, 0, 2, 0, 0, 1} &&
       rb.crawl_times == std::vector<int>{3} && std::abs(rb.new_remaining - 1.0) < 1e-12;

  HashScheduleInput c;
  c.profile_slots = {0, 0, 0, 0};
  c.yesterday_counts = {0, 0, 0, 0};
  c.capacity = 2.0;
  c.span_threshold = 100;
  c.remaining = 3.0;
  const auto rc = hash_schedule(c, 0.5);
  ok = ok && rc.crawl_times == std::vector<int>{1} && rc.new_remaining == 0.0;

  verdict(5, ok, "three hand-derived crawl-time traces match exactly");
}

// --------------------------------------------------------------------------
// 6. subset-sum selection equals exhaustive search

void criterion_6() {
  Rng rng(10006);
  bool ok = true;
  for (int trial = 0; trial < 500 && ok; ++trial) {
    const std::size_t n = 1 + rng.next_below(18);
    std::vector<std::int64_t> values;
    for (std::size_t i = 0; i < n; ++i)
      values.push_back(static_cast<std::int64_t>(rng.next_below(101)));
    const auto capacity = static_cast<std::int64_t>(rng.next_below(600));

    std::int64_t best = 0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      std::int64_t s = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (std::size_t{1} << i)) s += values[i];
      if (s <= capacity) best = std::max(best, s);
    }
    const auto r = subset_sum_select(values, capacity);
    std::int64_t check = 0;
    for (std::size_t i : r.indices) check += values[i];
    ok = r.sum == best && check == r.sum;
  }
  verdict(6, ok, "exact selection vs exhaustive search, 500 instances, n <= 18");
}

// --------------------------------------------------------------------------
// 7. recursive halving ratio bound

void criterion_7() {
  const double t0 = now_seconds();
  Rng rng(10007);
  bool ok = true;
  double worst_slack = 0.0;
  for (double eps : {0.1, 0.2, 0.5}) {
    for (std::size_t k : {std::size_t{2}, std::size_t{4}, std::size_t{8}}) {
      for (int inst = 0; inst < 50; ++inst) {
        FrequencySequence seq;
        for (int i = 0; i < 200; ++i)
          seq.entries.push_back({"u" + std::to_string(i), rng.uniform(0.0, 10.0)});
        const auto a = recursive_halving(seq, PtasParams::make(eps, k));
        const auto [lo, hi] =
            std::minmax_element(a.part_sums.begin(), a.part_sums.end());
        const double ratio = *hi / *lo;
        worst_slack = std::max(worst_slack, ratio - (1.0 + eps));
        if (ratio > 1.0 + eps) ok = false;
      }
    }
  }
  const double secs = elapsed(t0);
  verdict(7, ok && secs < 60.0,
          "part-sum ratio <= 1+eps over 450 instances, worst slack " + fmt(worst_slack) +
              ", " + fmt(secs) + "s");
}

// --------------------------------------------------------------------------
// 8. alternating split beats a random split

void criterion_8() {
  int wins = 0;
  double ratio_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed * 7919);
    FrequencySequence seq;
    for (int i = 0; i < 10000; ++i)
      seq.entries.push_back({"u" + std::to_string(i), rng.uniform(0.0, 20.0)});

    FrequencySequence sorted = seq;
    std::stable_sort(sorted.entries.begin(), sorted.entries.end(),
                     [](const FrequencyEntry& a, const FrequencyEntry& b) {
                       return a.frequency < b.frequency;
                     });
    const auto rr = rr_split(apply_organ_pipe(sorted), 4);
    const auto rnd = random_split(seq, 4, seed);
    if (rr.max_min_diff < rnd.max_min_diff) ++wins;
    if (rnd.max_min_diff > 0.0) ratio_sum += rr.max_min_diff / rnd.max_min_diff;
  }
  verdict(8, wins >= 19,
          "alternating split narrower than random in " + std::to_string(wins) +
              "/20 seeds, mean diff ratio " + fmt(ratio_sum / 20.0));
}

// --------------------------------------------------------------------------
// 9. schedule model ranking under a scarce call budget

SimReport ranked_run(ScheduleModel model, std::uint64_t seed, int span, double trig) {
  SimConfig c;
  c.machines = 1;
  c.model = model;
  c.duration_days = 30;
  c.seed = seed;
  c.users = make_population(5000, seed * 13 + 1);
  c.quota.calls_per_window = 50;
  c.quota.messages_per_call = 25;
  c.span_days = span;
  c.hash_trigger = trig;
  return Simulation(c).run();
}

void criterion_9() {
  int poisson_wins = 0, hash_wins = 0;
  double poisson_margin = 0.0, hash_margin = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto rr = ranked_run(ScheduleModel::RoundRobin, seed, 30, 25);
    const auto po = ranked_run(ScheduleModel::Poisson, seed, 30, 25);
    const auto ha = ranked_run(ScheduleModel::Hash, seed, 4, 25);
    if (po.total_messages > rr.total_messages) ++poisson_wins;
    if (ha.collected_active > rr.collected_active) ++hash_wins;
    poisson_margin += static_cast<double>(po.total_messages - rr.total_messages) /
                      static_cast<double>(rr.total_messages);
    hash_margin += static_cast<double>(ha.collected_active - rr.collected_active) /
                   static_cast<double>(rr.collected_active);
  }
  verdict(9, poisson_wins >= 18 && hash_wins >= 18,
          "rate-matched beats uniform in " + std::to_string(poisson_wins) +
              "/20 (mean margin " + fmt(poisson_margin / 20.0 * 100.0) +
              "%), slot-profile beats uniform on active users in " +
              std::to_string(hash_wins) + "/20 (mean margin " +
              fmt(hash_margin / 20.0 * 100.0) + "%)");
}

// --------------------------------------------------------------------------
// 10. decay-weight sweep monotonicity

void criterion_10() {
  bool ok = true;
  std::int64_t first_calls = 0, last_calls = 0;
  double first_avg = 0.0, last_avg = 0.0;
  for (std::uint64_t seed = 1; seed <= 5 && ok; ++seed) {
    std::int64_t prev_calls = -1;
    double prev_avg = 1e18;
    for (double w : {0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
      SimConfig c;
      c.machines = 1;
      c.model = ScheduleModel::Hash;
      c.duration_days = 60;
      c.seed = seed;
      c.users = make_population(2000, seed * 101 + 7);
      c.hash_weight = w;
      c.hash_trigger = 60;
      c.span_days = 15;
      const auto r = Simulation(c).run();
      const std::int64_t calls = r.total_calls();
      const double avg = r.avg_msgs_per_call();
      if (calls < prev_calls || avg > prev_avg + 1e-12) ok = false;
      prev_calls = calls;
      prev_avg = avg;
      if (seed == 1 && w == 0.4) {
        first_calls = calls;
        first_avg = avg;
      }
      if (seed == 1 && w == 0.9) {
        last_calls = calls;
        last_avg = avg;
      }
    }
  }
  verdict(10, ok,
          "weight 0.4->0.9 sweep monotone for every seed (seed 1: calls " +
              std::to_string(first_calls) + "->" + std::to_string(last_calls) +
              ", avg " + fmt(first_avg) + "->" + fmt(last_avg) + ")");
}

// --------------------------------------------------------------------------
// 11. near-linear scaling across machine counts

void criterion_11() {
  bool ok = true;
  double worst_ratio_lo = 1.0, worst_ratio_hi = 1.0, worst_secs = 0.0;
  for (auto arch : {Architecture::Centralized, Architecture::Distributed}) {
    double base = 0.0;
    for (int m : {1, 2, 4, 8, 16}) {
      SimConfig c;
      c.architecture = arch;
      c.machines = m;
      c.model = ScheduleModel::Poisson;
      c.duration_days = 365;
      c.seed = 3;
      c.users = make_population(2000 * static_cast<std::size_t>(m), 17);
      const double t0 = now_seconds();
      const auto r = Simulation(c).run();
      const double secs = elapsed(t0);
      worst_secs = std::max(worst_secs, secs);
      if (secs >= 300.0) ok = false;
      if (m == 1) {
        base = static_cast<double>(r.total_messages);
        continue;
      }
      const double ratio = static_cast<double>(r.total_messages) / (base * m);
      worst_ratio_lo = std::min(worst_ratio_lo, ratio);
      worst_ratio_hi = std::max(worst_ratio_hi, ratio);
      if (ratio < 0.9 || ratio > 1.1) ok = false;
    }
  }
  verdict(11, ok,
          "machine sweep {1,2,4,8,16} within 10% of linear on both architectures "
          "(ratios " +
              fmt(worst_ratio_lo) + ".." + fmt(worst_ratio_hi) + ", slowest run " +
              fmt(worst_secs) + "s)");
}

// --------------------------------------------------------------------------
// 12. dispatch architectures: balance ordering and single-machine identity

std::string report_bytes(const SimReport& r) {
  std::ostringstream os;
  write_sim_reports(os, {r});
  return os.str();
}

void criterion_12() {
  std::vector<std::int64_t> cent, dist;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SimConfig c;
    c.machines = 4;
    c.model = ScheduleModel::Poisson;
    c.duration_days = 30;
    c.seed = seed;
    c.users = make_population(4000, seed + 500);
    c.quota.calls_per_window = 2;
    c.architecture = Architecture::Centralized;
    cent.push_back(Simulation(c).run().workload_diff);
    c.architecture = Architecture::Distributed;
    dist.push_back(Simulation(c).run().workload_diff);
  }
  std::sort(cent.begin(), cent.end());
  std::sort(dist.begin(), dist.end());
  const std::int64_t median_c = (cent[9] + cent[10]) / 2;
  const std::int64_t median_d = (dist[9] + dist[10]) / 2;

  SimConfig one;
  one.machines = 1;
  one.model = ScheduleModel::Poisson;
  one.duration_days = 14;
  one.seed = 8;
  one.users = make_population(300, 8);
  const auto rc = Simulation(one).run();
  one.architecture = Architecture::Distributed;
  const auto rd = Simulation(one).run();

  verdict(12, median_d >= median_c && report_bytes(rc) == report_bytes(rd),
          "median workload diff distributed " + std::to_string(median_d) +
              " >= centralized " + std::to_string(median_c) +
              " over 20 seeds; single-machine runs byte-identical");
}

// --------------------------------------------------------------------------
// 13. deterministic reruns

void criterion_13() {
  ExperimentConfig cfg;
  cfg.machines = {1, 3};
  cfg.seeds = {2, 5};
  cfg.days = 10;
  cfg.population_size = 200;
  cfg.model = ScheduleModel::Hash;

  std::ostringstream a_rows, a_sum, b_rows, b_sum;
  cmd_simulate(cfg, a_rows, a_sum);
  cmd_simulate(cfg, b_rows, b_sum);
  verdict(13, a_rows.str() == b_rows.str() && !a_rows.str().empty(),
          "rerun of a 2x2 machine/seed sweep produces byte-identical CSV");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  criterion_13();
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all 13 criteria passed\n");
  return 0;
}
