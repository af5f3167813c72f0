#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "freshcrawl/behavior.hpp"
#include "freshcrawl/partition.hpp"
#include "freshcrawl/rng.hpp"
#include "freshcrawl/scheduler.hpp"

namespace freshcrawl {

struct QuotaPolicy {
  int calls_per_window = 350;
  int window_minutes = 60;
  int messages_per_call = 100;
};

enum class Architecture { Centralized, Distributed };
enum class ScheduleModel { Poisson, Hash, RoundRobin };
enum class SplitStrategy { RrSplit, SetDivision };

inline const char* to_string(Architecture a) {
  return a == Architecture::Centralized ? "centralized" : "distributed";
}
inline const char* to_string(ScheduleModel m) {
  switch (m) {
    case ScheduleModel::Poisson: return "poisson";
    case ScheduleModel::Hash: return "hash";
    case ScheduleModel::RoundRobin: return "rr";
  }
  return "?";
}

struct SimConfig {
  Architecture architecture = Architecture::Centralized;
  int machines = 1;
  ScheduleModel model = ScheduleModel::Poisson;
  QuotaPolicy quota;
  int duration_days = 30;
  std::uint64_t seed = 1;
  std::vector<GeneratorSpec> users;

  // model knobs
  double hash_weight = 0.5;
  double hash_trigger = 0.0;  // Alg.2 capacity c; 0 => messages_per_call
  int span_days = 30;         // force a visit at least this often
  int retention_cap = 2000;   // newest messages kept per user
  SplitStrategy split = SplitStrategy::RrSplit;  // distributed ownership

  std::ostream* trace = nullptr;  // optional event log
  std::vector<struct SimEvent>* events = nullptr;  // optional raw event capture
};

struct SimEvent {
  enum class Kind { Fetch, Defer, Migrate };
  std::int64_t t = 0;
  Kind kind = Kind::Fetch;
  int machine = 0;
  int user = 0;
  std::int64_t count = 0;
  std::int64_t lag_sum = 0;  // summed collection lag of the fetched messages
};

inline const char* to_string(SimEvent::Kind k) {
  switch (k) {
    case SimEvent::Kind::Fetch: return "fetch";
    case SimEvent::Kind::Defer: return "defer";
    case SimEvent::Kind::Migrate: return "migrate";
  }
  return "?";
}

struct MachinePerf {
  std::int64_t collected = 0;
  std::int64_t calls_made = 0;
};

struct SimReport {
  int machines = 1;
  std::uint64_t seed = 0;
  std::int64_t total_messages = 0;
  std::vector<MachinePerf> per_machine;
  std::int64_t workload_diff = 0;  // max - min collected
  std::int64_t elapsed_logical_time = 0;  // minutes
  double freshness_minutes = 0.0;  // mean collection lag
  std::int64_t deferrals = 0;
  std::int64_t migrations = 0;
  // auxiliary counters, not part of the CSV row
  std::int64_t total_posted = 0;
  std::int64_t collected_active = 0;  // from users with mean rate >= 10/day
  std::int64_t posted_active = 0;

  double avg_msgs_per_call() const {
    std::int64_t calls = 0;
    for (const auto& m : per_machine) calls += m.calls_made;
    return calls > 0 ? static_cast<double>(total_messages) / static_cast<double>(calls)
                     : 0.0;
  }
  std::int64_t total_calls() const {
    std::int64_t calls = 0;
    for (const auto& m : per_machine) calls += m.calls_made;
    return calls;
  }
};

inline constexpr const char* kSimReportHeader =
    "machines,seed,total_messages,workload_diff,avg_msgs_per_call,"
    "freshness_minutes,deferrals,migrations";

// Rebuilds the aggregate report from a raw event stream.
inline SimReport compute_metrics(const std::vector<SimEvent>& events, int machines = 1) {
  SimReport r;
  r.machines = machines;
  r.per_machine.assign(static_cast<std::size_t>(machines), MachinePerf{});
  std::int64_t lag_sum = 0;
  for (const auto& e : events) {
    r.elapsed_logical_time = std::max(r.elapsed_logical_time, e.t);
    switch (e.kind) {
      case SimEvent::Kind::Fetch: {
        auto& m = r.per_machine[static_cast<std::size_t>(e.machine)];
        m.calls_made += 1;
        m.collected += e.count;
        r.total_messages += e.count;
        lag_sum += e.lag_sum;
        break;
      }
      case SimEvent::Kind::Defer: r.deferrals += 1; break;
      case SimEvent::Kind::Migrate: r.migrations += 1; break;
    }
  }
  std::int64_t lo = r.per_machine.empty() ? 0 : r.per_machine[0].collected;
  std::int64_t hi = lo;
  for (const auto& m : r.per_machine) {
    lo = std::min(lo, m.collected);
    hi = std::max(hi, m.collected);
  }
  r.workload_diff = hi - lo;
  r.freshness_minutes = r.total_messages > 0
                            ? static_cast<double>(lag_sum) /
                                  static_cast<double>(r.total_messages)
                            : 0.0;
  return r;
}

// ---------------------------------------------------------------------------

struct CrawlTask {
  std::int32_t minute = 0;  // minute within the day
  std::int32_t user = 0;
  std::int32_t owner = -1;  // fixed machine in distributed mode
};

struct MachineState {
  int machine_id = 0;
  std::deque<CrawlTask> todo;   // tasks waiting for quota
  int quota_remaining = 0;
  std::int64_t window_index = -1;
  std::int64_t collected = 0;
  std::int64_t calls_made = 0;
};

// Server-side dispatch rule: shortest to-do list, ties broken uniformly at
// random.
inline int assign_task_centralized(const std::vector<MachineState>& machines, Rng& rng) {
  if (machines.empty()) throw std::invalid_argument("no machines");
  std::size_t best_len = machines[0].todo.size();
  for (const auto& m : machines) best_len = std::min(best_len, m.todo.size());
  std::vector<int> ties;
  for (const auto& m : machines)
    if (m.todo.size() == best_len) ties.push_back(m.machine_id);
  if (ties.size() == 1) return ties[0];
  return ties[static_cast<std::size_t>(rng.next_below(ties.size()))];
}

// Moves the exhausted machine's queued tasks for the current window to the
// machine with the most remaining quota. Returns the migrated tasks.
inline std::vector<CrawlTask> rebalance(std::vector<MachineState>& machines,
                                        int exhausted_id) {
  int target = -1, best_quota = 0;
  for (const auto& m : machines) {
    if (m.machine_id == exhausted_id) continue;
    if (m.quota_remaining > best_quota) {
      best_quota = m.quota_remaining;
      target = m.machine_id;
    }
  }
  std::vector<CrawlTask> moved;
  if (target < 0) return moved;  // everyone exhausted: caller defers
  auto& src = machines[static_cast<std::size_t>(exhausted_id)].todo;
  auto& dst = machines[static_cast<std::size_t>(target)].todo;
  const std::size_t n = std::min(src.size(), static_cast<std::size_t>(best_quota));
  for (std::size_t i = 0; i < n; ++i) {
    moved.push_back(src.front());
    dst.push_back(src.front());
    src.pop_front();
  }
  return moved;
}

// ---------------------------------------------------------------------------

class Simulation {
 public:
  explicit Simulation(const SimConfig& config) : cfg_(config), master_(config.seed) {
    if (cfg_.machines < 1) throw std::invalid_argument("machines must be >= 1");
    if (cfg_.duration_days <= 0) throw std::invalid_argument("duration must be positive");
    if (cfg_.users.empty()) throw std::invalid_argument("no users");
    if (cfg_.hash_trigger <= 0.0) cfg_.hash_trigger = cfg_.quota.messages_per_call;
    init_users();
    init_machines();
  }

  SimReport run() {
    for (int day = 0; day < cfg_.duration_days; ++day) {
      begin_day(day);
      auto tasks = build_tasks(day);
      execute_day(day, tasks);
      end_day(day);
    }
    return make_report();
  }

  // Test hook: one crawl call against a user. Caller manages quota.
  std::int64_t crawl_user(int machine_id, int user, std::int64_t now) {
    return fetch(machine_id, user, now);
  }

  // Test hook: generate one day's messages without running the full loop.
  void prepare_day(int day) { begin_day(day); }

  const SimConfig& config() const { return cfg_; }

 private:
  struct Bucket {
    std::int32_t time_bucket;  // day * slots_per_day + slot
    std::int32_t count;
  };

  struct UserState {
    GeneratorSpec spec;
    double mean_rate = 0.0;  // long-run expected posts/day
    int owner = 0;           // distributed home machine

    std::deque<Bucket> pending;  // uncollected, oldest first
    std::int64_t pending_total = 0;
    std::vector<std::int32_t> today;  // per-slot counts of current day
    std::int32_t released = 0;        // slots of `today` already in pending

    std::vector<double> profile;      // hash model slots, cold start
    double remaining = 0.0;
    std::vector<double> yesterday;    // true per-slot counts of previous day
    int last_crawl_day = 0;
    bool crawled_today = false;
    int visit_period_days = 1;        // Poisson mode revisit period

    bool promoted = true;             // instables start demoted to inactive
    std::array<std::int64_t, 7> recent_posts{};  // trailing week, by day % 7
    std::int64_t posted_today = 0;
  };

  SimConfig cfg_;
  Rng master_;
  std::vector<UserState> users_;
  std::vector<MachineState> machines_;
  std::vector<std::int32_t> rr_order_;  // RoundRobin rotation, global order
  std::size_t rr_cursor_ = 0;

  std::int64_t deferrals_ = 0;
  std::int64_t migrations_ = 0;
  std::int64_t total_posted_ = 0;
  std::int64_t posted_active_ = 0;
  std::int64_t collected_active_ = 0;
  std::int64_t freshness_sum_ = 0;  // minutes, summed per collected message
  std::int64_t freshness_count_ = 0;

  int slots_per_day() const { return kDefaultSlots; }

  // Revisit period sized so the per-call cap covers the expected accrual.
  int period_for_rate(double rate) const {
    const double c = cfg_.quota.messages_per_call;
    const double period = c / std::max(rate, 0.05);
    return static_cast<int>(std::clamp(std::floor(period), 1.0,
                                       static_cast<double>(cfg_.span_days)));
  }

  void init_users() {
    users_.resize(cfg_.users.size());
    for (std::size_t i = 0; i < users_.size(); ++i) {
      auto& u = users_[i];
      u.spec = cfg_.users[i];
      u.mean_rate = u.spec.base_rate;
      if (u.spec.user_class == UserClass::Instable) {
        const int cycle = u.spec.burst_days + u.spec.silence_days;
        u.mean_rate = cycle > 0 ? u.spec.burst_rate * u.spec.burst_days / cycle : 0.0;
      }
      u.profile.assign(static_cast<std::size_t>(slots_per_day()), 0.0);
      u.yesterday.assign(static_cast<std::size_t>(slots_per_day()), 0.0);
      u.today.assign(static_cast<std::size_t>(slots_per_day()), 0);

      if (u.spec.daily_shape.empty()) u.spec.daily_shape = uniform_shape(slots_per_day());

      u.visit_period_days = period_for_rate(u.mean_rate);
      // bursty users are treated as inactive until the trailing-week check
      // promotes them
      if (u.spec.user_class == UserClass::Instable) {
        u.promoted = false;
        u.visit_period_days = cfg_.span_days;
      }
      // stagger the initial visits so day 0 is not a stampede
      u.last_crawl_day = -static_cast<int>(i % static_cast<std::size_t>(
                                                   u.visit_period_days));
    }

    // Distributed ownership: organ-pipe over mean rate then round-robin, or
    // the subset-sum set division when configured.
    std::vector<std::size_t> by_rate(users_.size());
    std::iota(by_rate.begin(), by_rate.end(), std::size_t{0});
    std::stable_sort(by_rate.begin(), by_rate.end(), [&](std::size_t a, std::size_t b) {
      return users_[a].mean_rate < users_[b].mean_rate;
    });
    if (cfg_.split == SplitStrategy::SetDivision && cfg_.machines > 1) {
      FrequencySequence seq;
      seq.entries.reserve(users_.size());
      for (std::size_t i = 0; i < users_.size(); ++i)
        seq.entries.push_back({std::to_string(i), users_[i].mean_rate});
      const auto parts = set_division(seq, static_cast<std::size_t>(cfg_.machines));
      for (std::size_t p = 0; p < parts.parts.size(); ++p)
        for (const auto& id : parts.parts[p])
          users_[static_cast<std::size_t>(std::stoul(id))].owner = static_cast<int>(p);
    } else {
      const auto pos = organ_pipe_positions(users_.size());
      for (std::size_t j = 0; j < pos.size(); ++j) {
        const std::size_t idx = by_rate[pos[j]];
        users_[idx].owner = static_cast<int>(j % static_cast<std::size_t>(cfg_.machines));
      }
    }

    rr_order_.resize(users_.size());
    std::iota(rr_order_.begin(), rr_order_.end(), 0);
  }

  void init_machines() {
    machines_.resize(static_cast<std::size_t>(cfg_.machines));
    for (int m = 0; m < cfg_.machines; ++m) {
      machines_[static_cast<std::size_t>(m)].machine_id = m;
      machines_[static_cast<std::size_t>(m)].quota_remaining = cfg_.quota.calls_per_window;
      machines_[static_cast<std::size_t>(m)].window_index = 0;
    }
  }

  void begin_day(int day) {
    for (std::size_t i = 0; i < users_.size(); ++i) {
      auto& u = users_[i];
      std::fill(u.today.begin(), u.today.end(), 0);
      u.released = 0;
      u.crawled_today = false;

      double rate = u.spec.base_rate;
      if (u.spec.user_class == UserClass::Instable) {
        const int cycle = u.spec.burst_days + u.spec.silence_days;
        rate = (cycle > 0 && day % cycle < u.spec.burst_days) ? u.spec.burst_rate : 0.0;
      }
      Rng rng = master_.fork(i + 1, static_cast<std::uint64_t>(day) + 1);
      const long count = rng.poisson(rate);
      const auto& shape = u.spec.daily_shape;
      for (long m = 0; m < count; ++m) {
        double p = rng.next_double();
        std::size_t slot = 0;
        for (; slot + 1 < shape.size(); ++slot) {
          if (p < shape[slot]) break;
          p -= shape[slot];
        }
        u.today[slot] += 1;
      }
      total_posted_ += count;
      u.posted_today = count;
      if (u.mean_rate >= 10.0) posted_active_ += count;
    }
  }

  // --- task generation ------------------------------------------------------

  std::vector<CrawlTask> build_tasks(int day) {
    std::vector<CrawlTask> tasks;
    const bool dist = cfg_.architecture == Architecture::Distributed;
    if (dist) {
      for (int m = 0; m < cfg_.machines; ++m) build_owner_tasks(day, m, tasks);
    } else {
      build_owner_tasks(day, -1, tasks);
    }
    std::stable_sort(tasks.begin(), tasks.end(), [](const CrawlTask& a, const CrawlTask& b) {
      return a.minute != b.minute ? a.minute < b.minute : a.user < b.user;
    });
    return tasks;
  }

  bool owned(int user, int owner) const {
    return owner < 0 || users_[static_cast<std::size_t>(user)].owner == owner;
  }

  void build_owner_tasks(int day, int owner, std::vector<CrawlTask>& out) {
    switch (cfg_.model) {
      case ScheduleModel::Poisson: build_poisson_tasks(day, owner, out); break;
      case ScheduleModel::RoundRobin: build_rr_tasks(day, owner, out); break;
      case ScheduleModel::Hash: build_hash_tasks(day, owner, out); break;
    }
  }

  void build_poisson_tasks(int day, int owner, std::vector<CrawlTask>& out) {
    std::vector<std::int32_t> due;
    for (std::size_t i = 0; i < users_.size(); ++i) {
      if (!owned(static_cast<int>(i), owner)) continue;
      if (day - users_[i].last_crawl_day >= users_[i].visit_period_days)
        due.push_back(static_cast<std::int32_t>(i));
    }
    // organ-pipe over the due users sorted ascending by rate
    std::stable_sort(due.begin(), due.end(), [&](std::int32_t a, std::int32_t b) {
      const double ra = users_[static_cast<std::size_t>(a)].mean_rate;
      const double rb = users_[static_cast<std::size_t>(b)].mean_rate;
      return ra != rb ? ra < rb : a < b;
    });
    const auto pos = organ_pipe_positions(due.size());
    for (std::size_t j = 0; j < pos.size(); ++j) {
      const std::int32_t minute =
          static_cast<std::int32_t>(j * static_cast<std::size_t>(kMinutesPerDay) /
                                    pos.size());
      out.push_back({minute, due[pos[j]], owner});
    }
  }

  void build_rr_tasks(int day, int owner, std::vector<CrawlTask>& out) {
    (void)day;
    // spend the full daily call budget cycling through the user list
    const std::int64_t windows_per_day = kMinutesPerDay / cfg_.quota.window_minutes;
    const int owner_machines = owner < 0 ? cfg_.machines : 1;
    std::int64_t budget = windows_per_day * cfg_.quota.calls_per_window * owner_machines;

    std::vector<std::int32_t> mine;
    for (std::size_t i = 0; i < rr_order_.size(); ++i) {
      const std::int32_t u = rr_order_[(rr_cursor_ + i) % rr_order_.size()];
      if (owned(u, owner)) mine.push_back(u);
    }
    if (owner < 0 || owner == cfg_.machines - 1)
      rr_cursor_ = (rr_cursor_ + rr_order_.size()) % rr_order_.size();

    budget = std::min<std::int64_t>(budget, static_cast<std::int64_t>(mine.size()));
    for (std::int64_t j = 0; j < budget; ++j) {
      const auto minute =
          static_cast<std::int32_t>(j * kMinutesPerDay / std::max<std::int64_t>(budget, 1));
      out.push_back({minute, mine[static_cast<std::size_t>(j)], owner});
    }
  }

  void build_hash_tasks(int day, int owner, std::vector<CrawlTask>& out) {
    const int k = slots_per_day();
    const int slot_minutes = static_cast<int>(kMinutesPerDay) / k;
    for (std::size_t i = 0; i < users_.size(); ++i) {
      if (!owned(static_cast<int>(i), owner)) continue;
      auto& u = users_[i];
      auto [times, new_remaining] =
          hash_crawl_times(u.profile, cfg_.hash_trigger, k + 1, u.remaining);
      const bool overdue = day - u.last_crawl_day >= cfg_.span_days;
      if (times.empty() && overdue) times.push_back(k);
      u.remaining = new_remaining;
      for (int slot : times)
        out.push_back({slot * slot_minutes - 1, static_cast<std::int32_t>(i), owner});
    }
  }

  // --- execution ------------------------------------------------------------

  void execute_day(int day, const std::vector<CrawlTask>& tasks) {
    const std::int64_t day_start = static_cast<std::int64_t>(day) * kMinutesPerDay;
    const int wmin = cfg_.quota.window_minutes;
    const std::int64_t windows = kMinutesPerDay / wmin;

    std::size_t cursor = 0;
    for (std::int64_t w = 0; w < windows; ++w) {
      const std::int64_t wstart = day_start + w * wmin;
      for (auto& m : machines_) open_window(m, wstart / wmin, wstart);
      while (cursor < tasks.size() && tasks[cursor].minute < (w + 1) * wmin) {
        dispatch(tasks[cursor], day_start + tasks[cursor].minute);
        ++cursor;
      }
    }
  }

  void open_window(MachineState& m, std::int64_t window_index, std::int64_t now) {
    if (m.window_index == window_index) return;
    m.window_index = window_index;
    m.quota_remaining = cfg_.quota.calls_per_window;
    // drain what was deferred into this window
    while (!m.todo.empty() && m.quota_remaining > 0) {
      const CrawlTask t = m.todo.front();
      m.todo.pop_front();
      run_call(m, t.user, now);
    }
  }

  void dispatch(const CrawlTask& task, std::int64_t now) {
    if (cfg_.architecture == Architecture::Centralized) {
      const int id = assign_task_centralized(machines_, master_);
      auto& m = machines_[static_cast<std::size_t>(id)];
      if (m.quota_remaining > 0 && m.todo.empty()) {
        run_call(m, task.user, now);
      } else {
        m.todo.push_back(task);
        ++deferrals_;
        emit(now, SimEvent::Kind::Defer, id, task.user, 0);
      }
      return;
    }
    // distributed: fixed owner; migrate on quota exhaustion
    auto& owner = machines_[static_cast<std::size_t>(task.owner)];
    if (owner.quota_remaining > 0) {
      run_call(owner, task.user, now);
      return;
    }
    int target = -1, best = 0;
    for (const auto& m : machines_) {
      if (m.machine_id == owner.machine_id) continue;
      if (m.quota_remaining > best) {
        best = m.quota_remaining;
        target = m.machine_id;
      }
    }
    if (target >= 0) {
      ++migrations_;
      emit(now, SimEvent::Kind::Migrate, target, task.user, 0);
      run_call(machines_[static_cast<std::size_t>(target)], task.user, now);
    } else {
      owner.todo.push_back(task);
      ++deferrals_;
      emit(now, SimEvent::Kind::Defer, owner.machine_id, task.user, 0);
    }
  }

  void run_call(MachineState& m, int user, std::int64_t now) {
    m.quota_remaining -= 1;
    const std::int64_t got = fetch(m.machine_id, user, now);
    m.calls_made += 1;
    m.collected += got;
  }

  // One API call: up to messages_per_call of the user's released, uncollected
  // messages, newest first.
  std::int64_t fetch(int machine_id, int user, std::int64_t now) {
    auto& u = users_[static_cast<std::size_t>(user)];
    release(u, now);
    std::int64_t want = cfg_.quota.messages_per_call;
    std::int64_t got = 0;
    std::int64_t lag_sum = 0;
    while (want > 0 && !u.pending.empty()) {
      Bucket& b = u.pending.back();
      const std::int32_t take = static_cast<std::int32_t>(
          std::min<std::int64_t>(want, b.count));
      b.count -= take;
      want -= take;
      got += take;
      const std::int64_t post_minute =
          static_cast<std::int64_t>(b.time_bucket) * (kMinutesPerDay / slots_per_day()) +
          (kMinutesPerDay / slots_per_day()) / 2;
      lag_sum += take * std::max<std::int64_t>(now - post_minute, 0);
      freshness_count_ += take;
      if (b.count == 0) u.pending.pop_back();
    }
    freshness_sum_ += lag_sum;
    u.pending_total -= got;
    if (u.mean_rate >= 10.0) collected_active_ += got;
    const int day = static_cast<int>(now / kMinutesPerDay);
    u.last_crawl_day = day;
    u.crawled_today = true;
    emit(now, SimEvent::Kind::Fetch, machine_id, user, got, lag_sum);
    return got;
  }

  // Move today's slots with a midpoint at or before `now` into pending.
  void release(UserState& u, std::int64_t now) {
    const int k = slots_per_day();
    const int slot_minutes = static_cast<int>(kMinutesPerDay) / k;
    const int day = static_cast<int>(now / kMinutesPerDay);
    const std::int64_t minute_of_day = now % kMinutesPerDay;
    while (u.released < k &&
           static_cast<std::int64_t>(u.released) * slot_minutes + slot_minutes / 2 <=
               minute_of_day) {
      const std::int32_t c = u.today[static_cast<std::size_t>(u.released)];
      if (c > 0) {
        u.pending.push_back({day * k + u.released, c});
        u.pending_total += c;
      }
      ++u.released;
    }
  }

  void end_day(int day) {
    const int k = slots_per_day();
    for (auto& u : users_) {
      // flush the rest of today into pending and trim to retention
      for (std::int32_t s = u.released; s < k; ++s) {
        const std::int32_t c = u.today[static_cast<std::size_t>(s)];
        if (c > 0) {
          u.pending.push_back({day * k + s, c});
          u.pending_total += c;
        }
      }
      u.released = k;
      while (u.pending_total > cfg_.retention_cap) {
        Bucket& b = u.pending.front();
        const std::int64_t excess = u.pending_total - cfg_.retention_cap;
        if (b.count <= excess) {
          u.pending_total -= b.count;
          u.pending.pop_front();
        } else {
          b.count -= static_cast<std::int32_t>(excess);
          u.pending_total -= excess;
        }
      }

      // hash model learns only on crawl days, from the previous day's counts
      if (cfg_.model == ScheduleModel::Hash && u.crawled_today) {
        const double w = cfg_.hash_weight;
        for (std::size_t s = 0; s < u.profile.size(); ++s)
          u.profile[s] = u.profile[s] * (1.0 - w) + u.yesterday[s] * w;
      }
      for (std::size_t s = 0; s < u.yesterday.size(); ++s)
        u.yesterday[s] = u.today[s];

      // once-a-day activity check: promote a demoted bursty user when the
      // trailing week averages at least one post per day
      u.recent_posts[static_cast<std::size_t>(day % 7)] = u.posted_today;
      if (!u.promoted) {
        std::int64_t week = 0;
        for (std::int64_t c : u.recent_posts) week += c;
        if (week >= 7) {
          u.promoted = true;
          u.visit_period_days = period_for_rate(static_cast<double>(week) / 7.0);
        }
      }
    }
  }

  void emit(std::int64_t t, SimEvent::Kind kind, int machine, int user,
            std::int64_t count, std::int64_t lag_sum = 0) {
    if (cfg_.trace)
      (*cfg_.trace) << t << ',' << to_string(kind) << ',' << machine << ',' << user
                    << ',' << count << '\n';
    if (cfg_.events) cfg_.events->push_back({t, kind, machine, user, count, lag_sum});
  }

  SimReport make_report() const {
    SimReport r;
    r.machines = cfg_.machines;
    r.seed = cfg_.seed;
    r.elapsed_logical_time = static_cast<std::int64_t>(cfg_.duration_days) * kMinutesPerDay;
    r.per_machine.reserve(machines_.size());
    std::int64_t lo = machines_.empty() ? 0 : machines_[0].collected;
    std::int64_t hi = lo;
    for (const auto& m : machines_) {
      r.per_machine.push_back({m.collected, m.calls_made});
      r.total_messages += m.collected;
      lo = std::min(lo, m.collected);
      hi = std::max(hi, m.collected);
    }
    r.workload_diff = hi - lo;
    r.deferrals = deferrals_;
    r.migrations = migrations_;
    r.total_posted = total_posted_;
    r.collected_active = collected_active_;
    r.posted_active = posted_active_;
    r.freshness_minutes = freshness_count_ > 0
                              ? static_cast<double>(freshness_sum_) /
                                    static_cast<double>(freshness_count_)
                              : 0.0;
    return r;
  }
};

inline SimReport run_centralized(const SimConfig& config) {
  if (config.architecture != Architecture::Centralized)
    throw std::invalid_argument("config is not centralized");
  return Simulation(config).run();
}

inline SimReport run_distributed(const SimConfig& config) {
  if (config.architecture != Architecture::Distributed)
    throw std::invalid_argument("config is not distributed");
  return Simulation(config).run();
}

/// Synthetic population with the observed proportions: about half inactive,
// about one fifth posting more than 10 messages a day.
inline std::vector<GeneratorSpec> make_population(std::size_t n, std::uint64_t seed) {
  std::vector<GeneratorSpec> specs;
  specs.reserve(n);
  Rng rng(seed ^ 0x706f70756c6174ULL);
  for (std::size_t i = 0; i < n; ++i) {
    GeneratorSpec s;
    s.user_id = "u" + std::to_string(i);
    s.rng_seed = rng.next_u64();
    const double kind = rng.next_double();
    if (kind < 0.50) {
      s.user_class = UserClass::Inactive;
      s.base_rate = rng.uniform(0.05, 1.0);
      s.daily_shape = uniform_shape();
    } else if (kind < 0.60) {
      s.user_class = UserClass::Instable;
      s.burst_rate = rng.uniform(8.0, 20.0);
      s.burst_days = 1 + static_cast<int>(rng.next_below(2));
      s.silence_days = 2 + static_cast<int>(rng.next_below(4));
      s.base_rate = 0.0;
      s.daily_shape = uniform_shape();
    } else if (kind < 0.80) {
      s.user_class = UserClass::ReasonableConstant;
      s.base_rate = rng.uniform(1.0, 10.0);
      s.daily_shape = two_peak_shape();
    } else if (kind < 0.95) {
      s.user_class = UserClass::ReasonableConstant;
      s.base_rate = rng.uniform(10.0, 25.0);
      s.daily_shape = two_peak_shape();
    } else {
      s.user_class = UserClass::Authority;
      s.base_rate = rng.uniform(10.0, 40.0);
      s.daily_shape = uniform_shape();
    }
    specs.push_back(std::move(s));
  }
  return specs;
}

}  // namespace freshcrawl
