#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "freshcrawl/behavior.hpp"

namespace freshcrawl {

struct RatedUser {
  std::string user_id;
  double lambda = 0.0;
};

struct PoissonScheduleInput {
  std::vector<RatedUser> users;  // sorted ascending by lambda
  double delta = 1.0;            // slot duration
};

struct CrawlSchedule {
  std::vector<std::string> order;  // position j => crawl at time j*delta
  double total_potentiality = 0.0;
};

struct HashScheduleInput {
  std::vector<double> profile_slots;     // a_1..a_k, pre-update
  std::vector<double> yesterday_counts;  // n_1..n_k
  double capacity = 1.0;                 // c, max messages per crawl call
  int span_threshold = 1;                // s, max slots between crawls
  double remaining = 0.0;                // carry-over from the prior day
};

struct HashScheduleOutput {
  std::vector<int> crawl_times;       // strictly increasing slot indices, 1-based
  double new_remaining = 0.0;
  std::vector<double> updated_slots;  // post-update a values
};

// Crawling penalty: omega(t, n, delta) = t^2 - t*n*delta + (n*delta)^2/2.
// Quadratic in t, minimized at the horizon midpoint.
inline double crawl_penalty(double t, std::size_t n, double delta) {
  const double horizon = static_cast<double>(n) * delta;
  if (t < 0.0 || t > horizon) throw std::invalid_argument("time outside horizon");
  return t * t - t * horizon + horizon * horizon / 2.0;
}

// Expected new messages between crawl time t and a query time averaged over
// the horizon: lambda * omega / (n*delta).
inline double user_potentiality(double lambda, double t, std::size_t n, double delta) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const double horizon = static_cast<double>(n) * delta;
  if (horizon <= 0.0) throw std::invalid_argument("empty horizon");
  return lambda * crawl_penalty(t, n, delta) / horizon;
}

inline double total_potentiality(const std::vector<std::string>& order,
                                 const std::unordered_map<std::string, double>& rates,
                                 double delta) {
  const std::size_t n = order.size();
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto it = rates.find(order[j]);
    if (it == rates.end())
      throw std::invalid_argument("missing rate for user " + order[j]);
    total += user_potentiality(it->second, static_cast<double>(j) * delta, n, delta);
  }
  return total;
}

inline double total_potentiality(const CrawlSchedule& schedule,
                                 const std::unordered_map<std::string, double>& rates,
                                 double delta) {
  return total_potentiality(schedule.order, rates, delta);
}

// Organ-pipe position map over 0-based sorted input: evens ascending, then
// odds descending. Position j holds sorted index 2j for j < ceil(n/2) and
// 2(n-j)-1 afterwards.
inline std::vector<std::size_t> organ_pipe_positions(std::size_t n) {
  std::vector<std::size_t> pos(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t j = 0; j < n; ++j)
    pos[j] = j < half ? 2 * j : 2 * (n - j) - 1;
  return pos;
}

inline CrawlSchedule organ_pipe_schedule(const PoissonScheduleInput& input) {
  if (input.delta <= 0.0) throw std::invalid_argument("delta must be positive");
  const std::size_t n = input.users.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (input.users[i].lambda < input.users[i - 1].lambda)
      throw std::invalid_argument("input not sorted");
  }
  CrawlSchedule out;
  out.order.reserve(n);
  const auto pos = organ_pipe_positions(n);
  for (std::size_t j = 0; j < n; ++j) out.order.push_back(input.users[pos[j]].user_id);

  std::unordered_map<std::string, double> rates;
  rates.reserve(n);
  for (const auto& u : input.users) rates.emplace(u.user_id, u.lambda);
  out.total_potentiality = n > 0 ? total_potentiality(out.order, rates, input.delta) : 0.0;
  return out;
}

// Trigger pass over an already-updated slot array. Prefix sums start at
// sum_0 = -remaining so that uncollected carry-over counts toward the first
// trigger; both triggers are strict.
inline std::pair<std::vector<int>, double> hash_crawl_times(
    const std::vector<double>& slots, double capacity, int span_threshold,
    double remaining) {
  const std::size_t k = slots.size();
  std::vector<double> sums(k + 1);
  sums[0] = -remaining;
  double run = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    run += slots[i - 1];
    sums[i] = run;
  }
  std::vector<int> times;
  std::size_t last_crawl = 0;
  for (std::size_t i = 1; i <= k; ++i) {
    if (sums[i] - sums[last_crawl] > capacity ||
        static_cast<int>(i - last_crawl) > span_threshold) {
      times.push_back(static_cast<int>(i));
      last_crawl = i;
    }
  }
  return {std::move(times), std::max(0.0, sums[k] - sums[last_crawl])};
}

// Per-user daily crawl-time list from the hash model: decay update with the
// given weight, then the trigger pass.
inline HashScheduleOutput hash_schedule(const HashScheduleInput& input, double weight) {
  const std::size_t k = input.profile_slots.size();
  if (input.yesterday_counts.size() != k)
    throw std::invalid_argument("profile and yesterday_counts length mismatch");
  if (input.capacity <= 0.0) throw std::invalid_argument("capacity must be positive");
  if (input.span_threshold < 1) throw std::invalid_argument("span threshold must be >= 1");
  if (input.remaining < 0.0) throw std::invalid_argument("remaining must be >= 0");
  if (!(weight > 0.0 && weight < 1.0)) throw std::invalid_argument("weight must be in (0,1)");

  HashScheduleOutput out;
  out.updated_slots.resize(k);
  for (std::size_t i = 0; i < k; ++i)
    out.updated_slots[i] =
        input.profile_slots[i] * (1.0 - weight) + input.yesterday_counts[i] * weight;

  auto [times, new_remaining] = hash_crawl_times(out.updated_slots, input.capacity,
                                                 input.span_threshold, input.remaining);
  out.crawl_times = std::move(times);
  out.new_remaining = new_remaining;
  return out;
}

}  // namespace freshcrawl
