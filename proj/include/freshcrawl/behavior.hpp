#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "freshcrawl/rng.hpp"

namespace freshcrawl {

// Logical time is measured in minutes.
inline constexpr std::int64_t kMinutesPerDay = 1440;
inline constexpr int kDefaultSlots = 24;

struct MessageHistory {
  std::string user_id;
  std::vector<std::int64_t> timestamps;  // sorted, minutes
  std::int64_t window_start = 0;
  std::int64_t window_end = 0;

  double window_days() const {
    return static_cast<double>(window_end - window_start) / kMinutesPerDay;
  }
};

enum class UserClass { Inactive, Instable, ReasonableConstant, Authority };

inline const char* to_string(UserClass c) {
  switch (c) {
    case UserClass::Inactive: return "inactive";
    case UserClass::Instable: return "instable";
    case UserClass::ReasonableConstant: return "reasonable_constant";
    case UserClass::Authority: return "authority";
  }
  return "?";
}

struct PoissonModel {
  double lambda = 0.0;  // expected posts per day
};

// Fixed-length array of exponentially decayed per-slot post counts.
struct HashProfile {
  std::vector<double> slots;
  double recent_day_weight = 0.5;
  std::int64_t slot_minutes = 60;

  static HashProfile make(int k = kDefaultSlots, double w = 0.5) {
    if (k < 1) throw std::invalid_argument("hash profile needs at least one slot");
    if (!(w > 0.0 && w < 1.0)) throw std::invalid_argument("weight must be in (0,1)");
    if (static_cast<std::int64_t>(k) * (kMinutesPerDay / k) != kMinutesPerDay)
      throw std::invalid_argument("slot count must divide 24h");
    HashProfile p;
    p.slots.assign(k, 0.0);
    p.recent_day_weight = w;
    p.slot_minutes = kMinutesPerDay / k;
    return p;
  }
};

struct ClassificationThresholds {
  double inactive_max_rate = 1.0;       // msgs/day below which a user is inactive
  double authority_min_rate = 10.0;
  double authority_max_slot_cv = 0.75;  // hourly regularity bound
  double instable_peak_ratio = 5.0;     // busiest day vs mean daily count
  double instable_zero_day_fraction = 0.5;
};

struct GeneratorSpec {
  std::string user_id;
  UserClass user_class = UserClass::ReasonableConstant;
  double base_rate = 1.0;                 // expected posts per day
  std::vector<double> daily_shape;        // per-slot intensity weights, sums to 1
  double burst_rate = 0.0;                // Instable only
  int burst_days = 1;
  int silence_days = 3;
  std::uint64_t rng_seed = 0;
};

// ---------------------------------------------------------------------------

inline PoissonModel estimate_poisson_rate(const MessageHistory& h) {
  if (h.window_end <= h.window_start)
    throw std::invalid_argument("degenerate window");
  PoissonModel m;
  m.lambda = static_cast<double>(h.timestamps.size()) / h.window_days();
  return m;
}

namespace detail {

struct HistoryStats {
  double mean_daily = 0.0;
  double busiest_day = 0.0;
  double zero_day_fraction = 1.0;
  double slot_cv = 0.0;  // coefficient of variation across hourly totals
};

inline HistoryStats history_stats(const MessageHistory& h) {
  HistoryStats s;
  const std::int64_t span = h.window_end - h.window_start;
  const auto n_days = static_cast<std::size_t>((span + kMinutesPerDay - 1) / kMinutesPerDay);
  if (n_days == 0 || h.timestamps.empty()) return s;

  std::vector<std::int64_t> per_day(n_days, 0);
  std::array<std::int64_t, 24> per_hour{};
  for (std::int64_t t : h.timestamps) {
    const std::int64_t rel = t - h.window_start;
    per_day[static_cast<std::size_t>(rel / kMinutesPerDay)] += 1;
    per_hour[static_cast<std::size_t>((rel % kMinutesPerDay) / 60)] += 1;
  }

  s.mean_daily = static_cast<double>(h.timestamps.size()) / h.window_days();
  s.busiest_day = static_cast<double>(*std::max_element(per_day.begin(), per_day.end()));
  const auto zero_days =
      static_cast<double>(std::count(per_day.begin(), per_day.end(), std::int64_t{0}));
  s.zero_day_fraction = zero_days / static_cast<double>(n_days);

  const double hour_mean = static_cast<double>(h.timestamps.size()) / 24.0;
  double var = 0.0;
  for (std::int64_t c : per_hour) {
    const double d = static_cast<double>(c) - hour_mean;
    var += d * d;
  }
  var /= 24.0;
  s.slot_cv = hour_mean > 0.0 ? std::sqrt(var) / hour_mean : 0.0;
  return s;
}

}  // namespace detail

// Threshold ledger, applied in order: Inactive, Authority, Instable, else
// ReasonableConstant.
inline UserClass classify_user(const MessageHistory& h,
                               const ClassificationThresholds& t = {}) {
  if (h.window_end <= h.window_start)
    throw std::invalid_argument("degenerate window");
  if (h.timestamps.empty()) return UserClass::Inactive;

  const auto s = detail::history_stats(h);
  if (s.mean_daily < t.inactive_max_rate) return UserClass::Inactive;
  if (s.mean_daily >= t.authority_min_rate && s.slot_cv < t.authority_max_slot_cv)
    return UserClass::Authority;
  if (s.busiest_day > t.instable_peak_ratio * s.mean_daily &&
      s.zero_day_fraction >= t.instable_zero_day_fraction)
    return UserClass::Instable;
  return UserClass::ReasonableConstant;
}

// a_i <- a_i*(1-w) + n_i*w. The count from d days back ends up weighted
// w*(1-w)^(d-1).
inline HashProfile update_hash_profile(const HashProfile& profile,
                                       const std::vector<double>& day_counts) {
  if (day_counts.size() != profile.slots.size())
    throw std::invalid_argument("day_counts length does not match profile");
  HashProfile out = profile;
  const double w = profile.recent_day_weight;
  for (std::size_t i = 0; i < out.slots.size(); ++i)
    out.slots[i] = out.slots[i] * (1.0 - w) + day_counts[i] * w;
  return out;
}

// Two-peak daily shape (afternoon and night), normalized to sum 1.
inline std::vector<double> two_peak_shape(int k = kDefaultSlots) {
  std::vector<double> s(static_cast<std::size_t>(k));
  const double scale = 24.0 / k;
  for (int i = 0; i < k; ++i) {
    const double h = (i + 0.5) * scale;
    const double afternoon = std::exp(-0.5 * (h - 15.0) * (h - 15.0) / (2.0 * 2.0));
    const double night = 1.2 * std::exp(-0.5 * (h - 21.5) * (h - 21.5) / (1.5 * 1.5));
    s[static_cast<std::size_t>(i)] = afternoon + night + 1e-4;
  }
  const double total = std::accumulate(s.begin(), s.end(), 0.0);
  for (double& v : s) v /= total;
  return s;
}

inline std::vector<double> uniform_shape(int k = kDefaultSlots) {
  return std::vector<double>(static_cast<std::size_t>(k), 1.0 / k);
}

namespace detail {

inline void check_shape(const std::vector<double>& shape) {
  if (shape.empty()) throw std::invalid_argument("daily_shape must be non-empty");
  double sum = 0.0;
  for (double v : shape) {
    if (v < 0.0) throw std::invalid_argument("daily_shape intensities must be >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("daily_shape must sum to 1");
}

// One day's worth of timestamps for a given day rate and shape.
inline void generate_day(Rng& rng, double day_rate, const std::vector<double>& shape,
                         std::int64_t day_start, std::int64_t slot_minutes,
                         std::vector<std::int64_t>& out) {
  const long count = rng.poisson(day_rate);
  for (long m = 0; m < count; ++m) {
    double u = rng.next_double();
    std::size_t slot = 0;
    for (; slot + 1 < shape.size(); ++slot) {
      if (u < shape[slot]) break;
      u -= shape[slot];
    }
    const auto minute = static_cast<std::int64_t>(rng.next_double() * slot_minutes);
    out.push_back(day_start + static_cast<std::int64_t>(slot) * slot_minutes + minute);
  }
}

}  // namespace detail

// Non-homogeneous Poisson draw over `duration_days`, deterministic per seed.
// Instable specs alternate burst/silence regimes.
inline MessageHistory generate_messages(const GeneratorSpec& spec, int duration_days) {
  if (duration_days <= 0) throw std::invalid_argument("duration must be positive");
  std::vector<double> shape =
      spec.daily_shape.empty() ? uniform_shape() : spec.daily_shape;
  detail::check_shape(shape);
  const auto k = static_cast<std::int64_t>(shape.size());
  const std::int64_t slot_minutes = kMinutesPerDay / k;

  MessageHistory h;
  h.user_id = spec.user_id;
  h.window_start = 0;
  h.window_end = static_cast<std::int64_t>(duration_days) * kMinutesPerDay;

  Rng rng(spec.rng_seed);
  for (int day = 0; day < duration_days; ++day) {
    double rate = spec.base_rate;
    if (spec.user_class == UserClass::Instable) {
      const int cycle = spec.burst_days + spec.silence_days;
      rate = (cycle > 0 && day % cycle < spec.burst_days) ? spec.burst_rate : 0.0;
    }
    Rng day_rng = rng.fork(static_cast<std::uint64_t>(day) + 1);
    detail::generate_day(day_rng, rate, shape,
                         static_cast<std::int64_t>(day) * kMinutesPerDay,
                         slot_minutes, h.timestamps);
  }
  std::sort(h.timestamps.begin(), h.timestamps.end());
  return h;
}

// Seed expansion: a seeds, k channels per hop, n hops.
inline std::uint64_t expected_crawl_list_size(std::uint64_t seeds,
                                              std::uint64_t channels_per_hop,
                                              std::uint64_t hops) {
  if (seeds < 1 || channels_per_hop < 1)
    throw std::invalid_argument("seeds and channels_per_hop must be >= 1");
  if (channels_per_hop == 1) return seeds * (hops + 1);
  std::uint64_t sum = 0, pow = 1;
  for (std::uint64_t i = 0; i <= hops; ++i) {
    sum += pow;
    pow *= channels_per_hop;
  }
  return seeds * sum;
}

}  // namespace freshcrawl
