#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "freshcrawl/rng.hpp"
#include "freshcrawl/scheduler.hpp"

namespace freshcrawl {

enum class SequenceOrdering { Raw, OrganPipe };

struct FrequencyEntry {
  std::string user_id;
  double frequency = 0.0;  // posts/day
};

struct FrequencySequence {
  std::vector<FrequencyEntry> entries;
  SequenceOrdering ordering = SequenceOrdering::Raw;
};

struct PartitionAssignment {
  std::vector<std::vector<std::string>> parts;
  std::vector<double> part_sums;
  double max_min_diff = 0.0;   // max(part_sums) - min(part_sums)
  double pairwise_diff = 0.0;  // sum over i<j of |sum_i - sum_j|
};

struct PtasParams {
  double epsilon = 0.0;
  std::size_t k = 2;
  double epsilon_prime = 0.0;

  static PtasParams make(double epsilon, std::size_t k) {
    if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    if (k < 2 || (k & (k - 1)) != 0)
      throw std::invalid_argument("unsupported part count");
    PtasParams p;
    p.epsilon = epsilon;
    p.k = k;
    const double levels = std::ceil(std::log2(static_cast<double>(k)));
    const double r = std::exp2(std::log2(1.0 + epsilon) / levels);
    p.epsilon_prime = (r - 1.0) / (r + 1.0);
    return p;
  }
};

namespace detail {

inline void finalize_stats(PartitionAssignment& a) {
  a.max_min_diff = 0.0;
  a.pairwise_diff = 0.0;
  if (a.part_sums.empty()) return;
  const auto [lo, hi] = std::minmax_element(a.part_sums.begin(), a.part_sums.end());
  a.max_min_diff = *hi - *lo;
  for (std::size_t i = 0; i < a.part_sums.size(); ++i)
    for (std::size_t j = i + 1; j < a.part_sums.size(); ++j)
      a.pairwise_diff += std::abs(a.part_sums[i] - a.part_sums[j]);
}

}  // namespace detail

// Reorders an ascending-by-frequency sequence into organ-pipe order.
inline FrequencySequence apply_organ_pipe(const FrequencySequence& sorted_seq) {
  for (std::size_t i = 1; i < sorted_seq.entries.size(); ++i)
    if (sorted_seq.entries[i].frequency < sorted_seq.entries[i - 1].frequency)
      throw std::invalid_argument("input not sorted");
  FrequencySequence out;
  out.ordering = SequenceOrdering::OrganPipe;
  const auto pos = organ_pipe_positions(sorted_seq.entries.size());
  out.entries.reserve(pos.size());
  for (std::size_t p : pos) out.entries.push_back(sorted_seq.entries[p]);
  return out;
}

// Position j goes to part (j mod m); parts keep relative order.
inline PartitionAssignment rr_split(const FrequencySequence& seq, std::size_t m) {
  if (m < 1) throw std::invalid_argument("part count must be >= 1");
  PartitionAssignment a;
  a.parts.resize(m);
  a.part_sums.assign(m, 0.0);
  for (std::size_t j = 0; j < seq.entries.size(); ++j) {
    a.parts[j % m].push_back(seq.entries[j].user_id);
    a.part_sums[j % m] += seq.entries[j].frequency;
  }
  detail::finalize_stats(a);
  return a;
}

// Predicted signed Part0-Part1 difference for an arithmetic frequency
// sequence f_i = f0 + i*delta arranged organ-pipe and split two ways.
inline double predict_rr_difference(double f0, double delta, std::size_t n) {
  switch (n % 4) {
    case 0: return 0.0;
    case 1: return f0;
    case 2: return -delta;
    default: return f0 - delta;
  }
}

struct SubsetSumResult {
  std::vector<std::size_t> indices;
  std::int64_t sum = 0;
};

namespace detail {

// dst |= src << shift, over packed 64-bit words.
inline void shifted_or(std::vector<std::uint64_t>& dst,
                       const std::vector<std::uint64_t>& src, std::int64_t shift) {
  const std::size_t wshift = static_cast<std::size_t>(shift) / 64;
  const unsigned bshift = static_cast<unsigned>(shift % 64);
  for (std::size_t w = dst.size(); w-- > wshift;) {
    std::uint64_t bits = src[w - wshift] << bshift;
    if (bshift != 0 && w > wshift) bits |= src[w - wshift - 1] >> (64 - bshift);
    dst[w] |= bits;
  }
}

inline bool test_bit(const std::vector<std::uint64_t>& bits, std::int64_t s) {
  return (bits[static_cast<std::size_t>(s) / 64] >>
          (static_cast<std::size_t>(s) % 64)) & 1u;
}

}  // namespace detail

// Exact pseudo-polynomial reachable-sum DP over packed bitsets, keeping the
// per-item reachability snapshots for reconstruction. Items are excluded
// greedily from the highest index down, so ties resolve toward the
// lowest-index subset.
inline SubsetSumResult subset_sum_select(const std::vector<std::int64_t>& values,
                                         std::int64_t capacity) {
  for (std::int64_t v : values)
    if (v < 0) throw std::invalid_argument("values must be non-negative");
  if (capacity < 0) throw std::invalid_argument("capacity must be non-negative");

  const std::size_t words = static_cast<std::size_t>(capacity) / 64 + 1;
  std::vector<std::vector<std::uint64_t>> reach;
  reach.reserve(values.size() + 1);
  reach.emplace_back(words, 0);
  reach[0][0] = 1;  // the empty subset
  for (std::size_t i = 0; i < values.size(); ++i) {
    reach.push_back(reach.back());
    if (values[i] > 0 && values[i] <= capacity)
      detail::shifted_or(reach.back(), reach[i], values[i]);
  }

  std::int64_t best = capacity;
  while (best > 0 && !detail::test_bit(reach.back(), best)) --best;

  SubsetSumResult r;
  r.sum = best;
  std::int64_t s = best;
  for (std::size_t i = values.size(); i-- > 0 && s > 0;) {
    if (detail::test_bit(reach[i], s)) continue;  // reachable without item i
    r.indices.push_back(i);
    s -= values[i];
  }
  std::reverse(r.indices.begin(), r.indices.end());
  return r;
}

namespace detail {

// 0.001 posts/day resolution keeps the DP table bounded.
inline constexpr double kSsapScale = 1000.0;

inline std::int64_t scaled(double f) {
  return static_cast<std::int64_t>(std::llround(f * kSsapScale));
}

// Splits `idx` (indices into entries) into two halves with near-equal
// frequency sums via an exact half-sum subset-sum.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> balanced_split(
    const std::vector<FrequencyEntry>& entries, const std::vector<std::size_t>& idx) {
  std::vector<std::int64_t> values;
  values.reserve(idx.size());
  std::int64_t total = 0;
  for (std::size_t i : idx) {
    values.push_back(scaled(entries[i].frequency));
    total += values.back();
  }
  const auto pick = subset_sum_select(values, total / 2);
  std::vector<char> in_first(idx.size(), 0);
  for (std::size_t i : pick.indices) in_first[i] = 1;

  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < idx.size(); ++i)
    (in_first[i] ? out.first : out.second).push_back(idx[i]);
  // the complement holds the larger sum; keep deterministic order: subset first
  return out;
}

}  // namespace detail

// Recursive halving into k = 2^r parts. Each level splits every current part
// with an exact half-sum subset-sum, so epsilon' is a met-by-construction
// slack at this scale rather than an approximation knob.
inline PartitionAssignment recursive_halving(const FrequencySequence& seq,
                                             const PtasParams& params) {
  if (params.k < 2 || (params.k & (params.k - 1)) != 0)
    throw std::invalid_argument("unsupported part count");
  if (params.k > seq.entries.size())
    throw std::invalid_argument("more parts than entries");

  std::vector<std::vector<std::size_t>> groups(1);
  groups[0].resize(seq.entries.size());
  std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});

  while (groups.size() < params.k) {
    std::vector<std::vector<std::size_t>> next;
    next.reserve(groups.size() * 2);
    for (const auto& g : groups) {
      auto [a, b] = detail::balanced_split(seq.entries, g);
      next.push_back(std::move(a));
      next.push_back(std::move(b));
    }
    groups = std::move(next);
  }

  PartitionAssignment a;
  a.parts.resize(groups.size());
  a.part_sums.assign(groups.size(), 0.0);
  for (std::size_t p = 0; p < groups.size(); ++p) {
    for (std::size_t i : groups[p]) {
      a.parts[p].push_back(seq.entries[i].user_id);
      a.part_sums[p] += seq.entries[i].frequency;
    }
  }
  detail::finalize_stats(a);
  return a;
}

// Greedy SSP peeling: k-1 times extract a subset targeting the average of
// what is left; the final part takes the remainder.
inline PartitionAssignment set_division(const FrequencySequence& seq, std::size_t k) {
  if (k < 1) throw std::invalid_argument("part count must be >= 1");
  if (k > seq.entries.size()) throw std::invalid_argument("more parts than entries");

  std::vector<std::size_t> remaining(seq.entries.size());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});

  PartitionAssignment a;
  a.parts.resize(k);
  a.part_sums.assign(k, 0.0);

  for (std::size_t p = 0; p + 1 < k; ++p) {
    std::vector<std::int64_t> values;
    values.reserve(remaining.size());
    std::int64_t total = 0;
    for (std::size_t i : remaining) {
      values.push_back(detail::scaled(seq.entries[i].frequency));
      total += values.back();
    }
    const auto target = total / static_cast<std::int64_t>(k - p);
    const auto pick = subset_sum_select(values, target);

    std::vector<char> taken(remaining.size(), 0);
    for (std::size_t i : pick.indices) taken[i] = 1;
    std::vector<std::size_t> rest;
    rest.reserve(remaining.size() - pick.indices.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      if (taken[i]) {
        a.parts[p].push_back(seq.entries[remaining[i]].user_id);
        a.part_sums[p] += seq.entries[remaining[i]].frequency;
      } else {
        rest.push_back(remaining[i]);
      }
    }
    remaining = std::move(rest);
  }
  for (std::size_t i : remaining) {
    a.parts[k - 1].push_back(seq.entries[i].user_id);
    a.part_sums[k - 1] += seq.entries[i].frequency;
  }
  detail::finalize_stats(a);
  return a;
}

// Uniformly random baseline partitioner, seeded.
inline PartitionAssignment random_split(const FrequencySequence& seq, std::size_t m,
                                        std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("part count must be >= 1");
  Rng rng(seed);
  PartitionAssignment a;
  a.parts.resize(m);
  a.part_sums.assign(m, 0.0);
  for (const auto& e : seq.entries) {
    const auto p = static_cast<std::size_t>(rng.next_below(m));
    a.parts[p].push_back(e.user_id);
    a.part_sums[p] += e.frequency;
  }
  detail::finalize_stats(a);
  return a;
}

// Recomputes part sums from part contents and both statistics from them;
// detects corrupted assignments.
inline std::pair<double, double> workload_difference(const PartitionAssignment& a,
                                                     const FrequencySequence& seq) {
  std::unordered_map<std::string, double> freq;
  freq.reserve(seq.entries.size());
  for (const auto& e : seq.entries) freq[e.user_id] = e.frequency;

  PartitionAssignment check;
  check.part_sums.assign(a.parts.size(), 0.0);
  for (std::size_t p = 0; p < a.parts.size(); ++p) {
    for (const auto& id : a.parts[p]) {
      const auto it = freq.find(id);
      if (it == freq.end()) throw std::runtime_error("unknown user in partition: " + id);
      check.part_sums[p] += it->second;
    }
    if (p < a.part_sums.size() && std::abs(check.part_sums[p] - a.part_sums[p]) > 1e-6)
      throw std::runtime_error("inconsistent partition sums");
  }
  detail::finalize_stats(check);
  if (std::abs(check.max_min_diff - a.max_min_diff) > 1e-6 ||
      std::abs(check.pairwise_diff - a.pairwise_diff) > 1e-6)
    throw std::runtime_error("inconsistent partition statistics");
  return {check.max_min_diff, check.pairwise_diff};
}

// Statistics-only variant when the source sequence is not at hand.
inline std::pair<double, double> workload_difference(const PartitionAssignment& a) {
  PartitionAssignment check;
  check.part_sums = a.part_sums;
  detail::finalize_stats(check);
  if (std::abs(check.max_min_diff - a.max_min_diff) > 1e-9 ||
      std::abs(check.pairwise_diff - a.pairwise_diff) > 1e-9)
    throw std::runtime_error("inconsistent partition statistics");
  return {check.max_min_diff, check.pairwise_diff};
}

}  // namespace freshcrawl
