#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "freshcrawl/behavior.hpp"
#include "freshcrawl/partition.hpp"
#include "freshcrawl/scheduler.hpp"
#include "freshcrawl/simharness.hpp"

namespace freshcrawl {

// Raised for malformed input; `line` is 1-based.
struct CsvError : std::runtime_error {
  int line;
  CsvError(int line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
        line(line_no) {}
};

namespace detail {

// Shortest representation that round-trips a double; stable across runs.
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, int line_no, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CsvError(line_no, std::string("bad ") + what + " '" + s + "'");
  }
}

inline std::int64_t parse_int(const std::string& s, int line_no, const char* what) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CsvError(line_no, std::string("bad ") + what + " '" + s + "'");
  }
}

inline void expect_header(const std::string& got, const std::string& want, int line_no) {
  if (got != want)
    throw CsvError(line_no, "expected header '" + want + "', got '" + got + "'");
}

}  // namespace detail

// --- message histories ------------------------------------------------------

inline void write_history(std::ostream& os, const MessageHistory& h) {
  os << "user_id,timestamp_minutes\n";
  for (std::int64_t t : h.timestamps) os << h.user_id << ',' << t << '\n';
}

inline std::vector<MessageHistory> read_histories(std::istream& is) {
  std::string line;
  int line_no = 1;
  if (!std::getline(is, line)) throw CsvError(1, "empty file");
  detail::expect_header(line, "user_id,timestamp_minutes", 1);

  std::vector<MessageHistory> out;
  std::unordered_map<std::string, std::size_t> index;
  std::int64_t max_t = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 2) throw CsvError(line_no, "expected 2 fields");
    const std::int64_t t = detail::parse_int(f[1], line_no, "timestamp");
    if (t < 0) throw CsvError(line_no, "negative timestamp");
    auto [it, fresh] = index.emplace(f[0], out.size());
    if (fresh) {
      out.emplace_back();
      out.back().user_id = f[0];
    }
    out[it->second].timestamps.push_back(t);
    max_t = std::max(max_t, t);
  }
  const std::int64_t window_end =
      (max_t / kMinutesPerDay + 1) * kMinutesPerDay;  // round up to whole days
  for (auto& h : out) {
    std::sort(h.timestamps.begin(), h.timestamps.end());
    h.window_start = 0;
    h.window_end = window_end;
  }
  return out;
}

// --- rates and schedules ----------------------------------------------------

inline std::vector<RatedUser> read_rates(std::istream& is) {
  std::string line;
  int line_no = 1;
  if (!std::getline(is, line)) throw CsvError(1, "empty file");
  detail::expect_header(line, "user_id,lambda", 1);
  std::vector<RatedUser> out;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 2) throw CsvError(line_no, "expected 2 fields");
    const double lambda = detail::parse_double(f[1], line_no, "lambda");
    if (lambda < 0.0) throw CsvError(line_no, "negative lambda");
    out.push_back({f[0], lambda});
  }
  return out;
}

inline void write_schedule(std::ostream& os, const CrawlSchedule& s,
                           const std::unordered_map<std::string, double>& rates,
                           double delta) {
  os << "position,user_id,crawl_time,lambda\n";
  for (std::size_t j = 0; j < s.order.size(); ++j) {
    const auto it = rates.find(s.order[j]);
    const double lambda = it == rates.end() ? 0.0 : it->second;
    os << j << ',' << s.order[j] << ','
       << detail::fmt_double(static_cast<double>(j) * delta) << ','
       << detail::fmt_double(lambda) << '\n';
  }
  os << "# total_potentiality=" << detail::fmt_double(s.total_potentiality) << '\n';
}

inline void write_hash_schedule(std::ostream& os, const HashScheduleOutput& out) {
  os << "position,crawl_slot\n";
  for (std::size_t j = 0; j < out.crawl_times.size(); ++j)
    os << j << ',' << out.crawl_times[j] << '\n';
  os << "# new_remaining=" << detail::fmt_double(out.new_remaining) << '\n';
}

// Hash model state: one row per slot.
inline HashScheduleInput read_hash_profile(std::istream& is) {
  std::string line;
  int line_no = 1;
  if (!std::getline(is, line)) throw CsvError(1, "empty file");
  detail::expect_header(line, "slot,profile,yesterday", 1);
  HashScheduleInput in;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 3) throw CsvError(line_no, "expected 3 fields");
    const std::int64_t slot = detail::parse_int(f[0], line_no, "slot");
    if (slot != static_cast<std::int64_t>(in.profile_slots.size()) + 1)
      throw CsvError(line_no, "slots must be contiguous from 1");
    in.profile_slots.push_back(detail::parse_double(f[1], line_no, "profile"));
    in.yesterday_counts.push_back(detail::parse_double(f[2], line_no, "yesterday"));
  }
  return in;
}

// --- frequencies and partitions ---------------------------------------------

inline FrequencySequence read_frequencies(std::istream& is) {
  std::string line;
  int line_no = 1;
  if (!std::getline(is, line)) throw CsvError(1, "empty file");
  detail::expect_header(line, "user_id,frequency", 1);
  FrequencySequence seq;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 2) throw CsvError(line_no, "expected 2 fields");
    const double freq = detail::parse_double(f[1], line_no, "frequency");
    if (freq < 0.0) throw CsvError(line_no, "negative frequency");
    seq.entries.push_back({f[0], freq});
  }
  return seq;
}

inline void write_partition(std::ostream& os, const PartitionAssignment& a,
                            const std::unordered_map<std::string, double>& freqs) {
  os << "part_index,user_id,frequency\n";
  for (std::size_t p = 0; p < a.parts.size(); ++p) {
    for (const auto& id : a.parts[p]) {
      const auto it = freqs.find(id);
      os << p << ',' << id << ','
         << detail::fmt_double(it == freqs.end() ? 0.0 : it->second) << '\n';
    }
  }
  os << "# part_sums=";
  for (std::size_t p = 0; p < a.part_sums.size(); ++p) {
    if (p) os << ';';
    os << detail::fmt_double(a.part_sums[p]);
  }
  os << " max_min_diff=" << detail::fmt_double(a.max_min_diff)
     << " pairwise_diff=" << detail::fmt_double(a.pairwise_diff) << '\n';
}

// --- simulation reports -----------------------------------------------------

inline void write_sim_report_row(std::ostream& os, const SimReport& r) {
  os << r.machines << ',' << r.seed << ',' << r.total_messages << ','
     << r.workload_diff << ',' << detail::fmt_double(r.avg_msgs_per_call()) << ','
     << detail::fmt_double(r.freshness_minutes) << ',' << r.deferrals << ','
     << r.migrations << '\n';
}

inline void write_sim_reports(std::ostream& os, const std::vector<SimReport>& rows) {
  os << kSimReportHeader << '\n';
  for (const auto& r : rows) write_sim_report_row(os, r);
}

// A parsed report row; avg/freshness kept as read, not recomputed.
struct SimReportRow {
  int machines = 0;
  std::uint64_t seed = 0;
  std::int64_t total_messages = 0;
  std::int64_t workload_diff = 0;
  double avg_msgs_per_call = 0.0;
  double freshness_minutes = 0.0;
  std::int64_t deferrals = 0;
  std::int64_t migrations = 0;
};

inline std::vector<SimReportRow> read_sim_reports(std::istream& is) {
  std::string line;
  int line_no = 1;
  if (!std::getline(is, line)) throw CsvError(1, "empty file");
  detail::expect_header(line, kSimReportHeader, 1);
  std::vector<SimReportRow> rows;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 8) throw CsvError(line_no, "expected 8 fields");
    SimReportRow r;
    r.machines = static_cast<int>(detail::parse_int(f[0], line_no, "machines"));
    r.seed = static_cast<std::uint64_t>(detail::parse_int(f[1], line_no, "seed"));
    r.total_messages = detail::parse_int(f[2], line_no, "total_messages");
    r.workload_diff = detail::parse_int(f[3], line_no, "workload_diff");
    r.avg_msgs_per_call = detail::parse_double(f[4], line_no, "avg_msgs_per_call");
    r.freshness_minutes = detail::parse_double(f[5], line_no, "freshness_minutes");
    r.deferrals = detail::parse_int(f[6], line_no, "deferrals");
    r.migrations = detail::parse_int(f[7], line_no, "migrations");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace freshcrawl
