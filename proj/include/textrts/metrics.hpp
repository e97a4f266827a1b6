#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace textrts {

enum class Outcome { Ongoing, Win, Lose, Draw };

const char* outcome_name(Outcome o);
Outcome outcome_from_name(const std::string& name);  // throws on garbage

// KD = value(killed units) / value(dead units). Zero deaths with kills is
// the positive-infinity sentinel; 0/0 is defined as 0.
struct KdValue {
  double value = 0;
  bool infinite = false;

  std::string str(int precision = 2) const;  // "1.50" or "Inf"
};

KdValue kd_ratio(double killed_value, double dead_value);

struct WinRate {
  int wins = 0;
  int total = 0;
  double fraction() const { return total == 0 ? 0.0 : static_cast<double>(wins) / total; }
};

WinRate winning_rate(const std::vector<Outcome>& results);  // throws on empty

// "1.50 (100%)" presentation; infinite KD prints "Inf (100%)".
std::string format_kd_wr(const KdValue& kd, const WinRate& wr);

struct EpisodeResult {
  std::string scenario_id;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::Ongoing;
  KdValue kd;
  double killed_value = 0;
  double dead_value = 0;
  int step_count = 0;
  std::string trace_path;
  std::uint64_t final_state_hash = 0;
  int non_fallback_responses = 0;  // runtime diagnostic, not serialized

  std::uint64_t result_hash() const;
  std::string to_json_line() const;
  static EpisodeResult from_json_line(const std::string& line);
};

// Line-delimited records; load is the exact inverse of persist.
void persist_result(const EpisodeResult& result, std::ostream& sink);
std::vector<EpisodeResult> load_results(const std::string& path);  // names bad line numbers

}  // namespace textrts
