#include "textrts/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "textrts/util.hpp"

namespace textrts {

using nlohmann::json;

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Ongoing: return "ongoing";
    case Outcome::Win: return "win";
    case Outcome::Lose: return "lose";
    case Outcome::Draw: return "draw";
  }
  return "ongoing";
}

Outcome outcome_from_name(const std::string& name) {
  if (name == "win") return Outcome::Win;
  if (name == "lose") return Outcome::Lose;
  if (name == "draw") return Outcome::Draw;
  if (name == "ongoing") return Outcome::Ongoing;
  throw std::runtime_error("unknown outcome: " + name);
}

std::string KdValue::str(int precision) const {
  if (infinite) return "Inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", precision, value);
  return buf;
}

KdValue kd_ratio(double killed_value, double dead_value) {
  KdValue kd;
  if (dead_value <= 0) {
    if (killed_value > 0) {
      kd.infinite = true;
    }
    return kd;  // 0/0 -> 0
  }
  kd.value = killed_value / dead_value;
  return kd;
}

WinRate winning_rate(const std::vector<Outcome>& results) {
  if (results.empty()) throw std::runtime_error("winning_rate of empty result list");
  WinRate wr;
  wr.total = static_cast<int>(results.size());
  for (Outcome o : results) {
    if (o == Outcome::Win) ++wr.wins;
  }
  return wr;
}

std::string format_kd_wr(const KdValue& kd, const WinRate& wr) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0f%%", wr.fraction() * 100.0);
  return kd.str() + " (" + buf + ")";
}

std::uint64_t EpisodeResult::result_hash() const {
  Fnv1a h;
  h.feed(scenario_id);
  h.feed_u64(seed);
  h.feed(outcome_name(outcome));
  h.feed_double(kd.infinite ? -1.0 : kd.value);
  h.feed_double(killed_value);
  h.feed_double(dead_value);
  h.feed_u64(static_cast<std::uint64_t>(step_count));
  h.feed_u64(final_state_hash);
  return h.digest();
}

std::string EpisodeResult::to_json_line() const {
  json j;
  j["scenario"] = scenario_id;
  j["seed"] = seed;
  j["outcome"] = outcome_name(outcome);
  j["kd"] = kd.infinite ? json("Inf") : json(kd.value);
  j["killed_value"] = killed_value;
  j["dead_value"] = dead_value;
  j["steps"] = step_count;
  j["trace"] = trace_path;
  j["state_hash"] = hex_digest(final_state_hash);
  return j.dump();
}

EpisodeResult EpisodeResult::from_json_line(const std::string& line) {
  json j = json::parse(line);
  EpisodeResult r;
  r.scenario_id = j.at("scenario").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.outcome = outcome_from_name(j.at("outcome").get<std::string>());
  if (j.at("kd").is_string()) {
    r.kd.infinite = true;
  } else {
    r.kd.value = j.at("kd").get<double>();
  }
  r.killed_value = j.at("killed_value").get<double>();
  r.dead_value = j.at("dead_value").get<double>();
  r.step_count = j.at("steps").get<int>();
  r.trace_path = j.value("trace", "");
  std::uint64_t hash = 0;
  if (!parse_u64("0x" + j.value("state_hash", "0"), hash)) {
    throw std::runtime_error("bad state_hash field");
  }
  r.final_state_hash = hash;
  return r;
}

void persist_result(const EpisodeResult& result, std::ostream& sink) {
  sink << result.to_json_line() << "\n";
  if (!sink) throw std::runtime_error("result sink write failed");
}

std::vector<EpisodeResult> load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results file: " + path);
  std::vector<EpisodeResult> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(EpisodeResult::from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed result record (" + e.what() + ")");
    }
  }
  return out;
}

}  // namespace textrts
