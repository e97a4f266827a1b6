#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

namespace textrts {

struct TraceRecord {
  int step = 0;
  std::string agent;
  std::uint64_t request_hash = 0;
  std::string response;
};

// Append-only line-delimited episode trace; one record per (step, agent),
// duplicates rejected. Write failures throw so the episode aborts loudly.
class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path);
  void record(int step, const std::string& agent, std::uint64_t request_hash,
              const std::string& response);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::mutex mutex_;
  std::set<std::pair<int, std::string>> seen_;
};

struct TraceFile {
  std::vector<TraceRecord> records;
  static TraceFile load(const std::string& path);
};

}  // namespace textrts
