#include "textrts/trace.hpp"

#include <stdexcept>

#include <json.hpp>

#include "textrts/util.hpp"

namespace textrts {

using nlohmann::json;

TraceWriter::TraceWriter(const std::string& path) : path_(path), out_(path) {
  if (!out_) throw std::runtime_error("cannot open trace sink: " + path);
}

void TraceWriter::record(int step, const std::string& agent, std::uint64_t request_hash,
                         const std::string& response) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto key = std::make_pair(step, agent);
  if (seen_.count(key)) {
    throw std::runtime_error("duplicate trace record for step " + std::to_string(step) +
                             ", agent " + agent);
  }
  seen_.insert(key);
  json j;
  j["step"] = step;
  j["agent"] = agent;
  j["request_hash"] = hex_digest(request_hash);
  j["response"] = response;
  out_ << j.dump() << "\n";
  out_.flush();
  if (!out_) throw std::runtime_error("trace sink write failed: " + path_);
}

TraceFile TraceFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace: " + path);
  TraceFile tf;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      TraceRecord r;
      r.step = j.at("step").get<int>();
      r.agent = j.at("agent").get<std::string>();
      std::uint64_t h = 0;
      parse_u64("0x" + j.value("request_hash", "0"), h);
      r.request_hash = h;
      r.response = j.at("response").get<std::string>();
      tf.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad trace record (" +
                               e.what() + ")");
    }
  }
  return tf;
}

}  // namespace textrts
