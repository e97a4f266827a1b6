#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "textrts/observation.hpp"

namespace textrts {

struct QueryMeta {
  std::string agent;
  int step = 0;
  std::uint64_t episode_seed = 0;
  std::uint64_t request_hash = 0;
};

struct Completion {
  bool ok = false;
  std::string text;
  std::string error;
  bool retryable = true;
};

// One completion interface for every decision source. Implementations must
// be callable from concurrent query workers.
class Client {
 public:
  virtual ~Client() = default;
  virtual Completion complete(const ChatRequest& request, const QueryMeta& meta) = 0;
  virtual std::string kind() const = 0;
};

struct ClientConfig {
  std::string kind;  // "mock" | "replay" | "http"
  // mock
  std::string script = "always-noop";
  double delay_s = 0;
  std::uint64_t seed = 0;
  int fail_times = 0;  // scripts "fail-then-succeed" / "always-fail"
  // replay
  std::string trace_path;
  // http
  std::string endpoint;
  std::string model;
  std::string key_env = "TEXTRTS_API_KEY";
  double timeout_s = 30;
  double temperature = 0.7;

  // "mock:focus-fire", "mock:always-noop?delay=0.2", "replay:trace.jsonl",
  // "http:http://host:1234/v1/chat/completions?model=x&key_env=KEY"
  static ClientConfig parse(const std::string& spec);
};

std::shared_ptr<Client> make_client(const ClientConfig& config);

// Scripted mock policies double as acceptance baselines.
std::shared_ptr<Client> make_mock_client(const std::string& script, double delay_s,
                                         std::uint64_t seed, int fail_times = 0);
std::shared_ptr<Client> make_replay_client(const std::string& trace_path);
std::shared_ptr<Client> make_http_client(const ClientConfig& config);

}  // namespace textrts
