#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "textrts/agents.hpp"
#include "textrts/bridge.hpp"
#include "textrts/clients.hpp"
#include "textrts/metrics.hpp"
#include "textrts/observation.hpp"
#include "textrts/scenarios.hpp"

namespace textrts {

struct StepBudget {
  double max_wait_s = 60;   // T: wall-clock budget for one rollout step
  double query_wait_s = 20; // T': budget for a single client attempt
  int max_retries = 3;      // n

  bool valid() const { return max_wait_s >= query_wait_s && max_retries >= 1; }
};

struct AgentResponse {
  std::string agent;
  std::string raw;
  bool fallback = false;  // set iff no attempt succeeded; raw is the default action
  int attempts = 0;
  double latency_s = 0;
  std::vector<double> backoff_waits_s;  // recorded 2^i inter-attempt waits
};

// Up to n attempts, each in its own worker and abandoned after T'; after
// every failed attempt i the caller waits 2^i seconds. All attempts failing
// yields the default action with the fallback flag set.
AgentResponse query_agent(const std::string& agent, const ChatRequest& request,
                          const std::shared_ptr<Client>& client, const StepBudget& budget,
                          const QueryMeta& meta);

struct FanoutItem {
  std::string agent;
  ChatRequest request;
  std::shared_ptr<Client> client;
  QueryMeta meta;
};

// Issues all queries concurrently; collection finishes when every agent
// responded or the step budget expired. Expired agents fall back. Results
// are returned in the input order.
std::vector<AgentResponse> concurrent_fanout(const std::vector<FanoutItem>& items,
                                             const StepBudget& budget);

struct EpisodeOptions {
  std::uint64_t seed = 1;
  StepBudget budget;
  int decision_period_ticks = 10;  // one decision per simulated second
  std::string record_trace_path;   // empty = no recording
  bool want_grids = false;
  std::vector<std::string> grid_channels = {"ownership", "density", "terrain"};
};

struct EpisodeDeps {
  const StatsDb* stats = nullptr;
  const Registry* registry = nullptr;
  const WikiDb* wiki = nullptr;
  const ObservationTemplates* templates = nullptr;
  const PromptDb* prompts = nullptr;
};

// The rollout loop: sync caches, snapshot, fan out queries, route messages,
// move cameras to unit teams, execute transformed calls, advance the
// simulator, until a terminal outcome or the scenario clock runs out.
EpisodeResult run_episode(const ScenarioConfig& scenario, const EpisodeDeps& deps,
                          const std::vector<AgentProfile>& roster,
                          const std::map<std::string, std::shared_ptr<Client>>& clients,
                          const EpisodeOptions& options);

}  // namespace textrts
