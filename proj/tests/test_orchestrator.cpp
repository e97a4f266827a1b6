#include <doctest.h>

#include <atomic>
#include <chrono>
#include <filesystem>

#include "support.hpp"
#include "textrts/orchestrator.hpp"
#include "textrts/trace.hpp"

using namespace textrts;
namespace fs = std::filesystem;

namespace {

EpisodeDeps deps() {
  return {&test::stats(), &test::registry(), &test::wiki(), &test::templates(),
          &test::prompts()};
}

std::map<std::string, std::shared_ptr<Client>> bind_clients(
    const std::vector<AgentProfile>& roster, const std::string& spec, std::uint64_t seed) {
  std::map<std::string, std::shared_ptr<Client>> clients;
  for (const AgentProfile& p : roster) {
    ClientConfig cc = ClientConfig::parse(spec);
    if (cc.kind == "mock" && cc.seed == 0) cc.seed = seed;
    clients[p.name] = make_client(cc);
  }
  return clients;
}

}  // namespace

TEST_CASE("query_agent: immediate success is one attempt, no fallback") {
  auto client = make_mock_client("always-noop", 0.05, 1);
  ChatRequest req;
  StepBudget budget{10, 2, 3};
  AgentResponse r = query_agent("A", req, client, budget, {"A", 0, 1, 0});
  CHECK(r.attempts == 1);
  CHECK_FALSE(r.fallback);
  CHECK(r.raw == "<No_Operation()>");
  CHECK(r.backoff_waits_s.empty());
}

TEST_CASE("query_agent: two failures then success records 1s and 2s waits") {
  auto client = make_mock_client("fail-then-succeed", 0, 1, 2);
  ChatRequest req;
  StepBudget budget{30, 2, 3};
  auto start = std::chrono::steady_clock::now();
  AgentResponse r = query_agent("A", req, client, budget, {"A", 0, 1, 0});
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(r.attempts == 3);
  CHECK_FALSE(r.fallback);
  REQUIRE(r.backoff_waits_s.size() == 2);
  CHECK(r.backoff_waits_s[0] == doctest::Approx(1.0).epsilon(0.1));
  CHECK(r.backoff_waits_s[1] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(elapsed >= 3.0);
  CHECK(elapsed < 4.0);
}

TEST_CASE("fanout: a slow client falls back when the step budget expires") {
  std::vector<FanoutItem> items;
  FanoutItem fast;
  fast.agent = "Fast";
  fast.client = make_mock_client("always-noop", 0.02, 1);
  fast.meta = {"Fast", 0, 1, 0};
  FanoutItem slow;
  slow.agent = "Slow";
  slow.client = make_mock_client("slow", 0.8, 1);
  slow.meta = {"Slow", 0, 1, 0};
  items.push_back(fast);
  items.push_back(slow);

  StepBudget budget{0.2, 0.15, 1};
  auto responses = concurrent_fanout(items, budget);
  REQUIRE(responses.size() == 2);
  CHECK_FALSE(responses[0].fallback);
  CHECK(responses[1].fallback);
  CHECK(responses[1].raw == "<No_Operation()>");
}

TEST_CASE("fanout: every agent contributes exactly one response") {
  std::vector<FanoutItem> items;
  for (int i = 0; i < 6; ++i) {
    FanoutItem item;
    item.agent = "A" + std::to_string(i);
    item.client = make_mock_client("always-noop", 0.05, 1);
    item.meta = {item.agent, 0, 1, 0};
    items.push_back(item);
  }
  auto responses = concurrent_fanout(items, StepBudget{5, 2, 2});
  REQUIRE(responses.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(responses[i].agent == "A" + std::to_string(i));
}

TEST_CASE("noop episode on task1 terminates lose at 600 ticks") {
  ScenarioConfig cfg = test::scenario("task1_l1");
  auto roster = build_roster(GameMode::Micro, cfg);
  auto clients = bind_clients(roster, "mock:always-noop", 1);
  EpisodeOptions options;
  options.seed = 1;
  EpisodeResult result = run_episode(cfg, deps(), roster, clients, options);
  CHECK(result.outcome == Outcome::Lose);
  CHECK(result.step_count == 600);
  CHECK(result.kd.value == 0);
  CHECK_FALSE(result.kd.infinite);
}

TEST_CASE("focus-fire episode on task4 fights and records a complete trace") {
  ScenarioConfig cfg = test::scenario("task4_l1");
  auto roster = build_roster(GameMode::Micro, cfg);
  REQUIRE(roster.size() == 1);  // CombatGroup1 controls the stalkers
  auto clients = bind_clients(roster, "mock:focus-fire", 3);
  EpisodeOptions options;
  options.seed = 3;
  options.record_trace_path =
      (fs::temp_directory_path() / "textrts_task4_trace.jsonl").string();
  EpisodeResult result = run_episode(cfg, deps(), roster, clients, options);
  CHECK(result.killed_value > 0);
  CHECK(result.kd.value > 0);

  // One record per (decision step, agent): the no-lost-step property.
  TraceFile tf = TraceFile::load(options.record_trace_path);
  int decision_steps = (result.step_count + 9) / 10;
  CHECK(static_cast<int>(tf.records.size()) == decision_steps * static_cast<int>(roster.size()));
  fs::remove(options.record_trace_path);
}

TEST_CASE("recorded episodes replay to the identical result") {
  ScenarioConfig cfg = test::scenario("task4_l1");
  auto roster = build_roster(GameMode::Micro, cfg);
  std::string trace_path =
      (fs::temp_directory_path() / "textrts_replay_trace.jsonl").string();

  auto record_clients = bind_clients(roster, "mock:random-valid", 11);
  EpisodeOptions record_options;
  record_options.seed = 11;
  record_options.record_trace_path = trace_path;
  EpisodeResult original = run_episode(cfg, deps(), roster, record_clients, record_options);

  auto replay_clients = bind_clients(roster, "replay:" + trace_path, 11);
  EpisodeOptions replay_options;
  replay_options.seed = 11;
  EpisodeResult replayed = run_episode(cfg, deps(), roster, replay_clients, replay_options);

  CHECK(original.final_state_hash == replayed.final_state_hash);
  CHECK(original.outcome == replayed.outcome);
  CHECK(original.step_count == replayed.step_count);
  CHECK(original.killed_value == replayed.killed_value);
  fs::remove(trace_path);
}

TEST_CASE("client misconfiguration aborts before step zero") {
  ScenarioConfig cfg = test::scenario("task1_l1");
  auto roster = build_roster(GameMode::Micro, cfg);
  std::map<std::string, std::shared_ptr<Client>> clients;  // nothing bound
  EpisodeOptions options;
  CHECK_THROWS_WITH_AS(run_episode(cfg, deps(), roster, clients, options),
                       doctest::Contains("no client"), std::runtime_error);
}

TEST_CASE("invalid budgets are rejected") {
  ScenarioConfig cfg = test::scenario("task1_l1");
  auto roster = build_roster(GameMode::Micro, cfg);
  auto clients = bind_clients(roster, "mock:always-noop", 1);
  EpisodeOptions options;
  options.budget.max_wait_s = 1;
  options.budget.query_wait_s = 5;  // T < T'
  CHECK_THROWS(run_episode(cfg, deps(), roster, clients, options));
}

namespace {

// Sends one message at step 0, then watches its own block 10 for delivery.
class MessageProbe : public Client {
 public:
  std::atomic<bool> delivered{false};
  std::atomic<bool> unknown_reported{false};

  Completion complete(const ChatRequest& request, const QueryMeta& meta) override {
    if (request.user.find("hold position please") != std::string::npos) delivered = true;
    if (request.user.find("CombatGroup99") != std::string::npos) unknown_reported = true;
    if (meta.step == 0) {
      return {true,
              "<MessageTo(CombatGroup1, '''hold position please''')> "
              "<MessageTo(CombatGroup99, '''are you there''')>",
              "", true};
    }
    return {true, "<No_Operation()>", "", true};
  }
  std::string kind() const override { return "probe"; }
};

}  // namespace

TEST_CASE("messages appear in the recipient's next observation; unknown names bounce") {
  ScenarioConfig cfg = test::scenario("task4_l1");
  auto roster = build_roster(GameMode::Micro, cfg);
  REQUIRE(roster.size() == 1);
  REQUIRE(roster[0].name == "CombatGroup1");

  auto probe = std::make_shared<MessageProbe>();
  std::map<std::string, std::shared_ptr<Client>> clients{{"CombatGroup1", probe}};
  EpisodeOptions options;
  options.seed = 2;
  run_episode(cfg, deps(), roster, clients, options);
  CHECK(probe->delivered);          // block 10, one step later
  CHECK(probe->unknown_reported);   // block 9 unknown-recipient notice
}
