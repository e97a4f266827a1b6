#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "support.hpp"
#include "textrts/clients.hpp"
#include "textrts/trace.hpp"

using namespace textrts;
namespace fs = std::filesystem;

namespace {

ChatRequest simple_request() {
  ChatRequest req;
  req.system = "system";
  req.user =
      "(3) Units on screen:\n"
      "- own Stalker 0x12 at screen [20, 30], health 80/80, shield 80/80, energy 0, status: ok\n"
      "- enemy Roach 0x51 at screen [40, 30], health 60/145, shield 0/0, energy 0, status: ok\n"
      "- enemy Roach 0x52 at screen [41, 30], health 145/145, shield 0/0, energy 0, status: ok\n"
      "(6) Valid actions for current step:\n"
      "<No_Operation()>\n"
      "<Move_Screen(screen)>\n"
      "<Attack_Unit(tag)>\n"
      "(12) Task information:\nnone";
  return req;
}

std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("always-noop mock waits its configured delay") {
  auto client = make_mock_client("always-noop", 0.15, 1);
  auto start = std::chrono::steady_clock::now();
  Completion c = client->complete(simple_request(), {"A", 0, 1, 0});
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(c.ok);
  CHECK(c.text == "<No_Operation()>");
  CHECK(elapsed >= 0.14);
}

TEST_CASE("focus-fire mock attacks the weakest visible enemy") {
  auto client = make_mock_client("focus-fire", 0, 1);
  Completion c = client->complete(simple_request(), {"A", 0, 1, 0});
  CHECK(c.text == "<Attack_Unit(0x51)>");
}

TEST_CASE("random-valid mock emits only actions from block 6 and is seed-stable") {
  auto client = make_mock_client("random-valid", 0, 99);
  QueryMeta meta{"CombatGroup1", 30, 7, 0};
  Completion a = client->complete(simple_request(), meta);
  Completion b = client->complete(simple_request(), meta);
  CHECK(a.text == b.text);  // same (seed, agent, step) -> same choice
  ParseReport parsed = extract_actions(a.text);
  REQUIRE(parsed.actions.size() == 1);
  std::string name = parsed.actions[0].name;
  CHECK((name == "No_Operation" || name == "Move_Screen" || name == "Attack_Unit"));
}

TEST_CASE("fault-injected mock fails the configured number of times") {
  auto client = make_mock_client("fail-then-succeed", 0, 1, 2);
  QueryMeta meta{"A", 5, 1, 0};
  CHECK_FALSE(client->complete(simple_request(), meta).ok);
  CHECK_FALSE(client->complete(simple_request(), meta).ok);
  CHECK(client->complete(simple_request(), meta).ok);
}

TEST_CASE("trace writer enforces one record per (step, agent)") {
  std::string path = temp_path("textrts_trace_dup.jsonl");
  {
    TraceWriter w(path);
    w.record(0, "A", 1, "<No_Operation()>");
    w.record(0, "B", 2, "<No_Operation()>");
    w.record(10, "A", 3, "<No_Operation()>");
    CHECK_THROWS_WITH_AS(w.record(0, "A", 4, "again"), doctest::Contains("duplicate"),
                         std::runtime_error);
  }
  TraceFile tf = TraceFile::load(path);
  CHECK(tf.records.size() == 3);
  fs::remove(path);
}

TEST_CASE("replay client returns recorded responses in order and then errors") {
  std::string path = temp_path("textrts_trace_replay.jsonl");
  {
    TraceWriter w(path);
    w.record(0, "A", 0, "first");
    w.record(10, "A", 0, "second");
    w.record(0, "B", 0, "other-agent");
  }
  auto client = make_replay_client(path);
  ChatRequest req;
  CHECK(client->complete(req, {"A", 0, 1, 0}).text == "first");
  CHECK(client->complete(req, {"B", 0, 1, 0}).text == "other-agent");
  CHECK(client->complete(req, {"A", 10, 1, 0}).text == "second");
  Completion exhausted = client->complete(req, {"A", 20, 1, 0});
  CHECK_FALSE(exhausted.ok);
  CHECK_FALSE(exhausted.retryable);
  fs::remove(path);
}

TEST_CASE("http client speaks the chat-completions wire format") {
  httplib::Server server;
  std::string seen_body, seen_auth;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request& req, httplib::Response& res) {
                seen_body = req.body;
                seen_auth = req.get_header_value("Authorization");
                nlohmann::json reply = {
                    {"choices",
                     {{{"message", {{"role", "assistant"}, {"content", "<No_Operation()>"}}}}}}};
                res.set_content(reply.dump(), "application/json");
              });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  while (!server.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(5));

  setenv("TEXTRTS_TEST_KEY", "sk-sekret-123", 1);
  ClientConfig config = ClientConfig::parse(
      "http:http://127.0.0.1:" + std::to_string(port) +
      "/v1/chat/completions#model=test-model&key_env=TEXTRTS_TEST_KEY");
  auto client = make_http_client(config);

  ChatRequest req;
  req.system = "be brief";
  req.examples.push_back({"example in", "example out"});
  req.user = "observation";
  Completion c = client->complete(req, {"A", 0, 1, 0});
  CHECK(c.ok);
  CHECK(c.text == "<No_Operation()>");

  nlohmann::json body = nlohmann::json::parse(seen_body);
  CHECK(body.at("model") == "test-model");
  REQUIRE(body.at("messages").size() == 4);  // system + example pair + user
  CHECK(body.at("messages")[0].at("role") == "system");
  CHECK(body.at("messages")[1].at("role") == "user");
  CHECK(body.at("messages")[2].at("role") == "assistant");
  CHECK(seen_auth == "Bearer sk-sekret-123");

  server.stop();
  server_thread.join();
}

TEST_CASE("http transport errors are retryable and never leak the key") {
  setenv("TEXTRTS_TEST_KEY", "sk-sekret-123", 1);
  ClientConfig config = ClientConfig::parse(
      "http:http://127.0.0.1:9/v1/chat/completions#model=m&key_env=TEXTRTS_TEST_KEY&timeout=1");
  auto client = make_http_client(config);
  Completion c = client->complete(simple_request(), {"A", 0, 1, 0});
  CHECK_FALSE(c.ok);
  CHECK(c.retryable);
  CHECK(c.error.find("sk-sekret") == std::string::npos);
}

TEST_CASE("client config parsing covers the three kinds") {
  ClientConfig mock = ClientConfig::parse("mock:kite?delay=0.25&seed=9");
  CHECK(mock.kind == "mock");
  CHECK(mock.script == "kite");
  CHECK(mock.delay_s == doctest::Approx(0.25));
  CHECK(mock.seed == 9);

  ClientConfig replay = ClientConfig::parse("replay:/tmp/foo.jsonl");
  CHECK(replay.kind == "replay");
  CHECK(replay.trace_path == "/tmp/foo.jsonl");

  CHECK_THROWS(ClientConfig::parse("carrier-pigeon:coop"));
}
