#include <doctest.h>

#include <algorithm>
#include <random>
#include <thread>

#include "support.hpp"
#include "textrts/agents.hpp"

using namespace textrts;
using test::make_world;

namespace {

RosterRuntime make_runtime(const std::vector<AgentProfile>& roster, const WorldState& w) {
  RosterRuntime rt;
  rt.player = 1;
  for (const AgentProfile& p : roster) {
    AgentRuntime a;
    a.profile = p;
    for (const TeamDef& def : p.teams) a.teams.push_back({def, {}});
    rt.agents.push_back(std::move(a));
  }
  rt.assign_existing(w);
  return rt;
}

GameEvent created(const WorldState& w, UnitTag tag) {
  GameEvent ev;
  ev.kind = GameEvent::Kind::UnitCreated;
  ev.subject = tag;
  ev.step = w.clock_ticks;
  return ev;
}

GameEvent killed(UnitTag tag) {
  GameEvent ev;
  ev.kind = GameEvent::Kind::UnitKilled;
  ev.subject = tag;
  return ev;
}

}  // namespace

TEST_CASE("ECEB roster is exactly Commander and Developer") {
  auto roster = build_roster(GameMode::ECEB, test::scenario("full_eceb"));
  REQUIRE(roster.size() == 2);
  CHECK(roster[0].name == "Commander");
  CHECK(roster[0].easy_control);
  CHECK(roster[1].name == "Developer");
  CHECK(roster[1].easy_build);
}

TEST_CASE("SCEB roster fields CombatGroup0 with the Zealot team") {
  auto roster = build_roster(GameMode::SCEB, test::scenario("full_sceb"));
  REQUIRE(roster.size() == 12);  // Commander + Developer + CombatGroup0..9
  const AgentProfile* cg0 = nullptr;
  for (const AgentProfile& p : roster) {
    if (p.name == "CombatGroup0") cg0 = &p;
  }
  REQUIRE(cg0 != nullptr);
  REQUIRE(cg0->teams.size() == 1);
  CHECK(cg0->teams[0].name == "Zealot-1");
  CHECK(cg0->teams[0].unit_type == "Zealot");
}

TEST_CASE("ECSB roster has a standard-build Developer and a Builder") {
  auto roster = build_roster(GameMode::ECSB, test::scenario("full_ecsb"));
  REQUIRE(roster.size() == 3);
  CHECK(roster[1].name == "Developer");
  CHECK_FALSE(roster[1].easy_build);
  CHECK(roster[2].name == "Builder");
  CHECK(roster[2].action_sets.count("build") == 1);
}

TEST_CASE("SMAC config yields one agent with three teams") {
  auto roster = build_roster(GameMode::Micro, test::scenario("smac_2s3z"));
  REQUIRE(roster.size() == 1);
  CHECK(roster[0].name == "CombatGroup0");
  REQUIRE(roster[0].teams.size() == 3);
  CHECK(roster[0].teams[0].capacity == 2);
  CHECK(roster[0].teams[1].capacity == 1);
  CHECK(roster[0].teams[2].unit_type == "Stalker");
}

TEST_CASE("new units are cached to the matching agent, dead tags removed") {
  WorldState w = make_world();
  auto roster = build_roster(GameMode::SCEB, test::scenario("full_sceb"));
  RosterRuntime rt = make_runtime(roster, w);

  Unit& zealot = w.spawn("Zealot", 1, {20, 20});
  rt.sync(w, {created(w, zealot.tag)});
  AgentRuntime* cg0 = rt.find("CombatGroup0");
  REQUIRE(cg0 != nullptr);
  REQUIRE(cg0->teams[0].members.size() == 1);
  CHECK(cg0->teams[0].members[0] == zealot.tag);
  CHECK(rt.partition_holds(w));

  Unit& stalker = w.spawn("Stalker", 1, {22, 20});
  UnitTag stag = stalker.tag;
  rt.sync(w, {created(w, stag)});
  CHECK(rt.find("CombatGroup1")->teams[0].members.size() == 1);

  w.remove_unit(stag);
  rt.sync(w, {killed(stag)});
  CHECK(rt.find("CombatGroup1")->teams[0].members.empty());
  CHECK(rt.partition_holds(w));
}

TEST_CASE("team overflow forms numbered sibling teams") {
  WorldState w = make_world();
  std::vector<AgentProfile> roster;
  AgentProfile cg;
  cg.name = "CombatGroup0";
  cg.role = "micro-combat";
  cg.teams.push_back({"Zealot-1", "Zealot", 2});
  roster.push_back(cg);
  RosterRuntime rt = make_runtime(roster, w);

  for (int i = 0; i < 3; ++i) {
    Unit& z = w.spawn("Zealot", 1, {20.0 + i, 20});
    rt.sync(w, {created(w, z.tag)});
  }
  AgentRuntime* agent = rt.find("CombatGroup0");
  REQUIRE(agent->teams.size() == 2);
  CHECK(agent->teams[0].members.size() == 2);
  CHECK(agent->teams[1].def.name == "Zealot-2");
  CHECK(agent->teams[1].members.size() == 1);
  CHECK(rt.partition_holds(w));
}

TEST_CASE("random create/kill sequences equal recompute-from-scratch") {
  std::mt19937_64 rng(777);
  for (int round = 0; round < 200; ++round) {
    WorldState w = make_world(round);
    auto roster = build_roster(GameMode::SCEB, test::scenario("full_sceb"));
    RosterRuntime incremental = make_runtime(roster, w);

    static const char* types[] = {"Zealot", "Stalker", "Probe", "Immortal", "Phoenix"};
    std::uniform_int_distribution<int> action(0, 2);
    std::uniform_int_distribution<int> type_pick(0, 4);
    std::vector<UnitTag> alive;
    for (int op = 0; op < 25; ++op) {
      if (action(rng) < 2 || alive.empty()) {
        Unit& u = w.spawn(types[type_pick(rng)], 1, {20, 20});
        alive.push_back(u.tag);
        incremental.sync(w, {created(w, u.tag)});
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, alive.size() - 1);
        std::size_t idx = pick(rng);
        UnitTag tag = alive[idx];
        alive.erase(alive.begin() + idx);
        w.remove_unit(tag);
        incremental.sync(w, {killed(tag)});
      }
    }
    // Oracle: rebuild the caches from the world alone.
    RosterRuntime fresh = make_runtime(roster, w);
    REQUIRE(incremental.partition_holds(w));
    for (std::size_t a = 0; a < fresh.agents.size(); ++a) {
      std::vector<UnitTag> lhs = incremental.agents[a].all_members();
      std::vector<UnitTag> rhs = fresh.agents[a].all_members();
      std::sort(lhs.begin(), lhs.end());
      std::sort(rhs.begin(), rhs.end());
      REQUIRE(lhs == rhs);
    }
  }
}

TEST_CASE("direct messages land exactly once in the named inbox") {
  MessageRouter router({"Commander", "CombatGroup1", "Developer"});
  CHECK_FALSE(router.send(3, "Commander", "CombatGroup1", "attack north").has_value());
  router.deliver_round();
  auto inbox = router.take_inbox("CombatGroup1");
  REQUIRE(inbox.size() == 1);
  CHECK(inbox[0].from == "Commander");
  CHECK(inbox[0].content == "attack north");
  CHECK(router.take_inbox("CombatGroup1").empty());  // consumed
  CHECK(router.take_inbox("Developer").empty());
}

TEST_CASE("request and reply travel as two one-hop deliveries across steps") {
  MessageRouter router({"Developer", "Builder"});
  router.send(1, "Developer", "Builder", "build a pylon at [20, 20]");
  router.deliver_round();
  auto to_builder = router.take_inbox("Builder");
  REQUIRE(to_builder.size() == 1);

  router.send(2, "Builder", "Developer", "pylon started");
  router.deliver_round();
  auto to_dev = router.take_inbox("Developer");
  REQUIRE(to_dev.size() == 1);
  CHECK(to_dev[0].step == 2);
  CHECK(to_dev[0].content == "pylon started");
}

TEST_CASE("unknown recipients are rejected at send time") {
  MessageRouter router({"Commander"});
  auto notice = router.send(1, "Commander", "CombatGroup99", "hello?");
  REQUIRE(notice.has_value());
  CHECK(notice->find("CombatGroup99") != std::string::npos);
}

TEST_CASE("channel messages reach everyone except the sender") {
  MessageRouter router({"Commander", "CombatGroup1", "CombatGroup2"});
  router.send(1, "Commander", MessageRouter::kChannel, "regroup");
  router.deliver_round();
  CHECK(router.take_inbox("Commander").empty());
  CHECK(router.take_inbox("CombatGroup1").size() == 1);
  CHECK(router.take_inbox("CombatGroup2").size() == 1);
}

TEST_CASE("delivery is ordered by (step, sender) and content is byte-exact") {
  MessageRouter router({"A", "B", "Commander"});
  std::string weird = "bytes \xF0\x9F\x8C\x8D with <Move_Screen([1, 2])> and, commas\nnewline";
  router.send(2, "B", "Commander", "later");
  router.send(1, "A", "Commander", weird);
  router.deliver_round();
  auto inbox = router.take_inbox("Commander");
  REQUIRE(inbox.size() == 2);
  CHECK(inbox[0].from == "A");
  CHECK(inbox[0].content == weird);
  CHECK(inbox[1].from == "B");
}

TEST_CASE("concurrent sends within a step are all delivered exactly once") {
  MessageRouter router({"A", "B"});
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&router, i] {
      router.send(1, "A", "B", "msg " + std::to_string(i));
    });
  }
  for (auto& t : threads) t.join();
  router.deliver_round();
  CHECK(router.take_inbox("B").size() == 8);
}
