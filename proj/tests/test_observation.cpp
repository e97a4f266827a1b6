#include <doctest.h>

#include "support.hpp"
#include "textrts/observation.hpp"
#include "textrts/util.hpp"

using namespace textrts;
using test::make_ctx;
using test::make_world;

namespace {

struct ObsFixture {
  WorldState world = make_world();
  ScenarioConfig scenario = test::scenario("task4_l1");
  AgentRuntime agent;
  AgentContext ctx = make_ctx("CombatGroup1");
  LastStep last;
  std::vector<std::string> targets = {"Commander", "CombatGroup1"};

  ObsFixture() {
    agent.profile.name = "CombatGroup1";
    agent.profile.role = "micro-combat";
  }

  ObservationText build() {
    return build_observation(agent, ctx, world, test::registry(), test::wiki(),
                             test::templates(), scenario, last, targets);
  }
};

}  // namespace

TEST_CASE("all twelve blocks are present in ascending order, none omitted") {
  ObsFixture fx;
  ObservationText obs = fx.build();
  REQUIRE(obs.blocks.size() == 12);
  for (int i = 0; i < 12; ++i) CHECK(obs.blocks[i].id == i + 1);
  // Empty information renders the explicit sentinel, never vanishes.
  CHECK(obs.blocks[9].body == test::templates().empty_marker);  // no messages
}

TEST_CASE("block 3 unit lines round-trip against the coordinate transform") {
  ObsFixture fx;
  Unit& stalker = fx.world.spawn("Stalker", 1, {30, 25});
  fx.world.cameras["CombatGroup1"] = make_camera({30, 25}, 64, 64);
  fx.ctx.team_units = {stalker.tag};

  ObservationText obs = fx.build();
  FrameResult px = world_to_screen(stalker.pos, agent_camera(fx.world, fx.ctx));
  std::string expected = "[" + std::to_string(px.pixel.x) + ", " +
                         std::to_string(px.pixel.y) + "]";
  const std::string& body = obs.blocks[2].body;
  CHECK(body.find("own Stalker " + to_hex(stalker.tag)) != std::string::npos);
  CHECK(body.find(expected) != std::string::npos);
  CHECK(body.find("health 80/80") != std::string::npos);
  CHECK(body.find("shield 80/80") != std::string::npos);
}

TEST_CASE("block 9 carries the action error category and detail verbatim") {
  ObsFixture fx;
  ActionError err;
  err.category = ActionError::Category::NoIdleBuilding;
  err.action = TextAction{"Train_Zealot", {}};
  err.detail = "no idle Gateway";
  fx.last.errors.push_back(err);

  ObservationText obs = fx.build();
  CHECK(obs.blocks[8].body.find("no-idle-building") != std::string::npos);
  CHECK(obs.blocks[8].body.find("<Train_Zealot()>") != std::string::npos);
  CHECK(obs.blocks[8].body.find("no idle Gateway") != std::string::npos);
}

TEST_CASE("block 10 renders messages in origin form") {
  ObsFixture fx;
  fx.last.inbox.push_back({4, "Commander", "CombatGroup1", "hold the <ramp> [sic]"});
  ObservationText obs = fx.build();
  CHECK(obs.blocks[9].body.find("from Commander") != std::string::npos);
  CHECK(obs.blocks[9].body.find("hold the <ramp> [sic]") != std::string::npos);
}

TEST_CASE("observation building is deterministic") {
  ObsFixture fx;
  fx.world.spawn("Stalker", 1, {30, 25});
  fx.world.spawn("Roach", 2, {33, 25});
  fx.world.cameras["CombatGroup1"] = make_camera({31, 25}, 64, 64);
  CHECK(fx.build().rendered() == fx.build().rendered());
}

TEST_CASE("wiki covers every unit type in the stats file") {
  for (const auto& [type, u] : test::stats().units) {
    INFO("missing wiki entry for " << type);
    CHECK(test::wiki().find(type) != nullptr);
  }
}

TEST_CASE("feature grids: ownership, density and determinism") {
  WorldState w = make_world();
  Camera cam = make_camera({32, 32}, 64, 64);

  auto empty_grids = render_feature_grid(w, cam, {"ownership"});
  REQUIRE(empty_grids.size() == 1);
  for (int v : empty_grids[0].cells) CHECK(v == 0);

  Unit& u1 = w.spawn("Zealot", 1, {28, 28});
  w.spawn("Roach", 2, {36, 36});
  w.spawn("Roach", 2, {36, 36});  // stacked: density 2 in one cell

  auto grids = render_feature_grid(w, cam, {"ownership", "density", "terrain"});
  REQUIRE(grids.size() == 3);
  FrameResult p1 = world_to_screen(u1.pos, cam);
  CHECK(grids[0].at(p1.pixel.x, p1.pixel.y) == 1);

  int density_sum = 0;
  for (int v : grids[1].cells) density_sum += v;
  CHECK(density_sum == 3);  // number of on-screen units

  std::string text = grids[0].to_text();
  CHECK(text.find("grid ownership 64x64") == 0);
}

TEST_CASE("assemble_query is deterministic and role-aware") {
  ObsFixture fx;
  ObservationText obs = fx.build();
  const RolePrompts& commander = test::prompts().for_role("macro-combat");
  ChatRequest a = assemble_query(commander, obs, {});
  ChatRequest b = assemble_query(commander, obs, {});
  CHECK(a.to_json() == b.to_json());
  CHECK(a.hash() == b.hash());
  CHECK(a.system.find("Commander") != std::string::npos);
  CHECK(a.attachments.empty());

  auto grids = render_feature_grid(fx.world, make_camera({32, 32}, 64, 64), {"density"});
  ChatRequest c = assemble_query(commander, obs, grids);
  CHECK(c.attachments.size() == 1);
  CHECK(c.user == a.user);  // grids ride as attachments, text unchanged
}
