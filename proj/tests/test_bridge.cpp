#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "support.hpp"
#include "textrts/bridge.hpp"
#include "textrts/util.hpp"

using namespace textrts;
using test::make_ctx;
using test::make_world;

namespace {

TextAction parse_one(const std::string& text) {
  ParseReport r = extract_actions(text);
  REQUIRE(r.actions.size() == 1);
  return r.actions[0];
}

std::string write_temp_registry(const std::string& name, const std::string& body) {
  std::string path = "/tmp/textrts_registry_" + name + ".json";
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("shipped registry loads with at least 100 actions") {
  const Registry& reg = test::registry();
  CHECK(reg.size() >= 100);
  CHECK(reg.find("No_Operation") != nullptr);
  CHECK(reg.find("Build_Pylon_Screen") != nullptr);
  CHECK(reg.find("Warp_Zealot") != nullptr);
}

TEST_CASE("duplicate action names fail to load") {
  std::string path = write_temp_registry("dup", R"({"actions": [
    {"name": "Train_Zealot", "calls": [{"id": 503, "fn": "Train_Zealot_quick", "args": ["queued"]}]},
    {"name": "Train_Zealot", "calls": [{"id": 503, "fn": "Train_Zealot_quick", "args": ["queued"]}]}
  ]})");
  CHECK_THROWS_WITH_AS(Registry::load(path), doctest::Contains("duplicate"),
                       std::runtime_error);
}

TEST_CASE("unbound placeholders fail to load") {
  std::string path = write_temp_registry("unbound", R"({"actions": [
    {"name": "Move_Screen", "args": [],
     "calls": [{"id": 331, "fn": "Move_screen", "args": ["queued", "screen"]}]}
  ]})");
  CHECK_THROWS_WITH_AS(Registry::load(path), doctest::Contains("unbound"),
                       std::runtime_error);
}

TEST_CASE("conflicting function ids fail to load") {
  std::string path = write_temp_registry("id_conflict", R"({"actions": [
    {"name": "A", "calls": [{"id": 7, "fn": "first_fn", "args": []}]},
    {"name": "B", "calls": [{"id": 7, "fn": "second_fn", "args": []}]}
  ]})");
  CHECK_THROWS_WITH_AS(Registry::load(path), doctest::Contains("function id"),
                       std::runtime_error);
}

TEST_CASE("transform: Build_Pylon_Screen resolves the screen coordinate") {
  WorldState w = make_world();
  AgentContext ctx = make_ctx("Builder");
  w.spawn("Probe", 1, {30, 30});
  w.cameras["Builder"] = make_camera({30, 30}, 64, 64);

  TransformResult tr =
      transform(test::registry(), parse_one("<Build_Pylon_Screen([23, 37])>"), ctx, w);
  REQUIRE(tr.ok());
  REQUIRE(tr.calls.size() == 1);
  CHECK(tr.calls[0].function_id == 70);
  CHECK(tr.calls[0].function_name == "Build_Pylon_screen");
  CHECK(tr.calls[0].queueing == BackendCall::Queueing::Queued);
  CHECK(tr.calls[0].screen == GridCoord{23, 37});
}

TEST_CASE("transform: Build_Nexus_Near emits camera move then build") {
  WorldState w = make_world();
  AgentContext ctx = make_ctx("Builder");
  w.spawn("Probe", 1, {30, 30});
  Unit& pylon = w.spawn("Pylon", 1, {44.5, 44.5});

  TransformResult tr = transform(
      test::registry(), parse_one("<Build_Nexus_Near(" + to_hex(pylon.tag) + ")>"), ctx, w);
  REQUIRE(tr.ok());
  REQUIRE(tr.calls.size() == 2);
  CHECK(tr.calls[0].function_id == 573);
  CHECK(tr.calls[0].function_name == "llm_pysc2_move_camera");
  CHECK(tr.calls[0].target_tag == pylon.tag);
  CHECK(tr.calls[1].function_id == 65);
  CHECK(tr.calls[1].function_name == "Build_Nexus_screen");
  // The placement is auto-resolved near the anchor.
  CHECK(tr.calls[1].has_world);
  CHECK(distance(tr.calls[1].world_pos, pylon.pos) < 8);
}

TEST_CASE("transform: Select_Unit_Attack_Unit emits selection prefix then attack") {
  WorldState w = make_world();
  AgentContext ctx = make_ctx();
  Unit& own = w.spawn("Stalker", 1, {30, 30});
  Unit& enemy = w.spawn("Roach", 2, {34, 30});
  w.cameras[ctx.agent_name] = make_camera({32, 30}, 64, 64);

  TransformResult tr = transform(
      test::registry(),
      parse_one("<Select_Unit_Attack_Unit(" + to_hex(own.tag) + ", " + to_hex(enemy.tag) + ")>"),
      ctx, w);
  REQUIRE(tr.ok());
  REQUIRE(tr.calls.size() == 2);
  CHECK(tr.calls[0].function_id == 3);
  CHECK(tr.calls[0].function_name == "select_rect");
  CHECK(tr.calls[0].has_rect);
  // 2x2 pixel rectangle centred on the first tag's screen position.
  FrameResult own_px = world_to_screen(own.pos, agent_camera(w, ctx));
  CHECK(tr.calls[0].rect_lo == GridCoord{own_px.pixel.x - 1, own_px.pixel.y - 1});
  CHECK(tr.calls[0].rect_hi == own_px.pixel);
  CHECK(tr.calls[1].function_id == 12);
  CHECK(tr.calls[1].function_name == "Attack_screen");
  CHECK(tr.calls[1].target_tag == enemy.tag);
}

TEST_CASE("transform: unknown action and bad arity") {
  WorldState w = make_world();
  AgentContext ctx = make_ctx();
  TransformResult tr = transform(test::registry(), parse_one("<Train_Zealots()>"), ctx, w);
  REQUIRE_FALSE(tr.ok());
  CHECK(tr.error->category == ActionError::Category::UnknownAction);

  tr = transform(test::registry(), parse_one("<Move_Screen([1, 2], [3, 4])>"), ctx, w);
  REQUIRE_FALSE(tr.ok());
  CHECK(tr.error->category == ActionError::Category::BadArity);
}

TEST_CASE("transform: train without an idle producer reports no-idle-building") {
  WorldState w = make_world();
  AgentContext ctx = make_ctx("Developer");
  Unit& gateway = w.spawn("Gateway", 1, {20.5, 20.5});
  gateway.production.push_back({"unit:Zealot", 10});

  TransformResult tr = transform(test::registry(), parse_one("<Train_Zealot()>"), ctx, w);
  REQUIRE_FALSE(tr.ok());
  CHECK(tr.error->category == ActionError::Category::NoIdleBuilding);
}

TEST_CASE("transform: warp actions before WarpGate research are unavailable") {
  WorldState w = make_world();
  AgentContext ctx = make_ctx("Developer");
  TransformResult tr = transform(test::registry(), parse_one("<Warp_Zealot()>"), ctx, w);
  REQUIRE_FALSE(tr.ok());
  CHECK(tr.error->category == ActionError::Category::Unavailable);
}

TEST_CASE("transform: attack target outside the camera frame is invalid-target") {
  WorldState w = make_world();
  AgentContext ctx = make_ctx();
  w.spawn("Stalker", 1, {10, 10});
  Unit& far_enemy = w.spawn("Roach", 2, {60, 60});
  w.cameras[ctx.agent_name] = make_camera({10, 10}, 64, 64);

  TransformResult tr = transform(
      test::registry(), parse_one("<Attack_Unit(" + to_hex(far_enemy.tag) + ")>"), ctx, w);
  REQUIRE_FALSE(tr.ok());
  CHECK(tr.error->category == ActionError::Category::InvalidTarget);
}

TEST_CASE("find_idle_building picks the lowest idle tag") {
  WorldState w = make_world();
  Unit& g1 = w.spawn("Gateway", 1, {20.5, 20.5});
  Unit& g2 = w.spawn("Gateway", 1, {26.5, 20.5});
  g1.production.push_back({"unit:Zealot", 10});

  auto found = find_idle_building("Gateway", 1, w);
  REQUIRE(std::holds_alternative<UnitTag>(found));
  CHECK(std::get<UnitTag>(found) == g2.tag);

  auto none = find_idle_building("Stargate", 1, w);
  REQUIRE(std::holds_alternative<ActionError>(none));
  CHECK(std::get<ActionError>(none).category == ActionError::Category::NoIdleBuilding);
}

TEST_CASE("find_idle_building equals the exhaustive filter oracle on random worlds") {
  std::mt19937_64 rng(4242);
  for (int round = 0; round < 50; ++round) {
    WorldState w = make_world(round);
    std::uniform_int_distribution<int> n(0, 6);
    std::uniform_int_distribution<int> busy(0, 1);
    std::uniform_int_distribution<int> pos(6, 58);
    int count = n(rng);
    for (int i = 0; i < count; ++i) {
      Unit& g = w.spawn("Gateway", 1, {pos(rng) + 0.5, pos(rng) + 0.5});
      if (busy(rng)) g.production.push_back({"unit:Zealot", 5});
      if (busy(rng) && g.production.empty()) g.under_construction = true;
    }
    // Oracle: full filter + min tag.
    UnitTag expected = 0;
    for (const auto& [tag, u] : w.units) {
      if (u.owner == 1 && u.type == "Gateway" && u.alive() && !u.under_construction &&
          u.production.empty() && (expected == 0 || tag < expected)) {
        expected = tag;
      }
    }
    auto found = find_idle_building("Gateway", 1, w);
    if (expected == 0) {
      CHECK(std::holds_alternative<ActionError>(found));
    } else {
      REQUIRE(std::holds_alternative<UnitTag>(found));
      CHECK(std::get<UnitTag>(found) == expected);
    }
  }
}

namespace {

// Brute-force oracle: rank every candidate cell by (ring distance from the
// anchor footprint, clockwise angle from north) and take the first valid one.
std::optional<Vec2> oracle_place(const WorldState& w, const Unit& anchor, int fw, int fh) {
  const UnitStats& s = w.stats->unit(anchor.type);
  int aw = std::max(1, s.footprint_w), ah = std::max(1, s.footprint_h);
  int x0 = static_cast<int>(std::floor(anchor.pos.x - aw / 2.0 + 0.25));
  int y0 = static_cast<int>(std::floor(anchor.pos.y - ah / 2.0 + 0.25));
  int x1 = x0 + aw - 1, y1 = y0 + ah - 1;
  double cx = (x0 + x1 + 1) / 2.0, cy = (y0 + y1 + 1) / 2.0;

  struct Cand {
    int ring;
    double angle;
    Vec2 pos;
  };
  std::vector<Cand> cands;
  for (int y = y0 - 12; y <= y1 + 12; ++y) {
    for (int x = x0 - 12; x <= x1 + 12; ++x) {
      int dx = std::max({x0 - x, 0, x - x1});
      int dy = std::max({y0 - y, 0, y - y1});
      int ring = std::max(dx, dy);
      if (ring < 1 || ring > 12) continue;
      double ddx = x + 0.5 - cx, ddy = y + 0.5 - cy;
      double angle = std::atan2(ddx, -ddy);
      if (angle < -1e-12) angle += 2 * 3.14159265358979323846;
      cands.push_back({ring, angle, {x + 0.5, y + 0.5}});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.ring != b.ring) return a.ring < b.ring;
    return a.angle < b.angle;
  });
  for (const Cand& c : cands) {
    int bx0 = static_cast<int>(std::floor(c.pos.x - fw / 2.0 + 0.25));
    int by0 = static_cast<int>(std::floor(c.pos.y - fh / 2.0 + 0.25));
    bool ok = true;
    for (int y = by0; y < by0 + fh && ok; ++y) {
      for (int x = bx0; x < bx0 + fw && ok; ++x) {
        if (!w.map.buildable(x, y)) ok = false;
      }
    }
    if (ok) return c.pos;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("auto_place: empty plain around a Nexus picks the radius-1 north cell") {
  WorldState w = make_world();
  Unit& nexus = w.spawn("Nexus", 1, {32.5, 32.5});
  auto placed = auto_place(w, nexus.tag, 2, 2, false, 1);
  REQUIRE(std::holds_alternative<Vec2>(placed));
  Vec2 pos = std::get<Vec2>(placed);
  // Nexus footprint rows 30..34; radius-1 ring row is 29, centre column 32.
  CHECK(pos == Vec2{32.5, 29.5});
}

TEST_CASE("auto_place: obstructed rings defer to the first free radius-3 cell") {
  WorldState w = make_world();
  Unit& pylon = w.spawn("Pylon", 1, {32.5, 32.5});
  // Wall off rings 1 and 2 around the pylon's 2x2 footprint.
  for (int y = 29; y <= 36; ++y) {
    for (int x = 29; x <= 36; ++x) {
      if (w.map.cell(x, y) == 0) w.map.cell(x, y) = 1;
    }
  }
  auto placed = auto_place(w, pylon.tag, 1, 1, false, 1);
  REQUIRE(std::holds_alternative<Vec2>(placed));
  auto expected = oracle_place(w, pylon, 1, 1);
  REQUIRE(expected.has_value());
  CHECK(std::get<Vec2>(placed) == *expected);
  // And it is indeed on ring 3 (row 28 directly north-ish).
  CHECK(std::get<Vec2>(placed).y == doctest::Approx(28.5));
}

TEST_CASE("auto_place matches the brute-force oracle on random obstructions") {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> cell(20, 44);
  std::uniform_int_distribution<int> blocks(0, 60);
  for (int round = 0; round < 40; ++round) {
    WorldState w = make_world(round);
    Unit& anchor = w.spawn("Nexus", 1, {32.5, 32.5});
    int n = blocks(rng);
    for (int i = 0; i < n; ++i) w.map.cell(cell(rng), cell(rng)) += 1;
    auto placed = auto_place(w, anchor.tag, 3, 3, false, 1);
    auto expected = oracle_place(w, anchor, 3, 3);
    if (expected.has_value()) {
      REQUIRE(std::holds_alternative<Vec2>(placed));
      CHECK(std::get<Vec2>(placed) == *expected);
    } else {
      CHECK(std::holds_alternative<ActionError>(placed));
    }
  }
}

TEST_CASE("auto_place: dead anchor tag is invalid-target") {
  WorldState w = make_world();
  auto placed = auto_place(w, 12345, 2, 2, false, 1);
  REQUIRE(std::holds_alternative<ActionError>(placed));
  CHECK(std::get<ActionError>(placed).category == ActionError::Category::InvalidTarget);
}

TEST_CASE("valid_actions respects teams, modes and research gates") {
  WorldState w = make_world();
  AgentContext ctx;
  ctx.agent_name = "CombatGroup1";
  ctx.player = 1;
  ctx.action_sets = {"control", "skill", "comm"};

  Unit& stalker = w.spawn("Stalker", 1, {30, 30});
  ctx.team_units = {stalker.tag};

  auto sigs = [&] {
    std::vector<std::string> names;
    for (const ActionSignature& a : valid_actions(test::registry(), ctx, w)) {
      names.push_back(a.signature.substr(1, a.signature.find('(') - 1));
    }
    return names;
  };

  auto has = [&](const std::vector<std::string>& names, const std::string& name) {
    return std::find(names.begin(), names.end(), name) != names.end();
  };

  // Before Blink research the skill is gated out.
  auto names = sigs();
  CHECK(has(names, "Move_Screen"));
  CHECK(has(names, "Attack_Unit"));
  CHECK_FALSE(has(names, "Ability_Blink_Screen"));
  CHECK_FALSE(has(names, "Ability_PsiStorm_Screen"));  // no templar in team

  w.players[1].tech.insert("Blink");
  names = sigs();
  CHECK(has(names, "Ability_Blink_Screen"));

  // Empty team: only No_Operation and communication remain.
  ctx.team_units.clear();
  w.remove_unit(stalker.tag);
  names = sigs();
  REQUIRE(names.size() == 2);
  CHECK(has(names, "No_Operation"));
  CHECK(has(names, "MessageTo"));
}

TEST_CASE("valid_actions: easy-build Developer sees parameterless builds") {
  WorldState w = make_world();
  AgentContext ctx;
  ctx.agent_name = "Developer";
  ctx.player = 1;
  ctx.action_sets = {"train", "research", "warp", "easy_build", "comm"};
  ctx.easy_build = true;
  w.spawn("Probe", 1, {20, 20});
  Unit& nexus = w.spawn("Nexus", 1, {24.5, 24.5});
  ctx.team_units = {nexus.tag};

  bool found = false;
  for (const ActionSignature& a : valid_actions(test::registry(), ctx, w)) {
    if (a.signature == "<Build_Pylon()>") found = true;
  }
  CHECK(found);
}

TEST_CASE("transform is deterministic for a fixed world") {
  WorldState w = make_world();
  AgentContext ctx = make_ctx();
  Unit& stalker = w.spawn("Stalker", 1, {30, 30});
  Unit& roach = w.spawn("Roach", 2, {33, 30});
  ctx.team_units = {stalker.tag};
  ctx.selection = {stalker.tag};
  w.cameras[ctx.agent_name] = make_camera({31, 30}, 64, 64);

  TextAction a = parse_one("<Attack_Unit(" + to_hex(roach.tag) + ")>");
  TransformResult t1 = transform(test::registry(), a, ctx, w);
  TransformResult t2 = transform(test::registry(), a, ctx, w);
  REQUIRE(t1.ok());
  REQUIRE(t2.ok());
  REQUIRE(t1.calls.size() == t2.calls.size());
  CHECK(t1.calls[0].screen == t2.calls[0].screen);
  CHECK(t1.calls[0].target_tag == t2.calls[0].target_tag);
}
