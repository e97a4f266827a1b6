#pragma once

#include <string>

#include "textrts/bridge.hpp"
#include "textrts/observation.hpp"
#include "textrts/scenarios.hpp"
#include "textrts/sim.hpp"
#include "textrts/stats.hpp"

namespace textrts::test {

inline const std::string& data_dir() {
  static std::string dir = default_data_dir();
  return dir;
}

inline const StatsDb& stats() {
  static StatsDb db = load_stats(data_dir() + "/unit_stats.json");
  return db;
}

inline const Registry& registry() {
  static Registry reg = Registry::load(data_dir() + "/actions_protoss.json");
  return reg;
}

inline const WikiDb& wiki() {
  static WikiDb db = WikiDb::load(data_dir() + "/wiki.json");
  return db;
}

inline const ObservationTemplates& templates() {
  static ObservationTemplates t =
      ObservationTemplates::load(data_dir() + "/templates/observation.json");
  return t;
}

inline const PromptDb& prompts() {
  static PromptDb db = PromptDb::load(data_dir());
  return db;
}

// Bare 64x64 world bound to the shared stats db.
inline WorldState make_world(std::uint64_t seed = 1) {
  WorldState w;
  w.stats = &stats();
  w.map.resize(64, 64);
  w.rng.seed(seed);
  w.players[1].spawn_center = {16, 48};
  w.players[2].spawn_center = {48, 16};
  return w;
}

inline AgentContext make_ctx(const std::string& name = "CombatGroup1", PlayerId player = 1) {
  AgentContext ctx;
  ctx.agent_name = name;
  ctx.player = player;
  ctx.action_sets = {"control", "skill", "build", "train", "research", "warp",
                     "easy_build", "easy_control", "comm"};
  ctx.easy_build = true;
  ctx.easy_control = true;
  return ctx;
}

inline ScenarioConfig scenario(const std::string& id) {
  return load_scenario_by_id(data_dir(), id, stats());
}

}  // namespace textrts::test
