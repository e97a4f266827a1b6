#pragma once

#include <string>
#include <vector>

#include "textrts/metrics.hpp"
#include "textrts/sim.hpp"

namespace textrts {

struct SpawnGroup {
  std::string type;
  int count = 1;
  Vec2 region;
};

struct PlayerSetup {
  PlayerId id = 1;
  double minerals = 0;
  double vespene = 0;
  Vec2 spawn;
  std::vector<std::string> upgrades;
  std::vector<SpawnGroup> units;
};

struct VictorySpec {
  // kill_workers | defend_workers | eliminate_enemy_combat |
  // eliminate_and_kill_workers | eliminate_structures
  std::string kind = "eliminate_enemy_combat";
  int count = 0;
  std::string text() const;
};

struct TeamSpec {
  std::string name;
  std::string unit_type;
  int capacity = 12;
};

struct AgentSpec {  // explicit roster override (the SMAC-style one-agent setups)
  std::string name;
  std::vector<TeamSpec> teams;
};

struct ScenarioConfig {
  std::string id;
  std::string name;
  std::string description;
  int map_w = 64, map_h = 64;
  std::string mode = "micro";  // "micro" | "smac" | "full"
  std::string game_mode;       // full games: "ECEB" | "SCEB" | "ECSB"
  int difficulty = 1;
  double max_time_s = 60;
  PlayerId tasked_player = 1;
  VictorySpec victory;
  std::vector<PlayerSetup> players;
  std::vector<AirdropWave> airdrops;
  std::vector<AgentSpec> roster;  // empty = derive from mode and spawns
  bool base_resources = false;    // add mineral lines / geysers per base

  int max_ticks(double tick_s = 0.1) const {
    return static_cast<int>(max_time_s / tick_s + 0.5);
  }
};

// Validates the config against the stats db, including the victory-condition
// reference rule. Throws std::runtime_error naming the problem.
ScenarioConfig load_scenario_config(const std::string& path, const StatsDb& stats);
std::vector<std::string> list_scenarios(const std::string& data_dir);
ScenarioConfig load_scenario_by_id(const std::string& data_dir, const std::string& id,
                                   const StatsDb& stats);

// Deterministic world construction: formation spawns, base resources, airdrop
// schedule, opponent difficulty. Identical (config, seed) gives an identical
// state hash. Throws when structure spawns cannot be placed.
WorldState load_scenario(const ScenarioConfig& config, const StatsDb& stats,
                         std::uint64_t seed);

// Evaluates the scenario's victory condition for the tasked player. Timeout
// resolution (lose) is applied here when the clock has run out.
Outcome check_victory(const ScenarioConfig& config, const WorldState& world);

}  // namespace textrts
