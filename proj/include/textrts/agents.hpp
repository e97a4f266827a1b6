#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "textrts/scenarios.hpp"
#include "textrts/sim.hpp"

namespace textrts {

enum class GameMode { ECEB, SCEB, ECSB, Micro };
GameMode parse_game_mode(const std::string& name);  // throws on unknown mode
const char* game_mode_name(GameMode mode);

struct TeamDef {
  std::string name;
  // Concrete unit type, or "@mobile" (every non-structure) / "@structures".
  std::string unit_type;
  int capacity = 12;
};

struct AgentProfile {
  std::string name;
  std::string role;  // macro-combat | macro-economy | micro-combat | micro-build
  std::vector<TeamDef> teams;
  std::set<std::string> action_sets;
  bool easy_build = false;
  bool easy_control = false;
  bool wants_grids = false;
  std::string client_id;  // key into the client bindings; defaults to the agent name
};

// Roster per game mode. Micro/SMAC scenarios honor an explicit roster in the
// config; otherwise agents are derived from the tasked player's unit types
// using the fixed type -> CombatGroup assignment.
std::vector<AgentProfile> build_roster(GameMode mode, const ScenarioConfig& scenario);

struct TeamCache {
  TeamDef def;
  std::vector<UnitTag> members;
};

struct AgentRuntime {
  AgentProfile profile;
  std::vector<TeamCache> teams;

  std::vector<UnitTag> all_members() const;
};

// Per-player bookkeeping of which agent controls which unit. Sync is
// event-driven (created tags assigned, dead tags dropped); team caches plus
// the unassigned pool always partition the player's living units.
struct RosterRuntime {
  PlayerId player = 1;
  std::vector<AgentRuntime> agents;
  std::vector<UnitTag> unassigned;
  std::vector<std::string> warnings;

  AgentRuntime* find(const std::string& name);
  void assign_existing(const WorldState& world);
  void sync(const WorldState& world, const std::vector<GameEvent>& recent);
  // Recompute-from-scratch oracle used by tests and the partition check.
  bool partition_holds(const WorldState& world) const;

 private:
  void assign_unit(const WorldState& world, UnitTag tag);
  void drop_unit(UnitTag tag);
};

struct Message {
  int step = 0;
  std::string from;
  std::string to;  // agent name or "Channel"
  std::string content;
};

// Same-player message fabric: direct messages and a broadcast channel.
// Sends may arrive concurrently within a step; delivery happens once per
// step in (step, sender, send-order) order, into next-step inboxes.
class MessageRouter {
 public:
  explicit MessageRouter(std::vector<std::string> members);

  // Returns an error notice on unknown recipients (surfaces in block 9).
  std::optional<std::string> send(int step, const std::string& from, const std::string& to,
                                  const std::string& content);
  void deliver_round();
  std::vector<Message> take_inbox(const std::string& agent);

  static constexpr const char* kChannel = "Channel";

 private:
  struct Pending {
    Message msg;
    int seq = 0;
  };
  std::vector<std::string> members_;
  std::mutex mutex_;
  std::vector<Pending> pending_;
  std::map<std::string, std::vector<Message>> inboxes_;
  int seq_ = 0;
};

}  // namespace textrts
