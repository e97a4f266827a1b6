#include "textrts/agents.hpp"

#include <algorithm>
#include <stdexcept>

namespace textrts {

GameMode parse_game_mode(const std::string& name) {
  if (name == "ECEB") return GameMode::ECEB;
  if (name == "SCEB") return GameMode::SCEB;
  if (name == "ECSB") return GameMode::ECSB;
  if (name == "micro" || name == "smac" || name.empty()) return GameMode::Micro;
  throw std::runtime_error("unknown game mode: " + name);
}

const char* game_mode_name(GameMode mode) {
  switch (mode) {
    case GameMode::ECEB: return "ECEB";
    case GameMode::SCEB: return "SCEB";
    case GameMode::ECSB: return "ECSB";
    case GameMode::Micro: return "micro";
  }
  return "micro";
}

namespace {

// Fixed unit-type ownership for the CombatGroup agents.
struct GroupSlot {
  const char* type;
  int group;
};
const GroupSlot kGroupMap[] = {
    {"Zealot", 0},      {"Stalker", 1},     {"Immortal", 2},   {"Colossus", 2},
    {"Archon", 2},      {"VoidRay", 3},     {"Carrier", 3},    {"Tempest", 3},
    {"Observer", 4},    {"HighTemplar", 5}, {"Disruptor", 5},  {"Sentry", 6},
    {"Mothership", 6},  {"Adept", 7},       {"AdeptPhase", 7}, {"DarkTemplar", 7},
    {"Oracle", 8},      {"Phoenix", 8},     {"WarpPrism", 9},
};

int group_of(const std::string& type) {
  for (const GroupSlot& slot : kGroupMap) {
    if (type == slot.type) return slot.group;
  }
  return -1;
}

AgentProfile make_commander(bool easy_control) {
  AgentProfile a;
  a.name = "Commander";
  a.role = "macro-combat";
  a.action_sets = {"comm"};
  if (easy_control) {
    a.action_sets.insert("easy_control");
    a.easy_control = true;
    a.teams.push_back({"Protoss-Units", "@mobile", 200});
  }
  return a;
}

AgentProfile make_developer(bool easy_build) {
  AgentProfile a;
  a.name = "Developer";
  a.role = "macro-economy";
  a.action_sets = {"train", "research", "warp", "comm"};
  a.teams.push_back({"Protoss-Buildings", "@structures", 200});
  if (easy_build) {
    a.action_sets.insert("easy_build");
    a.easy_build = true;
  }
  return a;
}

AgentProfile make_builder() {
  AgentProfile a;
  a.name = "Builder";
  a.role = "micro-build";
  a.action_sets = {"build", "control", "comm"};
  a.teams.push_back({"Builder-Probe-1", "Probe", 1});
  return a;
}

AgentProfile make_combat_group(int index) {
  AgentProfile a;
  a.name = "CombatGroup" + std::to_string(index);
  a.role = "micro-combat";
  a.action_sets = {"control", "skill", "comm"};
  for (const GroupSlot& slot : kGroupMap) {
    if (slot.group == index) {
      a.teams.push_back({std::string(slot.type) + "-1", slot.type, 12});
    }
  }
  return a;
}

std::vector<AgentProfile> derive_micro_roster(const ScenarioConfig& scenario) {
  std::vector<AgentProfile> roster;
  std::set<int> groups;
  bool production = false;
  for (const PlayerSetup& p : scenario.players) {
    if (p.id != scenario.tasked_player) continue;
    for (const SpawnGroup& g : p.units) {
      int group = group_of(g.type);
      if (group >= 0) groups.insert(group);
      if (g.type == "WarpGate" || g.type == "Gateway" || g.type == "Nexus" ||
          g.type == "Stargate" || g.type == "RoboticsFacility") {
        production = true;
      }
      if (g.type == "Adept") groups.insert(7);
    }
  }
  for (int g : groups) roster.push_back(make_combat_group(g));
  if (production) roster.push_back(make_developer(/*easy_build=*/false));
  if (roster.empty()) {
    throw std::runtime_error("scenario " + scenario.id + " has no controllable units");
  }
  return roster;
}

}  // namespace

std::vector<AgentProfile> build_roster(GameMode mode, const ScenarioConfig& scenario) {
  // Explicit rosters (the SMAC-style single-agent setups) win.
  if (!scenario.roster.empty()) {
    std::vector<AgentProfile> roster;
    for (const AgentSpec& spec : scenario.roster) {
      AgentProfile a;
      a.name = spec.name;
      a.role = "micro-combat";
      a.action_sets = {"control", "skill", "comm"};
      for (const TeamSpec& t : spec.teams) {
        a.teams.push_back({t.name, t.unit_type, t.capacity});
      }
      roster.push_back(std::move(a));
    }
    return roster;
  }

  switch (mode) {
    case GameMode::ECEB:
      return {make_commander(true), make_developer(true)};
    case GameMode::SCEB: {
      std::vector<AgentProfile> roster = {make_commander(false), make_developer(true)};
      for (int g = 0; g <= 9; ++g) roster.push_back(make_combat_group(g));
      return roster;
    }
    case GameMode::ECSB:
      return {make_commander(true), make_developer(false), make_builder()};
    case GameMode::Micro:
      return derive_micro_roster(scenario);
  }
  throw std::runtime_error("unknown mode");
}

std::vector<UnitTag> AgentRuntime::all_members() const {
  std::vector<UnitTag> out;
  for (const TeamCache& t : teams) {
    out.insert(out.end(), t.members.begin(), t.members.end());
  }
  return out;
}

AgentRuntime* RosterRuntime::find(const std::string& name) {
  for (AgentRuntime& a : agents) {
    if (a.profile.name == name) return &a;
  }
  return nullptr;
}

void RosterRuntime::assign_unit(const WorldState& world, UnitTag tag) {
  const Unit* u = world.find_unit(tag);
  if (!u || u->owner != player) return;
  const UnitStats& s = world.stats_of(*u);
  for (AgentRuntime& agent : agents) {
    for (TeamCache& team : agent.teams) {
      bool matches = team.def.unit_type == u->type ||
                     (team.def.unit_type == "@mobile" && !s.is_structure) ||
                     (team.def.unit_type == "@structures" && s.is_structure);
      if (!matches) continue;
      if (static_cast<int>(team.members.size()) >= team.def.capacity) continue;
      team.members.push_back(tag);
      return;
    }
  }
  // Overflow forms a numbered sibling team on the first agent of that type.
  for (AgentRuntime& agent : agents) {
    for (std::size_t i = 0; i < agent.teams.size(); ++i) {
      if (agent.teams[i].def.unit_type != u->type) continue;
      TeamDef def = agent.teams[i].def;
      int sibling = 1;
      for (const TeamCache& t : agent.teams) {
        if (t.def.unit_type == u->type) ++sibling;
      }
      std::string base = def.name.substr(0, def.name.find_last_of('-'));
      def.name = base + "-" + std::to_string(sibling);
      agent.teams.push_back({def, {tag}});
      return;
    }
  }
  unassigned.push_back(tag);
  warnings.push_back("unit " + std::to_string(tag) + " (" + u->type +
                     ") matches no team; left unassigned");
}

void RosterRuntime::drop_unit(UnitTag tag) {
  for (AgentRuntime& agent : agents) {
    for (TeamCache& team : agent.teams) {
      std::erase(team.members, tag);
    }
  }
  std::erase(unassigned, tag);
}

void RosterRuntime::assign_existing(const WorldState& world) {
  for (const auto& [tag, u] : world.units) {
    if (u.owner == player) assign_unit(world, tag);
  }
}

void RosterRuntime::sync(const WorldState& world, const std::vector<GameEvent>& recent) {
  for (const GameEvent& ev : recent) {
    if (ev.kind == GameEvent::Kind::UnitKilled) {
      drop_unit(ev.subject);
    } else if (ev.kind == GameEvent::Kind::UnitCreated) {
      // Completion events re-announce known tags; skip those.
      bool known = false;
      for (AgentRuntime& agent : agents) {
        for (TeamCache& team : agent.teams) {
          if (std::find(team.members.begin(), team.members.end(), ev.subject) !=
              team.members.end()) {
            known = true;
          }
        }
      }
      if (!known &&
          std::find(unassigned.begin(), unassigned.end(), ev.subject) == unassigned.end()) {
        assign_unit(world, ev.subject);
      }
    }
  }
  // Dead tags can also disappear without an event reaching us (cargo chains);
  // drop anything no longer in the world.
  for (AgentRuntime& agent : agents) {
    for (TeamCache& team : agent.teams) {
      std::erase_if(team.members, [&](UnitTag t) {
        const Unit* u = world.find_unit(t);
        return !u || !u->alive();
      });
    }
  }
  std::erase_if(unassigned, [&](UnitTag t) {
    const Unit* u = world.find_unit(t);
    return !u || !u->alive();
  });
}

bool RosterRuntime::partition_holds(const WorldState& world) const {
  std::map<UnitTag, int> seen;
  for (const AgentRuntime& agent : agents) {
    for (const TeamCache& team : agent.teams) {
      for (UnitTag t : team.members) seen[t] += 1;
    }
  }
  for (UnitTag t : unassigned) seen[t] += 1;
  for (const auto& [tag, count] : seen) {
    if (count != 1) return false;
    const Unit* u = world.find_unit(tag);
    if (!u || !u->alive() || u->owner != player) return false;
  }
  for (const auto& [tag, u] : world.units) {
    if (u.owner == player && u.alive() && !seen.count(tag)) return false;
  }
  return true;
}

MessageRouter::MessageRouter(std::vector<std::string> members) : members_(std::move(members)) {
  for (const std::string& m : members_) inboxes_[m];
}

std::optional<std::string> MessageRouter::send(int step, const std::string& from,
                                               const std::string& to,
                                               const std::string& content) {
  bool channel = to == kChannel;
  if (!channel && std::find(members_.begin(), members_.end(), to) == members_.end()) {
    return "unknown recipient '" + to + "'";
  }
  std::lock_guard<std::mutex> lock(mutex_);
  pending_.push_back({Message{step, from, to, content}, seq_++});
  return std::nullopt;
}

void MessageRouter::deliver_round() {
  std::lock_guard<std::mutex> lock(mutex_);
  std::stable_sort(pending_.begin(), pending_.end(), [](const Pending& a, const Pending& b) {
    if (a.msg.step != b.msg.step) return a.msg.step < b.msg.step;
    if (a.msg.from != b.msg.from) return a.msg.from < b.msg.from;
    return a.seq < b.seq;
  });
  for (const Pending& p : pending_) {
    if (p.msg.to == kChannel) {
      for (const std::string& m : members_) {
        if (m != p.msg.from) inboxes_[m].push_back(p.msg);
      }
    } else {
      inboxes_[p.msg.to].push_back(p.msg);
    }
  }
  pending_.clear();
}

std::vector<Message> MessageRouter::take_inbox(const std::string& agent) {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<Message> out;
  auto it = inboxes_.find(agent);
  if (it != inboxes_.end()) out.swap(it->second);
  return out;
}

}  // namespace textrts
