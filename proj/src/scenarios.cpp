#include "textrts/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace textrts {

using nlohmann::json;
namespace fs = std::filesystem;

std::string VictorySpec::text() const {
  if (kind == "kill_workers") {
    return "kill at least " + std::to_string(count) + " enemy workers before time runs out";
  }
  if (kind == "defend_workers") {
    return "defend all airdrops and keep at least " + std::to_string(count) +
           " workers alive";
  }
  if (kind == "eliminate_enemy_combat") return "defeat all enemy combat units";
  if (kind == "eliminate_and_kill_workers") {
    return "defeat all enemy combat units and kill at least " + std::to_string(count) +
           " enemy workers";
  }
  if (kind == "eliminate_structures") return "destroy all enemy structures";
  return kind;
}

namespace {

Vec2 parse_vec(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

void validate(const ScenarioConfig& c, const StatsDb& stats, const std::string& path) {
  auto bad = [&](const std::string& why) {
    throw std::runtime_error("scenario " + path + ": " + why);
  };
  if (c.players.size() != 2) bad("exactly two players required");
  static const std::set<std::string> kinds = {
      "kill_workers", "defend_workers", "eliminate_enemy_combat",
      "eliminate_and_kill_workers", "eliminate_structures"};
  if (!kinds.count(c.victory.kind)) bad("unknown victory kind " + c.victory.kind);

  bool enemy_has_workers = false;
  bool own_has_workers = false;
  bool enemy_has_structures = false;
  for (const PlayerSetup& p : c.players) {
    for (const SpawnGroup& g : p.units) {
      if (!stats.has_unit(g.type)) bad("unknown unit type " + g.type);
      if (g.count <= 0) bad("non-positive count for " + g.type);
      const UnitStats& s = stats.unit(g.type);
      if (p.id != c.tasked_player && s.is_worker) enemy_has_workers = true;
      if (p.id == c.tasked_player && s.is_worker) own_has_workers = true;
      if (p.id != c.tasked_player && s.is_structure) enemy_has_structures = true;
    }
    for (const std::string& up : p.upgrades) {
      if (!stats.techs.count(up)) bad("unknown upgrade " + up);
    }
  }
  for (const AirdropWave& wave : c.airdrops) {
    for (const std::string& t : wave.cargo_per_transport) {
      if (!stats.has_unit(t)) bad("unknown airdrop cargo type " + t);
    }
    if (!stats.has_unit("OverlordTransport")) {
      bad("airdrops require OverlordTransport stats");
    }
  }
  // The victory condition may only reference unit kinds that exist in the
  // scenario (or can appear through airdrops/production).
  if ((c.victory.kind == "kill_workers" || c.victory.kind == "eliminate_and_kill_workers") &&
      !enemy_has_workers) {
    bad("victory condition counts enemy workers but the enemy spawns none");
  }
  if (c.victory.kind == "defend_workers" && !own_has_workers) {
    bad("victory condition protects own workers but none spawn");
  }
  if (c.victory.kind == "eliminate_structures" && !enemy_has_structures) {
    bad("victory condition destroys enemy structures but none spawn");
  }
}

}  // namespace

ScenarioConfig load_scenario_config(const std::string& path, const StatsDb& stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario: " + path);
  json j = json::parse(in);

  ScenarioConfig c;
  c.id = j.at("id").get<std::string>();
  c.name = j.value("name", c.id);
  c.description = j.value("description", "");
  c.map_w = j.at("map").at("width").get<int>();
  c.map_h = j.at("map").at("height").get<int>();
  c.mode = j.value("mode", "micro");
  c.game_mode = j.value("game_mode", "");
  c.difficulty = j.value("difficulty", 1);
  c.max_time_s = j.at("max_time_s").get<double>();
  c.tasked_player = j.value("tasked_player", 1);
  c.victory.kind = j.at("victory").at("kind").get<std::string>();
  c.victory.count = j.at("victory").value("count", 0);
  c.base_resources = j.value("base_resources", false);

  for (const auto& pj : j.at("players")) {
    PlayerSetup p;
    p.id = pj.at("id").get<int>();
    p.minerals = pj.value("minerals", 0.0);
    p.vespene = pj.value("vespene", 0.0);
    p.spawn = parse_vec(pj.at("spawn"));
    if (pj.contains("upgrades")) {
      p.upgrades = pj.at("upgrades").get<std::vector<std::string>>();
    }
    if (pj.contains("units")) {
      for (const auto& uj : pj.at("units")) {
        SpawnGroup g;
        g.type = uj.at("type").get<std::string>();
        g.count = uj.value("count", 1);
        g.region = uj.contains("region") ? parse_vec(uj.at("region")) : p.spawn;
        p.units.push_back(g);
      }
    }
    c.players.push_back(std::move(p));
  }
  if (j.contains("airdrops")) {
    for (const auto& aj : j.at("airdrops")) {
      AirdropWave w;
      w.at_s = aj.at("at_s").get<double>();
      w.entry = parse_vec(aj.at("entry"));
      w.drop_at = parse_vec(aj.at("drop_at"));
      w.transports = aj.value("transports", 2);
      w.cargo_per_transport = aj.at("cargo").get<std::vector<std::string>>();
      c.airdrops.push_back(std::move(w));
    }
  }
  if (j.contains("roster")) {
    for (const auto& rj : j.at("roster")) {
      AgentSpec a;
      a.name = rj.at("agent").get<std::string>();
      for (const auto& tj : rj.at("teams")) {
        TeamSpec t;
        t.name = tj.at("name").get<std::string>();
        t.unit_type = tj.at("type").get<std::string>();
        t.capacity = tj.value("capacity", 12);
        a.teams.push_back(t);
      }
      c.roster.push_back(std::move(a));
    }
  }
  validate(c, stats, path);
  return c;
}

std::vector<std::string> list_scenarios(const std::string& data_dir) {
  std::vector<std::string> ids;
  fs::path dir = fs::path(data_dir) / "scenarios";
  if (!fs::exists(dir)) return ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") {
      ids.push_back(entry.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

ScenarioConfig load_scenario_by_id(const std::string& data_dir, const std::string& id,
                                   const StatsDb& stats) {
  fs::path path = fs::path(data_dir) / "scenarios" / (id + ".json");
  if (!fs::exists(path)) {
    std::string known;
    for (const auto& s : list_scenarios(data_dir)) known += "\n  " + s;
    throw std::runtime_error("unknown scenario id '" + id + "'; valid ids:" + known);
  }
  return load_scenario_config(path.string(), stats);
}

namespace {

// Structures get exact slots; mobile units stand in a grid formation.
void spawn_group(WorldState& w, const PlayerSetup& p, const SpawnGroup& g,
                 const StatsDb& stats) {
  const UnitStats& s = stats.unit(g.type);
  if (s.is_structure) {
    Vec2 at = g.region;
    for (int i = 0; i < g.count; ++i) {
      Vec2 pos = at + Vec2{i * (s.footprint_w + 1.0), 0};
      if (!w.footprint_free(g.type, pos)) {
        // Slide south row by row until the footprint fits.
        bool placed = false;
        for (int dy = 1; dy <= 12 && !placed; ++dy) {
          for (int dx = -12; dx <= 12 && !placed; ++dx) {
            Vec2 cand = pos + Vec2{static_cast<double>(dx), static_cast<double>(dy)};
            if (w.footprint_free(g.type, cand)) {
              pos = cand;
              placed = true;
            }
          }
        }
        if (!placed) {
          throw std::runtime_error("cannot place spawn " + g.type + " for player " +
                                   std::to_string(p.id));
        }
      }
      Unit& u = w.spawn(g.type, p.id, pos);
      if (g.type == "StasisTrap") u.trap_armed_at_s = 0;
    }
    return;
  }
  int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(g.count))));
  int rows = (g.count + cols - 1) / cols;
  double spacing = 1.4;
  for (int i = 0; i < g.count; ++i) {
    double dx = (i % cols - (cols - 1) / 2.0) * spacing;
    double dy = (i / cols - (rows - 1) / 2.0) * spacing;
    Vec2 pos = g.region + Vec2{dx, dy};
    pos.x = std::clamp(pos.x, 1.0, w.map.width - 1.0);
    pos.y = std::clamp(pos.y, 1.0, w.map.height - 1.0);
    w.spawn(g.type, p.id, pos);
  }
}

void add_base_resources(WorldState& w, Vec2 base) {
  // Eight mineral patches in an arc north of the base, two geysers east/west.
  for (int i = 0; i < 8; ++i) {
    double angle = (i - 3.5) * 0.22;
    Vec2 at = base + Vec2{std::sin(angle) * 7.5, -std::cos(angle) * 7.5};
    w.minerals.push_back({at});
    int cx = static_cast<int>(at.x), cy = static_cast<int>(at.y);
    if (w.map.in_bounds(cx, cy)) w.map.cell(cx, cy) += 1;
  }
  for (double side : {-8.5, 8.5}) {
    Vec2 at = base + Vec2{side, 2.0};
    w.geysers.push_back({at, 0});
  }
}

}  // namespace

WorldState load_scenario(const ScenarioConfig& config, const StatsDb& stats,
                         std::uint64_t seed) {
  WorldState w;
  w.stats = &stats;
  w.map.resize(config.map_w, config.map_h);
  w.rng.seed(seed);
  w.tasked_player = config.tasked_player;
  w.opponent.player = config.tasked_player == 1 ? 2 : 1;
  w.opponent.level = config.difficulty;

  for (const PlayerSetup& p : config.players) {
    w.players[p.id].minerals = p.minerals;
    w.players[p.id].vespene = p.vespene;
    w.players[p.id].spawn_center = p.spawn;
    for (const std::string& up : p.upgrades) w.players[p.id].tech.insert(up);
    if (config.base_resources) add_base_resources(w, p.spawn);
  }
  for (const PlayerSetup& p : config.players) {
    for (const SpawnGroup& g : p.units) spawn_group(w, p, g, stats);
  }
  w.pending_airdrops = config.airdrops;
  w.recompute_supply();
  return w;
}

namespace {

struct Tally {
  int own_workers = 0;
  int enemy_mobile = 0;  // non-worker, non-structure enemy units
  int enemy_structures = 0;
  int own_structures = 0;
  int own_units = 0;
};

Tally tally(const ScenarioConfig& config, const WorldState& w) {
  Tally t;
  for (const auto& [tag, u] : w.units) {
    const UnitStats& s = w.stats_of(u);
    if (u.owner == config.tasked_player) {
      ++t.own_units;
      if (s.is_worker) ++t.own_workers;
      if (s.is_structure) ++t.own_structures;
    } else {
      if (s.is_structure) {
        ++t.enemy_structures;
      } else if (!s.is_worker) {
        ++t.enemy_mobile;
      }
    }
  }
  return t;
}

}  // namespace

Outcome check_victory(const ScenarioConfig& config, const WorldState& world) {
  const PlayerState& me = world.players[config.tasked_player];
  Tally t = tally(config, world);
  bool timeout = world.clock_ticks >= config.max_ticks(world.tick_s);

  const std::string& kind = config.victory.kind;
  if (kind == "kill_workers") {
    if (me.enemy_workers_killed >= config.victory.count) return Outcome::Win;
  } else if (kind == "defend_workers") {
    bool waves_done = world.pending_airdrops.empty();
    if (waves_done && t.enemy_mobile == 0) {
      return t.own_workers >= config.victory.count ? Outcome::Win : Outcome::Lose;
    }
  } else if (kind == "eliminate_enemy_combat") {
    if (t.enemy_mobile == 0) return Outcome::Win;
  } else if (kind == "eliminate_and_kill_workers") {
    if (t.enemy_mobile == 0 && me.enemy_workers_killed >= config.victory.count) {
      return Outcome::Win;
    }
  } else if (kind == "eliminate_structures") {
    bool enemy_gone = t.enemy_structures == 0;
    bool own_gone = t.own_structures == 0;
    if (enemy_gone && own_gone) return Outcome::Draw;
    if (enemy_gone) return Outcome::Win;
    if (own_gone) return Outcome::Lose;
  }

  // Losing the whole force ends micro tasks early.
  if (config.mode != "full" && t.own_units == 0) return Outcome::Lose;
  if (timeout) return Outcome::Lose;
  return Outcome::Ongoing;
}

}  // namespace textrts
