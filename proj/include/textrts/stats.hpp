#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace textrts {

struct WeaponStats {
  double damage = 0;
  double range = 0;
  double cooldown_s = 0;  // multiples of the 0.1 s tick
  bool hits_ground = true;
  bool hits_air = false;
  double splash_radius = 0;
  bool suicide = false;  // attacker dies on attack (banelings)
};

struct UnitStats {
  std::string name;
  std::string race;  // "Protoss" | "Zerg"
  int minerals = 0;
  int vespene = 0;
  double supply_cost = 0;
  double supply_provided = 0;
  double health = 0;
  double shield = 0;
  double armor = 0;
  double energy_max = 0;
  double energy_start = 0;
  std::optional<WeaponStats> weapon;
  double speed = 0;  // map units per second
  double sight = 9;
  bool is_structure = false;
  bool is_worker = false;
  bool is_flying = false;
  bool targetable = true;   // e.g. phase images are not
  bool requires_power = false;
  int footprint_w = 0;  // structures only, in map cells
  int footprint_h = 0;
  double build_time_s = 0;
  double power_radius = 0;     // pylons / phasing prisms
  int cargo_capacity = 0;      // transports
  std::vector<std::string> trains;      // unit names this structure produces
  std::vector<std::string> researches;  // tech names this structure provides

  int value() const { return minerals + vespene; }
  bool has_weapon() const { return weapon.has_value(); }
};

struct SkillStats {
  std::string name;
  double energy_cost = 0;
  double cooldown_s = 0;
  double radius = 0;
  double duration_s = 0;
  double range = 0;
  double damage_total = 0;
  std::string requires_tech;           // empty = none
  std::map<std::string, double> params;
};

struct TechStats {
  std::string name;
  int minerals = 0;
  int vespene = 0;
  double research_time_s = 0;
  std::string building;  // structure type that researches it
};

struct StatsDb {
  std::map<std::string, UnitStats> units;
  std::map<std::string, SkillStats> skills;
  std::map<std::string, TechStats> techs;
  double mineral_rate_per_worker = 0.8;   // minerals/s
  double vespene_rate_per_assimilator = 1.0;
  double shield_regen_delay_s = 7.0;
  double shield_regen_rate = 2.0;  // per second
  double energy_regen_rate = 0.5625;
  double supply_cap_max = 200;

  bool has_unit(const std::string& type) const { return units.count(type) != 0; }
  const UnitStats& unit(const std::string& type) const;    // throws on unknown
  const SkillStats& skill(const std::string& name) const;  // throws on unknown
  const TechStats& tech(const std::string& name) const;    // throws on unknown
  int unit_value(const std::string& type) const { return unit(type).value(); }
};

StatsDb load_stats(const std::string& path);

// TEXTRTS_DATA env var, else the compiled-in source data directory.
std::string default_data_dir();

}  // namespace textrts
