#include "textrts/stats.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace textrts {

using nlohmann::json;

namespace {

WeaponStats parse_weapon(const json& j) {
  WeaponStats w;
  w.damage = j.at("damage").get<double>();
  w.range = j.at("range").get<double>();
  w.cooldown_s = j.at("cooldown").get<double>();
  w.hits_ground = j.value("hits_ground", true);
  w.hits_air = j.value("hits_air", false);
  w.splash_radius = j.value("splash_radius", 0.0);
  w.suicide = j.value("suicide", false);
  return w;
}

UnitStats parse_unit(const std::string& name, const json& j) {
  UnitStats u;
  u.name = name;
  u.race = j.value("race", "Protoss");
  u.minerals = j.value("minerals", 0);
  u.vespene = j.value("vespene", 0);
  u.supply_cost = j.value("supply", 0.0);
  u.supply_provided = j.value("supply_provided", 0.0);
  u.health = j.at("health").get<double>();
  u.shield = j.value("shield", 0.0);
  u.armor = j.value("armor", 0.0);
  u.energy_max = j.value("energy_max", 0.0);
  u.energy_start = j.value("energy_start", 0.0);
  if (j.contains("weapon")) u.weapon = parse_weapon(j.at("weapon"));
  u.speed = j.value("speed", 0.0);
  u.sight = j.value("sight", 9.0);
  u.is_structure = j.value("structure", false);
  u.is_worker = j.value("worker", false);
  u.is_flying = j.value("flying", false);
  u.targetable = j.value("targetable", true);
  u.requires_power = j.value("requires_power", false);
  u.footprint_w = j.value("footprint", 0);
  u.footprint_h = j.value("footprint", 0);
  u.build_time_s = j.value("build_time", 0.0);
  u.power_radius = j.value("power_radius", 0.0);
  u.cargo_capacity = j.value("cargo_capacity", 0);
  if (j.contains("trains")) u.trains = j.at("trains").get<std::vector<std::string>>();
  if (j.contains("researches"))
    u.researches = j.at("researches").get<std::vector<std::string>>();
  return u;
}

}  // namespace

const UnitStats& StatsDb::unit(const std::string& type) const {
  auto it = units.find(type);
  if (it == units.end()) throw std::runtime_error("unknown unit type: " + type);
  return it->second;
}

const SkillStats& StatsDb::skill(const std::string& name) const {
  auto it = skills.find(name);
  if (it == skills.end()) throw std::runtime_error("unknown skill: " + name);
  return it->second;
}

const TechStats& StatsDb::tech(const std::string& name) const {
  auto it = techs.find(name);
  if (it == techs.end()) throw std::runtime_error("unknown tech: " + name);
  return it->second;
}

StatsDb load_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stats file: " + path);
  json j = json::parse(in);

  StatsDb db;
  for (auto& [name, spec] : j.at("units").items()) {
    db.units.emplace(name, parse_unit(name, spec));
  }
  for (auto& [name, spec] : j.at("skills").items()) {
    SkillStats s;
    s.name = name;
    s.energy_cost = spec.value("energy", 0.0);
    s.cooldown_s = spec.value("cooldown", 0.0);
    s.radius = spec.value("radius", 0.0);
    s.duration_s = spec.value("duration", 0.0);
    s.range = spec.value("range", 0.0);
    s.damage_total = spec.value("damage_total", 0.0);
    s.requires_tech = spec.value("requires_tech", "");
    if (spec.contains("params")) {
      for (auto& [k, v] : spec.at("params").items()) s.params[k] = v.get<double>();
    }
    db.skills.emplace(name, std::move(s));
  }
  for (auto& [name, spec] : j.at("techs").items()) {
    TechStats t;
    t.name = name;
    t.minerals = spec.value("minerals", 0);
    t.vespene = spec.value("vespene", 0);
    t.research_time_s = spec.value("research_time", 0.0);
    t.building = spec.at("building").get<std::string>();
    db.techs.emplace(name, std::move(t));
  }
  if (j.contains("economy")) {
    const json& e = j.at("economy");
    db.mineral_rate_per_worker = e.value("mineral_rate_per_worker", db.mineral_rate_per_worker);
    db.vespene_rate_per_assimilator =
        e.value("vespene_rate_per_assimilator", db.vespene_rate_per_assimilator);
    db.shield_regen_delay_s = e.value("shield_regen_delay", db.shield_regen_delay_s);
    db.shield_regen_rate = e.value("shield_regen_rate", db.shield_regen_rate);
    db.energy_regen_rate = e.value("energy_regen_rate", db.energy_regen_rate);
    db.supply_cap_max = e.value("supply_cap_max", db.supply_cap_max);
  }
  return db;
}

std::string default_data_dir() {
  if (const char* env = std::getenv("TEXTRTS_DATA"); env && *env) return env;
#ifdef TEXTRTS_DEFAULT_DATA_DIR
  return TEXTRTS_DEFAULT_DATA_DIR;
#else
  return "data";
#endif
}

}  // namespace textrts
