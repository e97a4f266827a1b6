#include "textrts/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "textrts/util.hpp"

namespace textrts {

const char* ActionError::category_name(Category c) {
  switch (c) {
    case Category::UnknownAction: return "unknown-action";
    case Category::BadArity: return "bad-arity";
    case Category::Unavailable: return "unavailable";
    case Category::InvalidTarget: return "invalid-target";
    case Category::InvalidPosition: return "invalid-position";
    case Category::InsufficientResources: return "insufficient-resources";
    case Category::NoIdleBuilding: return "no-idle-building";
  }
  return "unknown-action";
}

std::string ActionError::text() const {
  std::string out = category_name(category);
  out += ": ";
  out += format_action(action);
  if (!detail.empty()) {
    out += " (" + detail + ")";
  }
  return out;
}

std::string GameEvent::text() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::UnitKilled:
      os << "unit killed: " << type_name << " " << to_hex(subject) << " (player " << owner << ")";
      break;
    case Kind::UnitCreated:
      os << "unit created: " << type_name << " " << to_hex(subject) << " (player " << owner << ")";
      break;
    case Kind::ResearchDone:
      os << "research finished: " << type_name << " (player " << owner << ")";
      break;
    case Kind::DamageDealt:
      os << "damage: " << amount << " to " << type_name << " " << to_hex(subject);
      break;
    case Kind::ActionFailed:
      os << "action failed: " << detail;
      break;
  }
  return os.str();
}

Unit* WorldState::find_unit(UnitTag tag) {
  auto it = units.find(tag);
  return it == units.end() ? nullptr : &it->second;
}

const Unit* WorldState::find_unit(UnitTag tag) const {
  auto it = units.find(tag);
  return it == units.end() ? nullptr : &it->second;
}

Unit& WorldState::spawn(const std::string& type, PlayerId owner, Vec2 pos, bool completed) {
  const UnitStats& s = stats->unit(type);
  Unit u;
  u.tag = next_tag++;
  u.type = type;
  u.owner = owner;
  u.pos = pos;
  u.health = u.health_max = s.health;
  u.shield = u.shield_max = s.shield;
  u.energy = s.energy_start;
  if (!completed) {
    u.under_construction = true;
    u.build_remaining_s = s.build_time_s;
  }
  if (s.is_structure) block_footprint(type, pos, +1);
  auto [it, ok] = units.emplace(u.tag, std::move(u));
  recompute_supply();
  return it->second;
}

void WorldState::remove_unit(UnitTag tag) {
  auto it = units.find(tag);
  if (it == units.end()) return;
  if (stats->unit(it->second.type).is_structure) {
    block_footprint(it->second.type, it->second.pos, -1);
    for (auto& g : geysers) {
      if (g.assimilator == tag) g.assimilator = 0;
    }
  }
  units.erase(it);
}

double WorldState::weapon_cooldown(const Unit& u) const {
  const UnitStats& s = stats_of(u);
  double cd = s.weapon ? s.weapon->cooldown_s : 0;
  if (u.type == "Adept" && players[u.owner].tech.count("AdeptResonatingGlaives")) {
    cd /= 1.45;
  }
  return cd;
}

double WorldState::weapon_range(const Unit& u) const {
  const UnitStats& s = stats_of(u);
  double r = s.weapon ? s.weapon->range : 0;
  if (u.type == "Phoenix" && players[u.owner].tech.count("PhoenixAnionPulseCrystals")) {
    r += 2;
  }
  if (u.type == "Colossus" && players[u.owner].tech.count("ExtendedThermalLance")) {
    r += 2;
  }
  if (u.type == "Oracle") {
    return u.pulsar_beam_on ? stats->skill("PulsarBeamOn").params.at("range") : 0;
  }
  return r;
}

double WorldState::weapon_damage(const Unit& u) const {
  const UnitStats& s = stats_of(u);
  double d = s.weapon ? s.weapon->damage : 0;
  const auto& tech = players[u.owner].tech;
  if (u.type == "Oracle") {
    return u.pulsar_beam_on ? stats->skill("PulsarBeamOn").params.at("damage") : 0;
  }
  if (s.weapon && !s.is_structure) {
    if (!stats_of(u).is_flying && tech.count("ProtossGroundWeapons")) d += 1;
    if (stats_of(u).is_flying && tech.count("ProtossAirWeapons")) d += 1;
  }
  return d;
}

double WorldState::move_speed(const Unit& u) const {
  const UnitStats& s = stats_of(u);
  double v = s.speed;
  if (u.type == "Zealot" && players[u.owner].tech.count("Charge")) v *= 1.2;
  if (u.type == "OverlordTransport" && players[u.owner].tech.count("OverlordSpeed")) v *= 2.2;
  if (u.type == "Observer" && players[u.owner].tech.count("GraviticBooster")) v *= 1.5;
  if (u.type == "WarpPrism" && players[u.owner].tech.count("GraviticDrive")) v *= 1.3;
  if (u.phasing_mode || u.surveillance_mode) v = 0;
  for (const auto& e : effects) {
    if (e.kind == AreaEffect::Kind::TimeWarp && e.owner != u.owner &&
        distance(e.pos, u.pos) <= e.radius) {
      v *= e.slow_factor;
    }
  }
  return v;
}

double WorldState::sight_range(const Unit& u) const {
  double s = stats_of(u).sight;
  return u.surveillance_mode ? s * 1.25 : s;
}

bool WorldState::is_air_like(const Unit& u) const {
  return stats_of(u).is_flying || u.lifted_until_s > clock_s();
}

bool WorldState::can_hit(const Unit& attacker, const Unit& target) const {
  const UnitStats& as = stats_of(attacker);
  if (!as.weapon && attacker.type != "Oracle") return false;
  if (attacker.type == "Oracle" && !attacker.pulsar_beam_on) return false;
  const UnitStats& ts = stats_of(target);
  if (!ts.targetable || target.in_cargo) return false;
  if (target.stasis_until_s > clock_s()) return false;
  bool air = is_air_like(target);
  bool hits_ground = as.weapon ? as.weapon->hits_ground : true;
  bool hits_air = as.weapon ? as.weapon->hits_air : false;
  if (attacker.type == "Oracle") {
    hits_ground = true;
    hits_air = false;
  }
  return air ? hits_air : hits_ground;
}

bool WorldState::is_visible(PlayerId viewer, const Unit& u) const {
  if (u.owner == viewer) return true;
  if (u.in_cargo) return false;
  for (const auto& [tag, v] : units) {
    if (v.owner != viewer || !v.alive() || v.in_cargo) continue;
    if (distance(v.pos, u.pos) <= sight_range(v)) return true;
  }
  for (const auto& e : effects) {
    if (e.kind == AreaEffect::Kind::Revelation && e.owner == viewer &&
        distance(e.pos, u.pos) <= e.radius) {
      return true;
    }
  }
  return false;
}

bool WorldState::position_powered(PlayerId p, Vec2 pos) const {
  for (const auto& [tag, u] : units) {
    if (u.owner != p || !u.alive() || u.under_construction) continue;
    double radius = stats_of(u).power_radius;
    if (u.type == "WarpPrism" && !u.phasing_mode) continue;
    if (radius > 0 && distance(u.pos, pos) <= radius) return true;
  }
  return false;
}

bool WorldState::ground_blocked(Vec2 pos) const {
  int cx = static_cast<int>(std::floor(pos.x));
  int cy = static_cast<int>(std::floor(pos.y));
  if (!map.in_bounds(cx, cy)) return true;
  if (map.cell(cx, cy) != 0) return true;
  for (const auto& e : effects) {
    if (e.kind == AreaEffect::Kind::ForceField && distance(e.pos, pos) <= e.radius) {
      return true;
    }
  }
  return false;
}

namespace {

// Footprint cells of a structure whose center sits at pos.
struct FootprintRect {
  int x0, y0, x1, y1;  // inclusive
};

FootprintRect footprint_rect(const UnitStats& s, Vec2 pos) {
  int w = std::max(1, s.footprint_w);
  int h = std::max(1, s.footprint_h);
  int x0 = static_cast<int>(std::floor(pos.x - w / 2.0 + 0.25));
  int y0 = static_cast<int>(std::floor(pos.y - h / 2.0 + 0.25));
  return {x0, y0, x0 + w - 1, y0 + h - 1};
}

}  // namespace

void WorldState::block_footprint(const std::string& type, Vec2 pos, int delta) {
  FootprintRect r = footprint_rect(stats->unit(type), pos);
  for (int y = r.y0; y <= r.y1; ++y) {
    for (int x = r.x0; x <= r.x1; ++x) {
      if (!map.in_bounds(x, y)) continue;
      int v = map.cell(x, y) + delta;
      map.cell(x, y) = static_cast<std::uint8_t>(std::max(0, v));
    }
  }
}

bool WorldState::footprint_free(const std::string& type, Vec2 pos) const {
  FootprintRect r = footprint_rect(stats->unit(type), pos);
  for (int y = r.y0; y <= r.y1; ++y) {
    for (int x = r.x0; x <= r.x1; ++x) {
      if (!map.in_bounds(x, y) || map.cell(x, y) != 0) return false;
    }
  }
  return true;
}

double WorldState::apply_damage(Unit& target, double raw, bool ranged, UnitTag attacker,
                                std::vector<GameEvent>& events) {
  if (!target.alive()) return 0;
  if (ranged && raw > 0) {
    // Guardian Shield: -2 ranged damage inside a friendly sentry's aura.
    for (const auto& [tag, s] : units) {
      if (s.owner == target.owner && s.type == "Sentry" && s.alive() &&
          s.shield_aura_until_s > clock_s() &&
          distance(s.pos, target.pos) <= stats->skill("GuardianShield").radius) {
        raw = std::max(0.0, raw - stats->skill("GuardianShield").params.at("ranged_damage_reduction"));
        break;
      }
    }
  }
  double shield_hit = std::min(target.shield, raw);
  target.shield -= shield_hit;
  double remainder = raw - shield_hit;
  double health_hit = 0;
  if (remainder > 0) {
    double armor = stats_of(target).armor;
    health_hit = std::min(target.health, std::max(0.5, remainder - armor));
  }
  target.health -= health_hit;
  double applied = shield_hit + health_hit;
  if (applied > 0) {
    target.damage_taken += applied;
    target.last_damaged_s = clock_s();
    GameEvent& ev = push_event(events, GameEvent::Kind::DamageDealt);
    ev.subject = target.tag;
    ev.actor = attacker;
    ev.owner = target.owner;
    ev.amount = applied;
    ev.type_name = target.type;
  }
  return applied;
}

void WorldState::recompute_supply() {
  for (PlayerId p = 1; p <= 2; ++p) {
    double used = 0, cap = 0;
    for (const auto& [tag, u] : units) {
      if (u.owner != p || !u.alive()) continue;
      const UnitStats& s = stats_of(u);
      used += s.supply_cost;
      if (!u.under_construction) cap += s.supply_provided;
    }
    players[p].supply_used = used;
    players[p].supply_cap = std::min(cap, stats->supply_cap_max);
  }
}

GameEvent& WorldState::push_event(std::vector<GameEvent>& events, GameEvent::Kind kind) {
  GameEvent ev;
  ev.kind = kind;
  ev.step = clock_ticks;
  ev.seq = event_seq++;
  events.push_back(ev);
  return events.back();
}

Camera agent_camera(const WorldState& world, const AgentContext& ctx) {
  auto it = world.cameras.find(ctx.agent_name);
  if (it != world.cameras.end()) return it->second;
  return make_camera(world.players[ctx.player].spawn_center,
                     world.map.width, world.map.height);
}

std::uint64_t WorldState::state_hash() const {
  Fnv1a h;
  h.feed_u64(static_cast<std::uint64_t>(clock_ticks));
  h.feed_u64(next_tag);
  for (PlayerId p = 1; p <= 2; ++p) {
    const PlayerState& ps = players[p];
    h.feed_double(ps.minerals);
    h.feed_double(ps.vespene);
    h.feed_double(ps.supply_used);
    h.feed_double(ps.supply_cap);
    h.feed_u64(ps.workers_lost);
    h.feed_u64(ps.enemy_workers_killed);
    h.feed_double(ps.value_killed);
    h.feed_double(ps.value_lost);
    for (const auto& t : ps.tech) h.feed(t);
  }
  for (const auto& [tag, u] : units) {
    h.feed_u64(tag);
    h.feed(u.type);
    h.feed_u64(static_cast<std::uint64_t>(u.owner));
    h.feed_double(u.pos.x);
    h.feed_double(u.pos.y);
    h.feed_double(u.health);
    h.feed_double(u.shield);
    h.feed_double(u.energy);
    h.feed_double(u.weapon_cooldown_s);
    h.feed_u64(u.orders.size());
    h.feed_i64(u.orders_issued_tick);
    for (const auto& o : u.orders) {
      h.feed_u64(static_cast<std::uint64_t>(o.kind));
      h.feed_double(o.target.x);
      h.feed_double(o.target.y);
      h.feed_u64(o.target_tag);
    }
    h.feed_u64(u.production.size());
    for (const auto& p : u.production) {
      h.feed(p.what);
      h.feed_double(p.remaining_s);
    }
    h.feed_u64(u.under_construction ? 1 : 0);
    h.feed_double(u.build_remaining_s);
    h.feed_double(u.lifted_until_s);
    h.feed_double(u.stasis_until_s);
    h.feed_double(u.shield_aura_until_s);
    h.feed_double(u.phase_until_s);
    h.feed_u64(u.cargo.size());
    for (UnitTag c : u.cargo) h.feed_u64(c);
    h.feed_u64(u.in_cargo ? 1 : 0);
    h.feed_u64((u.pulsar_beam_on ? 1 : 0) | (u.surveillance_mode ? 2 : 0) |
               (u.phasing_mode ? 4 : 0));
  }
  for (const auto& e : effects) {
    h.feed_u64(static_cast<std::uint64_t>(e.kind));
    h.feed_double(e.pos.x);
    h.feed_double(e.pos.y);
    h.feed_double(e.expires_at_s);
  }
  for (const auto& [name, cam] : cameras) {
    h.feed(name);
    h.feed_double(cam.center.x);
    h.feed_double(cam.center.y);
  }
  std::ostringstream rng_state;
  rng_state << rng;
  h.feed(rng_state.str());
  return h.digest();
}

}  // namespace textrts
