#include <cmath>
#include <vector>

#include "textrts/sim.hpp"

namespace textrts {
namespace {

constexpr double kAggroRadius = 10.0;
constexpr double kLeash = 3.0;
constexpr double kWorkerFleeRadius = 6.0;
constexpr int kRegroupPeriodTicks = 100;

bool has_order(const Unit& u) { return !u.orders.empty(); }

const Unit* nearest_threat(const WorldState& w, const Unit& u, double radius) {
  const Unit* best = nullptr;
  double best_d = radius;
  for (const auto& [tag, e] : w.units) {
    if (e.owner == u.owner || !e.alive() || e.in_cargo) continue;
    if (!w.stats_of(e).targetable) continue;
    double d = distance(u.pos, e.pos);
    if (d <= best_d + 1e-9 && (best == nullptr || d < best_d - 1e-9)) {
      best_d = d;
      best = &e;
    }
  }
  return best;
}

// Lowest-health attacker within aggro range of anyone in the group.
const Unit* focus_target(const WorldState& w, PlayerId group_owner) {
  const Unit* best = nullptr;
  double best_health = 1e18;
  for (const auto& [tag, e] : w.units) {
    if (e.owner == group_owner || !e.alive() || e.in_cargo) continue;
    if (!w.stats_of(e).targetable) continue;
    bool in_range = false;
    for (const auto& [mtag, m] : w.units) {
      if (m.owner != group_owner || !m.alive() || m.in_cargo) continue;
      if (distance(m.pos, e.pos) <= kAggroRadius) {
        in_range = true;
        break;
      }
    }
    if (!in_range) continue;
    double hp = e.health + e.shield;
    if (hp < best_health - 1e-9) {
      best_health = hp;
      best = &e;
    }
  }
  return best;
}

void unload_transport(WorldState& w, Unit& transport, std::vector<GameEvent>& events) {
  int slot = 0;
  Vec2 rally = w.players[w.tasked_player].spawn_center;
  for (UnitTag c : transport.cargo) {
    Unit* cu = w.find_unit(c);
    if (!cu) continue;
    double angle = slot * (2 * 3.14159265358979 / 8.0);
    cu->pos = transport.pos + Vec2{1.5 * std::cos(angle), 1.5 * std::sin(angle)};
    cu->in_cargo = false;
    cu->orders.clear();
    cu->orders.push_back({OrderKind::AttackMove, rally, 0});
    GameEvent& ev = w.push_event(events, GameEvent::Kind::UnitCreated);
    ev.subject = cu->tag;
    ev.owner = cu->owner;
    ev.type_name = cu->type;
    ev.detail = "unloaded";
    ++slot;
  }
  transport.cargo.clear();
  // Leave the way it came in.
  transport.orders.clear();
  transport.orders.push_back({OrderKind::Move, Vec2{transport.pos.x, 1.0}, 0});
}

}  // namespace

void scripted_opponent_tick(WorldState& w, std::vector<GameEvent>& events) {
  PlayerId op = w.opponent.player;
  int level = w.opponent.level;
  const Unit* shared_target = level >= 2 ? focus_target(w, op) : nullptr;

  // Empty transports that made it back to the map edge leave the field.
  std::vector<UnitTag> escaped;
  for (const auto& [tag, u] : w.units) {
    if (u.owner == op && w.stats_of(u).cargo_capacity > 0 && u.cargo.empty() &&
        u.orders.empty() && u.pos.y <= 2.5) {
      escaped.push_back(tag);
    }
  }
  for (UnitTag tag : escaped) w.remove_unit(tag);
  if (!escaped.empty()) w.recompute_supply();

  Vec2 centroid{};
  int count = 0;
  for (const auto& [tag, u] : w.units) {
    if (u.owner == op && u.active() && !w.stats_of(u).is_structure && !u.in_cargo) {
      centroid = centroid + u.pos;
      ++count;
    }
  }
  if (count > 0) centroid = centroid * (1.0 / count);

  for (auto& [tag, u] : w.units) {
    if (u.owner != op || !u.active()) continue;
    const UnitStats& s = w.stats_of(u);
    if (s.is_structure) continue;

    // Airdrop transports head to their drop point, then unload.
    if (s.cargo_capacity > 0 && !u.cargo.empty()) {
      if (!has_order(u)) unload_transport(w, u, events);
      continue;
    }

    if (s.is_worker) {
      if (level >= 3) {
        if (const Unit* threat = nearest_threat(w, u, kWorkerFleeRadius)) {
          Vec2 away = (u.pos - threat->pos).normalized() * 6.0 + u.pos;
          u.orders.clear();
          u.orders.push_back({OrderKind::Move, away, 0});
          continue;
        }
        if (has_order(u) && distance(u.pos, w.players[op].spawn_center) > 14) {
          u.orders.clear();
          u.orders.push_back({OrderKind::Move, w.players[op].spawn_center, 0});
        }
      }
      continue;  // workers never fight back through the policy
    }

    if (!s.weapon) continue;

    const Unit* target = nullptr;
    if (shared_target && w.can_hit(u, *shared_target) &&
        distance(u.pos, shared_target->pos) <= kAggroRadius + w.weapon_range(u)) {
      target = shared_target;
    } else {
      target = nearest_threat(w, u, kAggroRadius);
      if (target && !w.can_hit(u, *target)) {
        // Pick the nearest enemy this weapon can actually hit.
        const Unit* alt = nullptr;
        double alt_d = kAggroRadius;
        for (const auto& [etag, e] : w.units) {
          if (e.owner == op || !e.alive() || e.in_cargo || !w.can_hit(u, e)) continue;
          double d = distance(u.pos, e.pos);
          if (d <= alt_d) {
            alt_d = d;
            alt = &e;
          }
        }
        target = alt;
      }
    }

    if (target) {
      bool already = !u.orders.empty() && u.orders.front().kind == OrderKind::AttackTarget &&
                     u.orders.front().target_tag == target->tag;
      if (!already) {
        u.orders.clear();
        u.orders.push_back({OrderKind::AttackTarget, target->pos, target->tag});
      }
      continue;
    }

    // No threats: drop stale chases and hold the spawn region.
    if (!u.orders.empty() && u.orders.front().kind == OrderKind::AttackTarget) {
      u.orders.clear();
    }
    if (level >= 3 && w.clock_ticks > 0 && w.clock_ticks % kRegroupPeriodTicks == 0 &&
        count > 0 && distance(u.pos, centroid) > 4) {
      u.orders.clear();
      u.orders.push_back({OrderKind::Move, centroid, 0});
      continue;
    }
    if (u.orders.empty() &&
        distance(u.pos, w.players[op].spawn_center) > kLeash + kAggroRadius) {
      u.orders.push_back({OrderKind::Move, w.players[op].spawn_center, 0});
    }
  }
}

}  // namespace textrts
