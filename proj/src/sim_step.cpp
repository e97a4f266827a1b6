#include <algorithm>
#include <cmath>
#include <map>

#include "textrts/sim.hpp"
#include "textrts/util.hpp"

namespace textrts {
namespace {

bool frozen(const WorldState& w, const Unit& u) {
  return u.stasis_until_s > w.clock_s() || u.lifted_until_s > w.clock_s();
}

void spawn_airdrops(WorldState& w, std::vector<GameEvent>& events) {
  for (auto it = w.pending_airdrops.begin(); it != w.pending_airdrops.end();) {
    if (it->at_s > w.clock_s()) {
      ++it;
      continue;
    }
    std::uniform_real_distribution<double> jitter(-3.0, 3.0);
    for (int t = 0; t < it->transports; ++t) {
      Vec2 entry = it->entry + Vec2{t * 2.5, 0};
      Vec2 drop = it->drop_at + Vec2{jitter(w.rng), jitter(w.rng)};
      Unit& transport = w.spawn("OverlordTransport", w.opponent.player, entry);
      transport.orders.push_back({OrderKind::Move, drop, 0});
      for (const auto& cargo_type : it->cargo_per_transport) {
        Unit& c = w.spawn(cargo_type, w.opponent.player, entry);
        c.in_cargo = true;
        transport.cargo.push_back(c.tag);
      }
      GameEvent& ev = w.push_event(events, GameEvent::Kind::UnitCreated);
      ev.subject = transport.tag;
      ev.owner = transport.owner;
      ev.type_name = transport.type;
      ev.detail = "airdrop inbound";
    }
    it = w.pending_airdrops.erase(it);
  }
}

void tick_effects(WorldState& w, std::vector<GameEvent>& events) {
  double now = w.clock_s();
  // Psi storms tick on everything inside, own units included.
  for (const auto& e : w.effects) {
    if (e.kind == AreaEffect::Kind::PsiStorm) {
      for (auto& [tag, u] : w.units) {
        if (!u.alive() || u.in_cargo || !w.stats_of(u).targetable) continue;
        if (u.stasis_until_s > now) continue;
        if (distance(u.pos, e.pos) <= e.radius) {
          w.apply_damage(u, e.dps * w.tick_s, false, 0, events);
        }
      }
    }
  }
  // Pending novas detonate.
  for (auto& e : w.effects) {
    if (e.kind == AreaEffect::Kind::NovaPending && e.trigger_at_s <= now) {
      for (auto& [tag, u] : w.units) {
        if (!u.alive() || u.in_cargo || !w.stats_of(u).targetable) continue;
        if (u.stasis_until_s > now) continue;
        if (distance(u.pos, e.pos) <= e.radius) {
          w.apply_damage(u, e.damage, true, 0, events);
        }
      }
      e.expires_at_s = now;  // consumed
    }
  }
  std::erase_if(w.effects, [&](const AreaEffect& e) { return e.expires_at_s <= now; });

  // Adept phase shift completion: the adept swaps to its shade's position.
  std::vector<UnitTag> shades_done;
  for (auto& [tag, u] : w.units) {
    if (u.phase_until_s > 0 && u.phase_until_s <= now && u.phase_shade != 0) {
      if (const Unit* shade = w.find_unit(u.phase_shade); shade && shade->alive()) {
        u.pos = shade->pos;
        shades_done.push_back(u.phase_shade);
      }
      u.phase_until_s = -1;
      u.phase_shade = 0;
    }
  }
  for (UnitTag tag : shades_done) w.remove_unit(tag);

  // Graviton channels end when the caster dies or the timer runs out.
  for (auto& [tag, u] : w.units) {
    if (u.channel_target == 0) continue;
    Unit* target = w.find_unit(u.channel_target);
    bool over = u.channeling_until_s <= now || !u.alive();
    if (over || !target || !target->alive()) {
      if (target && target->alive()) target->lifted_until_s = now;
      u.channel_target = 0;
      u.channeling_until_s = -1;
    }
  }

  // Armed stasis traps fire on nearby enemy ground units.
  for (auto& [tag, u] : w.units) {
    if (u.type != "StasisTrap" || !u.alive() || u.trap_armed_at_s > now) continue;
    const SkillStats& trap = w.stats->skill("StasisTrap");
    bool fired = false;
    for (auto& [otag, other] : w.units) {
      if (other.owner == u.owner || !other.alive() || other.in_cargo) continue;
      if (w.is_air_like(other)) continue;
      if (distance(other.pos, u.pos) <= trap.radius) {
        other.stasis_until_s = now + trap.params.at("stasis_duration");
        fired = true;
      }
    }
    if (fired) u.health = 0;  // trap is consumed
  }
}

void tick_movement(WorldState& w, std::map<UnitTag, UnitTag>& engage) {
  for (auto& [tag, u] : w.units) {
    if (!u.active() || frozen(w, u)) continue;
    const UnitStats& s = w.stats_of(u);
    if (s.is_structure) continue;

    // Resolve the current order into either an engage target or a move.
    Vec2 move_target = u.pos;
    bool want_move = false;
    while (!u.orders.empty()) {
      Order& o = u.orders.front();
      if (o.kind == OrderKind::Move) {
        if (distance(u.pos, o.target) <= 0.3) {
          u.orders.pop_front();
          continue;
        }
        move_target = o.target;
        want_move = true;
        break;
      }
      if (o.kind == OrderKind::AttackTarget) {
        const Unit* t = w.find_unit(o.target_tag);
        if (!t || !t->alive() || !w.can_hit(u, *t)) {
          u.orders.pop_front();
          continue;
        }
        if (distance(u.pos, t->pos) <= w.weapon_range(u)) {
          engage[tag] = t->tag;
        } else {
          move_target = t->pos;
          want_move = true;
        }
        break;
      }
      if (o.kind == OrderKind::AttackMove) {
        // Chase the nearest hittable enemy within own sight, else keep moving.
        const Unit* best = nullptr;
        double best_d = 1e18;
        double sight = w.sight_range(u);
        for (const auto& [etag, e] : w.units) {
          if (e.owner == u.owner || !e.alive() || e.in_cargo) continue;
          double d = distance(u.pos, e.pos);
          if (d > sight || !w.can_hit(u, e)) continue;
          if (d < best_d - 1e-9) {
            best_d = d;
            best = &e;
          }
        }
        if (best) {
          if (best_d <= w.weapon_range(u)) {
            engage[tag] = best->tag;
          } else {
            move_target = best->pos;
            want_move = true;
          }
        } else if (distance(u.pos, o.target) <= 0.5) {
          u.orders.pop_front();
          continue;
        } else {
          move_target = o.target;
          want_move = true;
        }
        break;
      }
      // HoldGround: stand and let the idle-fire rule below pick a target.
      break;
    }

    if (u.orders.empty() || u.orders.front().kind == OrderKind::HoldGround) {
      // Idle units return fire at whatever is already in weapon range.
      const Unit* best = nullptr;
      double best_d = 1e18;
      for (const auto& [etag, e] : w.units) {
        if (e.owner == u.owner || !e.alive() || e.in_cargo) continue;
        if (!w.can_hit(u, e)) continue;
        double d = distance(u.pos, e.pos);
        if (d <= w.weapon_range(u) && d < best_d - 1e-9) {
          best_d = d;
          best = &e;
        }
      }
      if (best) engage[tag] = best->tag;
    }

    if (!want_move) continue;
    Vec2 dir = (move_target - u.pos).normalized();
    Vec2 next = u.pos + dir * (w.move_speed(u) * w.tick_s);
    bool flying = s.is_flying;
    auto passable = [&](Vec2 p) {
      if (p.x < 0.5 || p.y < 0.5 || p.x > w.map.width - 0.5 || p.y > w.map.height - 0.5)
        return false;
      return flying || !w.ground_blocked(p);
    };
    if (passable(next)) {
      u.pos = next;
    } else if (passable({next.x, u.pos.y})) {
      u.pos = {next.x, u.pos.y};  // slide along x
    } else if (passable({u.pos.x, next.y})) {
      u.pos = {u.pos.x, next.y};  // slide along y
    }
    // Channeling phoenixes drag their victim along.
    if (u.channel_target != 0) {
      if (Unit* victim = w.find_unit(u.channel_target)) victim->pos = u.pos;
    }
  }
}

void tick_combat(WorldState& w, const std::map<UnitTag, UnitTag>& engage,
                 std::vector<GameEvent>& events) {
  // Every ready attacker fires this tick, resolved in ascending tag order;
  // a unit that dies mid-tick still lands its hit.
  struct Shot {
    UnitTag attacker;
    UnitTag target;
  };
  std::vector<Shot> shots;
  for (const auto& [tag, target_tag] : engage) {
    const Unit* u = w.find_unit(tag);
    if (!u || !u->alive() || u->weapon_cooldown_s > 1e-9) continue;
    if (u->channeling_until_s > w.clock_s()) continue;  // graviton busy
    shots.push_back({tag, target_tag});
  }
  for (const Shot& shot : shots) {
    Unit* attacker = w.find_unit(shot.attacker);
    Unit* target = w.find_unit(shot.target);
    if (!attacker || !target || !target->alive()) continue;
    const UnitStats& as = w.stats_of(*attacker);
    double damage = w.weapon_damage(*attacker);
    bool ranged = w.weapon_range(*attacker) >= 2;
    w.apply_damage(*target, damage, ranged, attacker->tag, events);
    double splash = as.weapon ? as.weapon->splash_radius : 0;
    if (splash > 0) {
      for (auto& [otag, other] : w.units) {
        if (other.owner == attacker->owner || otag == target->tag) continue;
        if (!other.alive() || other.in_cargo || !w.can_hit(*attacker, other)) continue;
        if (distance(other.pos, target->pos) <= splash) {
          w.apply_damage(other, damage, ranged, attacker->tag, events);
        }
      }
    }
    if (as.weapon && as.weapon->suicide) {
      attacker->health = 0;
    } else {
      attacker->weapon_cooldown_s += w.weapon_cooldown(*attacker);
    }
  }
}

void tick_regen_and_timers(WorldState& w) {
  double now = w.clock_s();
  for (auto& [tag, u] : w.units) {
    if (!u.alive()) continue;
    if (u.weapon_cooldown_s > 0) u.weapon_cooldown_s = std::max(0.0, u.weapon_cooldown_s - w.tick_s);
    const UnitStats& s = w.stats_of(u);
    if (s.shield > 0 && u.shield < u.shield_max &&
        now - u.last_damaged_s >= w.stats->shield_regen_delay_s) {
      double gain = std::min(w.stats->shield_regen_rate * w.tick_s, u.shield_max - u.shield);
      u.shield += gain;
      u.regen_gained += gain;
    }
    if (s.energy_max > 0) {
      u.energy = std::min(s.energy_max, u.energy + w.stats->energy_regen_rate * w.tick_s);
      if (u.pulsar_beam_on) {
        u.energy -= w.stats->skill("PulsarBeamOn").params.at("drain_per_s") * w.tick_s;
        if (u.energy <= 0) {
          u.energy = 0;
          u.pulsar_beam_on = false;
        }
      }
    }
  }
}

void tick_production(WorldState& w, std::vector<GameEvent>& events) {
  std::vector<std::pair<UnitTag, std::string>> completed;  // producer, item
  for (auto& [tag, u] : w.units) {
    if (!u.alive()) continue;
    if (u.under_construction) {
      u.build_remaining_s -= w.tick_s;
      if (u.build_remaining_s <= 0) {
        u.under_construction = false;
        u.build_remaining_s = 0;
        GameEvent& ev = w.push_event(events, GameEvent::Kind::UnitCreated);
        ev.subject = tag;
        ev.owner = u.owner;
        ev.type_name = u.type;
        ev.detail = "completed";
        w.recompute_supply();
      }
      continue;
    }
    if (u.production.empty()) continue;
    ProductionItem& item = u.production.front();
    item.remaining_s -= w.tick_s;
    if (item.remaining_s <= 0) {
      completed.emplace_back(tag, item.what);
      u.production.pop_front();
    }
  }
  for (auto& [producer_tag, what] : completed) {
    Unit* producer = w.find_unit(producer_tag);
    if (!producer) continue;
    if (starts_with(what, "unit:")) {
      std::string type = what.substr(5);
      const UnitStats& s = w.stats->unit(producer->type);
      Vec2 at = producer->pos + Vec2{0, s.footprint_h / 2.0 + 1.0};
      Unit& fresh = w.spawn(type, producer->owner, at);
      GameEvent& ev = w.push_event(events, GameEvent::Kind::UnitCreated);
      ev.subject = fresh.tag;
      ev.owner = fresh.owner;
      ev.type_name = fresh.type;
    } else if (starts_with(what, "tech:")) {
      std::string tech = what.substr(5);
      w.players[producer->owner].tech.insert(tech);
      GameEvent& ev = w.push_event(events, GameEvent::Kind::ResearchDone);
      ev.owner = producer->owner;
      ev.type_name = tech;
      if (tech == "WarpGate") {
        // Gateways convert to warp gates once the tech completes.
        for (auto& [gtag, g] : w.units) {
          if (g.owner == producer->owner && g.type == "Gateway" && g.alive() &&
              !g.under_construction) {
            g.type = "WarpGate";
            g.production.clear();
          }
        }
      }
    }
    // "cooldown" items simply expire.
  }
}

void tick_economy(WorldState& w) {
  for (PlayerId p = 1; p <= 2; ++p) {
    // Town halls that actually have minerals nearby.
    std::vector<Vec2> bases;
    for (const auto& [tag, u] : w.units) {
      if (u.owner != p || u.type != "Nexus" || !u.alive() || u.under_construction) continue;
      for (const auto& patch : w.minerals) {
        if (distance(patch.pos, u.pos) <= 10) {
          bases.push_back(u.pos);
          break;
        }
      }
    }
    if (!bases.empty()) {
      int miners = 0;
      for (const auto& [tag, u] : w.units) {
        if (u.owner != p || !u.active() || !w.stats_of(u).is_worker) continue;
        if (!u.orders.empty()) continue;
        for (const Vec2& b : bases) {
          if (distance(u.pos, b) <= 12) {
            ++miners;
            break;
          }
        }
      }
      w.players[p].minerals += miners * w.stats->mineral_rate_per_worker * w.tick_s;
    }
    for (const auto& [tag, u] : w.units) {
      if (u.owner == p && u.type == "Assimilator" && u.alive() && !u.under_construction) {
        w.players[p].vespene += w.stats->vespene_rate_per_assimilator * w.tick_s;
      }
    }
  }
}

void tick_deaths(WorldState& w, std::vector<GameEvent>& events) {
  std::vector<UnitTag> dead;
  for (auto& [tag, u] : w.units) {
    if (u.health <= 0) {
      u.health = 0;
      dead.push_back(tag);
    }
  }
  for (UnitTag tag : dead) {
    Unit* u = w.find_unit(tag);
    if (!u) continue;  // already removed as cargo of an earlier death
    // Cargo goes down with the transport.
    std::vector<UnitTag> casualties = u->cargo;
    for (UnitTag c : casualties) {
      if (Unit* cu = w.find_unit(c)) cu->health = 0;
    }
    const UnitStats& s = w.stats_of(*u);
    PlayerId owner = u->owner;
    PlayerId enemy = owner == 1 ? 2 : 1;
    w.players[owner].value_lost += s.value();
    w.players[enemy].value_killed += s.value();
    if (s.is_worker) {
      w.players[owner].workers_lost += 1;
      w.players[enemy].enemy_workers_killed += 1;
    }
    GameEvent& ev = w.push_event(events, GameEvent::Kind::UnitKilled);
    ev.subject = tag;
    ev.owner = owner;
    ev.type_name = u->type;
    if (u->phase_shade != 0) {
      w.remove_unit(u->phase_shade);
    }
    if (u->type == "AdeptPhase") {
      for (auto& [atag, adept] : w.units) {
        if (adept.phase_shade == tag) {
          adept.phase_shade = 0;
          adept.phase_until_s = -1;
        }
      }
    }
    w.remove_unit(tag);
    for (UnitTag c : casualties) {
      if (Unit* cu = w.find_unit(c)) {
        const UnitStats& cs = w.stats_of(*cu);
        PlayerId killer = cu->owner == 1 ? 2 : 1;
        w.players[cu->owner].value_lost += cs.value();
        w.players[killer].value_killed += cs.value();
        if (cs.is_worker) {
          w.players[cu->owner].workers_lost += 1;
          w.players[killer].enemy_workers_killed += 1;
        }
        GameEvent& cev = w.push_event(events, GameEvent::Kind::UnitKilled);
        cev.subject = c;
        cev.owner = cu->owner;
        cev.type_name = cu->type;
        w.remove_unit(c);
      }
    }
  }
  if (!dead.empty()) w.recompute_supply();
}

void tick_quadrants(WorldState& w) {
  for (PlayerId p = 1; p <= 2; ++p) {
    for (const auto& [tag, u] : w.units) {
      if (u.owner != p || !u.alive() || u.in_cargo) continue;
      int qx = u.pos.x * 2 >= w.map.width ? 1 : 0;
      int qy = u.pos.y * 2 >= w.map.height ? 1 : 0;
      w.players[p].quadrant_seen_step[qy * 2 + qx] = w.clock_ticks;
    }
  }
}

}  // namespace

std::vector<GameEvent> step(WorldState& w) {
  std::vector<GameEvent> events;
  spawn_airdrops(w, events);
  tick_effects(w, events);
  scripted_opponent_tick(w, events);
  std::map<UnitTag, UnitTag> engage;
  tick_movement(w, engage);
  tick_combat(w, engage, events);
  tick_deaths(w, events);
  tick_regen_and_timers(w);
  tick_production(w, events);
  tick_economy(w);
  tick_quadrants(w);
  w.clock_ticks += 1;
  return events;
}

}  // namespace textrts
