#include <algorithm>
#include <cmath>
#include <functional>

#include "textrts/sim.hpp"
#include "textrts/util.hpp"

namespace textrts {
namespace {

using Category = ActionError::Category;

ActionError error(Category cat, std::string detail) {
  ActionError e;
  e.category = cat;
  e.detail = std::move(detail);
  return e;
}

std::vector<Unit*> selected_units(WorldState& w, const AgentContext& ctx) {
  std::vector<Unit*> out;
  for (UnitTag tag : ctx.selection) {
    Unit* u = w.find_unit(tag);
    if (u && u->active() && u->owner == ctx.player) out.push_back(u);
  }
  return out;
}

std::vector<Unit*> selected_of_type(WorldState& w, const AgentContext& ctx,
                                    const std::string& type) {
  std::vector<Unit*> out;
  for (Unit* u : selected_units(w, ctx)) {
    if (u->type == type) out.push_back(u);
  }
  return out;
}

// Smart cast: lowest-tag selected unit of `type` that has the energy and is
// off cooldown for `skill`.
Unit* pick_caster(WorldState& w, const AgentContext& ctx, const std::string& type,
                  const SkillStats& skill, std::string& why) {
  bool saw_type = false;
  for (Unit* u : selected_units(w, ctx)) {
    if (u->type != type) continue;
    saw_type = true;
    if (skill.energy_cost > 0 && u->energy < skill.energy_cost - 1e-9) {
      why = "not enough energy";
      continue;
    }
    auto it = u->skill_ready_at_s.find(skill.name);
    if (it != u->skill_ready_at_s.end() && it->second > w.clock_s()) {
      why = "on cooldown";
      continue;
    }
    return u;
  }
  if (!saw_type) why = "no " + type + " selected";
  return nullptr;
}

void give_order(WorldState& w, Unit& u, Order order, BackendCall::Queueing q) {
  if (q == BackendCall::Queueing::Now || u.orders_issued_tick != w.clock_ticks) {
    u.orders.clear();
  }
  u.orders.push_back(order);
  u.orders_issued_tick = w.clock_ticks;
}

std::optional<ActionError> pay(WorldState& w, PlayerId p, int minerals, int vespene,
                               double supply = 0) {
  PlayerState& ps = w.players[p];
  if (ps.minerals < minerals - 1e-9 || ps.vespene < vespene - 1e-9) {
    return error(Category::InsufficientResources,
                 "costs " + std::to_string(minerals) + "m " + std::to_string(vespene) + "g");
  }
  if (supply > 0 && ps.supply_used + supply > ps.supply_cap + 1e-9) {
    return error(Category::InsufficientResources, "not enough supply");
  }
  ps.minerals -= minerals;
  ps.vespene -= vespene;
  return std::nullopt;
}

std::optional<ActionError> do_build(WorldState& w, AgentContext& ctx, const BackendCall& call,
                                    const std::string& type) {
  const UnitStats& s = w.stats->unit(type);
  Vec2 pos = call.world_pos;
  // A living worker must be available; the simplified economy keeps it mining.
  Unit* builder = nullptr;
  for (Unit* u : selected_units(w, ctx)) {
    if (w.stats_of(*u).is_worker) {
      builder = u;
      break;
    }
  }
  if (!builder) {
    for (auto& [tag, u] : w.units) {
      if (u.owner == ctx.player && u.active() && w.stats_of(u).is_worker) {
        builder = &u;
        break;
      }
    }
  }
  if (!builder) return error(Category::InvalidTarget, "no worker available");

  if (type == "Assimilator") {
    Geyser* found = nullptr;
    for (auto& g : w.geysers) {
      if (g.assimilator == 0 && distance(g.pos, pos) <= 3.0) {
        found = &g;
        break;
      }
    }
    if (!found) return error(Category::InvalidPosition, "no free geyser there");
    pos = found->pos;
    if (auto err = pay(w, ctx.player, s.minerals, s.vespene)) return err;
    Unit& fresh = w.spawn(type, ctx.player, pos, /*completed=*/false);
    found->assimilator = fresh.tag;
    return std::nullopt;
  }

  if (!w.footprint_free(type, pos)) {
    return error(Category::InvalidPosition, "obstructed or out of map");
  }
  if (s.requires_power && !w.position_powered(ctx.player, pos)) {
    return error(Category::InvalidPosition, "not in a power field");
  }
  if (auto err = pay(w, ctx.player, s.minerals, s.vespene)) return err;
  w.spawn(type, ctx.player, pos, /*completed=*/false);
  return std::nullopt;
}

std::optional<ActionError> do_train(WorldState& w, AgentContext& ctx, const BackendCall& call,
                                    const std::string& type) {
  Unit* producer = w.find_unit(call.target_tag);
  if (!producer || !producer->alive() || producer->owner != ctx.player) {
    return error(Category::NoIdleBuilding, "producer is gone");
  }
  if (producer->under_construction || !producer->production.empty()) {
    return error(Category::NoIdleBuilding, producer->type + " is busy");
  }
  const UnitStats& s = w.stats->unit(type);
  if (auto err = pay(w, ctx.player, s.minerals, s.vespene, s.supply_cost)) return err;
  producer->production.push_back({"unit:" + type, s.build_time_s});
  return std::nullopt;
}

std::optional<ActionError> do_research(WorldState& w, AgentContext& ctx,
                                       const BackendCall& call, const std::string& tech) {
  if (w.players[ctx.player].tech.count(tech)) {
    return error(Category::Unavailable, tech + " already researched");
  }
  for (const auto& [tag, u] : w.units) {
    if (u.owner == ctx.player && !u.production.empty() &&
        u.production.front().what == "tech:" + tech) {
      return error(Category::Unavailable, tech + " already in progress");
    }
  }
  Unit* producer = w.find_unit(call.target_tag);
  if (!producer || !producer->alive() || producer->owner != ctx.player ||
      producer->under_construction || !producer->production.empty()) {
    return error(Category::NoIdleBuilding, "no idle research building");
  }
  const TechStats& t = w.stats->tech(tech);
  if (auto err = pay(w, ctx.player, t.minerals, t.vespene)) return err;
  producer->production.push_back({"tech:" + tech, t.research_time_s});
  return std::nullopt;
}

std::optional<ActionError> do_warp(WorldState& w, AgentContext& ctx, const BackendCall& call,
                                   const std::string& type) {
  if (!w.players[ctx.player].tech.count("WarpGate")) {
    return error(Category::Unavailable, "WarpGate not researched");
  }
  Unit* gate = w.find_unit(call.target_tag);
  if (!gate || !gate->alive() || gate->type != "WarpGate" || !gate->production.empty()) {
    return error(Category::NoIdleBuilding, "no idle WarpGate");
  }
  if (!w.position_powered(ctx.player, call.world_pos)) {
    return error(Category::InvalidPosition, "warp target not powered");
  }
  const UnitStats& s = w.stats->unit(type);
  if (auto err = pay(w, ctx.player, s.minerals, s.vespene, s.supply_cost)) return err;
  Unit& fresh = w.spawn(type, ctx.player, call.world_pos, /*completed=*/false);
  fresh.build_remaining_s = 5.0;  // warp-in time
  gate->production.push_back({"cooldown", 10.0});
  return std::nullopt;
}

std::optional<ActionError> blink_like_teleport(WorldState& w, AgentContext& ctx,
                                               const std::string& type,
                                               const SkillStats& skill, Vec2 target) {
  auto casters = selected_of_type(w, ctx, type);
  if (casters.empty()) return error(Category::InvalidTarget, "no " + type + " selected");
  int moved = 0;
  for (Unit* u : casters) {
    auto it = u->skill_ready_at_s.find(skill.name);
    if (it != u->skill_ready_at_s.end() && it->second > w.clock_s()) continue;
    Vec2 delta = target - u->pos;
    double d = delta.length();
    Vec2 dest = d <= skill.range ? target : u->pos + delta.normalized() * skill.range;
    if (w.ground_blocked(dest)) continue;
    u->pos = dest;
    u->skill_ready_at_s[skill.name] = w.clock_s() + skill.cooldown_s;
    ++moved;
  }
  if (moved == 0) return error(Category::Unavailable, skill.name + " on cooldown");
  return std::nullopt;
}

}  // namespace

std::optional<ActionError> execute_call(WorldState& w, AgentContext& ctx,
                                        const BackendCall& call,
                                        std::vector<GameEvent>& events) {
  const std::string& fn = call.function_name;
  double now = w.clock_s();

  if (fn == "no_op") return std::nullopt;

  if (fn == "select_rect") {
    std::vector<UnitTag> picked;
    Camera cam = agent_camera(w, ctx);
    for (auto& [tag, u] : w.units) {
      if (u.owner != ctx.player || !u.active()) continue;
      FrameResult fr = world_to_screen(u.pos, cam);
      if (!fr.in_frame) continue;
      if (fr.pixel.x >= call.rect_lo.x && fr.pixel.x <= call.rect_hi.x &&
          fr.pixel.y >= call.rect_lo.y && fr.pixel.y <= call.rect_hi.y) {
        picked.push_back(tag);
      }
    }
    if (picked.empty()) return error(Category::InvalidTarget, "nothing to select there");
    if (!call.select_add) ctx.selection.clear();
    for (UnitTag t : picked) {
      if (std::find(ctx.selection.begin(), ctx.selection.end(), t) == ctx.selection.end()) {
        ctx.selection.push_back(t);
      }
    }
    return std::nullopt;
  }

  if (fn == "select_warp_gates") {
    ctx.selection.clear();
    for (auto& [tag, u] : w.units) {
      if (u.owner == ctx.player && u.type == "WarpGate" && u.active()) {
        ctx.selection.push_back(tag);
      }
    }
    if (ctx.selection.empty()) return error(Category::NoIdleBuilding, "no WarpGates");
    return std::nullopt;
  }

  if (fn == "llm_pysc2_move_camera") {
    const Unit* target = w.find_unit(call.target_tag);
    if (!target || !target->alive()) return error(Category::InvalidTarget, "tag is gone");
    w.cameras[ctx.agent_name] = make_camera(target->pos, w.map.width, w.map.height);
    return std::nullopt;
  }

  if (fn == "HoldPosition_quick") {
    for (Unit* u : selected_units(w, ctx)) {
      u->orders.clear();
      u->orders.push_back({OrderKind::HoldGround, u->pos, 0});
      u->orders_issued_tick = w.clock_ticks;
    }
    return std::nullopt;
  }

  if (fn == "Move_screen" || fn == "Move_minimap") {
    auto units = selected_units(w, ctx);
    if (units.empty()) return error(Category::InvalidTarget, "nothing selected");
    for (Unit* u : units) {
      if (w.stats_of(*u).is_structure) continue;
      give_order(w, *u, {OrderKind::Move, call.world_pos, 0}, call.queueing);
    }
    return std::nullopt;
  }

  if (fn == "Attack_screen" || fn == "Attack_minimap") {
    auto units = selected_units(w, ctx);
    if (units.empty()) return error(Category::InvalidTarget, "nothing selected");
    if (call.target_tag != 0) {
      const Unit* target = w.find_unit(call.target_tag);
      if (!target || !target->alive()) return error(Category::InvalidTarget, "target is gone");
      for (Unit* u : units) {
        if (!w.stats_of(*u).weapon && u->type != "Oracle") continue;
        give_order(w, *u, {OrderKind::AttackTarget, target->pos, target->tag}, call.queueing);
      }
    } else {
      for (Unit* u : units) {
        if (w.stats_of(*u).is_structure) continue;
        give_order(w, *u, {OrderKind::AttackMove, call.world_pos, 0}, call.queueing);
      }
    }
    return std::nullopt;
  }

  if (starts_with(fn, "Build_") && fn.ends_with("_screen")) {
    std::string type = fn.substr(6, fn.size() - 6 - 7);
    if (type == "StasisTrap") {
      const SkillStats& skill = w.stats->skill("StasisTrap");
      std::string why = "no Oracle selected";
      Unit* caster = pick_caster(w, ctx, "Oracle", skill, why);
      if (!caster) return error(Category::Unavailable, why);
      caster->energy -= skill.energy_cost;
      Unit& trap = w.spawn("StasisTrap", ctx.player, call.world_pos);
      trap.trap_armed_at_s = now + skill.params.at("arm_time");
      return std::nullopt;
    }
    return do_build(w, ctx, call, type);
  }

  if (starts_with(fn, "TrainWarp_") && fn.ends_with("_screen")) {
    return do_warp(w, ctx, call, fn.substr(10, fn.size() - 10 - 7));
  }

  if (starts_with(fn, "Train_") && fn.ends_with("_quick")) {
    return do_train(w, ctx, call, fn.substr(6, fn.size() - 6 - 6));
  }

  if (starts_with(fn, "Research_") && fn.ends_with("_quick")) {
    return do_research(w, ctx, call, fn.substr(9, fn.size() - 9 - 6));
  }

  if (fn == "Effect_Blink_screen") {
    if (!w.players[ctx.player].tech.count("Blink")) {
      return error(Category::Unavailable, "Blink not researched");
    }
    return blink_like_teleport(w, ctx, "Stalker", w.stats->skill("Blink"), call.world_pos);
  }

  if (fn == "Effect_ShadowStride_screen") {
    if (!w.players[ctx.player].tech.count("ShadowStrike")) {
      return error(Category::Unavailable, "ShadowStrike not researched");
    }
    Vec2 target = call.world_pos;
    if (const Unit* t = w.find_unit(call.target_tag); t && t->alive()) target = t->pos;
    return blink_like_teleport(w, ctx, "DarkTemplar", w.stats->skill("ShadowStride"), target);
  }

  if (fn == "Effect_AdeptPhaseShift_screen" || fn == "Effect_AdeptPhaseShift_minimap") {
    const SkillStats& skill = w.stats->skill("AdeptPhaseShift");
    auto adepts = selected_of_type(w, ctx, "Adept");
    if (adepts.empty()) return error(Category::InvalidTarget, "no Adept selected");
    int cast = 0;
    for (Unit* u : adepts) {
      auto it = u->skill_ready_at_s.find(skill.name);
      if (it != u->skill_ready_at_s.end() && it->second > now) continue;
      if (u->phase_shade != 0) continue;
      Unit& shade = w.spawn("AdeptPhase", ctx.player, u->pos);
      shade.orders.push_back({OrderKind::Move, call.world_pos, 0});
      u->phase_shade = shade.tag;
      u->phase_until_s = now + skill.duration_s;
      u->skill_ready_at_s[skill.name] = now + skill.cooldown_s;
      ++cast;
    }
    if (cast == 0) return error(Category::Unavailable, "phase shift on cooldown");
    return std::nullopt;
  }

  if (fn == "Cancel_AdeptPhaseShift_quick") {
    for (Unit* u : selected_of_type(w, ctx, "Adept")) {
      if (u->phase_shade != 0) {
        w.remove_unit(u->phase_shade);
        u->phase_shade = 0;
        u->phase_until_s = -1;
      }
    }
    return std::nullopt;
  }

  if (fn == "Effect_ForceField_screen") {
    const SkillStats& skill = w.stats->skill("ForceField");
    std::string why = "no Sentry selected";
    Unit* caster = pick_caster(w, ctx, "Sentry", skill, why);
    if (!caster) return error(Category::Unavailable, why);
    caster->energy -= skill.energy_cost;
    AreaEffect e;
    e.kind = AreaEffect::Kind::ForceField;
    e.id = static_cast<int>(w.effects.size()) + 1;
    e.owner = ctx.player;
    e.pos = call.world_pos;
    e.radius = skill.radius;
    e.expires_at_s = now + skill.duration_s;
    w.effects.push_back(e);
    return std::nullopt;
  }

  if (fn == "Effect_GuardianShield_quick") {
    const SkillStats& skill = w.stats->skill("GuardianShield");
    std::string why = "no Sentry selected";
    Unit* caster = pick_caster(w, ctx, "Sentry", skill, why);
    if (!caster) return error(Category::Unavailable, why);
    caster->energy -= skill.energy_cost;
    caster->shield_aura_until_s = now + skill.duration_s;
    return std::nullopt;
  }

  if (fn == "Effect_PsiStorm_screen") {
    if (!w.players[ctx.player].tech.count("PsiStorm")) {
      return error(Category::Unavailable, "PsiStorm not researched");
    }
    const SkillStats& skill = w.stats->skill("PsiStorm");
    std::string why = "no HighTemplar selected";
    Unit* caster = pick_caster(w, ctx, "HighTemplar", skill, why);
    if (!caster) return error(Category::Unavailable, why);
    if (distance(caster->pos, call.world_pos) > skill.range + 1e-9) {
      return error(Category::InvalidPosition, "storm target out of range");
    }
    caster->energy -= skill.energy_cost;
    AreaEffect e;
    e.kind = AreaEffect::Kind::PsiStorm;
    e.id = static_cast<int>(w.effects.size()) + 1;
    e.owner = ctx.player;
    e.pos = call.world_pos;
    e.radius = skill.radius;
    e.expires_at_s = now + skill.duration_s;
    e.dps = skill.damage_total / skill.duration_s;
    w.effects.push_back(e);
    return std::nullopt;
  }

  if (fn == "Morph_Archon_quick") {
    std::vector<Unit*> templar;
    for (Unit* u : selected_units(w, ctx)) {
      if (u->type == "HighTemplar" || u->type == "DarkTemplar") templar.push_back(u);
    }
    if (templar.size() < 2) return error(Category::InvalidTarget, "need two templar");
    const SkillStats& skill = w.stats->skill("ArchonMerge");
    Vec2 mid = (templar[0]->pos + templar[1]->pos) * 0.5;
    UnitTag a = templar[0]->tag, b = templar[1]->tag;
    w.remove_unit(a);
    w.remove_unit(b);
    Unit& archon = w.spawn("Archon", ctx.player, mid, /*completed=*/false);
    archon.build_remaining_s = skill.duration_s;
    GameEvent& ev = w.push_event(events, GameEvent::Kind::UnitCreated);
    ev.subject = archon.tag;
    ev.owner = ctx.player;
    ev.type_name = archon.type;
    ev.detail = "merging";
    return std::nullopt;
  }

  if (fn == "Effect_PurificationNova_screen") {
    const SkillStats& skill = w.stats->skill("PurificationNova");
    std::string why = "no Disruptor selected";
    Unit* caster = pick_caster(w, ctx, "Disruptor", skill, why);
    if (!caster) return error(Category::Unavailable, why);
    Vec2 target = call.world_pos;
    if (const Unit* t = w.find_unit(call.target_tag); t && t->alive()) target = t->pos;
    if (distance(caster->pos, target) > skill.range + 1e-9) {
      return error(Category::InvalidPosition, "nova target out of range");
    }
    caster->skill_ready_at_s[skill.name] = now + skill.cooldown_s;
    AreaEffect e;
    e.kind = AreaEffect::Kind::NovaPending;
    e.id = static_cast<int>(w.effects.size()) + 1;
    e.owner = ctx.player;
    e.pos = target;
    e.radius = skill.radius;
    e.trigger_at_s = now + skill.params.at("delay");
    e.expires_at_s = e.trigger_at_s + w.tick_s;
    e.damage = skill.damage_total;
    w.effects.push_back(e);
    return std::nullopt;
  }

  if (fn == "Behavior_PulsarBeamOn_quick") {
    const SkillStats& skill = w.stats->skill("PulsarBeamOn");
    auto oracles = selected_of_type(w, ctx, "Oracle");
    if (oracles.empty()) return error(Category::InvalidTarget, "no Oracle selected");
    int on = 0;
    for (Unit* u : oracles) {
      if (u->pulsar_beam_on) continue;
      if (u->energy < skill.energy_cost - 1e-9) continue;
      u->energy -= skill.energy_cost;
      u->pulsar_beam_on = true;
      ++on;
    }
    if (on == 0) return error(Category::Unavailable, "not enough energy");
    return std::nullopt;
  }

  if (fn == "Effect_OracleRevelation_screen") {
    const SkillStats& skill = w.stats->skill("OracleRevelation");
    std::string why = "no Oracle selected";
    Unit* caster = pick_caster(w, ctx, "Oracle", skill, why);
    if (!caster) return error(Category::Unavailable, why);
    caster->energy -= skill.energy_cost;
    AreaEffect e;
    e.kind = AreaEffect::Kind::Revelation;
    e.id = static_cast<int>(w.effects.size()) + 1;
    e.owner = ctx.player;
    e.pos = call.world_pos;
    e.radius = skill.radius;
    e.expires_at_s = now + skill.duration_s;
    w.effects.push_back(e);
    return std::nullopt;
  }

  if (fn == "Effect_GravitonBeam_screen") {
    const SkillStats& skill = w.stats->skill("GravitonBeam");
    std::string why = "no Phoenix selected";
    Unit* caster = nullptr;
    for (Unit* u : selected_of_type(w, ctx, "Phoenix")) {
      if (u->channel_target != 0) {
        why = "already channeling";
        continue;
      }
      if (u->energy < skill.energy_cost - 1e-9) {
        why = "not enough energy";
        continue;
      }
      caster = u;
      break;
    }
    if (!caster) return error(Category::Unavailable, why);
    Unit* target = w.find_unit(call.target_tag);
    if (!target || !target->alive()) return error(Category::InvalidTarget, "target is gone");
    if (w.stats_of(*target).is_structure || w.stats_of(*target).is_flying) {
      return error(Category::InvalidTarget, "only ground units can be lifted");
    }
    caster->energy -= skill.energy_cost;
    caster->channel_target = target->tag;
    caster->channeling_until_s = now + skill.duration_s;
    target->lifted_until_s = now + skill.duration_s;
    target->orders.clear();
    return std::nullopt;
  }

  if (fn == "Cancel_quick") {
    for (Unit* u : selected_of_type(w, ctx, "Phoenix")) {
      if (u->channel_target != 0) {
        if (Unit* t = w.find_unit(u->channel_target)) t->lifted_until_s = now;
        u->channel_target = 0;
        u->channeling_until_s = -1;
      }
    }
    return std::nullopt;
  }

  if (fn == "Effect_TimeWarp_screen") {
    const SkillStats& skill = w.stats->skill("TimeWarp");
    std::string why = "no Mothership selected";
    Unit* caster = pick_caster(w, ctx, "Mothership", skill, why);
    if (!caster) return error(Category::Unavailable, why);
    caster->energy -= skill.energy_cost;
    AreaEffect e;
    e.kind = AreaEffect::Kind::TimeWarp;
    e.id = static_cast<int>(w.effects.size()) + 1;
    e.owner = ctx.player;
    e.pos = call.world_pos;
    e.radius = skill.radius;
    e.expires_at_s = now + skill.duration_s;
    e.slow_factor = skill.params.at("slow_factor");
    w.effects.push_back(e);
    return std::nullopt;
  }

  if (fn == "Morph_SurveillanceMode_quick" || fn == "Morph_ObserverMode_quick") {
    auto observers = selected_of_type(w, ctx, "Observer");
    if (observers.empty()) return error(Category::InvalidTarget, "no Observer selected");
    for (Unit* u : observers) u->surveillance_mode = fn == "Morph_SurveillanceMode_quick";
    return std::nullopt;
  }

  if (fn == "Morph_WarpPrismPhasingMode_quick" || fn == "Morph_WarpPrismTransportMode_quick") {
    auto prisms = selected_of_type(w, ctx, "WarpPrism");
    if (prisms.empty()) return error(Category::InvalidTarget, "no WarpPrism selected");
    for (Unit* u : prisms) {
      u->phasing_mode = fn == "Morph_WarpPrismPhasingMode_quick";
      if (u->phasing_mode) u->orders.clear();
    }
    return std::nullopt;
  }

  if (fn == "Load_screen") {
    auto prisms = selected_of_type(w, ctx, "WarpPrism");
    if (prisms.empty()) return error(Category::InvalidTarget, "no WarpPrism selected");
    Unit* prism = prisms.front();
    Unit* target = w.find_unit(call.target_tag);
    if (!target || !target->alive() || target->owner != ctx.player ||
        w.stats_of(*target).is_structure || target->in_cargo) {
      return error(Category::InvalidTarget, "cannot load that");
    }
    const SkillStats& skill = w.stats->skill("LoadUnit");
    if (distance(prism->pos, target->pos) > skill.range + 1e-9) {
      return error(Category::InvalidTarget, "too far to load");
    }
    if (static_cast<int>(prism->cargo.size()) >= w.stats_of(*prism).cargo_capacity) {
      return error(Category::Unavailable, "cargo full");
    }
    target->in_cargo = true;
    target->orders.clear();
    prism->cargo.push_back(target->tag);
    return std::nullopt;
  }

  if (fn == "UnloadAllAt_screen") {
    auto prisms = selected_of_type(w, ctx, "WarpPrism");
    if (prisms.empty()) return error(Category::InvalidTarget, "no WarpPrism selected");
    Unit* prism = prisms.front();
    if (prism->cargo.empty()) return error(Category::InvalidTarget, "cargo empty");
    const SkillStats& skill = w.stats->skill("UnloadAll");
    if (distance(prism->pos, call.world_pos) > skill.range + 1e-9) {
      give_order(w, *prism, {OrderKind::Move, call.world_pos, 0}, BackendCall::Queueing::Now);
    }
    int slot = 0;
    for (UnitTag c : prism->cargo) {
      Unit* cu = w.find_unit(c);
      if (!cu) continue;
      double angle = slot * (2 * 3.14159265358979 / 8.0);
      cu->pos = prism->pos + Vec2{1.5 * std::cos(angle), 1.5 * std::sin(angle)};
      cu->in_cargo = false;
      ++slot;
    }
    prism->cargo.clear();
    return std::nullopt;
  }

  return error(Category::UnknownAction, "no backend handler for " + fn);
}

}  // namespace textrts
