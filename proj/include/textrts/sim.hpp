#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "textrts/calls.hpp"
#include "textrts/geometry.hpp"
#include "textrts/stats.hpp"

namespace textrts {

// Deterministic micro-RTS backend. One tick = 0.1 s simulated time. All
// per-tick resolution (movement, damage, regen, production) walks units in
// ascending tag order, so identical (scenario, seed, command trace) yields
// an identical event log and final state hash.

enum class OrderKind { Move, AttackMove, AttackTarget, HoldGround };

struct Order {
  OrderKind kind = OrderKind::Move;
  Vec2 target;
  UnitTag target_tag = 0;
};

struct ProductionItem {
  std::string what;  // "unit:Zealot" | "tech:Blink" | "cooldown"
  double remaining_s = 0;
};

struct Unit {
  UnitTag tag = 0;
  std::string type;
  PlayerId owner = 0;
  Vec2 pos;
  double health = 0, health_max = 0;
  double shield = 0, shield_max = 0;
  double energy = 0;
  double weapon_cooldown_s = 0;
  std::deque<Order> orders;
  int orders_issued_tick = -1;  // queued orders chain within one decision
                                // step and replace older standing orders
  std::deque<ProductionItem> production;
  bool under_construction = false;
  double build_remaining_s = 0;

  // timed status effects, in world seconds
  double lifted_until_s = -1;        // GravitonBeam target
  double channeling_until_s = -1;    // GravitonBeam caster
  UnitTag channel_target = 0;
  double stasis_until_s = -1;
  double shield_aura_until_s = -1;   // GuardianShield, on the sentry
  double phase_until_s = -1;         // AdeptPhaseShift, on the adept
  UnitTag phase_shade = 0;
  double trap_armed_at_s = -1;       // StasisTrap
  bool pulsar_beam_on = false;
  bool surveillance_mode = false;
  bool phasing_mode = false;         // WarpPrism
  std::vector<UnitTag> cargo;
  bool in_cargo = false;
  std::map<std::string, double> skill_ready_at_s;

  double last_damaged_s = -1e9;
  double damage_taken = 0;   // applied damage (never overkill)
  double regen_gained = 0;

  bool alive() const { return health > 0; }
  bool active() const {  // can receive and execute orders
    return alive() && !under_construction && !in_cargo;
  }
};

struct AreaEffect {
  enum class Kind { PsiStorm, ForceField, NovaPending, TimeWarp, Revelation } kind;
  int id = 0;
  PlayerId owner = 0;
  Vec2 pos;
  double radius = 0;
  double expires_at_s = 0;
  double dps = 0;           // PsiStorm
  double trigger_at_s = 0;  // NovaPending
  double damage = 0;        // NovaPending
  double slow_factor = 1;   // TimeWarp
};

struct GameEvent {
  enum class Kind { UnitKilled, UnitCreated, ResearchDone, DamageDealt, ActionFailed };
  Kind kind = Kind::DamageDealt;
  int step = 0;  // tick index
  int seq = 0;   // deterministic order within the tick
  UnitTag subject = 0;
  UnitTag actor = 0;
  PlayerId owner = 0;
  double amount = 0;
  std::string type_name;
  std::string detail;

  std::string text() const;
};

struct PlayerState {
  double minerals = 0, vespene = 0;
  double supply_used = 0, supply_cap = 0;
  std::set<std::string> tech;
  Vec2 spawn_center;
  int workers_lost = 0;
  int enemy_workers_killed = 0;
  double value_killed = 0, value_lost = 0;
  std::array<int, 4> quadrant_seen_step{{0, 0, 0, 0}};
};

struct MapGrid {
  int width = 64, height = 64;
  std::vector<std::uint8_t> blocked;  // structure/resource footprint occupancy

  void resize(int w, int h) {
    width = w;
    height = h;
    blocked.assign(static_cast<std::size_t>(w) * h, 0);
  }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  std::uint8_t& cell(int x, int y) { return blocked[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t cell(int x, int y) const { return blocked[static_cast<std::size_t>(y) * width + x]; }
  bool buildable(int x, int y) const { return in_bounds(x, y) && cell(x, y) == 0; }
};

struct MineralPatch {
  Vec2 pos;
};
struct Geyser {
  Vec2 pos;
  UnitTag assimilator = 0;
};

struct OpponentConfig {
  PlayerId player = 2;
  int level = 1;
};

struct AirdropWave {
  double at_s = 0;
  Vec2 entry;
  Vec2 drop_at;
  int transports = 2;
  std::vector<std::string> cargo_per_transport;
};

class WorldState {
 public:
  const StatsDb* stats = nullptr;
  double tick_s = 0.1;
  int clock_ticks = 0;
  MapGrid map;
  std::map<UnitTag, Unit> units;  // tag order is the resolution order
  std::array<PlayerState, 3> players{};
  std::map<std::string, Camera> cameras;  // per agent
  std::vector<MineralPatch> minerals;
  std::vector<Geyser> geysers;
  std::vector<AreaEffect> effects;
  std::vector<AirdropWave> pending_airdrops;
  OpponentConfig opponent;
  PlayerId tasked_player = 1;
  UnitTag next_tag = 1;
  std::mt19937_64 rng;
  int event_seq = 0;

  double clock_s() const { return clock_ticks * tick_s; }
  const UnitStats& stats_of(const Unit& u) const { return stats->unit(u.type); }

  Unit* find_unit(UnitTag tag);
  const Unit* find_unit(UnitTag tag) const;
  Unit& spawn(const std::string& type, PlayerId owner, Vec2 pos, bool completed = true);
  void remove_unit(UnitTag tag);

  // effective (upgrade-adjusted) combat numbers
  double weapon_cooldown(const Unit& u) const;
  double weapon_range(const Unit& u) const;
  double weapon_damage(const Unit& u) const;
  double move_speed(const Unit& u) const;
  double sight_range(const Unit& u) const;

  bool is_air_like(const Unit& u) const;  // flying or lifted
  bool can_hit(const Unit& attacker, const Unit& target) const;
  bool is_visible(PlayerId viewer, const Unit& u) const;
  bool position_powered(PlayerId p, Vec2 pos) const;
  bool ground_blocked(Vec2 pos) const;  // grid footprints + active force fields

  void block_footprint(const std::string& type, Vec2 pos, int delta);
  bool footprint_free(const std::string& type, Vec2 pos) const;

  // applied (never overkill) damage; returns the amount actually dealt
  double apply_damage(Unit& target, double raw, bool ranged, UnitTag attacker,
                      std::vector<GameEvent>& events);
  void recompute_supply();

  GameEvent& push_event(std::vector<GameEvent>& events, GameEvent::Kind kind);
  std::uint64_t state_hash() const;
};

Camera agent_camera(const WorldState& world, const AgentContext& ctx);

// One 0.1 s tick: effects, scripted opponent, movement, combat, regen,
// production, economy, deaths, supply bookkeeping.
std::vector<GameEvent> step(WorldState& world);

// Rule policy for the non-tasked player; level 1 holds ground and returns
// fire, level 2 adds focus fire, level 3 adds regrouping and worker flee.
void scripted_opponent_tick(WorldState& world, std::vector<GameEvent>& events);

// Applies one resolved backend call for the acting agent. Selection and
// camera changes mutate ctx / world.cameras; world mutations follow the call.
std::optional<ActionError> execute_call(WorldState& world, AgentContext& ctx,
                                        const BackendCall& call,
                                        std::vector<GameEvent>& events);

}  // namespace textrts
