#include "textrts/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "textrts/util.hpp"

namespace textrts {

using nlohmann::json;
using Category = ActionError::Category;

std::string BridgeEntry::signature() const {
  std::string s = "<" + name + "(";
  for (std::size_t i = 0; i < arg_schema.size(); ++i) {
    if (i) s += ", ";
    s += arg_schema[i];
  }
  s += ")>";
  return s;
}

namespace {

const std::set<std::string> kKnownPlaceholders = {
    "queued", "now",  "select",      "add",         "screen",
    "minimap", "auto", "screen_tag",  "screen_tag2", "world_tag",
    "screen1_tag", "screen2_tag", "screen1_tag2", "screen2_tag2"};

int count_kind(const std::vector<std::string>& schema, const std::string& kind) {
  return static_cast<int>(std::count(schema.begin(), schema.end(), kind));
}

void validate_entry(const BridgeEntry& e) {
  int tags = count_kind(e.arg_schema, "tag");
  for (const auto& call : e.calls) {
    for (const auto& arg : call.args) {
      if (!kKnownPlaceholders.count(arg)) {
        throw std::runtime_error("entry " + e.name + ": unknown placeholder '" + arg + "'");
      }
      bool needs_one_tag = arg == "screen_tag" || arg == "world_tag" ||
                           arg == "screen1_tag" || arg == "screen2_tag";
      bool needs_two_tags =
          arg == "screen_tag2" || arg == "screen1_tag2" || arg == "screen2_tag2";
      if (needs_one_tag && tags < 1) {
        throw std::runtime_error("entry " + e.name + ": placeholder '" + arg +
                                 "' has no tag argument to bind");
      }
      if (needs_two_tags && tags < 2) {
        throw std::runtime_error("entry " + e.name + ": placeholder '" + arg +
                                 "' needs a second tag argument");
      }
      if (arg == "screen" && count_kind(e.arg_schema, "screen") < 1) {
        throw std::runtime_error("entry " + e.name + ": unbound 'screen' placeholder");
      }
      if (arg == "minimap" && count_kind(e.arg_schema, "minimap") < 1) {
        throw std::runtime_error("entry " + e.name + ": unbound 'minimap' placeholder");
      }
    }
  }
}

}  // namespace

Registry Registry::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open action-space definition: " + path);
  json j = json::parse(in);

  Registry reg;
  std::map<int, std::string> function_names;
  for (const auto& spec : j.at("actions")) {
    BridgeEntry e;
    e.name = spec.at("name").get<std::string>();
    if (spec.contains("args")) e.arg_schema = spec.at("args").get<std::vector<std::string>>();
    e.availability = spec.value("availability", "always");
    e.unit = spec.value("unit", "any");
    e.category = spec.value("category", "control");
    e.description = spec.value("desc", "");
    for (const auto& c : spec.at("calls")) {
      CallTemplate t;
      t.function_id = c.at("id").get<int>();
      t.function_name = c.at("fn").get<std::string>();
      if (c.contains("args")) t.args = c.at("args").get<std::vector<std::string>>();
      auto [it, fresh] = function_names.emplace(t.function_id, t.function_name);
      if (!fresh && it->second != t.function_name) {
        throw std::runtime_error("entry " + e.name + ": function id " +
                                 std::to_string(t.function_id) + " already bound to " +
                                 it->second);
      }
      e.calls.push_back(std::move(t));
    }
    validate_entry(e);
    if (reg.index_.count(e.name)) {
      throw std::runtime_error("duplicate action name: " + e.name);
    }
    reg.index_[e.name] = reg.entries_.size();
    reg.entries_.push_back(std::move(e));
  }
  return reg;
}

const BridgeEntry* Registry::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

std::variant<UnitTag, ActionError> find_idle_building(const std::string& type, PlayerId owner,
                                                      const WorldState& world) {
  for (const auto& [tag, u] : world.units) {  // tag order = lowest tag wins
    if (u.owner == owner && u.type == type && u.alive() && !u.under_construction &&
        u.production.empty()) {
      return tag;
    }
  }
  ActionError e;
  e.category = Category::NoIdleBuilding;
  e.detail = "no idle " + type;
  return e;
}

namespace {

struct CellRect {
  int x0, y0, x1, y1;  // inclusive
};

CellRect anchor_rect(const WorldState& world, const Unit& u) {
  const UnitStats& s = world.stats_of(u);
  int w = std::max(1, s.footprint_w);
  int h = std::max(1, s.footprint_h);
  int x0 = static_cast<int>(std::floor(u.pos.x - w / 2.0 + 0.25));
  int y0 = static_cast<int>(std::floor(u.pos.y - h / 2.0 + 0.25));
  return {x0, y0, x0 + w - 1, y0 + h - 1};
}

bool cells_free(const WorldState& world, Vec2 pos, int fw, int fh) {
  int x0 = static_cast<int>(std::floor(pos.x - fw / 2.0 + 0.25));
  int y0 = static_cast<int>(std::floor(pos.y - fh / 2.0 + 0.25));
  for (int y = y0; y < y0 + fh; ++y) {
    for (int x = x0; x < x0 + fw; ++x) {
      if (!world.map.buildable(x, y)) return false;
    }
  }
  return true;
}

}  // namespace

std::variant<Vec2, ActionError> auto_place(const WorldState& world, UnitTag near,
                                           int footprint_w, int footprint_h,
                                           bool requires_power, PlayerId player) {
  const Unit* n = world.find_unit(near);
  if (!n || !n->alive()) {
    ActionError e;
    e.category = Category::InvalidTarget;
    e.detail = "placement anchor " + to_hex(near) + " is gone";
    return e;
  }
  CellRect base = anchor_rect(world, *n);
  double cx = (base.x0 + base.x1 + 1) / 2.0;  // geometric centre of the rect
  double cy = (base.y0 + base.y1 + 1) / 2.0;

  for (int r = 1; r <= 12; ++r) {
    // Boundary cells of the footprint rect inflated by r, clockwise from
    // north: sort by atan2(dx, -dy), which is 0 due north and grows east.
    int x0 = base.x0 - r, x1 = base.x1 + r;
    int y0 = base.y0 - r, y1 = base.y1 + r;
    std::vector<GridCoord> ring;
    for (int x = x0; x <= x1; ++x) {
      ring.push_back({x, y0});
      ring.push_back({x, y1});
    }
    for (int y = y0 + 1; y <= y1 - 1; ++y) {
      ring.push_back({x0, y});
      ring.push_back({x1, y});
    }
    std::sort(ring.begin(), ring.end(), [&](GridCoord a, GridCoord b) {
      auto angle = [&](GridCoord g) {
        double dx = g.x + 0.5 - cx;
        double dy = g.y + 0.5 - cy;
        double th = std::atan2(dx, -dy);
        return th < -1e-12 ? th + 2 * 3.14159265358979323846 : th;
      };
      return angle(a) < angle(b);
    });
    for (GridCoord cell : ring) {
      Vec2 pos{cell.x + 0.5, cell.y + 0.5};
      if (!cells_free(world, pos, footprint_w, footprint_h)) continue;
      if (requires_power && !world.position_powered(player, pos)) continue;
      return pos;
    }
  }
  ActionError e;
  e.category = Category::InvalidPosition;
  e.detail = "no free cell within radius 12 of " + to_hex(near);
  return e;
}

namespace {

bool kind_matches(const std::string& schema_kind, const ArgValue& v) {
  using K = ArgValue::Kind;
  if (schema_kind == "screen" || schema_kind == "minimap") return v.kind == K::Coord;
  if (schema_kind == "tag") return v.kind == K::Tag;
  if (schema_kind == "ident") return v.kind == K::Ident;
  if (schema_kind == "text") return v.kind == K::Text;
  return false;
}

std::string built_type_of(const std::string& function_name) {
  if (starts_with(function_name, "Build_") && function_name.ends_with("_screen")) {
    return function_name.substr(6, function_name.size() - 6 - 7);
  }
  if (starts_with(function_name, "TrainWarp_") && function_name.ends_with("_screen")) {
    return function_name.substr(10, function_name.size() - 10 - 7);
  }
  return "";
}

const Unit* lowest_tag_unit(const WorldState& w, PlayerId p,
                            const std::function<bool(const Unit&)>& pred) {
  for (const auto& [tag, u] : w.units) {
    if (u.owner == p && u.alive() && pred(u)) return &u;
  }
  return nullptr;
}

// Anchor for 'auto' placements: pylons (power) first for powered buildings,
// then the town hall, then any structure, then a worker.
const Unit* auto_anchor(const WorldState& w, PlayerId p, bool want_power) {
  if (want_power) {
    if (const Unit* u = lowest_tag_unit(w, p, [&](const Unit& x) {
          return !x.under_construction &&
                 (x.type == "Pylon" || (x.type == "WarpPrism" && x.phasing_mode));
        })) {
      return u;
    }
  }
  if (const Unit* u = lowest_tag_unit(
          w, p, [&](const Unit& x) { return x.type == "Nexus" && !x.under_construction; })) {
    return u;
  }
  if (const Unit* u = lowest_tag_unit(
          w, p, [&](const Unit& x) { return w.stats_of(x).is_structure; })) {
    return u;
  }
  return lowest_tag_unit(w, p, [&](const Unit& x) { return w.stats_of(x).is_worker; });
}

Vec2 quadrant_center(const MapGrid& map, int q) {
  double qx = (q % 2 == 0) ? map.width / 4.0 : 3.0 * map.width / 4.0;
  double qy = (q / 2 == 0) ? map.height / 4.0 : 3.0 * map.height / 4.0;
  return {qx, qy};
}

struct Resolver {
  const WorldState& world;
  const AgentContext& ctx;
  const BridgeEntry& entry;
  const TextAction& action;
  Camera cam;
  std::vector<const ArgValue*> coords;  // schema order
  std::vector<const ArgValue*> tags;
  int coord_cursor = 0;
  int tag_cursor = 0;
  std::optional<ActionError> err;

  Resolver(const WorldState& w, const AgentContext& c, const BridgeEntry& e,
           const TextAction& a)
      : world(w), ctx(c), entry(e), action(a), cam(agent_camera(w, c)) {
    for (std::size_t i = 0; i < e.arg_schema.size(); ++i) {
      const std::string& k = e.arg_schema[i];
      if (k == "screen" || k == "minimap") coords.push_back(&a.args[i]);
      if (k == "tag") tags.push_back(&a.args[i]);
    }
  }

  void fail(Category cat, std::string detail) {
    if (err) return;
    ActionError e;
    e.category = cat;
    e.action = action;
    e.detail = std::move(detail);
    err = e;
  }

  const Unit* tag_unit(int index, const char* what) {
    if (index >= static_cast<int>(tags.size())) {
      fail(Category::BadArity, "missing tag argument");
      return nullptr;
    }
    const Unit* u = world.find_unit(tags[index]->tag);
    if (!u || !u->alive()) {
      fail(Category::InvalidTarget,
           std::string(what) + " " + to_hex(tags[index]->tag) + " is dead or unknown");
      return nullptr;
    }
    return u;
  }

  bool resolve_screen_coord(BackendCall& call) {
    const ArgValue* v = coords[coord_cursor++];
    if (v->x >= kFrameSize || v->y >= kFrameSize) {
      fail(Category::InvalidPosition, "screen coordinate outside the 64x64 frame");
      return false;
    }
    call.has_screen = true;
    call.screen = {v->x, v->y};
    call.has_world = true;
    call.world_pos = screen_to_world({v->x, v->y}, cam);
    return true;
  }

  bool resolve_minimap_coord(BackendCall& call) {
    const ArgValue* v = coords[coord_cursor++];
    if (v->x >= kFrameSize || v->y >= kFrameSize) {
      fail(Category::InvalidPosition, "minimap coordinate outside the 64x64 frame");
      return false;
    }
    call.has_minimap = true;
    call.minimap = {v->x, v->y};
    call.has_world = true;
    call.world_pos = minimap_to_world({v->x, v->y}, world.map.width, world.map.height);
    return true;
  }

  // 'screen_tag' resolution: build/warp templates auto-place near the tag,
  // everything else targets the tag's exact on-screen position.
  bool resolve_screen_tag(BackendCall& call, int index, bool advance) {
    const Unit* target = tag_unit(index, "target");
    if (!target) return false;
    if (advance) ++tag_cursor;
    std::string built = built_type_of(call.function_name);
    if (!built.empty()) {
      const UnitStats& bs = world.stats->unit(built);
      bool powered = bs.requires_power || starts_with(call.function_name, "TrainWarp_");
      int fw = std::max(1, bs.footprint_w);
      int fh = std::max(1, bs.footprint_h);
      auto placed = auto_place(world, target->tag, fw, fh, powered, ctx.player);
      if (std::holds_alternative<ActionError>(placed)) {
        ActionError e = std::get<ActionError>(placed);
        fail(e.category, e.detail);
        return false;
      }
      call.has_world = true;
      call.world_pos = std::get<Vec2>(placed);
      FrameResult fr = world_to_screen(call.world_pos, cam);
      if (fr.in_frame) {
        call.has_screen = true;
        call.screen = fr.pixel;
      }
      return true;
    }
    FrameResult fr = world_to_screen(target->pos, cam);
    if (!fr.in_frame) {
      fail(Category::InvalidTarget, "target " + to_hex(target->tag) + " is not on screen");
      return false;
    }
    call.target_tag = target->tag;
    call.has_screen = true;
    call.screen = fr.pixel;
    call.has_world = true;
    call.world_pos = target->pos;
    return true;
  }

  bool resolve_select_rect(BackendCall& call, int index, bool advance) {
    const Unit* target = tag_unit(index, "selection tag");
    if (!target) return false;
    if (advance) ++tag_cursor;
    if (target->owner != ctx.player) {
      fail(Category::InvalidTarget, "cannot select enemy unit " + to_hex(target->tag));
      return false;
    }
    FrameResult fr = world_to_screen(target->pos, cam);
    if (!fr.in_frame) {
      fail(Category::InvalidTarget, "unit " + to_hex(target->tag) + " is not on screen");
      return false;
    }
    // 2x2-pixel rectangle centred on the unit's screen position.
    call.has_rect = true;
    call.rect_lo = {fr.pixel.x - 1, fr.pixel.y - 1};
    call.rect_hi = {fr.pixel.x, fr.pixel.y};
    return true;
  }

  bool resolve_auto(BackendCall& call) {
    call.has_world = true;
    if (entry.category == "easy_build" || entry.category == "build") {
      std::string built = built_type_of(call.function_name);
      const UnitStats& bs = world.stats->unit(built);
      if (built == "Assimilator") {
        const Unit* anchor = auto_anchor(world, ctx.player, false);
        if (!anchor) {
          fail(Category::InvalidPosition, "no base to place near");
          return false;
        }
        const Geyser* best = nullptr;
        double best_d = 1e18;
        for (const auto& g : world.geysers) {
          if (g.assimilator != 0) continue;
          double d = distance(g.pos, anchor->pos);
          if (d < best_d) {
            best_d = d;
            best = &g;
          }
        }
        if (!best) {
          fail(Category::InvalidPosition, "no free geyser");
          return false;
        }
        call.world_pos = best->pos;
        return true;
      }
      const Unit* anchor = auto_anchor(world, ctx.player, bs.requires_power);
      if (!anchor) {
        fail(Category::InvalidPosition, "no base to place near");
        return false;
      }
      auto placed = auto_place(world, anchor->tag, std::max(1, bs.footprint_w),
                               std::max(1, bs.footprint_h), bs.requires_power, ctx.player);
      if (std::holds_alternative<ActionError>(placed)) {
        ActionError e = std::get<ActionError>(placed);
        fail(e.category, e.detail);
        return false;
      }
      call.world_pos = std::get<Vec2>(placed);
      return true;
    }
    if (entry.category == "warp") {
      const Unit* anchor = auto_anchor(world, ctx.player, true);
      if (!anchor) {
        fail(Category::InvalidPosition, "no power source to warp near");
        return false;
      }
      auto placed = auto_place(world, anchor->tag, 1, 1, true, ctx.player);
      if (std::holds_alternative<ActionError>(placed)) {
        ActionError e = std::get<ActionError>(placed);
        fail(e.category, e.detail);
        return false;
      }
      call.world_pos = std::get<Vec2>(placed);
      return true;
    }
    // Easy-control resolutions.
    if (call.function_name == "Attack_minimap") {
      Vec2 sum{};
      int n = 0;
      for (const auto& [tag, u] : world.units) {
        if (u.owner == ctx.player || !u.alive() || u.in_cargo) continue;
        if (!world.is_visible(ctx.player, u)) continue;
        sum = sum + u.pos;
        ++n;
      }
      PlayerId foe = ctx.player == 1 ? 2 : 1;
      call.world_pos = n > 0 ? sum * (1.0 / n) : world.players[foe].spawn_center;
      return true;
    }
    if (call.function_name == "Move_screen") {  // defend / retreat to own base
      call.world_pos = world.players[ctx.player].spawn_center;
      return true;
    }
    if (call.function_name == "Move_minimap") {  // scan the stalest quadrant
      const auto& seen = world.players[ctx.player].quadrant_seen_step;
      int best = 0;
      for (int q = 1; q < 4; ++q) {
        if (seen[q] < seen[best]) best = q;
      }
      call.world_pos = quadrant_center(world.map, best);
      FrameResult fr = world_to_minimap(call.world_pos, world.map.width, world.map.height);
      if (fr.in_frame) {
        call.has_minimap = true;
        call.minimap = fr.pixel;
      }
      return true;
    }
    call.world_pos = world.players[ctx.player].spawn_center;
    return true;
  }
};

}  // namespace

TransformResult transform(const Registry& registry, const TextAction& action,
                          const AgentContext& ctx, const WorldState& world) {
  TransformResult result;
  auto fail = [&](Category cat, std::string detail) {
    ActionError e;
    e.category = cat;
    e.action = action;
    e.detail = std::move(detail);
    result.error = e;
    result.calls.clear();
    return result;
  };

  const BridgeEntry* entry = registry.find(action.name);
  if (!entry) return fail(Category::UnknownAction, "not in the action space");

  if (action.args.size() != entry->arg_schema.size()) {
    return fail(Category::BadArity, "expected " + std::to_string(entry->arg_schema.size()) +
                                        " argument(s), got " +
                                        std::to_string(action.args.size()));
  }
  for (std::size_t i = 0; i < action.args.size(); ++i) {
    if (!kind_matches(entry->arg_schema[i], action.args[i])) {
      return fail(Category::BadArity,
                  "argument " + std::to_string(i + 1) + " should be a " + entry->arg_schema[i]);
    }
  }

  bool bypass_sets = action.name == "No_Operation" || action.name == "MessageTo";
  if (!bypass_sets && !ctx.action_sets.count(entry->category)) {
    return fail(Category::Unavailable, "not enabled for agent " + ctx.agent_name);
  }

  const std::string& avail = entry->availability;
  if (starts_with(avail, "tech:")) {
    std::string tech = avail.substr(5);
    if (!world.players[ctx.player].tech.count(tech)) {
      return fail(Category::Unavailable, tech + " not researched");
    }
  } else if (avail == "mode:easy_build" && !ctx.easy_build) {
    return fail(Category::Unavailable, "easy-build mode only");
  } else if (avail == "mode:easy_control" && !ctx.easy_control) {
    return fail(Category::Unavailable, "easy-control mode only");
  }

  UnitTag producer = 0;
  if (starts_with(avail, "idle:")) {
    auto found = find_idle_building(avail.substr(5), ctx.player, world);
    if (std::holds_alternative<ActionError>(found)) {
      ActionError e = std::get<ActionError>(found);
      return fail(e.category, e.detail);
    }
    producer = std::get<UnitTag>(found);
  }

  Resolver res(world, ctx, *entry, action);
  for (const CallTemplate& tpl : entry->calls) {
    BackendCall call;
    call.function_id = tpl.function_id;
    call.function_name = tpl.function_name;
    bool skip_paired_rect = false;
    for (const std::string& arg : tpl.args) {
      if (res.err) break;
      if (arg == "queued") {
        call.queueing = BackendCall::Queueing::Queued;
      } else if (arg == "now") {
        call.queueing = BackendCall::Queueing::Now;
      } else if (arg == "select") {
        call.select_add = false;
      } else if (arg == "add") {
        call.select_add = true;
      } else if (arg == "screen") {
        res.resolve_screen_coord(call);
      } else if (arg == "minimap") {
        res.resolve_minimap_coord(call);
      } else if (arg == "screen_tag") {
        res.resolve_screen_tag(call, res.tag_cursor, /*advance=*/true);
      } else if (arg == "screen_tag2") {
        res.resolve_screen_tag(call, 1, /*advance=*/false);
      } else if (arg == "world_tag") {
        if (const Unit* t = res.tag_unit(res.tag_cursor, "camera target")) {
          call.target_tag = t->tag;
          call.has_world = true;
          call.world_pos = t->pos;
          res.cam = make_camera(t->pos, world.map.width, world.map.height);
        }
      } else if (arg == "screen1_tag") {
        res.resolve_select_rect(call, res.tag_cursor, /*advance=*/true);
        skip_paired_rect = true;
      } else if (arg == "screen2_tag") {
        if (!skip_paired_rect) res.fail(Category::BadArity, "stray screen2_tag");
      } else if (arg == "screen1_tag2") {
        res.resolve_select_rect(call, 1, /*advance=*/false);
        skip_paired_rect = true;
      } else if (arg == "screen2_tag2") {
        if (!skip_paired_rect) res.fail(Category::BadArity, "stray screen2_tag2");
      } else if (arg == "auto") {
        res.resolve_auto(call);
      }
    }
    if (res.err) {
      result.error = res.err;
      result.calls.clear();
      return result;
    }
    bool wants_producer = starts_with(call.function_name, "Train_") ||
                          starts_with(call.function_name, "Research_");
    if (wants_producer && producer != 0) call.target_tag = producer;
    if (starts_with(call.function_name, "TrainWarp_")) {
      auto gate = find_idle_building("WarpGate", ctx.player, world);
      if (std::holds_alternative<ActionError>(gate)) {
        ActionError e = std::get<ActionError>(gate);
        return fail(e.category, e.detail);
      }
      call.target_tag = std::get<UnitTag>(gate);
    }
    result.calls.push_back(std::move(call));
  }
  return result;
}

std::vector<ActionSignature> valid_actions(const Registry& registry, const AgentContext& ctx,
                                           const WorldState& world) {
  std::vector<ActionSignature> out;
  auto team_has = [&](const std::function<bool(const Unit&)>& pred) {
    for (UnitTag tag : ctx.team_units) {
      const Unit* u = world.find_unit(tag);
      if (u && u->active() && pred(*u)) return true;
    }
    return false;
  };

  for (const BridgeEntry& e : registry.entries()) {
    bool bypass = e.name == "No_Operation" || e.name == "MessageTo";
    if (!bypass) {
      if (!ctx.action_sets.count(e.category)) continue;
      const std::string& avail = e.availability;
      if (starts_with(avail, "tech:")) {
        if (!world.players[ctx.player].tech.count(avail.substr(5))) continue;
      } else if (starts_with(avail, "idle:")) {
        if (std::holds_alternative<ActionError>(
                find_idle_building(avail.substr(5), ctx.player, world))) {
          continue;
        }
      } else if (avail == "mode:easy_build") {
        if (!ctx.easy_build) continue;
      } else if (avail == "mode:easy_control") {
        if (!ctx.easy_control) continue;
      }

      bool producer_entry =
          e.category == "train" || e.category == "research" || e.category == "warp";
      if (!producer_entry && e.unit != "none") {
        if (e.unit == "any") {
          if (!team_has([](const Unit&) { return true; })) continue;
        } else if (e.unit == "attackable") {
          if (!team_has([&](const Unit& u) { return world.stats_of(u).has_weapon(); })) continue;
        } else if (e.category == "build" || e.category == "easy_build") {
          // Worker-performed; any living worker of this player will do.
          bool worker = false;
          for (const auto& [tag, u] : world.units) {
            if (u.owner == ctx.player && u.active() && world.stats_of(u).is_worker) {
              worker = true;
              break;
            }
          }
          if (!worker) continue;
        } else {
          auto types = split(e.unit, '|');
          if (!team_has([&](const Unit& u) {
                return std::find(types.begin(), types.end(), u.type) != types.end();
              })) {
            continue;
          }
        }
      }
    }
    out.push_back({e.signature(), e.description});
  }
  return out;
}

}  // namespace textrts
