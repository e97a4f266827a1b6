#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "textrts/geometry.hpp"
#include "textrts/grammar.hpp"

namespace textrts {

using UnitTag = std::uint64_t;
using PlayerId = int;

// A fully resolved backend function call, ready for the simulator.
// function_id / function_name / queueing come verbatim from the registry
// template; the payload fields below are filled by the bridge.
struct BackendCall {
  int function_id = 0;
  std::string function_name;
  enum class Queueing { Now, Queued } queueing = Queueing::Queued;

  bool has_screen = false;
  GridCoord screen;
  bool has_minimap = false;
  GridCoord minimap;
  bool has_world = false;   // camera moves and auto-resolved placements
  Vec2 world_pos;
  UnitTag target_tag = 0;   // unit payload (also the bound idle producer)
  bool has_rect = false;    // select_rect
  GridCoord rect_lo, rect_hi;
  bool select_add = false;  // select_rect 'add' mode

  const char* queueing_name() const {
    return queueing == Queueing::Now ? "now" : "queued";
  }
};

struct ActionError {
  enum class Category {
    UnknownAction,
    BadArity,
    Unavailable,
    InvalidTarget,
    InvalidPosition,
    InsufficientResources,
    NoIdleBuilding,
  };

  Category category = Category::UnknownAction;
  TextAction action;
  std::string detail;

  static const char* category_name(Category c);
  std::string text() const;  // "unavailable: <Warp_Zealot()> (WarpGate not researched)"
};

// The acting agent as the bridge and simulator see it: identity, current
// selection, controlled units and the action subsets its profile enables.
struct AgentContext {
  std::string agent_name;
  PlayerId player = 1;
  std::vector<UnitTag> selection;
  std::vector<UnitTag> team_units;       // flattened team caches
  std::set<std::string> action_sets;     // registry categories this agent may use
  bool easy_build = false;
  bool easy_control = false;
};

}  // namespace textrts
