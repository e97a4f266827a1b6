#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "textrts/calls.hpp"
#include "textrts/sim.hpp"

namespace textrts {

// Declarative action-space registry: each entry binds a text-action name to
// its argument schema and an ordered list of backend call templates. The
// shipped Protoss definition lives in data/actions_protoss.json.

struct CallTemplate {
  int function_id = 0;
  std::string function_name;
  // Verbatim template arguments: "queued", "now", "select", "add", "screen",
  // "minimap", "screen_tag", "screen_tag2", "world_tag", "screen1_tag",
  // "screen2_tag", "screen1_tag2", "screen2_tag2", "auto".
  std::vector<std::string> args;
};

struct BridgeEntry {
  std::string name;
  std::vector<std::string> arg_schema;  // "screen" | "minimap" | "tag" | "ident" | "text"
  std::vector<CallTemplate> calls;
  // "always" | "tech:<name>" | "idle:<structure>" | "mode:easy_build" |
  // "mode:easy_control"
  std::string availability = "always";
  // Performing unit: "any", "attackable", "none", a type name, or
  // "TypeA|TypeB". For train/research/warp entries this is the producer.
  std::string unit = "any";
  std::string category = "control";
  std::string description;

  std::string signature() const;  // "<Move_Screen(screen)>"
};

class Registry {
 public:
  // Throws std::runtime_error naming the offending entry on duplicate names,
  // unbound placeholders or conflicting function ids.
  static Registry load(const std::string& path);

  const BridgeEntry* find(const std::string& name) const;
  const std::vector<BridgeEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<BridgeEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

struct TransformResult {
  std::vector<BackendCall> calls;
  std::optional<ActionError> error;
  bool ok() const { return !error.has_value(); }
};

// Pure function of (action, ctx, world): resolves the entry's call templates
// into concrete calls, including implicit camera moves for _Near actions and
// idle-producer binding for train/research/warp. Exactly one ActionError on
// failure, never partial output.
TransformResult transform(const Registry& registry, const TextAction& action,
                          const AgentContext& ctx, const WorldState& world);

struct ActionSignature {
  std::string signature;
  std::string description;
};

// Entries whose availability predicate holds for this agent now, in registry
// order.
std::vector<ActionSignature> valid_actions(const Registry& registry, const AgentContext& ctx,
                                           const WorldState& world);

// Deterministic outward ring scan around `near`'s footprint: radius 1..12,
// within each ring clockwise from north (north = -y). Returns the centre of
// the first free cell whose footprint fits (and is powered, when required).
std::variant<Vec2, ActionError> auto_place(const WorldState& world, UnitTag near,
                                           int footprint_w, int footprint_h,
                                           bool requires_power, PlayerId player);

// Lowest-tag completed structure of `type` with an empty production queue.
std::variant<UnitTag, ActionError> find_idle_building(const std::string& type, PlayerId owner,
                                                      const WorldState& world);

}  // namespace textrts
