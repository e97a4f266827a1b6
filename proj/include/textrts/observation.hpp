#pragma once

#include <map>
#include <string>
#include <vector>

#include "textrts/agents.hpp"
#include "textrts/bridge.hpp"
#include "textrts/sim.hpp"

namespace textrts {

struct WikiEntry {
  std::string unit_type;
  std::string description;
  std::vector<std::string> strong_against;
  std::vector<std::string> weak_against;
};

struct WikiDb {
  std::map<std::string, WikiEntry> entries;
  static WikiDb load(const std::string& path);
  const WikiEntry* find(const std::string& type) const;
};

// Block titles, line templates and sentinels live in a data file so prompts
// can be restyled without touching code. Placeholders use {name} syntax.
struct ObservationTemplates {
  std::map<int, std::string> titles;  // block id -> heading
  std::string unit_line;
  std::string message_line;
  std::string empty_marker;
  static ObservationTemplates load(const std::string& path);
};

struct ObservationBlock {
  int id = 0;
  std::string title;
  std::string body;
};

// The twelve information blocks, ascending id, none ever omitted.
struct ObservationText {
  std::vector<ObservationBlock> blocks;
  std::string rendered() const;
};

struct LastStep {
  std::vector<GameEvent> events;
  std::vector<TextAction> actions;
  std::vector<ActionError> errors;
  std::vector<Message> inbox;
};

ObservationText build_observation(const AgentRuntime& agent, const AgentContext& ctx,
                                  const WorldState& snapshot, const Registry& registry,
                                  const WikiDb& wiki, const ObservationTemplates& templates,
                                  const ScenarioConfig& scenario, const LastStep& last,
                                  const std::vector<std::string>& comm_targets);

struct FeatureGrid {
  std::string channel;
  int width = kFrameSize;
  int height = kFrameSize;
  std::vector<int> cells;  // row-major

  int& at(int x, int y) { return cells[static_cast<std::size_t>(y) * width + x]; }
  int at(int x, int y) const { return cells[static_cast<std::size_t>(y) * width + x]; }
  std::string to_text() const;  // dimensions header + labelled rows
};

// Symbolic 64x64 camera-frame export: ownership, unit density, terrain.
std::vector<FeatureGrid> render_feature_grid(const WorldState& world, const Camera& camera,
                                             const std::vector<std::string>& channels);

struct ChatExample {
  std::string input;
  std::string output;
};

struct ChatRequest {
  std::string system;
  std::vector<ChatExample> examples;
  std::string user;
  std::vector<std::string> attachments;

  std::string to_json() const;  // chat-completions messages payload
  std::uint64_t hash() const;
};

struct RolePrompts {
  std::string system;
  std::vector<ChatExample> examples;
};

struct PromptDb {
  std::map<std::string, RolePrompts> roles;
  static PromptDb load(const std::string& dir);
  const RolePrompts& for_role(const std::string& role) const;
};

ChatRequest assemble_query(const RolePrompts& prompts, const ObservationText& obs,
                           const std::vector<FeatureGrid>& grids);

}  // namespace textrts
