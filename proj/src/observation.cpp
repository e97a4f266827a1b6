#include "textrts/observation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "textrts/util.hpp"

namespace textrts {

using nlohmann::json;
namespace fs = std::filesystem;

WikiDb WikiDb::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open wiki file: " + path);
  json j = json::parse(in);
  WikiDb db;
  for (auto& [type, spec] : j.items()) {
    WikiEntry e;
    e.unit_type = type;
    e.description = spec.value("description", "");
    if (spec.contains("strong_against")) {
      e.strong_against = spec.at("strong_against").get<std::vector<std::string>>();
    }
    if (spec.contains("weak_against")) {
      e.weak_against = spec.at("weak_against").get<std::vector<std::string>>();
    }
    db.entries.emplace(type, std::move(e));
  }
  return db;
}

const WikiEntry* WikiDb::find(const std::string& type) const {
  auto it = entries.find(type);
  return it == entries.end() ? nullptr : &it->second;
}

ObservationTemplates ObservationTemplates::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open observation templates: " + path);
  json j = json::parse(in);
  ObservationTemplates t;
  for (auto& [id, title] : j.at("titles").items()) {
    t.titles[std::stoi(id)] = title.get<std::string>();
  }
  t.unit_line = j.at("unit_line").get<std::string>();
  t.message_line = j.at("message_line").get<std::string>();
  t.empty_marker = j.at("empty_marker").get<std::string>();
  return t;
}

namespace {

std::string substitute(std::string tpl, const std::map<std::string, std::string>& vars) {
  for (const auto& [key, value] : vars) {
    std::string needle = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = tpl.find(needle, pos)) != std::string::npos) {
      tpl.replace(pos, needle.size(), value);
      pos += value.size();
    }
  }
  return tpl;
}

std::string fmt_int(double v) { return std::to_string(static_cast<long long>(v + 0.5)); }

std::string unit_status(const WorldState& w, const Unit& u) {
  std::vector<std::string> flags;
  double now = w.clock_s();
  if (u.under_construction) flags.push_back("warping/constructing");
  if (u.lifted_until_s > now) flags.push_back("lifted");
  if (u.stasis_until_s > now) flags.push_back("in stasis");
  if (u.shield_aura_until_s > now) flags.push_back("guardian shield");
  if (u.phase_shade != 0) flags.push_back("phase shifting");
  if (u.pulsar_beam_on) flags.push_back("pulsar beam");
  if (u.surveillance_mode) flags.push_back("surveillance");
  if (u.phasing_mode) flags.push_back("phasing");
  if (!u.cargo.empty()) flags.push_back("carrying " + std::to_string(u.cargo.size()));
  if (flags.empty()) return "ok";
  std::string out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) out += ", ";
    out += flags[i];
  }
  return out;
}

}  // namespace

std::string ObservationText::rendered() const {
  std::ostringstream os;
  for (const ObservationBlock& b : blocks) {
    os << "(" << b.id << ") " << b.title << ":\n" << b.body << "\n";
  }
  return os.str();
}

ObservationText build_observation(const AgentRuntime& agent, const AgentContext& ctx,
                                  const WorldState& snapshot, const Registry& registry,
                                  const WikiDb& wiki, const ObservationTemplates& tpl,
                                  const ScenarioConfig& scenario, const LastStep& last,
                                  const std::vector<std::string>& comm_targets) {
  ObservationText obs;
  const PlayerState& me = snapshot.players[ctx.player];
  Camera cam = agent_camera(snapshot, ctx);
  auto empty = [&](std::string body) { return body.empty() ? tpl.empty_marker : body; };
  auto title = [&](int id) {
    auto it = tpl.titles.find(id);
    return it == tpl.titles.end() ? std::string("block " + std::to_string(id)) : it->second;
  };
  auto add = [&](int id, std::string body) {
    obs.blocks.push_back({id, title(id), empty(std::move(body))});
  };

  {  // (1) global information
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "time: %.1f s\nminerals: %s\nvespene: %s\nsupply: %s/%s",
                  snapshot.clock_s(), fmt_int(me.minerals).c_str(), fmt_int(me.vespene).c_str(),
                  fmt_int(me.supply_used).c_str(), fmt_int(me.supply_cap).c_str());
    add(1, buf);
  }

  {  // (2) unit counts per visible player
    std::map<PlayerId, std::map<std::string, int>> counts;
    for (const auto& [tag, u] : snapshot.units) {
      if (!u.alive() || u.in_cargo) continue;
      if (u.owner == ctx.player || snapshot.is_visible(ctx.player, u)) {
        counts[u.owner][u.type] += 1;
      }
    }
    std::string body;
    for (const auto& [pid, types] : counts) {
      body += pid == ctx.player ? "own units:" : "enemy units (visible):";
      for (const auto& [type, n] : types) {
        body += " " + type + " x" + std::to_string(n) + ",";
      }
      if (body.ends_with(',')) body.pop_back();
      body += "\n";
    }
    if (!body.empty()) body.pop_back();
    add(2, body);
  }

  std::set<std::string> on_screen_types;
  {  // (3) units on screen
    std::string body;
    for (const auto& [tag, u] : snapshot.units) {
      if (!u.alive() || u.in_cargo) continue;
      if (u.owner != ctx.player && !snapshot.is_visible(ctx.player, u)) continue;
      FrameResult fr = world_to_screen(u.pos, cam);
      if (!fr.in_frame) continue;
      on_screen_types.insert(u.type);
      std::map<std::string, std::string> vars = {
          {"side", u.owner == ctx.player ? "own" : "enemy"},
          {"type", u.type},
          {"tag", to_hex(tag)},
          {"x", std::to_string(fr.pixel.x)},
          {"y", std::to_string(fr.pixel.y)},
          {"health", fmt_int(u.health)},
          {"health_max", fmt_int(u.health_max)},
          {"shield", fmt_int(u.shield)},
          {"shield_max", fmt_int(u.shield_max)},
          {"energy", fmt_int(u.energy)},
          {"status", unit_status(snapshot, u)},
      };
      body += substitute(tpl.unit_line, vars) + "\n";
    }
    if (!body.empty()) body.pop_back();
    add(3, body);
  }

  {  // (4) wiki knowledge for on-screen unit types
    std::string body;
    for (const std::string& type : on_screen_types) {
      const WikiEntry* e = wiki.find(type);
      if (!e) continue;
      body += type + ": " + e->description;
      if (!e->strong_against.empty()) {
        body += " Strong against:";
        for (const auto& s : e->strong_against) body += " " + s + ",";
        body.pop_back();
        body += ".";
      }
      if (!e->weak_against.empty()) {
        body += " Weak against:";
        for (const auto& s : e->weak_against) body += " " + s + ",";
        body.pop_back();
        body += ".";
      }
      body += "\n";
    }
    if (!body.empty()) body.pop_back();
    add(4, body);
  }

  {  // (5) important events of the last step
    std::string body;
    for (const GameEvent& ev : last.events) {
      if (ev.kind == GameEvent::Kind::DamageDealt) continue;  // too noisy per tick
      body += "- " + ev.text() + "\n";
    }
    if (!body.empty()) body.pop_back();
    add(5, body);
  }

  std::vector<ActionSignature> actions = valid_actions(registry, ctx, snapshot);
  {  // (6) valid actions
    std::string body;
    for (const ActionSignature& a : actions) {
      const BridgeEntry* e = registry.find(
          a.signature.substr(1, a.signature.find('(') - 1));
      if (e && e->category == "comm") continue;  // listed in block 11
      body += a.signature + "\n";
    }
    if (!body.empty()) body.pop_back();
    add(6, body);
  }

  {  // (7) action explanations
    std::string body;
    for (const ActionSignature& a : actions) {
      const BridgeEntry* e =
          registry.find(a.signature.substr(1, a.signature.find('(') - 1));
      if (e && e->category == "comm") continue;
      if (!a.description.empty()) body += a.signature + " " + a.description + "\n";
    }
    if (!body.empty()) body.pop_back();
    add(7, body);
  }

  {  // (8) own actions of the last step
    std::string body;
    for (const TextAction& a : last.actions) body += format_action(a) + "\n";
    if (!body.empty()) body.pop_back();
    add(8, body);
  }

  {  // (9) errors of the last step's actions
    std::string body;
    for (const ActionError& e : last.errors) body += e.text() + "\n";
    if (!body.empty()) body.pop_back();
    add(9, body);
  }

  {  // (10) received messages, origin form
    std::string body;
    for (const Message& m : last.inbox) {
      body += substitute(tpl.message_line, {{"from", m.from},
                                            {"step", std::to_string(m.step)},
                                            {"content", m.content}}) +
              "\n";
    }
    if (!body.empty()) body.pop_back();
    add(10, body);
  }

  {  // (11) valid communication targets and actions
    std::string body;
    for (const std::string& t : comm_targets) {
      if (t != agent.profile.name) body += t + "\n";
    }
    body += std::string(MessageRouter::kChannel) + "\n";
    body += "<MessageTo(TargetName, '''content''')>";
    add(11, body);
  }

  {  // (12) task information
    std::string body = scenario.description.empty() ? scenario.name : scenario.description;
    body += "\nvictory condition: " + scenario.victory.text();
    char buf[64];
    std::snprintf(buf, sizeof buf, "\ntime limit: %.0f s", scenario.max_time_s);
    body += buf;
    add(12, body);
  }

  return obs;
}

std::string FeatureGrid::to_text() const {
  std::ostringstream os;
  os << "grid " << channel << " " << width << "x" << height << "\n";
  os << "    ";
  for (int x = 0; x < width; x += 8) os << x / 10 << x % 10 << "      ";
  os << "\n";
  for (int y = 0; y < height; ++y) {
    os << (y < 10 ? "y0" : "y") << y << " ";
    for (int x = 0; x < width; ++x) os << at(x, y);
    os << "\n";
  }
  return os.str();
}

std::vector<FeatureGrid> render_feature_grid(const WorldState& world, const Camera& camera,
                                             const std::vector<std::string>& channels) {
  std::vector<FeatureGrid> out;
  for (const std::string& channel : channels) {
    FeatureGrid grid;
    grid.channel = channel;
    grid.cells.assign(static_cast<std::size_t>(grid.width) * grid.height, 0);
    if (channel == "terrain") {
      for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
          Vec2 p = screen_to_world({x, y}, camera);
          int cx = static_cast<int>(std::floor(p.x));
          int cy = static_cast<int>(std::floor(p.y));
          grid.at(x, y) = world.map.in_bounds(cx, cy) ? (world.map.cell(cx, cy) ? 1 : 0) : 1;
        }
      }
    } else {
      for (const auto& [tag, u] : world.units) {
        if (!u.alive() || u.in_cargo) continue;
        FrameResult fr = world_to_screen(u.pos, camera);
        if (!fr.in_frame) continue;
        if (channel == "ownership") {
          grid.at(fr.pixel.x, fr.pixel.y) = u.owner;
        } else if (channel == "density") {
          grid.at(fr.pixel.x, fr.pixel.y) += 1;
        }
      }
    }
    out.push_back(std::move(grid));
  }
  return out;
}

PromptDb PromptDb::load(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "prompts.json");
  if (!in) throw std::runtime_error("cannot open prompts.json in " + dir);
  json j = json::parse(in);
  PromptDb db;
  for (auto& [role, spec] : j.items()) {
    RolePrompts p;
    p.system = spec.at("system").get<std::string>();
    if (spec.contains("examples")) {
      for (const auto& ex : spec.at("examples")) {
        p.examples.push_back({ex.at("input").get<std::string>(),
                              ex.at("output").get<std::string>()});
      }
    }
    db.roles.emplace(role, std::move(p));
  }
  return db;
}

const RolePrompts& PromptDb::for_role(const std::string& role) const {
  auto it = roles.find(role);
  if (it == roles.end()) it = roles.find("micro-combat");
  if (it == roles.end()) throw std::runtime_error("no prompt for role " + role);
  return it->second;
}

std::string ChatRequest::to_json() const {
  json messages = json::array();
  messages.push_back({{"role", "system"}, {"content", system}});
  for (const ChatExample& ex : examples) {
    messages.push_back({{"role", "user"}, {"content", ex.input}});
    messages.push_back({{"role", "assistant"}, {"content", ex.output}});
  }
  std::string content = user;
  for (const std::string& a : attachments) content += "\n" + a;
  messages.push_back({{"role", "user"}, {"content", content}});
  return json{{"messages", messages}}.dump();
}

std::uint64_t ChatRequest::hash() const { return fnv1a(to_json()); }

ChatRequest assemble_query(const RolePrompts& prompts, const ObservationText& obs,
                           const std::vector<FeatureGrid>& grids) {
  ChatRequest req;
  req.system = prompts.system;
  req.examples = prompts.examples;
  req.user = obs.rendered();
  for (const FeatureGrid& g : grids) req.attachments.push_back(g.to_text());
  return req;
}

}  // namespace textrts
