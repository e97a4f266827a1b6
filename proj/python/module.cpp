#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <memory>

#include "textrts/agents.hpp"
#include "textrts/bridge.hpp"
#include "textrts/clients.hpp"
#include "textrts/metrics.hpp"
#include "textrts/observation.hpp"
#include "textrts/orchestrator.hpp"
#include "textrts/scenarios.hpp"
#include "textrts/stats.hpp"
#include "textrts/util.hpp"

namespace py = pybind11;
using namespace textrts;

namespace {

// Bundles the data-backed singletons so python callers load them once.
struct Env {
  std::string data_dir;
  StatsDb stats;
  Registry registry;
  WikiDb wiki;
  ObservationTemplates templates;
  PromptDb prompts;

  explicit Env(const std::string& dir)
      : data_dir(dir),
        stats(load_stats(dir + "/unit_stats.json")),
        registry(Registry::load(dir + "/actions_protoss.json")),
        wiki(WikiDb::load(dir + "/wiki.json")),
        templates(ObservationTemplates::load(dir + "/templates/observation.json")),
        prompts(PromptDb::load(dir)) {}
};

py::dict action_to_dict(const TextAction& a) {
  py::dict d;
  d["name"] = a.name;
  py::list args;
  for (const ArgValue& v : a.args) {
    py::dict av;
    switch (v.kind) {
      case ArgValue::Kind::Coord:
        av["kind"] = "coord";
        av["x"] = v.x;
        av["y"] = v.y;
        break;
      case ArgValue::Kind::Tag:
        av["kind"] = "tag";
        av["tag"] = v.tag;
        break;
      case ArgValue::Kind::Ident:
        av["kind"] = "ident";
        av["text"] = v.text;
        break;
      case ArgValue::Kind::Text:
        av["kind"] = "text";
        av["text"] = v.text;
        break;
      case ArgValue::Kind::None:
        av["kind"] = "none";
        break;
    }
    args.append(av);
  }
  d["args"] = args;
  return d;
}

py::dict result_to_dict(const EpisodeResult& r) {
  py::dict d;
  d["scenario"] = r.scenario_id;
  d["seed"] = r.seed;
  d["outcome"] = outcome_name(r.outcome);
  d["kd"] = r.kd.infinite ? py::object(py::str("Inf")) : py::object(py::float_(r.kd.value));
  d["killed_value"] = r.killed_value;
  d["dead_value"] = r.dead_value;
  d["steps"] = r.step_count;
  d["state_hash"] = hex_digest(r.final_state_hash);
  d["trace"] = r.trace_path;
  return d;
}

}  // namespace

PYBIND11_MODULE(_textrts, m) {
  m.doc() = "Text-action micro-RTS grounding framework";

  m.def("default_data_dir", &default_data_dir);

  m.def("extract_actions", [](const std::string& text) {
    ParseReport report = extract_actions(text);
    py::list actions, rejected;
    for (const TextAction& a : report.actions) actions.append(action_to_dict(a));
    for (const RejectedSegment& r : report.rejected) {
      rejected.append(py::make_tuple(r.raw, r.reason));
    }
    py::dict out;
    out["actions"] = actions;
    out["rejected"] = rejected;
    return out;
  });

  m.def("extract_messages", [](const std::string& text) {
    MessageReport report = extract_message_actions(text);
    py::list messages;
    for (const MessageAction& msg : report.messages) {
      messages.append(py::make_tuple(msg.target, msg.content));
    }
    return messages;
  });

  m.def("format_action", [](const std::string& name, py::list args) {
    TextAction a;
    a.name = name;
    for (auto item : args) {
      py::dict d = item.cast<py::dict>();
      std::string kind = d["kind"].cast<std::string>();
      if (kind == "coord") {
        a.args.push_back(ArgValue::coord(d["x"].cast<int>(), d["y"].cast<int>()));
      } else if (kind == "tag") {
        a.args.push_back(ArgValue::unit_tag(d["tag"].cast<std::uint64_t>()));
      } else if (kind == "ident") {
        a.args.push_back(ArgValue::ident(d["text"].cast<std::string>()));
      } else if (kind == "text") {
        a.args.push_back(ArgValue::quoted(d["text"].cast<std::string>()));
      }
    }
    return format_action(a);
  });

  m.def("kd_ratio", [](double killed, double dead) -> py::object {
    KdValue kd = kd_ratio(killed, dead);
    if (kd.infinite) return py::str("Inf");
    return py::float_(kd.value);
  });

  py::class_<Env>(m, "Env")
      .def(py::init<const std::string&>(), py::arg("data_dir") = default_data_dir())
      .def_property_readonly("data_dir", [](const Env& e) { return e.data_dir; })
      .def("action_count", [](const Env& e) { return e.registry.size(); })
      .def("action_names",
           [](const Env& e) {
             py::list names;
             for (const BridgeEntry& entry : e.registry.entries()) names.append(entry.name);
             return names;
           })
      .def("scenarios", [](const Env& e) { return list_scenarios(e.data_dir); })
      .def("run_episode",
           [](const Env& e, const std::string& scenario_id, const std::string& client_spec,
              std::uint64_t seed, const std::string& trace_path) {
             ScenarioConfig scenario = load_scenario_by_id(e.data_dir, scenario_id, e.stats);
             std::string mode_name =
                 !scenario.game_mode.empty() ? scenario.game_mode : scenario.mode;
             std::vector<AgentProfile> roster =
                 build_roster(parse_game_mode(mode_name), scenario);
             std::map<std::string, std::shared_ptr<Client>> clients;
             for (const AgentProfile& profile : roster) {
               ClientConfig cc = ClientConfig::parse(client_spec);
               if (cc.kind == "mock" && cc.seed == 0) cc.seed = seed;
               clients[profile.name] = make_client(cc);
             }
             EpisodeDeps deps{&e.stats, &e.registry, &e.wiki, &e.templates, &e.prompts};
             EpisodeOptions options;
             options.seed = seed;
             options.record_trace_path = trace_path;
             EpisodeResult result;
             {
               py::gil_scoped_release release;
               result = run_episode(scenario, deps, roster, clients, options);
             }
             return result_to_dict(result);
           },
           py::arg("scenario"), py::arg("client") = "mock:always-noop", py::arg("seed") = 1,
           py::arg("trace_path") = "");
}
