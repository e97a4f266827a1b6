#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "textrts/agents.hpp"
#include "textrts/bridge.hpp"
#include "textrts/clients.hpp"
#include "textrts/metrics.hpp"
#include "textrts/observation.hpp"
#include "textrts/orchestrator.hpp"
#include "textrts/scenarios.hpp"
#include "textrts/util.hpp"

namespace fs = std::filesystem;
using namespace textrts;

namespace {

struct DataBundle {
  StatsDb stats;
  Registry registry;
  WikiDb wiki;
  ObservationTemplates templates;
  PromptDb prompts;
};

DataBundle load_data(const std::string& data_dir) {
  DataBundle d;
  d.stats = load_stats(data_dir + "/unit_stats.json");
  d.registry = Registry::load(data_dir + "/actions_protoss.json");
  d.wiki = WikiDb::load(data_dir + "/wiki.json");
  d.templates = ObservationTemplates::load(data_dir + "/templates/observation.json");
  d.prompts = PromptDb::load(data_dir);
  return d;
}

int cmd_run(const std::string& data_dir, const std::string& scenario_id,
            const std::string& mode_override, const std::string& client_spec,
            const std::map<std::string, std::string>& client_overrides,
            const std::string& seeds_spec, const std::string& out_dir, StepBudget budget,
            bool record) {
  DataBundle data = load_data(data_dir);
  ScenarioConfig scenario = load_scenario_by_id(data_dir, scenario_id, data.stats);

  std::string mode_name = !mode_override.empty() ? mode_override
                          : !scenario.game_mode.empty() ? scenario.game_mode
                                                        : scenario.mode;
  GameMode mode = parse_game_mode(mode_name);
  std::vector<AgentProfile> roster = build_roster(mode, scenario);

  fs::create_directories(out_dir);
  std::vector<std::uint64_t> seeds = parse_seed_list(seeds_spec);
  std::string results_path = out_dir + "/" + scenario_id + ".results.jsonl";
  std::ofstream results(results_path);
  if (!results) {
    std::cerr << "cannot open results file " << results_path << "\n";
    return 1;
  }

  EpisodeDeps deps{&data.stats, &data.registry, &data.wiki, &data.templates, &data.prompts};
  std::vector<Outcome> outcomes;
  std::vector<KdValue> kds;
  int failures = 0;
  for (std::uint64_t seed : seeds) {
    std::map<std::string, std::shared_ptr<Client>> clients;
    for (const AgentProfile& profile : roster) {
      std::string spec = client_spec;
      auto it = client_overrides.find(profile.name);
      if (it != client_overrides.end()) spec = it->second;
      ClientConfig cc = ClientConfig::parse(spec);
      if (cc.kind == "mock" && cc.seed == 0) cc.seed = seed;
      clients[profile.name] = make_client(cc);
    }
    EpisodeOptions options;
    options.seed = seed;
    options.budget = budget;
    if (record) {
      options.record_trace_path =
          out_dir + "/" + scenario_id + ".seed" + std::to_string(seed) + ".trace.jsonl";
    }
    try {
      EpisodeResult result = run_episode(scenario, deps, roster, clients, options);
      persist_result(result, results);
      outcomes.push_back(result.outcome);
      kds.push_back(result.kd);
      std::cout << scenario_id << " seed " << seed << ": " << outcome_name(result.outcome)
                << " KD " << result.kd.str() << " in " << result.step_count << " ticks\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cerr << scenario_id << " seed " << seed << ": episode failed: " << e.what()
                << "\n";
    }
  }
  if (!outcomes.empty()) {
    WinRate wr = winning_rate(outcomes);
    double sum = 0;
    bool inf = false;
    for (const KdValue& kd : kds) {
      if (kd.infinite) inf = true;
      sum += kd.infinite ? 0 : kd.value;
    }
    KdValue mean;
    mean.infinite = inf && wr.total == 1;
    mean.value = sum / wr.total;
    std::cout << "summary " << scenario_id << ": " << format_kd_wr(mean, wr) << " over "
              << wr.total << " episode(s)\n";
  }
  std::cout << "results: " << results_path << "\n";
  return failures == 0 ? 0 : 1;
}

int cmd_validate(const std::string& data_dir, const std::string& file) {
  DataBundle data = load_data(data_dir);
  std::ifstream in(file);
  if (!in) {
    std::cerr << "cannot read " << file << "\n";
    return 1;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();

  ParseReport report = extract_actions(text);
  int invalid = 0;
  for (const RejectedSegment& rej : report.rejected) {
    std::cout << "reject " << rej.reason << ": " << rej.raw << "\n";
    ++invalid;
  }
  for (const TextAction& action : report.actions) {
    const BridgeEntry* entry = data.registry.find(action.name);
    if (!entry) {
      std::cout << "unknown-action: " << format_action(action) << "\n";
      ++invalid;
      continue;
    }
    bool arity_ok = entry->arg_schema.size() == action.args.size();
    if (!arity_ok) {
      std::cout << "bad-arity: " << format_action(action) << " (expects "
                << entry->signature() << ")\n";
      ++invalid;
      continue;
    }
    std::cout << "ok: " << format_action(action) << "\n";
  }
  std::cout << report.actions.size() << " action(s), " << report.rejected.size()
            << " rejected segment(s), " << invalid << " problem(s)\n";
  return invalid == 0 ? 0 : 1;
}

int cmd_stats(const std::string& results_path) {
  std::vector<EpisodeResult> results = load_results(results_path);
  if (results.empty()) {
    std::cerr << "no results in " << results_path << "\n";
    return 1;
  }
  std::map<std::string, std::vector<EpisodeResult>> by_scenario;
  for (const EpisodeResult& r : results) by_scenario[r.scenario_id].push_back(r);
  for (const auto& [id, rs] : by_scenario) {
    std::vector<Outcome> outcomes;
    double kd_sum = 0;
    bool any_inf = false;
    for (const EpisodeResult& r : rs) {
      outcomes.push_back(r.outcome);
      if (r.kd.infinite) {
        any_inf = true;
      } else {
        kd_sum += r.kd.value;
      }
    }
    WinRate wr = winning_rate(outcomes);
    KdValue mean;
    mean.infinite = any_inf && kd_sum == 0;
    mean.value = kd_sum / static_cast<double>(rs.size());
    std::cout << id << ": " << format_kd_wr(mean, wr) << " over " << rs.size()
              << " episode(s)\n";
  }
  return 0;
}

int cmd_scenarios(const std::string& data_dir) {
  for (const std::string& id : list_scenarios(data_dir)) std::cout << id << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-action micro-RTS grounding framework for language-model agents"};
  app.require_subcommand(1);

  std::string data_dir = default_data_dir();
  app.add_option("--data", data_dir, "data directory (registry, stats, scenarios)");

  auto* run = app.add_subcommand("run", "run seeded episodes and write results + traces");
  std::string scenario_id, mode_override, client_spec = "mock:always-noop";
  std::string seeds_spec = "1", out_dir = "out";
  std::vector<std::string> per_agent;
  StepBudget budget;
  bool record = true;
  run->add_option("--scenario", scenario_id, "scenario id (see `scenarios`)")->required();
  run->add_option("--mode", mode_override, "roster mode override: ECEB, SCEB, ECSB");
  run->add_option("--client", client_spec,
                  "client spec: mock:<script>[?delay=..&seed=..], replay:<trace>, "
                  "http:<url>[#model=..&key_env=..]");
  run->add_option("--client-for", per_agent, "per-agent override, Name=spec")
      ->expected(-1);
  run->add_option("--seeds", seeds_spec, "seed list: 5 | 1,2,3 | 1..20");
  run->add_option("--max-wait", budget.max_wait_s, "step budget T in seconds");
  run->add_option("--query-wait", budget.query_wait_s, "per-attempt budget T' in seconds");
  run->add_option("--retries", budget.max_retries, "max query attempts n");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--record,!--no-record", record, "record response traces");

  auto* validate = app.add_subcommand("validate", "check a response text offline");
  std::string validate_file;
  validate->add_option("file", validate_file, "text file with model output")->required();

  auto* stats = app.add_subcommand("stats", "summarize a results file as KD (WR%)");
  std::string results_path;
  stats->add_option("results", results_path, "results .jsonl path")->required();

  app.add_subcommand("scenarios", "list known scenario ids");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      std::map<std::string, std::string> overrides;
      for (const std::string& kv : per_agent) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) {
          std::cerr << "--client-for expects Name=spec, got " << kv << "\n";
          return 1;
        }
        overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      return cmd_run(data_dir, scenario_id, mode_override, client_spec, overrides,
                     seeds_spec, out_dir, budget, record);
    }
    if (validate->parsed()) return cmd_validate(data_dir, validate_file);
    if (stats->parsed()) return cmd_stats(results_path);
    return cmd_scenarios(data_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
