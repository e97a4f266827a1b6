#include "textrts/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <thread>

#include "textrts/trace.hpp"
#include "textrts/util.hpp"

namespace textrts {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct AttemptState {
  std::mutex mutex;
  std::condition_variable cv;
  bool done = false;
  Completion result;
};

// One attempt in a detached worker; the caller stops waiting after T' and
// any late result is simply dropped with the shared state.
Completion run_attempt(const ChatRequest& request, const std::shared_ptr<Client>& client,
                       const QueryMeta& meta, double wait_s, bool& timed_out) {
  auto state = std::make_shared<AttemptState>();
  std::thread([state, client, request, meta]() {
    Completion c = client->complete(request, meta);
    std::lock_guard<std::mutex> lock(state->mutex);
    state->result = std::move(c);
    state->done = true;
    state->cv.notify_all();
  }).detach();

  std::unique_lock<std::mutex> lock(state->mutex);
  state->cv.wait_for(lock, std::chrono::duration<double>(wait_s),
                     [&] { return state->done; });
  timed_out = !state->done;
  if (timed_out) {
    Completion c;
    c.ok = false;
    c.error = "attempt timed out";
    return c;
  }
  return state->result;
}

}  // namespace

AgentResponse query_agent(const std::string& agent, const ChatRequest& request,
                          const std::shared_ptr<Client>& client, const StepBudget& budget,
                          const QueryMeta& meta) {
  AgentResponse response;
  response.agent = agent;
  auto start = Clock::now();

  for (int i = 0; i < budget.max_retries; ++i) {
    bool timed_out = false;
    response.attempts = i + 1;
    Completion c = run_attempt(request, client, meta, budget.query_wait_s, timed_out);
    if (c.ok) {
      response.raw = c.text;
      response.latency_s = seconds_since(start);
      return response;
    }
    if (!c.retryable && !timed_out) break;
    // Back off 2^i seconds between attempts to spare the remote service.
    double wait = std::pow(2.0, i);
    auto wait_start = Clock::now();
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    response.backoff_waits_s.push_back(seconds_since(wait_start));
  }

  response.fallback = true;
  response.raw = format_action(no_operation());
  response.latency_s = seconds_since(start);
  return response;
}

std::vector<AgentResponse> concurrent_fanout(const std::vector<FanoutItem>& items,
                                             const StepBudget& budget) {
  struct Collection {
    std::mutex mutex;
    std::condition_variable cv;
    std::vector<AgentResponse> responses;
    std::vector<bool> ready;
    int pending = 0;
  };
  auto col = std::make_shared<Collection>();
  col->responses.resize(items.size());
  col->ready.assign(items.size(), false);
  col->pending = static_cast<int>(items.size());

  for (std::size_t i = 0; i < items.size(); ++i) {
    FanoutItem item = items[i];
    StepBudget b = budget;
    std::thread([col, item, b, i]() {
      AgentResponse r = query_agent(item.agent, item.request, item.client, b, item.meta);
      std::lock_guard<std::mutex> lock(col->mutex);
      if (!col->ready[i]) {
        col->responses[i] = std::move(r);
        col->ready[i] = true;
        col->pending -= 1;
        col->cv.notify_all();
      }
    }).detach();
  }

  std::unique_lock<std::mutex> lock(col->mutex);
  col->cv.wait_for(lock, std::chrono::duration<double>(budget.max_wait_s),
                   [&] { return col->pending == 0; });
  // Whoever is still pending takes the fallback path for this step.
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!col->ready[i]) {
      AgentResponse r;
      r.agent = items[i].agent;
      r.fallback = true;
      r.raw = format_action(no_operation());
      r.latency_s = budget.max_wait_s;
      col->responses[i] = std::move(r);
      col->ready[i] = true;
    }
  }
  return col->responses;
}

namespace {

struct AgentState {
  AgentContext ctx;
  LastStep last;
};

Vec2 team_centroid(const WorldState& world, const std::vector<UnitTag>& members,
                   Vec2 fallback) {
  Vec2 sum{};
  int n = 0;
  for (UnitTag tag : members) {
    const Unit* u = world.find_unit(tag);
    if (u && u->alive() && !u->in_cargo) {
      sum = sum + u->pos;
      ++n;
    }
  }
  return n > 0 ? sum * (1.0 / n) : fallback;
}

std::vector<UnitTag> living_members(const WorldState& world, const std::vector<UnitTag>& tags) {
  std::vector<UnitTag> out;
  for (UnitTag t : tags) {
    const Unit* u = world.find_unit(t);
    if (u && u->active()) out.push_back(t);
  }
  return out;
}

}  // namespace

EpisodeResult run_episode(const ScenarioConfig& scenario, const EpisodeDeps& deps,
                          const std::vector<AgentProfile>& roster,
                          const std::map<std::string, std::shared_ptr<Client>>& clients,
                          const EpisodeOptions& options) {
  if (!options.budget.valid()) {
    throw std::runtime_error("invalid step budget: T >= T' and n >= 1 required");
  }
  for (const AgentProfile& profile : roster) {
    std::string id = profile.client_id.empty() ? profile.name : profile.client_id;
    if (!clients.count(id)) {
      throw std::runtime_error("no client bound for agent " + profile.name);
    }
  }

  WorldState world = load_scenario(scenario, *deps.stats, options.seed);

  RosterRuntime runtime;
  runtime.player = scenario.tasked_player;
  for (const AgentProfile& p : roster) {
    AgentRuntime a;
    a.profile = p;
    for (const TeamDef& def : p.teams) a.teams.push_back({def, {}});
    runtime.agents.push_back(std::move(a));
  }
  runtime.assign_existing(world);

  std::vector<std::string> member_names;
  for (const AgentProfile& p : roster) member_names.push_back(p.name);
  MessageRouter router(member_names);

  std::map<std::string, AgentState> states;
  for (const AgentProfile& p : roster) {
    AgentState st;
    st.ctx.agent_name = p.name;
    st.ctx.player = scenario.tasked_player;
    st.ctx.action_sets = p.action_sets;
    st.ctx.easy_build = p.easy_build;
    st.ctx.easy_control = p.easy_control;
    states[p.name] = std::move(st);
  }

  std::unique_ptr<TraceWriter> trace;
  if (!options.record_trace_path.empty()) {
    trace = std::make_unique<TraceWriter>(options.record_trace_path);
  }

  std::vector<GameEvent> window_events;  // since the previous decision step
  int max_ticks = scenario.max_ticks(world.tick_s);
  Outcome outcome = Outcome::Ongoing;
  int non_fallback_responses = 0;

  while (world.clock_ticks < max_ticks && outcome == Outcome::Ongoing) {
    if (world.clock_ticks % options.decision_period_ticks == 0) {
      runtime.sync(world, window_events);
      std::vector<GameEvent> shown = std::move(window_events);
      window_events.clear();
      for (auto& [name, st] : states) st.last.events = shown;

      // Refresh contexts and cameras, then snapshot for the queries.
      for (AgentRuntime& agent : runtime.agents) {
        AgentState& st = states[agent.profile.name];
        st.ctx.team_units = living_members(world, agent.all_members());
        Vec2 center = team_centroid(world, st.ctx.team_units,
                                    world.players[scenario.tasked_player].spawn_center);
        world.cameras[agent.profile.name] =
            make_camera(center, world.map.width, world.map.height);
      }
      const WorldState snapshot = world;

      std::vector<FanoutItem> items;
      for (AgentRuntime& agent : runtime.agents) {
        AgentState& st = states[agent.profile.name];
        st.last.inbox = router.take_inbox(agent.profile.name);
        ObservationText obs = build_observation(
            agent, st.ctx, snapshot, *deps.registry, *deps.wiki, *deps.templates, scenario,
            st.last, member_names);
        std::vector<FeatureGrid> grids;
        if (options.want_grids || agent.profile.wants_grids) {
          grids = render_feature_grid(snapshot, agent_camera(snapshot, st.ctx),
                                      options.grid_channels);
        }
        ChatRequest request =
            assemble_query(deps.prompts->for_role(agent.profile.role), obs, grids);
        FanoutItem item;
        item.agent = agent.profile.name;
        item.request = std::move(request);
        std::string id = agent.profile.client_id.empty() ? agent.profile.name
                                                         : agent.profile.client_id;
        item.client = clients.at(id);
        item.meta = {agent.profile.name, world.clock_ticks, options.seed,
                     item.request.hash()};
        items.push_back(std::move(item));
      }

      std::vector<AgentResponse> responses = concurrent_fanout(items, options.budget);
      for (const AgentResponse& r : responses) {
        if (!r.fallback) ++non_fallback_responses;
      }

      for (std::size_t i = 0; i < runtime.agents.size(); ++i) {
        AgentRuntime& agent = runtime.agents[i];
        AgentState& st = states[agent.profile.name];
        const AgentResponse& response = responses[i];
        if (trace) {
          trace->record(world.clock_ticks, response.agent, items[i].meta.request_hash,
                        response.raw);
        }

        st.last.actions.clear();
        st.last.errors.clear();

        MessageReport messages = extract_message_actions(response.raw);
        for (const MessageAction& m : messages.messages) {
          if (auto notice = router.send(world.clock_ticks, agent.profile.name, m.target,
                                        m.content)) {
            ActionError e;
            e.category = ActionError::Category::InvalidTarget;
            e.action = TextAction{"MessageTo", {ArgValue::ident(m.target)}};
            e.detail = *notice;
            st.last.errors.push_back(std::move(e));
          }
        }

        // Move the camera to the agent's unit team before executing.
        if (!st.ctx.team_units.empty()) {
          Vec2 center = team_centroid(world, st.ctx.team_units,
                                      world.players[scenario.tasked_player].spawn_center);
          world.cameras[agent.profile.name] =
              make_camera(center, world.map.width, world.map.height);
        }

        ParseReport parsed = extract_actions(response.raw);
        for (const RejectedSegment& rej : parsed.rejected) {
          GameEvent& ev = world.push_event(window_events, GameEvent::Kind::ActionFailed);
          ev.detail = rej.reason + ": " + rej.raw;
        }
        for (const TextAction& action : parsed.actions) {
          if (action.name == "MessageTo") continue;  // routed above
          st.last.actions.push_back(action);

          // Team actions operate on the performing type's members.
          const BridgeEntry* entry = deps.registry->find(action.name);
          st.ctx.selection = st.ctx.team_units;
          if (entry && entry->unit != "any" && entry->unit != "none" &&
              entry->unit != "attackable") {
            auto types = split(entry->unit, '|');
            std::vector<UnitTag> filtered;
            for (UnitTag tag : st.ctx.team_units) {
              const Unit* u = world.find_unit(tag);
              if (u && std::find(types.begin(), types.end(), u->type) != types.end()) {
                filtered.push_back(tag);
              }
            }
            if (!filtered.empty()) st.ctx.selection = filtered;
          }

          TransformResult tr = transform(*deps.registry, action, st.ctx, world);
          if (!tr.ok()) {
            st.last.errors.push_back(*tr.error);
            GameEvent& ev = world.push_event(window_events, GameEvent::Kind::ActionFailed);
            ev.detail = tr.error->text();
            continue;
          }
          for (const BackendCall& call : tr.calls) {
            auto err = execute_call(world, st.ctx, call, window_events);
            if (err) {
              err->action = action;
              st.last.errors.push_back(*err);
              GameEvent& ev = world.push_event(window_events, GameEvent::Kind::ActionFailed);
              ev.detail = err->text();
              break;  // abandon the rest of this action's call sequence
            }
          }
        }
      }
      router.deliver_round();
    }

    std::vector<GameEvent> tick_events = step(world);
    window_events.insert(window_events.end(), tick_events.begin(), tick_events.end());
    outcome = check_victory(scenario, world);
  }

  if (outcome == Outcome::Ongoing) outcome = Outcome::Lose;

  const PlayerState& me = world.players[scenario.tasked_player];
  EpisodeResult result;
  result.scenario_id = scenario.id;
  result.seed = options.seed;
  result.outcome = outcome;
  result.killed_value = me.value_killed;
  result.dead_value = me.value_lost;
  result.kd = kd_ratio(result.killed_value, result.dead_value);
  result.step_count = world.clock_ticks;
  result.trace_path = options.record_trace_path;
  result.final_state_hash = world.state_hash();
  result.non_fallback_responses = non_fallback_responses;
  return result;
}

}  // namespace textrts
