#include "textrts/clients.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "textrts/grammar.hpp"
#include "textrts/trace.hpp"
#include "textrts/util.hpp"

namespace textrts {

using nlohmann::json;

namespace {

void sleep_s(double seconds) {
  if (seconds > 0) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  }
}

// ---- observation-text parsing shared by the scripted mocks ----------------

std::vector<std::string> section_lines(const std::string& text, int block_id) {
  std::vector<std::string> out;
  std::string header = "(" + std::to_string(block_id) + ") ";
  std::size_t pos = text.find("\n" + header);
  if (pos == std::string::npos) {
    if (starts_with(text, header)) {
      pos = 0;
    } else {
      return out;
    }
  }
  std::size_t line_start = text.find('\n', pos + 1);
  if (line_start == std::string::npos) return out;
  ++line_start;
  while (line_start < text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string::npos) line_end = text.size();
    std::string line = text.substr(line_start, line_end - line_start);
    if (!line.empty() && line[0] == '(') break;  // next block header
    if (!line.empty()) out.push_back(line);
    line_start = line_end + 1;
  }
  return out;
}

struct SeenUnit {
  bool own = false;
  std::string type;
  std::string tag;
  int x = 0, y = 0;
  double health = 0, health_max = 0, shield = 0, shield_max = 0;
};

// "- own Stalker 0x12 at screen [20, 30], health 80/80, shield 80/80, ..."
std::vector<SeenUnit> parse_units(const std::string& text) {
  std::vector<SeenUnit> units;
  for (const std::string& line : section_lines(text, 3)) {
    SeenUnit u;
    std::size_t p = line.find("- ");
    if (p == std::string::npos) continue;
    std::istringstream is(line.substr(p + 2));
    std::string side;
    is >> side >> u.type >> u.tag;
    if (side != "own" && side != "enemy") continue;
    u.own = side == "own";
    std::size_t lb = line.find('[');
    std::size_t comma = line.find(',', lb);
    std::size_t rb = line.find(']', lb);
    if (lb == std::string::npos || comma == std::string::npos || rb == std::string::npos) {
      continue;
    }
    u.x = std::atoi(line.substr(lb + 1, comma - lb - 1).c_str());
    u.y = std::atoi(line.substr(comma + 1, rb - comma - 1).c_str());
    auto field = [&](const char* name) -> std::pair<double, double> {
      std::size_t fp = line.find(name);
      if (fp == std::string::npos) return {0, 0};
      fp += std::string(name).size();
      double cur = std::atof(line.c_str() + fp);
      std::size_t slash = line.find('/', fp);
      double max = slash == std::string::npos ? 0 : std::atof(line.c_str() + slash + 1);
      return {cur, max};
    };
    std::tie(u.health, u.health_max) = field("health ");
    std::tie(u.shield, u.shield_max) = field("shield ");
    units.push_back(std::move(u));
  }
  return units;
}

struct Signature {
  std::string name;
  std::vector<std::string> kinds;
};

std::vector<Signature> parse_signatures(const std::string& text) {
  std::vector<Signature> sigs;
  for (const std::string& line : section_lines(text, 6)) {
    if (line.empty() || line[0] != '<') continue;
    std::size_t open = line.find('(');
    std::size_t close = line.rfind(")>");
    if (open == std::string::npos || close == std::string::npos) continue;
    Signature s;
    s.name = line.substr(1, open - 1);
    std::string args = line.substr(open + 1, close - open - 1);
    for (auto& part : split(args, ',')) {
      auto kind = trim(part);
      if (!kind.empty()) s.kinds.emplace_back(kind);
    }
    sigs.push_back(std::move(s));
  }
  return sigs;
}

// ---- scripted mocks --------------------------------------------------------

class MockClient : public Client {
 public:
  MockClient(std::string script, double delay_s, std::uint64_t seed, int fail_times)
      : script_(std::move(script)), delay_s_(delay_s), seed_(seed), fail_times_(fail_times) {}

  std::string kind() const override { return "mock:" + script_; }

  Completion complete(const ChatRequest& request, const QueryMeta& meta) override {
    if (script_ == "fail-then-succeed" || script_ == "always-fail") {
      return fault_injected(meta);
    }
    sleep_s(delay_s_);
    Completion c;
    c.ok = true;
    if (script_ == "always-noop" || script_ == "slow") {
      c.text = "<No_Operation()>";
    } else if (script_ == "random-valid") {
      c.text = random_valid(request, meta);
    } else if (script_ == "focus-fire") {
      c.text = focus_fire(request, meta);
    } else if (script_ == "kite") {
      c.text = kite(request, meta);
    } else {
      c.ok = false;
      c.retryable = false;
      c.error = "unknown mock script: " + script_;
    }
    return c;
  }

 private:
  Completion fault_injected(const QueryMeta& meta) {
    if (script_ == "always-fail") {
      return {false, "", "injected failure", true};
    }
    std::lock_guard<std::mutex> lock(mutex_);
    int& n = attempts_[meta.agent + "#" + std::to_string(meta.step)];
    if (n++ < fail_times_) {
      return {false, "", "injected failure " + std::to_string(n), true};
    }
    return {true, "<No_Operation()>", "", true};
  }

  std::mt19937_64 rng_for(const QueryMeta& meta) const {
    std::uint64_t s = seed_ ^ meta.episode_seed ^ fnv1a(meta.agent) ^
                      (static_cast<std::uint64_t>(meta.step) * 0x9e3779b97f4a7c15ull);
    return std::mt19937_64(s);
  }

  std::string random_valid(const ChatRequest& request, const QueryMeta& meta) const {
    auto sigs = parse_signatures(request.user);
    auto units = parse_units(request.user);
    if (sigs.empty()) return "<No_Operation()>";
    auto rng = rng_for(meta);
    std::uniform_int_distribution<std::size_t> pick(0, sigs.size() - 1);
    std::uniform_int_distribution<int> coord(0, kFrameSize - 1);
    for (int attempt = 0; attempt < 8; ++attempt) {
      const Signature& sig = sigs[pick(rng)];
      bool needs_tag =
          std::find(sig.kinds.begin(), sig.kinds.end(), "tag") != sig.kinds.end();
      if (needs_tag && units.empty()) continue;
      std::string out = "<" + sig.name + "(";
      bool ok = true;
      for (std::size_t i = 0; i < sig.kinds.size(); ++i) {
        if (i) out += ", ";
        const std::string& k = sig.kinds[i];
        if (k == "screen" || k == "minimap") {
          out += "[" + std::to_string(coord(rng)) + ", " + std::to_string(coord(rng)) + "]";
        } else if (k == "tag") {
          std::uniform_int_distribution<std::size_t> u(0, units.size() - 1);
          out += units[u(rng)].tag;
        } else {
          ok = false;
        }
      }
      if (!ok) continue;
      out += ")>";
      return out;
    }
    return "<No_Operation()>";
  }

  // Nothing visible: patrol the corners until contact.
  static std::string patrol(const QueryMeta& meta) {
    static const int corners[4][2] = {{48, 16}, {48, 48}, {16, 48}, {16, 16}};
    int leg = (meta.step / 80) % 4;
    return "<Move_Minimap([" + std::to_string(corners[leg][0]) + ", " +
           std::to_string(corners[leg][1]) + "])>";
  }

  std::string focus_fire(const ChatRequest& request, const QueryMeta& meta) const {
    auto units = parse_units(request.user);
    const SeenUnit* target = nullptr;
    for (const SeenUnit& u : units) {
      if (u.own) continue;
      if (!target ||
          u.health + u.shield < target->health + target->shield - 1e-9) {
        target = &u;
      }
    }
    if (target) return "<Attack_Unit(" + target->tag + ")>";
    return patrol(meta);
  }

  std::string kite(const ChatRequest& request, const QueryMeta& meta) const {
    auto units = parse_units(request.user);
    double ox = 0, oy = 0, ex = 0, ey = 0;
    int on = 0, en = 0;
    const SeenUnit* target = nullptr;
    for (const SeenUnit& u : units) {
      if (u.own) {
        ox += u.x;
        oy += u.y;
        ++on;
      } else {
        ex += u.x;
        ey += u.y;
        ++en;
        if (!target || u.health + u.shield < target->health + target->shield) target = &u;
      }
    }
    if (!target || on == 0) return patrol(meta);
    if (meta.step % 2 == 0) return "<Attack_Unit(" + target->tag + ")>";
    ox /= on;
    oy /= on;
    ex /= en;
    ey /= en;
    double dx = ox - ex, dy = oy - ey;
    double len = std::sqrt(dx * dx + dy * dy);
    if (len < 1e-6) {
      dx = 1;
      dy = 0;
      len = 1;
    }
    int rx = std::clamp(static_cast<int>(ox + dx / len * 12), 0, kFrameSize - 1);
    int ry = std::clamp(static_cast<int>(oy + dy / len * 12), 0, kFrameSize - 1);
    return "<Move_Screen([" + std::to_string(rx) + ", " + std::to_string(ry) + "])>";
  }

  std::string script_;
  double delay_s_;
  std::uint64_t seed_;
  int fail_times_;
  std::mutex mutex_;
  std::map<std::string, int> attempts_;
};

// ---- replay ---------------------------------------------------------------

class ReplayClient : public Client {
 public:
  explicit ReplayClient(const std::string& path) {
    TraceFile tf = TraceFile::load(path);
    for (TraceRecord& r : tf.records) {
      per_agent_[r.agent].push_back(std::move(r));
    }
  }

  std::string kind() const override { return "replay"; }

  Completion complete(const ChatRequest&, const QueryMeta& meta) override {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = per_agent_.find(meta.agent);
    if (it == per_agent_.end() || cursor_[meta.agent] >= it->second.size()) {
      return {false, "", "replay trace exhausted for agent " + meta.agent, false};
    }
    const TraceRecord& r = it->second[cursor_[meta.agent]++];
    if (r.request_hash != 0 && meta.request_hash != 0 && r.request_hash != meta.request_hash) {
      return {false, "",
              "replay divergence at step " + std::to_string(meta.step) + " for " + meta.agent,
              false};
    }
    return {true, r.response, "", true};
  }

 private:
  std::mutex mutex_;
  std::map<std::string, std::vector<TraceRecord>> per_agent_;
  std::map<std::string, std::size_t> cursor_;
};

// ---- live http -------------------------------------------------------------

class HttpClient : public Client {
 public:
  explicit HttpClient(ClientConfig config) : config_(std::move(config)) {
    auto scheme_end = config_.endpoint.find("://");
    std::size_t path_start = scheme_end == std::string::npos
                                 ? config_.endpoint.find('/')
                                 : config_.endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      base_ = config_.endpoint;
      path_ = "/v1/chat/completions";
    } else {
      base_ = config_.endpoint.substr(0, path_start);
      path_ = config_.endpoint.substr(path_start);
    }
  }

  std::string kind() const override { return "http"; }

  Completion complete(const ChatRequest& request, const QueryMeta&) override {
    httplib::Client cli(base_);
    cli.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
    cli.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));

    json body = json::parse(request.to_json());
    body["model"] = config_.model;
    body["temperature"] = config_.temperature;

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto res = cli.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
      return {false, "", "transport error contacting " + base_, true};
    }
    if (res->status != 200) {
      return {false, "", "http status " + std::to_string(res->status), true};
    }
    try {
      json j = json::parse(res->body);
      return {true, j.at("choices").at(0).at("message").at("content").get<std::string>(), "",
              true};
    } catch (const std::exception&) {
      return {false, "", "malformed completion payload", true};
    }
  }

 private:
  ClientConfig config_;
  std::string base_;
  std::string path_;
};

std::map<std::string, std::string> parse_params(const std::string& s) {
  std::map<std::string, std::string> out;
  for (const auto& kv : split(s, '&')) {
    auto eq = kv.find('=');
    if (eq != std::string::npos) out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

}  // namespace

ClientConfig ClientConfig::parse(const std::string& spec) {
  ClientConfig c;
  auto colon = spec.find(':');
  c.kind = spec.substr(0, colon == std::string::npos ? spec.size() : colon);
  std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (c.kind == "mock") {
    auto q = rest.find('?');
    c.script = rest.substr(0, q);
    if (q != std::string::npos) {
      for (auto& [k, v] : parse_params(rest.substr(q + 1))) {
        if (k == "delay") c.delay_s = std::atof(v.c_str());
        if (k == "seed") parse_u64(v, c.seed);
        if (k == "fail") c.fail_times = std::atoi(v.c_str());
      }
    }
    if (c.script.empty()) c.script = "always-noop";
    return c;
  }
  if (c.kind == "replay") {
    c.trace_path = rest;
    return c;
  }
  if (c.kind == "http") {
    auto hashmark = rest.find('#');
    c.endpoint = rest.substr(0, hashmark);
    if (hashmark != std::string::npos) {
      for (auto& [k, v] : parse_params(rest.substr(hashmark + 1))) {
        if (k == "model") c.model = v;
        if (k == "key_env") c.key_env = v;
        if (k == "timeout") c.timeout_s = std::atof(v.c_str());
        if (k == "temp") c.temperature = std::atof(v.c_str());
      }
    }
    return c;
  }
  throw std::runtime_error("unknown client kind in spec: " + spec);
}

std::shared_ptr<Client> make_mock_client(const std::string& script, double delay_s,
                                         std::uint64_t seed, int fail_times) {
  return std::make_shared<MockClient>(script, delay_s, seed, fail_times);
}

std::shared_ptr<Client> make_replay_client(const std::string& trace_path) {
  return std::make_shared<ReplayClient>(trace_path);
}

std::shared_ptr<Client> make_http_client(const ClientConfig& config) {
  return std::make_shared<HttpClient>(config);
}

std::shared_ptr<Client> make_client(const ClientConfig& config) {
  if (config.kind == "mock") {
    return make_mock_client(config.script, config.delay_s, config.seed, config.fail_times);
  }
  if (config.kind == "replay") return make_replay_client(config.trace_path);
  if (config.kind == "http") return make_http_client(config);
  throw std::runtime_error("unknown client kind: " + config.kind);
}

}  // namespace textrts
