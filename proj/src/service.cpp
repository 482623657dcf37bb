#include "agentrec/service.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <shared_mutex>
#include <thread>
#include <unordered_map>

#include "agentrec/catalog.hpp"
#include "agentrec/errors.hpp"
#include "httplib.h"

namespace agentrec {

using nlohmann::json;

namespace {

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotFound: return 404;
    case ErrorKind::InvalidUtterance: return 422;
    case ErrorKind::StateDesync: return 409;
    case ErrorKind::NumericError: return 500;
    default: return 400;
  }
}

Reply error_reply(int status, const std::string& kind, const std::string& message) {
  return {status, json{{"error", kind}, {"message", message}}};
}

json agents_json(const AgentVector& v) {
  json out = json::object();
  for (const auto a : kAllAgents) out[to_string(a)] = v[static_cast<std::size_t>(a)];
  return out;
}

json decision_json(const TierDecision& d) {
  return json{{"tier", to_string(d.tier)},
              {"complexity", d.score.value},
              {"components",
               {{"history_len_norm", d.score.history_len_norm},
                {"profile_incompleteness", d.score.profile_incompleteness},
                {"ambiguity", d.score.ambiguity}}},
              {"cache_hit", d.cache_hit}};
}

ContextSnapshot context_from_json(const json& j) {
  TimeBucket time = TimeBucket::Evening;
  LocationTag location = LocationTag::Home;
  SocialSetting social = SocialSetting::Alone;
  double mood = 0.0;
  if (j.is_object()) {
    if (j.contains("time")) time = time_bucket_from_string(j.at("time").get<std::string>());
    if (j.contains("location")) location = location_from_string(j.at("location").get<std::string>());
    if (j.contains("social")) social = social_from_string(j.at("social").get<std::string>());
    if (j.contains("mood")) mood = j.at("mood").get<double>();
  } else if (!j.is_null()) {
    throw InvalidContext("context must be an object");
  }
  return snapshot_context(time, location, social, mood);
}

json context_json(const ContextSnapshot& c) {
  return json{{"time", to_string(c.time_bucket)},
              {"location", to_string(c.location_tag)},
              {"social", to_string(c.social_setting)},
              {"mood", c.mood}};
}

}  // namespace

FeedbackSignal feedback_from_json(const json& j) {
  FeedbackSignal f;
  if (j.is_null()) return f;
  if (!j.is_object()) throw InvalidUtterance("feedback must be an object");
  if (j.contains("liked")) f.liked_items = j.at("liked").get<std::vector<std::string>>();
  if (j.contains("disliked")) f.disliked_items = j.at("disliked").get<std::vector<std::string>>();
  if (j.contains("clicks")) f.clicks = j.at("clicks").get<std::vector<std::string>>();
  if (j.contains("dwell_ms")) f.dwell_ms = j.at("dwell_ms").get<std::map<std::string, std::int64_t>>();
  if (j.contains("rating") && !j.at("rating").is_null()) {
    const auto& r = j.at("rating");
    const double v = r.at("value").get<double>();
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidUtterance("rating value must be in [0, 1]");
    f.explicit_rating = ExplicitRating{r.at("item_id").get<std::string>(), v};
  }
  return f;
}

json feedback_to_json(const FeedbackSignal& f) {
  json j{{"liked", f.liked_items}, {"disliked", f.disliked_items}, {"clicks", f.clicks}, {"dwell_ms", f.dwell_ms}};
  if (f.explicit_rating) j["rating"] = {{"item_id", f.explicit_rating->item_id}, {"value", f.explicit_rating->value}};
  return j;
}

struct SessionSlot {
  mutable std::shared_mutex mutex;
  Session session;
  std::string catalog;
  Engine* engine = nullptr;
  std::int64_t created_at = 0;
  std::int64_t last_active = 0;
};

struct Service::Impl {
  std::shared_ptr<const UtteranceAnalyzer> analyzer;
  std::map<std::string, std::unique_ptr<Engine>> engines;
  std::map<std::string, const std::vector<Candidate>*> catalogs;

  mutable std::shared_mutex sessions_mutex;
  std::unordered_map<std::string, std::shared_ptr<SessionSlot>> sessions;
  std::unordered_map<std::string, std::string> tokens;  // client token -> session id
  std::uint64_t next_id = 1;

  std::mutex journal_mutex;
  std::ofstream journal;
  bool replaying = false;

  httplib::Server server;
  std::thread thread;

  std::shared_ptr<SessionSlot> find(const std::string& id) const {
    std::shared_lock lock(sessions_mutex);
    const auto it = sessions.find(id);
    if (it == sessions.end()) throw NotFound("session " + id);
    return it->second;
  }

  void record(const json& entry) {
    if (replaying || !journal.is_open()) return;
    std::lock_guard lock(journal_mutex);
    journal << entry.dump() << '\n';
    journal.flush();
  }
};

Service::Service(AppConfig config, std::map<std::string, std::vector<Candidate>> catalogs,
                 std::shared_ptr<const UtteranceAnalyzer> analyzer)
    : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
  if (catalogs.empty()) throw InvalidConfig("service needs at least one catalog");
  impl_->analyzer = analyzer ? std::move(analyzer)
                             : std::make_shared<LexiconAnalyzer>(config_.load_lexicon(),
                                                                 config_.engine.intent_smoothing);
  for (auto& [name, items] : catalogs) {
    auto engine = std::make_unique<Engine>(config_.engine, impl_->analyzer, std::move(items));
    impl_->catalogs[name] = &engine->candidates();
    impl_->engines[name] = std::move(engine);
  }

  if (config_.service.journal.empty()) return;
  const auto path = config_.resolve(config_.service.journal);
  if (std::ifstream in(path); in) {
    impl_->replaying = true;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto entry = json::parse(line, nullptr, false);
      if (entry.is_discarded()) {
        throw InvalidConfig("journal line " + std::to_string(line_no) + " is not JSON");
      }
      const auto op = entry.value("op", "");
      Reply r;
      if (op == "create") {
        r = create_session(entry.at("request"));
      } else if (op == "message") {
        r = post_message(entry.at("session_id").get<std::string>(), entry.at("request"));
      } else {
        throw InvalidConfig("journal line " + std::to_string(line_no) + ": unknown op");
      }
      if (r.status >= 300) {
        throw StateDesync("journal replay failed at line " + std::to_string(line_no) + ": " + r.body.dump());
      }
    }
    impl_->replaying = false;
  }
  impl_->journal.open(path, std::ios::app);
  if (!impl_->journal) throw InvalidConfig("cannot open journal " + path.string());
}

Service::~Service() { stop(); }

std::unique_ptr<Service> Service::from_config(AppConfig config) {
  if (const char* port = std::getenv("AGENTREC_PORT"); port && *port) {
    try {
      config.service.port = std::stoi(port);
    } catch (const std::exception&) {
      throw InvalidConfig(std::string("AGENTREC_PORT is not a number: ") + port);
    }
  }
  if (const char* catalog = std::getenv("AGENTREC_CATALOG"); catalog && *catalog) {
    config.catalogs["default"] = catalog;
  }
  std::map<std::string, std::vector<Candidate>> catalogs;
  for (const auto& [name, path] : config.catalogs) catalogs[name] = load_catalog(config.resolve(path));
  return std::make_unique<Service>(std::move(config), std::move(catalogs));
}

Engine& Service::engine(const std::string& catalog) {
  const auto it = impl_->engines.find(catalog);
  if (it == impl_->engines.end()) throw NotFound("catalog " + catalog);
  return *it->second;
}

std::size_t Service::session_count() const {
  std::shared_lock lock(impl_->sessions_mutex);
  return impl_->sessions.size();
}

Reply Service::create_session(const json& body) {
  try {
    if (!body.is_object() && !body.is_null()) return error_reply(400, "BadRequest", "body must be a JSON object");
    const std::string catalog = body.is_object() ? body.value("catalog", "default") : "default";
    const std::string token = body.is_object() ? body.value("client_token", "") : "";
    Engine& eng = engine(catalog);
    const auto context = context_from_json(body.is_object() && body.contains("context") ? body.at("context") : json());

    std::unique_lock lock(impl_->sessions_mutex);
    if (!token.empty()) {
      if (const auto it = impl_->tokens.find(token); it != impl_->tokens.end()) {
        return {200, json{{"session_id", it->second}, {"created", false}}};
      }
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(impl_->next_id++));
    auto slot = std::make_shared<SessionSlot>();
    slot->session = eng.new_session(buf, context);
    slot->catalog = catalog;
    slot->engine = &eng;
    slot->created_at = slot->last_active = now_ms();
    impl_->sessions[buf] = slot;
    if (!token.empty()) impl_->tokens[token] = buf;
    impl_->record(json{{"op", "create"}, {"request", body}});
    return {201, json{{"session_id", buf}, {"created", true}}};
  } catch (const Error& e) {
    return error_reply(status_for(e.kind()), to_string(e.kind()), e.what());
  } catch (const json::exception& e) {
    return error_reply(400, "BadRequest", e.what());
  }
}

Reply Service::post_message(const std::string& session_id, const json& body) {
  try {
    const auto slot = impl_->find(session_id);
    if (!body.is_object()) return error_reply(400, "BadRequest", "body must be a JSON object");
    const auto text_it = body.find("text");
    if (text_it == body.end() || !text_it->is_string()) {
      return error_reply(422, "InvalidUtterance", "text is required");
    }
    const std::string text = text_it->get<std::string>();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
      return error_reply(422, "InvalidUtterance", "text must not be empty");
    }
    const auto feedback = feedback_from_json(body.contains("feedback") ? body.at("feedback") : json());
    const std::int64_t ts = body.contains("ts") ? body.at("ts").get<std::int64_t>() : now_ms();

    std::unique_lock lock(slot->mutex);
    const auto result = slot->engine->process_turn(slot->session, text, feedback, ts);
    slot->last_active = ts;
    json journal_request = body;
    journal_request["ts"] = ts;
    impl_->record(json{{"op", "message"}, {"session_id", session_id}, {"request", journal_request}});

    const std::size_t k = std::min(config_.service.top_k, result.ranked.size());
    const auto& candidates = slot->engine->candidates();
    std::unordered_map<std::string, const Candidate*> by_id;
    for (const auto& c : candidates) by_id[c.item_id] = &c;
    json ranked = json::array();
    json explanation = json::array();
    for (std::size_t r = 0; r < k; ++r) {
      const auto& e = result.ranked.entries[r];
      ranked.push_back({{"item_id", e.item_id}, {"name", by_id.at(e.item_id)->name}, {"fused_score", e.fused_score}});
      explanation.push_back({{"item_id", e.item_id}, {"contributions", agents_json(e.contributions)}});
    }
    json out{{"session_id", session_id},
             {"turn_index", slot->session.history.size()},
             {"ranked", ranked},
             {"weights", agents_json(result.weights.w)},
             {"tier", decision_json(result.decision)},
             {"explanation", explanation},
             {"work_units", result.work_units},
             {"intent", to_string(result.state.intent.argmax())}};
    if (result.credit) {
      out["credit"] = {{"reward", result.credit->reward}, {"net_updated", result.net_updated}};
    }
    return {200, out};
  } catch (const Error& e) {
    return error_reply(status_for(e.kind()), to_string(e.kind()), e.what());
  } catch (const json::exception& e) {
    return error_reply(400, "BadRequest", e.what());
  }
}

Reply Service::get_state(const std::string& session_id) const {
  try {
    const auto slot = impl_->find(session_id);
    std::shared_lock lock(slot->mutex);
    const auto& s = slot->session;
    json out{{"session_id", session_id},
             {"catalog", slot->catalog},
             {"turn_index", s.history.size()},
             {"profile",
              {{"weights", s.profile.weights},
               {"confidence", s.profile.confidence},
               {"coverage", profile_coverage(s.profile)},
               {"last_turn", s.profile.last_turn}}},
             {"weights", agents_json(s.last_weights.w)},
             {"last_decision", s.last_decision ? decision_json(*s.last_decision) : json()},
             {"baseline", slot->engine->baseline().value},
             {"context", context_json(s.context)},
             {"created_at", slot->created_at},
             {"last_active", slot->last_active}};
    return {200, out};
  } catch (const Error& e) {
    return error_reply(status_for(e.kind()), to_string(e.kind()), e.what());
  }
}

Reply Service::health() const {
  return {200, json{{"status", "ok"}, {"catalogs", impl_->engines.size()}, {"sessions", session_count()}}};
}

Reply Service::metrics() const {
  std::array<std::uint64_t, 3> tiers{};
  CacheStats cache;
  std::uint64_t updates = 0, numeric = 0;
  for (const auto& [name, engine] : impl_->engines) {
    const auto c = engine->counters();
    for (std::size_t t = 0; t < 3; ++t) tiers[t] += c.tier_requests[t];
    cache.hits += c.cache.hits;
    cache.misses += c.cache.misses;
    cache.evictions += c.cache.evictions;
    cache.invalidations += c.cache.invalidations;
    updates += c.net_updates;
    numeric += c.numeric_errors;
  }
  json tier_json = json::object();
  for (std::size_t t = 0; t < 3; ++t) tier_json[to_string(static_cast<Tier>(t))] = tiers[t];
  return {200, json{{"tier_requests", tier_json},
                    {"cache",
                     {{"hits", cache.hits},
                      {"misses", cache.misses},
                      {"evictions", cache.evictions},
                      {"invalidations", cache.invalidations},
                      {"hit_rate", cache.hit_rate()}}},
                    {"net_updates", updates},
                    {"numeric_errors", numeric},
                    {"sessions", session_count()}}};
}

namespace {

void send(httplib::Response& res, const Reply& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

json parse_body(const httplib::Request& req, httplib::Response& res, bool& ok) {
  ok = true;
  if (req.body.empty()) return json();
  auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded()) {
    ok = false;
    send(res, error_reply(400, "BadRequest", "body is not valid JSON"));
  }
  return j;
}

}  // namespace

static void install_routes(httplib::Server& server, Service& service) {
  server.Post("/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    bool ok = false;
    const auto body = parse_body(req, res, ok);
    if (ok) send(res, service.create_session(body));
  });
  server.Post(R"(/sessions/([^/]+)/messages)", [&service](const httplib::Request& req, httplib::Response& res) {
    bool ok = false;
    const auto body = parse_body(req, res, ok);
    if (ok) send(res, service.post_message(req.matches[1], body));
  });
  server.Get(R"(/sessions/([^/]+)/state)", [&service](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get_state(req.matches[1]));
  });
  server.Get("/healthz", [&service](const httplib::Request&, httplib::Response& res) { send(res, service.health()); });
  server.Get("/metrics", [&service](const httplib::Request&, httplib::Response& res) { send(res, service.metrics()); });
  // Lets a browser client on another origin talk to the API.
  server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
  });
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

bool Service::listen(const std::string& host, int port) {
  install_routes(impl_->server, *this);
  return impl_->server.listen(host, port);
}

int Service::start_background(const std::string& host) {
  install_routes(impl_->server, *this);
  const int port = impl_->server.bind_to_any_port(host);
  if (port <= 0) throw InvalidConfig("cannot bind a port on " + host);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace agentrec
