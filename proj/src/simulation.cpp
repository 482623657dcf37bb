#include "agentrec/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "agentrec/errors.hpp"

namespace agentrec::sim {

using nlohmann::json;

namespace {

constexpr double kStrongPreference = 0.7;
constexpr double kBasePreference = 0.2;
constexpr std::size_t kMaxUserDraws = 1000;  // per user

const char* const kPositiveTemplates[] = {
    "i really like {}", "i love {}", "i am into {} lately", "something with {} would be great",
    "i enjoy {}"};
const char* const kNegativeTemplates[] = {
    "i don't want {}", "not into {}", "no {} please", "i dislike {}", "please avoid {}"};
const char* const kFillerTemplates[] = {
    "what else do you have", "hmm not sure about these", "can you show me something different",
    "which one would you pick", "ok thanks"};
const char* const kOpeningTemplates[] = {
    "hi can you recommend something", "hello show me some options", "hey i need a suggestion"};

template <std::size_t N>
std::string pick(RandomStream& rng, const char* const (&templates)[N], const std::string& term = {}) {
  std::string t = templates[rng.index(N)];
  if (const auto pos = t.find("{}"); pos != std::string::npos) t.replace(pos, 2, term);
  return t;
}

std::string disclosure_text(UserState& state, std::size_t attribute, const Lexicon& lexicon) {
  state.mark_disclosed(attribute);
  const auto term = lexicon.attribute_term(attribute);
  return state.user().true_preferences[attribute] >= 0.0 ? pick(state.rng(), kPositiveTemplates, term)
                                                         : pick(state.rng(), kNegativeTemplates, term);
}

std::string item_name(const std::vector<std::size_t>& active, const Lexicon& lexicon, std::size_t index) {
  std::string name;
  for (const auto a : active) {
    name += lexicon.attribute_term(a);
    name.push_back(' ');
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "#%zu", index);
  return name + buf;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double true_affinity(const SimUser& user, const Candidate& item) {
  double l1 = 0.0;
  for (const double v : item.attributes) l1 += std::abs(v);
  if (l1 == 0.0) return 0.0;
  return math::dot(user.true_preferences, item.attributes) / l1;
}

namespace {

std::vector<SimUser> generate_users(std::uint64_t seed, const char* stream, const char* prefix,
                                   const std::vector<Candidate>& catalog, std::size_t count,
                                   const SimulationConfig& sim) {
  const std::size_t vocab_size = catalog.front().attributes.size();
  std::vector<SimUser> users;
  RandomStream users_rng(seed, stream);
  std::size_t draws = 0;
  while (users.size() < count) {
    if (++draws > kMaxUserDraws) throw InvalidConfig("cannot generate satisfiable users for this catalog");
    SimUser u;
    char id[48];
    std::snprintf(id, sizeof id, "%s%05zu", prefix, users.size());
    u.user_id = id;
    u.true_preferences.assign(vocab_size, 0.0);
    for (auto& p : u.true_preferences) p = users_rng.uniform(-kBasePreference, kBasePreference);
    const std::size_t strong = std::min<std::size_t>(3 + users_rng.index(3), vocab_size);
    std::vector<std::size_t> chosen;
    while (chosen.size() < strong) {
      const auto a = users_rng.index(vocab_size);
      if (std::find(chosen.begin(), chosen.end(), a) == chosen.end()) chosen.push_back(a);
    }
    for (std::size_t s = 0; s < chosen.size(); ++s) {
      const double magnitude = users_rng.uniform(kStrongPreference, 1.0);
      const bool positive = s == 0 || users_rng.bernoulli(0.3);
      u.true_preferences[chosen[s]] = positive ? magnitude : -magnitude;
    }
    u.time_bucket = static_cast<TimeBucket>(users_rng.index(4));
    u.location_tag = static_cast<LocationTag>(users_rng.index(4));
    u.social_setting = static_cast<SocialSetting>(users_rng.index(3));
    u.mood = users_rng.uniform(-0.5, 0.5);
    u.patience = sim.patience;
    u.accept_threshold = sim.accept_threshold;
    u.disclosure_rate = sim.disclosure_rate;
    u.rng_seed = users_rng.next_u64();

    const bool satisfiable = std::any_of(catalog.begin(), catalog.end(), [&](const Candidate& c) {
      return true_affinity(u, c) >= u.accept_threshold;
    });
    if (satisfiable) {
      users.push_back(std::move(u));
      draws = 0;
    }
  }
  return users;
}

}  // namespace

World generate_world(std::uint64_t seed, std::size_t vocab_size, std::size_t n_items,
                     std::size_t n_users, const SimulationConfig& sim, const Lexicon& lexicon) {
  if (n_items < 20) throw InvalidConfig("world needs at least 20 items");
  if (vocab_size < 4) throw InvalidConfig("world needs at least 4 attributes");

  World world;
  RandomStream items_rng(seed, "world.items");
  for (std::size_t i = 0; i < n_items; ++i) {
    Candidate c;
    char id[48];
    std::snprintf(id, sizeof id, "item%05zu", i);
    c.item_id = id;
    c.attributes.assign(vocab_size, 0.0);
    const std::size_t active_count = 3 + items_rng.index(2);
    std::vector<std::size_t> active;
    while (active.size() < active_count) {
      const auto a = items_rng.index(vocab_size);
      if (std::find(active.begin(), active.end(), a) == active.end()) active.push_back(a);
    }
    std::sort(active.begin(), active.end());
    for (const auto a : active) c.attributes[a] = items_rng.uniform(0.4, 1.0);
    c.name = item_name(active, lexicon, i);

    c.context_affinity.assign(kContextDim, 0.0);
    const std::array<std::pair<std::size_t, std::size_t>, 3> blocks{{{0, 4}, {4, 4}, {8, 3}}};
    for (const auto& [start, len] : blocks) {
      const auto favored = items_rng.index(len);
      for (std::size_t b = 0; b < len; ++b) {
        c.context_affinity[start + b] = b == favored ? items_rng.uniform(0.6, 1.0) : items_rng.uniform(0.0, 0.3);
      }
    }
    c.context_affinity[11] = items_rng.uniform(-1.0, 1.0);
    const double u = items_rng.uniform();
    c.popularity = u * u;
    c.novelty = std::clamp(1.0 - c.popularity + items_rng.uniform(-0.2, 0.2), 0.0, 1.0);
    world.catalog.push_back(std::move(c));
  }

  world.users = generate_users(seed, "world.users", "user", world.catalog, n_users, sim);
  world.warmup = generate_users(seed, "world.warmup", "warm", world.catalog, sim.warmup_users, sim);
  return world;
}

// ---------------------------------------------------------------------------
// Simulated user

UserState::UserState(const SimUser& user, const std::vector<Candidate>& catalog)
    : user_(&user),
      disclosed_(user.true_preferences.size(), false),
      rng_(user.rng_seed, "user.turns") {
  for (const auto& c : catalog) {
    const double a = true_affinity(user, c);
    affinity_[c.item_id] = a;
    if (a >= user.accept_threshold) relevant_.insert(c.item_id);
  }
}

double UserState::affinity(const std::string& item_id) const {
  const auto it = affinity_.find(item_id);
  return it == affinity_.end() ? 0.0 : it->second;
}

bool UserState::acceptable(const std::string& item_id) const { return relevant_.count(item_id) > 0; }

std::optional<std::size_t> UserState::next_disclosure() const {
  std::optional<std::size_t> best;
  const auto& prefs = user_->true_preferences;
  for (std::size_t a = 0; a < prefs.size(); ++a) {
    if (disclosed_[a] || std::abs(prefs[a]) < kStrongPreference) continue;
    if (!best || std::abs(prefs[a]) > std::abs(prefs[*best])) best = a;
  }
  return best;
}

std::string opening_utterance(UserState& state, const Lexicon& lexicon) {
  if (state.rng().bernoulli(state.user().disclosure_rate)) {
    if (const auto a = state.next_disclosure()) return disclosure_text(state, *a, lexicon);
  }
  return pick(state.rng(), kOpeningTemplates);
}

SimResponse simulate_turn(UserState& state, const RankedList& response, std::size_t k,
                          const Lexicon& lexicon) {
  SimResponse out;
  const std::size_t limit = std::min(k, response.size());
  for (std::size_t r = 0; r < limit; ++r) {
    const auto& id = response.entries[r].item_id;
    if (state.acceptable(id)) {
      out.accepted = true;
      out.feedback.liked_items.push_back(id);
      out.utterance = "yes that one is perfect";
      return out;
    }
  }

  // Draw order is fixed (disclosure, template, click) so the stream position
  // only depends on the number of turns taken.
  const bool disclose = state.rng().bernoulli(state.user().disclosure_rate);
  if (disclose) {
    if (const auto a = state.next_disclosure()) {
      out.disclosed_attribute = *a;
      out.utterance = disclosure_text(state, *a, lexicon);
    }
  }
  if (out.utterance.empty()) out.utterance = pick(state.rng(), kFillerTemplates);

  if (!response.entries.empty()) {
    const auto& top = response.entries.front().item_id;
    const double p = std::clamp(state.affinity(top), 0.0, 1.0);
    if (state.rng().bernoulli(p)) {
      out.feedback.clicks.push_back(top);
      out.feedback.dwell_ms[top] = static_cast<std::int64_t>(std::llround(p * 30000.0));
    }
  }
  return out;
}

ConversationLog run_conversation(Engine& engine, const SimUser& user, const World& world,
                                 std::size_t k, const Lexicon& lexicon) {
  UserState state(user, world.catalog);
  Session session = engine.new_session(user.user_id, user.context());
  ConversationLog log;
  log.user_id = user.user_id;
  log.relevant = state.relevant();

  std::string text = opening_utterance(state, lexicon);
  FeedbackSignal feedback;
  for (std::size_t turn = 0; turn < user.patience; ++turn) {
    const auto result = engine.process_turn(session, text, feedback, static_cast<std::int64_t>(turn) * 1000);

    LoggedTurn logged;
    logged.utterance = text;
    logged.decision = result.decision;
    logged.weights = result.weights;
    logged.work_units = result.work_units;
    for (std::size_t r = 0; r < result.ranked.size(); ++r) {
      const auto& e = result.ranked.entries[r];
      if (r < k) {
        logged.top_items.push_back(e.item_id);
        logged.top_scores.push_back(e.fused_score);
      }
      if (logged.first_acceptable_rank == std::numeric_limits<std::size_t>::max() && state.acceptable(e.item_id)) {
        logged.first_acceptable_rank = r;
      }
    }

    auto reply = simulate_turn(state, result.ranked, k, lexicon);
    logged.feedback = reply.feedback;
    log.turns.push_back(std::move(logged));
    log.turns_used = turn + 1;
    if (reply.accepted) {
      engine.settle_feedback(session, reply.feedback);
      log.outcome = Outcome::Success;
      return log;
    }
    text = std::move(reply.utterance);
    feedback = std::move(reply.feedback);
  }
  engine.settle_feedback(session, feedback);
  log.outcome = Outcome::Abandoned;
  return log;
}

// ---------------------------------------------------------------------------
// Metrics

double ndcg_at_k(const std::vector<std::string>& ranked, const std::map<std::string, int>& relevance,
                 std::size_t k) {
  if (k == 0) throw InvalidConfig("k must be at least 1");
  const auto rel = [&](const std::string& id) {
    const auto it = relevance.find(id);
    return it == relevance.end() ? 0.0 : static_cast<double>(it->second);
  };
  double dcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) {
    dcg += rel(ranked[r]) / std::log2(static_cast<double>(r) + 2.0);
  }
  std::vector<double> ideal;
  for (const auto& [id, g] : relevance) ideal.push_back(static_cast<double>(g));
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, ideal.size()); ++r) {
    idcg += ideal[r] / std::log2(static_cast<double>(r) + 2.0);
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

double recall_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& relevant,
                   std::size_t k) {
  if (relevant.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) hits += relevant.count(ranked[r]);
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

namespace {

void require_logs(const std::vector<ConversationLog>& logs) {
  if (logs.empty()) throw InvalidConfig("no conversation logs");
}

std::map<std::string, int> relevance_map(const ConversationLog& log) {
  std::map<std::string, int> rel;
  for (const auto& id : log.relevant) rel[id] = 1;
  return rel;
}

}  // namespace

double success_at_k(const std::vector<ConversationLog>& logs, std::size_t k) {
  require_logs(logs);
  std::size_t successes = 0;
  for (const auto& log : logs) {
    const bool hit = std::any_of(log.turns.begin(), log.turns.end(),
                                 [&](const LoggedTurn& t) { return t.first_acceptable_rank < k; });
    successes += hit ? 1 : 0;
  }
  return static_cast<double>(successes) / static_cast<double>(logs.size());
}

double mean_recall_at_k(const std::vector<ConversationLog>& logs, std::size_t k) {
  require_logs(logs);
  double total = 0.0;
  for (const auto& log : logs) {
    if (!log.turns.empty()) total += recall_at_k(log.turns.back().top_items, log.relevant, k);
  }
  return total / static_cast<double>(logs.size());
}

double mean_ndcg_at_k(const std::vector<ConversationLog>& logs, std::size_t k) {
  require_logs(logs);
  double total = 0.0;
  for (const auto& log : logs) {
    if (!log.turns.empty()) total += ndcg_at_k(log.turns.back().top_items, relevance_map(log), k);
  }
  return total / static_cast<double>(logs.size());
}

double avg_turns(const std::vector<ConversationLog>& logs) {
  require_logs(logs);
  double total = 0.0;
  for (const auto& log : logs) total += static_cast<double>(log.turns_used);
  return total / static_cast<double>(logs.size());
}

json to_json(const MetricsReport& report) {
  json per_seed = {{"seeds", json::array()},
                   {"success_at_k", json::array()},
                   {"recall_at_k", json::array()},
                   {"ndcg_at_k", json::array()},
                   {"avg_turns", json::array()},
                   {"tier_counts", json::array()}};
  for (const auto& s : report.per_seed) {
    per_seed["seeds"].push_back(s.seed);
    per_seed["success_at_k"].push_back(s.success_at_k);
    per_seed["recall_at_k"].push_back(s.recall_at_k);
    per_seed["ndcg_at_k"].push_back(s.ndcg_at_k);
    per_seed["avg_turns"].push_back(s.avg_turns);
    per_seed["tier_counts"].push_back(s.tier_counts);
  }
  return json{{"variant", report.variant},
              {"k", report.k},
              {"n_users", report.n_users},
              {"metrics",
               {{"success_at_k", report.success_at_k},
                {"recall_at_k", report.recall_at_k},
                {"ndcg_at_k", report.ndcg_at_k},
                {"avg_turns", report.avg_turns}}},
              {"per_seed", per_seed},
              {"config_fingerprint", report.config_fingerprint},
              {"definitions",
               {{"success_at_k", "per conversation: an item with true affinity >= accept_threshold "
                                 "appeared in some turn's top k before patience ran out"},
                {"recall_at_k", "final turn's top k against items with true affinity >= accept_threshold"},
                {"ndcg_at_k", "binary relevance, final turn's top k"},
                {"avg_turns", "recommendation turns used; patience for abandoned conversations"}}}};
}

// ---------------------------------------------------------------------------
// Experiments

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const Variant variant = variant_from_string(config.variant);
  if (config.seeds.empty()) throw InvalidConfig("experiment needs at least one seed");
  if (config.simulation.n_users == 0) throw InvalidConfig("experiment needs at least one user");
  if (config.simulation.top_k == 0) throw InvalidConfig("top_k must be at least 1");

  ExperimentResult result;
  auto& report = result.report;
  report.variant = config.variant;
  report.k = config.simulation.top_k;
  report.n_users = config.simulation.n_users;
  report.config_fingerprint = fingerprint(json{{"engine", config.engine}, {"simulation", config.simulation}});

  const auto analyzer = std::make_shared<LexiconAnalyzer>(config.lexicon, config.engine.intent_smoothing);
  for (const auto seed : config.seeds) {
    const auto world = generate_world(seed, config.lexicon.vocab_size(), config.simulation.n_items,
                                      config.simulation.n_users, config.simulation, config.lexicon);
    Engine engine(config.engine, analyzer, world.catalog, variant);
    for (const auto& user : world.warmup) run_conversation(engine, user, world, config.simulation.top_k, config.lexicon);
    const auto warm_counts = engine.counters().tier_requests;
    std::vector<ConversationLog> logs;
    for (const auto& user : world.users) {
      auto log = run_conversation(engine, user, world, config.simulation.top_k, config.lexicon);
      log.seed = seed;
      logs.push_back(std::move(log));
    }
    SeedMetrics m;
    m.seed = seed;
    m.success_at_k = success_at_k(logs, report.k);
    m.recall_at_k = mean_recall_at_k(logs, report.k);
    m.ndcg_at_k = mean_ndcg_at_k(logs, report.k);
    m.avg_turns = avg_turns(logs);
    m.tier_counts = engine.counters().tier_requests;
    for (std::size_t t = 0; t < 3; ++t) m.tier_counts[t] -= warm_counts[t];
    report.per_seed.push_back(m);
    result.logs.insert(result.logs.end(), std::make_move_iterator(logs.begin()),
                       std::make_move_iterator(logs.end()));
  }

  std::vector<double> s, r, n, t;
  for (const auto& m : report.per_seed) {
    s.push_back(m.success_at_k);
    r.push_back(m.recall_at_k);
    n.push_back(m.ndcg_at_k);
    t.push_back(m.avg_turns);
  }
  report.success_at_k = mean(s);
  report.recall_at_k = mean(r);
  report.ndcg_at_k = mean(n);
  report.avg_turns = mean(t);
  return result;
}

json log_to_json(const ConversationLog& log) {
  json turns = json::array();
  for (const auto& t : log.turns) {
    json fb = {{"liked", t.feedback.liked_items}, {"clicks", t.feedback.clicks}, {"dwell_ms", t.feedback.dwell_ms}};
    turns.push_back({{"utterance", t.utterance},
                     {"tier", to_string(t.decision.tier)},
                     {"complexity", t.decision.score.value},
                     {"cache_hit", t.decision.cache_hit},
                     {"weights", t.weights.w},
                     {"top_items", t.top_items},
                     {"top_scores", t.top_scores},
                     {"work_units", t.work_units},
                     {"feedback", fb}});
  }
  return json{{"seed", log.seed},
              {"user_id", log.user_id},
              {"outcome", log.outcome == Outcome::Success ? "Success" : "Abandoned"},
              {"turns_used", log.turns_used},
              {"relevant_count", log.relevant.size()},
              {"turns", turns}};
}

void write_experiment(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "report.json");
    if (!out) throw InvalidConfig("cannot write " + (out_dir / "report.json").string());
    out << to_json(result.report).dump(2) << '\n';
  }
  std::ofstream out(out_dir / "conversations.jsonl");
  if (!out) throw InvalidConfig("cannot write " + (out_dir / "conversations.jsonl").string());
  for (const auto& log : result.logs) out << log_to_json(log).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Query mix

std::vector<QueryDescriptor> parse_query_mix(const std::string& text) {
  std::vector<QueryDescriptor> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw InvalidConfig("query mix line " + std::to_string(line_no) + ": expected turn<TAB>coverage<TAB>text");
    }
    QueryDescriptor q;
    try {
      q.turn_index = std::stoul(line.substr(0, t1));
      q.coverage = std::stod(line.substr(t1 + 1, t2 - t1 - 1));
    } catch (const std::exception&) {
      throw InvalidConfig("query mix line " + std::to_string(line_no) + ": bad number");
    }
    q.text = line.substr(t2 + 1);
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<QueryDescriptor> load_query_mix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("query mix " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_query_mix(buf.str());
}

std::string format_query_mix(const std::vector<QueryDescriptor>& queries) {
  std::string out = "# turn_index\tprofile_coverage\tutterance\n";
  char buf[40];
  for (const auto& q : queries) {
    std::snprintf(buf, sizeof buf, "%zu\t%.17g\t", q.turn_index, q.coverage);
    out += buf;
    out += q.text;
    out += '\n';
  }
  return out;
}

std::vector<QueryDescriptor> reference_query_mix(const ExperimentConfig& config, std::size_t count) {
  std::vector<QueryDescriptor> out;
  ExperimentConfig run = config;
  run.variant = "Full";
  run.simulation.warmup_users = 0;
  std::uint64_t seed = config.seeds.empty() ? 1 : config.seeds.front();
  while (out.size() < count) {
    run.seeds = {seed++};
    const auto result = run_experiment(run);
    for (const auto& log : result.logs) {
      for (std::size_t t = 0; t < log.turns.size() && out.size() < count; ++t) {
        const auto& turn = log.turns[t];
        out.push_back({t, 1.0 - turn.decision.score.profile_incompleteness, turn.utterance});
      }
    }
  }
  return out;
}

std::vector<double> complexity_values(const std::vector<QueryDescriptor>& queries, const Lexicon& lexicon,
                                      const EngineConfig& config) {
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    const auto intent = classify_intent(q.text, lexicon, config.intent_smoothing);
    out.push_back(complexity_from_parts(q.turn_index, q.coverage, intent, config.router.complexity).value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Non-stationary stream

StreamResult run_nonstationary_stream(std::uint64_t seed, bool adaptive, const StreamConfig& config) {
  RandomStream world(seed, "stream.world");
  WeightNet net = WeightNet::seeded(config.state_dim + kNumAgents * config.history_window,
                                    config.hidden_dim, derive_seed(seed, "stream.net"), config.init_scale);
  RewardBaseline baseline;
  PerformanceHistory performance(config.history_window);

  std::vector<std::string> ids(config.candidates);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "c%03zu", i);
    ids[i] = buf;
  }

  StreamResult out;
  for (std::size_t t = 0; t < config.turns; ++t) {
    const AgentId reliable = t < config.switch_at ? config.reliable_before : config.reliable_after;
    CoordinatorFeatures features;
    features.state_features.resize(config.state_dim);
    for (auto& x : features.state_features) x = world.uniform();
    features.perf_history = performance.rows();

    const std::size_t target = world.index(config.candidates);
    std::vector<AgentScores> scores;
    for (const auto agent : kAllAgents) {
      AgentScores s{agent, std::vector<double>(config.candidates)};
      for (std::size_t i = 0; i < config.candidates; ++i) {
        s.scores[i] = agent == reliable ? (i == target ? 1.0 : world.uniform(0.0, 0.7)) : world.uniform();
      }
      scores.push_back(std::move(s));
    }

    const Weights w = adaptive ? compute_weights(features, net) : Weights::uniform();
    const auto ranked = fuse_scores(w, scores, ids);
    FeedbackSignal feedback;
    feedback.liked_items.push_back(ids[target]);
    const auto reward = turn_reward(ranked, feedback, config.k);
    performance.push(reward.per_agent);
    if (adaptive) {
      net = update_net(net, features, w, reward, baseline, UpdateConfig{config.learning_rate});
    }
    out.cumulative_reward += reward.reward;
    out.rewards.push_back(reward.reward);
    out.reliable_weight.push_back(w[reliable]);
  }
  return out;
}

}  // namespace agentrec::sim
