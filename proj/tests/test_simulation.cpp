#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "agentrec/errors.hpp"
#include "agentrec/simulation.hpp"
#include "oracles.hpp"

using namespace agentrec;
using namespace agentrec::sim;

namespace {

SimulationConfig small_sim() {
  SimulationConfig s;
  s.n_items = 60;
  s.n_users = 6;
  s.warmup_users = 4;
  return s;
}

World small_world(std::uint64_t seed = 3) {
  const auto& lex = Lexicon::builtin();
  const auto s = small_sim();
  return generate_world(seed, lex.vocab_size(), s.n_items, s.n_users, s, lex);
}

RankedList list_of(const std::vector<std::string>& ids) {
  RankedList r;
  for (std::size_t i = 0; i < ids.size(); ++i) r.entries.push_back({ids[i], 1.0 - 0.01 * i, {}, {}});
  return r;
}

LoggedTurn turn_with_rank(std::size_t rank) {
  LoggedTurn t;
  t.first_acceptable_rank = rank;
  return t;
}

ExperimentConfig small_experiment(const std::string& variant = "Full") {
  ExperimentConfig e;
  e.simulation = small_sim();
  e.variant = variant;
  e.seeds = {1, 2};
  return e;
}

}  // namespace

TEST(GenerateWorld, Deterministic) {
  const auto a = small_world(9), b = small_world(9);
  ASSERT_EQ(a.catalog.size(), b.catalog.size());
  for (std::size_t i = 0; i < a.catalog.size(); ++i) {
    EXPECT_EQ(a.catalog[i].attributes, b.catalog[i].attributes);
    EXPECT_EQ(a.catalog[i].context_affinity, b.catalog[i].context_affinity);
    EXPECT_EQ(a.catalog[i].name, b.catalog[i].name);
  }
  ASSERT_EQ(a.users.size(), b.users.size());
  for (std::size_t u = 0; u < a.users.size(); ++u) {
    EXPECT_EQ(a.users[u].true_preferences, b.users[u].true_preferences);
    EXPECT_EQ(a.users[u].rng_seed, b.users[u].rng_seed);
  }
  EXPECT_NE(small_world(10).users[0].true_preferences, a.users[0].true_preferences);
}

TEST(GenerateWorld, FloorsEnforced) {
  const auto& lex = Lexicon::builtin();
  EXPECT_THROW(generate_world(1, lex.vocab_size(), 10, 5, small_sim(), lex), InvalidConfig);
  EXPECT_THROW(generate_world(1, 3, 100, 5, small_sim(), lex), InvalidConfig);
}

TEST(GenerateWorld, ShapeOfItemsAndUsers) {
  const auto w = small_world();
  for (const auto& c : w.catalog) {
    const auto active = std::count_if(c.attributes.begin(), c.attributes.end(), [](double v) { return v > 0; });
    EXPECT_GE(active, 1);
    EXPECT_LE(active, 4);
    for (double v : c.attributes) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_EQ(c.context_affinity.size(), kContextDim);
    EXPECT_GE(c.popularity, 0.0);
    EXPECT_LE(c.novelty, 1.0);
  }
  for (const auto* group : {&w.users, &w.warmup}) {
    for (const auto& u : *group) {
      const auto strong = std::count_if(u.true_preferences.begin(), u.true_preferences.end(),
                                        [](double p) { return std::abs(p) >= 0.7; });
      EXPECT_GE(strong, 3);
      for (double p : u.true_preferences) EXPECT_LE(std::abs(p), 1.0);
    }
  }
  EXPECT_EQ(w.users.size(), 6u);
  EXPECT_EQ(w.warmup.size(), 4u);
}

TEST(GenerateWorld, EveryUserCanBeSatisfied) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto w = small_world(seed);
    for (const auto& u : w.users) {
      const bool ok = std::any_of(w.catalog.begin(), w.catalog.end(),
                                  [&](const Candidate& c) { return true_affinity(u, c) >= u.accept_threshold; });
      EXPECT_TRUE(ok) << u.user_id;
    }
  }
}

TEST(SimulateTurn, AcceptsPerfectTopItem) {
  auto w = small_world();
  auto user = w.users[0];
  std::fill(user.true_preferences.begin(), user.true_preferences.end(), 1.0);
  UserState st(user, w.catalog);
  EXPECT_DOUBLE_EQ(true_affinity(user, w.catalog[5]), 1.0);
  const auto r = simulate_turn(st, list_of({w.catalog[5].item_id, w.catalog[6].item_id}), 10, Lexicon::builtin());
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.feedback.liked_items, std::vector<std::string>{w.catalog[5].item_id});
}

TEST(SimulateTurn, ForcedDisclosureNamesStrongestAttribute) {
  const auto& lex = Lexicon::builtin();
  auto w = small_world();
  auto user = w.users[0];
  std::fill(user.true_preferences.begin(), user.true_preferences.end(), -0.1);
  user.true_preferences[7] = 0.9;   // jazz
  user.true_preferences[3] = -0.8;  // horror
  user.true_preferences[8] = 0.75;
  user.disclosure_rate = 1.0;
  UserState st(user, w.catalog);
  std::vector<std::string> unacceptable;
  for (const auto& c : w.catalog) {
    if (!st.acceptable(c.item_id) && unacceptable.size() < 10) unacceptable.push_back(c.item_id);
  }
  const auto r1 = simulate_turn(st, list_of(unacceptable), 10, lex);
  EXPECT_FALSE(r1.accepted);
  EXPECT_EQ(r1.disclosed_attribute, 7u);
  EXPECT_NE(r1.utterance.find("jazz"), std::string::npos);
  const auto s1 = extract_preferences(r1.utterance, lex);
  ASSERT_EQ(s1.size(), 1u);
  EXPECT_EQ(s1[0].polarity, 1.0);

  const auto r2 = simulate_turn(st, list_of(unacceptable), 10, lex);
  EXPECT_EQ(r2.disclosed_attribute, 3u);
  const auto s2 = extract_preferences(r2.utterance, lex);
  ASSERT_EQ(s2.size(), 1u);
  EXPECT_EQ(s2[0].attribute_id, 3u);
  EXPECT_EQ(s2[0].polarity, -1.0);
}

TEST(SimulateTurn, SameStateSameOutput) {
  const auto w = small_world();
  UserState a(w.users[1], w.catalog), b(w.users[1], w.catalog);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < 10; ++i) ids.push_back(w.catalog[i].item_id);
  for (int t = 0; t < 5; ++t) {
    const auto ra = simulate_turn(a, list_of(ids), 10, Lexicon::builtin());
    const auto rb = simulate_turn(b, list_of(ids), 10, Lexicon::builtin());
    EXPECT_EQ(ra.utterance, rb.utterance);
    EXPECT_EQ(ra.feedback.clicks, rb.feedback.clicks);
    EXPECT_EQ(ra.accepted, rb.accepted);
  }
}

TEST(Ndcg, Examples) {
  const std::map<std::string, int> rel{{"a", 1}};
  EXPECT_NEAR(ndcg_at_k({"x", "a", "y"}, rel, 10), 1.0 / std::log2(3.0), 1e-15);
  EXPECT_NEAR(ndcg_at_k({"x", "a", "y"}, rel, 10), 0.6309, 1e-4);
  EXPECT_EQ(ndcg_at_k({"a", "b", "x"}, {{"a", 1}, {"b", 1}}, 10), 1.0);
  EXPECT_EQ(ndcg_at_k({"x", "y"}, {}, 10), 0.0);
  EXPECT_EQ(ndcg_at_k({"x", "a"}, rel, 1), 0.0);
  EXPECT_THROW(ndcg_at_k({"a"}, rel, 0), InvalidConfig);
}

TEST(Ndcg, MatchesBruteForce) {
  oracle::Gen g(51);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + g.below(8);
    std::vector<std::string> items;
    std::map<std::string, int> rel;
    for (std::size_t i = 0; i < n; ++i) {
      items.push_back("i" + std::to_string(i));
      if (g.below(2)) rel[items.back()] = 1;
    }
    std::vector<std::string> ranked = items;
    for (std::size_t i = n; i > 1; --i) std::swap(ranked[i - 1], ranked[g.below(i)]);
    const std::size_t k = 1 + g.below(10);
    const double ideal = oracle::ideal_dcg_brute(items, rel, k);
    const double expect = ideal > 0 ? oracle::dcg(ranked, rel, k) / ideal : 0.0;
    ASSERT_NEAR(ndcg_at_k(ranked, rel, k), expect, 1e-12);
  }
}

TEST(Recall, Basic) {
  EXPECT_DOUBLE_EQ(recall_at_k({"a", "x", "b"}, {"a", "b", "c", "d"}, 2), 0.25);
  EXPECT_DOUBLE_EQ(recall_at_k({"a", "x", "b"}, {"a", "b", "c", "d"}, 3), 0.5);
  EXPECT_EQ(recall_at_k({"a"}, {}, 3), 0.0);
}

TEST(Metrics, TwoLogFixture) {
  ConversationLog win, lose;
  win.turns = {turn_with_rank(SIZE_MAX), turn_with_rank(SIZE_MAX), turn_with_rank(2)};
  win.turns_used = 3;
  win.outcome = Outcome::Success;
  lose.turns.assign(15, turn_with_rank(SIZE_MAX));
  lose.turns_used = 15;
  const std::vector<ConversationLog> logs{win, lose};
  EXPECT_DOUBLE_EQ(success_at_k(logs, 10), 0.5);
  EXPECT_DOUBLE_EQ(avg_turns(logs), 9.0);
  EXPECT_DOUBLE_EQ(success_at_k(logs, 2), 0.0);
}

TEST(Metrics, AllSucceedFirstTurn) {
  ConversationLog l;
  l.turns = {turn_with_rank(0)};
  l.turns_used = 1;
  const std::vector<ConversationLog> logs(4, l);
  EXPECT_EQ(success_at_k(logs, 10), 1.0);
  EXPECT_EQ(avg_turns(logs), 1.0);
}

TEST(Metrics, NoneSucceed) {
  ConversationLog l;
  l.turns.assign(15, turn_with_rank(SIZE_MAX));
  l.turns_used = 15;
  const std::vector<ConversationLog> logs(3, l);
  EXPECT_EQ(success_at_k(logs, 10), 0.0);
  EXPECT_EQ(avg_turns(logs), 15.0);
}

TEST(Metrics, EmptyLogs) {
  EXPECT_THROW(success_at_k({}, 10), InvalidConfig);
  EXPECT_THROW(avg_turns({}), InvalidConfig);
  EXPECT_THROW(mean_recall_at_k({}, 10), InvalidConfig);
  EXPECT_THROW(mean_ndcg_at_k({}, 10), InvalidConfig);
}

TEST(Metrics, SuccessMonotoneInKAndRangesHold) {
  const auto result = run_experiment(small_experiment());
  const auto& logs = result.logs;
  double prev = 0.0;
  for (std::size_t k = 1; k <= 60; ++k) {
    const double s = success_at_k(logs, k);
    EXPECT_GE(s, prev);
    prev = s;
  }
  for (const auto& l : logs) {
    EXPECT_LE(l.turns_used, 15u);
    EXPECT_GE(l.turns_used, 1u);
    const bool hit = std::any_of(l.turns.begin(), l.turns.end(), [](const LoggedTurn& t) {
      return t.first_acceptable_rank < 10;
    });
    EXPECT_EQ(hit, l.outcome == Outcome::Success);
  }
  const auto& r = result.report;
  for (double m : {r.success_at_k, r.recall_at_k, r.ndcg_at_k}) {
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, 1.0);
  }
  EXPECT_GE(r.avg_turns, 1.0);
  EXPECT_EQ(r.per_seed.size(), 2u);
  EXPECT_EQ(logs.size(), 12u);
}

TEST(Experiment, Errors) {
  auto e = small_experiment("Nope");
  EXPECT_THROW(run_experiment(e), InvalidConfig);
  e = small_experiment();
  e.simulation.n_users = 0;
  EXPECT_THROW(run_experiment(e), InvalidConfig);
  e = small_experiment();
  e.seeds.clear();
  EXPECT_THROW(run_experiment(e), InvalidConfig);
}

TEST(Experiment, ReportIsReproducible) {
  for (const char* v : {"Full", "FixedUniformWeights", "NoRefineRound", "Tier2Only"}) {
    const auto a = to_json(run_experiment(small_experiment(v)).report).dump(2);
    const auto b = to_json(run_experiment(small_experiment(v)).report).dump(2);
    EXPECT_EQ(a, b) << v;
  }
}

TEST(Experiment, Tier2OnlyRoutesEverythingToReasoning) {
  const auto r = run_experiment(small_experiment("Tier2Only"));
  for (const auto& l : r.logs) {
    for (const auto& t : l.turns) EXPECT_EQ(t.decision.tier, Tier::Reasoning);
  }
}

TEST(Experiment, FixedWeightsStayUniform) {
  const auto r = run_experiment(small_experiment("FixedUniformWeights"));
  for (const auto& l : r.logs) {
    for (const auto& t : l.turns) EXPECT_EQ(t.weights, Weights::uniform());
  }
}

TEST(Experiment, WritesReportAndLog) {
  const auto dir = std::filesystem::temp_directory_path() / "agentrec_sim_out";
  std::filesystem::remove_all(dir);
  const auto result = run_experiment(small_experiment());
  write_experiment(result, dir);
  std::ifstream report(dir / "report.json");
  const auto j = nlohmann::json::parse(report);
  EXPECT_EQ(j["variant"], "Full");
  EXPECT_EQ(j["per_seed"]["seeds"].size(), 2u);
  EXPECT_TRUE(j.contains("config_fingerprint"));
  std::ifstream log(dir / "conversations.jsonl");
  std::size_t lines = 0;
  for (std::string line; std::getline(log, line);) {
    const auto row = nlohmann::json::parse(line);
    EXPECT_TRUE(row.contains("turns"));
    ++lines;
  }
  EXPECT_EQ(lines, 12u);
}

TEST(QueryMix, FormatParseRoundTrip) {
  const std::vector<QueryDescriptor> q{{0, 0.0, "hi there"}, {4, 0.4375, "i love jazz"}};
  const auto back = parse_query_mix("# comment\n" + format_query_mix(q));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].turn_index, 4u);
  EXPECT_EQ(back[1].coverage, 0.4375);
  EXPECT_EQ(back[1].text, "i love jazz");
  EXPECT_THROW(parse_query_mix("x\ty\n"), InvalidConfig);
}

TEST(QueryMix, ReferenceMixIsDeterministic) {
  auto e = small_experiment();
  const auto a = reference_query_mix(e, 300);
  const auto b = reference_query_mix(e, 300);
  ASSERT_EQ(a.size(), 300u);
  EXPECT_EQ(format_query_mix(a), format_query_mix(b));
  const auto values = complexity_values(a, e.lexicon, e.engine);
  ASSERT_EQ(values.size(), 300u);
  for (double v : values) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Stream, AdaptiveBeatsUniformOnASeed) {
  const auto adaptive = run_nonstationary_stream(1, true);
  const auto fixed = run_nonstationary_stream(1, false);
  EXPECT_EQ(adaptive.rewards.size(), 200u);
  EXPECT_GT(adaptive.cumulative_reward, fixed.cumulative_reward);
  for (double w : fixed.reliable_weight) EXPECT_EQ(w, 0.25);
  const auto again = run_nonstationary_stream(1, true);
  EXPECT_EQ(again.rewards, adaptive.rewards);
}
