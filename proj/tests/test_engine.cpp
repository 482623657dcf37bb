#include <gtest/gtest.h>

#include <thread>

#include "agentrec/engine.hpp"
#include "agentrec/errors.hpp"
#include "agentrec/simulation.hpp"

using namespace agentrec;

namespace {

std::vector<Candidate> catalog() {
  const auto& lex = Lexicon::builtin();
  SimulationConfig s;
  s.warmup_users = 0;
  return sim::generate_world(5, lex.vocab_size(), 80, 1, s, lex).catalog;
}

Engine make_engine(Thresholds t, Variant v = Variant::Full) {
  EngineConfig cfg;
  cfg.router.thresholds = t;
  return Engine(cfg, std::make_shared<LexiconAnalyzer>(Lexicon::builtin()), catalog(), v);
}

ContextSnapshot ctx() { return snapshot_context(TimeBucket::Evening, LocationTag::Home, SocialSetting::Alone, 0.0); }

const Thresholds kAllRapid{0.99, 0.995};
const Thresholds kAllReasoning{0.0, 0.995};
const Thresholds kAllDeep{0.0, 0.001};

}  // namespace

TEST(Engine, RepeatedRapidQueryHitsCache) {
  auto engine = make_engine(kAllRapid);
  auto s = engine.new_session("a", ctx());
  const auto first = engine.process_turn(s, "ok thanks", {});
  const auto second = engine.process_turn(s, "ok thanks", {});
  EXPECT_EQ(first.decision.tier, Tier::Rapid);
  EXPECT_FALSE(first.decision.cache_hit);
  EXPECT_EQ(first.work_units, 1u);
  EXPECT_TRUE(second.decision.cache_hit);
  EXPECT_EQ(second.work_units, 0u);
  EXPECT_EQ(second.ranked.item_ids(), first.ranked.item_ids());
  EXPECT_EQ(engine.counters().cache.hits, 1u);
}

TEST(Engine, CacheIsSharedAcrossSessions) {
  auto engine = make_engine(kAllRapid);
  auto a = engine.new_session("a", ctx());
  auto b = engine.new_session("b", ctx());
  engine.process_turn(a, "what else do you have", {});
  EXPECT_TRUE(engine.process_turn(b, "what else do you have", {}).decision.cache_hit);
}

TEST(Engine, WorkUnitsGrowWithTier) {
  auto rapid = make_engine(kAllRapid);
  auto reasoning = make_engine(kAllReasoning);
  auto deep = make_engine(kAllDeep);
  auto no_refine = make_engine(kAllDeep, Variant::NoRefineRound);
  auto s1 = rapid.new_session("a", ctx());
  auto s2 = reasoning.new_session("a", ctx());
  auto s3 = deep.new_session("a", ctx());
  auto s4 = no_refine.new_session("a", ctx());
  const auto r1 = rapid.process_turn(s1, "i love jazz", {});
  const auto r2 = reasoning.process_turn(s2, "i love jazz", {});
  const auto r3 = deep.process_turn(s3, "i love jazz", {});
  const auto r4 = no_refine.process_turn(s4, "i love jazz", {});
  EXPECT_EQ(r1.decision.tier, Tier::Rapid);
  EXPECT_EQ(r2.decision.tier, Tier::Reasoning);
  EXPECT_EQ(r3.decision.tier, Tier::DeepCollab);
  EXPECT_LE(r1.work_units, 1u);
  EXPECT_EQ(r2.work_units, 3u);
  EXPECT_GE(r3.work_units, 5u);
  EXPECT_LT(r1.work_units, r2.work_units);
  EXPECT_LT(r2.work_units, r3.work_units);
  EXPECT_LT(r2.work_units, r4.work_units);
}

TEST(Engine, ReasoningLeavesConvOut) {
  auto engine = make_engine(kAllReasoning);
  auto s = engine.new_session("a", ctx());
  const auto r = engine.process_turn(s, "i love jazz", {});
  for (const auto& e : r.ranked.entries) EXPECT_EQ(e.normalized[0], 0.5);
}

TEST(Engine, Tier2OnlyAlwaysReasons) {
  auto engine = make_engine(kAllDeep, Variant::Tier2Only);
  auto s = engine.new_session("a", ctx());
  for (const char* text : {"hi", "i love jazz", "ok thanks", "not into horror"}) {
    EXPECT_EQ(engine.process_turn(s, text, {}).decision.tier, Tier::Reasoning);
  }
}

TEST(Engine, InvalidTextLeavesSessionAlone) {
  auto engine = make_engine(kAllDeep);
  auto s = engine.new_session("a", ctx());
  engine.process_turn(s, "i love jazz", {});
  const auto profile = s.profile;
  const auto turns = s.history.size();
  FeedbackSignal f;
  f.liked_items = {engine.candidates()[0].item_id};
  EXPECT_THROW(engine.process_turn(s, "   ", f), InvalidUtterance);
  EXPECT_EQ(s.profile, profile);
  EXPECT_EQ(s.history.size(), turns);
  EXPECT_TRUE(s.pending.has_value());
  EXPECT_EQ(engine.counters().net_updates, 0u);
}

TEST(Engine, DeepTurnWithAcceptanceUpdatesNet) {
  auto engine = make_engine(kAllDeep);
  auto s = engine.new_session("a", ctx());
  const auto before = engine.net();
  const auto first = engine.process_turn(s, "i love jazz", {});
  FeedbackSignal f;
  f.liked_items = {first.ranked.entries[0].item_id};
  const auto second = engine.process_turn(s, "more like that", f);
  ASSERT_TRUE(second.credit.has_value());
  EXPECT_EQ(second.credit->reward, 1.0);
  EXPECT_TRUE(second.net_updated);
  EXPECT_NE(engine.net(), before);
  EXPECT_NEAR(engine.baseline().value, 0.05, 1e-12);
  EXPECT_EQ(engine.counters().net_updates, 1u);
}

TEST(Engine, ReasoningTurnNeverUpdatesNet) {
  auto engine = make_engine(kAllReasoning);
  auto s = engine.new_session("a", ctx());
  const auto before = engine.net();
  const auto first = engine.process_turn(s, "i love jazz", {});
  FeedbackSignal f;
  f.liked_items = {first.ranked.entries[0].item_id};
  const auto second = engine.process_turn(s, "more like that", f);
  EXPECT_FALSE(second.net_updated);
  EXPECT_EQ(engine.net(), before);
}

TEST(Engine, FixedWeightsNeverLearn) {
  auto engine = make_engine(kAllDeep, Variant::FixedUniformWeights);
  auto s = engine.new_session("a", ctx());
  const auto before = engine.net();
  const auto first = engine.process_turn(s, "i love jazz", {});
  FeedbackSignal f;
  f.liked_items = {first.ranked.entries[0].item_id};
  const auto second = engine.process_turn(s, "more", f);
  EXPECT_EQ(second.weights, Weights::uniform());
  EXPECT_FALSE(second.net_updated);
  EXPECT_EQ(engine.net(), before);
}

TEST(Engine, SettleAtConversationEnd) {
  auto engine = make_engine(kAllDeep);
  auto s = engine.new_session("a", ctx());
  const auto r = engine.process_turn(s, "i love jazz", {});
  FeedbackSignal f;
  f.liked_items = {r.ranked.entries[3].item_id};
  const auto credit = engine.settle_feedback(s, f);
  ASSERT_TRUE(credit.has_value());
  EXPECT_EQ(credit->reward, 1.0);
  EXPECT_FALSE(s.pending.has_value());
  EXPECT_FALSE(engine.settle_feedback(s, f).has_value());
}

TEST(Engine, StatementsReachTheProfile) {
  auto engine = make_engine(kAllReasoning);
  auto s = engine.new_session("a", ctx());
  engine.process_turn(s, "i love jazz", {});
  EXPECT_GT(s.profile.weights[7], 0.0);
  engine.process_turn(s, "not into horror", {});
  EXPECT_LT(s.profile.weights[3], 0.0);
}

TEST(Engine, VariantNames) {
  for (auto v : {Variant::Full, Variant::FixedUniformWeights, Variant::NoRefineRound, Variant::Tier2Only}) {
    EXPECT_EQ(variant_from_string(to_string(v)), v);
  }
  EXPECT_THROW(variant_from_string("Partial"), InvalidConfig);
}

TEST(Engine, RejectsEmptyCatalogAndBadThresholds) {
  EXPECT_THROW(Engine(EngineConfig{}, std::make_shared<LexiconAnalyzer>(Lexicon::builtin()), {}), InvalidConfig);
  EXPECT_THROW(make_engine({0.7, 0.7}), InvalidConfig);
}

TEST(Engine, ConcurrentSessionsShareOneEngine) {
  auto engine = make_engine({0.45, 0.7});
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&engine, t] {
      auto s = engine.new_session("t" + std::to_string(t), ctx());
      FeedbackSignal f;
      for (int turn = 0; turn < 25; ++turn) {
        const auto r = engine.process_turn(s, turn % 2 ? "i love jazz" : "what else do you have", f);
        f = {};
        f.clicks = {r.ranked.entries[turn % 3].item_id};
      }
    });
  }
  for (auto& th : threads) th.join();
  const auto c = engine.counters();
  EXPECT_EQ(c.tier_requests[0] + c.tier_requests[1] + c.tier_requests[2], 100u);
  EXPECT_EQ(c.numeric_errors, 0u);
}
