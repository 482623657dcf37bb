#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "agentrec/conversation_state.hpp"
#include "agentrec/coordinator.hpp"
#include "agentrec/preference_model.hpp"
#include "agentrec/ranking_agent.hpp"
#include "agentrec/tier_router.hpp"
#include "json.hpp"

namespace agentrec {

struct CoordinatorConfig {
  std::size_t hidden_dim = 16;
  std::size_t history_window = 5;  // k
  double learning_rate = 0.05;
  double baseline_factor = 0.95;
  std::uint64_t init_seed = 7;
  double init_scale = 1.0;
  std::size_t reward_k = 10;
};

struct RouterConfig {
  Thresholds thresholds;
  ComplexityWeights complexity;
  std::size_t cache_capacity = 1024;
  double cache_coverage_tolerance = 0.1;
};

/// Everything the engine needs; loaded from the main JSON config file.
struct EngineConfig {
  EncoderConfig encoder;
  double intent_smoothing = 0.25;
  PreferenceConfig preference;
  AttentionGains attention;
  CoordinatorConfig coordinator;
  RouterConfig router;
};

struct SimulationConfig {
  std::size_t n_items = 1000;
  std::size_t n_users = 100;
  std::size_t warmup_users = 6000;
  std::size_t top_k = 10;
  std::size_t patience = 15;
  double accept_threshold = 0.6;
  double disclosure_rate = 0.5;
};

struct ServiceConfig {
  int port = 8080;
  std::size_t top_k = 10;
  std::string journal;  // empty: no journal
};

struct AppConfig {
  std::filesystem::path source;  // file the config was read from, if any
  std::string lexicon;           // empty: built-in lexicon
  std::map<std::string, std::string> catalogs;
  EngineConfig engine;
  SimulationConfig simulation;
  ServiceConfig service;

  /// Resolves a path from the config relative to the config file.
  std::filesystem::path resolve(const std::string& path) const;
  Lexicon load_lexicon() const;
};

void to_json(nlohmann::json& j, const EngineConfig& c);
void from_json(const nlohmann::json& j, EngineConfig& c);
void to_json(nlohmann::json& j, const SimulationConfig& c);
void from_json(const nlohmann::json& j, SimulationConfig& c);
void to_json(nlohmann::json& j, const AppConfig& c);
void from_json(const nlohmann::json& j, AppConfig& c);

AppConfig load_config(const std::filesystem::path& path);
void save_config(const AppConfig& config, const std::filesystem::path& path);

/// FNV-1a of the canonical JSON dump.
std::string fingerprint(const nlohmann::json& j);

}  // namespace agentrec
