#include "agentrec/config.hpp"

#include <cstdio>
#include <fstream>

#include "agentrec/errors.hpp"

namespace agentrec {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

void to_json(json& j, const EngineConfig& c) {
  j = json{
      {"encoder", {{"feature_dim", c.encoder.feature_dim}, {"turn_horizon", c.encoder.turn_horizon}}},
      {"intent_smoothing", c.intent_smoothing},
      {"preference",
       {{"decay", c.preference.decay},
        {"explicit_gain", c.preference.explicit_gain},
        {"implicit_gain", c.preference.implicit_gain},
        {"confidence_gain", c.preference.confidence_gain},
        {"click_weight", c.preference.click_weight},
        {"dwell_weight", c.preference.dwell_weight},
        {"dwell_saturation_ms", c.preference.dwell_saturation_ms}}},
      {"attention_gains", c.attention.gains},
      {"coordinator",
       {{"hidden_dim", c.coordinator.hidden_dim},
        {"history_window", c.coordinator.history_window},
        {"learning_rate", c.coordinator.learning_rate},
        {"baseline_factor", c.coordinator.baseline_factor},
        {"init_seed", c.coordinator.init_seed},
        {"init_scale", c.coordinator.init_scale},
        {"reward_k", c.coordinator.reward_k}}},
      {"router",
       {{"tau1", c.router.thresholds.rapid_upper},
        {"tau2", c.router.thresholds.reasoning_upper},
        {"beta", c.router.complexity.beta},
        {"turn_horizon", c.router.complexity.turn_horizon},
        {"cache_capacity", c.router.cache_capacity},
        {"cache_coverage_tolerance", c.router.cache_coverage_tolerance}}},
  };
}

void from_json(const json& j, EngineConfig& c) {
  if (j.contains("encoder")) {
    const auto& e = j.at("encoder");
    read(e, "feature_dim", c.encoder.feature_dim);
    read(e, "turn_horizon", c.encoder.turn_horizon);
  }
  read(j, "intent_smoothing", c.intent_smoothing);
  if (j.contains("preference")) {
    const auto& p = j.at("preference");
    read(p, "decay", c.preference.decay);
    read(p, "explicit_gain", c.preference.explicit_gain);
    read(p, "implicit_gain", c.preference.implicit_gain);
    read(p, "confidence_gain", c.preference.confidence_gain);
    read(p, "click_weight", c.preference.click_weight);
    read(p, "dwell_weight", c.preference.dwell_weight);
    read(p, "dwell_saturation_ms", c.preference.dwell_saturation_ms);
  }
  read(j, "attention_gains", c.attention.gains);
  if (j.contains("coordinator")) {
    const auto& k = j.at("coordinator");
    read(k, "hidden_dim", c.coordinator.hidden_dim);
    read(k, "history_window", c.coordinator.history_window);
    read(k, "learning_rate", c.coordinator.learning_rate);
    read(k, "baseline_factor", c.coordinator.baseline_factor);
    read(k, "init_seed", c.coordinator.init_seed);
    read(k, "init_scale", c.coordinator.init_scale);
    read(k, "reward_k", c.coordinator.reward_k);
  }
  if (j.contains("router")) {
    const auto& r = j.at("router");
    read(r, "tau1", c.router.thresholds.rapid_upper);
    read(r, "tau2", c.router.thresholds.reasoning_upper);
    read(r, "beta", c.router.complexity.beta);
    read(r, "turn_horizon", c.router.complexity.turn_horizon);
    read(r, "cache_capacity", c.router.cache_capacity);
    read(r, "cache_coverage_tolerance", c.router.cache_coverage_tolerance);
  }
}

void to_json(json& j, const SimulationConfig& c) {
  j = json{{"n_items", c.n_items},
           {"n_users", c.n_users},
           {"warmup_users", c.warmup_users},
           {"top_k", c.top_k},
           {"patience", c.patience},
           {"accept_threshold", c.accept_threshold},
           {"disclosure_rate", c.disclosure_rate}};
}

void from_json(const json& j, SimulationConfig& c) {
  read(j, "n_items", c.n_items);
  read(j, "n_users", c.n_users);
  read(j, "warmup_users", c.warmup_users);
  read(j, "top_k", c.top_k);
  read(j, "patience", c.patience);
  read(j, "accept_threshold", c.accept_threshold);
  read(j, "disclosure_rate", c.disclosure_rate);
}

void to_json(json& j, const AppConfig& c) {
  j = json{{"lexicon", c.lexicon},
           {"catalogs", c.catalogs},
           {"engine", c.engine},
           {"simulation", c.simulation},
           {"service", {{"port", c.service.port}, {"top_k", c.service.top_k}, {"journal", c.service.journal}}}};
}

void from_json(const json& j, AppConfig& c) {
  read(j, "lexicon", c.lexicon);
  read(j, "catalogs", c.catalogs);
  read(j, "engine", c.engine);
  read(j, "simulation", c.simulation);
  if (j.contains("service")) {
    const auto& s = j.at("service");
    read(s, "port", c.service.port);
    read(s, "top_k", c.service.top_k);
    read(s, "journal", c.service.journal);
  }
}

std::filesystem::path AppConfig::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || source.empty()) return p;
  return source.parent_path() / p;
}

Lexicon AppConfig::load_lexicon() const {
  if (lexicon.empty()) return Lexicon::builtin();
  return Lexicon::load(resolve(lexicon));
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file " + path.string());
  AppConfig config;
  try {
    json::parse(in).get_to(config);
  } catch (const json::exception& e) {
    throw InvalidConfig("malformed config " + path.string() + ": " + e.what());
  }
  config.source = path;
  return config;
}

void save_config(const AppConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidConfig("cannot write config file " + path.string());
  out << json(config).dump(2) << '\n';
}

std::string fingerprint(const json& j) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_token(j.dump())));
  return buf;
}

}  // namespace agentrec
