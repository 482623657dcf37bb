#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "agentrec/config.hpp"
#include "agentrec/engine.hpp"
#include "json.hpp"

namespace agentrec {

/// Status code plus JSON body; the HTTP layer only copies these out.
struct Reply {
  int status = 200;
  nlohmann::json body;
};

/// Session store and request handlers behind the HTTP API. One engine per
/// catalog; sessions live in memory and optionally in an append-only journal
/// that is replayed on construction.
class Service {
 public:
  Service(AppConfig config, std::map<std::string, std::vector<Candidate>> catalogs,
          std::shared_ptr<const UtteranceAnalyzer> analyzer = nullptr);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Loads every catalog named in the config. AGENTREC_CATALOG replaces the
  /// "default" catalog path and AGENTREC_PORT the port.
  static std::unique_ptr<Service> from_config(AppConfig config);

  // body: {"catalog", "client_token", "context": {"time", "location", "social", "mood"}}
  Reply create_session(const nlohmann::json& body);
  // body: {"text", "feedback": {"liked", "disliked", "clicks", "dwell_ms", "rating"}}
  Reply post_message(const std::string& session_id, const nlohmann::json& body);
  Reply get_state(const std::string& session_id) const;
  Reply health() const;
  Reply metrics() const;

  Engine& engine(const std::string& catalog);
  const AppConfig& config() const { return config_; }
  std::size_t session_count() const;

  /// Serves until stop(); returns false if the socket could not be bound.
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port and serves on a background thread.
  int start_background(const std::string& host = "127.0.0.1");
  void stop();

 private:
  struct Impl;
  AppConfig config_;
  std::unique_ptr<Impl> impl_;
};

FeedbackSignal feedback_from_json(const nlohmann::json& j);
nlohmann::json feedback_to_json(const FeedbackSignal& f);

}  // namespace agentrec
