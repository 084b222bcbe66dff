#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "wgc/bots.hpp"
#include "wgc/engine.hpp"
#include "wgc/protocol.hpp"
#include "wgc/replay.hpp"

namespace wgc {

class ServiceError : public std::runtime_error {
 public:
  // code: bad_request, unknown_session, unknown_replay, finished, busy_agent,
  // illegal_action, bad_scenario, bad_policy
  ServiceError(std::string code, const std::string& message,
               nlohmann::ordered_json detail = nlohmann::ordered_json::object());

  const std::string& code() const { return code_; }
  const nlohmann::ordered_json& detail() const { return detail_; }
  int http_status() const;
  nlohmann::ordered_json to_json() const;

 private:
  std::string code_;
  nlohmann::ordered_json detail_;
};

enum class SessionPhase { awaiting_action, advancing, finished };
std::string_view to_string(SessionPhase p);

// Live human-vs-bot games. The human side's ready agents gate each tick; the
// bot side is filled in when the last one is queued. Ticks where the human has
// no ready agent advance on their own.
class SessionManager {
 public:
  explicit SessionManager(std::optional<std::filesystem::path> replay_dir = std::nullopt);
  ~SessionManager();

  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  // body: {"scenario":"standard/0","side":"red","bot":"kai0","seed":1}
  // -> {"session":id,"view":{...}}
  nlohmann::ordered_json create_session(const nlohmann::ordered_json& body);
  nlohmann::ordered_json get_view(const std::string& id) const;
  // -> {"accepted":true,"agent":..,"index":..,"advanced":n,"tick":..,"phase":..}
  nlohmann::ordered_json submit_action(const std::string& id, OperatorId agent, int index);

  // Public event records from position `from`; waits up to `timeout` when none
  // are pending. `finished` reports whether the session has ended.
  std::vector<nlohmann::ordered_json> events_since(const std::string& id, std::size_t from,
                                                   std::chrono::milliseconds timeout,
                                                   bool& finished) const;

  nlohmann::ordered_json list_replays() const;
  std::string get_replay(const std::string& id) const;

  std::size_t session_count() const;

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;
  void store_replay(const std::string& id, const std::string& text);

  std::optional<std::filesystem::path> replay_dir_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::string> replays_;
  std::uint64_t next_id_ = 1;
};

// The human side's view: own units in full, only currently visible enemies
// (id, type, position, blood), masks for ready agents, and the events of the
// last resolved tick with unseen enemy detail removed. After the game ends the
// view carries every operator.
nlohmann::ordered_json side_view_json(const GameState& state, Side side);

// Event as seen by `side` right after it happened, or nullopt when the side
// would not learn of it at all.
std::optional<nlohmann::ordered_json> redact_event(const GameState& state, Side side,
                                                   const Event& event);

// HTTP front end over a SessionManager. Routes:
//   POST /sessions, GET /sessions/{id}/view, POST /sessions/{id}/actions,
//   GET /sessions/{id}/events (chunked NDJSON push), GET /replays, GET /replays/{id}
class HttpService {
 public:
  explicit HttpService(SessionManager& sessions);
  ~HttpService();

  // Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen_after_bind();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Step protocol over a line stream (stdio). Returns when input ends.
void serve_protocol_stream(ProtocolServer& server, std::istream& in, std::ostream& out);

// Step protocol over TCP on 127.0.0.1; one thread per connection. `on_bound`
// receives the port (useful with port 0). Returns when `stop` becomes true.
void serve_protocol_tcp(ProtocolServer& server, int port, const std::atomic<bool>& stop,
                        const std::function<void(int)>& on_bound = {});

}  // namespace wgc
