#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "wgc/bots.hpp"
#include "wgc/engine.hpp"
#include "wgc/rlapi.hpp"

namespace wgc {

inline constexpr int kProtocolVersion = 1;

// Error codes carried in {"ok":false,"error":{"code":...}} records.
namespace protocol_error {
inline constexpr std::string_view bad_json = "bad_json";
inline constexpr std::string_view bad_request = "bad_request";
inline constexpr std::string_view unknown_op = "unknown_op";
inline constexpr std::string_view unknown_session = "unknown_session";
inline constexpr std::string_view bad_scenario = "bad_scenario";
inline constexpr std::string_view bad_policy = "bad_policy";
inline constexpr std::string_view not_reset = "not_reset";
inline constexpr std::string_view episode_over = "episode_over";
inline constexpr std::string_view illegal_action = "illegal_action";
}  // namespace protocol_error

// Step protocol endpoint: one JSON request per line in, one JSON response per
// line out. Sessions are keyed by the request's "session" string; the trainer
// drives one side and a built-in policy drives the other. Failed requests
// never change session state.
class ProtocolServer {
 public:
  // Handles one request line; the returned line has no trailing newline.
  std::string handle_line(std::string_view line);
  nlohmann::ordered_json handle(const nlohmann::ordered_json& request);

  std::size_t session_count() const;

 private:
  struct Session {
    std::shared_ptr<const Scenario> scenario;
    Side side = Side::red;
    std::unique_ptr<Policy> opponent;
    std::optional<GameState> state;
  };

  nlohmann::ordered_json env_info(const nlohmann::ordered_json& req, const std::string& id);
  nlohmann::ordered_json reset(const nlohmann::ordered_json& req, const std::string& id);
  nlohmann::ordered_json step(const nlohmann::ordered_json& req, const std::string& id);
  nlohmann::ordered_json close(const std::string& id);

  mutable std::mutex mutex_;
  std::map<std::string, Session> sessions_;
};

nlohmann::ordered_json env_info_json(const Scenario& scenario, Side side);

}  // namespace wgc
