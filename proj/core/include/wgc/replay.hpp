#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wgc/engine.hpp"

namespace wgc {

inline constexpr int kReplayFormatVersion = 1;

struct ReplayHeader {
  int version = kReplayFormatVersion;
  std::string engine{kEngineVersion};
  std::string scenario_document;
  std::uint64_t seed = 0;
  std::string red_policy;   // versioned, e.g. "kai0-v1"
  std::string blue_policy;
  std::uint64_t red_seed = 0;
  std::uint64_t blue_seed = 0;
};

// Newline-delimited replay writer:
//   {"record":"header",...}
//   per tick: {"record":"actions",...} followed by {"record":"event",...} lines
//   {"record":"end",...}
class ReplayWriter {
 public:
  explicit ReplayWriter(const ReplayHeader& header);

  void actions(int tick, const ActionMap& actions);
  void events(std::span<const Event> events);
  void finish(const GameState& final_state);

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

nlohmann::ordered_json action_record(int tick, const ActionMap& actions);

struct ReplayRecord {
  enum class Kind { header, actions, event, end };
  Kind kind;
  nlohmann::ordered_json json;
  std::string line;
};

struct VerifyReport {
  enum class Status { ok, diverged, version_mismatch, truncated, malformed };

  Status status = Status::ok;
  std::string message;
  // Index of the first divergent event record (0-based over event records).
  std::optional<std::size_t> event_index;
  std::string expected;  // record from the file
  std::string actual;    // record produced by re-simulation

  bool ok() const { return status == Status::ok; }
};

std::string_view to_string(VerifyReport::Status s);

// Parses header + records; throws std::runtime_error on malformed lines.
ReplayHeader parse_replay_header(std::string_view text);

// Re-simulates from the header scenario, seed and action transcript and
// compares every event and the end record.
VerifyReport verify_replay(std::string_view text);

}  // namespace wgc
