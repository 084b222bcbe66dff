#include "wgc/replay.hpp"

#include <stdexcept>

#include "wgc/scenario.hpp"

namespace wgc {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string event_line(const Event& e) {
  ordered_json j{{"record", "event"}};
  const ordered_json body = to_json(e);
  for (auto& [k, v] : body.items()) j[k] = v;
  return j.dump();
}

std::optional<ActionKind> parse_action_kind(std::string_view s) {
  for (ActionKind k : {ActionKind::noop, ActionKind::stop, ActionKind::move, ActionKind::shoot,
                       ActionKind::depolymerize, ActionKind::polymerize}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    if (nl > start) lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

ReplayHeader header_from_json(const ordered_json& j) {
  ReplayHeader h;
  h.version = j.at("version").get<int>();
  h.engine = j.at("engine").get<std::string>();
  h.scenario_document = j.at("scenario").dump();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.red_policy = j.value("red_policy", "");
  h.blue_policy = j.value("blue_policy", "");
  h.red_seed = j.value("red_seed", std::uint64_t{0});
  h.blue_seed = j.value("blue_seed", std::uint64_t{0});
  return h;
}

}  // namespace

ordered_json action_record(int tick, const ActionMap& actions) {
  ordered_json list = ordered_json::array();
  for (const auto& [id, a] : actions) {
    list.push_back(ordered_json::array({id, to_string(a.kind), a.arg}));
  }
  return ordered_json{{"record", "actions"}, {"tick", tick}, {"actions", std::move(list)}};
}

ReplayWriter::ReplayWriter(const ReplayHeader& h) {
  ordered_json j;
  j["record"] = "header";
  j["format"] = "wgc-replay";
  j["version"] = h.version;
  j["engine"] = h.engine;
  j["seed"] = h.seed;
  j["red_policy"] = h.red_policy;
  j["red_seed"] = h.red_seed;
  j["blue_policy"] = h.blue_policy;
  j["blue_seed"] = h.blue_seed;
  j["scenario"] = ordered_json::parse(h.scenario_document);
  text_ = j.dump();
  text_ += '\n';
}

void ReplayWriter::actions(int tick, const ActionMap& actions) {
  text_ += action_record(tick, actions).dump();
  text_ += '\n';
}

void ReplayWriter::events(std::span<const Event> events) {
  for (const auto& e : events) {
    text_ += event_line(e);
    text_ += '\n';
  }
}

void ReplayWriter::finish(const GameState& s) {
  ordered_json j;
  j["record"] = "end";
  j["outcome"] = s.outcome ? to_string(*s.outcome) : "none";
  j["ticks"] = s.tick;
  j["red_blood"] = s.side_blood(Side::red);
  j["blue_blood"] = s.side_blood(Side::blue);
  j["event_count"] = s.events.size();
  j["event_digest"] = event_log_digest(s.events);
  text_ += j.dump();
  text_ += '\n';
}

std::string_view to_string(VerifyReport::Status s) {
  switch (s) {
    case VerifyReport::Status::ok: return "ok";
    case VerifyReport::Status::diverged: return "diverged";
    case VerifyReport::Status::version_mismatch: return "version_mismatch";
    case VerifyReport::Status::truncated: return "truncated";
    case VerifyReport::Status::malformed: return "malformed";
  }
  return "?";
}

ReplayHeader parse_replay_header(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw std::runtime_error("empty replay");
  const auto j = ordered_json::parse(lines.front());
  if (j.value("record", "") != "header") throw std::runtime_error("first record is not a header");
  return header_from_json(j);
}

VerifyReport verify_replay(std::string_view text) {
  using Status = VerifyReport::Status;
  auto fail = [](Status st, std::string msg) {
    VerifyReport r;
    r.status = st;
    r.message = std::move(msg);
    return r;
  };

  const auto lines = split_lines(text);
  if (lines.empty()) return fail(Status::truncated, "replay is empty");

  ordered_json header_json;
  try {
    header_json = ordered_json::parse(lines.front());
  } catch (const std::exception& e) {
    return fail(Status::malformed, std::string("unreadable header: ") + e.what());
  }
  if (header_json.value("record", "") != "header" ||
      header_json.value("format", "") != "wgc-replay") {
    return fail(Status::malformed, "first record is not a wgc-replay header");
  }
  ReplayHeader header;
  try {
    header = header_from_json(header_json);
  } catch (const std::exception& e) {
    return fail(Status::malformed, std::string("bad header: ") + e.what());
  }
  if (header.version != kReplayFormatVersion) {
    return fail(Status::version_mismatch,
                "replay format version " + std::to_string(header.version) + ", expected " +
                    std::to_string(kReplayFormatVersion));
  }
  if (header.engine != kEngineVersion) {
    return fail(Status::version_mismatch,
                "recorded with " + header.engine + ", this is " + std::string(kEngineVersion));
  }

  GameState state;
  try {
    state = reset(load_scenario(header.scenario_document), header.seed);
  } catch (const std::exception& e) {
    return fail(Status::malformed, std::string("header scenario rejected: ") + e.what());
  }

  std::size_t produced = 0;  // events of `state` already matched against the file
  std::size_t event_index = 0;
  auto diverged = [&](std::string msg, std::string expected, std::string actual) {
    VerifyReport r;
    r.status = Status::diverged;
    r.message = std::move(msg);
    r.event_index = event_index;
    r.expected = std::move(expected);
    r.actual = std::move(actual);
    return r;
  };

  for (std::size_t i = 1; i < lines.size(); ++i) {
    ordered_json rec;
    try {
      rec = ordered_json::parse(lines[i]);
    } catch (const std::exception&) {
      if (i + 1 == lines.size()) return fail(Status::truncated, "last record is incomplete");
      return fail(Status::malformed, "unreadable record on line " + std::to_string(i + 1));
    }
    const std::string kind = rec.value("record", "");
    if (kind == "actions") {
      if (produced < state.events.size()) {
        return diverged("re-simulation produced an event missing from the replay", "",
                        event_line(state.events[produced]));
      }
      ActionMap actions;
      try {
        for (const auto& a : rec.at("actions")) {
          const auto k = parse_action_kind(a.at(1).get<std::string>());
          if (!k) return fail(Status::malformed, "unknown action kind on line " + std::to_string(i + 1));
          actions[a.at(0).get<OperatorId>()] = AgentAction{*k, a.at(2).get<int>()};
        }
      } catch (const nlohmann::json::exception& e) {
        return fail(Status::malformed, std::string("bad action record: ") + e.what());
      }
      try {
        step(state, actions);
      } catch (const ContractError& e) {
        return diverged(std::string("transcript rejected by engine: ") + e.what(),
                        std::string(lines[i]), "");
      }
    } else if (kind == "event") {
      if (produced >= state.events.size()) {
        return diverged("replay contains an event the re-simulation did not produce",
                        std::string(lines[i]), "");
      }
      const std::string actual = event_line(state.events[produced]);
      if (actual != lines[i]) {
        return diverged("event differs", std::string(lines[i]), actual);
      }
      ++produced;
      ++event_index;
    } else if (kind == "end") {
      if (produced < state.events.size()) {
        return diverged("re-simulation produced an event missing from the replay", "",
                        event_line(state.events[produced]));
      }
      ReplayWriter tail(header);
      tail.finish(state);
      const auto tail_lines = split_lines(tail.text());
      const std::string expected_end(tail_lines.back());
      if (expected_end != lines[i]) {
        return diverged("end record differs", std::string(lines[i]), expected_end);
      }
      if (i + 1 != lines.size()) return fail(Status::malformed, "records after the end record");
      return VerifyReport{};
    } else {
      return fail(Status::malformed, "unknown record kind '" + kind + "'");
    }
  }
  return fail(Status::truncated, "replay has no end record");
}

}  // namespace wgc
