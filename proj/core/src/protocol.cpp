#include "wgc/protocol.hpp"

#include <stdexcept>

namespace wgc {

using ordered_json = nlohmann::ordered_json;

namespace {

struct RequestError : std::runtime_error {
  RequestError(std::string_view code, const std::string& message, ordered_json detail = {})
      : std::runtime_error(message), code(code), detail(std::move(detail)) {}
  std::string code;
  ordered_json detail;
};

ordered_json error_record(const std::string& op, const std::string& session,
                          const RequestError& e) {
  ordered_json err{{"code", e.code}, {"message", e.what()}};
  if (e.detail.is_object()) {
    for (auto& [k, v] : e.detail.items()) err[k] = v;
  }
  ordered_json r{{"ok", false}, {"op", op}};
  if (!session.empty()) r["session"] = session;
  r["error"] = std::move(err);
  return r;
}

std::shared_ptr<const Scenario> scenario_from(const ordered_json& req) {
  const auto it = req.find("scenario");
  if (it == req.end()) {
    throw RequestError(protocol_error::bad_request, "missing \"scenario\"");
  }
  try {
    if (it->is_string()) {
      return std::make_shared<const Scenario>(builtin_scenario(it->get<std::string>()));
    }
    if (it->is_object()) return std::make_shared<const Scenario>(load_scenario(it->dump()));
  } catch (const std::exception& e) {
    throw RequestError(protocol_error::bad_scenario, e.what());
  }
  throw RequestError(protocol_error::bad_request,
                     "\"scenario\" must be a built-in id such as \"standard/0\" or a document");
}

Side side_from(const ordered_json& req) {
  const std::string s = req.value("side", "red");
  if (auto side = parse_side(s)) return *side;
  throw RequestError(protocol_error::bad_request, "\"side\" must be \"red\" or \"blue\"");
}

template <typename T>
T field(const ordered_json& req, const char* key, T fallback) {
  const auto it = req.find(key);
  if (it == req.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw RequestError(protocol_error::bad_request, std::string("bad type for \"") + key + "\"");
  }
}

}  // namespace

ordered_json env_info_json(const Scenario& scenario, Side side) {
  const ObsLayout obs = ObsLayout::for_side(scenario, side);
  const StateLayout st = StateLayout::for_scenario(scenario);
  const ActionLayout act = ActionLayout::for_side(scenario, side);
  return ordered_json{{"scenario", scenario.id()},
                      {"side", to_string(side)},
                      {"n_agents", obs.max_allies},
                      {"n_enemies", obs.max_enemies},
                      {"obs_shape", obs.total},
                      {"state_shape", st.total},
                      {"n_actions", act.width()},
                      {"episode_limit", scenario.max_ticks},
                      {"gamma", kDefaultGamma},
                      {"layout_version", kLayoutVersion},
                      {"protocol_version", kProtocolVersion}};
}

std::size_t ProtocolServer::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::string ProtocolServer::handle_line(std::string_view line) {
  ordered_json req;
  try {
    req = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    return error_record("", "", RequestError(protocol_error::bad_json, e.what())).dump();
  }
  return handle(req).dump();
}

ordered_json ProtocolServer::handle(const ordered_json& req) {
  std::string op;
  std::string session;
  try {
    if (!req.is_object()) throw RequestError(protocol_error::bad_request, "request must be an object");
    op = field<std::string>(req, "op", "");
    session = field<std::string>(req, "session", "");
    if (op.empty()) throw RequestError(protocol_error::bad_request, "missing \"op\"");
    if (session.empty()) throw RequestError(protocol_error::bad_request, "missing \"session\"");

    std::lock_guard lock(mutex_);
    ordered_json body;
    if (op == "env_info") {
      body = env_info(req, session);
    } else if (op == "reset") {
      body = reset(req, session);
    } else if (op == "step") {
      body = step(req, session);
    } else if (op == "close") {
      body = close(session);
    } else {
      throw RequestError(protocol_error::unknown_op, "unknown op '" + op + "'");
    }
    ordered_json r{{"ok", true}, {"op", op}, {"session", session}};
    for (auto& [k, v] : body.items()) r[k] = std::move(v);
    return r;
  } catch (const RequestError& e) {
    return error_record(op, session, e);
  }
}

ordered_json ProtocolServer::env_info(const ordered_json& req, const std::string& id) {
  if (req.contains("scenario")) {
    return ordered_json{{"info", env_info_json(*scenario_from(req), side_from(req))}};
  }
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw RequestError(protocol_error::unknown_session,
                       "session '" + id + "' does not exist; pass \"scenario\" or reset first");
  }
  return ordered_json{{"info", env_info_json(*it->second.scenario, it->second.side)}};
}

ordered_json ProtocolServer::reset(const ordered_json& req, const std::string& id) {
  Session s;
  s.scenario = scenario_from(req);
  s.side = side_from(req);
  const auto seed = field<std::uint64_t>(req, "seed", 0);
  const auto opponent = field<std::string>(req, "opponent", "kai0");
  const auto opponent_seed = field<std::uint64_t>(req, "opponent_seed", mix_seed(seed, 2));
  try {
    s.opponent = make_policy(opponent, *s.scenario, opposite(s.side), opponent_seed);
  } catch (const ConfigError& e) {
    throw RequestError(protocol_error::bad_policy, e.what());
  }
  s.state = wgc::reset(s.scenario, seed);
  ordered_json frame = to_json(make_frame(*s.state, s.side, 0.0));
  sessions_[id] = std::move(s);
  return ordered_json{{"frame", std::move(frame)}};
}

ordered_json ProtocolServer::step(const ordered_json& req, const std::string& id) {
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw RequestError(protocol_error::unknown_session, "session '" + id + "' does not exist");
  }
  Session& s = it->second;
  if (!s.state) throw RequestError(protocol_error::not_reset, "session has no episode");
  GameState& state = *s.state;
  if (state.outcome) {
    throw RequestError(protocol_error::episode_over, "episode has ended; send reset");
  }
  const auto actions_it = req.find("actions");
  if (actions_it == req.end() || !actions_it->is_array()) {
    throw RequestError(protocol_error::bad_request, "\"actions\" must be an array of indices");
  }
  std::vector<int> indices;
  for (const auto& a : *actions_it) {
    if (!a.is_number_integer()) {
      throw RequestError(protocol_error::bad_request, "action indices must be integers");
    }
    indices.push_back(a.get<int>());
  }

  ActionMap actions;
  try {
    actions = decode_side_actions(state, s.side, indices);
  } catch (const ActionIndexError& e) {
    ordered_json detail{{"slot", e.slot()}, {"agent", e.agent()}, {"index", e.index()}};
    if (e.slot() >= 0) {
      detail["mask"] = action_mask(state, e.agent(), ActionLayout::for_side(*s.scenario, s.side));
    }
    throw RequestError(protocol_error::illegal_action, e.what(), std::move(detail));
  }
  const Side other = opposite(s.side);
  actions.merge(decode_side_actions(state, other, s.opponent->act(observe_side(state, other))));

  const double ally_before = state.side_blood(s.side);
  const double enemy_before = state.side_blood(other);
  wgc::step(state, actions);
  const double reward =
      compute_reward(ally_before - state.side_blood(s.side), enemy_before - state.side_blood(other),
                     state, s.side, state.outcome.has_value());
  return ordered_json{{"frame", to_json(make_frame(state, s.side, reward))}};
}

ordered_json ProtocolServer::close(const std::string& id) {
  if (sessions_.erase(id) == 0) {
    throw RequestError(protocol_error::unknown_session, "session '" + id + "' does not exist");
  }
  return ordered_json::object();
}

}  // namespace wgc
