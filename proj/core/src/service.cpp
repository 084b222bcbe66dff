#include "wgc/service.hpp"

#include <fstream>
#include <sstream>

#include "wgc/harness.hpp"
#include "wgc/rlapi.hpp"

namespace wgc {

using ordered_json = nlohmann::ordered_json;

ServiceError::ServiceError(std::string code, const std::string& message, ordered_json detail)
    : std::runtime_error(message), code_(std::move(code)), detail_(std::move(detail)) {}

int ServiceError::http_status() const {
  if (code_ == "unknown_session" || code_ == "unknown_replay") return 404;
  if (code_ == "finished" || code_ == "busy_agent") return 409;
  if (code_ == "illegal_action") return 422;
  return 400;
}

ordered_json ServiceError::to_json() const {
  ordered_json err{{"code", code_}, {"message", what()}};
  for (auto& [k, v] : detail_.items()) err[k] = v;
  return ordered_json{{"ok", false}, {"error", std::move(err)}};
}

std::string_view to_string(SessionPhase p) {
  switch (p) {
    case SessionPhase::awaiting_action: return "awaiting_action";
    case SessionPhase::advancing: return "advancing";
    case SessionPhase::finished: return "finished";
  }
  return "?";
}

namespace {

ordered_json hex_json(HexCoord h) { return ordered_json::array({h.q, h.r}); }

ordered_json own_unit_json(const OperatorState& o) {
  const OffsetCoord off = to_offset(o.pos);
  ordered_json j{{"slot", o.slot},
                 {"id", o.id},
                 {"side", to_string(o.side)},
                 {"type", to_string(o.tmpl.type)},
                 {"pos", hex_json(o.pos)},
                 {"col", off.col},
                 {"row", off.row},
                 {"blood", o.blood},
                 {"blood_max", o.tmpl.blood_max},
                 {"alive", o.alive},
                 {"ready", o.ready()},
                 {"move_remaining", o.move_remaining},
                 {"prep_remaining", o.prep_remaining},
                 {"cooldown_remaining", o.cooldown_remaining},
                 {"stop_remaining", o.stop_remaining}};
  j["move_target"] = o.move_target ? hex_json(*o.move_target) : ordered_json(nullptr);
  return j;
}

// The enemy fields an observer is allowed to see.
ordered_json enemy_unit_json(const OperatorState& o) {
  const OffsetCoord off = to_offset(o.pos);
  return ordered_json{{"slot", o.slot},
                      {"id", o.id},
                      {"side", to_string(o.side)},
                      {"type", to_string(o.tmpl.type)},
                      {"pos", hex_json(o.pos)},
                      {"col", off.col},
                      {"row", off.row},
                      {"blood", o.blood}};
}

ordered_json map_json(const GameMap& map) {
  ordered_json cells = ordered_json::array();
  for (HexCoord h : map.cells()) {
    const OffsetCoord off = to_offset(h);
    cells.push_back({{"q", h.q},
                     {"r", h.r},
                     {"col", off.col},
                     {"row", off.row},
                     {"terrain", map.terrain(h) == Terrain::hidden ? "hidden" : "open"}});
  }
  return ordered_json{{"name", map.name()},
                      {"width", map.width()},
                      {"height", map.height()},
                      {"cells", std::move(cells)}};
}

bool safe_id(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

std::optional<ordered_json> redact_event(const GameState& s, Side side, const Event& e) {
  ordered_json j = to_json(e);
  if (e.kind == EventKind::episode_end || s.outcome) return j;

  auto enemy = [&](OperatorId id) { return s.valid_id(id) && s.op(id).side != side; };
  auto seen = [&](OperatorId id) { return visible_to_side(s, side, s.op(id)); };
  auto strip_positions = [&] {
    j.erase("from");
    j.erase("to");
    j.erase("at");
  };

  const bool actor_enemy = enemy(e.actor);
  const bool target_enemy = enemy(e.target);
  const bool target_own = s.valid_id(e.target) && !target_enemy;

  if (e.kind == EventKind::died) {
    if (target_enemy && !seen(e.target)) return std::nullopt;
    return j;
  }
  if (actor_enemy && !seen(e.actor)) {
    // An unseen enemy acting on one of ours: the hit is felt, the shooter stays hidden.
    if (!target_own) return std::nullopt;
    j["actor"] = nullptr;
    strip_positions();
  }
  return j;
}

ordered_json side_view_json(const GameState& s, Side side) {
  ordered_json allies = ordered_json::array();
  ordered_json enemies = ordered_json::array();
  ordered_json masks = ordered_json::object();
  const ActionLayout layout = ActionLayout::for_side(*s.scenario, side);
  for (const auto& o : s.operators) {
    if (o.retired) continue;
    if (o.side == side) {
      allies.push_back(own_unit_json(o));
      if (o.ready() && !s.outcome) masks[std::to_string(o.id)] = action_mask(s, o.id, layout);
    } else if (s.outcome) {
      enemies.push_back(own_unit_json(o));
    } else if (o.alive && visible_to_side(s, side, o)) {
      enemies.push_back(enemy_unit_json(o));
    }
  }
  ordered_json j;
  j["scenario"] = s.scenario->id();
  j["side"] = to_string(side);
  j["tick"] = s.tick;
  j["max_ticks"] = s.scenario->max_ticks;
  j["outcome"] = s.outcome ? ordered_json(to_string(*s.outcome)) : ordered_json(nullptr);
  j["action_layout"] = {{"noop", ActionLayout::kNoop},
                        {"stop", ActionLayout::kStop},
                        {"move_base", ActionLayout::kMoveBase},
                        {"shoot_base", ActionLayout::kShootBase},
                        {"enemy_slots", layout.max_enemies},
                        {"width", layout.width()}};
  j["map"] = map_json(s.map());
  j["allies"] = std::move(allies);
  j["enemies"] = std::move(enemies);
  j["masks"] = std::move(masks);
  return j;
}

struct SessionManager::Session {
  std::string id;
  std::shared_ptr<const Scenario> scenario;
  Side human = Side::red;
  std::unique_ptr<Policy> bot;
  GameState state;
  std::optional<ReplayWriter> writer;
  std::map<OperatorId, int> pending;
  SessionPhase phase = SessionPhase::awaiting_action;
  std::vector<ordered_json> public_events;
  std::vector<ordered_json> last_tick_events;

  mutable std::mutex m;
  mutable std::condition_variable cv;

  // Runs ticks while every ready human agent has a queued action. Returns the
  // number of ticks resolved. Caller holds `m`.
  int advance() {
    int ticks = 0;
    const Side bot_side = opposite(human);
    while (!state.outcome) {
      bool all_queued = true;
      for (OperatorId id : state.side_slots(human)) {
        if (id != kNoOperator && state.op(id).ready() && !pending.contains(id)) all_queued = false;
      }
      if (!all_queued) break;
      phase = SessionPhase::advancing;

      const auto& slots = state.side_slots(human);
      std::vector<int> indices(slots.size(), ActionLayout::kNoop);
      for (std::size_t k = 0; k < slots.size(); ++k) {
        if (auto it = pending.find(slots[k]); it != pending.end()) indices[k] = it->second;
      }
      ActionMap actions = decode_side_actions(state, human, indices);
      actions.merge(decode_side_actions(state, bot_side, bot->act(observe_side(state, bot_side))));

      writer->actions(state.tick, actions);
      const std::size_t before = state.events.size();
      step(state, actions);
      const std::span<const Event> fresh = std::span<const Event>(state.events).subspan(before);
      writer->events(fresh);

      last_tick_events.clear();
      for (const Event& e : fresh) {
        if (auto r = redact_event(state, human, e)) {
          ordered_json rec{{"index", public_events.size()}};
          for (auto& [k, v] : r->items()) rec[k] = v;
          last_tick_events.push_back(rec);
          public_events.push_back(std::move(rec));
        }
      }
      pending.clear();
      ++ticks;
    }
    if (state.outcome) {
      phase = SessionPhase::finished;
      writer->finish(state);
    } else {
      phase = SessionPhase::awaiting_action;
    }
    cv.notify_all();
    return ticks;
  }

  ordered_json view() const {
    ordered_json j{{"session", id}, {"phase", to_string(phase)}};
    const ordered_json side_view = side_view_json(state, human);
    for (auto& [k, v] : side_view.items()) j[k] = v;
    ordered_json queued = ordered_json::object();
    for (const auto& [agent, index] : pending) queued[std::to_string(agent)] = index;
    j["pending"] = std::move(queued);
    j["events"] = last_tick_events;
    j["event_count"] = public_events.size();
    if (phase == SessionPhase::finished) {
      ordered_json all = ordered_json::array();
      for (const Event& e : state.events) all.push_back(to_json(e));
      j["full_events"] = std::move(all);
    }
    return j;
  }
};

SessionManager::SessionManager(std::optional<std::filesystem::path> replay_dir)
    : replay_dir_(std::move(replay_dir)) {
  if (replay_dir_) std::filesystem::create_directories(*replay_dir_);
}

SessionManager::~SessionManager() = default;

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError("unknown_session", "no session '" + id + "'");
  return it->second;
}

std::size_t SessionManager::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

void SessionManager::store_replay(const std::string& id, const std::string& text) {
  std::lock_guard lock(mutex_);
  replays_[id] = text;
  if (replay_dir_) {
    std::ofstream out(*replay_dir_ / (id + ".ndjson"), std::ios::binary);
    out << text;
  }
}

ordered_json SessionManager::create_session(const ordered_json& body) {
  if (!body.is_object()) throw ServiceError("bad_request", "body must be a JSON object");
  auto session = std::make_shared<Session>();
  try {
    const std::string scenario_id = body.value("scenario", "standard/0");
    const std::string side = body.value("side", "red");
    const std::string bot = body.value("bot", "kai0");
    const auto seed = body.value("seed", std::uint64_t{0});

    try {
      session->scenario = std::make_shared<const Scenario>(builtin_scenario(scenario_id));
    } catch (const std::exception& e) {
      throw ServiceError("bad_scenario", e.what());
    }
    const auto parsed_side = parse_side(side);
    if (!parsed_side) throw ServiceError("bad_request", "side must be \"red\" or \"blue\"");
    session->human = *parsed_side;
    const MatchSeeds seeds = MatchSeeds::derive(seed);
    const Side bot_side = opposite(session->human);
    const std::uint64_t bot_seed = bot_side == Side::red ? seeds.red_bot : seeds.blue_bot;
    try {
      session->bot = make_policy(bot, *session->scenario, bot_side, bot_seed);
    } catch (const ConfigError& e) {
      throw ServiceError("bad_policy", e.what());
    }
    session->state = reset(session->scenario, seeds.engine);

    ReplayHeader header;
    header.scenario_document = save_scenario(*session->scenario);
    header.seed = seeds.engine;
    const std::string bot_version(session->bot->version());
    header.red_policy = session->human == Side::red ? "human" : bot_version;
    header.blue_policy = session->human == Side::blue ? "human" : bot_version;
    header.red_seed = seeds.red_bot;
    header.blue_seed = seeds.blue_bot;
    session->writer.emplace(header);
  } catch (const nlohmann::json::exception& e) {
    throw ServiceError("bad_request", e.what());
  }

  {
    std::lock_guard lock(mutex_);
    session->id = "s" + std::to_string(next_id_++);
    sessions_[session->id] = session;
  }
  std::lock_guard lock(session->m);
  session->advance();
  if (session->phase == SessionPhase::finished) store_replay(session->id, session->writer->text());
  return ordered_json{{"session", session->id}, {"view", session->view()}};
}

ordered_json SessionManager::get_view(const std::string& id) const {
  auto session = find(id);
  std::lock_guard lock(session->m);
  return session->view();
}

ordered_json SessionManager::submit_action(const std::string& id, OperatorId agent, int index) {
  auto session = find(id);
  std::lock_guard lock(session->m);
  GameState& s = session->state;
  if (session->phase == SessionPhase::finished) {
    throw ServiceError("finished", "session '" + id + "' has finished");
  }
  if (!s.valid_id(agent) || s.op(agent).side != session->human) {
    throw ServiceError("bad_request", "agent " + std::to_string(agent) + " is not on your side");
  }
  const OperatorState& o = s.op(agent);
  const ActionLayout layout = ActionLayout::for_side(*session->scenario, session->human);
  const auto mask = action_mask(s, agent, layout);
  const ordered_json detail{{"agent", agent}, {"index", index}, {"mask", mask}};
  if (!o.ready()) {
    throw ServiceError("busy_agent", "agent " + std::to_string(agent) + " is not ready", detail);
  }
  if (index < 0 || index >= layout.width() || !mask[static_cast<std::size_t>(index)]) {
    throw ServiceError("illegal_action",
                       "action index " + std::to_string(index) + " is not legal for agent " +
                           std::to_string(agent),
                       detail);
  }
  session->pending[agent] = index;
  const int advanced = session->advance();
  if (session->phase == SessionPhase::finished) store_replay(id, session->writer->text());
  return ordered_json{{"ok", true},
                      {"accepted", true},
                      {"agent", agent},
                      {"index", index},
                      {"advanced", advanced},
                      {"tick", s.tick},
                      {"phase", to_string(session->phase)}};
}

std::vector<ordered_json> SessionManager::events_since(const std::string& id, std::size_t from,
                                                       std::chrono::milliseconds timeout,
                                                       bool& finished) const {
  auto session = find(id);
  std::unique_lock lock(session->m);
  session->cv.wait_for(lock, timeout, [&] {
    return session->public_events.size() > from || session->phase == SessionPhase::finished;
  });
  finished = session->phase == SessionPhase::finished;
  std::vector<ordered_json> out;
  for (std::size_t i = from; i < session->public_events.size(); ++i) {
    out.push_back(session->public_events[i]);
  }
  return out;
}

ordered_json SessionManager::list_replays() const {
  std::map<std::string, std::string> found;
  {
    std::lock_guard lock(mutex_);
    found = replays_;
  }
  if (replay_dir_ && std::filesystem::is_directory(*replay_dir_)) {
    for (const auto& entry : std::filesystem::directory_iterator(*replay_dir_)) {
      if (entry.path().extension() != ".ndjson") continue;
      const std::string id = entry.path().stem().string();
      if (found.contains(id) || !safe_id(id)) continue;
      std::ifstream in(entry.path(), std::ios::binary);
      std::string first;
      std::getline(in, first);
      found[id] = first;
    }
  }
  ordered_json list = ordered_json::array();
  for (const auto& [id, text] : found) {
    ordered_json item{{"id", id}};
    try {
      const ReplayHeader h = parse_replay_header(text);
      item["scenario"] = load_scenario(h.scenario_document).id();
      item["red_policy"] = h.red_policy;
      item["blue_policy"] = h.blue_policy;
      item["seed"] = h.seed;
    } catch (const std::exception&) {
      item["error"] = "unreadable header";
    }
    list.push_back(std::move(item));
  }
  return ordered_json{{"replays", std::move(list)}};
}

std::string SessionManager::get_replay(const std::string& id) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = replays_.find(id); it != replays_.end()) return it->second;
  }
  if (replay_dir_ && safe_id(id)) {
    std::ifstream in(*replay_dir_ / (id + ".ndjson"), std::ios::binary);
    if (in) {
      std::ostringstream buf;
      buf << in.rdbuf();
      return buf.str();
    }
  }
  throw ServiceError("unknown_replay", "no replay '" + id + "'");
}

}  // namespace wgc
