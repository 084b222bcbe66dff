#include <algorithm>
#include <sstream>

#include "engine_internal.hpp"

namespace wgc {

std::string Rng::state() const {
  std::ostringstream out;
  out << engine_;
  return out.str();
}

std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::noop: return "noop";
    case ActionKind::stop: return "stop";
    case ActionKind::move: return "move";
    case ActionKind::shoot: return "shoot";
    case ActionKind::depolymerize: return "depolymerize";
    case ActionKind::polymerize: return "polymerize";
  }
  return "?";
}

std::string describe(const AgentAction& a) {
  switch (a.kind) {
    case ActionKind::noop:
    case ActionKind::stop: return std::string(to_string(a.kind));
    case ActionKind::move:
      if (a.arg >= 0 && a.arg < kDirectionCount) {
        return "move(" + std::string(kDirectionNames[static_cast<std::size_t>(a.arg)]) + ")";
      }
      return "move(" + std::to_string(a.arg) + ")";
    default: return std::string(to_string(a.kind)) + "(" + std::to_string(a.arg) + ")";
  }
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::red_win: return "red_win";
    case Outcome::blue_win: return "blue_win";
    case Outcome::draw: return "draw";
  }
  return "?";
}

std::optional<Outcome> parse_outcome(std::string_view s) {
  if (s == "red_win") return Outcome::red_win;
  if (s == "blue_win") return Outcome::blue_win;
  if (s == "draw") return Outcome::draw;
  return std::nullopt;
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::moved: return "moved";
    case EventKind::move_started: return "move_started";
    case EventKind::shot: return "shot";
    case EventKind::damaged: return "damaged";
    case EventKind::annihilated: return "annihilated";
    case EventKind::nullified: return "nullified";
    case EventKind::died: return "died";
    case EventKind::split: return "split";
    case EventKind::merged: return "merged";
    case EventKind::episode_end: return "episode_end";
  }
  return "?";
}

nlohmann::ordered_json to_json(const Event& e) {
  using nlohmann::ordered_json;
  auto hex = [](HexCoord h) { return ordered_json::array({h.q, h.r}); };
  ordered_json j{{"tick", e.tick}, {"seq", e.seq}, {"kind", to_string(e.kind)}};
  switch (e.kind) {
    case EventKind::move_started:
    case EventKind::moved:
      j["actor"] = e.actor;
      j["from"] = hex(e.from);
      j["to"] = hex(e.to);
      break;
    case EventKind::shot:
      j["actor"] = e.actor;
      j["target"] = e.target;
      break;
    case EventKind::damaged:
    case EventKind::annihilated:
      j["actor"] = e.actor;
      j["target"] = e.target;
      j["amount"] = e.amount;
      j["blood_after"] = e.blood_after;
      break;
    case EventKind::nullified:
      j["actor"] = e.actor;
      if (e.target != kNoOperator) j["target"] = e.target;
      j["reason"] = e.reason;
      break;
    case EventKind::died:
      j["target"] = e.target;
      j["at"] = hex(e.from);
      break;
    case EventKind::split:
    case EventKind::merged:
      j["actor"] = e.actor;
      j["ids"] = e.ids;
      j["at"] = hex(e.from);
      break;
    case EventKind::episode_end:
      j["outcome"] = e.outcome ? to_string(*e.outcome) : "none";
      break;
  }
  return j;
}

ContractError::ContractError(OperatorId agent, AgentAction action, const std::string& message)
    : std::logic_error("agent " + std::to_string(agent) + ", action " + describe(action) + ": " +
                       message),
      agent_(agent),
      action_(action) {}

const OperatorState* GameState::occupant(HexCoord h) const {
  for (const auto& o : operators) {
    if (o.alive && o.pos == h) return &o;
  }
  return nullptr;
}

double GameState::side_blood(Side s) const {
  double total = 0;
  for (const auto& o : operators) {
    if (o.alive && o.side == s) total += o.blood;
  }
  return total;
}

bool GameState::side_alive(Side s) const {
  return std::any_of(operators.begin(), operators.end(),
                     [s](const OperatorState& o) { return o.alive && o.side == s; });
}

int slot_capacity(const Scenario& scenario, Side side) {
  const int n = static_cast<int>(scenario.roster(side).entries.size());
  return scenario.is_cmac() ? 3 * n : n;
}

GameState reset(std::shared_ptr<const Scenario> scenario, std::uint64_t seed) {
  if (!scenario || !scenario->map) throw std::invalid_argument("reset: scenario has no map");
  GameState s;
  s.scenario = std::move(scenario);
  s.seed = seed;
  s.rng = Rng(seed);
  for (Side side : {Side::red, Side::blue}) {
    auto& slots = s.slots[side_index(side)];
    slots.assign(static_cast<std::size_t>(slot_capacity(*s.scenario, side)), kNoOperator);
    int slot = 0;
    for (const auto& entry : s.scenario->roster(side).entries) {
      OperatorState o;
      o.id = static_cast<OperatorId>(s.operators.size());
      o.side = side;
      o.tmpl = entry.tmpl;
      o.root_tmpl = entry.tmpl;
      o.pos = entry.spawn;
      o.blood = entry.tmpl.blood_max;
      o.alive = true;
      o.slot = slot;
      slots[static_cast<std::size_t>(slot)] = o.id;
      ++slot;
      s.operators.push_back(o);
    }
  }
  return s;
}

GameState reset(const Scenario& scenario, std::uint64_t seed) {
  return reset(std::make_shared<const Scenario>(scenario), seed);
}

std::vector<OperatorId> ready_agents(const GameState& state) {
  std::vector<OperatorId> out;
  if (state.outcome) return out;
  for (const auto& o : state.operators) {
    if (o.ready()) out.push_back(o.id);
  }
  return out;
}

// --- visibility --------------------------------------------------------------

int effective_observed_distance(const OperatorState& target, const GameMap& map) {
  return effective_observed_distance(target.tmpl.observed_distance, map.terrain(target.pos));
}

bool is_visible(const OperatorState& viewer, const OperatorState& target, const GameMap& map) {
  if (!viewer.alive || !target.alive) return false;
  if (viewer.side == target.side) return true;
  return hex_distance(viewer.pos, target.pos) <= effective_observed_distance(target, map);
}

bool in_attack_range(const OperatorState& attacker, const OperatorState& target) {
  return hex_distance(attacker.pos, target.pos) <= attacker.tmpl.attacked_distance;
}

// --- legality ----------------------------------------------------------------

std::optional<std::string> check_action(const GameState& state, OperatorId agent,
                                        const AgentAction& action) {
  if (!state.valid_id(agent)) return "unknown agent";
  const OperatorState& self = state.op(agent);
  if (!self.ready()) {
    if (action.kind == ActionKind::noop) return std::nullopt;
    return self.alive ? "agent is busy" : "agent is not alive";
  }
  switch (action.kind) {
    case ActionKind::noop: return "noop is only available to busy or dead agents";
    case ActionKind::stop: return std::nullopt;
    case ActionKind::move: {
      if (action.arg < 0 || action.arg >= kDirectionCount) return "invalid direction";
      const HexCoord dest = neighbor(self.pos, action.arg);
      if (!state.map().contains(dest)) return "destination is off the map";
      if (state.occupant(dest)) return "destination is occupied";
      return std::nullopt;
    }
    case ActionKind::shoot: {
      if (!self.can_shoot()) {
        return self.prep_remaining > 0 ? "shoot preparation pending" : "shoot cooling down";
      }
      if (!state.valid_id(action.arg)) return "unknown target";
      const OperatorState& target = state.op(action.arg);
      if (target.side == self.side) return "target is not an enemy";
      if (!target.alive) return "target is not alive";
      if (!is_visible(self, target, state.map())) return "target is not visible";
      if (!in_attack_range(self, target)) return "target is out of range";
      return std::nullopt;
    }
    case ActionKind::depolymerize: return check_depolymerize(state, agent, action.arg);
    case ActionKind::polymerize: return check_polymerize(state, agent, action.arg);
  }
  return "unknown action kind";
}

// --- step --------------------------------------------------------------------

namespace detail {

Event& emit(GameState& state, int tick, EventKind kind) {
  Event e;
  e.tick = tick;
  e.seq = state.next_seq++;
  e.kind = kind;
  state.events.push_back(std::move(e));
  return state.events.back();
}

}  // namespace detail

namespace {

void complete_moves(GameState& s, int tick) {
  std::vector<OperatorId> pending;
  for (auto& o : s.operators) {
    if (!o.alive || !o.move_target || o.move_remaining > 0) continue;
    if (o.blood <= 0) {
      o.move_target.reset();
      continue;
    }
    pending.push_back(o.id);
  }
  // Ascending id: the lowest id whose destination is free claims it. Repeat
  // so that chains of moves into vacated cells resolve.
  bool changed = true;
  while (changed && !pending.empty()) {
    changed = false;
    for (auto it = pending.begin(); it != pending.end();) {
      OperatorState& o = s.op(*it);
      const HexCoord dest = *o.move_target;
      if (s.occupant(dest)) {
        ++it;
        continue;
      }
      Event& e = detail::emit(s, tick, EventKind::moved);
      e.actor = o.id;
      e.from = o.pos;
      e.to = dest;
      o.pos = dest;
      o.move_target.reset();
      o.prep_remaining = o.tmpl.shoot_prep;
      it = pending.erase(it);
      changed = true;
    }
  }
  for (OperatorId id : pending) {
    OperatorState& o = s.op(id);
    Event& e = detail::emit(s, tick, EventKind::nullified);
    e.actor = id;
    e.reason = "move_blocked";
    o.move_target.reset();
  }
}

}  // namespace

void step(GameState& s, const ActionMap& actions) {
  if (s.outcome) {
    throw ContractError(kNoOperator, AgentAction::noop(), "step after the episode has ended");
  }
  for (const auto& [id, action] : actions) {
    if (auto why = check_action(s, id, action)) throw ContractError(id, action, *why);
  }
  for (OperatorId id : ready_agents(s)) {
    if (!actions.contains(id)) {
      throw ContractError(id, AgentAction::noop(), "missing action for a ready agent");
    }
  }

  const int tick = s.tick + 1;
  std::vector<bool> shot_this_tick(s.operators.size(), false);

  // (a) new moves
  for (const auto& [id, action] : actions) {
    if (action.kind != ActionKind::move) continue;
    OperatorState& o = s.op(id);
    o.move_remaining = o.tmpl.move_ticks();
    o.move_target = neighbor(o.pos, action.arg);
    Event& e = detail::emit(s, tick, EventKind::move_started);
    e.actor = id;
    e.from = o.pos;
    e.to = *o.move_target;
  }
  // (b) shots, ascending attacker id; attackers hit earlier this tick still fire
  for (const auto& [id, action] : actions) {
    if (action.kind != ActionKind::shoot) continue;
    detail::resolve_shot(s, id, action.arg, tick);
    OperatorState& o = s.op(id);
    o.cooldown_remaining = o.tmpl.shoot_cooldown;
    shot_this_tick[static_cast<std::size_t>(id)] = true;
  }
  // (c) stops
  for (const auto& [id, action] : actions) {
    if (action.kind == ActionKind::stop) s.op(id).stop_remaining = s.op(id).tmpl.stop_time;
  }
  // (d) splits and merges
  for (const auto& [id, action] : actions) {
    if (action.kind == ActionKind::depolymerize) {
      if (auto why = check_depolymerize(s, id, action.arg)) {
        Event& e = detail::emit(s, tick, EventKind::nullified);
        e.actor = id;
        e.reason = "split_blocked";
        continue;
      }
      detail::apply_split(s, id, action.arg, tick);
    } else if (action.kind == ActionKind::polymerize) {
      if (auto why = check_polymerize(s, id, action.arg)) {
        Event& e = detail::emit(s, tick, EventKind::nullified);
        e.actor = id;
        e.target = action.arg;
        e.reason = "merge_blocked";
        continue;
      }
      detail::apply_merge(s, id, action.arg, tick);
    }
  }
  // (e) counters, then move completion
  for (std::size_t i = 0; i < s.operators.size(); ++i) {
    OperatorState& o = s.operators[i];
    if (!o.alive) continue;
    if (o.move_remaining > 0) --o.move_remaining;
    if (o.stop_remaining > 0) --o.stop_remaining;
    if (o.prep_remaining > 0) --o.prep_remaining;
    if (o.cooldown_remaining > 0 && !(i < shot_this_tick.size() && shot_this_tick[i])) {
      --o.cooldown_remaining;
    }
  }
  complete_moves(s, tick);
  // (f) deaths
  for (auto& o : s.operators) {
    if (o.alive && o.blood <= 0) {
      o.alive = false;
      o.blood = 0;
      o.move_remaining = 0;
      o.move_target.reset();
      Event& e = detail::emit(s, tick, EventKind::died);
      e.target = o.id;
      e.from = o.pos;
    }
  }
  s.tick = tick;
  // (g) termination
  if (auto outcome = check_termination(s)) {
    s.outcome = outcome;
    Event& e = detail::emit(s, tick, EventKind::episode_end);
    e.outcome = outcome;
  }
}

std::optional<Outcome> check_termination(const GameState& s) {
  const bool red = s.side_alive(Side::red);
  const bool blue = s.side_alive(Side::blue);
  if (!red && !blue) return Outcome::draw;
  if (!blue) return Outcome::red_win;
  if (!red) return Outcome::blue_win;
  if (s.tick >= s.scenario->max_ticks) {
    constexpr double kTie = 1e-9;
    const double diff = s.side_blood(Side::red) - s.side_blood(Side::blue);
    if (diff > kTie) return Outcome::red_win;
    if (diff < -kTie) return Outcome::blue_win;
    return Outcome::draw;
  }
  return std::nullopt;
}

}  // namespace wgc
