#include "wgc/rlapi.hpp"

#include <algorithm>

namespace wgc {

namespace {

struct Normalizer {
  double id_cap = 1;
  double move = 1;
  double cooldown = 1;
  double prep = 1;
  double stop = 1;
  double col = 1;
  double row = 1;

  explicit Normalizer(const Scenario& s) {
    const double n = static_cast<double>(s.red.entries.size() + s.blue.entries.size());
    // One split plus at most two merges per roster operator: six ids each.
    id_cap = std::max(1.0, s.is_cmac() ? 6 * n : n);
    for (const Roster* r : {&s.red, &s.blue}) {
      for (const auto& e : r->entries) {
        move = std::max(move, static_cast<double>(e.tmpl.move_ticks()));
        cooldown = std::max(cooldown, static_cast<double>(e.tmpl.shoot_cooldown));
        prep = std::max(prep, static_cast<double>(e.tmpl.shoot_prep));
        stop = std::max(stop, static_cast<double>(e.tmpl.stop_time));
      }
    }
    col = std::max(1, s.map->width() - 1);
    row = std::max(1, s.map->height() - 1);
  }
};

float clamp01(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

void write_identity(float* out, const OperatorState& o, const Normalizer& n) {
  out[own_feature::color] = o.side == Side::red ? 0.0f : 1.0f;
  out[own_feature::id] = clamp01(o.id / n.id_cap);
  out[own_feature::type + static_cast<int>(o.tmpl.type)] = 1.0f;
  const OffsetCoord off = to_offset(o.pos);
  out[own_feature::col] = clamp01(off.col / n.col);
  out[own_feature::row] = clamp01(off.row / n.row);
  out[own_feature::blood] = clamp01(o.blood / o.tmpl.blood_max);
}

// Full own-side block: identity, timers, then visibility and attack bitmasks
// over the opposing side's slots.
void write_own_block(float* out, const GameState& s, const OperatorState& o, const Normalizer& n) {
  if (!o.alive) return;
  write_identity(out, o, n);
  out[own_feature::move_time] = clamp01(o.move_remaining / n.move);
  out[own_feature::cooldown] = clamp01(o.cooldown_remaining / n.cooldown);
  out[own_feature::prep] = clamp01(o.prep_remaining / n.prep);
  out[own_feature::stop_time] = clamp01(o.stop_remaining / n.stop);
  const auto& enemy_slots = s.side_slots(opposite(o.side));
  const int enemies = static_cast<int>(enemy_slots.size());
  for (int k = 0; k < enemies; ++k) {
    const OperatorId eid = enemy_slots[static_cast<std::size_t>(k)];
    if (eid == kNoOperator) continue;
    const OperatorState& e = s.op(eid);
    if (!is_visible(o, e, s.map())) continue;
    out[own_feature::observed + k] = 1.0f;
    if (in_attack_range(o, e)) out[own_feature::observed + enemies + k] = 1.0f;
  }
}

void write_enemy_block(float* out, const OperatorState& e, const Normalizer& n) {
  write_identity(out, e, n);
}

}  // namespace

ObsLayout ObsLayout::for_side(const Scenario& s, Side side) {
  ObsLayout l;
  l.max_allies = slot_capacity(s, side);
  l.max_enemies = slot_capacity(s, opposite(side));
  l.own_width = own_feature::observed + 2 * l.max_enemies;
  l.enemy_width = enemy_feature::width;
  l.total = l.own_width * l.max_allies + l.enemy_width * l.max_enemies + 1;
  return l;
}

StateLayout StateLayout::for_scenario(const Scenario& s) {
  StateLayout l;
  l.red_slots = slot_capacity(s, Side::red);
  l.blue_slots = slot_capacity(s, Side::blue);
  l.red_width = own_feature::observed + 2 * l.blue_slots;
  l.blue_width = own_feature::observed + 2 * l.red_slots;
  l.total = l.red_width * l.red_slots + l.blue_width * l.blue_slots + 1;
  return l;
}

ActionLayout ActionLayout::for_side(const Scenario& s, Side side) {
  ActionLayout l;
  l.max_allies = slot_capacity(s, side);
  l.max_enemies = slot_capacity(s, opposite(side));
  l.cmac = s.is_cmac();
  return l;
}

std::optional<AgentAction> decode_action(const GameState& s, Side side, int index,
                                         const ActionLayout& layout) {
  if (index < 0 || index >= layout.width()) return std::nullopt;
  if (index == ActionLayout::kNoop) return AgentAction::noop();
  if (index == ActionLayout::kStop) return AgentAction::stop();
  if (index < ActionLayout::kShootBase) return AgentAction::move(index - ActionLayout::kMoveBase);
  if (index < layout.depolymerize_base()) {
    const int slot = index - ActionLayout::kShootBase;
    return AgentAction::shoot(s.side_slots(opposite(side))[static_cast<std::size_t>(slot)]);
  }
  if (index < layout.polymerize_base()) {
    return AgentAction::depolymerize(index - layout.depolymerize_base());
  }
  const int slot = index - layout.polymerize_base();
  return AgentAction::polymerize(s.side_slots(side)[static_cast<std::size_t>(slot)]);
}

std::optional<int> encode_action(const GameState& s, Side side, const AgentAction& a,
                                 const ActionLayout& layout) {
  auto slot_of = [&](Side owner, OperatorId id) -> std::optional<int> {
    if (!s.valid_id(id)) return std::nullopt;
    const OperatorState& o = s.op(id);
    if (o.side != owner || o.slot < 0) return std::nullopt;
    if (s.side_slots(owner)[static_cast<std::size_t>(o.slot)] != id) return std::nullopt;
    return o.slot;
  };
  switch (a.kind) {
    case ActionKind::noop: return ActionLayout::kNoop;
    case ActionKind::stop: return ActionLayout::kStop;
    case ActionKind::move:
      if (a.arg < 0 || a.arg >= kDirectionCount) return std::nullopt;
      return ActionLayout::kMoveBase + a.arg;
    case ActionKind::shoot:
      if (auto slot = slot_of(opposite(side), a.arg)) return ActionLayout::kShootBase + *slot;
      return std::nullopt;
    case ActionKind::depolymerize:
      if (!layout.cmac || a.arg < 0 || a.arg > 1) return std::nullopt;
      return layout.depolymerize_base() + a.arg;
    case ActionKind::polymerize:
      if (!layout.cmac) return std::nullopt;
      if (auto slot = slot_of(side, a.arg)) return layout.polymerize_base() + *slot;
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<float> encode_observation(const GameState& s, OperatorId agent,
                                      const ObsLayout& layout) {
  std::vector<float> out(static_cast<std::size_t>(layout.total), 0.0f);
  if (!s.valid_id(agent)) return out;
  const OperatorState& self = s.op(agent);
  if (!self.alive) return out;
  const Normalizer n(*s.scenario);

  write_own_block(out.data() + layout.self_offset(), s, self, n);
  int k = 0;
  for (OperatorId id : s.side_slots(self.side)) {
    if (id == agent) continue;
    if (id != kNoOperator) write_own_block(out.data() + layout.ally_offset(k), s, s.op(id), n);
    ++k;
  }
  const auto& enemy_slots = s.side_slots(opposite(self.side));
  for (std::size_t slot = 0; slot < enemy_slots.size(); ++slot) {
    const OperatorId eid = enemy_slots[slot];
    if (eid == kNoOperator) continue;
    const OperatorState& e = s.op(eid);
    if (!is_visible(self, e, s.map())) continue;
    write_enemy_block(out.data() + layout.enemy_offset(static_cast<int>(slot)), e, n);
  }
  out[static_cast<std::size_t>(layout.time_offset())] =
      clamp01(static_cast<double>(s.tick) / s.scenario->max_ticks);
  return out;
}

std::vector<float> encode_state(const GameState& s, const StateLayout& layout) {
  std::vector<float> out(static_cast<std::size_t>(layout.total), 0.0f);
  const Normalizer n(*s.scenario);
  for (Side side : {Side::red, Side::blue}) {
    const auto& slots = s.side_slots(side);
    for (std::size_t slot = 0; slot < slots.size(); ++slot) {
      if (slots[slot] == kNoOperator) continue;
      write_own_block(out.data() + layout.block_offset(side, static_cast<int>(slot)), s,
                      s.op(slots[slot]), n);
    }
  }
  out.back() = clamp01(static_cast<double>(s.tick) / s.scenario->max_ticks);
  return out;
}

std::vector<std::uint8_t> action_mask(const GameState& s, OperatorId agent,
                                      const ActionLayout& layout) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(layout.width()), 0);
  if (!s.valid_id(agent) || !s.op(agent).ready() || s.outcome) {
    mask[ActionLayout::kNoop] = 1;
    return mask;
  }
  const Side side = s.op(agent).side;
  for (int i = 1; i < layout.width(); ++i) {
    const auto action = decode_action(s, side, i, layout);
    if (action && is_legal(s, agent, *action)) mask[static_cast<std::size_t>(i)] = 1;
  }
  return mask;
}

double compute_reward(double ally_lost, double enemy_lost, const GameState& next, Side side,
                      bool newly_terminated) {
  const double enemy_start = next.scenario->roster(opposite(side)).total_blood();
  double r = enemy_start > 0 ? (enemy_lost - ally_lost) / enemy_start : 0.0;
  if (newly_terminated && next.outcome) {
    const Outcome win = side == Side::red ? Outcome::red_win : Outcome::blue_win;
    if (*next.outcome == win) {
      r += 1.0;
    } else if (*next.outcome != Outcome::draw) {
      r -= 1.0;
    }
  }
  return r;
}

double compute_reward(const GameState& prev, const GameState& next, Side side) {
  const double ally_lost = prev.side_blood(side) - next.side_blood(side);
  const double enemy_lost = prev.side_blood(opposite(side)) - next.side_blood(opposite(side));
  return compute_reward(ally_lost, enemy_lost, next, side, !prev.outcome && next.outcome);
}

StepFrame make_frame(const GameState& s, Side side, double reward) {
  StepFrame f;
  f.side = side;
  f.tick = s.tick;
  f.reward = reward;
  f.terminated = s.outcome.has_value();
  f.outcome = s.outcome;
  const ObsLayout obs = ObsLayout::for_side(*s.scenario, side);
  const ActionLayout act = ActionLayout::for_side(*s.scenario, side);
  for (OperatorId id : s.side_slots(side)) {
    f.agent_ids.push_back(id);
    if (id == kNoOperator) {
      f.obs.emplace_back(static_cast<std::size_t>(obs.total), 0.0f);
      f.masks.push_back(action_mask(s, kNoOperator, act));
    } else {
      f.obs.push_back(encode_observation(s, id, obs));
      f.masks.push_back(action_mask(s, id, act));
    }
  }
  f.state = encode_state(s, StateLayout::for_scenario(*s.scenario));
  return f;
}

ActionMap decode_side_actions(const GameState& s, Side side, std::span<const int> indices) {
  const auto& slots = s.side_slots(side);
  if (indices.size() != slots.size()) {
    throw ActionIndexError(-1, kNoOperator, -1,
                           "expected " + std::to_string(slots.size()) + " action indices, got " +
                               std::to_string(indices.size()));
  }
  const ActionLayout layout = ActionLayout::for_side(*s.scenario, side);
  ActionMap out;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const int slot = static_cast<int>(k);
    const OperatorId id = slots[k];
    const int index = indices[k];
    const bool ready = id != kNoOperator && s.op(id).ready();
    if (!ready) {
      if (index != ActionLayout::kNoop) {
        throw ActionIndexError(slot, id, index,
                               "slot " + std::to_string(slot) +
                                   " is not ready; only the noop index 0 is accepted");
      }
      continue;
    }
    const auto mask = action_mask(s, id, layout);
    if (index < 0 || index >= layout.width() || !mask[static_cast<std::size_t>(index)]) {
      throw ActionIndexError(slot, id, index,
                             "action index " + std::to_string(index) + " is not legal for agent " +
                                 std::to_string(id));
    }
    out[id] = *decode_action(s, side, index, layout);
  }
  return out;
}

nlohmann::ordered_json to_json(const StepFrame& f) {
  nlohmann::ordered_json j;
  j["side"] = to_string(f.side);
  j["tick"] = f.tick;
  j["agent_ids"] = f.agent_ids;
  j["obs"] = f.obs;
  j["state"] = f.state;
  j["avail_actions"] = f.masks;
  j["reward"] = f.reward;
  j["terminated"] = f.terminated;
  j["outcome"] = f.outcome ? nlohmann::ordered_json(to_string(*f.outcome))
                           : nlohmann::ordered_json(nullptr);
  return j;
}

bool visible_to_side(const GameState& s, Side side, const OperatorState& target) {
  for (const auto& o : s.operators) {
    if (o.alive && o.side == side && is_visible(o, target, s.map())) return true;
  }
  return false;
}

const EnemyInfo* SideView::enemy_in_slot(int slot) const {
  for (const auto& e : visible_enemies) {
    if (e.slot == slot) return &e;
  }
  return nullptr;
}

SideView observe_side(const GameState& s, Side side) {
  SideView v;
  v.side = side;
  v.subenv = s.scenario->subenv;
  v.tick = s.tick;
  v.max_ticks = s.scenario->max_ticks;
  v.map = s.scenario->map;
  v.layout = ActionLayout::for_side(*s.scenario, side);
  v.outcome = s.outcome;
  const auto& slots = s.side_slots(side);
  for (std::size_t slot = 0; slot < slots.size(); ++slot) {
    AllyInfo a;
    a.slot = static_cast<int>(slot);
    a.id = slots[slot];
    if (a.id != kNoOperator) {
      const OperatorState& o = s.op(a.id);
      a.type = o.tmpl.type;
      a.pos = o.pos;
      a.blood = o.blood;
      a.blood_max = o.tmpl.blood_max;
      a.alive = o.alive;
      a.ready = o.ready() && !s.outcome;
      a.move_remaining = o.move_remaining;
      a.prep_remaining = o.prep_remaining;
      a.cooldown_remaining = o.cooldown_remaining;
      a.attacked_distance = o.tmpl.attacked_distance;
      a.lineage = o.lineage;
    }
    v.allies.push_back(a);
    v.masks.push_back(action_mask(s, a.id, v.layout));
  }
  const auto& enemy_slots = s.side_slots(opposite(side));
  for (std::size_t slot = 0; slot < enemy_slots.size(); ++slot) {
    const OperatorId eid = enemy_slots[slot];
    if (eid == kNoOperator) continue;
    const OperatorState& e = s.op(eid);
    if (!visible_to_side(s, side, e)) continue;
    v.visible_enemies.push_back({static_cast<int>(slot), e.id, e.tmpl.type, e.pos, e.blood});
  }
  return v;
}

}  // namespace wgc
