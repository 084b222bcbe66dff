#include <cmath>

#include "engine_internal.hpp"

namespace wgc {

namespace detail {

std::vector<HexCoord> free_neighbors(const GameState& s, HexCoord at) {
  std::vector<HexCoord> out;
  for (HexCoord n : s.map().neighbors(at)) {
    if (!s.occupant(n)) out.push_back(n);
  }
  return out;
}

int free_slots(const GameState& s, Side side) {
  int n = 0;
  for (OperatorId id : s.side_slots(side)) n += id == kNoOperator;
  return n;
}

int take_slot(GameState& s, Side side) {
  auto& slots = s.slots[side_index(side)];
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i] == kNoOperator) return static_cast<int>(i);
  }
  throw std::logic_error("no free agent slot");
}

namespace {

OperatorId add_operator(GameState& s, OperatorState o, int slot) {
  o.id = static_cast<OperatorId>(s.operators.size());
  o.slot = slot;
  s.slots[side_index(o.side)][static_cast<std::size_t>(slot)] = o.id;
  s.operators.push_back(std::move(o));
  return s.operators.back().id;
}

void retire(GameState& s, OperatorId id) {
  OperatorState& o = s.op(id);
  s.slots[side_index(o.side)][static_cast<std::size_t>(o.slot)] = kNoOperator;
  o.alive = false;
  o.retired = true;
  o.blood = 0;
  o.move_remaining = 0;
  o.move_target.reset();
  o.stop_remaining = 0;
}

}  // namespace

std::vector<OperatorId> apply_split(GameState& s, OperatorId agent, int option, int tick) {
  const OperatorState parent = s.op(agent);
  const auto shares = split_blood(parent.blood, option);
  const auto cells = free_neighbors(s, parent.pos);

  OperatorTemplate child_tmpl = parent.tmpl;
  child_tmpl.dmg_vs_vehicle *= parent.tmpl.attack_reduce_coeff;
  child_tmpl.dmg_vs_infantry *= parent.tmpl.attack_reduce_coeff;

  const int parent_slot = parent.slot;
  retire(s, agent);

  std::vector<OperatorId> children;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    OperatorState c;
    c.side = parent.side;
    c.tmpl = child_tmpl;
    c.root_tmpl = parent.root_tmpl;
    c.pos = i == 0 ? parent.pos : cells[i - 1];
    c.blood = shares[i];
    c.alive = true;
    c.lineage = parent.id;
    const int slot = i == 0 ? parent_slot : take_slot(s, parent.side);
    children.push_back(add_operator(s, std::move(c), slot));
  }
  Event& e = emit(s, tick, EventKind::split);
  e.actor = agent;
  e.ids = children;
  e.from = parent.pos;
  return children;
}

OperatorId apply_merge(GameState& s, OperatorId agent, OperatorId ally, int tick) {
  const OperatorState a = s.op(agent);
  const OperatorState b = s.op(ally);
  retire(s, agent);
  retire(s, ally);
  OperatorState m;
  m.side = a.side;
  m.tmpl = a.root_tmpl;
  m.root_tmpl = a.root_tmpl;
  m.pos = a.pos;
  m.blood = std::min(a.blood + b.blood, a.root_tmpl.blood_max);
  m.alive = true;
  m.lineage = a.lineage;
  const OperatorId id = add_operator(s, std::move(m), a.slot);
  Event& e = emit(s, tick, EventKind::merged);
  e.actor = id;
  e.ids = {agent, ally};
  e.from = a.pos;
  return id;
}

}  // namespace detail

std::vector<double> split_blood(double blood, int option) {
  const double third = std::floor(blood / 3.0);
  if (option == kSplitOptionThree) return {blood - 2 * third, third, third};
  return {blood - third, third};
}

std::optional<std::string> check_depolymerize(const GameState& s, OperatorId agent, int option) {
  if (!s.scenario->is_cmac()) return "depolymerize is only available in CMAC";
  if (option != kSplitOptionThree && option != kSplitOptionTwo) return "invalid split option";
  if (!s.valid_id(agent)) return "unknown agent";
  const OperatorState& o = s.op(agent);
  if (!o.ready()) return "agent is not ready";
  if (o.blood <= 0) return "agent is not alive";
  if (o.lineage) return "split agents cannot split again";
  if (std::floor(o.blood / 3.0) < 1.0) return "not enough blood to split";
  const int extra = option == kSplitOptionThree ? 2 : 1;
  if (static_cast<int>(detail::free_neighbors(s, o.pos).size()) < extra) {
    return "not enough free adjacent hexes";
  }
  if (detail::free_slots(s, o.side) < extra) return "no free agent slots";
  return std::nullopt;
}

std::optional<std::string> check_polymerize(const GameState& s, OperatorId agent, OperatorId ally) {
  if (!s.scenario->is_cmac()) return "polymerize is only available in CMAC";
  if (!s.valid_id(agent)) return "unknown agent";
  if (!s.valid_id(ally)) return "unknown ally";
  if (agent == ally) return "cannot merge with itself";
  const OperatorState& a = s.op(agent);
  const OperatorState& b = s.op(ally);
  if (!a.ready()) return "agent is not ready";
  if (!b.alive || b.blood <= 0 || a.blood <= 0) return "both agents must be alive";
  if (a.side != b.side) return "ally is not on the same side";
  if (!a.lineage || a.lineage != b.lineage) return "agents are not split from the same operator";
  if (b.move_remaining > 0 || b.move_target) return "ally is moving";
  if (hex_distance(a.pos, b.pos) != 1) return "ally is not adjacent";
  return std::nullopt;
}

std::vector<OperatorId> depolymerize(GameState& s, OperatorId agent, int option) {
  if (auto why = check_depolymerize(s, agent, option)) {
    throw ContractError(agent, AgentAction::depolymerize(option), *why);
  }
  return detail::apply_split(s, agent, option, s.tick);
}

OperatorId polymerize(GameState& s, OperatorId agent, OperatorId ally) {
  if (auto why = check_polymerize(s, agent, ally)) {
    throw ContractError(agent, AgentAction::polymerize(ally), *why);
  }
  return detail::apply_merge(s, agent, ally, s.tick);
}

}  // namespace wgc
