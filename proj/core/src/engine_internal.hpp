#pragma once

#include "wgc/engine.hpp"

namespace wgc::detail {

Event& emit(GameState& state, int tick, EventKind kind);

// Shot resolution inside a step: the target may already be at zero blood
// from an earlier shot this tick, in which case the shot is wasted.
Event resolve_shot(GameState& state, OperatorId attacker, OperatorId target, int tick);

std::vector<HexCoord> free_neighbors(const GameState& state, HexCoord at);
int free_slots(const GameState& state, Side side);
int take_slot(GameState& state, Side side);

std::vector<OperatorId> apply_split(GameState& state, OperatorId agent, int option, int tick);
OperatorId apply_merge(GameState& state, OperatorId agent, OperatorId ally, int tick);

}  // namespace wgc::detail
