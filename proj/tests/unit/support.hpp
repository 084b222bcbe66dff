#pragma once

#include <memory>
#include <vector>

#include "wgc/engine.hpp"
#include "wgc/scenario.hpp"

namespace wgc::test {

// A hand-placed game on an open rectangle. No validation: tests use it to
// stage positions the built-in spawns never produce.
inline Scenario staged(SubEnv subenv, int width, int height,
                       std::vector<std::pair<OperatorType, HexCoord>> red,
                       std::vector<std::pair<OperatorType, HexCoord>> blue) {
  Scenario s;
  s.subenv = subenv;
  s.index = 0;
  s.map = std::make_shared<const GameMap>("staged", width, height);
  for (auto& [type, pos] : red) s.red.entries.push_back({builtin_template(subenv, type, Side::red), pos});
  for (auto& [type, pos] : blue) s.blue.entries.push_back({builtin_template(subenv, type, Side::blue), pos});
  s.red.side = Side::red;
  s.blue.side = Side::blue;
  if (subenv == SubEnv::srmac) s.srmac = CombatNoiseParams{};
  return s;
}

inline HexCoord at(int col, int row) { return from_offset({col, row}); }

// Every ready agent stops.
inline ActionMap all_stop(const GameState& s) {
  ActionMap m;
  for (OperatorId id : ready_agents(s)) m[id] = AgentAction::stop();
  return m;
}

}  // namespace wgc::test
