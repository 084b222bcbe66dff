#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wgc/engine.hpp"

namespace wgc {

inline constexpr double kDefaultGamma = 0.99;
inline constexpr int kLayoutVersion = 1;

// Feature offsets inside an own-side (self or ally) block. The block is
// followed by two bitmasks over enemy slots: visible, then visible-and-in-range.
namespace own_feature {
inline constexpr int color = 0;
inline constexpr int id = 1;
inline constexpr int type = 2;  // one-hot, 3 wide
inline constexpr int col = 5;
inline constexpr int row = 6;
inline constexpr int blood = 7;
inline constexpr int move_time = 8;
inline constexpr int cooldown = 9;
inline constexpr int prep = 10;
inline constexpr int stop_time = 11;
inline constexpr int observed = 12;  // first visibility bit
}  // namespace own_feature

// Enemy blocks carry only color, id, type, position and blood.
namespace enemy_feature {
inline constexpr int color = 0;
inline constexpr int id = 1;
inline constexpr int type = 2;
inline constexpr int col = 5;
inline constexpr int row = 6;
inline constexpr int blood = 7;
inline constexpr int width = 8;
}  // namespace enemy_feature

struct ObsLayout {
  int max_allies = 0;   // own-side slots, including self
  int max_enemies = 0;
  int own_width = 0;
  int enemy_width = enemy_feature::width;
  int total = 0;

  static ObsLayout for_side(const Scenario& scenario, Side side);

  int self_offset() const { return 0; }
  // Ally blocks follow self in slot order, skipping the observer's own slot.
  int ally_offset(int k) const { return own_width * (1 + k); }
  int enemy_offset(int enemy_slot) const {
    return own_width * max_allies + enemy_width * enemy_slot;
  }
  int time_offset() const { return total - 1; }
};

struct StateLayout {
  int red_slots = 0;
  int blue_slots = 0;
  int red_width = 0;   // per red block
  int blue_width = 0;  // per blue block
  int total = 0;

  static StateLayout for_scenario(const Scenario& scenario);
  int block_offset(Side side, int slot) const {
    return side == Side::red ? red_width * slot : red_width * red_slots + blue_width * slot;
  }
};

// 0 noop, 1 stop, 2..7 move(direction), then shoot(enemy slot); CMAC appends
// depolymerize(0), depolymerize(1), polymerize(ally slot).
struct ActionLayout {
  static constexpr int kNoop = 0;
  static constexpr int kStop = 1;
  static constexpr int kMoveBase = 2;
  static constexpr int kShootBase = kMoveBase + kDirectionCount;

  int max_allies = 0;
  int max_enemies = 0;
  bool cmac = false;

  static ActionLayout for_side(const Scenario& scenario, Side side);

  int depolymerize_base() const { return kShootBase + max_enemies; }
  int polymerize_base() const { return depolymerize_base() + 2; }
  int width() const { return cmac ? polymerize_base() + max_allies : kShootBase + max_enemies; }
};

// Index -> engine action for an agent of `side`. Slot references resolve to
// the operator currently in that slot (kNoOperator when empty).
std::optional<AgentAction> decode_action(const GameState& state, Side side, int index,
                                         const ActionLayout& layout);
std::optional<int> encode_action(const GameState& state, Side side, const AgentAction& action,
                                 const ActionLayout& layout);

// A per-slot index vector that cannot be applied: wrong length, a non-noop
// index for an empty/busy/dead slot, or a mask-false index for a ready agent.
class ActionIndexError : public std::invalid_argument {
 public:
  ActionIndexError(int slot, OperatorId agent, int index, const std::string& message)
      : std::invalid_argument(message), slot_(slot), agent_(agent), index_(index) {}

  int slot() const { return slot_; }
  OperatorId agent() const { return agent_; }
  int index() const { return index_; }

 private:
  int slot_;
  OperatorId agent_;
  int index_;
};

// One index per slot of `side` -> engine actions for that side's ready agents.
ActionMap decode_side_actions(const GameState& state, Side side, std::span<const int> indices);

std::vector<float> encode_observation(const GameState& state, OperatorId agent,
                                      const ObsLayout& layout);
std::vector<float> encode_state(const GameState& state, const StateLayout& layout);
std::vector<std::uint8_t> action_mask(const GameState& state, OperatorId agent,
                                      const ActionLayout& layout);

// Blood differential this transition from `side`'s perspective, normalised by
// the enemy roster's starting blood, plus +1/-1 on a win/loss transition.
double compute_reward(const GameState& prev, const GameState& next, Side side);
double compute_reward(double ally_lost, double enemy_lost, const GameState& next, Side side,
                      bool newly_terminated);

struct StepFrame {
  Side side = Side::red;
  int tick = 0;
  std::vector<OperatorId> agent_ids;  // per slot
  std::vector<std::vector<float>> obs;
  std::vector<std::vector<std::uint8_t>> masks;
  std::vector<float> state;
  double reward = 0;
  bool terminated = false;
  std::optional<Outcome> outcome;
};

StepFrame make_frame(const GameState& state, Side side, double reward);
nlohmann::ordered_json to_json(const StepFrame& frame);

// Structured, already-redacted view of one side used by bots and the game service.
struct AllyInfo {
  int slot = -1;
  OperatorId id = kNoOperator;
  OperatorType type = OperatorType::tank;
  HexCoord pos;
  double blood = 0;
  double blood_max = 0;
  bool alive = false;
  bool ready = false;
  int move_remaining = 0;
  int prep_remaining = 0;
  int cooldown_remaining = 0;
  int attacked_distance = 0;
  std::optional<OperatorId> lineage;
};

struct EnemyInfo {
  int slot = -1;
  OperatorId id = kNoOperator;
  OperatorType type = OperatorType::tank;
  HexCoord pos;
  double blood = 0;
};

struct SideView {
  Side side = Side::red;
  SubEnv subenv = SubEnv::standard;
  int tick = 0;
  int max_ticks = 0;
  std::shared_ptr<const GameMap> map;
  ActionLayout layout;
  std::vector<AllyInfo> allies;            // one per slot (empty slots have id kNoOperator)
  std::vector<EnemyInfo> visible_enemies;  // seen by at least one alive ally
  std::vector<std::vector<std::uint8_t>> masks;  // per slot
  std::optional<Outcome> outcome;

  const EnemyInfo* enemy_in_slot(int slot) const;
};

SideView observe_side(const GameState& state, Side side);

// An enemy is visible to a side when any alive operator of that side sees it.
bool visible_to_side(const GameState& state, Side side, const OperatorState& target);

}  // namespace wgc
