#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wgc/hexmap.hpp"
#include "wgc/rng.hpp"
#include "wgc/scenario.hpp"

namespace wgc {

inline constexpr std::string_view kEngineVersion = "wgc-engine/1.0";

using OperatorId = int;
inline constexpr OperatorId kNoOperator = -1;

struct OperatorState {
  OperatorId id = kNoOperator;
  Side side = Side::red;
  OperatorTemplate tmpl;
  // Template of the original roster operator; CMAC merges restore it.
  OperatorTemplate root_tmpl;
  HexCoord pos;
  double blood = 0;
  bool alive = false;
  // Removed from play by a split or merge (as opposed to killed).
  bool retired = false;
  int move_remaining = 0;
  std::optional<HexCoord> move_target;
  int prep_remaining = 0;
  int cooldown_remaining = 0;
  int stop_remaining = 0;
  // Id of the roster operator this one was split from (CMAC).
  std::optional<OperatorId> lineage;
  int slot = -1;

  bool busy() const { return move_remaining > 0 || stop_remaining > 0; }
  bool ready() const { return alive && !busy(); }
  bool can_shoot() const { return prep_remaining == 0 && cooldown_remaining == 0; }

  friend bool operator==(const OperatorState&, const OperatorState&) = default;
};

enum class ActionKind : std::uint8_t { noop, stop, move, shoot, depolymerize, polymerize };

std::string_view to_string(ActionKind k);

// Engine-level action. `arg` is a direction (move), a target operator id
// (shoot), a split option (depolymerize) or an ally operator id (polymerize).
struct AgentAction {
  ActionKind kind = ActionKind::noop;
  int arg = 0;

  static constexpr AgentAction noop() { return {ActionKind::noop, 0}; }
  static constexpr AgentAction stop() { return {ActionKind::stop, 0}; }
  static constexpr AgentAction move(int direction) { return {ActionKind::move, direction}; }
  static constexpr AgentAction shoot(OperatorId target) { return {ActionKind::shoot, target}; }
  static constexpr AgentAction depolymerize(int option) {
    return {ActionKind::depolymerize, option};
  }
  static constexpr AgentAction polymerize(OperatorId ally) {
    return {ActionKind::polymerize, ally};
  }

  friend bool operator==(const AgentAction&, const AgentAction&) = default;
};

std::string describe(const AgentAction& a);

using ActionMap = std::map<OperatorId, AgentAction>;

enum class Outcome : std::uint8_t { red_win, blue_win, draw };

std::string_view to_string(Outcome o);
std::optional<Outcome> parse_outcome(std::string_view s);

enum class EventKind : std::uint8_t {
  moved,
  move_started,
  shot,
  damaged,
  annihilated,
  nullified,
  died,
  split,
  merged,
  episode_end
};

std::string_view to_string(EventKind k);

struct Event {
  int tick = 0;
  int seq = 0;
  EventKind kind = EventKind::moved;
  OperatorId actor = kNoOperator;
  OperatorId target = kNoOperator;
  HexCoord from;
  HexCoord to;
  double amount = 0;
  double blood_after = 0;
  // Children of a split; for a merge the two absorbed operators.
  std::vector<OperatorId> ids;
  std::string reason;
  std::optional<Outcome> outcome;

  friend bool operator==(const Event&, const Event&) = default;
};

// One structured record per event; only the fields meaningful for the kind.
nlohmann::ordered_json to_json(const Event& e);

class ContractError : public std::logic_error {
 public:
  ContractError(OperatorId agent, AgentAction action, const std::string& message);

  OperatorId agent() const { return agent_; }
  const AgentAction& action() const { return action_; }

 private:
  OperatorId agent_;
  AgentAction action_;
};

struct GameState {
  std::shared_ptr<const Scenario> scenario;
  std::uint64_t seed = 0;
  int tick = 0;
  // Indexed by id; ids are never reused.
  std::vector<OperatorState> operators;
  // Per side: slot -> operator id, kNoOperator when free.
  std::array<std::vector<OperatorId>, 2> slots;
  Rng rng;
  std::vector<Event> events;
  std::optional<Outcome> outcome;
  int next_seq = 0;

  const GameMap& map() const { return *scenario->map; }
  const OperatorState& op(OperatorId id) const { return operators.at(static_cast<std::size_t>(id)); }
  OperatorState& op(OperatorId id) { return operators.at(static_cast<std::size_t>(id)); }
  bool valid_id(OperatorId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < operators.size();
  }

  // The alive operator standing on `h`, if any.
  const OperatorState* occupant(HexCoord h) const;
  double side_blood(Side s) const;
  bool side_alive(Side s) const;
  const std::vector<OperatorId>& side_slots(Side s) const { return slots[side_index(s)]; }
};

// Number of slots per side: the roster size, or three per roster operator in CMAC.
int slot_capacity(const Scenario& scenario, Side side);

GameState reset(std::shared_ptr<const Scenario> scenario, std::uint64_t seed);
GameState reset(const Scenario& scenario, std::uint64_t seed);

// Alive agents that are not mid-move or stopping, ascending id.
std::vector<OperatorId> ready_agents(const GameState& state);

// Reason the action is illegal for the agent right now, or nullopt when legal.
// Busy and dead agents may only noop; ready agents may not.
std::optional<std::string> check_action(const GameState& state, OperatorId agent,
                                        const AgentAction& action);
inline bool is_legal(const GameState& state, OperatorId agent, const AgentAction& action) {
  return !check_action(state, agent, action).has_value();
}

// Advances one tick. `actions` must contain a legal action for every ready
// agent; entries for busy or dead agents must be noop. Throws ContractError.
void step(GameState& state, const ActionMap& actions);

std::optional<Outcome> check_termination(const GameState& state);

// --- visibility ------------------------------------------------------------

int effective_observed_distance(const OperatorState& target, const GameMap& map);
bool is_visible(const OperatorState& viewer, const OperatorState& target, const GameMap& map);
bool in_attack_range(const OperatorState& attacker, const OperatorState& target);

// --- combat ----------------------------------------------------------------

enum class CombatRollKind : std::uint8_t { hit, miss, annihilate, nullify };

struct CombatRoll {
  CombatRollKind kind = CombatRollKind::miss;
  double damage = 0;  // blood removed, before flooring at zero
};

// One attack draw. Without noise parameters: hit with the target class's
// probability for that class's damage. With noise parameters: annihilate,
// nullify, or damage scaled by distance and target health.
CombatRoll roll_attack(const OperatorTemplate& attacker, const OperatorState& target,
                       int distance, const std::optional<CombatNoiseParams>& noise, Rng& rng);

// Resolves one shot against the live state, appending shot + outcome events.
// Returns the outcome event. Throws ContractError when the shot is not allowed.
Event resolve_attack(GameState& state, OperatorId attacker, OperatorId target);

// --- CMAC ------------------------------------------------------------------

inline constexpr int kSplitOptionThree = 0;   // three equal small agents
inline constexpr int kSplitOptionTwo = 1;     // one medium (2/3) + one small (1/3)

std::optional<std::string> check_depolymerize(const GameState& state, OperatorId agent,
                                              int option);
std::optional<std::string> check_polymerize(const GameState& state, OperatorId agent,
                                            OperatorId ally);

// Blood shares of a split: option 0 -> three floor(b/3) shares with the
// remainder on the first; option 1 -> (b - floor(b/3), floor(b/3)).
std::vector<double> split_blood(double blood, int option);

// Returns the child ids. Throws ContractError when not allowed.
std::vector<OperatorId> depolymerize(GameState& state, OperatorId agent, int option);
// Returns the merged operator's id. Throws ContractError when not allowed.
OperatorId polymerize(GameState& state, OperatorId agent, OperatorId ally);

// --- digests ---------------------------------------------------------------

std::string sha256_hex(std::string_view data);
std::string state_digest(const GameState& state);
std::string event_log_digest(std::span<const Event> events);

}  // namespace wgc
