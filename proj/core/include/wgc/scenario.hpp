#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wgc/hexmap.hpp"

namespace wgc {

enum class OperatorType : std::uint8_t { tank, chariot, infantry };
enum class TargetClass : std::uint8_t { vehicle, infantry };
enum class Side : std::uint8_t { red, blue };
enum class SubEnv : std::uint8_t { standard, poac, cmac, amac, srmac };

inline constexpr int kOperatorTypeCount = 3;

constexpr TargetClass target_class(OperatorType t) {
  return t == OperatorType::infantry ? TargetClass::infantry : TargetClass::vehicle;
}
constexpr Side opposite(Side s) { return s == Side::red ? Side::blue : Side::red; }
constexpr int side_index(Side s) { return s == Side::red ? 0 : 1; }

std::string_view to_string(OperatorType t);
std::string_view to_string(Side s);
std::string_view to_string(SubEnv s);
std::optional<OperatorType> parse_operator_type(std::string_view s);
std::optional<Side> parse_side(std::string_view s);
std::optional<SubEnv> parse_subenv(std::string_view s);

// Static operator attributes. Damage/probability pairs are indexed by the
// class of the unit being attacked.
struct OperatorTemplate {
  OperatorType type = OperatorType::tank;
  double blood_max = 0;
  double speed = 1;              // hexes per tick, in (0, 1]
  int observed_distance = 0;     // radius within which this operator can be seen
  int attacked_distance = 0;     // this operator's attack range
  double dmg_vs_vehicle = 0;
  double p_hit_vehicle = 0;
  double dmg_vs_infantry = 0;
  double p_hit_infantry = 0;
  int shoot_cooldown = 0;
  int shoot_prep = 0;
  int stop_time = 1;
  double attack_reduce_coeff = 1.0;

  double damage(TargetClass c) const {
    return c == TargetClass::vehicle ? dmg_vs_vehicle : dmg_vs_infantry;
  }
  double hit_probability(TargetClass c) const {
    return c == TargetClass::vehicle ? p_hit_vehicle : p_hit_infantry;
  }
  // Ticks needed to complete one single-hex move.
  int move_ticks() const;

  friend bool operator==(const OperatorTemplate&, const OperatorTemplate&) = default;
};

struct RosterEntry {
  OperatorTemplate tmpl;
  HexCoord spawn;

  friend bool operator==(const RosterEntry&, const RosterEntry&) = default;
};

struct Roster {
  Side side = Side::red;
  std::vector<RosterEntry> entries;

  double total_blood() const;

  friend bool operator==(const Roster&, const Roster&) = default;
};

struct CombatNoiseParams {
  double p_annihilate = 0.05;
  double p_nullify = 0.15;
  double dist_falloff = 0.5;
  double health_floor = 0.5;

  friend bool operator==(const CombatNoiseParams&, const CombatNoiseParams&) = default;
};

inline constexpr int kDefaultMaxTicks = 600;

struct Scenario {
  SubEnv subenv = SubEnv::standard;
  int index = 0;
  std::shared_ptr<const GameMap> map;
  // Name of a bundled map, or empty when the map is carried inline.
  std::string map_ref;
  Roster red{Side::red, {}};
  Roster blue{Side::blue, {}};
  int max_ticks = kDefaultMaxTicks;
  std::optional<CombatNoiseParams> srmac;

  const Roster& roster(Side s) const { return s == Side::red ? red : blue; }
  Roster& roster(Side s) { return s == Side::red ? red : blue; }
  bool is_cmac() const { return subenv == SubEnv::cmac; }

  // "<subenv>/<index>", e.g. "poac/1".
  std::string id() const;

  friend bool operator==(const Scenario& a, const Scenario& b);
};

struct Violation {
  std::string field;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> validate(const Scenario& scenario);

class ScenarioError : public std::runtime_error {
 public:
  enum class Kind { syntax, schema, invariant, unknown_subenv, map };

  ScenarioError(Kind kind, std::string field, const std::string& message,
                std::vector<Violation> violations = {});

  Kind kind() const { return kind_; }
  const std::string& field() const { return field_; }
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  Kind kind_;
  std::string field_;
  std::vector<Violation> violations_;
};

// The operator template a sub-environment uses for a type and side.
OperatorTemplate builtin_template(SubEnv subenv, OperatorType type, Side side = Side::red);

// index 0 -> small map, 1 -> medium, 2 -> large. Throws std::out_of_range on a bad index.
Scenario builtin_scenario(SubEnv subenv, int index);
std::vector<Scenario> all_builtin_scenarios();

// Parses "standard/0" style ids.
Scenario builtin_scenario(std::string_view id);

// Scenario documents are JSON. `base_dir` resolves relative map paths.
Scenario load_scenario(std::string_view document, const std::filesystem::path& base_dir = {});
std::string save_scenario(const Scenario& scenario);

}  // namespace wgc
