#include "wgc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace wgc {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(OperatorType t) {
  switch (t) {
    case OperatorType::tank: return "tank";
    case OperatorType::chariot: return "chariot";
    case OperatorType::infantry: return "infantry";
  }
  return "?";
}

std::string_view to_string(Side s) { return s == Side::red ? "red" : "blue"; }

std::string_view to_string(SubEnv s) {
  switch (s) {
    case SubEnv::standard: return "standard";
    case SubEnv::poac: return "poac";
    case SubEnv::cmac: return "cmac";
    case SubEnv::amac: return "amac";
    case SubEnv::srmac: return "srmac";
  }
  return "?";
}

std::optional<OperatorType> parse_operator_type(std::string_view s) {
  if (s == "tank") return OperatorType::tank;
  if (s == "chariot") return OperatorType::chariot;
  if (s == "infantry") return OperatorType::infantry;
  return std::nullopt;
}

std::optional<Side> parse_side(std::string_view s) {
  if (s == "red") return Side::red;
  if (s == "blue") return Side::blue;
  return std::nullopt;
}

std::optional<SubEnv> parse_subenv(std::string_view s) {
  if (s == "standard") return SubEnv::standard;
  if (s == "poac") return SubEnv::poac;
  if (s == "cmac") return SubEnv::cmac;
  if (s == "amac") return SubEnv::amac;
  if (s == "srmac") return SubEnv::srmac;
  return std::nullopt;
}

int OperatorTemplate::move_ticks() const {
  if (!(speed > 0)) return 1;
  return std::max(1, static_cast<int>(std::lround(1.0 / speed)));
}

double Roster::total_blood() const {
  double total = 0;
  for (const auto& e : entries) total += e.tmpl.blood_max;
  return total;
}

std::string Scenario::id() const {
  return std::string(to_string(subenv)) + "/" + std::to_string(index);
}

bool operator==(const Scenario& a, const Scenario& b) {
  const bool maps_equal = (a.map == b.map) || (a.map && b.map && *a.map == *b.map);
  return a.subenv == b.subenv && a.index == b.index && maps_equal && a.map_ref == b.map_ref &&
         a.red == b.red && a.blue == b.blue && a.max_ticks == b.max_ticks && a.srmac == b.srmac;
}

ScenarioError::ScenarioError(Kind kind, std::string field, const std::string& message,
                             std::vector<Violation> violations)
    : std::runtime_error(field.empty() ? message : field + ": " + message),
      kind_(kind),
      field_(std::move(field)),
      violations_(std::move(violations)) {}

// ---------------------------------------------------------------------------
// Attribute tables

namespace {

struct Row {
  double blood, speed;
  int observed, attacked;
  double dmg_v, p_v, dmg_i, p_i;
  int cooldown, prep;
};

OperatorTemplate make(OperatorType type, const Row& row, double reduce = 1.0) {
  OperatorTemplate t;
  t.type = type;
  t.blood_max = row.blood;
  t.speed = row.speed;
  t.observed_distance = row.observed;
  t.attacked_distance = row.attacked;
  t.dmg_vs_vehicle = row.dmg_v;
  t.p_hit_vehicle = row.p_v;
  t.dmg_vs_infantry = row.dmg_i;
  t.p_hit_infantry = row.p_i;
  t.shoot_cooldown = row.cooldown;
  t.shoot_prep = row.prep;
  t.stop_time = 1;
  t.attack_reduce_coeff = reduce;
  return t;
}

//                         blood speed obs att dmg_v p_v  dmg_i p_i  cd prep
constexpr Row kStdTank     {10,   1,   10,  7, 1.2,  0.8, 0.6,  0.6, 0, 0};
constexpr Row kStdChariot  { 8,   1,   10,  7, 1.5,  0.7, 0.8,  0.6, 0, 0};
constexpr Row kStdInfantry { 7,   1,    5,  3, 0.8,  0.7, 0.8,  0.6, 0, 0};

constexpr Row kPoacTank    {10,   1,   10,  7, 1.2,  0.8, 0.6,  0.4, 0, 0};
constexpr Row kPoacChariot { 8,   1,   10,  7, 1.5,  0.6, 0.8,  0.6, 1, 2};
constexpr Row kPoacInfantry{ 7, 0.2,    5,  3, 0.8,  0.6, 0.8,  0.6, 1, 2};

constexpr Row kCmacTank    {10,   1,   10,  7, 1.2,  0.8, 0.6,  0.6, 0, 0};
constexpr Row kCmacChariot { 8,   1,   10,  7, 1.5,  0.7, 0.8,  0.6, 0, 0};
constexpr Row kCmacInfantry{ 7,   1,    5,  3, 0.8,  0.6, 0.8,  0.6, 0, 0};
constexpr double kCmacReduce = 0.8;

constexpr Row kAmacRedTank     {10, 1, 10, 7, 1.5, 0.8, 0.8, 0.6, 0, 0};
constexpr Row kAmacRedChariot  { 8, 1, 10, 7, 1.5, 0.7, 0.8, 0.6, 0, 0};
constexpr Row kAmacRedInfantry { 7, 1,  5, 3, 0.8, 0.7, 0.8, 0.6, 0, 0};
constexpr Row kAmacBlueTank    {10, 1, 10, 7, 1.2, 0.8, 0.6, 0.6, 0, 0};
constexpr Row kAmacBlueChariot { 8, 1, 10, 7, 1.5, 0.6, 0.8, 0.6, 0, 0};
constexpr Row kAmacBlueInfantry{ 7, 1,  5, 3, 0.8, 0.6, 0.8, 0.6, 0, 0};

const Row& pick(OperatorType t, const Row& tank, const Row& chariot, const Row& infantry) {
  switch (t) {
    case OperatorType::tank: return tank;
    case OperatorType::chariot: return chariot;
    case OperatorType::infantry: return infantry;
  }
  return tank;
}

SizeClass size_for_index(int index) {
  switch (index) {
    case 0: return SizeClass::small;
    case 1: return SizeClass::medium;
    case 2: return SizeClass::large;
    default: throw std::out_of_range("scenario index must be 0, 1 or 2");
  }
}

// Red spawn cells in offset coordinates relative to the middle rows; blue
// spawns are the point reflection of the corresponding red cell.
std::vector<OffsetCoord> red_spawns(int height, std::size_t count) {
  const int m = height / 2 - 1;
  if (count == 5) return {{1, m}, {1, m + 1}, {0, m - 1}, {0, m + 2}, {0, m}};
  return {{1, m}, {1, m + 1}, {0, m}};
}

}  // namespace

OperatorTemplate builtin_template(SubEnv subenv, OperatorType type, Side side) {
  switch (subenv) {
    case SubEnv::standard:
    case SubEnv::srmac:
      return make(type, pick(type, kStdTank, kStdChariot, kStdInfantry));
    case SubEnv::poac:
      return make(type, pick(type, kPoacTank, kPoacChariot, kPoacInfantry));
    case SubEnv::cmac:
      return make(type, pick(type, kCmacTank, kCmacChariot, kCmacInfantry), kCmacReduce);
    case SubEnv::amac:
      if (side == Side::red) {
        return make(type, pick(type, kAmacRedTank, kAmacRedChariot, kAmacRedInfantry));
      }
      return make(type, pick(type, kAmacBlueTank, kAmacBlueChariot, kAmacBlueInfantry));
  }
  throw std::invalid_argument("unknown sub-environment");
}

Scenario builtin_scenario(SubEnv subenv, int index) {
  Scenario s;
  s.subenv = subenv;
  s.index = index;
  const SizeClass size = size_for_index(index);
  s.map = builtin_map(size);
  s.map_ref = std::string(to_string(size));
  s.max_ticks = kDefaultMaxTicks;
  if (subenv == SubEnv::srmac) s.srmac = CombatNoiseParams{};

  const std::vector<OperatorType> trio{OperatorType::tank, OperatorType::chariot,
                                       OperatorType::infantry};
  const std::vector<OperatorType> red_types =
      subenv == SubEnv::amac
          ? std::vector<OperatorType>{OperatorType::tank, OperatorType::tank,
                                      OperatorType::chariot, OperatorType::chariot,
                                      OperatorType::infantry}
          : trio;

  const auto red_cells = red_spawns(s.map->height(), red_types.size());
  for (std::size_t i = 0; i < red_types.size(); ++i) {
    s.red.entries.push_back(
        {builtin_template(subenv, red_types[i], Side::red), from_offset(red_cells[i])});
  }
  const auto mirror_cells = red_spawns(s.map->height(), trio.size());
  for (std::size_t i = 0; i < trio.size(); ++i) {
    s.blue.entries.push_back({builtin_template(subenv, trio[i], Side::blue),
                              s.map->reflect(from_offset(mirror_cells[i]))});
  }
  return s;
}

std::vector<Scenario> all_builtin_scenarios() {
  std::vector<Scenario> out;
  for (SubEnv e : {SubEnv::standard, SubEnv::poac, SubEnv::cmac, SubEnv::amac, SubEnv::srmac}) {
    for (int i = 0; i < 3; ++i) out.push_back(builtin_scenario(e, i));
  }
  return out;
}

Scenario builtin_scenario(std::string_view id) {
  const auto slash = id.find('/');
  if (slash == std::string_view::npos) {
    throw ScenarioError(ScenarioError::Kind::schema, "id", "expected '<subenv>/<index>'");
  }
  const auto subenv = parse_subenv(id.substr(0, slash));
  if (!subenv) {
    throw ScenarioError(ScenarioError::Kind::unknown_subenv, "subenv",
                        "unknown sub-environment '" + std::string(id.substr(0, slash)) + "'");
  }
  const std::string_view idx = id.substr(slash + 1);
  if (idx.size() != 1 || idx[0] < '0' || idx[0] > '2') {
    throw ScenarioError(ScenarioError::Kind::schema, "index", "index must be 0, 1 or 2");
  }
  return builtin_scenario(*subenv, idx[0] - '0');
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_template(const OperatorTemplate& t, const std::string& where, SubEnv subenv,
                    std::vector<Violation>& out) {
  auto add = [&](const char* field, std::string msg) {
    out.push_back({where + "." + field, std::move(msg)});
  };
  auto prob = [&](const char* field, double p) {
    if (!(p >= 0.0 && p <= 1.0)) add(field, "probability must lie in [0, 1]");
  };
  if (!(t.blood_max > 0)) add("blood_max", "must be positive");
  if (!(t.speed > 0 && t.speed <= 1)) add("speed", "must lie in (0, 1]");
  if (t.observed_distance < 0) add("observed_distance", "must be non-negative");
  if (t.attacked_distance < 0) add("attacked_distance", "must be non-negative");
  if (!(t.dmg_vs_vehicle >= 0)) add("dmg_vs_vehicle", "must be non-negative");
  if (!(t.dmg_vs_infantry >= 0)) add("dmg_vs_infantry", "must be non-negative");
  prob("p_hit_vehicle", t.p_hit_vehicle);
  prob("p_hit_infantry", t.p_hit_infantry);
  if (t.shoot_cooldown < 0) add("shoot_cooldown", "must be non-negative");
  if (t.shoot_prep < 0) add("shoot_prep", "must be non-negative");
  if (t.stop_time < 0) add("stop_time", "must be non-negative");
  if (!(t.attack_reduce_coeff >= 0 && t.attack_reduce_coeff <= 1)) {
    add("attack_reduce_coeff", "must lie in [0, 1]");
  }
  if (subenv == SubEnv::standard || subenv == SubEnv::amac || subenv == SubEnv::srmac) {
    if (t.shoot_cooldown != 0) {
      add("shoot_cooldown", "must be 0 in the " + std::string(to_string(subenv)) +
                                " sub-environment");
    }
    if (t.shoot_prep != 0) {
      add("shoot_prep", "must be 0 in the " + std::string(to_string(subenv)) + " sub-environment");
    }
  }
}

void check_counts(const Roster& roster, int tanks, int chariots, int infantry,
                  std::vector<Violation>& out) {
  int n[kOperatorTypeCount] = {0, 0, 0};
  for (const auto& e : roster.entries) ++n[static_cast<int>(e.tmpl.type)];
  if (n[0] != tanks || n[1] != chariots || n[2] != infantry) {
    std::ostringstream msg;
    msg << "roster must contain " << tanks << " tank(s), " << chariots << " chariot(s), "
        << infantry << " infantry; found " << n[0] << "/" << n[1] << "/" << n[2];
    out.push_back({std::string(to_string(roster.side)), msg.str()});
  }
}

}  // namespace

std::vector<Violation> validate(const Scenario& s) {
  std::vector<Violation> out;
  if (s.index < 0 || s.index > 2) out.push_back({"index", "must be 0, 1 or 2"});
  if (s.max_ticks <= 0) out.push_back({"max_ticks", "must be positive"});
  if (!s.map) {
    out.push_back({"map", "missing map"});
    return out;
  }
  if (s.index >= 0 && s.index <= 2 && s.map->size_class() != size_for_index(s.index)) {
    out.push_back({"map", "scenario index " + std::to_string(s.index) + " requires a " +
                              std::string(to_string(size_for_index(s.index))) + " map, got " +
                              std::string(to_string(s.map->size_class()))});
  }
  if (s.red.side != Side::red) out.push_back({"red", "roster side must be red"});
  if (s.blue.side != Side::blue) out.push_back({"blue", "roster side must be blue"});

  for (const Roster* roster : {&s.red, &s.blue}) {
    const std::string side(to_string(roster->side));
    for (std::size_t i = 0; i < roster->entries.size(); ++i) {
      const auto& e = roster->entries[i];
      const std::string where = side + "[" + std::to_string(i) + "]";
      check_template(e.tmpl, where, s.subenv, out);
      if (!s.map->contains(e.spawn)) {
        out.push_back({where + ".spawn", "spawn cell is outside the map"});
        continue;
      }
      const int col = to_offset(e.spawn).col;
      const bool west = 2 * col < s.map->width();
      if (roster->side == Side::red && !west) {
        out.push_back({where + ".spawn", "red operators must spawn in the western half"});
      }
      if (roster->side == Side::blue && west) {
        out.push_back({where + ".spawn", "blue operators must spawn in the eastern half"});
      }
    }
  }

  // One violation per colliding pair.
  std::vector<std::pair<std::string, HexCoord>> spawns;
  for (const Roster* roster : {&s.red, &s.blue}) {
    for (std::size_t i = 0; i < roster->entries.size(); ++i) {
      spawns.emplace_back(std::string(to_string(roster->side)) + "[" + std::to_string(i) + "]",
                          roster->entries[i].spawn);
    }
  }
  for (std::size_t i = 0; i < spawns.size(); ++i) {
    for (std::size_t j = i + 1; j < spawns.size(); ++j) {
      if (spawns[i].second == spawns[j].second) {
        out.push_back({spawns[j].first + ".spawn", "spawn collides with " + spawns[i].first});
      }
    }
  }

  if (s.subenv == SubEnv::amac) {
    check_counts(s.red, 2, 2, 1, out);
    check_counts(s.blue, 1, 1, 1, out);
  } else {
    check_counts(s.red, 1, 1, 1, out);
    check_counts(s.blue, 1, 1, 1, out);
  }

  if (s.subenv == SubEnv::srmac && !s.srmac) {
    out.push_back({"srmac", "srmac parameters are required in the srmac sub-environment"});
  }
  if (s.subenv != SubEnv::srmac && s.srmac) {
    out.push_back({"srmac", "srmac parameters are only allowed in the srmac sub-environment"});
  }
  if (s.srmac) {
    const auto& p = *s.srmac;
    auto unit = [&](const char* f, double v) {
      if (!(v >= 0 && v <= 1)) out.push_back({std::string("srmac.") + f, "must lie in [0, 1]"});
    };
    unit("p_annihilate", p.p_annihilate);
    unit("p_nullify", p.p_nullify);
    unit("dist_falloff", p.dist_falloff);
    unit("health_floor", p.health_floor);
    if (p.p_annihilate + p.p_nullify > 1.0) {
      out.push_back({"srmac", "p_annihilate + p_nullify must not exceed 1"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Documents

namespace {

constexpr int kSchemaVersion = 1;

[[noreturn]] void schema_error(const std::string& field, const std::string& msg) {
  throw ScenarioError(ScenarioError::Kind::schema, field, msg);
}

const ordered_json& require(const ordered_json& obj, const std::string& key,
                            const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where.empty() ? key : where + "." + key, "missing field");
  return *it;
}

double get_number(const ordered_json& obj, const std::string& key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number()) schema_error(where + "." + key, "expected a number");
  return v.get<double>();
}

int get_int(const ordered_json& obj, const std::string& key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number_integer()) schema_error(where + "." + key, "expected an integer");
  return v.get<int>();
}

const std::set<std::string>& template_keys() {
  static const std::set<std::string> keys{
      "type",           "blood_max",      "speed",          "observed_distance",
      "attacked_distance", "dmg_vs_vehicle", "p_hit_vehicle", "dmg_vs_infantry",
      "p_hit_infantry", "shoot_cooldown", "shoot_prep",     "stop_time",
      "attack_reduce_coeff", "spawn"};
  return keys;
}

RosterEntry parse_entry(const ordered_json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!template_keys().contains(key)) schema_error(where + "." + key, "unknown field");
  }
  RosterEntry e;
  const auto& type = require(j, "type", where);
  if (!type.is_string() || !parse_operator_type(type.get<std::string>())) {
    schema_error(where + ".type", "expected one of tank, chariot, infantry");
  }
  e.tmpl.type = *parse_operator_type(type.get<std::string>());
  e.tmpl.blood_max = get_number(j, "blood_max", where);
  e.tmpl.speed = get_number(j, "speed", where);
  e.tmpl.observed_distance = get_int(j, "observed_distance", where);
  e.tmpl.attacked_distance = get_int(j, "attacked_distance", where);
  e.tmpl.dmg_vs_vehicle = get_number(j, "dmg_vs_vehicle", where);
  e.tmpl.p_hit_vehicle = get_number(j, "p_hit_vehicle", where);
  e.tmpl.dmg_vs_infantry = get_number(j, "dmg_vs_infantry", where);
  e.tmpl.p_hit_infantry = get_number(j, "p_hit_infantry", where);
  e.tmpl.shoot_cooldown = get_int(j, "shoot_cooldown", where);
  e.tmpl.shoot_prep = get_int(j, "shoot_prep", where);
  if (j.contains("stop_time")) e.tmpl.stop_time = get_int(j, "stop_time", where);
  if (j.contains("attack_reduce_coeff")) {
    e.tmpl.attack_reduce_coeff = get_number(j, "attack_reduce_coeff", where);
  }
  const auto& spawn = require(j, "spawn", where);
  if (!spawn.is_object()) schema_error(where + ".spawn", "expected {\"q\": int, \"r\": int}");
  e.spawn.q = get_int(spawn, "q", where + ".spawn");
  e.spawn.r = get_int(spawn, "r", where + ".spawn");
  return e;
}

ordered_json entry_json(const RosterEntry& e) {
  const auto& t = e.tmpl;
  return ordered_json{{"type", to_string(t.type)},
                      {"blood_max", t.blood_max},
                      {"speed", t.speed},
                      {"observed_distance", t.observed_distance},
                      {"attacked_distance", t.attacked_distance},
                      {"dmg_vs_vehicle", t.dmg_vs_vehicle},
                      {"p_hit_vehicle", t.p_hit_vehicle},
                      {"dmg_vs_infantry", t.dmg_vs_infantry},
                      {"p_hit_infantry", t.p_hit_infantry},
                      {"shoot_cooldown", t.shoot_cooldown},
                      {"shoot_prep", t.shoot_prep},
                      {"stop_time", t.stop_time},
                      {"attack_reduce_coeff", t.attack_reduce_coeff},
                      {"spawn", {{"q", e.spawn.q}, {"r", e.spawn.r}}}};
}

Roster parse_roster(const ordered_json& doc, Side side) {
  const std::string key(to_string(side));
  const auto& arr = require(doc, key, "");
  if (!arr.is_array()) schema_error(key, "expected a list of operators");
  Roster r{side, {}};
  for (std::size_t i = 0; i < arr.size(); ++i) {
    r.entries.push_back(parse_entry(arr[i], key + "[" + std::to_string(i) + "]"));
  }
  return r;
}

std::shared_ptr<const GameMap> parse_map(const ordered_json& j, const std::filesystem::path& base,
                                         std::string& map_ref) {
  auto parse_text = [](const std::string& text, const std::string& field) {
    try {
      return std::make_shared<const GameMap>(load_map(text));
    } catch (const MapParseError& e) {
      throw ScenarioError(ScenarioError::Kind::map, field, e.what());
    }
  };
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (auto m = builtin_map(name)) {
      map_ref = name;
      return m;
    }
    std::filesystem::path path(name);
    if (path.is_relative() && !base.empty()) path = base / path;
    std::ifstream in(path);
    if (!in) {
      throw ScenarioError(ScenarioError::Kind::map, "map", "cannot read map file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    map_ref.clear();
    return parse_text(buf.str(), "map");
  }
  if (j.is_object() && j.contains("text") && j["text"].is_string()) {
    map_ref.clear();
    return parse_text(j["text"].get<std::string>(), "map.text");
  }
  schema_error("map", "expected a bundled map name, a path, or {\"text\": ...}");
}

}  // namespace

Scenario load_scenario(std::string_view document, const std::filesystem::path& base_dir) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(ScenarioError::Kind::syntax, "", e.what());
  }
  if (!doc.is_object()) schema_error("", "scenario document must be an object");

  static const std::set<std::string> top_keys{"schema",    "schema_version", "subenv", "index",
                                              "map",       "red",            "blue",   "max_ticks",
                                              "srmac"};
  for (const auto& [key, _] : doc.items()) {
    if (!top_keys.contains(key)) schema_error(key, "unknown field");
  }
  if (doc.contains("schema_version") && get_int(doc, "schema_version", "") != kSchemaVersion) {
    schema_error("schema_version", "unsupported version");
  }

  Scenario s;
  const auto& subenv = require(doc, "subenv", "");
  if (!subenv.is_string()) schema_error("subenv", "expected a string");
  const auto parsed = parse_subenv(subenv.get<std::string>());
  if (!parsed) {
    throw ScenarioError(ScenarioError::Kind::unknown_subenv, "subenv",
                        "unknown sub-environment '" + subenv.get<std::string>() + "'");
  }
  s.subenv = *parsed;
  s.index = get_int(doc, "index", "");
  s.map = parse_map(require(doc, "map", ""), base_dir, s.map_ref);
  s.red = parse_roster(doc, Side::red);
  s.blue = parse_roster(doc, Side::blue);
  s.max_ticks = doc.contains("max_ticks") ? get_int(doc, "max_ticks", "") : kDefaultMaxTicks;
  if (doc.contains("srmac")) {
    const auto& p = doc["srmac"];
    if (!p.is_object()) schema_error("srmac", "expected an object");
    CombatNoiseParams params;
    if (p.contains("p_annihilate")) params.p_annihilate = get_number(p, "p_annihilate", "srmac");
    if (p.contains("p_nullify")) params.p_nullify = get_number(p, "p_nullify", "srmac");
    if (p.contains("dist_falloff")) params.dist_falloff = get_number(p, "dist_falloff", "srmac");
    if (p.contains("health_floor")) params.health_floor = get_number(p, "health_floor", "srmac");
    s.srmac = params;
  }

  auto violations = validate(s);
  if (!violations.empty()) {
    const std::string field = violations.front().field;
    std::string msg = violations.front().message;
    if (violations.size() > 1) {
      msg += " (+" + std::to_string(violations.size() - 1) + " more)";
    }
    throw ScenarioError(ScenarioError::Kind::invariant, field, msg, std::move(violations));
  }
  return s;
}

std::string save_scenario(const Scenario& s) {
  ordered_json doc;
  doc["schema"] = "wgc-scenario";
  doc["schema_version"] = kSchemaVersion;
  doc["subenv"] = to_string(s.subenv);
  doc["index"] = s.index;
  if (!s.map_ref.empty()) {
    doc["map"] = s.map_ref;
  } else {
    doc["map"] = ordered_json{{"text", s.map ? save_map(*s.map) : std::string()}};
  }
  doc["max_ticks"] = s.max_ticks;
  for (Side side : {Side::red, Side::blue}) {
    ordered_json arr = ordered_json::array();
    for (const auto& e : s.roster(side).entries) arr.push_back(entry_json(e));
    doc[std::string(to_string(side))] = std::move(arr);
  }
  if (s.srmac) {
    doc["srmac"] = ordered_json{{"p_annihilate", s.srmac->p_annihilate},
                                {"p_nullify", s.srmac->p_nullify},
                                {"dist_falloff", s.srmac->dist_falloff},
                                {"health_floor", s.srmac->health_floor}};
  }
  return doc.dump(2) + "\n";
}

}  // namespace wgc
