#include <set>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "reference_tables.hpp"
#include "unit/support.hpp"
#include "wgc/scenario.hpp"

using namespace wgc;
using nlohmann::ordered_json;

namespace {

ordered_json doc_of(const Scenario& s) { return ordered_json::parse(save_scenario(s)); }

ScenarioError load_error(const ordered_json& doc) {
  try {
    load_scenario(doc.dump());
  } catch (const ScenarioError& e) {
    return e;
  }
  FAIL("document was accepted");
  return ScenarioError(ScenarioError::Kind::schema, "", "");
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("fifteen built-in scenarios") {
  const auto all = all_builtin_scenarios();
  REQUIRE(all.size() == 15);
  std::set<std::string> ids;
  for (const auto& s : all) {
    ids.insert(s.id());
    CHECK(validate(s).empty());
    CHECK(s.max_ticks == 600);
    CHECK(s.map->size_class() == (s.index == 0   ? SizeClass::small
                                  : s.index == 1 ? SizeClass::medium
                                                 : SizeClass::large));
    CHECK(s.srmac.has_value() == (s.subenv == SubEnv::srmac));
  }
  CHECK(ids.size() == 15);
  CHECK(builtin_scenario("poac/2") == builtin_scenario(SubEnv::poac, 2));
  CHECK_THROWS_AS(builtin_scenario(SubEnv::cmac, 3), std::out_of_range);
}

TEST_CASE("attributes match the reference tables") {
  for (const auto& s : all_builtin_scenarios()) {
    for (Side side : {Side::red, Side::blue}) {
      const auto& table = reference::table_for(s.subenv, side);
      std::array<int, 3> counts{0, 0, 0};
      for (const auto& e : s.roster(side).entries) {
        const int t = static_cast<int>(e.tmpl.type);
        ++counts[static_cast<std::size_t>(t)];
        const auto diffs = reference::compare(e.tmpl, table[static_cast<std::size_t>(t)]);
        INFO(s.id(), " ", to_string(side), " ", to_string(e.tmpl.type));
        for (const auto& d : diffs) INFO(d);
        CHECK(diffs.empty());
        CHECK(e.tmpl.stop_time == 1);
      }
      CHECK(counts == reference::roster_counts(s.subenv, side));
    }
  }
}

TEST_CASE("spawns sit in their own half and never overlap") {
  for (const auto& s : all_builtin_scenarios()) {
    std::set<HexCoord> cells;
    for (Side side : {Side::red, Side::blue}) {
      for (const auto& e : s.roster(side).entries) {
        CHECK(s.map->contains(e.spawn));
        CHECK(cells.insert(e.spawn).second);
        const bool west = 2 * to_offset(e.spawn).col < s.map->width();
        CHECK(west == (side == Side::red));
      }
    }
  }
}

TEST_CASE("document round trip for every built-in") {
  for (const auto& s : all_builtin_scenarios()) {
    const std::string text = save_scenario(s);
    const Scenario back = load_scenario(text);
    CHECK(back == s);
    CHECK(save_scenario(back) == text);
  }
}

TEST_CASE("inline map text round trips") {
  Scenario s = builtin_scenario(SubEnv::standard, 1);
  s.map_ref.clear();
  const Scenario back = load_scenario(save_scenario(s));
  CHECK(*back.map == *s.map);
  CHECK(back.red == s.red);
}

TEST_CASE("speed zero is rejected naming the field") {
  auto doc = doc_of(builtin_scenario(SubEnv::standard, 0));
  doc["red"][0]["speed"] = 0;
  const auto e = load_error(doc);
  CHECK(e.kind() == ScenarioError::Kind::invariant);
  CHECK(e.field() == "red[0].speed");
  REQUIRE(e.violations().size() == 1);
}

TEST_CASE("probability above one is rejected") {
  auto doc = doc_of(builtin_scenario(SubEnv::poac, 0));
  doc["blue"][2]["p_hit_vehicle"] = 1.3;
  const auto e = load_error(doc);
  CHECK(e.kind() == ScenarioError::Kind::invariant);
  CHECK(e.field() == "blue[2].p_hit_vehicle");
}

TEST_CASE("unknown sub-environment") {
  auto doc = doc_of(builtin_scenario(SubEnv::standard, 0));
  doc["subenv"] = "naval";
  CHECK(load_error(doc).kind() == ScenarioError::Kind::unknown_subenv);
  CHECK_THROWS_AS(builtin_scenario("naval/0"), ScenarioError);
}

TEST_CASE("schema and syntax errors") {
  CHECK(load_error(ordered_json::array()).kind() == ScenarioError::Kind::schema);
  try {
    load_scenario("{not json");
    FAIL("accepted");
  } catch (const ScenarioError& e) {
    CHECK(e.kind() == ScenarioError::Kind::syntax);
  }
  auto doc = doc_of(builtin_scenario(SubEnv::standard, 0));
  doc["weather"] = "rain";
  CHECK(load_error(doc).field() == "weather");
  doc = doc_of(builtin_scenario(SubEnv::standard, 0));
  doc["red"][1].erase("blood_max");
  CHECK(load_error(doc).field() == "red[1].blood_max");
  doc = doc_of(builtin_scenario(SubEnv::standard, 0));
  doc["map"] = ordered_json{{"text", "wgcmap v1 2 2\n..\n.X\n"}};
  CHECK(load_error(doc).kind() == ScenarioError::Kind::map);
}

TEST_CASE("overlapping spawns report one violation per pair") {
  Scenario s = builtin_scenario(SubEnv::standard, 0);
  s.red.entries[1].spawn = s.red.entries[0].spawn;
  s.red.entries[2].spawn = s.red.entries[0].spawn;
  int collisions = 0;
  for (const auto& v : validate(s)) {
    if (v.message.find("collides") != std::string::npos) ++collisions;
  }
  CHECK(collisions == 3);
}

TEST_CASE("AMAC red needs exactly five operators") {
  Scenario s = builtin_scenario(SubEnv::amac, 0);
  s.red.entries.pop_back();
  const auto v = validate(s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].field == "red");
}

TEST_CASE("cooldown is only allowed where the table has one") {
  Scenario s = builtin_scenario(SubEnv::standard, 0);
  s.red.entries[0].tmpl.shoot_cooldown = 1;
  const auto v = validate(s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].field == "red[0].shoot_cooldown");
  CHECK(validate(builtin_scenario(SubEnv::poac, 0)).empty());
}

TEST_CASE("srmac parameters") {
  Scenario s = builtin_scenario(SubEnv::srmac, 0);
  s.srmac->p_annihilate = 0.9;
  s.srmac->p_nullify = 0.2;
  CHECK_FALSE(validate(s).empty());
  Scenario plain = builtin_scenario(SubEnv::standard, 0);
  plain.srmac = CombatNoiseParams{};
  CHECK(validate(plain).size() == 1);
}

TEST_CASE("the reference lattice differs where the tables differ") {
  using reference::compare;
  const auto tank = builtin_template(SubEnv::poac, OperatorType::tank);
  CHECK(compare(tank, reference::kStandard[0]) == std::vector<std::string>{
                                                     "p_hit_infantry 0.400000 != 0.600000"});
  const auto inf = builtin_template(SubEnv::poac, OperatorType::infantry);
  CHECK(compare(inf, reference::kStandard[2]).size() == 4);  // speed, p_hit_vehicle, cooldown, prep
}

TEST_CASE("edited documents load with the edit") {
  auto doc = doc_of(builtin_scenario(SubEnv::poac, 0));
  doc["red"][2]["speed"] = 1;
  const Scenario s = load_scenario(doc.dump());
  CHECK(s.red.entries[2].tmpl.speed == 1);
  CHECK(s.red.entries[2].tmpl.move_ticks() == 1);
  CHECK(builtin_template(SubEnv::poac, OperatorType::infantry).move_ticks() == 5);
}

}  // TEST_SUITE
