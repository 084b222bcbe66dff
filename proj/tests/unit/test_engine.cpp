#include <cmath>

#include "doctest.h"
#include "unit/support.hpp"
#include "wgc/engine.hpp"

using namespace wgc;
using namespace wgc::test;

namespace {

using OT = OperatorType;

// Red tank, chariot, infantry on the west; blue infantry close by, blue
// vehicles parked in the far corner.
Scenario skirmish(SubEnv subenv = SubEnv::standard) {
  return staged(subenv, 10, 10,
                {{OT::tank, at(2, 2)}, {OT::chariot, at(2, 3)}, {OT::infantry, at(1, 2)}},
                {{OT::tank, at(9, 9)}, {OT::chariot, at(9, 8)}, {OT::infantry, at(4, 2)}});
}

// A random legal action for every ready agent.
ActionMap random_legal(const GameState& s, Rng& rng) {
  ActionMap m;
  for (OperatorId id : ready_agents(s)) {
    std::vector<AgentAction> legal{AgentAction::stop()};
    for (int d = 0; d < kDirectionCount; ++d) {
      if (is_legal(s, id, AgentAction::move(d))) legal.push_back(AgentAction::move(d));
    }
    for (const auto& o : s.operators) {
      if (is_legal(s, id, AgentAction::shoot(o.id))) legal.push_back(AgentAction::shoot(o.id));
    }
    m[id] = legal[rng.below(legal.size())];
  }
  return m;
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("reset places every roster operator") {
  const GameState s = reset(builtin_scenario(SubEnv::standard, 0), 1);
  CHECK(s.operators.size() == 6);
  CHECK(s.tick == 0);
  CHECK(s.side_blood(Side::red) == doctest::Approx(25));
  CHECK(s.side_blood(Side::blue) == doctest::Approx(25));
  CHECK(ready_agents(s).size() == 6);
  for (const auto& o : s.operators) {
    CHECK(o.alive);
    CHECK(o.blood == o.tmpl.blood_max);
    CHECK(s.side_slots(o.side)[static_cast<std::size_t>(o.slot)] == o.id);
  }

  const GameState amac = reset(builtin_scenario(SubEnv::amac, 0), 1);
  CHECK(amac.operators.size() == 8);
  CHECK(amac.side_blood(Side::red) == doctest::Approx(43));
  CHECK(amac.side_blood(Side::blue) == doctest::Approx(25));
}

TEST_CASE("same seed and transcript give the same game") {
  for (const auto& sc : all_builtin_scenarios()) {
    if (sc.is_cmac()) continue;
    GameState a = reset(sc, 42), b = reset(sc, 42);
    Rng ra(7), rb(7);
    for (int t = 0; t < 80 && !a.outcome; ++t) {
      step(a, random_legal(a, ra));
      step(b, random_legal(b, rb));
    }
    CHECK(state_digest(a) == state_digest(b));
    CHECK(event_log_digest(a.events) == event_log_digest(b.events));
    CHECK(a.events == b.events);
  }
}

TEST_CASE("different seeds diverge") {
  const auto sc = skirmish();
  int differing = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GameState a = reset(sc, seed), b = reset(sc, seed + 100);
    ActionMap m = all_stop(a);
    m[0] = AgentAction::shoot(5);
    step(a, m);
    step(b, m);
    if (a.op(5).blood != b.op(5).blood) ++differing;
  }
  CHECK(differing > 0);
}

TEST_CASE("POAC infantry stays busy for its whole move") {
  GameState s = reset(builtin_scenario(SubEnv::poac, 0), 3);
  ActionMap m;
  for (OperatorId id : ready_agents(s)) {
    m[id] = AgentAction::stop();
    for (int d = 0; d < kDirectionCount; ++d) {
      if (is_legal(s, id, AgentAction::move(d))) {
        m[id] = AgentAction::move(d);
        break;
      }
    }
  }
  step(s, m);
  const OperatorId red_inf = 2;
  REQUIRE(s.op(red_inf).tmpl.type == OT::infantry);
  CHECK(s.op(red_inf).move_remaining == 4);
  CHECK(s.op(0).move_remaining == 0);
  for (int t = 0; t < 4; ++t) {
    const auto ready = ready_agents(s);
    CHECK(std::find(ready.begin(), ready.end(), red_inf) == ready.end());
    CHECK(is_legal(s, red_inf, AgentAction::noop()));
    CHECK_FALSE(is_legal(s, red_inf, AgentAction::stop()));
    step(s, all_stop(s));
  }
  const auto ready = ready_agents(s);
  CHECK(std::find(ready.begin(), ready.end(), red_inf) != ready.end());
  CHECK(s.op(red_inf).pos != s.scenario->red.entries[2].spawn);
}

TEST_CASE("continuous movement covers floor(T / move_ticks) hexes") {
  const auto sc = staged(SubEnv::poac, 40, 4, {{OT::tank, at(1, 1)}, {OT::chariot, at(1, 2)},
                                               {OT::infantry, at(1, 3)}},
                         {{OT::tank, at(38, 0)}, {OT::chariot, at(38, 1)}, {OT::infantry, at(38, 2)}});
  for (int T : {1, 4, 5, 9, 10, 23}) {
    GameState s = reset(sc, 0);
    for (int t = 0; t < T; ++t) {
      ActionMap m;
      for (OperatorId id : ready_agents(s)) {
        m[id] = s.op(id).side == Side::red ? AgentAction::move(0) : AgentAction::stop();
      }
      step(s, m);
    }
    CHECK(to_offset(s.op(0).pos).col == 1 + T);
    CHECK(to_offset(s.op(2).pos).col == 1 + T / 5);
  }
}

TEST_CASE("simultaneous moves into one hex: lower id wins") {
  const auto sc = staged(SubEnv::standard, 10, 10,
                         {{OT::tank, at(2, 2)}, {OT::chariot, at(0, 9)}, {OT::infantry, at(0, 8)}},
                         {{OT::tank, at(4, 2)}, {OT::chariot, at(9, 9)}, {OT::infantry, at(9, 8)}});
  GameState s = reset(sc, 0);
  ActionMap m = all_stop(s);
  m[0] = AgentAction::move(0);  // east into (3,2)
  m[3] = AgentAction::move(3);  // west into (3,2)
  step(s, m);
  CHECK(s.op(0).pos == at(3, 2));
  CHECK(s.op(3).pos == at(4, 2));
  const auto blocked = std::find_if(s.events.begin(), s.events.end(), [](const Event& e) {
    return e.kind == EventKind::nullified && e.reason == "move_blocked";
  });
  REQUIRE(blocked != s.events.end());
  CHECK(blocked->actor == 3);
  CHECK(ready_agents(s).size() == 6);
}

TEST_CASE("a move into a hex vacated the same tick succeeds") {
  const auto sc = staged(SubEnv::standard, 10, 10,
                         {{OT::tank, at(2, 2)}, {OT::chariot, at(3, 2)}, {OT::infantry, at(0, 8)}},
                         {{OT::tank, at(9, 2)}, {OT::chariot, at(9, 9)}, {OT::infantry, at(9, 8)}});
  GameState s = reset(sc, 0);
  ActionMap m = all_stop(s);
  CHECK_FALSE(is_legal(s, 0, AgentAction::move(0)));  // occupied at decision time
  m[1] = AgentAction::move(0);
  step(s, m);
  CHECK(s.op(1).pos == at(4, 2));
}

TEST_CASE("contract violations") {
  GameState s = reset(skirmish(), 0);
  SUBCASE("missing action") {
    ActionMap m = all_stop(s);
    m.erase(4);
    CHECK_THROWS_AS(step(s, m), ContractError);
  }
  SUBCASE("noop for a ready agent") {
    ActionMap m = all_stop(s);
    m[0] = AgentAction::noop();
    CHECK_THROWS_AS(step(s, m), ContractError);
  }
  SUBCASE("move off the map") {
    GameState edge = reset(staged(SubEnv::standard, 4, 4, {{OT::tank, at(0, 0)}, {OT::chariot, at(0, 1)},
                                                          {OT::infantry, at(0, 2)}},
                                  {{OT::tank, at(3, 0)}, {OT::chariot, at(3, 1)}, {OT::infantry, at(3, 2)}}),
                           0);
    ActionMap m = all_stop(edge);
    m[0] = AgentAction::move(3);
    try {
      step(edge, m);
      FAIL("accepted");
    } catch (const ContractError& e) {
      CHECK(e.agent() == 0);
      CHECK(e.action() == AgentAction::move(3));
    }
  }
  SUBCASE("shooting a friend or an unseen enemy") {
    ActionMap m = all_stop(s);
    m[0] = AgentAction::shoot(1);
    CHECK_THROWS_AS(step(s, m), ContractError);
    m[0] = AgentAction::shoot(3);  // blue tank far away
    CHECK_THROWS_AS(step(s, m), ContractError);
  }
  SUBCASE("a rejected step changes nothing") {
    const std::string before = state_digest(s);
    ActionMap m = all_stop(s);
    m[5] = AgentAction::shoot(4);
    CHECK_THROWS(step(s, m));
    CHECK(state_digest(s) == before);
  }
  SUBCASE("step after the end") {
    s.op(3).blood = 0;
    s.op(4).blood = 0;
    s.op(5).blood = 0;
    step(s, all_stop(s));
    REQUIRE(s.outcome == Outcome::red_win);
    CHECK(s.events.back().kind == EventKind::episode_end);
    CHECK(ready_agents(s).empty());
    CHECK_THROWS_AS(step(s, {}), ContractError);
  }
}

TEST_CASE("POAC chariot cannot shoot for two ticks after a move") {
  const auto sc = staged(SubEnv::poac, 10, 10,
                         {{OT::tank, at(0, 9)}, {OT::chariot, at(2, 2)}, {OT::infantry, at(0, 8)}},
                         {{OT::tank, at(9, 9)}, {OT::chariot, at(9, 8)}, {OT::infantry, at(5, 2)}});
  GameState s = reset(sc, 0);
  const OperatorId chariot = 1, target = 5;
  CHECK(is_legal(s, chariot, AgentAction::shoot(target)));
  ActionMap m = all_stop(s);
  m[chariot] = AgentAction::move(0);
  step(s, m);
  REQUIRE(s.op(chariot).pos == at(3, 2));
  CHECK(s.op(chariot).prep_remaining == 2);
  for (int t = 0; t < 2; ++t) {
    CHECK_FALSE(is_legal(s, chariot, AgentAction::shoot(target)));
    step(s, all_stop(s));
  }
  CHECK(is_legal(s, chariot, AgentAction::shoot(target)));
  m = all_stop(s);
  m[chariot] = AgentAction::shoot(target);
  step(s, m);
  CHECK(s.op(chariot).cooldown_remaining == 1);
  CHECK_FALSE(is_legal(s, chariot, AgentAction::shoot(target)));
  step(s, all_stop(s));
  CHECK(is_legal(s, chariot, AgentAction::shoot(target)));
}

TEST_CASE("termination rules") {
  const auto sc = skirmish();
  SUBCASE("blood comparison at the tick limit") {
    GameState s = reset(sc, 0);
    s.tick = sc.max_ticks - 1;
    s.op(0).blood = 9;
    step(s, all_stop(s));
    CHECK(s.tick == 600);
    CHECK(s.outcome == Outcome::blue_win);
  }
  SUBCASE("equal blood draws") {
    GameState s = reset(sc, 0);
    s.tick = sc.max_ticks - 1;
    s.op(0).blood -= 1e-12;
    step(s, all_stop(s));
    CHECK(s.outcome == Outcome::draw);
  }
  SUBCASE("one side wiped out") {
    GameState s = reset(sc, 0);
    for (OperatorId id : {0, 1, 2}) s.op(id).alive = false;
    CHECK(check_termination(s) == Outcome::blue_win);
    for (OperatorId id : {3, 4, 5}) s.op(id).alive = false;
    CHECK(check_termination(s) == Outcome::draw);
  }
  SUBCASE("no outcome before the limit") {
    GameState s = reset(sc, 0);
    s.op(0).blood = 1;
    CHECK_FALSE(check_termination(s).has_value());
  }
}

TEST_CASE("idle games last exactly max_ticks") {
  GameState s = reset(builtin_scenario(SubEnv::standard, 0), 0);
  int steps = 0;
  while (!s.outcome) {
    step(s, all_stop(s));
    ++steps;
  }
  CHECK(steps == 600);
  CHECK(s.outcome == Outcome::draw);
}

TEST_CASE("tank against a vehicle: mean damage") {
  const auto tank = builtin_template(SubEnv::standard, OT::tank);
  OperatorState target;
  target.tmpl = builtin_template(SubEnv::standard, OT::chariot);
  target.blood = target.tmpl.blood_max;
  target.alive = true;
  Rng rng(99);
  const int n = 100000;
  double total = 0;
  for (int i = 0; i < n; ++i) total += roll_attack(tank, target, 3, std::nullopt, rng).damage;
  CHECK(total / n == doctest::Approx(0.96).epsilon(0.02));
}

TEST_CASE("SRMAC annihilation rate and damage shape") {
  const CombatNoiseParams p;
  const auto tank = builtin_template(SubEnv::srmac, OT::tank);
  OperatorState target;
  target.tmpl = builtin_template(SubEnv::srmac, OT::chariot);
  target.blood = target.tmpl.blood_max / 2;
  target.alive = true;
  Rng rng(5);
  const int n = 100000;
  int annihilated = 0, nullified = 0;
  for (int i = 0; i < n; ++i) {
    const auto r = roll_attack(tank, target, 7, p, rng);
    if (r.kind == CombatRollKind::annihilate) {
      ++annihilated;
      CHECK(r.damage == target.blood);
    } else if (r.kind == CombatRollKind::nullify) {
      ++nullified;
    } else {
      // full range halves damage, half health gives 0.75
      REQUIRE(r.damage == doctest::Approx(1.2 * 0.5 * 0.75));
    }
  }
  CHECK(std::abs(annihilated / double(n) - 0.05) < 0.005);
  CHECK(std::abs(nullified / double(n) - 0.15) < 0.005);
}

TEST_CASE("a shot at a target killed earlier in the tick is nullified") {
  auto sc = skirmish();
  bool seen = false;
  for (std::uint64_t seed = 0; seed < 50 && !seen; ++seed) {
    GameState s = reset(sc, seed);
    s.op(5).blood = 0.1;
    ActionMap m = all_stop(s);
    m[0] = AgentAction::shoot(5);
    m[1] = AgentAction::shoot(5);
    GameState probe = s;
    step(s, m);
    std::vector<Event> outcomes;
    for (const auto& e : s.events) {
      if (e.kind == EventKind::damaged || e.kind == EventKind::nullified) outcomes.push_back(e);
    }
    REQUIRE(outcomes.size() == 2);
    if (outcomes[0].kind != EventKind::damaged) continue;
    seen = true;
    CHECK(outcomes[1].actor == 1);
    CHECK(outcomes[1].reason == "target_dead");
    CHECK_FALSE(s.op(5).alive);
    // Only the first shot drew from the stream.
    probe.rng.next();
    CHECK(probe.rng == s.rng);
  }
  CHECK(seen);
}

TEST_CASE("operators hit in a tick still fire") {
  auto sc = skirmish();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GameState s = reset(sc, seed);
    s.op(0).blood = 0.01;
    ActionMap m = all_stop(s);
    m[0] = AgentAction::shoot(5);
    m[5] = AgentAction::shoot(0);
    step(s, m);
    int shots = 0;
    for (const auto& e : s.events) shots += e.kind == EventKind::shot;
    CHECK(shots == 2);
  }
}

TEST_CASE("event json carries the kind's fields") {
  Event e;
  e.tick = 3;
  e.seq = 7;
  e.kind = EventKind::damaged;
  e.actor = 1;
  e.target = 4;
  e.amount = 1.5;
  e.blood_after = 6.5;
  const auto j = to_json(e);
  CHECK(j["kind"] == "damaged");
  CHECK(j["amount"] == 1.5);
  CHECK(j["tick"] == 3);
  CHECK_FALSE(j.contains("ids"));
}

}  // TEST_SUITE
