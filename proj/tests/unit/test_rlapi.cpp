#include "doctest.h"
#include "unit/support.hpp"
#include "wgc/rlapi.hpp"

using namespace wgc;
using namespace wgc::test;

namespace {

using OT = OperatorType;

Scenario near_contact() {
  return staged(SubEnv::standard, 10, 10,
                {{OT::tank, at(2, 2)}, {OT::chariot, at(2, 3)}, {OT::infantry, at(0, 0)}},
                {{OT::tank, at(9, 9)}, {OT::chariot, at(4, 2)}, {OT::infantry, at(9, 7)}});
}

// Random legal engine actions for every ready agent.
ActionMap random_actions(const GameState& s, Rng& rng) {
  ActionMap m;
  for (OperatorId id : ready_agents(s)) {
    const Side side = s.op(id).side;
    const auto layout = ActionLayout::for_side(*s.scenario, side);
    const auto mask = action_mask(s, id, layout);
    std::vector<int> legal;
    for (int i = 0; i < layout.width(); ++i) {
      if (mask[static_cast<std::size_t>(i)]) legal.push_back(i);
    }
    m[id] = *decode_action(s, side, legal[rng.below(legal.size())], layout);
  }
  return m;
}

}  // namespace

TEST_SUITE("rlapi") {

TEST_CASE("layout sizes") {
  const auto standard = builtin_scenario(SubEnv::standard, 0);
  const auto obs = ObsLayout::for_side(standard, Side::red);
  CHECK(obs.max_allies == 3);
  CHECK(obs.max_enemies == 3);
  CHECK(obs.own_width == 18);
  CHECK(obs.total == 18 * 3 + 8 * 3 + 1);
  CHECK(ActionLayout::for_side(standard, Side::red).width() == 11);
  CHECK(StateLayout::for_scenario(standard).total == 18 * 6 + 1);

  const auto amac = builtin_scenario(SubEnv::amac, 0);
  CHECK(ObsLayout::for_side(amac, Side::red).own_width == 12 + 2 * 3);
  CHECK(ObsLayout::for_side(amac, Side::blue).own_width == 12 + 2 * 5);
  CHECK(ActionLayout::for_side(amac, Side::blue).width() == 8 + 5);

  const auto cmac = builtin_scenario(SubEnv::cmac, 0);
  const auto cl = ActionLayout::for_side(cmac, Side::red);
  CHECK(cl.width() == 8 + 9 + 2 + 9);
  CHECK(cl.depolymerize_base() == 17);
  CHECK(cl.polymerize_base() == 19);
  CHECK(ObsLayout::for_side(cmac, Side::red).total == 30 * 9 + 8 * 9 + 1);
}

TEST_CASE("observation width never changes during a CMAC game") {
  const auto sc = builtin_scenario(SubEnv::cmac, 0);
  GameState s = reset(sc, 1);
  const auto obs = ObsLayout::for_side(sc, Side::red);
  Rng rng(3);
  for (int t = 0; t < 40 && !s.outcome; ++t) {
    for (OperatorId id : s.side_slots(Side::red)) {
      if (id != kNoOperator) CHECK(encode_observation(s, id, obs).size() == static_cast<std::size_t>(obs.total));
    }
    CHECK(make_frame(s, Side::red, 0).obs.size() == 9);
    step(s, random_actions(s, rng));
  }
}

TEST_CASE("features of one agent") {
  GameState s = reset(near_contact(), 0);
  const auto obs = ObsLayout::for_side(*s.scenario, Side::red);
  s.op(0).blood = 8.8;
  s.tick = 300;
  const auto o = encode_observation(s, 0, obs);
  CHECK(o[own_feature::color] == 0.0f);
  CHECK(o[own_feature::type + 0] == 1.0f);
  CHECK(o[own_feature::type + 1] == 0.0f);
  CHECK(o[own_feature::blood] == doctest::Approx(0.88));
  CHECK(o[static_cast<std::size_t>(obs.time_offset())] == doctest::Approx(0.5));
  CHECK(o[own_feature::col] == doctest::Approx(2.0 / 9));
  // Blue chariot (slot 1) is seen and in range; the others are not seen.
  CHECK(o[own_feature::observed + 0] == 0.0f);
  CHECK(o[own_feature::observed + 1] == 1.0f);
  CHECK(o[own_feature::observed + 3 + 1] == 1.0f);
  const auto e1 = static_cast<std::size_t>(obs.enemy_offset(1));
  CHECK(o[e1 + enemy_feature::color] == 1.0f);
  CHECK(o[e1 + enemy_feature::type + 1] == 1.0f);
  CHECK(o[e1 + enemy_feature::blood] == 1.0f);
  for (int k : {0, 2}) {
    for (int f = 0; f < enemy_feature::width; ++f) {
      CHECK(o[static_cast<std::size_t>(obs.enemy_offset(k) + f)] == 0.0f);
    }
  }
}

TEST_CASE("cold start: no enemy is visible on the built-in maps") {
  for (const auto& sc : all_builtin_scenarios()) {
    if (sc.index == 0) continue;  // small maps start within sight
    const GameState s = reset(sc, 0);
    const auto obs = ObsLayout::for_side(sc, Side::red);
    for (OperatorId id : s.side_slots(Side::red)) {
      if (id == kNoOperator) continue;
      const auto o = encode_observation(s, id, obs);
      for (int k = 0; k < obs.max_enemies; ++k)
        for (int f = 0; f < enemy_feature::width; ++f) {
          CHECK(o[static_cast<std::size_t>(obs.enemy_offset(k) + f)] == 0.0f);
        }
    }
  }
}

TEST_CASE("observations ignore what the agent cannot see") {
  GameState a = reset(near_contact(), 0);
  GameState b = a;
  // Wound and stall the unseen blue tank in one copy only.
  b.op(3).blood = 2;
  b.op(3).stop_remaining = 1;
  const auto obs = ObsLayout::for_side(*a.scenario, Side::red);
  CHECK(encode_observation(a, 0, obs) == encode_observation(b, 0, obs));
  CHECK(encode_state(a, StateLayout::for_scenario(*a.scenario)) !=
        encode_state(b, StateLayout::for_scenario(*b.scenario)));
}

TEST_CASE("dead and busy agents may only noop") {
  GameState s = reset(near_contact(), 0);
  const auto layout = ActionLayout::for_side(*s.scenario, Side::red);
  s.op(2).alive = false;
  auto mask = action_mask(s, 2, layout);
  CHECK(mask[0] == 1);
  CHECK(std::count(mask.begin(), mask.end(), 1) == 1);
  CHECK(encode_observation(s, 2, ObsLayout::for_side(*s.scenario, Side::red)) ==
        std::vector<float>(static_cast<std::size_t>(ObsLayout::for_side(*s.scenario, Side::red).total), 0.0f));

  s.op(0).stop_remaining = 1;
  mask = action_mask(s, 0, layout);
  CHECK(std::count(mask.begin(), mask.end(), 1) == 1);

  mask = action_mask(s, 1, layout);
  CHECK(mask[0] == 0);
  CHECK(mask[ActionLayout::kStop] == 1);
  CHECK(mask[ActionLayout::kShootBase + 1] == 1);
  CHECK(mask[ActionLayout::kShootBase + 0] == 0);
}

TEST_CASE("dense reward from blood differential") {
  GameState prev = reset(near_contact(), 0);
  GameState next = prev;
  next.op(4).blood -= 1.2;
  CHECK(compute_reward(prev, next, Side::red) == doctest::Approx(0.048));
  CHECK(compute_reward(prev, next, Side::blue) == doctest::Approx(-0.048));
  next.outcome = Outcome::red_win;
  CHECK(compute_reward(prev, next, Side::red) == doctest::Approx(1.048));
  CHECK(compute_reward(prev, next, Side::blue) == doctest::Approx(-1.048));
  next.outcome = Outcome::draw;
  CHECK(compute_reward(prev, next, Side::red) == doctest::Approx(0.048));
}

TEST_CASE("dense rewards telescope") {
  const auto sc = builtin_scenario(SubEnv::standard, 0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GameState s = reset(sc, seed);
    Rng rng(seed);
    double sum = 0, terminal = 0;
    while (!s.outcome) {
      const GameState prev = s;
      step(s, random_actions(s, rng));
      const double r = compute_reward(prev, s, Side::red);
      if (s.outcome) {
        const double dense = compute_reward(prev.side_blood(Side::red) - s.side_blood(Side::red),
                                            prev.side_blood(Side::blue) - s.side_blood(Side::blue),
                                            s, Side::red, false);
        terminal = r - dense;
        sum += dense;
      } else {
        sum += r;
      }
    }
    const double expected = ((25 - s.side_blood(Side::blue)) - (25 - s.side_blood(Side::red))) / 25;
    CHECK(sum == doctest::Approx(expected));
    CHECK((std::abs(terminal) < 1e-9 || std::abs(std::abs(terminal) - 1.0) < 1e-9));
  }
}

TEST_CASE("index encoding round trips") {
  for (const auto& sc : {builtin_scenario(SubEnv::standard, 0), builtin_scenario(SubEnv::cmac, 0),
                         builtin_scenario(SubEnv::amac, 0)}) {
    GameState s = reset(sc, 2);
    Rng rng(4);
    for (int t = 0; t < 30 && !s.outcome; ++t) {
      for (OperatorId id : ready_agents(s)) {
        const Side side = s.op(id).side;
        const auto layout = ActionLayout::for_side(sc, side);
        const auto mask = action_mask(s, id, layout);
        for (int i = 0; i < layout.width(); ++i) {
          if (!mask[static_cast<std::size_t>(i)]) continue;
          const auto a = decode_action(s, side, i, layout);
          REQUIRE(a);
          CHECK(encode_action(s, side, *a, layout) == i);
        }
      }
      step(s, random_actions(s, rng));
    }
  }
}

TEST_CASE("side decoding") {
  GameState s = reset(near_contact(), 0);
  const int stop = ActionLayout::kStop;
  const std::vector<int> ok{stop, ActionLayout::kShootBase + 1, stop};
  const ActionMap m = decode_side_actions(s, Side::red, ok);
  CHECK(m.at(1) == AgentAction::shoot(4));
  CHECK_THROWS_AS(decode_side_actions(s, Side::red, std::vector<int>{stop, stop}), ActionIndexError);
  try {
    decode_side_actions(s, Side::red, std::vector<int>{stop, ActionLayout::kShootBase + 0, stop});
    FAIL("accepted");
  } catch (const ActionIndexError& e) {
    CHECK(e.slot() == 1);
    CHECK(e.agent() == 1);
  }
  s.op(2).stop_remaining = 1;
  CHECK_THROWS_AS(decode_side_actions(s, Side::red, ok), ActionIndexError);
  const auto busy = decode_side_actions(s, Side::red, std::vector<int>{stop, stop, 0});
  CHECK_FALSE(busy.contains(2));
}

TEST_CASE("every feature stays in [0, 1]") {
  for (const auto& sc : all_builtin_scenarios()) {
    GameState s = reset(sc, 9);
    Rng rng(9);
    const auto state_layout = StateLayout::for_scenario(sc);
    for (int t = 0; t < 120 && !s.outcome; ++t) {
      for (Side side : {Side::red, Side::blue}) {
        const auto f = make_frame(s, side, 0);
        for (const auto& o : f.obs)
          for (float v : o) REQUIRE((v >= 0.0f && v <= 1.0f));
      }
      for (float v : encode_state(s, state_layout)) REQUIRE((v >= 0.0f && v <= 1.0f));
      step(s, random_actions(s, rng));
    }
  }
}

TEST_CASE("frame json") {
  const GameState s = reset(builtin_scenario(SubEnv::poac, 0), 0);
  const auto j = to_json(make_frame(s, Side::blue, 0.25));
  CHECK(j["side"] == "blue");
  CHECK(j["obs"].size() == 3);
  CHECK(j["avail_actions"][0].size() == 11);
  CHECK(j["reward"] == 0.25);
  CHECK(j["terminated"] == false);
  CHECK(j["outcome"].is_null());
}

TEST_CASE("side view lists only visible enemies") {
  const GameState s = reset(near_contact(), 0);
  const SideView v = observe_side(s, Side::red);
  // The chariot sees the blue tank at exactly its observed distance; nobody sees the infantry.
  REQUIRE(v.visible_enemies.size() == 2);
  CHECK(v.enemy_in_slot(0) != nullptr);
  CHECK(v.enemy_in_slot(1) != nullptr);
  CHECK(v.enemy_in_slot(2) == nullptr);
  CHECK_FALSE(is_visible(s.op(0), s.op(3), s.map()));
  CHECK(is_visible(s.op(1), s.op(3), s.map()));
  CHECK(v.allies.size() == 3);
  CHECK(v.masks.size() == 3);
}

}  // TEST_SUITE
