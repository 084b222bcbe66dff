#include <algorithm>

#include "engine_internal.hpp"

namespace wgc {

CombatRoll roll_attack(const OperatorTemplate& attacker, const OperatorState& target,
                       int distance, const std::optional<CombatNoiseParams>& noise, Rng& rng) {
  const TargetClass cls = target_class(target.tmpl.type);
  const double u = rng.uniform();
  if (!noise) {
    if (u < attacker.hit_probability(cls)) return {CombatRollKind::hit, attacker.damage(cls)};
    return {CombatRollKind::miss, 0.0};
  }
  const CombatNoiseParams& p = *noise;
  if (u < p.p_annihilate) return {CombatRollKind::annihilate, target.blood};
  if (u < p.p_annihilate + p.p_nullify) return {CombatRollKind::nullify, 0.0};
  const double range = attacker.attacked_distance;
  const double distance_factor =
      range > 0 ? 1.0 - p.dist_falloff * std::clamp(distance / range, 0.0, 1.0) : 1.0;
  const double health =
      target.tmpl.blood_max > 0 ? std::clamp(target.blood / target.tmpl.blood_max, 0.0, 1.0) : 0.0;
  const double health_factor = p.health_floor + (1.0 - p.health_floor) * health;
  return {CombatRollKind::hit, attacker.damage(cls) * distance_factor * health_factor};
}

namespace detail {

Event resolve_shot(GameState& s, OperatorId attacker, OperatorId target, int tick) {
  {
    Event& shot = emit(s, tick, EventKind::shot);
    shot.actor = attacker;
    shot.target = target;
  }
  OperatorState& victim = s.op(target);
  if (victim.blood <= 0) {
    Event& e = emit(s, tick, EventKind::nullified);
    e.actor = attacker;
    e.target = target;
    e.reason = "target_dead";
    return e;
  }
  const OperatorState& shooter = s.op(attacker);
  const int distance = hex_distance(shooter.pos, victim.pos);
  const CombatRoll roll = roll_attack(shooter.tmpl, victim, distance, s.scenario->srmac, s.rng);
  switch (roll.kind) {
    case CombatRollKind::miss:
    case CombatRollKind::nullify: {
      Event& e = emit(s, tick, EventKind::nullified);
      e.actor = attacker;
      e.target = target;
      e.reason = roll.kind == CombatRollKind::miss ? "miss" : "no_effect";
      return e;
    }
    case CombatRollKind::annihilate:
    case CombatRollKind::hit: {
      const double before = victim.blood;
      victim.blood = roll.kind == CombatRollKind::annihilate
                         ? 0.0
                         : std::max(0.0, victim.blood - roll.damage);
      Event& e = emit(s, tick,
                      roll.kind == CombatRollKind::annihilate ? EventKind::annihilated
                                                              : EventKind::damaged);
      e.actor = attacker;
      e.target = target;
      e.amount = before - victim.blood;
      e.blood_after = victim.blood;
      return e;
    }
  }
  return s.events.back();
}

}  // namespace detail

Event resolve_attack(GameState& s, OperatorId attacker, OperatorId target) {
  const AgentAction action = AgentAction::shoot(target);
  if (!s.valid_id(attacker)) throw ContractError(attacker, action, "unknown attacker");
  if (!s.valid_id(target)) throw ContractError(attacker, action, "unknown target");
  const OperatorState& a = s.op(attacker);
  const OperatorState& t = s.op(target);
  if (!a.alive) throw ContractError(attacker, action, "attacker is not alive");
  if (!t.alive || t.blood <= 0) throw ContractError(attacker, action, "target is not alive");
  if (a.side == t.side) throw ContractError(attacker, action, "target is not an enemy");
  if (!is_visible(a, t, s.map())) throw ContractError(attacker, action, "target is not visible");
  if (!in_attack_range(a, t)) throw ContractError(attacker, action, "target is out of range");
  if (!a.can_shoot()) throw ContractError(attacker, action, "attacker cannot shoot yet");
  return detail::resolve_shot(s, attacker, target, s.tick);
}

}  // namespace wgc
