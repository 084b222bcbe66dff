#include "wgc/bots.hpp"

#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>

namespace wgc {

namespace {

bool legal(const SideView& v, int slot, int index) {
  return v.masks[static_cast<std::size_t>(slot)][static_cast<std::size_t>(index)] != 0;
}

bool acting(const SideView& v, int slot) {
  const AllyInfo& a = v.allies[static_cast<std::size_t>(slot)];
  return a.id != kNoOperator && a.ready && !v.outcome;
}

// Legal shoot at the visible enemy with the lowest remaining blood; ties go to
// the lowest slot.
std::optional<int> pick_shot(const SideView& v, int slot) {
  std::optional<int> best;
  double best_blood = std::numeric_limits<double>::infinity();
  for (int k = 0; k < v.layout.max_enemies; ++k) {
    const int index = ActionLayout::kShootBase + k;
    if (!legal(v, slot, index)) continue;
    const EnemyInfo* e = v.enemy_in_slot(k);
    const double blood = e ? e->blood : std::numeric_limits<double>::max();
    if (blood < best_blood) {
      best_blood = blood;
      best = index;
    }
  }
  return best;
}

// Legal move that strictly lowers `cost`, choosing the lowest resulting cost
// (ties: lowest direction index).
std::optional<int> pick_move(const SideView& v, int slot,
                             const std::function<double(HexCoord)>& cost) {
  const AllyInfo& a = v.allies[static_cast<std::size_t>(slot)];
  const double here = cost(a.pos);
  std::optional<int> best;
  double best_cost = here;
  for (int d = 0; d < kDirectionCount; ++d) {
    const int index = ActionLayout::kMoveBase + d;
    if (!legal(v, slot, index)) continue;
    const double c = cost(neighbor(a.pos, d));
    if (c < best_cost - 1e-12) {
      best_cost = c;
      best = index;
    }
  }
  return best;
}

// Step counts to `goal` over cells not held by other allies, indexed by
// row * width + col; -1 where unreachable.
std::vector<int> path_lengths(const SideView& v, int slot, HexCoord goal) {
  const GameMap& map = *v.map;
  auto at = [&](HexCoord h) {
    const OffsetCoord o = to_offset(h);
    return static_cast<std::size_t>(o.row * map.width() + o.col);
  };
  std::vector<int> dist(static_cast<std::size_t>(map.width() * map.height()), -1);
  for (const auto& a : v.allies) {
    if (a.alive && a.slot != slot) dist[at(a.pos)] = -2;
  }
  dist[at(goal)] = 0;
  std::deque<HexCoord> queue{goal};
  while (!queue.empty()) {
    const HexCoord h = queue.front();
    queue.pop_front();
    for (int d = 0; d < kDirectionCount; ++d) {
      const HexCoord n = neighbor(h, d);
      if (!map.contains(n) || dist[at(n)] != -1) continue;
      dist[at(n)] = dist[at(h)] + 1;
      queue.push_back(n);
    }
  }
  return dist;
}

int idle_index(const SideView& v, int slot) {
  return acting(v, slot) ? ActionLayout::kStop : ActionLayout::kNoop;
}

class Kai0 final : public Policy {
 public:
  std::string_view name() const override { return "kai0"; }
  std::string_view version() const override { return "kai0-v1"; }

  std::vector<int> act(const SideView& v) override {
    std::vector<int> out;
    for (int slot = 0; slot < static_cast<int>(v.allies.size()); ++slot) {
      if (!acting(v, slot)) {
        out.push_back(ActionLayout::kNoop);
        continue;
      }
      if (auto shot = pick_shot(v, slot)) {
        out.push_back(*shot);
        continue;
      }
      const GameMap& map = *v.map;
      auto move = pick_move(v, slot, [&](HexCoord h) { return map.center_distance(h); });
      out.push_back(move ? *move : ActionLayout::kStop);
    }
    return out;
  }
};

class Kai1 final : public Policy {
 public:
  std::string_view name() const override { return "kai1"; }
  std::string_view version() const override { return "kai1-v1"; }

  std::vector<int> act(const SideView& v) override {
    if (goals_.empty()) assign_goals(v);
    std::vector<int> out;
    for (int slot = 0; slot < static_cast<int>(v.allies.size()); ++slot) {
      if (!acting(v, slot)) {
        out.push_back(ActionLayout::kNoop);
        continue;
      }
      if (auto shot = pick_shot(v, slot)) {
        out.push_back(*shot);
        continue;
      }
      const AllyInfo& a = v.allies[static_cast<std::size_t>(slot)];
      auto goal = goals_.find(a.id);
      if (goal == goals_.end()) {
        out.push_back(ActionLayout::kStop);
        continue;
      }
      // Route around allies; cells cut off from the goal fall back to straight-line distance.
      const HexCoord target = goal->second;
      const auto paths = path_lengths(v, slot, target);
      auto move = pick_move(v, slot, [&](HexCoord h) {
        const OffsetCoord o = to_offset(h);
        const int d = v.map->contains(h) ? paths[static_cast<std::size_t>(o.row * v.map->width() + o.col)] : -1;
        return d >= 0 ? d : 1e6 + hex_distance(h, target);
      });
      out.push_back(move ? *move : ActionLayout::kStop);
    }
    return out;
  }

 private:
  void assign_goals(const SideView& v) {
    const GameMap& map = *v.map;
    const int w = map.width();
    auto in_band = [&](HexCoord h) {
      const int col = to_offset(h).col;
      return col >= w / 3 && col < w - w / 3;
    };
    std::vector<HexCoord> hidden;
    std::set<HexCoord> hidden_set;
    for (HexCoord h : map.cells()) {
      if (map.terrain(h) == Terrain::hidden && in_band(h)) {
        hidden.push_back(h);
        hidden_set.insert(h);
      }
    }
    std::vector<HexCoord> cover;  // open cells bordering band terrain
    for (HexCoord h : map.cells()) {
      if (map.terrain(h) != Terrain::open) continue;
      for (HexCoord n : map.neighbors(h)) {
        if (hidden_set.contains(n)) {
          cover.push_back(h);
          break;
        }
      }
    }

    std::set<HexCoord> claimed;
    auto nearest = [&](HexCoord from, const std::vector<HexCoord>& pool) -> std::optional<HexCoord> {
      std::optional<HexCoord> best;
      int best_d = std::numeric_limits<int>::max();
      for (HexCoord h : pool) {
        if (claimed.contains(h)) continue;
        const int d = hex_distance(from, h);
        if (d < best_d) {
          best_d = d;
          best = h;
        }
      }
      return best;
    };

    // Infantry picks first so it gets the terrain; vehicles hold beside it.
    std::vector<const AllyInfo*> order;
    for (const auto& a : v.allies) {
      if (a.id != kNoOperator && a.type == OperatorType::infantry) order.push_back(&a);
    }
    for (const auto& a : v.allies) {
      if (a.id != kNoOperator && a.type != OperatorType::infantry) order.push_back(&a);
    }
    for (const AllyInfo* a : order) {
      std::optional<HexCoord> goal;
      if (!hidden.empty()) {
        goal = a->type == OperatorType::infantry ? nearest(a->pos, hidden) : nearest(a->pos, cover);
        if (!goal) goal = nearest(a->pos, a->type == OperatorType::infantry ? cover : hidden);
      } else {
        // No terrain: hold a line one third of the way across.
        const int depth = (w - 1) / 3;
        const int col = v.side == Side::red ? depth : w - 1 - depth;
        goal = from_offset({col, to_offset(a->pos).row});
        if (!map.contains(*goal) || claimed.contains(*goal)) goal.reset();
      }
      if (goal) {
        claimed.insert(*goal);
        goals_[a->id] = *goal;
      }
    }
  }

  std::map<OperatorId, HexCoord> goals_;
};

class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}

  std::string_view name() const override { return "random"; }
  std::string_view version() const override { return "random-v1"; }

  std::vector<int> act(const SideView& v) override {
    std::vector<int> out;
    for (const auto& mask : v.masks) {
      std::vector<int> options;
      for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) options.push_back(static_cast<int>(i));
      }
      if (options.size() <= 1) {
        out.push_back(options.empty() ? ActionLayout::kNoop : options.front());
        continue;
      }
      out.push_back(options[static_cast<std::size_t>(rng_.below(options.size()))]);
    }
    return out;
  }

 private:
  Rng rng_;
};

class IdlePolicy final : public Policy {
 public:
  std::string_view name() const override { return "idle"; }
  std::string_view version() const override { return "idle-v1"; }

  std::vector<int> act(const SideView& v) override {
    std::vector<int> out;
    for (int slot = 0; slot < static_cast<int>(v.allies.size()); ++slot) {
      out.push_back(idle_index(v, slot));
    }
    return out;
  }
};

}  // namespace

const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names{"kai0", "kai1", "random", "idle"};
  return names;
}

bool policy_supports(std::string_view name, const Scenario& scenario) {
  return !(name == "kai1" && scenario.is_cmac());
}

std::unique_ptr<Policy> make_policy(std::string_view name, const Scenario& scenario, Side,
                                    std::uint64_t seed) {
  if (!policy_supports(name, scenario)) {
    throw ConfigError("policy '" + std::string(name) + "' cannot play " + scenario.id() +
                      " (kai1 is not available in CMAC)");
  }
  if (name == "kai0") return std::make_unique<Kai0>();
  if (name == "kai1") return std::make_unique<Kai1>();
  if (name == "random") return std::make_unique<RandomPolicy>(seed);
  if (name == "idle") return std::make_unique<IdlePolicy>();
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

}  // namespace wgc
