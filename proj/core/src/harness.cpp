#include "wgc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace wgc {

MatchSeeds MatchSeeds::derive(std::uint64_t base) {
  return MatchSeeds{mix_seed(base, 0), mix_seed(base, 1), mix_seed(base, 2)};
}

MatchRun run_match(const Scenario& scenario, const std::string& red_policy,
                   const std::string& blue_policy, const MatchSeeds& seeds) {
  auto shared = std::make_shared<const Scenario>(scenario);
  std::unique_ptr<Policy> policies[2] = {
      make_policy(red_policy, scenario, Side::red, seeds.red_bot),
      make_policy(blue_policy, scenario, Side::blue, seeds.blue_bot)};

  GameState state = reset(shared, seeds.engine);

  ReplayHeader header;
  header.scenario_document = save_scenario(scenario);
  header.seed = seeds.engine;
  header.red_policy = std::string(policies[0]->version());
  header.blue_policy = std::string(policies[1]->version());
  header.red_seed = seeds.red_bot;
  header.blue_seed = seeds.blue_bot;
  ReplayWriter writer(header);

  while (!state.outcome) {
    ActionMap actions;
    for (Side side : {Side::red, Side::blue}) {
      const std::vector<int> picks = policies[side_index(side)]->act(observe_side(state, side));
      try {
        actions.merge(decode_side_actions(state, side, picks));
      } catch (const ActionIndexError& e) {
        throw ContractError(e.agent(), AgentAction::noop(),
                            std::string(to_string(side)) + " policy: " + e.what());
      }
    }
    writer.actions(state.tick, actions);
    const std::size_t before = state.events.size();
    step(state, actions);
    writer.events(std::span<const Event>(state.events).subspan(before));
  }
  writer.finish(state);

  MatchRun run;
  run.result.outcome = *state.outcome;
  run.result.episode_ticks = state.tick;
  run.result.red_blood = state.side_blood(Side::red);
  run.result.blue_blood = state.side_blood(Side::blue);
  run.result.seeds = seeds;
  run.result.event_digest = event_log_digest(state.events);
  run.result.replay_digest = sha256_hex(writer.text());
  run.replay = writer.text();
  return run;
}

MatchResult run_match(const Scenario& scenario, const std::string& red_policy,
                      const std::string& blue_policy, const MatchSeeds& seeds,
                      const std::filesystem::path& replay_path) {
  MatchRun run = run_match(scenario, red_policy, blue_policy, seeds);
  if (replay_path.has_parent_path()) std::filesystem::create_directories(replay_path.parent_path());
  std::ofstream out(replay_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write replay " + replay_path.string());
  out << run.replay;
  return run.result;
}

std::pair<double, double> wilson_interval(int successes, int trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = trials;
  const double p = successes / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double centre = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

const MatrixCell& Matrix::cell(const std::string& red, const std::string& blue) const {
  for (const auto& c : cells) {
    if (c.red == red && c.blue == blue) return c;
  }
  throw std::out_of_range("no matrix cell " + red + " vs " + blue);
}

int Matrix::failed_games() const {
  int n = 0;
  for (const auto& c : cells) n += static_cast<int>(c.failures.size());
  return n;
}

namespace {

struct GameSlot {
  std::optional<MatchResult> result;
  std::string failure;
};

}  // namespace

Matrix evaluate_matrix(const Scenario& scenario, const std::vector<std::string>& policies,
                       int n_games, std::uint64_t base_seed, int parallelism,
                       const std::optional<std::filesystem::path>& replay_dir) {
  if (n_games < 0) throw std::invalid_argument("n_games must be non-negative");
  for (const auto& p : policies) {
    if (std::find(policy_names().begin(), policy_names().end(), p) == policy_names().end()) {
      throw ConfigError("unknown policy '" + p + "'");
    }
  }

  Matrix m;
  m.scenario_id = scenario.id();
  m.policies = policies;
  m.n_games = n_games;
  m.base_seed = base_seed;

  const std::size_t np = policies.size();
  const std::size_t jobs = np * np * static_cast<std::size_t>(n_games);
  std::vector<GameSlot> slots(jobs);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t cell = j / static_cast<std::size_t>(n_games);
      const int g = static_cast<int>(j % static_cast<std::size_t>(n_games));
      const std::string& red = policies[cell / np];
      const std::string& blue = policies[cell % np];
      try {
        const MatchSeeds seeds = MatchSeeds::derive(base_seed + static_cast<std::uint64_t>(g));
        if (replay_dir) {
          const auto path = *replay_dir / (red + "_vs_" + blue + "_g" + std::to_string(g) + ".ndjson");
          slots[j].result = run_match(scenario, red, blue, seeds, path);
        } else {
          slots[j].result = run_match(scenario, red, blue, seeds).result;
        }
      } catch (const std::exception& e) {
        slots[j].failure = "game " + std::to_string(g) + ": " + e.what();
      }
    }
  };

  const int threads = std::clamp(parallelism, 1, static_cast<int>(std::max<std::size_t>(jobs, 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t cell = 0; cell < np * np; ++cell) {
    MatrixCell c;
    c.red = policies[cell / np];
    c.blue = policies[cell % np];
    long total_ticks = 0;
    for (int g = 0; g < n_games; ++g) {
      const GameSlot& s = slots[cell * static_cast<std::size_t>(n_games) + static_cast<std::size_t>(g)];
      if (!s.result) {
        c.failures.push_back(s.failure);
        continue;
      }
      ++c.games;
      total_ticks += s.result->episode_ticks;
      switch (s.result->outcome) {
        case Outcome::red_win: ++c.red_wins; break;
        case Outcome::blue_win: ++c.blue_wins; break;
        case Outcome::draw: ++c.draws; break;
      }
    }
    c.mean_ticks = c.games ? static_cast<double>(total_ticks) / c.games : 0.0;
    c.win_interval = wilson_interval(c.red_wins, c.games);
    m.cells.push_back(std::move(c));
  }
  return m;
}

nlohmann::ordered_json to_json(const Matrix& m) {
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& c : m.cells) {
    cells.push_back({{"red", c.red},
                     {"blue", c.blue},
                     {"games", c.games},
                     {"red_wins", c.red_wins},
                     {"blue_wins", c.blue_wins},
                     {"draws", c.draws},
                     {"win_rate", c.win_rate()},
                     {"draw_rate", c.draw_rate()},
                     {"loss_rate", c.loss_rate()},
                     {"win_ci95", {c.win_interval.first, c.win_interval.second}},
                     {"mean_ticks", c.mean_ticks},
                     {"failures", c.failures}});
  }
  return {{"scenario", m.scenario_id},
          {"policies", m.policies},
          {"n_games", m.n_games},
          {"base_seed", m.base_seed},
          {"failed_games", m.failed_games()},
          {"cells", std::move(cells)}};
}

MirrorReport mirror_check(const Scenario& scenario, const std::string& a, const std::string& b,
                          int n_games, std::uint64_t base_seed, int parallelism) {
  MirrorReport r;
  const Matrix m = evaluate_matrix(scenario, a == b ? std::vector{a} : std::vector{a, b}, n_games,
                                   base_seed, parallelism);
  r.forward = m.cell(a, b);
  r.swapped = m.cell(b, a);
  const int n1 = r.forward.games;
  const int n2 = r.swapped.games;
  if (n1 == 0 || n2 == 0) return r;
  const double p1 = r.forward.win_rate();
  const double p2 = r.swapped.loss_rate();
  r.difference = p1 - p2;
  // Two-proportion z test with the pooled rate.
  const double pooled = (r.forward.red_wins + r.swapped.blue_wins) / static_cast<double>(n1 + n2);
  r.bound = 1.96 * std::sqrt(pooled * (1 - pooled) * (1.0 / n1 + 1.0 / n2));
  r.within_bound = std::abs(r.difference) <= r.bound + 1e-12;
  return r;
}

}  // namespace wgc
