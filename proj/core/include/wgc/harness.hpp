#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "wgc/bots.hpp"
#include "wgc/engine.hpp"
#include "wgc/replay.hpp"

namespace wgc {

struct MatchSeeds {
  std::uint64_t engine = 0;
  std::uint64_t red_bot = 0;
  std::uint64_t blue_bot = 0;

  // engine/red/blue streams split from one base seed.
  static MatchSeeds derive(std::uint64_t base);

  friend bool operator==(const MatchSeeds&, const MatchSeeds&) = default;
};

struct MatchResult {
  Outcome outcome = Outcome::draw;
  int episode_ticks = 0;
  double red_blood = 0;
  double blue_blood = 0;
  MatchSeeds seeds;
  std::string replay_digest;
  std::string event_digest;

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

struct MatchRun {
  MatchResult result;
  std::string replay;
};

// Drives both policies to termination. Throws ConfigError for unsupported
// policy/scenario pairs and ContractError if a policy emits an illegal index.
MatchRun run_match(const Scenario& scenario, const std::string& red_policy,
                   const std::string& blue_policy, const MatchSeeds& seeds);
MatchResult run_match(const Scenario& scenario, const std::string& red_policy,
                      const std::string& blue_policy, const MatchSeeds& seeds,
                      const std::filesystem::path& replay_path);

// 95% Wilson score interval for k successes in n trials.
std::pair<double, double> wilson_interval(int successes, int trials, double z = 1.96);

struct MatrixCell {
  std::string red;
  std::string blue;
  int games = 0;  // completed games
  int red_wins = 0;
  int blue_wins = 0;
  int draws = 0;
  double mean_ticks = 0;
  std::pair<double, double> win_interval{0, 0};
  std::vector<std::string> failures;

  double win_rate() const { return games ? static_cast<double>(red_wins) / games : 0.0; }
  double draw_rate() const { return games ? static_cast<double>(draws) / games : 0.0; }
  double loss_rate() const { return games ? static_cast<double>(blue_wins) / games : 0.0; }

  friend bool operator==(const MatrixCell&, const MatrixCell&) = default;
};

struct Matrix {
  std::string scenario_id;
  std::vector<std::string> policies;
  int n_games = 0;
  std::uint64_t base_seed = 0;
  std::vector<MatrixCell> cells;  // row-major: red policy x blue policy

  const MatrixCell& cell(const std::string& red, const std::string& blue) const;
  int failed_games() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// Game g of every cell uses MatchSeeds::derive(base_seed + g). The result does
// not depend on `parallelism`. Per-game failures are recorded in the cell.
Matrix evaluate_matrix(const Scenario& scenario, const std::vector<std::string>& policies,
                       int n_games, std::uint64_t base_seed, int parallelism = 1,
                       const std::optional<std::filesystem::path>& replay_dir = std::nullopt);

nlohmann::ordered_json to_json(const Matrix& matrix);

// Plays (a red, b blue) and (b red, a blue) on the same seeds and checks that
// a's win rate transposes within a 95% two-proportion bound.
struct MirrorReport {
  MatrixCell forward;
  MatrixCell swapped;
  double difference = 0;  // forward red win rate - swapped blue win rate
  double bound = 0;
  bool within_bound = false;
};

MirrorReport mirror_check(const Scenario& scenario, const std::string& a, const std::string& b,
                          int n_games, std::uint64_t base_seed, int parallelism = 1);

}  // namespace wgc
