// wgc: run games, evaluate bot matrices, verify replays, serve sessions.

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wgc/harness.hpp"
#include "wgc/protocol.hpp"
#include "wgc/service.hpp"

namespace {

std::atomic<bool> g_stop{false};
wgc::HttpService* g_http = nullptr;

void on_signal(int) {
  g_stop = true;
  if (g_http) g_http->stop();
}

wgc::Scenario pick_scenario(const std::string& subenv, int index, const std::string& file) {
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file);
    std::ostringstream buf;
    buf << in.rdbuf();
    return wgc::load_scenario(buf.str(), std::filesystem::path(file).parent_path());
  }
  const auto s = wgc::parse_subenv(subenv);
  if (!s) throw std::runtime_error("unknown subenv '" + subenv + "'");
  return wgc::builtin_scenario(*s, index);
}

std::vector<std::string> default_policies(const wgc::Scenario& scenario) {
  std::vector<std::string> out;
  for (const char* p : {"kai0", "kai1"}) {
    if (wgc::policy_supports(p, scenario)) out.emplace_back(p);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wgc: hex wargame simulation engine"};
  app.require_subcommand(1);

  std::string subenv = "standard";
  int index = 0;
  std::string scenario_file;
  auto add_scenario_opts = [&](CLI::App* cmd) {
    cmd->add_option("--subenv", subenv, "standard, poac, cmac, amac or srmac");
    cmd->add_option("--index", index, "0 small, 1 medium, 2 large")->check(CLI::Range(0, 2));
    cmd->add_option("--scenario", scenario_file, "scenario document (overrides --subenv/--index)");
  };

  // run
  auto* run = app.add_subcommand("run", "play one game");
  add_scenario_opts(run);
  std::string red = "kai0", blue = "kai0", replay_path;
  std::uint64_t seed = 0;
  run->add_option("--red", red, "red policy");
  run->add_option("--blue", blue, "blue policy");
  run->add_option("--seed", seed, "base seed");
  run->add_option("--replay", replay_path, "write the replay here");

  // matrix
  auto* matrix = app.add_subcommand("matrix", "win-rate matrix over seeded games");
  add_scenario_opts(matrix);
  int games = 100;
  int jobs = 1;
  std::string out_path, replay_dir;
  std::vector<std::string> policies;
  matrix->add_option("--games", games, "games per cell")->check(CLI::PositiveNumber);
  matrix->add_option("--seed", seed, "base seed");
  matrix->add_option("--out", out_path, "write the matrix JSON here (default stdout)");
  matrix->add_option("--policies", policies, "policies to cross (default kai0 kai1)")->delimiter(',');
  matrix->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  matrix->add_option("--replay-dir", replay_dir, "write every game's replay here");

  // verify
  auto* verify = app.add_subcommand("verify", "re-simulate a replay and compare every event");
  std::string verify_path;
  verify->add_option("replay", verify_path, "replay file")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP game service");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string serve_replays = "replays";
  serve->add_option("--port", port, "port (0 picks one)");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--replay-dir", serve_replays, "where finished games are stored");

  // protocol
  auto* protocol = app.add_subcommand("protocol", "step protocol for external trainers");
  bool use_stdio = false;
  int protocol_port = -1;
  auto* stdio_flag = protocol->add_flag("--stdio", use_stdio, "serve on stdin/stdout");
  auto* port_opt = protocol->add_option("--port", protocol_port, "serve on 127.0.0.1:<port>");
  stdio_flag->excludes(port_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const wgc::Scenario sc = pick_scenario(subenv, index, scenario_file);
      const auto seeds = wgc::MatchSeeds::derive(seed);
      const auto match = wgc::run_match(sc, red, blue, seeds);
      if (!replay_path.empty()) {
        std::ofstream out(replay_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + replay_path);
        out << match.replay;
      }
      const auto& r = match.result;
      nlohmann::ordered_json j{{"scenario", sc.id()},
                               {"red", red},
                               {"blue", blue},
                               {"seed", seed},
                               {"outcome", wgc::to_string(r.outcome)},
                               {"ticks", r.episode_ticks},
                               {"red_blood", r.red_blood},
                               {"blue_blood", r.blue_blood},
                               {"event_digest", r.event_digest},
                               {"replay_digest", r.replay_digest}};
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*matrix) {
      const wgc::Scenario sc = pick_scenario(subenv, index, scenario_file);
      if (policies.empty()) policies = default_policies(sc);
      std::optional<std::filesystem::path> dir;
      if (!replay_dir.empty()) dir = replay_dir;
      const wgc::Matrix m = wgc::evaluate_matrix(sc, policies, games, seed, jobs, dir);
      const std::string text = wgc::to_json(m).dump(2) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << text;
      }
      for (const auto& c : m.cells) {
        std::cerr << c.red << " vs " << c.blue << ": win " << c.win_rate() << " draw "
                  << c.draw_rate() << " loss " << c.loss_rate() << " ticks " << c.mean_ticks
                  << (c.failures.empty() ? "" : "  FAILURES: " + std::to_string(c.failures.size()))
                  << '\n';
      }
      return m.failed_games() == 0 ? 0 : 1;
    }

    if (*verify) {
      std::ifstream in(verify_path, std::ios::binary);
      if (!in) throw std::runtime_error("cannot read " + verify_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      const wgc::VerifyReport rep = wgc::verify_replay(buf.str());
      std::cout << wgc::to_string(rep.status);
      if (!rep.ok()) {
        std::cout << ": " << rep.message;
        if (rep.event_index) std::cout << " (event " << *rep.event_index << ")";
        std::cout << "\n  expected: " << rep.expected << "\n  actual:   " << rep.actual;
      }
      std::cout << '\n';
      return rep.ok() ? 0 : 1;
    }

    if (*serve) {
      wgc::SessionManager sessions{std::filesystem::path(serve_replays)};
      wgc::HttpService http(sessions);
      const int bound = http.bind(host, port);
      if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
      g_http = &http;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "wgc service listening on http://" << host << ":" << bound << '\n';
      http.listen_after_bind();
      g_http = nullptr;
      return 0;
    }

    if (*protocol) {
      wgc::ProtocolServer server;
      if (protocol_port >= 0) {
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        wgc::serve_protocol_tcp(server, protocol_port, g_stop, [](int p) {
          std::cerr << "wgc protocol listening on 127.0.0.1:" << p << '\n';
        });
      } else {
        std::ios::sync_with_stdio(false);
        wgc::serve_protocol_stream(server, std::cin, std::cout);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "wgc: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
