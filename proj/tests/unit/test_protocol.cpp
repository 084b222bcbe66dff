#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <future>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "wgc/protocol.hpp"
#include "wgc/service.hpp"

using namespace wgc;
using nlohmann::ordered_json;

namespace {

// Structural check of one step frame against the session's env_info.
void check_frame(const ordered_json& frame, const ordered_json& info) {
  const auto n_agents = info["n_agents"].get<std::size_t>();
  REQUIRE(frame["obs"].size() == n_agents);
  REQUIRE(frame["avail_actions"].size() == n_agents);
  REQUIRE(frame["agent_ids"].size() == n_agents);
  CHECK(frame["state"].size() == info["state_shape"].get<std::size_t>());
  for (const auto& o : frame["obs"]) {
    REQUIRE(o.size() == info["obs_shape"].get<std::size_t>());
    for (const auto& v : o) REQUIRE((v.get<double>() >= 0 && v.get<double>() <= 1));
  }
  for (const auto& m : frame["avail_actions"]) {
    REQUIRE(m.size() == info["n_actions"].get<std::size_t>());
    int on = 0;
    for (const auto& v : m) on += v.get<int>();
    REQUIRE(on >= 1);
  }
  CHECK(frame["reward"].is_number());
  CHECK(frame["terminated"].is_boolean());
  CHECK(frame["tick"].is_number_integer());
}

// All-stop for ready slots, noop otherwise.
ordered_json stop_actions(const ordered_json& frame) {
  ordered_json out = ordered_json::array();
  for (const auto& m : frame["avail_actions"]) out.push_back(m[0].get<int>() ? 0 : 1);
  return out;
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("env_info") {
  ProtocolServer server;
  const auto r = server.handle({{"op", "env_info"}, {"session", "a"}, {"scenario", "cmac/0"}});
  REQUIRE(r["ok"] == true);
  const auto& info = r["info"];
  CHECK(info["episode_limit"] == 600);
  CHECK(info["n_agents"] == 9);
  CHECK(info["n_actions"] == 28);
  CHECK(info["protocol_version"] == kProtocolVersion);
  CHECK(info["gamma"] == kDefaultGamma);
  CHECK(server.session_count() == 0);

  const auto missing = server.handle({{"op", "env_info"}, {"session", "nobody"}});
  CHECK(missing["ok"] == false);
  CHECK(missing["error"]["code"] == "unknown_session");
}

TEST_CASE("six hundred all-stop steps against idle end in a draw") {
  ProtocolServer server;
  const auto info = server.handle({{"op", "env_info"}, {"session", "x"}, {"scenario", "standard/0"}})["info"];
  auto r = server.handle({{"op", "reset"}, {"session", "x"}, {"scenario", "standard/0"},
                          {"seed", 3}, {"opponent", "idle"}});
  REQUIRE(r["ok"] == true);
  check_frame(r["frame"], info);
  int steps = 0;
  while (!r["frame"]["terminated"].get<bool>()) {
    r = server.handle({{"op", "step"}, {"session", "x"}, {"actions", stop_actions(r["frame"])}});
    REQUIRE(r["ok"] == true);
    check_frame(r["frame"], info);
    ++steps;
  }
  CHECK(steps == 600);
  CHECK(r["frame"]["outcome"] == "draw");
  CHECK(r["frame"]["reward"] == 0.0);

  const auto over = server.handle({{"op", "step"}, {"session", "x"}, {"actions", {1, 1, 1}}});
  CHECK(over["error"]["code"] == "episode_over");
  CHECK(server.handle({{"op", "close"}, {"session", "x"}})["ok"] == true);
  CHECK(server.session_count() == 0);
}

TEST_CASE("an illegal index is reported and leaves the session untouched") {
  ProtocolServer server;
  auto r = server.handle({{"op", "reset"}, {"session", "s"}, {"scenario", "poac/0"}, {"seed", 1}});
  REQUIRE(r["ok"] == true);
  const auto frame = r["frame"];
  // Slot 0 is ready; pick a masked-out index for it.
  const auto& mask = frame["avail_actions"][0];
  int bad = -1;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == 0) {
      bad = static_cast<int>(i);
      break;
    }
  }
  REQUIRE(bad >= 0);
  auto actions = stop_actions(frame);
  actions[0] = bad;
  const auto err = server.handle({{"op", "step"}, {"session", "s"}, {"actions", actions}});
  CHECK(err["ok"] == false);
  CHECK(err["error"]["code"] == "illegal_action");
  CHECK(err["error"]["slot"] == 0);
  CHECK(err["error"]["index"] == bad);
  CHECK(err["error"]["mask"] == mask);

  const auto short_list = server.handle({{"op", "step"}, {"session", "s"}, {"actions", {1}}});
  CHECK(short_list["error"]["code"] == "illegal_action");

  const auto ok = server.handle({{"op", "step"}, {"session", "s"}, {"actions", stop_actions(frame)}});
  REQUIRE(ok["ok"] == true);
  CHECK(ok["frame"]["tick"] == 1);
}

TEST_CASE("request errors") {
  ProtocolServer server;
  const auto bad_json = ordered_json::parse(server.handle_line("{oops"));
  CHECK(bad_json["ok"] == false);
  CHECK(bad_json["error"]["code"] == "bad_json");
  const auto unknown = server.handle({{"op", "fly"}, {"session", "a"}});
  CHECK(unknown["error"]["code"] == "unknown_op");
  CHECK(unknown["op"] == "fly");
  CHECK(server.handle({{"session", "a"}})["error"]["code"] == "bad_request");
  CHECK(server.handle({{"op", "reset"}})["error"]["code"] == "bad_request");
  CHECK(server.handle({{"op", "reset"}, {"session", "a"}, {"scenario", "moon/1"}})["error"]["code"] ==
        "bad_scenario");
  CHECK(server.handle({{"op", "reset"}, {"session", "a"}, {"scenario", "cmac/0"}, {"opponent", "kai1"}})
            ["error"]["code"] == "bad_policy");
  CHECK(server.handle({{"op", "step"}, {"session", "a"}, {"actions", {0}}})["error"]["code"] ==
        "unknown_session");
  CHECK(server.handle({{"op", "close"}, {"session", "a"}})["error"]["code"] == "unknown_session");
  CHECK(server.session_count() == 0);
}

TEST_CASE("reset accepts a scenario document and the blue side") {
  ProtocolServer server;
  const auto doc = ordered_json::parse(save_scenario(builtin_scenario(SubEnv::amac, 1)));
  const auto r = server.handle({{"op", "reset"}, {"session", "b"}, {"scenario", doc}, {"side", "blue"}});
  REQUIRE(r["ok"] == true);
  CHECK(r["frame"]["side"] == "blue");
  CHECK(r["frame"]["obs"].size() == 3);
  const auto info = server.handle({{"op", "env_info"}, {"session", "b"}})["info"];
  CHECK(info["n_enemies"] == 5);
}

TEST_CASE("same seed, same frames") {
  auto play = [] {
    ProtocolServer server;
    auto r = server.handle({{"op", "reset"}, {"session", "d"}, {"scenario", "srmac/0"}, {"seed", 77}});
    std::string log = r.dump();
    for (int t = 0; t < 50 && !r["frame"]["terminated"].get<bool>(); ++t) {
      r = server.handle({{"op", "step"}, {"session", "d"}, {"actions", stop_actions(r["frame"])}});
      log += r.dump();
    }
    return log;
  };
  CHECK(play() == play());
}

TEST_CASE("stdio transport") {
  ProtocolServer server;
  std::istringstream in(
      "{\"op\":\"env_info\",\"session\":\"a\",\"scenario\":\"standard/0\"}\n"
      "\n"
      "not json\r\n"
      "{\"op\":\"reset\",\"session\":\"a\",\"scenario\":\"standard/0\"}\n");
  std::ostringstream out;
  serve_protocol_stream(server, in, out);
  std::istringstream lines(out.str());
  std::string line;
  std::vector<ordered_json> replies;
  while (std::getline(lines, line)) replies.push_back(ordered_json::parse(line));
  REQUIRE(replies.size() == 3);
  CHECK(replies[0]["ok"] == true);
  CHECK(replies[1]["error"]["code"] == "bad_json");
  CHECK(replies[2]["op"] == "reset");
}

TEST_CASE("tcp transport") {
  ProtocolServer server;
  std::atomic<bool> stop{false};
  std::promise<int> bound;
  auto port_future = bound.get_future();
  std::thread t([&] { serve_protocol_tcp(server, 0, stop, [&](int p) { bound.set_value(p); }); });
  const int port = port_future.get();
  REQUIRE(port > 0);

  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);

  auto roundtrip = [&](const std::string& req) {
    const std::string line = req + "\n";
    REQUIRE(::send(fd, line.data(), line.size(), 0) == static_cast<ssize_t>(line.size()));
    std::string reply;
    char c;
    while (::recv(fd, &c, 1, 0) == 1 && c != '\n') reply += c;
    return ordered_json::parse(reply);
  };
  const auto reset = roundtrip(R"({"op":"reset","session":"t","scenario":"standard/1","seed":2})");
  CHECK(reset["ok"] == true);
  const auto step = roundtrip(R"({"op":"step","session":"t","actions":[1,1,1]})");
  CHECK(step["ok"] == true);
  CHECK(step["frame"]["tick"] == 1);
  ::close(fd);

  stop = true;
  t.join();
}

}  // TEST_SUITE
