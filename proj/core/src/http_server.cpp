#include <memory>

#include "httplib.h"
#include "wgc/service.hpp"

namespace wgc {

using ordered_json = nlohmann::ordered_json;

struct HttpService::Impl {
  explicit Impl(SessionManager& m) : sessions(m) {}

  SessionManager& sessions;
  httplib::Server server;
};

namespace {

void reply(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs `fn`, mapping service and parse errors onto structured error bodies.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const ServiceError& e) {
    reply(res, e.http_status(), e.to_json());
  } catch (const nlohmann::json::exception& e) {
    reply(res, 400, ServiceError("bad_request", e.what()).to_json());
  }
}

}  // namespace

HttpService::HttpService(SessionManager& sessions) : impl_(std::make_unique<Impl>(sessions)) {
  auto& srv = impl_->server;
  SessionManager& mgr = sessions;

  srv.Post("/sessions", [&mgr](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const ordered_json body =
          req.body.empty() ? ordered_json::object() : ordered_json::parse(req.body);
      reply(res, 201, mgr.create_session(body));
    });
  });

  srv.Get(R"(/sessions/([A-Za-z0-9_-]+)/view)",
          [&mgr](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { reply(res, 200, mgr.get_view(req.matches[1])); });
          });

  // Body: {"agent": id, "index": n}
  srv.Post(R"(/sessions/([A-Za-z0-9_-]+)/actions)",
           [&mgr](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const ordered_json body = ordered_json::parse(req.body);
               if (!body.is_object() || !body.contains("agent") || !body.contains("index")) {
                 throw ServiceError("bad_request", "expected {\"agent\": id, \"index\": n}");
               }
               reply(res, 200,
                     mgr.submit_action(req.matches[1], body.at("agent").get<OperatorId>(),
                                       body.at("index").get<int>()));
             });
           });

  // Server push: one event record per line as ticks resolve; the stream closes
  // once the game has ended and every event has been sent.
  srv.Get(R"(/sessions/([A-Za-z0-9_-]+)/events)",
          [&mgr](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
              const std::string id = req.matches[1];
              std::size_t from = 0;
              if (req.has_param("from")) from = std::stoul(req.get_param_value("from"));
              bool finished = false;
              mgr.events_since(id, from, std::chrono::milliseconds(0), finished);  // 404 check
              auto cursor = std::make_shared<std::size_t>(from);
              res.set_chunked_content_provider(
                  "application/x-ndjson", [&mgr, id, cursor](std::size_t, httplib::DataSink& sink) {
                    bool done = false;
                    const auto records =
                        mgr.events_since(id, *cursor, std::chrono::milliseconds(250), done);
                    for (const auto& r : records) {
                      const std::string line = r.dump() + "\n";
                      if (!sink.write(line.data(), line.size())) return false;
                    }
                    *cursor += records.size();
                    if (done && records.empty()) sink.done();
                    return true;
                  });
            });
          });

  srv.Get("/replays", [&mgr](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, mgr.list_replays()); });
  });

  srv.Get(R"(/replays/([A-Za-z0-9_-]+))", [&mgr](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      res.status = 200;
      res.set_content(mgr.get_replay(req.matches[1]), "application/x-ndjson");
    });
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    reply(res, 500, ServiceError("internal", what).to_json());
  });
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpService::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace wgc
