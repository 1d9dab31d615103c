// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/service/http_api.hpp"

#include <httplib.h>

#include "stone_needle/error.hpp"

namespace stone_needle::service {

Json turn_response_json(const Response& response) {
  Json resources = Json::array();
  for (const auto& r : response.resources)
    resources.push_back(Json{{"resource_id", r.id}, {"media_type", r.media_type}});
  return Json{{"text", response.text ? Json(*response.text) : Json(nullptr)},
              {"resources", std::move(resources)},
              {"trace", response.routing_trace}};
}

Json transcript_json(const Session& session) {
  Json j = session.history;
  j["created_at"] = format_utc(session.created_at);
  return j;
}

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SessionNotFound: return 404;
    case ErrorCode::UnsupportedMediaType: return 415;
    case ErrorCode::InvalidQuery:
    case ErrorCode::UnknownResource:
    case ErrorCode::EmptyPayload: return 422;
    case ErrorCode::BudgetTooSmall: return 413;
    default: return 500;
  }
}

void reply_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view code, const std::string& msg) {
  reply_json(res, status, Json{{"error", code}, {"message", msg}});
}

// Runs a handler and maps library errors onto HTTP statuses.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      reply_error(res, status_for(e.code()), to_string(e.code()), e.what());
    } catch (const Json::exception& e) {
      reply_error(res, 400, "BadRequest", e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, "Internal", e.what());
    }
  };
}

}  // namespace

struct HttpApi::Impl {
  explicit Impl(Gateway& gw) : gateway(gw) {}
  Gateway& gateway;
  httplib::Server server;
};

HttpApi::HttpApi(Gateway& gateway, std::optional<std::filesystem::path> ui_dir)
    : impl_(std::make_unique<Impl>(gateway)) {
  auto& srv = impl_->server;
  auto& gw = impl_->gateway;

  srv.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
    reply_json(res, 200, Json{{"status", "ok"}});
  });

  srv.Post("/v1/sessions", guarded([&gw](const httplib::Request&, httplib::Response& res) {
             auto s = gw.create_session();
             reply_json(res, 201, Json{{"session_id", s.session_id}});
           }));

  srv.Post(R"(/v1/sessions/([^/]+)/resources)",
           guarded([&gw](const httplib::Request& req, httplib::Response& res) {
             auto media_type = req.get_header_value("Content-Type");
             auto r = gw.store_resource(req.matches[1].str(), req.body, media_type);
             reply_json(res, 201,
                        Json{{"resource_id", r.id}, {"modality", to_string(r.modality)}});
           }));

  srv.Post(R"(/v1/sessions/([^/]+)/turns)",
           guarded([&gw](const httplib::Request& req, httplib::Response& res) {
             Json body = Json::parse(req.body);
             if (!body.is_object()) {
               reply_error(res, 400, "BadRequest", "body must be a JSON object");
               return;
             }
             std::optional<std::string> text;
             if (auto it = body.find("text"); it != body.end() && !it->is_null())
               text = it->get<std::string>();
             auto ids = body.value("resource_ids", std::vector<std::string>{});
             auto response = gw.submit_turn(req.matches[1].str(), std::move(text), ids);
             reply_json(res, 200, turn_response_json(response));
           }));

  srv.Get(R"(/v1/sessions/([^/]+))",
          guarded([&gw](const httplib::Request& req, httplib::Response& res) {
            reply_json(res, 200, transcript_json(gw.session(req.matches[1].str())));
          }));

  srv.Get(R"(/v1/resources/([^/]+))",
          guarded([&gw](const httplib::Request& req, httplib::Response& res) {
            auto found = gw.fetch_resource(req.matches[1].str());
            if (!found) {
              reply_error(res, 404, "UnknownResource", "no such resource");
              return;
            }
            res.status = 200;
            res.set_content(found->second, found->first.media_type);
          }));

  if (ui_dir) srv.set_mount_point("/ui", ui_dir->string());
}

HttpApi::~HttpApi() { stop(); }

int HttpApi::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  if (port == 0) return srv.bind_to_any_port(host);
  return srv.bind_to_port(host, port) ? port : -1;
}

bool HttpApi::run() { return impl_->server.listen_after_bind(); }

void HttpApi::stop() { impl_->server.stop(); }

void HttpApi::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace stone_needle::service
