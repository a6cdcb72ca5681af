#pragma once

#include <functional>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "groupline/session.hpp"

namespace groupline {

/// Registers the annotation session endpoints on `server`:
///   GET  /timelines
///   POST /sessions                 {annotator_id, timeline_id}
///   GET  /sessions/{id}/next
///   POST /sessions/{id}/assign     {group: n | "new"}
///   POST /sessions/{id}/undo
///   GET  /sessions/{id}/export     (CSV)
inline void install_session_routes(httplib::Server& server, SessionStore& store) {
  using httplib::Request;
  using httplib::Response;

  auto json_reply = [](Response& res, const nlohmann::ordered_json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  };

  auto guarded = [json_reply](std::function<void(const Request&, Response&)> fn) {
    return [fn, json_reply](const Request& req, Response& res) {
      try {
        fn(req, res);
      } catch (const ServiceError& e) {
        json_reply(res, {{"error", e.what()}}, e.status());
      } catch (const nlohmann::json::exception& e) {
        json_reply(res, {{"error", std::string("bad request body: ") + e.what()}}, 400);
      } catch (const std::exception& e) {
        json_reply(res, {{"error", e.what()}}, 500);
      }
    };
  };

  auto parse_body = [](const Request& req) {
    auto body = nlohmann::json::parse(req.body.empty() ? std::string("{}") : req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) throw ServiceError(400, "request body must be a JSON object");
    return body;
  };

  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(.*)", [](const Request&, Response& res) { res.status = 204; });

  server.Get("/timelines", guarded([&store, json_reply](const Request&, Response& res) {
               json_reply(res, store.list_timelines());
             }));

  server.Post("/sessions", guarded([&store, json_reply, parse_body](const Request& req, Response& res) {
                auto body = parse_body(req);
                auto id = store.create_session(body.value("annotator_id", ""), body.value("timeline_id", ""));
                json_reply(res, store.next(id), 201);
              }));

  server.Get(R"(/sessions/([^/]+)/next)", guarded([&store, json_reply](const Request& req, Response& res) {
               json_reply(res, store.next(req.matches[1]));
             }));

  server.Post(R"(/sessions/([^/]+)/assign)",
              guarded([&store, json_reply, parse_body](const Request& req, Response& res) {
                auto body = parse_body(req);
                if (!body.contains("group")) throw ServiceError(400, "missing 'group'");
                const auto& g = body["group"];
                GroupChoice choice;
                if (g.is_string() && g.get<std::string>() == "new")
                  choice = kNewGroup;
                else if (g.is_number_integer() && g.get<long>() >= 0)
                  choice = g.get<long>();
                else
                  throw ServiceError(400, "'group' must be a natural number or \"new\"");
                json_reply(res, store.assign(req.matches[1], choice));
              }));

  server.Post(R"(/sessions/([^/]+)/undo)", guarded([&store, json_reply](const Request& req, Response& res) {
                json_reply(res, store.undo(req.matches[1]));
              }));

  server.Get(R"(/sessions/([^/]+)/export)", guarded([&store](const Request& req, Response& res) {
               res.set_content(store.export_csv(req.matches[1]), "text/csv");
             }));
}

}  // namespace groupline
