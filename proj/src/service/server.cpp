#include "ens/service/server.hpp"

#include <cstdlib>

#include <httplib.h>

#include "ens/core/tagged.hpp"
#include "ens/core/text.hpp"

namespace ens::service {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSession:
    case ErrorCode::kUnknownScenario:
    case ErrorCode::kUnknownPolicy:
      return 404;
    case ErrorCode::kTurnOrder:
    case ErrorCode::kAlreadyClosed:
    case ErrorCode::kSessionOpen:
    case ErrorCode::kInsufficientRaters:
      return 409;
    case ErrorCode::kScoreOutOfRange:
    case ErrorCode::kMissingRating:
      return 422;
    case ErrorCode::kGenerationUnparseable:
      return 503;
    case ErrorCode::kSchema:
    case ErrorCode::kParse:
      return 400;
    default:
      return 500;
  }
}

json rationale_json(const EnsCotRationale& r) {
  auto opt = [](const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); };
  return {{"EM", r.emotion ? json(std::string(name(*r.emotion))) : json(nullptr)},
          {"ET", opt(r.trigger)},
          {"IA", opt(r.assessment)},
          {"PS", opt(r.perspective_shift)},
          {"MT", opt(r.mindset_transformation)},
          {"SS", r.strategy ? json(std::string(name(*r.strategy))) : json(nullptr)},
          {"SR", opt(r.strategy_reason)},
          {"RG", r.response}};
}

ListenAddress parse_listen_address(const std::string& t) {
  ListenAddress a;
  const auto colon = t.rfind(':');
  std::string port = colon == std::string::npos ? t : t.substr(colon + 1);
  if (colon != std::string::npos && colon > 0) a.host = t.substr(0, colon);
  try {
    std::size_t used = 0;
    a.port = std::stoi(port, &used);
    if (used != port.size() || a.port < 0 || a.port > 65535) throw std::out_of_range(port);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kConfig, "bad listen address \"" + t + "\"");
  }
  return a;
}

ListenAddress listen_address_from_env() {
  const char* v = std::getenv("ENS_SERVICE_ADDR");
  return v && *v ? parse_listen_address(v) : ListenAddress{};
}

NegotiationServer::NegotiationServer(SessionStore& store, std::optional<std::string> token)
    : store_(store), token_(std::move(token)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

NegotiationServer::~NegotiationServer() { stop(); }

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void reply_error(httplib::Response& res, const Error& e) {
  reply(res, http_status(e.code()),
        {{"error", std::string(error_code_name(e.code()))}, {"message", e.what()},
         {"retryable", e.code() == ErrorCode::kGenerationUnparseable}});
}

json parse_body(const httplib::Request& req) {
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::kSchema, "request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("request body is not JSON: ") + e.what());
  }
}

std::string string_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::kSchema, std::string("field ") + key + " must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

void NegotiationServer::install_routes() {
  auto& srv = *server_;
  srv.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    if (req.method == "OPTIONS") {
      res.status = 204;
      return httplib::Server::HandlerResponse::Handled;
    }
    if (token_ && req.get_header_value("Authorization") != "Bearer " + *token_) {
      reply(res, 401, {{"error", "Unauthorized"}, {"message", "missing or wrong bearer token"}});
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  auto guarded = [](auto fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        reply_error(res, e);
      } catch (const std::exception& e) {
        reply(res, 500, {{"error", "Internal"}, {"message", e.what()}});
      }
    };
  };

  srv.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             const auto id = store_.create_session(string_field(body, "scenario_id"),
                                                   string_field(body, "policy_id"));
             const auto s = store_.get(id);
             reply(res, 200, {{"session_id", id}, {"scenario", s.scenario}, {"scenario_id", s.scenario_id}});
           }));

  srv.Post(R"(/sessions/([^/]+)/turns)",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             const auto served = store_.post_user_turn(req.matches[1], string_field(body, "utterance"));
             auto r = served.agent.rationale;
             r.response = served.agent.response;
             reply(res, 200, {{"response", served.agent.response},
                              {"rationale", rationale_json(r)},
                              {"strategy", served.agent.selected_strategy},
                              {"turn_index", served.session.transcript.turns.size() - 1}});
           }));

  srv.Post(R"(/sessions/([^/]+)/close)",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto d = store_.close_session(req.matches[1]);
             reply(res, 200, {{"transcript", ens::to_json(d)}});
           }));

  srv.Post(R"(/sessions/([^/]+)/ratings)",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             RatingRecord r;
             r.session_id = req.matches[1];
             r.rater_id = string_field(body, "rater_id");
             const auto scores = body.find("scores");
             if (scores == body.end() || !scores->is_object()) {
               throw Error(ErrorCode::kSchema, "field scores must be an object");
             }
             for (const auto& [k, v] : scores->items()) {
               if (!v.is_number_integer()) {
                 throw Error(ErrorCode::kScoreOutOfRange, k + " score must be an integer 1..5");
               }
               r.scores[k] = v.get<int>();
             }
             store_.submit_rating(r);
             reply(res, 200, {{"ok", true}});
           }));

  srv.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            reply(res, 200, to_json(store_.get(req.matches[1])));
          }));

  srv.Get("/reports/agreement", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto dim = req.has_param("dimension") ? req.get_param_value("dimension") : "EA";
            const auto rep = store_.agreement_report(dim);
            reply(res, 200, {{"dimension", rep.dimension},
                             {"kappa", rep.kappa},
                             {"mean", rep.mean},
                             {"means", rep.means},
                             {"items", rep.items},
                             {"raters_per_item", rep.raters_per_item}});
          }));
}

bool NegotiationServer::listen(const ListenAddress& a) { return server_->listen(a.host, a.port); }

int NegotiationServer::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool NegotiationServer::serve() { return server_->listen_after_bind(); }

void NegotiationServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

bool NegotiationServer::running() const { return server_ && server_->is_running(); }

}  // namespace ens::service
