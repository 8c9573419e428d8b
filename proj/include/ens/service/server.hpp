#pragma once

#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "ens/core/error.hpp"
#include "ens/service/session_store.hpp"

namespace httplib {
class Server;
}

namespace ens::service {

// HTTP status for a domain error.
int http_status(ErrorCode code);

// Full octuple keyed EM..RG; absent components are null.
nlohmann::json rationale_json(const EnsCotRationale& rationale);

struct ListenAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

// "host:port", ":port" or "port".
ListenAddress parse_listen_address(const std::string& text);
// ENS_SERVICE_ADDR, falling back to 127.0.0.1:8080.
ListenAddress listen_address_from_env();

class NegotiationServer {
 public:
  // Requests must carry "Authorization: Bearer <token>" when a token is set.
  NegotiationServer(SessionStore& store, std::optional<std::string> bearer_token = std::nullopt);
  ~NegotiationServer();

  // Blocks until stop(). Returns false when the address cannot be bound.
  bool listen(const ListenAddress& address);
  // Binds an ephemeral port on `host` and returns it; then call serve().
  int bind_any_port(const std::string& host = "127.0.0.1");
  bool serve();
  void stop();
  bool running() const;

 private:
  void install_routes();

  SessionStore& store_;
  std::optional<std::string> token_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace ens::service
