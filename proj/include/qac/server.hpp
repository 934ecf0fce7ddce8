#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "qac/index.hpp"

namespace httplib {
class Server;
}

namespace qac {

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json; charset=utf-8";
};

struct ServiceOptions {
  std::size_t default_k = kDefaultTopK;
  std::size_t max_k = 25;
};

/// Request handling independent of the transport. Holds one immutable index
/// shared by all handlers; it records nothing about the requests it serves.
class SuggestService {
 public:
  explicit SuggestService(ServiceOptions options = {});

  void set_index(std::shared_ptr<const SuggestIndex> index);
  std::shared_ptr<const SuggestIndex> index() const;

  /// `q` and `k` are the decoded query parameters, nullopt when absent.
  /// Success body: ["<q>", ["<s1>", ...]].
  HttpReply suggest(const std::optional<std::string>& q,
                    const std::optional<std::string>& k) const;
  HttpReply health() const;

  const ServiceOptions& options() const { return options_; }

 private:
  ServiceOptions options_;
  mutable std::mutex mu_;  // guards the pointer swap only
  std::shared_ptr<const SuggestIndex> index_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 binds an ephemeral port
};

/// HTTP front end: GET /suggest and GET /health.
class SuggestServer {
 public:
  SuggestServer(const SuggestService& service, ServerOptions options);
  ~SuggestServer();
  SuggestServer(const SuggestServer&) = delete;
  SuggestServer& operator=(const SuggestServer&) = delete;

  /// Binds the socket; throws Error(kIo) on failure. Returns the bound port.
  int bind();
  /// Serves until stop(); in-flight requests finish before this returns.
  void run();
  void stop();
  bool running() const;
  int port() const { return port_; }

 private:
  const SuggestService& service_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> http_;
  int port_ = -1;
};

}  // namespace qac
