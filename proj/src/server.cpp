#include "qac/server.hpp"

#include <charconv>
#include <httplib.h>
#include <json.hpp>

#include "qac/normalize.hpp"

namespace qac {
namespace {

std::string dump(const nlohmann::json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

HttpReply error_reply(int status, std::string_view message) {
  return {status, dump({{"error", message}})};
}

}  // namespace

SuggestService::SuggestService(ServiceOptions options) : options_(options) {}

void SuggestService::set_index(std::shared_ptr<const SuggestIndex> index) {
  std::lock_guard lock(mu_);
  index_ = std::move(index);
}

std::shared_ptr<const SuggestIndex> SuggestService::index() const {
  std::lock_guard lock(mu_);
  return index_;
}

HttpReply SuggestService::suggest(const std::optional<std::string>& q,
                                  const std::optional<std::string>& k) const {
  if (!q) return error_reply(400, "missing q parameter");

  std::size_t top_k = options_.default_k;
  if (k) {
    const auto* first = k->data();
    const auto* last = first + k->size();
    const auto [ptr, ec] = std::from_chars(first, last, top_k);
    if (ec != std::errc{} || ptr != last || k->empty()) {
      return error_reply(400, "k must be an integer");
    }
    if (top_k < 1 || top_k > options_.max_k) {
      return error_reply(400, "k must be between 1 and " + std::to_string(options_.max_k));
    }
  }

  const auto index = this->index();
  if (!index) return error_reply(503, "index not loaded");

  nlohmann::json completions = nlohmann::json::array();
  for (auto& s : index->lookup(normalize_live_query(*q), top_k)) {
    completions.push_back(std::move(s.text));
  }
  return {200, dump(nlohmann::json::array({*q, std::move(completions)}))};
}

HttpReply SuggestService::health() const {
  const auto index = this->index();
  if (!index) return error_reply(503, "index not loaded");
  const auto& meta = index->metadata();
  return {200, dump({{"status", "ok"},
                     {"source", to_string(meta.source)},
                     {"entry_count", index->size()},
                     {"min_count", meta.min_count},
                     {"denylist_digest", meta.denylist_digest},
                     {"url_filter", meta.url_filter},
                     {"format_version", kIndexFormatVersion},
                     {"default_k", options_.default_k},
                     {"max_k", options_.max_k}})};
}

// ---------------------------------------------------------------- transport

SuggestServer::SuggestServer(const SuggestService& service, ServerOptions options)
    : service_(service), options_(std::move(options)), http_(std::make_unique<httplib::Server>()) {
  // httplib defaults to SO_REUSEPORT, which lets a second instance share the
  // port silently. Plain SO_REUSEADDR makes an occupied port a bind error.
  http_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  // Replies go out as header and body writes; Nagle would hold the second one
  // for a delayed ACK on keep-alive connections.
  http_->set_tcp_nodelay(true);
  auto param = [](const httplib::Request& req, const char* name) -> std::optional<std::string> {
    if (!req.has_param(name)) return std::nullopt;
    return req.get_param_value(name);
  };
  auto send = [](httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
  };

  http_->Get("/suggest", [this, param, send](const httplib::Request& req, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    send(res, service_.suggest(param(req, "q"), param(req, "k")));
  });
  http_->Get("/health", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, service_.health());
  });
}

SuggestServer::~SuggestServer() { stop(); }

int SuggestServer::bind() {
  if (options_.port == 0) {
    port_ = http_->bind_to_any_port(options_.host);
  } else if (http_->bind_to_port(options_.host, options_.port)) {
    port_ = options_.port;
  } else {
    port_ = -1;
  }
  if (port_ < 0) {
    throw Error(ErrorKind::kIo,
                "cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
  return port_;
}

void SuggestServer::run() {
  if (port_ < 0) bind();
  http_->listen_after_bind();
}

void SuggestServer::stop() {
  if (http_ && http_->is_running()) http_->stop();
}

bool SuggestServer::running() const { return http_->is_running(); }

}  // namespace qac
