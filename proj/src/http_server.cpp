#include <httplib.h>

#include "chaosmine/error.hpp"
#include "chaosmine/service.hpp"

namespace chaosmine {

HttpServer::HttpServer(Service& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  server_->set_payload_max_length(service_.config().upload_limit);
  auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    Request request;
    request.method = req.method;
    request.path = req.path;
    for (const auto& [key, value] : req.params) request.query[key] = value;
    request.body = req.body;
    request.content_type = req.get_header_value("Content-Type");
    const Response response = service_.handle(request);
    res.status = response.status;
    res.set_content(response.body.dump(), "application/json");
  };
  server_->Get(R"(/.*)", dispatch);
  server_->Post(R"(/.*)", dispatch);
  server_->Put(R"(/.*)", dispatch);
  server_->Delete(R"(/.*)", dispatch);
  server_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const std::string code = res.status == 413 ? "payload_too_large" : "http_error";
    res.set_content(Json{{"error", {{"code", code}, {"message", httplib::status_message(res.status)}}}}.dump(),
                    "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error("io_error", "cannot bind to " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error("io_error", "cannot bind to " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

}  // namespace chaosmine
