#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "chaosmine/serialization.hpp"
#include "chaosmine/session.hpp"

namespace httplib {
class Server;
}

namespace chaosmine {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;
  std::optional<std::filesystem::path> store_directory;
  std::size_t upload_limit = 64u << 20;
  std::size_t max_activities = 512;
  // How long a request waits for a long computation before answering 202.
  std::chrono::milliseconds job_wait{2000};

  // Reads CHAOSMINE_HOST, CHAOSMINE_PORT, CHAOSMINE_STORE and
  // CHAOSMINE_UPLOAD_LIMIT on top of the defaults.
  static ServiceConfig from_environment();
};

struct Request {
  std::string method;  // "GET", "POST", ...
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  std::string content_type;
};

struct Response {
  int status = 200;
  Json body;
};

// The HTTP API without the transport. handle() never throws: every outcome is
// a status plus JSON document, errors as {"error": {"code", "message", "field"?}}.
class Service {
 public:
  explicit Service(ServiceConfig config = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const Request& request);

  const ServiceConfig& config() const { return config_; }
  SessionStore& store() { return store_; }

 private:
  using Job = std::shared_future<Json>;

  Response upload_log(const std::string& body, const std::string& content_type,
                      const std::map<std::string, std::string>& query = {});
  Response ranking(const std::string& id, const std::map<std::string, std::string>& query);
  Response put_toggles(const std::string& id, const std::string& body);
  Response discover(const std::string& id, const std::string& body);
  Response curve(const std::string& id, const std::map<std::string, std::string>& query);
  Response get_session(const std::string& id);
  Response delete_session(const std::string& id);

  FilterSchedule schedule_for(SessionSlot& slot, const FilterMethod& method);
  Response run_job(const std::string& key, std::function<Json()> work);

  ServiceConfig config_;
  SessionStore store_;
  std::mutex jobs_mutex_;
  std::map<std::string, Job> jobs_;
};

// Binds a Service to an HTTP listener.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Returns the bound port (an ephemeral one when `port` is 0).
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void stop();

 private:
  Service& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace chaosmine
