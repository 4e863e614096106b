#pragma once

#include <sys/socket.h>

#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <json.hpp>

#include "rinx/error.hpp"
#include "rinx/graph_io.hpp"
#include "rinx/io.hpp"
#include "rinx/session_registry.hpp"

namespace rinx {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  // Root for server-side trajectory paths in POST /sessions.
  std::string data_dir;
  // Static assets served for any other GET.
  std::string static_dir;
  // When set, every live session's snapshot is written here on stop().
  std::string dump_dir;
  SessionOptions session;
};

namespace server_detail {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

inline http::status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return http::status::not_found;
    default: return http::status::bad_request;
  }
}

inline Response json_response(const Request& req, http::status status, const nlohmann::json& body) {
  Response res{status, req.version()};
  res.set(http::field::content_type, "application/json");
  res.set(http::field::access_control_allow_origin, "*");
  res.keep_alive(req.keep_alive());
  res.body() = body.dump();
  res.prepare_payload();
  return res;
}

inline std::string_view mime_type(std::string_view path) {
  auto ends = [&](std::string_view ext) {
    return path.size() >= ext.size() && path.substr(path.size() - ext.size()) == ext;
  };
  if (ends(".html")) return "text/html";
  if (ends(".js")) return "application/javascript";
  if (ends(".css")) return "text/css";
  if (ends(".json")) return "application/json";
  if (ends(".svg")) return "image/svg+xml";
  if (ends(".png")) return "image/png";
  return "application/octet-stream";
}

// Resolves `relative` under `root`, refusing anything that escapes it.
inline std::optional<std::filesystem::path> contained_path(const std::string& root, const std::string& relative) {
  namespace fs = std::filesystem;
  if (root.empty() || relative.empty()) return std::nullopt;
  const fs::path rel(relative);
  if (rel.is_absolute()) return std::nullopt;
  std::error_code ec;
  const fs::path base = fs::weakly_canonical(root, ec);
  if (ec) return std::nullopt;
  const fs::path full = fs::weakly_canonical(base / rel, ec);
  if (ec) return std::nullopt;
  auto [b, f] = std::mismatch(base.begin(), base.end(), full.begin(), full.end());
  if (b != base.end()) return std::nullopt;
  return full;
}

inline std::string_view target_of(const Request& req) {
  const auto t = req.target();
  return {t.data(), t.size()};
}

// Split "/sessions/abc/snapshot" into {"sessions", "abc", "snapshot"}.
inline std::vector<std::string> path_parts(std::string_view target) {
  if (auto q = target.find('?'); q != std::string_view::npos) target = target.substr(0, q);
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < target.size()) {
    std::size_t next = target.find('/', pos);
    if (next == std::string_view::npos) next = target.size();
    if (next > pos) parts.emplace_back(target.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

}  // namespace server_detail

// HTTP + WebSocket front end over a SessionRegistry. One thread per
// connection; each session still serializes its own events.
class Server {
 public:
  explicit Server(ServerOptions options) : options_(std::move(options)), acceptor_(ioc_) {}
  ~Server() { stop(); }
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  SessionRegistry& registry() { return registry_; }

  // Binds and starts accepting; returns the bound port.
  unsigned short start() {
    using namespace server_detail;
    const tcp::endpoint ep{net::ip::make_address(options_.address), options_.port};
    acceptor_.open(ep.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen();
    port_ = acceptor_.local_endpoint().port();
    running_ = true;
    do_accept();
    io_thread_ = std::thread([this] { ioc_.run(); });
    return port_;
  }

  unsigned short port() const { return port_; }

  // Blocks until stop() is called from elsewhere.
  void wait() {
    std::unique_lock lock(mutex_);
    stopped_cv_.wait(lock, [&] { return !running_; });
  }

  void stop() {
    {
      std::lock_guard lock(mutex_);
      if (!running_) return;
      running_ = false;
      for (auto* sock : live_) ::shutdown(sock->native_handle(), SHUT_RDWR);
    }
    boost::asio::post(ioc_, [this] {
      boost::system::error_code ec;
      acceptor_.close(ec);
    });
    if (io_thread_.joinable()) io_thread_.join();
    {
      std::unique_lock lock(mutex_);
      idle_cv_.wait(lock, [&] { return live_.empty(); });
    }
    dump_sessions();
    stopped_cv_.notify_all();
  }

 private:
  using Request = server_detail::Request;
  using Response = server_detail::Response;

  void do_accept() {
    acceptor_.async_accept([this](boost::system::error_code ec, server_detail::tcp::socket sock) {
      if (ec) return;
      auto owned = std::make_shared<server_detail::tcp::socket>(std::move(sock));
      {
        std::lock_guard lock(mutex_);
        if (!running_) return;
        live_.insert(owned.get());
      }
      std::thread([this, owned] {
        serve(*owned);
        std::lock_guard lock(mutex_);
        live_.erase(owned.get());
        idle_cv_.notify_all();
      }).detach();
      do_accept();
    });
  }

  void serve(server_detail::tcp::socket& sock) {
    using namespace server_detail;
    beast::flat_buffer buffer;
    boost::system::error_code ec;
    for (;;) {
      Request req;
      http::read(sock, buffer, req, ec);
      if (ec) break;
      if (websocket::is_upgrade(req)) {
        serve_websocket(sock, std::move(req));
        break;
      }
      Response res = route(req);
      const bool keep = res.keep_alive();
      http::write(sock, res, ec);
      if (ec || !keep) break;
    }
    sock.shutdown(tcp::socket::shutdown_both, ec);
  }

  void serve_websocket(server_detail::tcp::socket& sock, Request req) {
    using namespace server_detail;
    const auto parts = path_parts(target_of(req));
    boost::system::error_code ec;
    if (parts.size() != 3 || parts[0] != "sessions" || parts[2] != "ws" || !has_session(parts[1])) {
      Response res = json_response(req, http::status::not_found,
                                   error_to_json(ErrorCode::NotFound, "no session socket at " + std::string(target_of(req))));
      res.keep_alive(false);
      http::write(sock, res, ec);
      return;
    }
    const std::string id = parts[1];
    websocket::stream<tcp::socket&> ws(sock);
    ws.accept(req, ec);
    if (ec) return;
    ws.text(true);
    for (;;) {
      beast::flat_buffer buffer;
      ws.read(buffer, ec);
      if (ec) return;
      const nlohmann::json reply = registry_.handle_message(id, beast::buffers_to_string(buffer.data()));
      ws.write(net::buffer(reply.dump()), ec);
      if (ec) return;
    }
  }

  bool has_session(const std::string& id) const {
    try {
      registry_.state(id);
      return true;
    } catch (const Error&) {
      return false;
    }
  }

  Response route(const Request& req) {
    using namespace server_detail;
    const auto parts = path_parts(target_of(req));
    try {
      if (!parts.empty() && parts[0] == "sessions") {
        if (parts.size() == 1 && req.method() == http::verb::post)
          return json_response(req, http::status::created, create_from_body(req.body()));
        if (parts.size() == 1 && req.method() == http::verb::get)
          return json_response(req, http::status::ok, nlohmann::json{{"sessions", registry_.ids()}});
        if (parts.size() == 2 && req.method() == http::verb::delete_) {
          if (!registry_.erase(parts[1])) throw Error(ErrorCode::NotFound, "no session '" + parts[1] + "'");
          return json_response(req, http::status::ok, nlohmann::json{{"deleted", parts[1]}});
        }
        if (parts.size() == 3 && parts[2] == "snapshot" && req.method() == http::verb::get)
          return json_response(req, http::status::ok, registry_.snapshot(parts[1]));
        if (parts.size() == 3 && parts[2] == "events" && req.method() == http::verb::post) {
          nlohmann::json reply = registry_.handle_message(parts[1], req.body());
          const bool failed = reply.value("type", "") == "error";
          http::status status = http::status::ok;
          if (failed && reply.value("code", "") == to_string(ErrorCode::NotFound)) status = http::status::not_found;
          else if (failed) status = http::status::bad_request;
          return json_response(req, status, reply);
        }
        return json_response(req, http::status::method_not_allowed,
                             error_to_json(ErrorCode::InvalidPayload, "unsupported request"));
      }
      if (req.method() == http::verb::get && !options_.static_dir.empty()) return static_file(req, parts);
      return json_response(req, http::status::not_found,
                           error_to_json(ErrorCode::NotFound, "no route for " + std::string(target_of(req))));
    } catch (const Error& e) {
      return json_response(req, status_for(e.code()), error_to_json(e.code(), e.what()));
    } catch (const std::exception& e) {
      return json_response(req, http::status::internal_server_error, error_to_json(ErrorCode::InvalidPayload, e.what()));
    }
  }

  // Body: {"path" | "trajectory" | "pdb", "format", "config", "measure",
  //        "warm_start", "seed", "gamma"}.
  nlohmann::json create_from_body(const std::string& body) {
    using namespace server_detail;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::InvalidPayload, std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::InvalidPayload, "expected an object");

    std::optional<TrajectoryFormat> format;
    if (doc.contains("format")) {
      if (!doc["format"].is_string() || !(format = parse_trajectory_format(doc["format"].get<std::string>())))
        throw Error(ErrorCode::InvalidPayload, "format must be \"pdb\" or \"json\"");
    }
    Trajectory traj;
    if (doc.contains("path")) {
      if (!doc["path"].is_string()) throw Error(ErrorCode::InvalidPayload, "path must be a string");
      const auto full = contained_path(options_.data_dir, doc["path"].get<std::string>());
      if (!full) throw Error(ErrorCode::NotFound, "path not available under the data directory");
      traj = load_trajectory(full->string(), format);
    } else if (doc.contains("trajectory")) {
      traj = select_protein_residues(trajectory_from_json(doc["trajectory"], "upload"));
      validate_trajectory(traj);
    } else if (doc.contains("pdb")) {
      if (!doc["pdb"].is_string()) throw Error(ErrorCode::InvalidPayload, "pdb must be a string");
      traj = parse_trajectory(doc["pdb"].get<std::string>(), TrajectoryFormat::Pdb, "upload");
    } else {
      throw Error(ErrorCode::InvalidPayload, "need one of path, trajectory or pdb");
    }

    RinConfig config;
    try {
      if (doc.contains("config")) config = config_from_json(doc["config"]);
      config.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidPayload, e.what());
    }
    MeasureSelector measure;
    if (doc.contains("measure")) {
      auto m = doc["measure"].is_string() ? parse_measure(doc["measure"].get<std::string>()) : std::nullopt;
      if (!m) throw Error(ErrorCode::InvalidPayload, "unknown measure");
      measure = *m;
    }
    SessionOptions opts = options_.session;
    if (doc.contains("warm_start") && doc["warm_start"].is_boolean()) opts.warm_start = doc["warm_start"].get<bool>();
    if (doc.contains("seed") && is_count(doc["seed"])) {
      opts.layout.seed = doc["seed"].get<std::uint64_t>();
      opts.analytics.seed = opts.layout.seed;
    }
    if (doc.contains("gamma") && doc["gamma"].is_number()) opts.analytics.gamma = doc["gamma"].get<double>();

    auto shared = std::make_shared<const Trajectory>(std::move(traj));
    const std::size_t residues = shared->topology.residues.size();
    const std::size_t frames = shared->frame_count();
    const std::string id = registry_.create(std::move(shared), config, measure, opts);
    return {{"id", id}, {"n_nodes", residues}, {"frame_count", frames}};
  }

  Response static_file(const Request& req, const std::vector<std::string>& parts) {
    using namespace server_detail;
    std::string rel;
    for (const auto& p : parts) rel += (rel.empty() ? "" : "/") + p;
    if (rel.empty()) rel = "index.html";
    const auto full = contained_path(options_.static_dir, rel);
    std::ifstream in;
    if (full) in.open(*full, std::ios::binary);
    if (!in) return json_response(req, http::status::not_found, error_to_json(ErrorCode::NotFound, "no file " + rel));
    std::ostringstream ss;
    ss << in.rdbuf();
    Response res{http::status::ok, req.version()};
    res.set(http::field::content_type, std::string(mime_type(rel)));
    res.keep_alive(req.keep_alive());
    res.body() = ss.str();
    res.prepare_payload();
    return res;
  }

  void dump_sessions() {
    if (options_.dump_dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(options_.dump_dir, ec);
    for (const auto& id : registry_.ids()) {
      try {
        write_text_file((std::filesystem::path(options_.dump_dir) / (id + ".json")).string(),
                        registry_.snapshot(id).dump());
      } catch (const std::exception& e) {
        std::clog << "rinx: could not dump session " << id << ": " << e.what() << '\n';
      }
    }
  }

  ServerOptions options_;
  SessionRegistry registry_;
  boost::asio::io_context ioc_;
  server_detail::tcp::acceptor acceptor_;
  std::thread io_thread_;
  unsigned short port_ = 0;
  std::mutex mutex_;
  std::condition_variable idle_cv_;
  std::condition_variable stopped_cv_;
  std::set<server_detail::tcp::socket*> live_;
  bool running_ = false;
};

}  // namespace rinx
