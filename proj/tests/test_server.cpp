#include <gtest/gtest.h>

#include <filesystem>

#include "rinx/server.hpp"
#include "rinx/traj_json.hpp"
#include "support.hpp"

using namespace rinx;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

struct Reply {
  unsigned status = 0;
  json body;
};

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / ("rinx_server_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_ / "data");
    std::filesystem::create_directories(dir_ / "www");
    write_text_file((dir_ / "data" / "toy.json").string(), export_traj_json(*support::bundle(2, 10, 3)));
    write_text_file((dir_ / "www" / "index.html").string(), "<html></html>");
    ServerOptions opts;
    opts.port = 0;
    opts.data_dir = (dir_ / "data").string();
    opts.static_dir = (dir_ / "www").string();
    opts.dump_dir = (dir_ / "dump").string();
    server_ = std::make_unique<Server>(opts);
    port_ = server_->start();
  }

  void TearDown() override {
    server_.reset();
    std::filesystem::remove_all(dir_);
  }

  http::response<http::string_body> raw(http::verb verb, const std::string& target, const std::string& body = {}) {
    net::io_context ioc;
    tcp::socket sock(ioc);
    sock.connect({net::ip::make_address("127.0.0.1"), port_});
    http::request<http::string_body> req{verb, target, 11};
    req.set(http::field::host, "localhost");
    req.set(http::field::content_type, "application/json");
    req.body() = body;
    req.prepare_payload();
    http::write(sock, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(sock, buf, res);
    boost::system::error_code ec;
    sock.shutdown(tcp::socket::shutdown_both, ec);
    return res;
  }

  Reply request(http::verb verb, const std::string& target, const std::string& body = {}) {
    auto res = raw(verb, target, body);
    return {res.result_int(), json::parse(res.body())};
  }

  std::string create(const json& body) {
    const Reply r = request(http::verb::post, "/sessions", body.dump());
    EXPECT_EQ(r.status, 201u) << r.body.dump();
    return r.body.value("id", "");
  }

  std::filesystem::path dir_;
  std::unique_ptr<Server> server_;
  unsigned short port_ = 0;
};

}  // namespace

TEST_F(ServerTest, SessionLifecycleOverHttp) {
  const std::string id = create({{"path", "toy.json"}, {"measure", "betweenness"}, {"config", {{"cutoff", 5.0}}}});
  ASSERT_EQ(id.size(), 16u);

  Reply snap = request(http::verb::get, "/sessions/" + id + "/snapshot");
  EXPECT_EQ(snap.status, 200u);
  EXPECT_EQ(snap.body["nodes"].size(), 25u);
  EXPECT_EQ(snap.body["measure"], "betweenness");
  EXPECT_EQ(snap.body["config"]["cutoff"], 5.0);

  Reply ev = request(http::verb::post, "/sessions/" + id + "/events", R"({"type":"set_frame","value":2})");
  EXPECT_EQ(ev.status, 200u);
  EXPECT_EQ(ev.body["frame"], 2);

  Reply bad = request(http::verb::post, "/sessions/" + id + "/events", R"({"type":"set_cutoff","value":-1})");
  EXPECT_EQ(bad.status, 400u);
  EXPECT_EQ(bad.body["type"], "error");
  EXPECT_EQ(bad.body["code"], "invalid_payload");

  Reply list = request(http::verb::get, "/sessions");
  EXPECT_EQ(list.body["sessions"], json::array({id}));

  EXPECT_EQ(request(http::verb::delete_, "/sessions/" + id).status, 200u);
  EXPECT_EQ(request(http::verb::get, "/sessions/" + id + "/snapshot").status, 404u);
  EXPECT_EQ(request(http::verb::delete_, "/sessions/" + id).status, 404u);
}

TEST_F(ServerTest, CreateFromUploadsAndErrors) {
  const auto traj = support::bundle(2, 10, 2);
  EXPECT_FALSE(create({{"trajectory", json::parse(export_traj_json(*traj))}}).empty());
  EXPECT_FALSE(create({{"pdb", write_pdb(*traj)}, {"measure", "plm"}}).empty());
  EXPECT_EQ(request(http::verb::post, "/sessions", R"({"path":"../../etc/passwd"})").status, 404u);
  EXPECT_EQ(request(http::verb::post, "/sessions", R"({"path":"toy.json","measure":"nope"})").status, 400u);
  EXPECT_EQ(request(http::verb::post, "/sessions", R"({"path":"toy.json","config":{"cutoff":0}})").status, 400u);
  EXPECT_EQ(request(http::verb::post, "/sessions", "{").status, 400u);
  EXPECT_EQ(request(http::verb::post, "/sessions", R"({"pdb":"garbage"})").body["type"], "error");
  EXPECT_EQ(request(http::verb::post, "/sessions/zzz/events", R"({"type":"get_snapshot"})").status, 404u);
}

TEST_F(ServerTest, StaticFiles) {
  const auto res = raw(http::verb::get, "/");
  EXPECT_EQ(res.result_int(), 200u);
  EXPECT_EQ(res.body(), "<html></html>");
  EXPECT_EQ(raw(http::verb::get, "/missing.js").result_int(), 404u);
}

TEST_F(ServerTest, WebSocketProtocol) {
  const std::string id = create({{"path", "toy.json"}, {"measure", "degree"}});
  net::io_context ioc;
  tcp::socket sock(ioc);
  sock.connect({net::ip::make_address("127.0.0.1"), port_});
  websocket::stream<tcp::socket> ws(std::move(sock));
  ws.handshake("localhost", "/sessions/" + id + "/ws");
  ws.text(true);
  auto exchange = [&](const json& msg) {
    ws.write(net::buffer(msg.dump()));
    beast::flat_buffer buf;
    ws.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  };

  const json first = exchange({{"type", "get_snapshot"}});
  const std::size_t n = first["nodes"].size();
  EXPECT_EQ(first["type"], "snapshot");
  EXPECT_EQ(first["maxent_layout"].size(), n);

  json s = exchange({{"type", "set_cutoff"}, {"value", 7.0}});
  EXPECT_EQ(s["config"]["cutoff"], 7.0);
  EXPECT_EQ(s["nodes"].size(), n);
  EXPECT_EQ(s["protein_layout"].size(), n);
  EXPECT_EQ(s["edges"].size(), server_->registry().state(id)->rin->edge_count());

  s = exchange({{"type", "toggle_delta"}, {"value", true}});
  EXPECT_TRUE(s["delta_view"].get<bool>());
  s = exchange({{"type", "toggle_auto"}});
  EXPECT_FALSE(s["auto_recompute"].get<bool>());
  s = exchange({{"type", "set_frame"}, {"value", 1}});
  EXPECT_TRUE(s["stale"].get<bool>());
  s = exchange({{"type", "recompute"}});
  EXPECT_FALSE(s["stale"].get<bool>());
  EXPECT_EQ(s["frame"], 1);

  const json err = exchange({{"type", "set_measure"}, {"value", "eigen"}});
  EXPECT_EQ(err["type"], "error");
  EXPECT_EQ(err["code"], "invalid_payload");
  EXPECT_FALSE(err["message"].get<std::string>().empty());
  // The session survives a bad message.
  EXPECT_EQ(exchange({{"type", "get_snapshot"}})["frame"], 1);
  ws.close(websocket::close_code::normal);
}

TEST_F(ServerTest, WebSocketUnknownSession) {
  net::io_context ioc;
  tcp::socket sock(ioc);
  sock.connect({net::ip::make_address("127.0.0.1"), port_});
  websocket::stream<tcp::socket> ws(std::move(sock));
  boost::system::error_code ec;
  ws.handshake("localhost", "/sessions/nope/ws", ec);
  EXPECT_TRUE(ec);
}

TEST_F(ServerTest, StopDumpsSessions) {
  const std::string id = create({{"path", "toy.json"}});
  server_->stop();
  EXPECT_TRUE(std::filesystem::exists(dir_ / "dump" / (id + ".json")));
}
