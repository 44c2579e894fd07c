#include "platoon/comms/transport.hpp"

#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace platoon::comms {

namespace {
constexpr const char* kJson = "application/json";
}

Response InProcessTransport::call(std::string_view path, const std::string& body)
{
    return service_.handle(path, body);
}

struct HttpServer::Impl {
    httplib::Server server;
    std::thread thread;
};

HttpServer::HttpServer(CoordinationService& service) : impl_(std::make_unique<Impl>())
{
    auto& srv = impl_->server;
    // Small request/response pairs otherwise stall on delayed ACKs.
    srv.set_tcp_nodelay(true);
    auto reply = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body, kJson);
    };
    auto post = [&service, reply](std::string_view path) {
        return [&service, reply, path](const httplib::Request& req, httplib::Response& res) {
            reply(res, service.handle(path, req.body));
        };
    };
    srv.Post(std::string(endpoint::kStatus), post(endpoint::kStatus));
    srv.Post(std::string(endpoint::kPerception), post(endpoint::kPerception));
    srv.Post(std::string(endpoint::kLatchCommand), post(endpoint::kLatchCommand));
    srv.Post(std::string(endpoint::kResolveStop), post(endpoint::kResolveStop));
    srv.Get(std::string(endpoint::kSystemState),
            [&service, reply](const httplib::Request& req, httplib::Response& res) {
                PollRequest poll;
                poll.agent_id = req.get_param_value("agent_id");
                try {
                    poll.tick = std::stoll(req.get_param_value("tick"));
                } catch (const std::exception&) {
                    reply(res, {400, encode(ErrorBody{"query parameter 'tick' must be an integer"})});
                    return;
                }
                reply(res, service.handle(endpoint::kSystemState, encode(poll)));
            });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port)
{
    auto& srv = impl_->server;
    port_ = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
    if (port_ < 0) throw std::runtime_error("http: cannot bind " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([&srv] { srv.listen_after_bind(); });
    srv.wait_until_ready();
    spdlog::debug("http server listening on {}:{}", host, port_);
    return port_;
}

void HttpServer::listen_blocking(const std::string& host, int port)
{
    port_ = port;
    spdlog::info("listening on {}:{}", host, port);
    if (!impl_->server.listen(host, port))
        throw std::runtime_error("http: cannot listen on " + host + ":" + std::to_string(port));
}

void HttpServer::stop()
{
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

struct HttpTransport::Impl {
    httplib::Client client;
    Impl(const std::string& host, int port) : client(host, port) {}
};

HttpTransport::HttpTransport(const std::string& host, int port)
    : impl_(std::make_unique<Impl>(host, port))
{
    impl_->client.set_keep_alive(true);
    impl_->client.set_tcp_nodelay(true);
}

HttpTransport::~HttpTransport() = default;

Response HttpTransport::call(std::string_view path, const std::string& body)
{
    httplib::Result res;
    if (path == endpoint::kSystemState) {
        PollRequest poll;
        try {
            poll = decode<PollRequest>(body);
        } catch (const InvalidInput& e) {
            return {400, encode(ErrorBody{e.what()})};
        }
        httplib::Params params{{"agent_id", poll.agent_id}, {"tick", std::to_string(poll.tick)}};
        res = impl_->client.Get(std::string(path), params, httplib::Headers{});
    } else {
        res = impl_->client.Post(std::string(path), body, kJson);
    }
    if (!res) return {503, encode(ErrorBody{"http: " + httplib::to_string(res.error())})};
    return {res->status, res->body};
}

}  // namespace platoon::comms
