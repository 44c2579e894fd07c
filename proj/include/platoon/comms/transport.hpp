#pragma once

// How wire requests reach the CoordinationService: a direct call (sim) or a
// real HTTP round trip to an HttpServer (service mode).

#include <memory>
#include <string>
#include <string_view>

#include "platoon/comms/server.hpp"

namespace platoon::comms {

class Transport {
public:
    virtual ~Transport() = default;
    // `body` is the encoded request; /system-state takes an encoded PollRequest.
    virtual Response call(std::string_view path, const std::string& body) = 0;
};

class InProcessTransport final : public Transport {
public:
    explicit InProcessTransport(CoordinationService& service) : service_(service) {}
    Response call(std::string_view path, const std::string& body) override;

private:
    CoordinationService& service_;
};

// Serves the endpoints on a background thread. GET /system-state reads
// agent_id and tick from the query string; everything else is a POST with a
// JSON body.
class HttpServer {
public:
    explicit HttpServer(CoordinationService& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds and starts listening; port 0 picks a free port. Returns the port.
    int start(const std::string& host, int port);
    // Blocks the calling thread until stop() is called from elsewhere.
    void listen_blocking(const std::string& host, int port);
    void stop();
    int port() const { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

// Status 503 with an ErrorBody when the connection fails.
class HttpTransport final : public Transport {
public:
    HttpTransport(const std::string& host, int port);
    ~HttpTransport() override;
    Response call(std::string_view path, const std::string& body) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace platoon::comms
