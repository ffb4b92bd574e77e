#pragma once

#include <string>
#include <thread>

#include <httplib.h>

#include "pipeline.hpp"

namespace ambigate {

// HTTP front end over one immutable pipeline. Requests run concurrently on
// httplib's worker pool; the pipeline is read-only.
class GateService {
public:
    explicit GateService(const AppConfig& config);
    ~GateService();

    GateService(const GateService&) = delete;
    GateService& operator=(const GateService&) = delete;

    // Binds and serves on a background thread; port 0 picks a free port.
    // Returns false when the address cannot be bound.
    bool start(const std::string& host, int port);
    void stop();

    // Blocks until stop() is called from another thread or the process ends.
    void join();

    int port() const { return port_; }

private:
    void setup_routes();

    GatePipeline pipeline_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = -1;
};

}  // namespace ambigate
