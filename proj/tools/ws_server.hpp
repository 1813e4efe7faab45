#pragma once

#include <memory>

#include "panto/session.hpp"

namespace panto {

// Serves the JSON-lines protocol over websocket text frames, one message per frame.
// Every connection gets its own session.
class WsServer {
public:
    // Port 0 picks a free port; see port().
    WsServer(unsigned short port, SchedulerConfig cfg = {});
    ~WsServer();
    unsigned short port() const;
    // Blocks until stop() is called from another thread.
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace panto
