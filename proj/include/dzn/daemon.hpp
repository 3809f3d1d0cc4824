#pragma once

#include "dzn/simulate.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>

namespace dzn::daemon {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

/// Frontend diagnostics as {kind, message, locs, text}.
Json diagnostics_json(const std::vector<Diagnostic>& diagnostics);

/// Sequence diagram of a simulation state: lifelines, events, next steps and verdict.
Json diagram_json(const simulate::SimulationState& s);

struct Options {
    std::chrono::seconds idle_timeout{3600};
    std::filesystem::path static_dir;  // served below /static/; empty serves nothing
    std::size_t bound = lts::default_bound;
    std::function<Clock::time_point()> clock = [] { return Clock::now(); };
};

/// Simulation sessions behind a loopback HTTP server.
class Daemon {
public:
    explicit Daemon(Options options = {});
    ~Daemon();
    Daemon(const Daemon&) = delete;
    Daemon& operator=(const Daemon&) = delete;

    /// Binds host:port (0 picks a free port) and serves on a background thread; returns the port.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    /// Serves on the calling thread until stop().
    bool run(const std::string& host, int port);
    void stop();

    std::size_t session_count() const;
    /// Drops sessions idle longer than the timeout; returns how many went.
    std::size_t expire();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace dzn::daemon
