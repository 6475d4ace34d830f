#pragma once

// Interactive sessions: a live human supplies the human control each tick
// while the configured planner and inference run as in batch episodes.
//
// Protocol: one JSON object per line. Every message has "type", "session_id"
// (null before a session exists) and "seq". Client seq values are echoed in
// "reply_to"; server seq counts messages sent on the connection.
//
//   client -> server
//     hello  {}
//     config {"config": {...scenario...} | "scenario": "<bundled id>", "seed": n, "tick_budget_ms": n}
//     act    {"action": <human control> | null}   null holds the previous control
//     end    {}
//   server -> client
//     hello  {"schema_version", "scenarios": [ids]}
//     state  {"tick", "state", "legal_actions", "robot_plan", "done"}
//     tick   {"record": <log tick record>, "state", "legal_actions", "done", "compute_ms", "metrics"?}
//     belief {"belief": {...} | null}
//     end    {"log": [records...], "path"?}
//     error  {"code", "message", "path"?}

#include <atomic>
#include <functional>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hri/harness.hpp"

namespace hri {

inline constexpr int kProtocolVersion = 1;

class SessionManager {
public:
    // `scenarios` are the bundled configs addressable by id; `log_dir`, when
    // set, receives one log per ended session.
    explicit SessionManager(std::vector<Scenario> scenarios = {},
                            std::optional<std::filesystem::path> log_dir = std::nullopt);

    // Handles one client message. `out_seq` is the connection's server
    // sequence counter. Never throws for client mistakes; they become
    // error messages.
    std::vector<json> handle(const json& msg, std::uint64_t& out_seq);

    // Convenience for in-process clients.
    std::vector<json> handle(const std::string& line, std::uint64_t& out_seq);

    std::size_t session_count() const;
    // Recorded robot compute time per tick, milliseconds, across sessions.
    std::vector<double> tick_latencies() const;

private:
    struct Session {
        std::mutex mu;
        std::string id;
        std::unique_ptr<Episode> episode;
        std::vector<json> ticks;
        json last_action;
        double budget_ms = 0.0;
        std::optional<RunLog> final_log;
    };

    std::shared_ptr<Session> find(const std::string& id) const;
    std::vector<json> on_config(const json& msg, std::uint64_t& seq);
    std::vector<json> on_act(Session& s, const json& msg, std::uint64_t& seq);
    std::vector<json> on_end(Session& s, const json& msg, std::uint64_t& seq);

    std::map<std::string, Scenario> bundled_;
    std::optional<std::filesystem::path> log_dir_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 0;
    std::vector<double> latencies_;
};

// Serves the protocol over TCP on host:port until `stop` becomes true; one
// thread per connection. Returns the bound port (useful with port 0) via
// `on_listen` before accepting.
void serve(SessionManager& manager, const std::string& host, int port, const std::atomic<bool>& stop,
           const std::function<void(int)>& on_listen = {});

}  // namespace hri
