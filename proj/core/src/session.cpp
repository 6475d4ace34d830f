#include "hri/session.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <thread>

namespace hri {

namespace {

json message(const char* type, const json& session_id, std::uint64_t& seq, const json& reply_to) {
    return json{{"type", type}, {"session_id", session_id}, {"seq", seq++}, {"reply_to", reply_to}};
}

json error_message(const json& session_id, std::uint64_t& seq, const json& reply_to, const std::string& code,
                   const std::string& what, const std::string& path = {}) {
    json m = message("error", session_id, seq, reply_to);
    m["code"] = code;
    m["message"] = what;
    if (!path.empty()) m["path"] = path;
    return m;
}

}  // namespace

SessionManager::SessionManager(std::vector<Scenario> scenarios, std::optional<std::filesystem::path> log_dir)
    : log_dir_(std::move(log_dir)) {
    for (auto& sc : scenarios) {
        auto id = sc.id;
        bundled_.emplace(std::move(id), std::move(sc));
    }
}

std::size_t SessionManager::session_count() const {
    std::lock_guard lock(mu_);
    return sessions_.size();
}

std::vector<double> SessionManager::tick_latencies() const {
    std::lock_guard lock(mu_);
    return latencies_;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::vector<json> SessionManager::handle(const std::string& line, std::uint64_t& out_seq) {
    json msg;
    try {
        msg = json::parse(line);
    } catch (const json::parse_error& e) {
        return {error_message(nullptr, out_seq, nullptr, "malformed", e.what())};
    }
    return handle(msg, out_seq);
}

std::vector<json> SessionManager::handle(const json& msg, std::uint64_t& seq) {
    if (!msg.is_object() || !msg.contains("type") || !msg.at("type").is_string()) {
        return {error_message(nullptr, seq, nullptr, "malformed", "message must be an object with a string type")};
    }
    const json reply_to = msg.value("seq", json());
    const std::string type = msg.at("type").get<std::string>();
    if (type == "hello") {
        json m = message("hello", nullptr, seq, reply_to);
        m["schema_version"] = kProtocolVersion;
        m["log_schema_version"] = kLogSchemaVersion;
        json ids = json::array();
        for (const auto& [id, sc] : bundled_) ids.push_back(id);
        m["scenarios"] = ids;
        return {m};
    }
    if (type == "config") return on_config(msg, seq);
    if (type != "act" && type != "end") {
        return {error_message(msg.value("session_id", json()), seq, reply_to, "unknown_type",
                              "unknown message type '" + type + "'")};
    }
    const json sid = msg.value("session_id", json());
    auto s = sid.is_string() ? find(sid.get<std::string>()) : nullptr;
    if (!s) return {error_message(sid, seq, reply_to, "unknown_session", "no session " + sid.dump())};
    std::lock_guard lock(s->mu);
    return type == "act" ? on_act(*s, msg, seq) : on_end(*s, msg, seq);
}

std::vector<json> SessionManager::on_config(const json& msg, std::uint64_t& seq) {
    const json reply_to = msg.value("seq", json());
    Scenario sc;
    std::uint64_t seed = 0;
    double budget = 100.0;
    try {
        if (msg.contains("config")) {
            sc = parse_scenario(msg.at("config"));
        } else if (msg.contains("scenario") && msg.at("scenario").is_string()) {
            auto it = bundled_.find(msg.at("scenario").get<std::string>());
            if (it == bundled_.end()) throw ConfigError("unknown scenario", "/scenario");
            sc = it->second;
        } else {
            throw ConfigError("config message needs 'config' or 'scenario'", "/config");
        }
        if (msg.contains("seed")) {
            if (!msg.at("seed").is_number_integer() || msg.at("seed").get<std::int64_t>() < 0) throw ConfigError("seed must be a non-negative integer", "/seed");
            seed = msg.at("seed").get<std::uint64_t>();
        }
        if (msg.contains("tick_budget_ms")) {
            if (!msg.at("tick_budget_ms").is_number() || msg.at("tick_budget_ms").get<double>() <= 0.0) {
                throw ConfigError("tick_budget_ms must be positive", "/tick_budget_ms");
            }
            budget = msg.at("tick_budget_ms").get<double>();
        }
    } catch (const ConfigError& e) {
        return {error_message(nullptr, seq, reply_to, "invalid_config", e.what(), e.path())};
    }
    auto s = std::make_shared<Session>();
    try {
        s->episode = make_episode(sc, seed);
    } catch (const ConfigError& e) {
        return {error_message(nullptr, seq, reply_to, "invalid_config", e.what(), e.path())};
    } catch (const std::exception& e) {
        return {error_message(nullptr, seq, reply_to, "invalid_config", e.what())};
    }
    s->budget_ms = budget;
    if (sc.domain == DomainKind::gridworld) s->last_action = "stay";
    if (sc.domain == DomainKind::driving) s->last_action = json::array({0.0, 0.0});
    {
        std::lock_guard lock(mu_);
        s->id = "s" + std::to_string(++next_id_);
        sessions_[s->id] = s;
    }
    std::lock_guard lock(s->mu);
    Episode& ep = *s->episode;
    json st = message("state", s->id, seq, reply_to);
    st["scenario"] = sc.id;
    st["seed"] = seed;
    st["tick"] = ep.tick();
    st["state"] = ep.state();
    st["legal_actions"] = ep.done() ? json::array() : ep.legal_human_actions();
    st["robot_plan"] = ep.done() ? json() : ep.robot_plan();
    st["done"] = ep.done();
    json b = message("belief", s->id, seq, reply_to);
    b["belief"] = ep.belief();
    return {st, b};
}

std::vector<json> SessionManager::on_act(Session& s, const json& msg, std::uint64_t& seq) {
    const json reply_to = msg.value("seq", json());
    Episode& ep = *s.episode;
    if (s.final_log) return {error_message(s.id, seq, reply_to, "ended", "session has ended")};
    if (ep.done()) return {error_message(s.id, seq, reply_to, "episode_over", "episode is over; send end")};
    json action = msg.value("action", json());
    if (action.is_null()) {
        if (s.last_action.is_null()) {
            return {error_message(s.id, seq, reply_to, "illegal_action", "no previous action to hold")};
        }
        action = s.last_action;
    }
    const auto t0 = std::chrono::steady_clock::now();
    json record;
    try {
        record = ep.advance(&action);
    } catch (const ArgumentError& e) {
        return {error_message(s.id, seq, reply_to, "illegal_action", e.what())};
    } catch (const DomainError& e) {
        return {error_message(s.id, seq, reply_to, "illegal_action", e.what())};
    } catch (const std::exception& e) {
        return {error_message(s.id, seq, reply_to, "internal", e.what())};
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    {
        std::lock_guard lock(mu_);
        latencies_.push_back(ms);
    }
    s.last_action = action;
    s.ticks.push_back(record);
    json m = message("tick", s.id, seq, reply_to);
    m["record"] = record;
    m["state"] = ep.state();
    m["done"] = ep.done();
    m["legal_actions"] = ep.done() ? json::array() : ep.legal_human_actions();
    m["compute_ms"] = ms;
    m["over_budget"] = ms > s.budget_ms;
    if (ep.done()) m["metrics"] = metrics_to_json(ep.metrics());
    json b = message("belief", s.id, seq, reply_to);
    b["belief"] = ep.belief();
    return {m, b};
}

std::vector<json> SessionManager::on_end(Session& s, const json& msg, std::uint64_t& seq) {
    const json reply_to = msg.value("seq", json());
    json m = message("end", s.id, seq, reply_to);
    if (!s.final_log) {
        s.final_log = make_log(*s.episode, s.ticks);
        if (log_dir_) {
            const auto file = *log_dir_ / ("session-" + s.id + ".jsonl");
            write_log(*s.final_log, file);
        }
    }
    json records = json::array();
    records.push_back(s.final_log->header);
    for (const auto& t : s.final_log->ticks) records.push_back(t);
    records.push_back(s.final_log->final);
    m["log"] = std::move(records);
    if (log_dir_) m["path"] = (*log_dir_ / ("session-" + s.id + ".jsonl")).string();
    return {m};
}

namespace {

bool send_all(int fd, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        off += static_cast<std::size_t>(n);
    }
    return true;
}

void serve_connection(SessionManager& manager, int fd, const std::atomic<bool>& stop) {
    std::uint64_t seq = 0;
    std::string buf;
    char chunk[4096];
    while (!stop) {
        pollfd p{fd, POLLIN, 0};
        const int r = ::poll(&p, 1, 200);
        if (r < 0 && errno != EINTR) break;
        if (r <= 0) continue;
        const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n <= 0) break;
        buf.append(chunk, static_cast<std::size_t>(n));
        std::size_t nl;
        bool ok = true;
        while (ok && (nl = buf.find('\n')) != std::string::npos) {
            const std::string line = buf.substr(0, nl);
            buf.erase(0, nl + 1);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::string out;
            for (const auto& m : manager.handle(line, seq)) out += m.dump() + "\n";
            ok = send_all(fd, out);
        }
        if (!ok) break;
    }
    ::close(fd);
}

}  // namespace

void serve(SessionManager& manager, const std::string& host, int port, const std::atomic<bool>& stop,
           const std::function<void(int)>& on_listen) {
    const int lfd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (lfd < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(lfd);
        throw ArgumentError("invalid listen address '" + host + "'");
    }
    if (::bind(lfd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(lfd, 16) < 0) {
        const std::string err = std::strerror(errno);
        ::close(lfd);
        throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port) + ": " + err);
    }
    socklen_t len = sizeof addr;
    ::getsockname(lfd, reinterpret_cast<sockaddr*>(&addr), &len);
    if (on_listen) on_listen(ntohs(addr.sin_port));
    std::vector<std::thread> workers;
    while (!stop) {
        pollfd p{lfd, POLLIN, 0};
        const int r = ::poll(&p, 1, 200);
        if (r <= 0) continue;
        const int fd = ::accept(lfd, nullptr, nullptr);
        if (fd < 0) continue;
        workers.emplace_back(serve_connection, std::ref(manager), fd, std::cref(stop));
    }
    ::close(lfd);
    for (auto& w : workers) w.join();
}

}  // namespace hri
