#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <future>
#include <thread>

#include "fixtures.hpp"
#include "hri/session.hpp"

using namespace hri;
using namespace hri::testing;

namespace {

class Client {
public:
    explicit Client(SessionManager& m) : m_(m) {}

    std::vector<json> send(json msg) {
        msg["seq"] = next_++;
        if (!sid_.is_null() && !msg.contains("session_id")) msg["session_id"] = sid_;
        auto out = m_.handle(msg, seq_);
        for (const auto& r : out) {
            if (r.at("type") == "state") sid_ = r.at("session_id");
        }
        return out;
    }

    const json& session_id() const { return sid_; }

private:
    SessionManager& m_;
    std::uint64_t seq_ = 0;
    std::uint64_t next_ = 0;
    json sid_;
};

json wander_scenario() {
    return json::parse(R"({
      "schema_version": 1, "id": "wander",
      "domain": {"kind": "gridworld", "width": 12, "height": 12,
                 "targets": [[11, 0], [0, 11], [11, 11]], "robot": [0, 0], "human": [5, 5], "horizon": 40},
      "human": {"kind": "scripted", "actions": []},
      "planner": {"kind": "reactive"},
      "seeds": [0]
    })");
}

std::vector<std::string> twenty_actions() {
    std::vector<std::string> a;
    const char* cycle[] = {"up", "left", "down", "right", "stay"};
    for (int i = 0; i < 20; ++i) a.push_back(cycle[i % 5]);
    return a;
}

}  // namespace

TEST(Session, HelloListsScenarios) {
    SessionManager m({load_scenario(scenario_dir() / "collab-fixed.json")});
    Client c(m);
    const auto r = c.send({{"type", "hello"}});
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].at("type"), "hello");
    EXPECT_EQ(r[0].at("schema_version"), kProtocolVersion);
    EXPECT_EQ(r[0].at("scenarios"), json::array({"collab-fixed"}));
    EXPECT_EQ(r[0].at("reply_to"), 0);
    EXPECT_EQ(r[0].at("seq"), 0);
}

TEST(Session, ConfigActEndLifecycle) {
    SessionManager m({load_scenario(scenario_dir() / "collab-predictive.json")});
    Client c(m);
    auto r = c.send({{"type", "config"}, {"scenario", "collab-predictive"}, {"seed", 3}});
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].at("type"), "state");
    EXPECT_EQ(r[0].at("tick"), 0);
    EXPECT_EQ(r[0].at("done"), false);
    EXPECT_FALSE(r[0].at("legal_actions").empty());
    EXPECT_TRUE(r[0].contains("robot_plan"));
    EXPECT_EQ(r[1].at("type"), "belief");
    const auto& p = r[1].at("belief").at("p");
    EXPECT_NEAR(p[0].get<double>() + p[1].get<double>(), 1.0, 1e-12);

    r = c.send({{"type", "act"}, {"action", "right"}});
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].at("type"), "tick");
    EXPECT_EQ(r[0].at("record").at("u_h"), "right");
    EXPECT_EQ(r[0].at("state").at("human"), json::array({1, 0}));
    EXPECT_TRUE(r[0].contains("compute_ms"));

    r = c.send({{"type", "act"}, {"action", nullptr}});  // hold
    EXPECT_EQ(r[0].at("record").at("u_h"), "right");

    r = c.send({{"type", "end"}});
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].at("type"), "end");
    const auto& log = r[0].at("log");
    ASSERT_EQ(log.size(), 4u);
    EXPECT_EQ(log.front().at("type"), "header");
    EXPECT_EQ(log.back().at("type"), "final");
}

TEST(Session, ServerSeqCountsAndRepliesEchoClientSeq) {
    SessionManager m({load_scenario(scenario_dir() / "collab-fixed.json")});
    Client c(m);
    c.send({{"type", "hello"}});
    const auto r = c.send({{"type", "config"}, {"scenario", "collab-fixed"}});
    EXPECT_EQ(r[0].at("seq"), 1);
    EXPECT_EQ(r[1].at("seq"), 2);
    EXPECT_EQ(r[0].at("reply_to"), 1);
}

TEST(Session, MalformedInputs) {
    SessionManager m;
    std::uint64_t seq = 0;
    auto r = m.handle(std::string("{not json"), seq);
    EXPECT_EQ(r[0].at("code"), "malformed");
    r = m.handle(json::array({1, 2}), seq);
    EXPECT_EQ(r[0].at("code"), "malformed");
    r = m.handle(json{{"type", "dance"}}, seq);
    EXPECT_EQ(r[0].at("code"), "unknown_type");
    r = m.handle(json{{"type", "act"}, {"session_id", "s42"}, {"action", "up"}}, seq);
    EXPECT_EQ(r[0].at("code"), "unknown_session");
    EXPECT_EQ(m.session_count(), 0u);
}

TEST(Session, InvalidConfigReportsFieldPath) {
    SessionManager m;
    Client c(m);
    auto cfg = wander_scenario();
    cfg["domain"].erase("width");
    auto r = c.send({{"type", "config"}, {"config", cfg}});
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].at("code"), "invalid_config");
    EXPECT_EQ(r[0].at("path"), "/domain/width");
    r = c.send({{"type", "config"}, {"scenario", "nope"}});
    EXPECT_EQ(r[0].at("path"), "/scenario");
    r = c.send({{"type", "config"}, {"config", wander_scenario()}, {"tick_budget_ms", -5}});
    EXPECT_EQ(r[0].at("path"), "/tick_budget_ms");
    EXPECT_EQ(m.session_count(), 0u);
}

TEST(Session, IllegalMoveLeavesStateUnchanged) {
    SessionManager m;
    Client c(m);
    auto cfg = wander_scenario();
    cfg["domain"]["human"] = json::array({0, 5});
    const auto start = c.send({{"type", "config"}, {"config", cfg}});
    auto r = c.send({{"type", "act"}, {"action", "left"}});  // off the grid
    EXPECT_EQ(r[0].at("code"), "illegal_action");
    r = c.send({{"type", "act"}, {"action", "sideways"}});
    EXPECT_EQ(r[0].at("code"), "illegal_action");
    r = c.send({{"type", "act"}, {"action", "up"}});
    EXPECT_EQ(r[0].at("record").at("t"), 0);  // first accepted tick
}

TEST(Session, SessionsAreIndependent) {
    SessionManager m;
    Client a(m), b(m);
    a.send({{"type", "config"}, {"config", wander_scenario()}});
    b.send({{"type", "config"}, {"config", wander_scenario()}});
    EXPECT_NE(a.session_id(), b.session_id());
    a.send({{"type", "act"}, {"action", "up"}});
    a.send({{"type", "act"}, {"action", "up"}});
    const auto rb = b.send({{"type", "act"}, {"action", "down"}});
    EXPECT_EQ(rb[0].at("record").at("t"), 0);
    EXPECT_EQ(rb[0].at("state").at("human"), json::array({5, 4}));
    EXPECT_EQ(m.session_count(), 2u);
}

TEST(Session, EndImmediatelyGivesEmptyLogAndIsIdempotent) {
    SessionManager m;
    Client c(m);
    c.send({{"type", "config"}, {"config", wander_scenario()}});
    const auto first = c.send({{"type", "end"}});
    ASSERT_EQ(first[0].at("log").size(), 2u);  // header + final
    const auto again = c.send({{"type", "end"}});
    EXPECT_EQ(again[0].at("log"), first[0].at("log"));
    const auto act = c.send({{"type", "act"}, {"action", "up"}});
    EXPECT_EQ(act[0].at("code"), "ended");
}

TEST(Session, ActAfterEpisodeOverIsRejected) {
    SessionManager m;
    Client c(m);
    auto cfg = wander_scenario();
    cfg["domain"]["horizon"] = 2;
    c.send({{"type", "config"}, {"config", cfg}});
    c.send({{"type", "act"}, {"action", "up"}});
    const auto last = c.send({{"type", "act"}, {"action", "up"}});
    EXPECT_EQ(last[0].at("done"), true);
    EXPECT_TRUE(last[0].contains("metrics"));
    EXPECT_EQ(c.send({{"type", "act"}, {"action", "up"}})[0].at("code"), "episode_over");
}

TEST(Session, ScriptedSessionEqualsBatchLog) {
    const auto actions = twenty_actions();
    auto cfg = wander_scenario();
    cfg["human"]["actions"] = actions;
    const auto batch = run_episode(parse_scenario(cfg), 0);
    ASSERT_GE(batch.ticks.size(), 20u);

    const auto dir = std::filesystem::temp_directory_path() / "hrigame-test-session";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    SessionManager m({}, dir);
    Client c(m);
    c.send({{"type", "config"}, {"config", cfg}, {"seed", 0}});
    for (const auto& a : actions) {
        const auto r = c.send({{"type", "act"}, {"action", a}});
        ASSERT_EQ(r[0].at("type"), "tick") << r[0].dump();
    }
    // Let the scripted remainder (stays) run to the horizon as the batch run does.
    while (true) {
        const auto r = c.send({{"type", "act"}, {"action", "stay"}});
        if (r[0].at("type") != "tick" || r[0].at("done") == true) break;
    }
    const auto end = c.send({{"type", "end"}});
    const auto session = read_log(end[0].at("path").get<std::string>());
    EXPECT_EQ(session.to_jsonl(), batch.to_jsonl());
    EXPECT_TRUE(replay(session).exact);
    std::filesystem::remove_all(dir);
}

TEST(Session, GridTickLatencyWithinBudget) {
    SessionManager m({load_scenario(scenario_dir() / "collab-predictive.json")});
    for (int s = 0; s < 5; ++s) {
        Client c(m);
        c.send({{"type", "config"}, {"scenario", "collab-predictive"}, {"seed", s}});
        for (int t = 0; t < 30; ++t) {
            const auto r = c.send({{"type", "act"}, {"action", "stay"}});
            if (r[0].at("type") != "tick" || r[0].at("done") == true) break;
        }
    }
    auto lat = m.tick_latencies();
    ASSERT_FALSE(lat.empty());
    std::sort(lat.begin(), lat.end());
    const double p99 = lat[static_cast<std::size_t>(0.99 * static_cast<double>(lat.size() - 1))];
    EXPECT_LE(p99, 100.0);
}

TEST(Session, TcpRoundTrip) {
    SessionManager m({load_scenario(scenario_dir() / "collab-fixed.json")});
    std::atomic<bool> stop{false};
    std::promise<int> port_promise;
    std::thread server([&] { serve(m, "127.0.0.1", 0, stop, [&](int p) { port_promise.set_value(p); }); });
    const int port = port_promise.get_future().get();

    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    ASSERT_EQ(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
    const std::string req = "{\"type\":\"hello\",\"seq\":5}\n{\"type\":\"config\",\"scenario\":\"collab-fixed\",\"seq\":6}\n";
    ASSERT_EQ(::send(fd, req.data(), req.size(), 0), static_cast<ssize_t>(req.size()));
    std::string buf;
    char chunk[4096];
    while (std::count(buf.begin(), buf.end(), '\n') < 3) {
        const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        ASSERT_GT(n, 0);
        buf.append(chunk, static_cast<std::size_t>(n));
    }
    ::close(fd);
    stop = true;
    server.join();

    std::vector<json> msgs;
    std::size_t pos = 0, nl;
    while ((nl = buf.find('\n', pos)) != std::string::npos) {
        msgs.push_back(json::parse(buf.substr(pos, nl - pos)));
        pos = nl + 1;
    }
    ASSERT_EQ(msgs.size(), 3u);
    EXPECT_EQ(msgs[0].at("type"), "hello");
    EXPECT_EQ(msgs[0].at("reply_to"), 5);
    EXPECT_EQ(msgs[1].at("type"), "state");
    EXPECT_EQ(msgs[1].at("reply_to"), 6);
    EXPECT_EQ(msgs[2].at("type"), "belief");
    EXPECT_EQ(msgs[2].at("seq"), 2);
}
