#include "hri/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <istream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace hri {

std::string RunLog::to_jsonl() const {
    std::string out = header.dump();
    out += '\n';
    for (const auto& t : ticks) {
        out += t.dump();
        out += '\n';
    }
    out += final.dump();
    out += '\n';
    return out;
}

RunLog RunLog::parse(std::istream& in) {
    RunLog log;
    std::string line;
    int n = 0;
    bool seen_final = false;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw FormatError("line " + std::to_string(n) + ": " + e.what());
        }
        const std::string type = rec.value("type", "");
        if (n == 1) {
            if (type != "header") throw FormatError("first record must be a header");
            if (rec.value("schema_version", -1) != kLogSchemaVersion) {
                throw FormatError("unsupported log schema_version " + rec.value("schema_version", json()).dump());
            }
            log.header = std::move(rec);
        } else if (type == "tick") {
            if (seen_final) throw FormatError("tick record after the final record");
            log.ticks.push_back(std::move(rec));
        } else if (type == "final") {
            log.final = std::move(rec);
            seen_final = true;
        } else {
            throw FormatError("line " + std::to_string(n) + ": unknown record type '" + type + "'");
        }
    }
    if (log.header.is_null()) throw FormatError("empty log");
    if (!seen_final) throw FormatError("log has no final record");
    return log;
}

RunLog make_log(const Episode& episode, std::vector<json> ticks) {
    RunLog log;
    log.header = episode.header();
    log.ticks = std::move(ticks);
    log.final = json{{"type", "final"}, {"metrics", metrics_to_json(episode.metrics())}};
    return log;
}

RunLog run_episode(const Scenario& scenario, std::uint64_t seed) {
    auto ep = make_episode(scenario, seed);
    std::vector<json> ticks;
    while (!ep->done()) ticks.push_back(ep->advance());
    return make_log(*ep, std::move(ticks));
}

void write_log(const RunLog& log, const std::filesystem::path& file) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    {
        std::ofstream out(file, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + file.string());
        out << log.to_jsonl();
    }
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    std::ofstream meta(file.string() + ".meta.json");
    meta << json{{"written_at", ts.str()}, {"log", file.filename().string()}}.dump() << '\n';
}

RunLog read_log(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    return RunLog::parse(in);
}

std::string ReplayReport::summary() const {
    if (exact) return "exact";
    std::string s = "divergence";
    if (tick >= 0) s += " at tick " + std::to_string(tick);
    s += ": " + field;
    if (!detail.empty()) s += " (" + detail + ")";
    return s;
}

namespace {

// Structural equality with an absolute tolerance on floating-point leaves.
bool close(const json& a, const json& b, double tol) {
    if (a.is_number() && b.is_number()) {
        if (a.is_number_float() || b.is_number_float()) {
            const double x = a.get<double>(), y = b.get<double>();
            return x == y || std::abs(x - y) <= tol;
        }
        return a == b;
    }
    if (a.type() != b.type()) return false;
    if (a.is_array()) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!close(a[i], b[i], tol)) return false;
        }
        return true;
    }
    if (a.is_object()) {
        if (a.size() != b.size()) return false;
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key()) || !close(it.value(), b.at(it.key()), tol)) return false;
        }
        return true;
    }
    return a == b;
}

}  // namespace

ReplayReport replay(const RunLog& log, double belief_tolerance) {
    if (log.header.value("schema_version", -1) != kLogSchemaVersion) throw FormatError("unsupported log schema_version");
    const Scenario sc = parse_scenario(log.header.at("config"));
    const auto seed = log.header.at("seed").get<std::uint64_t>();
    auto ep = make_episode(sc, seed);
    ReplayReport rep;
    if (ep->header() != log.header) {
        rep.exact = false;
        rep.field = "header";
        rep.detail = "initial state or config differs";
        return rep;
    }
    for (std::size_t i = 0; i < log.ticks.size(); ++i) {
        const json& logged = log.ticks[i];
        const int t = static_cast<int>(i);
        json again;
        try {
            again = ep->reapply(logged);
        } catch (const json::exception& e) {
            throw FormatError("tick " + std::to_string(t) + ": " + e.what());
        }
        auto diverge = [&](const char* field, std::string detail = {}) {
            rep.exact = false;
            rep.tick = t;
            rep.field = field;
            rep.detail = std::move(detail);
        };
        if (logged.value("t", -1) != t) {
            diverge("controls", "tick index out of sequence");
        } else if (again.at("state") != logged.at("state")) {
            diverge("state", "logged " + logged.at("state").dump() + ", replayed " + again.at("state").dump());
        } else if (!close(again.at("rewards"), logged.at("rewards"), 0.0)) {
            diverge("rewards");
        } else if (!close(again.at("belief"), logged.at("belief"), belief_tolerance)) {
            diverge("belief");
        }
        if (!rep.exact) return rep;
    }
    const json recomputed = metrics_to_json(ep->metrics());
    if (!log.final.contains("metrics") || !close(recomputed, log.final.at("metrics"), belief_tolerance)) {
        rep.exact = false;
        rep.field = "final";
        rep.detail = "metrics differ from recomputation";
    }
    return rep;
}

std::vector<MetricsRow> run_suite(const std::vector<Scenario>& scenarios, const SuiteOptions& opts) {
    struct Job {
        const Scenario* sc;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& sc : scenarios) {
        for (auto s : opts.seeds ? *opts.seeds : sc.seeds) jobs.push_back({&sc, s});
    }
    std::vector<MetricsRow> rows(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size() && !failed; i = next++) {
            try {
                RunLog log = run_episode(*jobs[i].sc, jobs[i].seed);
                rows[i] = metrics_from_json(log.final.at("metrics"));
                if (opts.log_dir) {
                    write_log(log, *opts.log_dir / (jobs[i].sc->id + "-seed" + std::to_string(jobs[i].seed) + ".jsonl"));
                }
            } catch (...) {
                errors[i] = std::current_exception();
                failed = true;
            }
        }
    };
    const int n = std::max(1, opts.parallelism);
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < n; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const ConfigError& e) {
            throw EpisodeFailure(jobs[i].sc->id, jobs[i].seed, e.what(), true);
        } catch (const std::exception& e) {
            throw EpisodeFailure(jobs[i].sc->id, jobs[i].seed, e.what(), false);
        }
    }
    std::sort(rows.begin(), rows.end(), [](const MetricsRow& a, const MetricsRow& b) {
        return std::tie(a.scenario, a.seed) < std::tie(b.scenario, b.seed);
    });
    return rows;
}

namespace {

std::string fmt(double v) {
    std::ostringstream o;
    o << std::setprecision(17) << v;
    return o.str();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::set<std::string> extra_keys;
    for (const auto& r : rows) {
        for (const auto& [k, v] : r.extra) extra_keys.insert(k);
    }
    std::ostringstream out;
    out << "scenario,condition,seed,completion_time,robot_return,human_return,final_entropy_trace,"
           "final_posterior_on_truth,prediction_accuracy";
    for (const auto& k : extra_keys) out << ',' << k;
    out << '\n';
    for (const auto& r : rows) {
        out << csv_field(r.scenario) << ',' << r.condition << ',' << r.seed << ',' << fmt(r.completion_time) << ','
            << fmt(r.robot_return) << ',' << fmt(r.human_return) << ',';
        if (!r.belief_entropy_trace.empty()) out << fmt(r.belief_entropy_trace.back());
        out << ',';
        if (!r.posterior_on_truth.empty()) out << fmt(r.posterior_on_truth.back());
        out << ',';
        if (r.prediction_accuracy) out << fmt(*r.prediction_accuracy);
        for (const auto& k : extra_keys) {
            out << ',';
            if (auto it = r.extra.find(k); it != r.extra.end()) out << fmt(it->second);
        }
        out << '\n';
    }
    return out.str();
}

std::vector<PairedSummary> paired_summaries(const std::vector<MetricsRow>& rows,
                                            const std::vector<Scenario>& scenarios, int resamples,
                                            std::uint64_t seed) {
    std::map<std::string, std::vector<std::string>> groups;
    for (const auto& sc : scenarios) {
        if (!sc.pair_group.empty()) groups[sc.pair_group].push_back(sc.id);
    }
    auto value = [](const MetricsRow& r, const std::string& metric) -> std::optional<double> {
        if (metric == "completion_time") return r.completion_time;
        if (metric == "robot_return") return r.robot_return;
        if (metric == "human_return") return r.human_return;
        if (auto it = r.extra.find(metric); it != r.extra.end()) return it->second;
        return std::nullopt;
    };
    std::vector<PairedSummary> out;
    std::uint64_t stream = 0;
    for (auto& [group, ids] : groups) {
        std::sort(ids.begin(), ids.end());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (std::size_t k = i + 1; k < ids.size(); ++k) {
                std::map<std::uint64_t, const MetricsRow*> a, b;
                std::set<std::string> metrics{"completion_time", "robot_return", "human_return"};
                for (const auto& r : rows) {
                    if (r.scenario == ids[i]) a[r.seed] = &r;
                    if (r.scenario == ids[k]) b[r.seed] = &r;
                    if (r.scenario == ids[i] || r.scenario == ids[k]) {
                        for (const auto& [key, v] : r.extra) metrics.insert(key);
                    }
                }
                for (const auto& metric : metrics) {
                    std::vector<double> diffs;
                    for (const auto& [s, ra] : a) {
                        auto it = b.find(s);
                        if (it == b.end()) continue;
                        const auto va = value(*ra, metric), vb = value(*it->second, metric);
                        if (va && vb) diffs.push_back(*va - *vb);
                    }
                    ++stream;
                    if (diffs.empty()) continue;
                    PairedSummary p{group, metric, ids[i], ids[k], diffs.size(), {}};
                    p.diff = bootstrap_mean(diffs, resamples, 0.95, mix_seed(seed, stream));
                    out.push_back(p);
                }
            }
        }
    }
    return out;
}

std::string paired_csv(const std::vector<PairedSummary>& s) {
    std::ostringstream out;
    out << "group,metric,a,b,n,mean_diff,ci_lower,ci_upper\n";
    for (const auto& p : s) {
        out << csv_field(p.group) << ',' << p.metric << ',' << csv_field(p.a) << ',' << csv_field(p.b) << ',' << p.n
            << ',' << fmt(p.diff.mean) << ',' << fmt(p.diff.lower) << ',' << fmt(p.diff.upper) << '\n';
    }
    return out.str();
}

std::string entropy_plot_data(const std::vector<MetricsRow>& rows) {
    std::map<std::string, std::vector<std::pair<double, int>>> sums;  // scenario -> per tick (sum, count)
    std::size_t ticks = 0;
    for (const auto& r : rows) {
        auto& v = sums[r.scenario];
        if (v.size() < r.belief_entropy_trace.size()) v.resize(r.belief_entropy_trace.size(), {0.0, 0});
        for (std::size_t t = 0; t < r.belief_entropy_trace.size(); ++t) {
            v[t].first += r.belief_entropy_trace[t];
            ++v[t].second;
        }
        ticks = std::max(ticks, r.belief_entropy_trace.size());
    }
    std::ostringstream out;
    out << "# tick";
    for (const auto& [sc, v] : sums) out << ' ' << sc;
    out << '\n';
    for (std::size_t t = 0; t < ticks; ++t) {
        out << t + 1;
        for (const auto& [sc, v] : sums) {
            out << ' ';
            if (t < v.size() && v[t].second > 0) {
                out << fmt(v[t].first / v[t].second);
            } else {
                out << "nan";
            }
        }
        out << '\n';
    }
    return out.str();
}

LogComparison compare_logs(const RunLog& a, const RunLog& b) {
    LogComparison c;
    std::vector<const json*> ra{&a.header}, rb{&b.header};
    for (const auto& t : a.ticks) ra.push_back(&t);
    for (const auto& t : b.ticks) rb.push_back(&t);
    ra.push_back(&a.final);
    rb.push_back(&b.final);
    for (std::size_t i = 0; i < std::max(ra.size(), rb.size()); ++i) {
        if (i >= ra.size() || i >= rb.size() || ra[i]->dump() != rb[i]->dump()) {
            c.identical = false;
            c.first_difference = static_cast<int>(i);
            break;
        }
    }
    const MetricsRow ma = metrics_from_json(a.final.at("metrics"));
    const MetricsRow mb = metrics_from_json(b.final.at("metrics"));
    c.metrics.push_back({"completion_time", {ma.completion_time, mb.completion_time}});
    c.metrics.push_back({"robot_return", {ma.robot_return, mb.robot_return}});
    c.metrics.push_back({"human_return", {ma.human_return, mb.human_return}});
    for (const auto& [k, v] : ma.extra) {
        if (auto it = mb.extra.find(k); it != mb.extra.end()) c.metrics.push_back({k, {v, it->second}});
    }
    return c;
}

std::filesystem::path default_output_root() {
    if (const char* env = std::getenv("HRIGAME_OUT"); env && *env) return env;
    return "hrigame-out";
}

std::vector<Scenario> load_scenario_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Scenario> out;
    for (const auto& f : files) out.push_back(load_scenario(f));
    if (out.empty()) throw ConfigError("no scenario files in " + dir.string());
    return out;
}

}  // namespace hri
