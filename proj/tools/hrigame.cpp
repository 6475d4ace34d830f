// hrigame: run episodes and suites, verify logs, host interactive sessions.
//
// Exit codes: 0 success, 1 other failure, 2 configuration error,
// 3 replay divergence.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "hri/harness.hpp"
#include "hri/session.hpp"

namespace fs = std::filesystem;
using namespace hri;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

std::atomic<bool> g_stop{false};

void write_text(const fs::path& file, const std::string& text) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << text;
}

std::vector<std::uint64_t> seeds_or(const std::string& spec, const std::vector<std::uint64_t>& fallback) {
    if (spec.empty()) return fallback;
    try {
        return parse_seed_list(spec);
    } catch (const ConfigError& e) {
        throw ConfigError(e.what(), "--seeds");
    }
}

int cmd_run(const std::string& config, const std::string& seeds, const fs::path& out) {
    const Scenario sc = load_scenario(config);
    std::vector<MetricsRow> rows;
    for (auto seed : seeds_or(seeds, sc.seeds)) {
        const RunLog log = run_episode(sc, seed);
        const fs::path file = out / (sc.id + "-seed" + std::to_string(seed) + ".jsonl");
        write_log(log, file);
        rows.push_back(metrics_from_json(log.final.at("metrics")));
        std::cout << file.string() << '\n';
    }
    write_text(out / (sc.id + "-metrics.csv"), metrics_csv(rows));
    return 0;
}

int cmd_suite(const std::vector<std::string>& inputs, const std::string& seeds, int parallelism, const fs::path& out,
              bool logs) {
    std::vector<Scenario> scenarios;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            for (auto& sc : load_scenario_dir(in)) scenarios.push_back(std::move(sc));
        } else {
            scenarios.push_back(load_scenario(in));
        }
    }
    SuiteOptions opts;
    if (!seeds.empty()) opts.seeds = seeds_or(seeds, {});
    opts.parallelism = parallelism;
    if (logs) opts.log_dir = out / "logs";
    const auto rows = run_suite(scenarios, opts);
    write_text(out / "metrics.csv", metrics_csv(rows));
    write_text(out / "entropy.dat", entropy_plot_data(rows));
    const auto paired = paired_summaries(rows, scenarios);
    write_text(out / "paired.csv", paired_csv(paired));
    std::cout << rows.size() << " episodes; tables in " << out.string() << '\n';
    for (const auto& p : paired) {
        std::cout << std::setw(12) << p.group << "  " << std::setw(16) << p.metric << "  " << p.a << " - " << p.b
                  << ": " << p.diff.mean << " [" << p.diff.lower << ", " << p.diff.upper << "] n=" << p.n << '\n';
    }
    return 0;
}

int cmd_replay(const std::string& file) {
    const RunLog log = read_log(file);
    const ReplayReport rep = replay(log);
    std::cout << rep.summary() << '\n';
    return rep.exact ? 0 : kExitDivergence;
}

int cmd_compare(const std::string& a, const std::string& b) {
    const auto c = compare_logs(read_log(a), read_log(b));
    if (c.identical) {
        std::cout << "identical\n";
    } else {
        std::cout << "logs differ from record " << c.first_difference << '\n';
    }
    for (const auto& [name, v] : c.metrics) {
        std::cout << std::setw(16) << name << "  " << v.first << "  " << v.second << "  diff " << v.first - v.second
                  << '\n';
    }
    return 0;
}

int cmd_serve(const std::string& host, int port, const std::string& scenario_dir, const fs::path& out) {
    std::vector<Scenario> bundled;
    if (!scenario_dir.empty()) bundled = load_scenario_dir(scenario_dir);
    SessionManager manager(std::move(bundled), out / "sessions");
    std::signal(SIGINT, [](int) { g_stop = true; });
    std::signal(SIGTERM, [](int) { g_stop = true; });
    serve(manager, host, port, g_stop, [&](int bound) {
        std::cout << "listening on " << host << ':' << bound << std::endl;
    });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Human-robot game planning and inference toolkit"};
    app.require_subcommand(1);
    std::string seeds, out_flag;
    int parallelism = 1;

    auto* run = app.add_subcommand("run", "Run one scenario for each seed and write logs");
    std::string config;
    run->add_option("config", config, "Scenario file")->required()->check(CLI::ExistingFile);
    run->add_option("--seeds", seeds, "Seed list, e.g. 0-9,42 (default: the scenario's)");
    run->add_option("--out", out_flag, "Output directory (default: $HRIGAME_OUT or ./hrigame-out)");

    auto* suite = app.add_subcommand("suite", "Run scenario directories or files and write metric tables");
    std::vector<std::string> inputs;
    bool logs = false;
    suite->add_option("inputs", inputs, "Scenario directories or files")->required()->check(CLI::ExistingPath);
    suite->add_option("--seeds", seeds, "Seed list overriding each scenario's");
    suite->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::PositiveNumber);
    suite->add_option("--out", out_flag, "Output directory");
    suite->add_flag("--logs", logs, "Also write one log per episode");

    auto* rep = app.add_subcommand("replay", "Re-execute a log and report the first divergence");
    std::string log_file;
    rep->add_option("log", log_file, "Run log")->required()->check(CLI::ExistingFile);

    auto* cmp = app.add_subcommand("compare", "Compare two run logs");
    std::string log_a, log_b;
    cmp->add_option("logA", log_a)->required()->check(CLI::ExistingFile);
    cmp->add_option("logB", log_b)->required()->check(CLI::ExistingFile);

    auto* srv = app.add_subcommand("serve", "Host interactive sessions over TCP");
    std::string host = "127.0.0.1", scenario_dir;
    int port = 7878;
    srv->add_option("--host", host, "Listen address");
    srv->add_option("--port", port, "Listen port (0 picks a free port)")->check(CLI::Range(0, 65535));
    srv->add_option("--scenarios", scenario_dir, "Directory of bundled scenarios")->check(CLI::ExistingDirectory);
    srv->add_option("--out", out_flag, "Output directory for session logs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Usage mistakes (unknown verb, missing file, bad flag) count as configuration errors.
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }
    const fs::path out = out_flag.empty() ? default_output_root() : fs::path(out_flag);
    try {
        if (*run) return cmd_run(config, seeds, out);
        if (*suite) return cmd_suite(inputs, seeds, parallelism, out, logs);
        if (*rep) return cmd_replay(log_file);
        if (*cmp) return cmd_compare(log_a, log_b);
        if (*srv) return cmd_serve(host, port, scenario_dir, out);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const EpisodeFailure& e) {
        std::cerr << "episode failed: " << e.what() << '\n';
        return e.config_error() ? kExitConfig : kExitFailure;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return 0;
}
