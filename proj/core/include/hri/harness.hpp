#pragma once

// Batch experiments: seeded episodes, line-delimited run logs, replay
// verification, suites with paired bootstrap summaries.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hri/episode.hpp"

namespace hri {

struct RunLog {
    json header;
    std::vector<json> ticks;
    json final;  // {"type": "final", "metrics": {...}}

    std::string to_jsonl() const;
    static RunLog parse(std::istream& in);
};

RunLog run_episode(const Scenario& scenario, std::uint64_t seed);

// Finalize a log from an episode driven elsewhere (e.g. a live session).
RunLog make_log(const Episode& episode, std::vector<json> ticks);

// Writes the log and a `<file>.meta.json` sidecar holding the wall-clock
// timestamp; the log itself carries no timestamps.
void write_log(const RunLog& log, const std::filesystem::path& file);
RunLog read_log(const std::filesystem::path& file);

struct ReplayReport {
    bool exact = true;
    int tick = -1;        // first diverging tick, -1 when exact or final-only
    std::string field;    // state | rewards | belief | controls | final
    std::string detail;

    std::string summary() const;
};

// Re-executes dynamics and inference from the logged controls.
ReplayReport replay(const RunLog& log, double belief_tolerance = 1e-12);

class EpisodeFailure : public std::runtime_error {
public:
    EpisodeFailure(std::string scenario, std::uint64_t seed, const std::string& what, bool config_error)
        : std::runtime_error("scenario '" + scenario + "' seed " + std::to_string(seed) + ": " + what),
          scenario_(std::move(scenario)), seed_(seed), config_error_(config_error) {}
    const std::string& scenario() const { return scenario_; }
    std::uint64_t seed() const { return seed_; }
    bool config_error() const { return config_error_; }

private:
    std::string scenario_;
    std::uint64_t seed_;
    bool config_error_;
};

struct SuiteOptions {
    std::optional<std::vector<std::uint64_t>> seeds;  // overrides each scenario's list
    int parallelism = 1;
    std::optional<std::filesystem::path> log_dir;     // write one log per episode when set
};

// Rows sorted by (scenario, seed); independent of parallelism.
std::vector<MetricsRow> run_suite(const std::vector<Scenario>& scenarios, const SuiteOptions& opts);

std::string metrics_csv(const std::vector<MetricsRow>& rows);

struct PairedSummary {
    std::string group;
    std::string metric;
    std::string a;
    std::string b;
    std::size_t n = 0;
    MeanInterval diff;  // mean of (a - b) with bootstrap interval
};

// Paired per-seed differences for every pair of scenarios sharing a
// pair_group; 10^4 seeded bootstrap resamples, 95% percentile intervals.
std::vector<PairedSummary> paired_summaries(const std::vector<MetricsRow>& rows,
                                            const std::vector<Scenario>& scenarios, int resamples = 10000,
                                            std::uint64_t seed = 0);

std::string paired_csv(const std::vector<PairedSummary>& s);

// Plot data: whitespace-separated numeric columns, one row per tick, one
// column per scenario holding the mean belief entropy across seeds.
std::string entropy_plot_data(const std::vector<MetricsRow>& rows);

struct LogComparison {
    bool identical = true;
    int first_difference = -1;  // record index (0 = header), -1 when identical
    std::vector<std::pair<std::string, std::pair<double, double>>> metrics;  // (name, (a, b))
};

LogComparison compare_logs(const RunLog& a, const RunLog& b);

// $HRIGAME_OUT, or ./hrigame-out when unset.
std::filesystem::path default_output_root();

std::vector<Scenario> load_scenario_dir(const std::filesystem::path& dir);

}  // namespace hri
