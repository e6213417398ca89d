#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "decent/agent/agent.hpp"
#include "decent/sim/simulation.hpp"

namespace decent::sim {

/// One CSV row: a single trial of one experiment point.
struct TrialRow {
    std::string experiment;
    std::size_t trial = 0;
    std::string param;
    double value = 0;
    double sim_ms = 0;
    double wall_ms = 0;
    std::uint64_t dht_gets = 0;
    std::uint64_t dht_puts = 0;
    std::uint64_t appends = 0;
    std::uint64_t policy_decrypts = 0;
    std::uint64_t failures = 0;
};

TrialRow make_row(std::string experiment, std::size_t trial, std::string param, double value, const Measurement& m);

/// Mean and 95% t-interval.
struct Interval {
    double mean = 0;
    double low = 0;
    double high = 0;
};

Interval t_interval(const std::vector<double>& samples);

/// Rows grouped by (experiment, param, value), in order of first appearance. Wall-clock time is
/// left out so aggregates are reproducible.
struct Aggregate {
    std::string experiment;
    std::string param;
    double value = 0;
    std::size_t trials = 0;
    Interval sim_ms;
    double dht_gets = 0;
    double dht_puts = 0;
    double appends = 0;
    double policy_decrypts = 0;
    double failures = 0;
};

std::vector<Aggregate> aggregate(const std::vector<TrialRow>& rows);

extern const char* const trial_csv_header;
extern const char* const aggregate_csv_header;

std::string trials_csv(const std::vector<TrialRow>& rows);
std::string aggregates_csv(const std::vector<Aggregate>& aggregates);

/// Writes trials.csv and aggregate.csv under `dir` (created if missing).
void emit_results(const std::vector<TrialRow>& rows, const std::filesystem::path& dir);

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace decent::sim
