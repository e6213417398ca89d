#pragma once

#include <array>
#include <string>
#include <vector>

#include "decent/sim/results.hpp"
#include "decent/sim/simulation.hpp"

namespace decent::sim {

enum class WallMode : std::uint8_t { own, others };
/// statuses: owner statuses only; posts: plus contact wall posts; full: plus one comment per status.
enum class Composition : std::uint8_t { statuses, posts, full };

std::string to_string(WallMode m);
std::string to_string(Composition c);

/// Per-user workloads on one built network. Every trial uses fresh users whose wall or friend list
/// grows through the requested sizes, measuring at each.
class Workloads {
public:
    explicit Workloads(Simulation& sim) : sim_(sim) {}

    /// Rows: experiment "wall", param "<mode>-<composition>", value = items.
    std::vector<TrialRow> wall(std::vector<std::size_t> items, WallMode mode, Composition composition,
                               std::size_t trials);
    /// Rows: experiment "newsfeed", param "friends", value = friend count.
    std::vector<TrialRow> newsfeed(std::vector<std::size_t> friends, std::size_t trials);
    /// One user posts `posts` statuses, then a contact comments on each. Rows: experiment "post",
    /// param "status" or "comment", value = items already on the wall, trial = sequence number.
    std::vector<TrialRow> post(std::size_t posts);

private:
    std::string fresh(const std::string& prefix);

    Simulation& sim_;
    std::size_t next_ = 0;
};

struct HopStats {
    std::size_t lookups = 0;
    double mean_rounds = 0;
    std::size_t max_rounds = 0;
    /// Lookups whose result equals the true k closest online nodes.
    std::size_t exact = 0;
};

HopStats measure_hops(Simulation& sim, std::size_t lookups);

struct BlindnessReport {
    std::size_t records = 0;
    std::size_t bytes_scanned = 0;
    std::size_t secrets = 0;
    /// Key values found verbatim in any honest node's store.
    std::size_t secret_hits = 0;
    /// Distinct object ids sharing a write-authentication key.
    std::size_t wapk_repeats = 0;
};

/// Scans every honest store for users' long-term secret and verification keys, attribute public
/// keys, contact keys and object keys.
BlindnessReport scan_storage(Simulation& sim);

struct AvailabilityOptions {
    std::size_t objects = 1000;
    std::size_t rounds = 100;
    /// Retrieve every object after every `check_every` rounds and after the last.
    std::size_t check_every = 10;
    /// Chance per round that the owner writes a new version of an object.
    double update_probability = 0.05;
    /// The owner re-stores its latest version of every object after every `republish_every` rounds
    /// (0 disables).
    std::size_t republish_every = 1;
};

struct AvailabilityResult {
    double malicious = 0;
    std::size_t replicas = 0;
    std::size_t retrievals = 0;
    /// Opened the latest version written.
    std::size_t successes = 0;
    /// Opened an authentic but older version.
    std::size_t stale = 0;
    /// Retrievals whose R closest online nodes were all malicious.
    std::size_t all_malicious = 0;
    std::size_t updates = 0;
    double sim_ms = 0;
    std::array<std::uint8_t, 32> trace_digest{};

    double success_rate() const { return retrievals ? double(successes) / double(retrievals) : 0; }
    double all_malicious_rate() const { return retrievals ? double(all_malicious) / double(retrievals) : 0; }
    /// 1 - f^R.
    double expected() const;
};

/// Builds its own network from `config` and runs objects through churn and maintenance rounds.
/// Checkpoint rows: experiment "adversary", param "f=<f>", value = R.
AvailabilityResult run_availability(const SimConfig& config, const AvailabilityOptions& options,
                                    std::vector<TrialRow>* rows = nullptr);

struct ExperimentPlan {
    std::string experiment = "wall";
    std::size_t trials = 20;
    std::vector<std::size_t> items{5, 10, 20, 40};
    std::vector<std::size_t> friends{1, 11, 20, 40};
    std::size_t posts = 100;
    std::vector<double> fractions{0, 0.1, 0.25};
    std::vector<std::size_t> replicas{1, 3, 5, 7};
    AvailabilityOptions availability{1000, 10, 5, 0.05, 1};
    std::size_t hop_lookups = 1000;
};

struct ExperimentRun {
    std::vector<TrialRow> rows;
    std::vector<AvailabilityResult> availability;
    std::vector<HopStats> hops;
    /// Event-trace digest; for adversary sweeps, a digest over every run's trace digest.
    std::array<std::uint8_t, 32> trace_digest{};
};

/// Runs one named experiment (wall, newsfeed, post, adversary or hops). Throws
/// Error(invalid_argument) for unknown names.
ExperimentRun run_experiment(const SimConfig& config, const ExperimentPlan& plan);

std::string availability_csv(const std::vector<AvailabilityResult>& results);

}  // namespace decent::sim
