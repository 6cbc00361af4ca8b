#pragma once

// Discrete-event simulator for the dual-sensor systems (M-M, M-D, D-D) and
// the single-queue references (M/M/2, M/M/1/1 with preemption).
//
// Dual sensors are always busy: on completing an update at time t a sensor
// delivers it (generated at its previous completion) and immediately starts a
// new update generated at t. The monitor discards any delivery that is not
// strictly fresher than what it already holds.

#include "dualaoi/core.hpp"
#include "dualaoi/markov.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

namespace dualaoi::sim {

struct SimConfig {
    SystemSpec spec;
    std::uint64_t seed = 1;
    /// Run stops at this many accepted deliveries, warm-up included.
    std::uint64_t target_accepted = 100'000;
    /// Accepted deliveries discarded before measurement starts.
    std::uint64_t warmup_accepted = 1'000;
    std::uint64_t batch_count = 32;
    bool emit_trace = false;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// --- event queue ------------------------------------------------------------

enum class EventKind { ServiceCompletionA = 0, ServiceCompletionB = 1, ExternalArrival = 2 };

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::ServiceCompletionA;
    double generation_time = 0.0;  // completions only
    std::uint64_t token = 0;       // lets a server invalidate a preempted completion
    std::uint64_t sequence = 0;    // assigned by the queue
};

/// Min-queue on (time, kind, insertion sequence).
class EventQueue {
public:
    void push(Event e);
    Event pop();
    const Event& top() const { return heap_.top(); }
    bool empty() const noexcept { return heap_.empty(); }
    std::size_t size() const noexcept { return heap_.size(); }

private:
    struct Later {
        bool operator()(const Event& x, const Event& y) const noexcept;
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_sequence_ = 0;
};

// --- output -----------------------------------------------------------------

/// One accepted delivery after warm-up. For the dual systems it also carries
/// the refresh-state classification; the first refresh of a run has no
/// previous state and therefore no path.
struct TransitionRecord {
    double time = 0.0;
    double generation_time = 0.0;
    int sensor = 0;  // 0 = A (server 1), 1 = B (server 2)
    std::optional<markov::MmState> prev_state;
    std::optional<markov::MmState> new_state;
    int path_index = 0;         // 0 when unclassified
    double interarrival = 0.0;  // Y: time since the previous accepted delivery
    double service = 0.0;       // T: time - generation_time
};

/// Every delivery of a run from t = 0, accepted or not.
struct DeliveryLogEntry {
    double time = 0.0;
    double generation_time = 0.0;
    int sensor = 0;
    bool accepted = false;
};

struct SimResult {
    SimStats stats;
    /// Instant at which measurement started (end of warm-up) and the freshest
    /// generation time held by the monitor at that instant.
    double measurement_start = 0.0;
    double refresh_at_start = 0.0;
    std::vector<TransitionRecord> trace;       // filled when emit_trace
    std::vector<DeliveryLogEntry> deliveries;  // filled when emit_trace
};

SimResult run(const SimConfig& config);

/// CSV header and row writer for a transition trace.
std::string trace_csv_header();
std::string trace_csv_row(const TransitionRecord& record);

// --- trace statistics -------------------------------------------------------

/// Empirical counterpart of one refresh path estimated from a trace.
struct PathEstimate {
    int path_index = 0;
    std::uint64_t count = 0;
    /// Refreshes that left the path's source state.
    std::uint64_t from_count = 0;
    double prob = 0.0;
    double prob_se = 0.0;
    double mean_service = 0.0;
    double mean_service_se = 0.0;
    double mean_interarrival = 0.0;
    double mean_interarrival_se = 0.0;
    double second_moment_interarrival = 0.0;
    double second_moment_interarrival_se = 0.0;
};

/// Per-path statistics of the classified records of a dual M-M trace,
/// indexed 0..9 for paths 1..10.
std::vector<PathEstimate> estimate_paths(std::span<const TransitionRecord> trace);

/// Empirical counterpart of one two-step case.
struct TwoStepEstimate {
    int case_index = 0;
    std::uint64_t count = 0;
    double prob = 0.0;
    double prob_se = 0.0;
    double mean_service_times_interarrival = 0.0;
    double mean_service_times_interarrival_se = 0.0;
    double second_moment = 0.0;
    double second_moment_se = 0.0;
};

/// Statistics of consecutive classified pairs, matched to the cases of
/// `markov::mm_two_step_table` by their state triple.
std::vector<TwoStepEstimate> estimate_two_step(std::span<const TransitionRecord> trace);

// --- oracles ----------------------------------------------------------------

struct DeliveryPoint {
    double time = 0.0;
    double generation_time = 0.0;
};

struct ReplayResult {
    double avg_aoi = 0.0;
    double avg_paoi = 0.0;  // NaN when no delivery was accepted
    double area = 0.0;
    std::uint64_t accepted = 0;
};

/// Rebuild Δ(t) from a raw delivery log on [start_time, horizon] and integrate
/// it directly. Deliveries must be sorted by time and lie inside the window.
ReplayResult replay_oracle(std::span<const DeliveryPoint> deliveries, double horizon, double start_time = 0.0,
                           double initial_refresh = 0.0);

struct ConditionalEstimate {
    double peak_count = 0.0;
    double peak_sum = 0.0;
    double peak_sum_se = 0.0;
    double area = 0.0;
    double area_se = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t attempts = 0;
};

/// Monte-Carlo estimate of the per-period peak count, peak sum and area of
/// the M-D system conditioned on k sensor-A completions in the previous
/// period of sensor B and n in the current one. Realizations are drawn
/// unconditionally and rejected unless their counts match.
ConditionalEstimate conditional_md_oracle(double mu, double period, std::size_t k, std::size_t n,
                                          std::uint64_t samples, std::uint64_t seed = 1);

}  // namespace dualaoi::sim
