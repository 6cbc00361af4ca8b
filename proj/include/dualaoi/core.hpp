#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace dualaoi {

// ---------------------------------------------------------------------------
// Service-time laws
// ---------------------------------------------------------------------------

enum class ServiceKind { Exponential, Deterministic };

/// Service-time law of one sensor (or server). Exponential laws carry a rate,
/// deterministic laws carry a period; both are validated on construction.
class ServiceModel {
public:
    static ServiceModel exponential(double rate);
    static ServiceModel deterministic(double period);

    ServiceKind kind() const noexcept { return kind_; }
    bool is_exponential() const noexcept { return kind_ == ServiceKind::Exponential; }

    /// Mean completions per unit time (1/period for deterministic laws).
    double rate() const noexcept { return kind_ == ServiceKind::Exponential ? value_ : 1.0 / value_; }
    /// Mean service time (1/rate for exponential laws).
    double mean() const noexcept { return kind_ == ServiceKind::Exponential ? 1.0 / value_ : value_; }
    double period() const noexcept { return mean(); }

    std::string describe() const;

private:
    ServiceModel(ServiceKind kind, double value) : kind_(kind), value_(value) {}

    ServiceKind kind_;
    double value_;
};

// ---------------------------------------------------------------------------
// Scenario specification
// ---------------------------------------------------------------------------

enum class SystemKind { MM, MD, DD, MM2, MM11Preempt };

std::string_view to_string(SystemKind kind) noexcept;
/// Accepts "mm", "md", "dd", "mm2", "mm11" (case-insensitive).
SystemKind parse_system_kind(std::string_view name);

/// A full scenario. Dual systems (MM, MD, DD) use both sensors; the
/// single-queue references (MM2, MM11Preempt) use `sensor_a` as the server
/// law and carry an external arrival rate.
struct SystemSpec {
    SystemKind kind = SystemKind::MM;
    ServiceModel sensor_a = ServiceModel::exponential(1.0);
    std::optional<ServiceModel> sensor_b = ServiceModel::exponential(1.0);
    std::optional<double> arrival_rate;
    /// Phase of sensor B relative to sensor A (DD only); empty = randomized per seed.
    std::optional<double> dd_offset;

    static SystemSpec mm(double mu_a, double mu_b);
    static SystemSpec md(double mu, double period);
    static SystemSpec dd(double period_a, double period_b, std::optional<double> offset = std::nullopt);
    static SystemSpec mm2(double lambda, double mu);
    static SystemSpec mm11_preempt(double lambda, double mu);

    bool is_dual() const noexcept;
    /// Sum of the service rates of both sensors (or both servers for MM2).
    double total_service_rate() const noexcept;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Reproducible random streams
// ---------------------------------------------------------------------------

/// Independent stream derived from a master seed and a stream name. The same
/// (seed, name) pair yields the same sequence on every run and platform.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::string_view name);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double exponential(double rate);

private:
    std::mt19937_64 engine_;
};

namespace streams {
inline constexpr std::string_view kServiceA = "service_a";
inline constexpr std::string_view kServiceB = "service_b";
inline constexpr std::string_view kArrivals = "arrivals";
inline constexpr std::string_view kPhase = "dd_phase";
}  // namespace streams

double sample_service(const ServiceModel& model, RandomStream& stream);

/// splitmix64 finalizer; used to derive child seeds (sweep grid points,
/// replications) from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

// ---------------------------------------------------------------------------
// AoI sample path
// ---------------------------------------------------------------------------

enum class Delivery { Accepted, Obsolete };

/// Piecewise-linear AoI sample path Δ(t) = t − u(t) with exact (trapezoid)
/// integration between events.
class AoiPath {
public:
    AoiPath() = default;
    /// Path observed from `now` with freshest delivered generation time `last_refresh`.
    static AoiPath starting_at(double now, double last_refresh);

    /// Let `dt` time elapse; accumulates current_age·dt + dt²/2.
    void advance(double dt);
    void advance_to(double now);

    /// Advance to `now`, then apply a delivery of an update generated at
    /// `generation_time`. Ties with the freshest timestamp count as obsolete.
    Delivery deliver(double generation_time, double now);

    /// Drop accumulated statistics (area, elapsed, peaks, counters) while
    /// keeping the current age; used at the end of a warm-up.
    void reset_statistics();

    double now() const noexcept { return now_; }
    double current_age() const noexcept { return now_ - last_refresh_; }
    double last_refresh_timestamp() const noexcept { return last_refresh_; }
    double integrated_area() const noexcept { return area_; }
    double elapsed() const noexcept { return elapsed_; }
    const std::vector<double>& peaks() const noexcept { return peaks_; }
    double peak_sum() const noexcept { return peak_sum_; }
    std::uint64_t deliveries_accepted() const noexcept { return accepted_; }
    std::uint64_t deliveries_obsolete() const noexcept { return obsolete_; }

    double average_age() const;
    double average_peak() const;

private:
    double now_ = 0.0;
    double last_refresh_ = 0.0;
    double area_ = 0.0;
    double elapsed_ = 0.0;
    double peak_sum_ = 0.0;
    std::vector<double> peaks_;
    std::uint64_t accepted_ = 0;
    std::uint64_t obsolete_ = 0;
};

// ---------------------------------------------------------------------------
// Simulation summary
// ---------------------------------------------------------------------------

struct SimStats {
    double avg_aoi = 0.0;
    double avg_paoi = 0.0;
    double effective_arrival_rate = 0.0;
    double obsolete_ratio = 0.0;
    std::uint64_t n_accepted = 0;
    std::uint64_t n_obsolete = 0;
    double sim_time = 0.0;
    // 95% batch-means half-widths (infinite when fewer than two batches).
    double half_width_aoi = 0.0;
    double half_width_paoi = 0.0;
    double half_width_rate = 0.0;
    double half_width_obsolete = 0.0;
};

}  // namespace dualaoi
