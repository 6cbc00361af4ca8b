#pragma once

// Parameter sweeps over the dual-sensor systems and their references,
// emitting one CSV row per (grid point, system, metric).

#include "dualaoi/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dualaoi::sweep {

enum class SweepVariable { ServiceRate, RateRatio, Period };
enum class Metric { AvgAoi, AvgPaoi, EffectiveRate, ObsoleteRatio };
enum class Mode { Analytic, Simulate, Both };
/// Systems a sweep can include; `Single` is the zero-wait single-sensor
/// baseline and exists only in closed form.
enum class SweepSystem { MM, MD, DD, MM2, MM11, Single };

std::string_view to_string(SweepVariable v) noexcept;
std::string_view to_string(Metric m) noexcept;
std::string_view to_string(Mode m) noexcept;
std::string_view to_string(SweepSystem s) noexcept;
SweepVariable parse_variable(std::string_view s);
Metric parse_metric(std::string_view s);
Mode parse_mode(std::string_view s);
SweepSystem parse_sweep_system(std::string_view s);

inline constexpr Metric kAllMetrics[] = {Metric::AvgAoi, Metric::AvgPaoi, Metric::EffectiveRate,
                                         Metric::ObsoleteRatio};

struct SweepSpec {
    std::vector<SweepSystem> systems;
    SweepVariable variable = SweepVariable::ServiceRate;
    double start = 2.0;
    double stop = 5.0;
    std::size_t steps = 4;
    std::vector<Metric> metrics{std::begin(kAllMetrics), std::end(kAllMetrics)};
    Mode mode = Mode::Analytic;
    std::optional<std::uint64_t> seed;
    std::size_t replications = 1;

    /// Rate of sensor A when the sweep varies the ratio or the period.
    double base_rate = 1.0;
    /// M/M/2 load λ/(μA+μB).
    double mm2_load = 0.56;
    /// M/M/1/1-preemptive generation rate as a multiple of the service rate.
    double mm11_lambda_factor = 4.0;
    /// D-D phase of sensor B as a fraction of its period; empty = randomized.
    std::optional<double> dd_phase;

    std::uint64_t target_accepted = 100'000;
    std::uint64_t warmup_accepted = 1'000;
    std::uint64_t batch_count = 32;
    std::size_t workers = 1;

    void validate() const;
};

/// Evenly spaced grid from start to stop inclusive.
std::vector<double> grid(const SweepSpec& spec);

/// Simulation scenario for a system at grid value `x`; nullopt for `Single`.
std::optional<SystemSpec> scenario(SweepSystem system, double x, const SweepSpec& spec);

/// Closed-form value of a metric, when one exists (M-M, M-D, M/M/1/1 preemptive).
std::optional<double> reference_value(const SystemSpec& spec, Metric metric);
/// Same for the zero-wait single-sensor baseline with rate `mu`.
double single_queue_value(double mu, Metric metric);

struct SweepRow {
    SweepSystem system = SweepSystem::MM;
    double param = 0.0;
    Metric metric = Metric::AvgAoi;
    std::optional<double> analytic;
    std::optional<double> simulated;
    std::optional<double> ci_half_width;
    std::optional<std::uint64_t> seed;
};

/// Rows ordered by grid index, then by the order of `systems`, then `metrics`.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

std::string csv_header();
std::string csv_row(const SweepRow& row);
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// Throws std::runtime_error naming `path` on I/O failure.
void write_csv_file(const std::string& path, const std::vector<SweepRow>& rows);

/// 12 significant digits, classic locale.
std::string format_number(double v);

}  // namespace dualaoi::sweep
