#include "dualaoi/sweep.hpp"

#include "dualaoi/analytic.hpp"
#include "dualaoi/sim.hpp"
#include "dualaoi/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dualaoi::sweep {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

double metric_of(const SimStats& s, Metric m) {
    switch (m) {
        case Metric::AvgAoi: return s.avg_aoi;
        case Metric::AvgPaoi: return s.avg_paoi;
        case Metric::EffectiveRate: return s.effective_arrival_rate;
        case Metric::ObsoleteRatio: return s.obsolete_ratio;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double half_width_of(const SimStats& s, Metric m) {
    switch (m) {
        case Metric::AvgAoi: return s.half_width_aoi;
        case Metric::AvgPaoi: return s.half_width_paoi;
        case Metric::EffectiveRate: return s.half_width_rate;
        case Metric::ObsoleteRatio: return s.half_width_obsolete;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

bool simulates(Mode m) { return m != Mode::Analytic; }

// Simulation results of one (grid point, system) cell across replications.
struct Cell {
    std::vector<SimStats> runs;
    std::uint64_t seed = 0;
};

}  // namespace

std::string_view to_string(SweepVariable v) noexcept {
    switch (v) {
        case SweepVariable::ServiceRate: return "service_rate";
        case SweepVariable::RateRatio: return "rate_ratio";
        case SweepVariable::Period: return "period";
    }
    return "?";
}

std::string_view to_string(Metric m) noexcept {
    switch (m) {
        case Metric::AvgAoi: return "avg_aoi";
        case Metric::AvgPaoi: return "avg_paoi";
        case Metric::EffectiveRate: return "effective_rate";
        case Metric::ObsoleteRatio: return "obsolete_ratio";
    }
    return "?";
}

std::string_view to_string(Mode m) noexcept {
    switch (m) {
        case Mode::Analytic: return "analytic";
        case Mode::Simulate: return "simulate";
        case Mode::Both: return "both";
    }
    return "?";
}

std::string_view to_string(SweepSystem s) noexcept {
    switch (s) {
        case SweepSystem::MM: return "mm";
        case SweepSystem::MD: return "md";
        case SweepSystem::DD: return "dd";
        case SweepSystem::MM2: return "mm2";
        case SweepSystem::MM11: return "mm11";
        case SweepSystem::Single: return "single";
    }
    return "?";
}

SweepVariable parse_variable(std::string_view s) {
    const auto v = lower(s);
    if (v == "service_rate") return SweepVariable::ServiceRate;
    if (v == "rate_ratio") return SweepVariable::RateRatio;
    if (v == "period") return SweepVariable::Period;
    throw std::invalid_argument("variable: unknown sweep variable '" + std::string(s) +
                                "' (expected service_rate, rate_ratio or period)");
}

Metric parse_metric(std::string_view s) {
    const auto v = lower(s);
    for (Metric m : kAllMetrics)
        if (v == to_string(m)) return m;
    throw std::invalid_argument("metrics: unknown metric '" + std::string(s) + "'");
}

Mode parse_mode(std::string_view s) {
    const auto v = lower(s);
    if (v == "analytic") return Mode::Analytic;
    if (v == "simulate") return Mode::Simulate;
    if (v == "both") return Mode::Both;
    throw std::invalid_argument("mode: unknown mode '" + std::string(s) + "'");
}

SweepSystem parse_sweep_system(std::string_view s) {
    const auto v = lower(s);
    for (SweepSystem x : {SweepSystem::MM, SweepSystem::MD, SweepSystem::DD, SweepSystem::MM2, SweepSystem::MM11,
                          SweepSystem::Single})
        if (v == to_string(x)) return x;
    throw std::invalid_argument("systems: unknown system '" + std::string(s) + "'");
}

void SweepSpec::validate() const {
    if (systems.empty()) throw std::invalid_argument("systems: at least one system is required");
    if (metrics.empty()) throw std::invalid_argument("metrics: at least one metric is required");
    if (!(std::isfinite(start) && start > 0.0)) throw std::invalid_argument("start: must be finite and > 0");
    if (!(std::isfinite(stop) && stop > 0.0)) throw std::invalid_argument("stop: must be finite and > 0");
    if (steps < 2) throw std::invalid_argument("steps: must be >= 2");
    if (!(stop > start)) throw std::invalid_argument("stop: must exceed start");
    if (replications == 0) throw std::invalid_argument("replications: must be >= 1");
    if (workers == 0) throw std::invalid_argument("workers: must be >= 1");
    if (!(std::isfinite(base_rate) && base_rate > 0.0)) throw std::invalid_argument("base_rate: must be > 0");
    if (!(mm2_load > 0.0 && mm2_load < 1.0)) throw std::invalid_argument("mm2_load: must lie in (0, 1)");
    if (!(std::isfinite(mm11_lambda_factor) && mm11_lambda_factor > 0.0))
        throw std::invalid_argument("mm11_lambda_factor: must be > 0");
    if (dd_phase && !(*dd_phase >= 0.0 && *dd_phase < 1.0))
        throw std::invalid_argument("dd_phase: must lie in [0, 1)");
    if (simulates(mode)) {
        if (!seed) throw std::invalid_argument("seed: required when the sweep simulates");
        if (target_accepted <= warmup_accepted)
            throw std::invalid_argument("target_accepted: must exceed warmup_accepted");
        if (batch_count < 2) throw std::invalid_argument("batch_count: must be >= 2");
    }
    if (variable == SweepVariable::Period) {
        for (SweepSystem s : systems)
            if (s == SweepSystem::MM2 || s == SweepSystem::MM11 || s == SweepSystem::Single)
                throw std::invalid_argument("systems: '" + std::string(to_string(s)) +
                                            "' has no period to sweep");
    }
}

std::vector<double> grid(const SweepSpec& spec) {
    spec.validate();
    std::vector<double> xs(spec.steps);
    const double step = (spec.stop - spec.start) / static_cast<double>(spec.steps - 1);
    for (std::size_t i = 0; i < spec.steps; ++i) xs[i] = spec.start + step * static_cast<double>(i);
    xs.back() = spec.stop;
    return xs;
}

std::optional<SystemSpec> scenario(SweepSystem system, double x, const SweepSpec& spec) {
    // Rates of sensors A and B (or the two servers) at this grid point.
    double mu_a = x, mu_b = x;
    if (spec.variable == SweepVariable::RateRatio) {
        mu_a = spec.base_rate;
        mu_b = x * spec.base_rate;
    } else if (spec.variable == SweepVariable::Period) {
        mu_a = spec.base_rate;
        mu_b = 1.0 / x;
    }
    const auto dd_offset = [&]() -> std::optional<double> {
        if (!spec.dd_phase) return std::nullopt;
        return *spec.dd_phase / mu_b;
    };
    switch (system) {
        case SweepSystem::MM: return SystemSpec::mm(mu_a, mu_b);
        case SweepSystem::MD: return SystemSpec::md(mu_a, 1.0 / mu_b);
        case SweepSystem::DD: return SystemSpec::dd(1.0 / mu_a, 1.0 / mu_b, dd_offset());
        case SweepSystem::MM2:
            return SystemSpec::mm2(spec.mm2_load * (mu_a + mu_b), (mu_a + mu_b) / 2.0);
        case SweepSystem::MM11: return SystemSpec::mm11_preempt(spec.mm11_lambda_factor * mu_a, mu_a);
        case SweepSystem::Single: return std::nullopt;
    }
    return std::nullopt;
}

std::optional<double> reference_value(const SystemSpec& spec, Metric metric) {
    switch (spec.kind) {
        case SystemKind::MM: {
            const double a = spec.sensor_a.rate(), b = spec.sensor_b->rate();
            switch (metric) {
                case Metric::AvgAoi: return analytic::mm_avg_aoi(a, b);
                case Metric::AvgPaoi: return analytic::mm_peak_aoi(a, b);
                case Metric::EffectiveRate: return analytic::mm_effective_rate(a, b);
                case Metric::ObsoleteRatio: return analytic::mm_obsolete_ratio(a, b);
            }
            break;
        }
        case SystemKind::MD: {
            const double mu = spec.sensor_a.rate(), t = spec.sensor_b->period();
            switch (metric) {
                case Metric::AvgAoi: return analytic::md_avg_aoi(mu, t);
                case Metric::AvgPaoi: return analytic::md_peak_aoi(mu, t);
                case Metric::EffectiveRate: return analytic::md_effective_rate(mu, t);
                case Metric::ObsoleteRatio: return analytic::md_obsolete_ratio(mu, t);
            }
            break;
        }
        case SystemKind::MM11Preempt: {
            const double lambda = *spec.arrival_rate, mu = spec.sensor_a.rate();
            switch (metric) {
                case Metric::AvgAoi: return analytic::mm11_preempt_avg_aoi(lambda, mu);
                case Metric::AvgPaoi: return analytic::mm11_preempt_peak_aoi(lambda, mu);
                // Every completed update is fresher than the last one.
                case Metric::EffectiveRate: return lambda * mu / (lambda + mu);
                case Metric::ObsoleteRatio: return 0.0;
            }
            break;
        }
        case SystemKind::DD:
        case SystemKind::MM2: return std::nullopt;
    }
    return std::nullopt;
}

double single_queue_value(double mu, Metric metric) {
    switch (metric) {
        case Metric::AvgAoi: return analytic::single_queue_avg_aoi(mu);
        case Metric::AvgPaoi: return analytic::single_queue_peak_aoi(mu);
        case Metric::EffectiveRate: return mu;
        case Metric::ObsoleteRatio: return 0.0;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const auto xs = grid(spec);
    const std::size_t n_sys = spec.systems.size();

    // One cell per (grid point, system); simulation cells are filled by the workers.
    std::vector<Cell> cells(xs.size() * n_sys);
    if (simulates(spec.mode)) {
        struct Job {
            std::size_t cell;
            std::size_t replication;
            SystemSpec system;
            std::uint64_t seed;
        };
        std::vector<Job> jobs;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            for (std::size_t s = 0; s < n_sys; ++s) {
                const auto sc = scenario(spec.systems[s], xs[i], spec);
                if (!sc) continue;
                const std::size_t c = i * n_sys + s;
                // Same seed for every system at a grid point: common random numbers.
                const std::uint64_t base = *spec.seed + static_cast<std::uint64_t>(i * spec.replications);
                cells[c].seed = base;
                cells[c].runs.resize(spec.replications);
                for (std::size_t r = 0; r < spec.replications; ++r) jobs.push_back({c, r, *sc, base + r});
            }
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (;;) {
                const std::size_t j = next.fetch_add(1);
                if (j >= jobs.size()) return;
                try {
                    sim::SimConfig cfg;
                    cfg.spec = jobs[j].system;
                    cfg.seed = jobs[j].seed;
                    cfg.target_accepted = spec.target_accepted;
                    cfg.warmup_accepted = spec.warmup_accepted;
                    cfg.batch_count = spec.batch_count;
                    cells[jobs[j].cell].runs[jobs[j].replication] = sim::run(cfg).stats;
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(jobs.size());
                }
            }
        };
        const std::size_t n_threads = std::min(spec.workers, std::max<std::size_t>(jobs.size(), 1));
        std::vector<std::thread> pool;
        for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<SweepRow> rows;
    rows.reserve(xs.size() * n_sys * spec.metrics.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t s = 0; s < n_sys; ++s) {
            const SweepSystem system = spec.systems[s];
            const auto sc = scenario(system, xs[i], spec);
            const Cell& cell = cells[i * n_sys + s];
            for (Metric m : spec.metrics) {
                SweepRow row;
                row.system = system;
                row.param = xs[i];
                row.metric = m;
                if (spec.mode != Mode::Simulate || !sc) {
                    row.analytic = sc ? reference_value(*sc, m)
                                      : std::optional<double>(single_queue_value(
                                            spec.variable == SweepVariable::ServiceRate ? xs[i] : spec.base_rate, m));
                }
                if (!cell.runs.empty()) {
                    row.seed = cell.seed;
                    if (cell.runs.size() == 1) {
                        row.simulated = metric_of(cell.runs[0], m);
                        row.ci_half_width = half_width_of(cell.runs[0], m);
                    } else {
                        stats::RunningMoments mom;
                        for (const auto& r : cell.runs) mom.add(metric_of(r, m));
                        row.simulated = mom.mean();
                        row.ci_half_width = stats::student_t_quantile(0.95, mom.count() - 1) * mom.standard_error();
                    }
                }
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::string format_number(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(12) << v;
    return os.str();
}

std::string csv_header() { return "system,param,metric,analytic,simulated,ci_half_width,seed"; }

std::string csv_row(const SweepRow& row) {
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    std::string line;
    line += to_string(row.system);
    line += ',';
    line += format_number(row.param);
    line += ',';
    line += to_string(row.metric);
    line += ',';
    line += opt(row.analytic);
    line += ',';
    line += opt(row.simulated);
    line += ',';
    line += opt(row.ci_half_width);
    line += ',';
    if (row.seed) line += std::to_string(*row.seed);
    return line;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << csv_header() << '\n';
    for (const auto& r : rows) out << csv_row(r) << '\n';
}

void write_csv_file(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(f, rows);
    f.flush();
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace dualaoi::sweep
