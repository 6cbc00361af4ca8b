#include "dualaoi/cli.hpp"

#include "dualaoi/sweep.hpp"
#include "dualaoi/validate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace dualaoi::cli {

namespace {

using nlohmann::ordered_json;

// Flags describing one scenario; which ones are required depends on the system.
struct ScenarioArgs {
    std::string system = "mm";
    std::optional<double> mu_a, mu_b, mu, period, period_a, period_b, lambda;
    std::string offset = "random";
};

void add_scenario_options(CLI::App* app, ScenarioArgs& a, bool allow_single) {
    app->add_option("--system", a.system,
                    allow_single ? "mm | md | mm11 | single (dd, mm2: no closed form)" : "mm | md | dd | mm2 | mm11")
        ->capture_default_str();
    app->add_option("--mu-a", a.mu_a, "service rate of sensor A");
    app->add_option("--mu-b", a.mu_b, "service rate of sensor B");
    app->add_option("--mu", a.mu, "service rate (both sensors of mm; the exponential sensor of md; the server)");
    app->add_option("--period", a.period, "deterministic period (md sensor B; both dd sensors)");
    app->add_option("--period-a", a.period_a, "dd period of sensor A");
    app->add_option("--period-b", a.period_b, "dd period of sensor B");
    app->add_option("--lambda", a.lambda, "arrival rate (mm2, mm11)");
    if (!allow_single)
        app->add_option("--offset", a.offset, "dd phase of sensor B: a number in [0, period-b) or 'random'")
            ->capture_default_str();
}

double need(const std::optional<double>& v, const char* flag) {
    if (!v) throw std::invalid_argument(std::string(flag) + ": required for this system");
    if (!(std::isfinite(*v) && *v > 0.0)) throw std::invalid_argument(std::string(flag) + ": must be positive and finite");
    return *v;
}

std::optional<double> first(const std::optional<double>& a, const std::optional<double>& b) { return a ? a : b; }

SystemSpec build_spec(const ScenarioArgs& a) {
    const SystemKind kind = parse_system_kind(a.system);
    SystemSpec spec;
    switch (kind) {
        case SystemKind::MM:
            spec = SystemSpec::mm(need(first(a.mu_a, a.mu), "--mu-a"), need(first(a.mu_b, a.mu), "--mu-b"));
            break;
        case SystemKind::MD:
            spec = SystemSpec::md(need(first(a.mu, a.mu_a), "--mu"), need(first(a.period, a.period_b), "--period"));
            break;
        case SystemKind::DD: {
            std::optional<double> offset;
            if (a.offset != "random") {
                try {
                    std::size_t used = 0;
                    offset = std::stod(a.offset, &used);
                    if (used != a.offset.size()) throw std::invalid_argument("trailing characters");
                } catch (const std::exception&) {
                    throw std::invalid_argument("--offset: expected a number or 'random', got '" + a.offset + "'");
                }
            }
            spec = SystemSpec::dd(need(first(a.period_a, a.period), "--period-a"),
                                  need(first(a.period_b, a.period), "--period-b"), offset);
            break;
        }
        case SystemKind::MM2:
            spec = SystemSpec::mm2(need(a.lambda, "--lambda"), need(first(a.mu, a.mu_a), "--mu"));
            break;
        case SystemKind::MM11Preempt:
            spec = SystemSpec::mm11_preempt(need(a.lambda, "--lambda"), need(first(a.mu, a.mu_a), "--mu"));
            break;
    }
    spec.validate();
    return spec;
}

double round12(double v) {
    if (!std::isfinite(v)) return v;
    return std::stod(sweep::format_number(v));
}

ordered_json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return round12(v);
}

ordered_json law_json(const ServiceModel& m) {
    ordered_json j;
    if (m.is_exponential()) {
        j["law"] = "exponential";
        j["rate"] = number(m.rate());
    } else {
        j["law"] = "deterministic";
        j["period"] = number(m.period());
    }
    return j;
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty() || path == "-") return fallback;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    return file;
}

void finish(std::ofstream& file, const std::string& path) {
    if (!file.is_open()) return;
    file.flush();
    if (!file) throw std::runtime_error("write to '" + path + "' failed");
}

int cmd_analytic(const ScenarioArgs& a, const std::vector<std::string>& metric_names, const std::string& output,
                 std::ostream& out) {
    std::vector<sweep::Metric> metrics;
    for (const auto& m : metric_names) metrics.push_back(sweep::parse_metric(m));
    if (metrics.empty()) metrics.assign(std::begin(sweep::kAllMetrics), std::end(sweep::kAllMetrics));

    std::vector<std::pair<sweep::Metric, double>> values;
    std::string label = a.system;
    if (a.system == "single") {
        const double mu = need(first(a.mu, a.mu_a), "--mu");
        for (auto m : metrics) values.emplace_back(m, sweep::single_queue_value(mu, m));
    } else {
        const SystemKind kind = parse_system_kind(a.system);
        if (kind == SystemKind::DD || kind == SystemKind::MM2)
            throw std::invalid_argument("system '" + a.system + "': no closed form; use simulate");
        const SystemSpec spec = build_spec(a);
        label = std::string(to_string(spec.kind));
        for (auto m : metrics) values.emplace_back(m, *sweep::reference_value(spec, m));
    }

    std::ofstream file;
    std::ostream& os = open_output(output, file, out);
    os << "system,metric,value\n";
    for (const auto& [m, v] : values) os << label << ',' << sweep::to_string(m) << ',' << sweep::format_number(v) << '\n';
    finish(file, output);
    return 0;
}

void write_trace(const std::string& path, const std::vector<sim::TransitionRecord>& trace) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << sim::trace_csv_header() << '\n';
    for (const auto& r : trace) f << sim::trace_csv_row(r) << '\n';
    f.flush();
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

std::string simulate_json(const sim::SimConfig& config, const sim::SimResult& result) {
    const SystemSpec& spec = config.spec;
    ordered_json cfg;
    cfg["system"] = std::string(to_string(spec.kind));
    cfg["sensor_a"] = law_json(spec.sensor_a);
    cfg["sensor_b"] = spec.sensor_b ? law_json(*spec.sensor_b) : ordered_json(nullptr);
    cfg["arrival_rate"] = spec.arrival_rate ? number(*spec.arrival_rate) : ordered_json(nullptr);
    if (spec.kind == SystemKind::DD)
        cfg["dd_offset"] = spec.dd_offset ? number(*spec.dd_offset) : ordered_json("random");
    cfg["seed"] = config.seed;
    cfg["accepted"] = config.target_accepted;
    cfg["warmup"] = config.warmup_accepted;
    cfg["batches"] = config.batch_count;

    const SimStats& s = result.stats;
    ordered_json st;
    st["avg_aoi"] = number(s.avg_aoi);
    st["avg_paoi"] = number(s.avg_paoi);
    st["effective_rate"] = number(s.effective_arrival_rate);
    st["obsolete_ratio"] = number(s.obsolete_ratio);
    st["n_accepted"] = s.n_accepted;
    st["n_obsolete"] = s.n_obsolete;
    st["sim_time"] = number(s.sim_time);
    st["half_width_aoi"] = number(s.half_width_aoi);
    st["half_width_paoi"] = number(s.half_width_paoi);
    st["half_width_rate"] = number(s.half_width_rate);
    st["half_width_obsolete"] = number(s.half_width_obsolete);

    ordered_json ref = nullptr;
    if (sweep::reference_value(spec, sweep::Metric::AvgAoi)) {
        ref = ordered_json::object();
        const std::pair<sweep::Metric, double> measured[] = {
            {sweep::Metric::AvgAoi, s.avg_aoi},
            {sweep::Metric::AvgPaoi, s.avg_paoi},
            {sweep::Metric::EffectiveRate, s.effective_arrival_rate},
            {sweep::Metric::ObsoleteRatio, s.obsolete_ratio},
        };
        for (const auto& [m, v] : measured) {
            const double want = *sweep::reference_value(spec, m);
            ordered_json e;
            e["analytic"] = number(want);
            // Relative error is undefined against a zero reference; report the absolute one.
            if (want != 0.0)
                e["rel_error"] = number(std::abs(v - want) / std::abs(want));
            else
                e["abs_error"] = number(std::abs(v - want));
            ref[std::string(sweep::to_string(m))] = e;
        }
    }

    ordered_json doc;
    doc["config"] = cfg;
    doc["stats"] = st;
    doc["reference"] = ref;
    return doc.dump(2);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Age of Information of dual-sensor status-update systems", "dualaoi"};
    app.set_config("--config", "", "optional key = value config file (flags take precedence)");
    app.require_subcommand(1);

    // analytic
    ScenarioArgs an;
    std::vector<std::string> an_metrics;
    std::string an_output;
    auto* analytic = app.add_subcommand("analytic", "evaluate closed forms");
    add_scenario_options(analytic, an, true);
    analytic->add_option("--metrics", an_metrics, "avg_aoi,avg_paoi,effective_rate,obsolete_ratio")->delimiter(',');
    analytic->add_option("--output", an_output, "CSV file (default stdout)");

    // simulate
    ScenarioArgs sm;
    std::optional<std::uint64_t> sm_seed;
    sim::SimConfig sm_cfg;
    std::string sm_trace, sm_output;
    auto* simulate = app.add_subcommand("simulate", "run one simulation and print JSON");
    add_scenario_options(simulate, sm, false);
    simulate->add_option("--seed", sm_seed, "master seed")->envname(kSeedEnv);
    simulate->add_option("--accepted", sm_cfg.target_accepted, "accepted deliveries, warm-up included")
        ->capture_default_str();
    simulate->add_option("--warmup", sm_cfg.warmup_accepted, "accepted deliveries discarded")->capture_default_str();
    simulate->add_option("--batches", sm_cfg.batch_count, "batches for the confidence intervals")
        ->capture_default_str();
    simulate->add_option("--trace", sm_trace, "write the classified transition trace as CSV");
    simulate->add_option("--output", sm_output, "JSON file (default stdout)");

    // sweep
    sweep::SweepSpec sw;
    std::vector<std::string> sw_systems{"mm", "md"}, sw_metrics;
    std::string sw_variable = "service_rate", sw_mode = "analytic", sw_phase = "random", sw_output;
    std::optional<std::uint64_t> sw_seed;
    auto* sweep_cmd = app.add_subcommand("sweep", "sweep one parameter and print CSV");
    sweep_cmd->add_option("--systems", sw_systems, "mm,md,dd,mm2,mm11,single")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--variable", sw_variable, "service_rate | rate_ratio | period")->capture_default_str();
    sweep_cmd->add_option("--start", sw.start)->capture_default_str();
    sweep_cmd->add_option("--stop", sw.stop)->capture_default_str();
    sweep_cmd->add_option("--steps", sw.steps)->capture_default_str();
    sweep_cmd->add_option("--metrics", sw_metrics, "subset of avg_aoi,avg_paoi,effective_rate,obsolete_ratio")
        ->delimiter(',');
    sweep_cmd->add_option("--mode", sw_mode, "analytic | simulate | both")->capture_default_str();
    sweep_cmd->add_option("--seed", sw_seed, "master seed")->envname(kSeedEnv);
    sweep_cmd->add_option("--replications", sw.replications)->capture_default_str();
    sweep_cmd->add_option("--workers", sw.workers, "concurrent simulation runs")->capture_default_str();
    sweep_cmd->add_option("--base-rate", sw.base_rate, "rate of sensor A for ratio and period sweeps")
        ->capture_default_str();
    sweep_cmd->add_option("--load", sw.mm2_load, "mm2 load lambda/(mu_a+mu_b)")->capture_default_str();
    sweep_cmd->add_option("--lambda-factor", sw.mm11_lambda_factor, "mm11 lambda as a multiple of mu")
        ->capture_default_str();
    sweep_cmd->add_option("--dd-phase", sw_phase, "dd phase of sensor B as a fraction of its period, or 'random'")
        ->capture_default_str();
    sweep_cmd->add_option("--accepted", sw.target_accepted)->capture_default_str();
    sweep_cmd->add_option("--warmup", sw.warmup_accepted)->capture_default_str();
    sweep_cmd->add_option("--batches", sw.batch_count)->capture_default_str();
    sweep_cmd->add_option("--output", sw_output, "CSV file (default stdout)");

    // validate
    validate::ValidateOptions vo;
    auto* validate_cmd = app.add_subcommand("validate", "run the built-in self-checks");
    validate_cmd->add_option("--seed", vo.seed)->envname(kSeedEnv)->capture_default_str();
    validate_cmd->add_option("--accepted", vo.accepted)->capture_default_str();
    validate_cmd->add_option("--refreshes", vo.refreshes)->capture_default_str();
    validate_cmd->add_option("--samples", vo.oracle_samples)->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (analytic->parsed()) return cmd_analytic(an, an_metrics, an_output, out);

        if (simulate->parsed()) {
            if (!sm_seed) throw std::invalid_argument(std::string("--seed: required (or set ") + kSeedEnv + ")");
            sm_cfg.spec = build_spec(sm);
            sm_cfg.seed = *sm_seed;
            sm_cfg.emit_trace = !sm_trace.empty();
            sm_cfg.validate();
            const auto result = sim::run(sm_cfg);
            if (!sm_trace.empty()) write_trace(sm_trace, result.trace);
            std::ofstream file;
            std::ostream& os = open_output(sm_output, file, out);
            os << simulate_json(sm_cfg, result) << '\n';
            finish(file, sm_output);
            return 0;
        }

        if (sweep_cmd->parsed()) {
            sw.systems.clear();
            for (const auto& s : sw_systems) sw.systems.push_back(sweep::parse_sweep_system(s));
            if (!sw_metrics.empty()) {
                sw.metrics.clear();
                for (const auto& m : sw_metrics) sw.metrics.push_back(sweep::parse_metric(m));
            }
            sw.variable = sweep::parse_variable(sw_variable);
            sw.mode = sweep::parse_mode(sw_mode);
            sw.seed = sw_seed;
            if (sw_phase != "random") {
                try {
                    sw.dd_phase = std::stod(sw_phase);
                } catch (const std::exception&) {
                    throw std::invalid_argument("--dd-phase: expected a number or 'random', got '" + sw_phase + "'");
                }
            }
            const auto rows = sweep::run_sweep(sw);
            if (sw_output.empty() || sw_output == "-")
                sweep::write_csv(out, rows);
            else
                sweep::write_csv_file(sw_output, rows);
            return 0;
        }

        if (validate_cmd->parsed()) {
            const auto results = validate::run_validation(vo);
            return validate::print_report(out, results) ? 0 : 1;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace dualaoi::cli
