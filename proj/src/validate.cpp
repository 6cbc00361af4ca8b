#include "dualaoi/validate.hpp"

#include "dualaoi/analytic.hpp"
#include "dualaoi/markov.hpp"
#include "dualaoi/sim.hpp"
#include "dualaoi/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

namespace dualaoi::validate {

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

std::string fmt(double v) { return sweep::format_number(v); }

CheckResult check(std::string name, bool ok, std::string detail) { return {std::move(name), ok, std::move(detail)}; }

CheckResult known_values() {
    struct Point {
        const char* label;
        double got;
        double want;
    };
    const Point pts[] = {
        {"mm avg (1,1)", analytic::mm_avg_aoi(1, 1), 1.25},
        {"mm peak (1,1)", analytic::mm_peak_aoi(1, 1), 4.0 / 3.0},
        {"md avg (1,1)", analytic::md_avg_aoi(1, 1), 1.20515865149729},
        {"md peak (1,1)", analytic::md_peak_aoi(1, 1), 1.44587573317637},
    };
    double worst = 0.0;
    std::string where;
    for (const auto& p : pts) {
        const double e = rel_err(p.got, p.want);
        if (e >= worst) {
            worst = e;
            where = p.label;
        }
    }
    return check("closed-form reference points", worst < 1e-9, "max rel err " + fmt(worst) + " at " + where);
}

CheckResult mm_alternative_derivations(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double a = u(rng), b = u(rng);
        worst = std::max(worst, rel_err(markov::mm_avg_aoi_graphical(a, b), analytic::mm_avg_aoi(a, b)));
        worst = std::max(worst, rel_err(markov::mm_peak_aoi_from_paths(a, b), analytic::mm_peak_aoi(a, b)));
        const auto pi = markov::solve_steady_state(markov::mm_transition_matrix(a, b));
        const auto closed = markov::mm_steady_state(a, b);
        for (std::size_t s = 0; s < pi.size(); ++s) worst = std::max(worst, std::abs(pi[s] - closed[s]));
    }
    return check("M-M paths, two-step cases and steady state", worst < 1e-10, "max err " + fmt(worst));
}

CheckResult md_series() {
    double worst = 0.0;
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        worst = std::max(worst, rel_err(analytic::md_avg_paoi_aggregate(1.0, x), analytic::md_peak_aoi(1.0, x)));
        worst = std::max(worst, rel_err(analytic::md_avg_aoi_aggregate(1.0, x), analytic::md_avg_aoi(1.0, x)));
    }
    return check("M-D per-state series", worst < 1e-10, "max rel err " + fmt(worst));
}

CheckResult simulation_vs_closed_form(const ValidateOptions& o) {
    double worst = 0.0;
    std::string where;
    for (double mu : {1.0, 2.0, 5.0}) {
        for (auto spec : {SystemSpec::mm(mu, mu), SystemSpec::md(mu, 1.0 / mu), SystemSpec::mm11_preempt(4 * mu, mu)}) {
            sim::SimConfig cfg;
            cfg.spec = spec;
            cfg.seed = o.seed;
            cfg.target_accepted = o.accepted;
            const auto r = sim::run(cfg);
            for (auto m : {sweep::Metric::AvgAoi, sweep::Metric::AvgPaoi}) {
                const double e = rel_err(m == sweep::Metric::AvgAoi ? r.stats.avg_aoi : r.stats.avg_paoi,
                                         *sweep::reference_value(spec, m));
                if (e >= worst) {
                    worst = e;
                    where = std::string(to_string(spec.kind)) + " mu=" + fmt(mu) + " " +
                            std::string(sweep::to_string(m));
                }
            }
        }
    }
    return check("simulation against closed forms", worst < 0.02, "max rel err " + fmt(worst) + " at " + where);
}

CheckResult path_statistics(const ValidateOptions& o) {
    sim::SimConfig cfg;
    cfg.spec = SystemSpec::mm(1.0, 2.0);
    cfg.seed = o.seed;
    cfg.target_accepted = o.refreshes + cfg.warmup_accepted;
    cfg.emit_trace = true;
    const auto r = sim::run(cfg);
    const auto est = sim::estimate_paths(r.trace);
    const auto table = markov::mm_path_table(1.0, 2.0);
    double worst = 0.0;
    for (std::size_t l = 0; l < table.size(); ++l) {
        const auto& e = est[l];
        const auto& t = table[l];
        auto z = [](double got, double want, double se) { return se > 0 ? std::abs(got - want) / se : 0.0; };
        worst = std::max({worst, z(e.prob, t.prob, e.prob_se), z(e.mean_service, t.mean_service, e.mean_service_se),
                          z(e.mean_interarrival, t.mean_interarrival, e.mean_interarrival_se)});
    }
    // 30 comparisons; 4.5 standard errors keeps chance failures rare.
    return check("refresh-path statistics", worst < 4.5, "max |z| " + fmt(worst));
}

CheckResult conditional_states(const ValidateOptions& o) {
    double worst = 0.0;
    std::string where;
    for (std::size_t k = 0; k <= 2; ++k) {
        for (std::size_t n = 0; n <= 2; ++n) {
            const auto mc = sim::conditional_md_oracle(1.0, 1.0, k, n, o.oracle_samples, o.seed);
            const auto ex = analytic::md_state_expectation(1.0, 1.0, k, n);
            const double e = std::max({std::abs(mc.peak_count - ex.peak_count) / ex.peak_count,
                                       std::abs(mc.peak_sum - ex.peak_sum) / ex.peak_sum,
                                       std::abs(mc.area - ex.area) / ex.area});
            if (e >= worst) {
                worst = e;
                std::ostringstream os;
                os << "(" << k << "," << n << ")";
                where = os.str();
            }
        }
    }
    return check("M-D conditional state expectations", worst < 0.03, "max rel err " + fmt(worst) + " at " + where);
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidateOptions& options) {
    std::vector<CheckResult> out;
    out.push_back(known_values());
    out.push_back(mm_alternative_derivations(options.seed));
    out.push_back(md_series());
    out.push_back(simulation_vs_closed_form(options));
    out.push_back(path_statistics(options));
    out.push_back(conditional_states(options));
    return out;
}

bool print_report(std::ostream& out, const std::vector<CheckResult>& results) {
    std::size_t passed = 0;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        passed += r.passed ? 1 : 0;
    }
    out << passed << "/" << results.size() << " checks passed\n";
    return passed == results.size();
}

}  // namespace dualaoi::validate
