#include "dualaoi/analytic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualaoi::analytic {

namespace {

void require_positive(double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0))
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
}

void require_rates(double a, double b) {
    require_positive(a, "mu_a");
    require_positive(b, "mu_b");
}

void require_md(double mu, double period) {
    require_positive(mu, "mu");
    require_positive(period, "period");
}

// Below this μT the closed forms lose digits to cancellation; switch to the
// Taylor expansions of the e^{-2μT}-scaled numerators.
constexpr double kSmallLoad = 1e-2;

// e^{-2x}·[2 + 2x + e^{x}(−2 + x(2e^{x} + x))]
double md_peak_numerator(double x) {
    if (x < kSmallLoad) {
        const double x2 = x * x;
        return 2.0 * x + x * x2 * (2.0 / 3.0 + x * (-11.0 / 12.0 + x * (13.0 / 20.0 - x * 19.0 / 60.0)));
    }
    const double em = std::exp(-x);
    return 2.0 * em * em * (1.0 + x) + em * (x * x - 2.0) + 2.0 * x;
}

// e^{-2x}·[3 + 2x + e^{x}(−3 + (−1 + 2e^{x})x)]
double md_avg_numerator(double x) {
    if (x < kSmallLoad) {
        const double x2 = x * x;
        return x2 * (1.5 + x2 * (-5.0 / 8.0 + x * (31.0 / 60.0 + x * (-21.0 / 80.0 + x * 127.0 / 1260.0))));
    }
    const double em = std::exp(-x);
    return em * em * (3.0 + 2.0 * x) - em * (3.0 + x) + 2.0 * x;
}

double log_poisson(double x, std::size_t k) {
    const double kd = static_cast<double>(k);
    return kd * std::log(x) - std::lgamma(kd + 1.0) - x;
}

constexpr double kTailTolerance = 1e-12;

// Upper bound on P(Poisson(x) > limit) via a geometric majorant of the pmf
// ratios, valid for limit + 2 > x.
double poisson_tail_bound(double x, std::size_t limit) {
    const double next = static_cast<double>(limit + 1);
    const double ratio = x / (next + 1.0);
    if (ratio >= 1.0) return 1.0;
    return std::exp(log_poisson(x, limit + 1)) / (1.0 - ratio);
}

template <typename Term>
double md_series(double mu, double period, Term term) {
    const double x = mu * period;
    const std::size_t limit = md_series_limit(mu, period);
    const double tail = poisson_tail_bound(x, limit);
    if (tail > kTailTolerance)
        throw std::runtime_error("M-D series truncation tail bound " + std::to_string(tail) + " exceeds tolerance");
    // The state probability factorizes, so the double series is a product of
    // two Poisson weights; the inner pmfs are tabulated once.
    std::vector<double> pmf(limit + 1);
    for (std::size_t i = 0; i <= limit; ++i) pmf[i] = std::exp(log_poisson(x, i));
    double sum = 0.0;
    for (std::size_t k = 0; k <= limit; ++k) {
        if (pmf[k] == 0.0) continue;
        double inner = 0.0;
        for (std::size_t n = 0; n <= limit; ++n)
            if (pmf[n] != 0.0) inner += pmf[n] * term(md_state_expectation(mu, period, k, n));
        sum += pmf[k] * inner;
    }
    return sum;
}

}  // namespace

// ---------------------------------------------------------------------------

double mm_peak_aoi(double mu_a, double mu_b) {
    require_rates(mu_a, mu_b);
    return 2.0 * (mu_a + mu_b) / (mu_a * mu_a + mu_a * mu_b + mu_b * mu_b);
}

double mm_avg_aoi(double mu_a, double mu_b) {
    require_rates(mu_a, mu_b);
    const double s = mu_a + mu_b;
    return 2.0 * (mu_a * mu_a + 3.0 * mu_a * mu_b + mu_b * mu_b) / (s * s * s);
}

double mm_effective_rate(double mu_a, double mu_b) {
    require_rates(mu_a, mu_b);
    return (mu_a * mu_a + mu_a * mu_b + mu_b * mu_b) / (mu_a + mu_b);
}

double mm_obsolete_ratio(double mu_a, double mu_b) {
    return 1.0 - mm_effective_rate(mu_a, mu_b) / (mu_a + mu_b);
}

// ---------------------------------------------------------------------------

double md_peak_aoi(double mu, double period) {
    require_md(mu, period);
    const double x = mu * period;
    const double em = std::exp(-x);
    return md_peak_numerator(x) / (mu * (em * em + x * em + x));
}

double md_avg_aoi(double mu, double period) {
    require_md(mu, period);
    const double x = mu * period;
    return md_avg_numerator(x) / (x * mu);
}

double md_state_probability(double mu, double period, std::size_t k, std::size_t n) {
    require_md(mu, period);
    const double x = mu * period;
    return std::exp(log_poisson(x, k) + log_poisson(x, n));
}

MdStateExpectation md_state_expectation(double mu, double period, std::size_t k, std::size_t n) {
    require_md(mu, period);
    const double T = period;
    const double kd = static_cast<double>(k);
    const double nd = static_cast<double>(n);
    MdStateExpectation e{k, n, 0.0, 0.0, 0.0};
    if (k == 0) {
        // The first sensor-A delivery of the period is always stale.
        if (n <= 1) {
            e.peak_count = 1.0;
            e.peak_sum = 2.0 * T;
        } else {
            e.peak_count = nd - 1.0;
            e.peak_sum = (3.0 * nd - 1.0) * T / (1.0 + nd);
        }
        e.area = n == 0 ? 1.5 * T * T : (4.0 * nd + 5.0) * T * T / ((1.0 + nd) * (2.0 + nd));
    } else {
        if (n == 0) {
            e.peak_count = 1.0;
            e.peak_sum = (3.0 + kd) * T / (1.0 + kd);
            e.area = (5.0 + kd) * T * T / (2.0 * (1.0 + kd));
        } else {
            if (n == 1) {
                e.peak_count = 2.0;
                e.peak_sum = (9.0 + 3.0 * kd) * T / (2.0 * (1.0 + kd));
            } else {
                e.peak_count = nd;
                e.peak_sum = (2.0 * nd * kd + 5.0 * nd - kd + 2.0) * T / ((1.0 + kd) * (1.0 + nd));
            }
            e.area = (2.0 * nd * kd + 5.0 * nd + kd + 7.0) * T * T / ((1.0 + kd) * (1.0 + nd) * (2.0 + nd));
        }
    }
    return e;
}

double md_peak_count(double mu, double period) {
    require_md(mu, period);
    const double x = mu * period;
    const double em = std::exp(-x);
    return em * em + x * em + x;
}

double md_peak_sum(double mu, double period) {
    require_md(mu, period);
    return md_peak_numerator(mu * period) / mu;
}

std::size_t md_series_limit(double mu, double period) {
    require_md(mu, period);
    const double scaled = std::ceil(10.0 * mu * period);
    return scaled > 60.0 ? static_cast<std::size_t>(scaled) : 60;
}

double md_peak_count_series(double mu, double period) {
    return md_series(mu, period, [](const MdStateExpectation& e) { return e.peak_count; });
}

double md_peak_sum_series(double mu, double period) {
    return md_series(mu, period, [](const MdStateExpectation& e) { return e.peak_sum; });
}

double md_avg_paoi_aggregate(double mu, double period) {
    return md_peak_sum_series(mu, period) / md_peak_count_series(mu, period);
}

double md_avg_aoi_aggregate(double mu, double period) {
    return md_series(mu, period, [](const MdStateExpectation& e) { return e.area; }) / period;
}

double md_effective_rate(double mu, double period) { return md_peak_count(mu, period) / period; }

double md_obsolete_ratio(double mu, double period) {
    // Per period sensor A completes μT updates on average and sensor B one.
    return 1.0 - md_peak_count(mu, period) / (mu * period + 1.0);
}

// ---------------------------------------------------------------------------

double single_queue_avg_aoi(double mu) {
    require_positive(mu, "mu");
    return 2.0 / mu;
}

double single_queue_peak_aoi(double mu) {
    require_positive(mu, "mu");
    return 2.0 / mu;
}

double mm11_preempt_avg_aoi(double lambda, double mu) {
    require_positive(lambda, "lambda");
    require_positive(mu, "mu");
    return 1.0 / lambda + 1.0 / mu;
}

double mm11_preempt_peak_aoi(double lambda, double mu) {
    require_positive(lambda, "lambda");
    require_positive(mu, "mu");
    return 1.0 / lambda + 1.0 / mu + 1.0 / (lambda + mu);
}

double reduction_vs_single_queue(double value, double mu) {
    return (1.0 - value / single_queue_avg_aoi(mu)) * 100.0;
}

double lemma1_simplex(double remaining, std::size_t n) {
    if (n < 2) throw std::invalid_argument("lemma1_simplex: n must be at least 2");
    if (!(std::isfinite(remaining) && remaining >= 0.0))
        throw std::invalid_argument("lemma1_simplex: remaining time must be nonnegative");
    const double m = static_cast<double>(n - 2);
    return std::pow(remaining, m) / std::exp(std::lgamma(m + 1.0));
}

}  // namespace dualaoi::analytic
