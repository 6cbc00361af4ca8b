#pragma once

// Closed-form AoI and peak-AoI evaluators for the dual-sensor systems and
// their single-queue references. All rates are 1/time, all results are in
// time units; every function throws std::invalid_argument on a nonpositive
// or non-finite parameter.

#include <cstddef>

namespace dualaoi::analytic {

// --- M-M: both sensors exponential -----------------------------------------

/// Average peak AoI, 2(μA+μB)/(μA²+μAμB+μB²).
double mm_peak_aoi(double mu_a, double mu_b);
/// Average AoI, 2(μA²+3μAμB+μB²)/(μA+μB)³.
double mm_avg_aoi(double mu_a, double mu_b);

/// Rate of accepted deliveries, 1/E[Y] = (μA²+μAμB+μB²)/(μA+μB).
double mm_effective_rate(double mu_a, double mu_b);
/// Fraction of completed updates discarded as obsolete.
double mm_obsolete_ratio(double mu_a, double mu_b);

// --- M-D: sensor A exponential (rate mu), sensor B deterministic (period) ---

double md_peak_aoi(double mu, double period);
double md_avg_aoi(double mu, double period);

/// Poisson(μT) ⊗ Poisson(μT) probability of k sensor-A deliveries in the
/// previous period of sensor B and n in the current one.
double md_state_probability(double mu, double period, std::size_t k, std::size_t n);

/// Conditional per-period expectations given state (k, n).
struct MdStateExpectation {
    std::size_t k = 0;
    std::size_t n = 0;
    double peak_count = 0.0;  // E[N | (k,n)]
    double peak_sum = 0.0;    // E[A | (k,n)]
    double area = 0.0;        // E[Q | (k,n)]
};

MdStateExpectation md_state_expectation(double mu, double period, std::size_t k, std::size_t n);

/// Expected number of accepted deliveries per period, e^{-2μT} + μT e^{-μT} + μT.
double md_peak_count(double mu, double period);
/// Expected sum of peaks per period (closed form).
double md_peak_sum(double mu, double period);

/// Series index bound used by the per-state aggregations.
std::size_t md_series_limit(double mu, double period);

/// E[N] and E[A] as truncated double series over the per-state table.
double md_peak_count_series(double mu, double period);
double md_peak_sum_series(double mu, double period);

/// Peak AoI as E[A]/E[N] from the per-state series; agrees with md_peak_aoi.
double md_avg_paoi_aggregate(double mu, double period);
/// Σ P(k,n) E[Q|(k,n)] / T; agrees with md_avg_aoi.
double md_avg_aoi_aggregate(double mu, double period);

double md_effective_rate(double mu, double period);
double md_obsolete_ratio(double mu, double period);

// --- single-queue references ------------------------------------------------

/// Zero-wait single sensor with exponential service: both metrics are 2/μ.
double single_queue_avg_aoi(double mu);
double single_queue_peak_aoi(double mu);

/// M/M/1/1 with preemption in service: avg 1/λ + 1/μ,
/// peak 1/λ + 1/μ + 1/(λ+μ).
double mm11_preempt_avg_aoi(double lambda, double mu);
double mm11_preempt_peak_aoi(double lambda, double mu);

/// Percentage reduction of `value` relative to the single queue 2/μ.
double reduction_vs_single_queue(double value, double mu);

// --- simplex volume ---------------------------------------------------------

/// Volume of {x3..xn ≥ 0 : Σ ≤ remaining}, i.e. remaining^{n−2}/(n−2)!. Requires n ≥ 2.
double lemma1_simplex(double remaining, std::size_t n);

}  // namespace dualaoi::analytic
