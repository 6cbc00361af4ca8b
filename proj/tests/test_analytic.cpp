#include "dualaoi/analytic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

namespace an = dualaoi::analytic;

namespace {

// Closed forms retyped from their published expressions, in long double.
long double mm_peak_ref(long double a, long double b) { return 2 * (a + b) / (a * a + a * b + b * b); }

long double mm_avg_ref(long double a, long double b) {
    return 2 * (a * a + 3 * a * b + b * b) / ((a + b) * (a + b) * (a + b));
}

long double md_peak_ref(long double mu, long double t) {
    const long double x = mu * t, e = std::exp(x);
    return (2 + 2 * x + e * (-2 + x * (2 * e + x))) / (mu * (1 + e * (1 + e) * x));
}

long double md_avg_ref(long double mu, long double t) {
    const long double x = mu * t, e = std::exp(x);
    return (3 + 2 * x + e * (-3 + (-1 + 2 * e) * x)) / (t * mu * mu * e * e);
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

// Values evaluated at 30 significant digits and frozen here.
TEST(MmClosedForm, FrozenValues) {
    struct Row {
        double a, b, peak, avg;
    };
    const Row rows[] = {
        {1, 1, 1.3333333333333333, 1.25},
        {1, 2, 0.85714285714285714, 0.81481481481481481},
        {0.3, 7.5, 0.26625704045058884, 0.2658928842360795},
        {4, 0.25, 0.49816849816849817, 0.49664156319967433},
    };
    for (const auto& r : rows) {
        EXPECT_LT(rel(an::mm_peak_aoi(r.a, r.b), r.peak), 1e-14) << r.a << "," << r.b;
        EXPECT_LT(rel(an::mm_avg_aoi(r.a, r.b), r.avg), 1e-14) << r.a << "," << r.b;
    }
}

TEST(MdClosedForm, FrozenValues) {
    struct Row {
        double mu, t, peak, avg;
    };
    const Row rows[] = {
        {1, 1, 1.445875733176368, 1.2051586514972942},
        {2, 0.5, 0.72293786658818398, 0.60257932574864709},
        {1, 0.1, 0.19874981572033103, 0.14942413938067272},
        {3, 2, 0.66969284455799052, 0.66543241075529459},
        {0.5, 4, 3.8275148968081506, 3.4515330560380758},
        {1, 0.001, 0.0019999986674176483, 0.0014999993755164043},
        {10, 5, 0.2, 0.2},
    };
    for (const auto& r : rows) {
        EXPECT_LT(rel(an::md_peak_aoi(r.mu, r.t), r.peak), 1e-12) << r.mu << "," << r.t;
        EXPECT_LT(rel(an::md_avg_aoi(r.mu, r.t), r.avg), 1e-12) << r.mu << "," << r.t;
    }
}

TEST(MmClosedForm, MatchesRetypedFormulaOnRandomPairs) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.05, 20.0);
    for (int i = 0; i < 500; ++i) {
        const double a = u(rng), b = u(rng);
        EXPECT_LT(rel(an::mm_peak_aoi(a, b), static_cast<double>(mm_peak_ref(a, b))), 1e-13);
        EXPECT_LT(rel(an::mm_avg_aoi(a, b), static_cast<double>(mm_avg_ref(a, b))), 1e-13);
    }
}

TEST(MdClosedForm, MatchesRetypedFormulaOnGrid) {
    for (double mu : {0.2, 0.5, 1.0, 2.0, 5.0}) {
        for (double t : {0.05, 0.2, 1.0, 3.0, 6.0}) {
            EXPECT_LT(rel(an::md_peak_aoi(mu, t), static_cast<double>(md_peak_ref(mu, t))), 1e-11) << mu << "," << t;
            EXPECT_LT(rel(an::md_avg_aoi(mu, t), static_cast<double>(md_avg_ref(mu, t))), 1e-11) << mu << "," << t;
        }
    }
}

TEST(ClosedForm, SpecExampleValues) {
    EXPECT_DOUBLE_EQ(an::mm_avg_aoi(1, 1), 1.25);
    EXPECT_NEAR(an::mm_peak_aoi(1, 1), 4.0 / 3.0, 1e-15);
    EXPECT_NEAR(an::md_avg_aoi(1, 1), 1.2052, 1e-4);
    EXPECT_NEAR(an::md_peak_aoi(1, 1), 1.4459, 1e-4);
    EXPECT_NEAR(an::md_avg_aoi(1, 0.01), 0.0149993801405, 1e-12);
}

TEST(ClosedForm, SymmetryAndHomogeneity) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 100; ++i) {
        const double a = u(rng), b = u(rng), c = u(rng);
        EXPECT_NEAR(an::mm_avg_aoi(a, b), an::mm_avg_aoi(b, a), 1e-14 * an::mm_avg_aoi(a, b));
        EXPECT_NEAR(an::mm_peak_aoi(a, b), an::mm_peak_aoi(b, a), 1e-14 * an::mm_peak_aoi(a, b));
        EXPECT_LT(rel(an::mm_avg_aoi(c * a, c * b), an::mm_avg_aoi(a, b) / c), 1e-12);
        EXPECT_LT(rel(an::mm_peak_aoi(c * a, c * b), an::mm_peak_aoi(a, b) / c), 1e-12);
        // M-D: scaling μ by c and T by 1/c scales time by 1/c.
        const double t = 2.0 / b;
        EXPECT_LT(rel(an::md_avg_aoi(c * a, t / c), an::md_avg_aoi(a, t) / c), 1e-10);
        EXPECT_LT(rel(an::md_peak_aoi(c * a, t / c), an::md_peak_aoi(a, t) / c), 1e-10);
    }
}

TEST(ClosedForm, PeakDominatesAverageAndDualBeatsSingle) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double a = u(rng), b = u(rng);
        EXPECT_GT(an::mm_peak_aoi(a, b), an::mm_avg_aoi(a, b));
        EXPECT_GE(an::md_peak_aoi(a, 1.0 / b), an::md_avg_aoi(a, 1.0 / b) * (1 - 1e-12));
        // Adding a second sensor never hurts the first.
        EXPECT_LT(an::mm_avg_aoi(a, b), an::single_queue_avg_aoi(a));
    }
}

TEST(ClosedForm, EqualRateRatios) {
    for (double mu : {0.5, 1.0, 3.0}) {
        EXPECT_NEAR(an::mm_avg_aoi(mu, mu) / an::single_queue_avg_aoi(mu), 0.625, 1e-14);
        EXPECT_NEAR(an::mm_peak_aoi(mu, mu) / an::single_queue_peak_aoi(mu), 2.0 / 3.0, 1e-14);
    }
}

TEST(ClosedForm, Reductions) {
    EXPECT_NEAR(an::reduction_vs_single_queue(an::mm_avg_aoi(1, 1), 1), 37.5, 1e-12);
    EXPECT_NEAR(an::reduction_vs_single_queue(an::mm_peak_aoi(1, 1), 1), 100.0 / 3.0, 1e-12);
    EXPECT_NEAR(an::reduction_vs_single_queue(an::md_avg_aoi(1, 1), 1), 39.742, 1e-3);
    EXPECT_NEAR(an::reduction_vs_single_queue(an::md_peak_aoi(1, 1), 1), 27.706, 1e-3);
}

TEST(MdClosedForm, Limits) {
    // Sensor A too slow to matter: sensor B alone, T-periodic.
    EXPECT_NEAR(an::md_peak_aoi(1e-7, 1.0), 2.0, 1e-5);
    EXPECT_NEAR(an::md_avg_aoi(1e-7, 1.0), 1.5, 1e-5);
    // Sensor B too slow to matter: sensor A alone.
    EXPECT_NEAR(an::md_peak_aoi(1.0, 40.0), 2.0, 1e-9);
    EXPECT_NEAR(an::md_avg_aoi(1.0, 40.0), 2.0, 1e-9);
    EXPECT_NEAR(an::md_peak_aoi(1e4, 1.0), 2e-4, 1e-9);
}

TEST(MdClosedForm, SmallArgumentBranchIsContinuous) {
    for (double x : {0.0099, 0.00999999, 0.01, 0.01000001, 0.0101}) {
        EXPECT_LT(rel(an::md_avg_aoi(1.0, x), static_cast<double>(md_avg_ref(1.0L, x))), 1e-7) << x;
        EXPECT_LT(rel(an::md_peak_aoi(1.0, x), static_cast<double>(md_peak_ref(1.0L, x))), 1e-7) << x;
    }
}

TEST(MdClosedForm, RejectsInvalidArguments) {
    EXPECT_THROW(an::md_avg_aoi(0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(an::md_peak_aoi(1.0, -1.0), std::invalid_argument);
    EXPECT_THROW(an::mm_avg_aoi(1.0, std::nan("")), std::invalid_argument);
    EXPECT_THROW(an::mm_peak_aoi(-1.0, 1.0), std::invalid_argument);
}

TEST(MdSeries, StateProbabilitiesSumToOne) {
    for (double x : {0.1, 1.0, 5.0, 20.0}) {
        const std::size_t m = an::md_series_limit(1.0, x);
        double s = 0.0;
        for (std::size_t k = 0; k <= m; ++k)
            for (std::size_t n = 0; n <= m; ++n) s += an::md_state_probability(1.0, x, k, n);
        EXPECT_NEAR(s, 1.0, 1e-12) << x;
    }
}

TEST(MdSeries, PeakCountClosedFormAndSeries) {
    EXPECT_NEAR(an::md_peak_count(1, 1), 1.503214724408055, 1e-14);
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        EXPECT_LT(rel(an::md_peak_count_series(1.0, x), an::md_peak_count(1.0, x)), 1e-12) << x;
        EXPECT_LT(rel(an::md_peak_sum_series(1.0, x), an::md_peak_sum(1.0, x)), 1e-12) << x;
        EXPECT_LT(rel(an::md_avg_paoi_aggregate(1.0, x), an::md_peak_aoi(1.0, x)), 1e-10) << x;
        EXPECT_LT(rel(an::md_avg_aoi_aggregate(1.0, x), an::md_avg_aoi(1.0, x)), 1e-10) << x;
    }
    EXPECT_NEAR(an::md_peak_count(1.0, 30.0) / 30.0, 1.0, 1e-9);
}

TEST(MdSeries, ZeroPreviousCompletionStates) {
    const double t = 1.7;
    EXPECT_DOUBLE_EQ(an::md_state_expectation(1, t, 0, 0).area, 1.5 * t * t);
    EXPECT_DOUBLE_EQ(an::md_state_expectation(1, t, 0, 1).area, 1.5 * t * t);
    for (std::size_t n = 2; n < 8; ++n) {
        const double nd = static_cast<double>(n);
        const auto e = an::md_state_expectation(1, t, 0, n);
        EXPECT_NEAR(e.peak_sum, (3 * nd - 1) * t / (1 + nd), 1e-14);
        EXPECT_NEAR(e.area, (4 * nd + 5) * t * t / ((1 + nd) * (2 + nd)), 1e-14);
    }
}

TEST(MdEffective, RateAndObsoleteRatioAtUnitRates) {
    EXPECT_NEAR(an::md_effective_rate(1, 1), 1.503214724408055, 1e-14);
    EXPECT_NEAR(an::md_obsolete_ratio(1, 1), 1 - 1.503214724408055 / 2.0, 1e-14);
    EXPECT_DOUBLE_EQ(an::mm_effective_rate(1, 1), 1.5);
    EXPECT_DOUBLE_EQ(an::mm_obsolete_ratio(1, 1), 0.25);
}

TEST(Preemptive, MatchesDualAtFourTimesRate) {
    for (double mu : {0.5, 1.0, 2.0, 5.0}) {
        EXPECT_NEAR(an::mm11_preempt_avg_aoi(4 * mu, mu), an::mm_avg_aoi(mu, mu), 1e-14 / mu);
        EXPECT_NEAR(an::mm11_preempt_peak_aoi(5.54 * mu, mu), an::mm_peak_aoi(mu, mu), 1e-3 / mu);
    }
}

TEST(Lemma, SimplexVolumeMatchesNestedIntegration) {
    using boost::math::quadrature::gauss_kronrod;
    // Volume of {x ≥ 0, Σx ≤ r} in `dims` dimensions by nested quadrature.
    std::function<double(double, int)> volume = [&](double r, int dims) -> double {
        if (dims == 0) return 1.0;
        return gauss_kronrod<double, 31>::integrate([&](double x) { return volume(r - x, dims - 1); }, 0.0, r, 5,
                                                    1e-12);
    };
    for (std::size_t n = 2; n <= 5; ++n) {
        for (double r : {0.25, 0.5, 1.0}) {
            const double want = volume(r, static_cast<int>(n) - 2);
            EXPECT_LT(rel(an::lemma1_simplex(r, n), want), 1e-6) << n << "," << r;
        }
    }
    EXPECT_THROW(an::lemma1_simplex(1.0, 1), std::invalid_argument);
    EXPECT_DOUBLE_EQ(an::lemma1_simplex(0.0, 2), 1.0);
}
