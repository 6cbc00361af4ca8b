#pragma once

#include <cstdint>
#include <span>

namespace dualaoi::stats {

/// Welford accumulator for mean and variance.
class RunningMoments {
public:
    void add(double x) noexcept;

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// Unbiased sample variance (0 with fewer than two samples).
    double variance() const noexcept;
    double standard_error() const noexcept;

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Two-sided Student-t quantile t_{1-alpha/2, dof}.
double student_t_quantile(double confidence, std::uint64_t dof);

/// 95% half-width of the mean of `batches` treated as i.i.d. batch means;
/// +inf with fewer than two batches.
double batch_means_half_width(std::span<const double> batches, double confidence = 0.95);

}  // namespace dualaoi::stats
