#include "dualaoi/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dualaoi::stats {

void RunningMoments::add(double x) noexcept {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

double RunningMoments::variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

double RunningMoments::standard_error() const noexcept {
    return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double student_t_quantile(double confidence, std::uint64_t dof) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must lie in (0, 1)");
    if (dof == 0) throw std::invalid_argument("student_t_quantile: zero degrees of freedom");
    const boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(dist, 0.5 + confidence / 2.0);
}

double batch_means_half_width(std::span<const double> batches, double confidence) {
    if (batches.size() < 2) return std::numeric_limits<double>::infinity();
    RunningMoments m;
    for (double b : batches) m.add(b);
    return student_t_quantile(confidence, batches.size() - 1) * m.standard_error();
}

}  // namespace dualaoi::stats
