#include "dualaoi/sim.hpp"
#include "dualaoi/stats.hpp"

#include <cmath>

namespace dualaoi::sim {

namespace {

double binomial_se(double p, std::uint64_t n) {
    return n > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
}

}  // namespace

std::vector<PathEstimate> estimate_paths(std::span<const TransitionRecord> trace) {
    std::vector<PathEstimate> out(markov::kPathCount);
    std::vector<stats::RunningMoments> service(markov::kPathCount), inter(markov::kPathCount),
        inter_sq(markov::kPathCount);
    std::uint64_t from_counts[markov::kStateCount] = {};

    for (const auto& r : trace) {
        if (r.path_index <= 0 || !r.prev_state) continue;
        const auto l = static_cast<std::size_t>(r.path_index - 1);
        ++out[l].count;
        ++from_counts[markov::index(*r.prev_state)];
        service[l].add(r.service);
        inter[l].add(r.interarrival);
        inter_sq[l].add(r.interarrival * r.interarrival);
    }

    const auto table = markov::mm_path_table(1.0, 1.0);  // only the topology is used
    for (std::size_t l = 0; l < markov::kPathCount; ++l) {
        auto& e = out[l];
        e.path_index = static_cast<int>(l + 1);
        e.from_count = from_counts[markov::index(table[l].from)];
        e.prob = e.from_count > 0 ? static_cast<double>(e.count) / static_cast<double>(e.from_count) : 0.0;
        e.prob_se = binomial_se(e.prob, e.from_count);
        e.mean_service = service[l].mean();
        e.mean_service_se = service[l].standard_error();
        e.mean_interarrival = inter[l].mean();
        e.mean_interarrival_se = inter[l].standard_error();
        e.second_moment_interarrival = inter_sq[l].mean();
        e.second_moment_interarrival_se = inter_sq[l].standard_error();
    }
    return out;
}

std::vector<TwoStepEstimate> estimate_two_step(std::span<const TransitionRecord> trace) {
    const auto table = markov::mm_two_step_table(1.0, 1.0);  // only the triples are used
    std::vector<TwoStepEstimate> out(markov::kTwoStepCount);
    std::vector<stats::RunningMoments> ty(markov::kTwoStepCount), yy(markov::kTwoStepCount);
    std::uint64_t pairs = 0;

    for (std::size_t i = 1; i < trace.size(); ++i) {
        const auto& a = trace[i - 1];
        const auto& b = trace[i];
        if (a.path_index <= 0 || b.path_index <= 0) continue;
        ++pairs;
        for (std::size_t c = 0; c < table.size(); ++c) {
            const auto& t = table[c].triple;
            if (t[0] == *a.prev_state && t[1] == *a.new_state && t[1] == *b.prev_state && t[2] == *b.new_state) {
                ++out[c].count;
                ty[c].add(a.service * b.interarrival);
                yy[c].add(b.interarrival * b.interarrival);
                break;
            }
        }
    }

    for (std::size_t c = 0; c < out.size(); ++c) {
        auto& e = out[c];
        e.case_index = table[c].case_index;
        e.prob = pairs > 0 ? static_cast<double>(e.count) / static_cast<double>(pairs) : 0.0;
        e.prob_se = binomial_se(e.prob, pairs);
        e.mean_service_times_interarrival = ty[c].mean();
        e.mean_service_times_interarrival_se = ty[c].standard_error();
        e.second_moment = yy[c].mean();
        e.second_moment_se = yy[c].standard_error();
    }
    return out;
}

}  // namespace dualaoi::sim
