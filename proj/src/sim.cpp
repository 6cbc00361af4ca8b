#include "dualaoi/sim.hpp"

#include "dualaoi/stats.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dualaoi::sim {

using markov::MmState;

void SimConfig::validate() const {
    spec.validate();
    if (target_accepted <= warmup_accepted)
        throw std::invalid_argument("target_accepted: must exceed warmup_accepted");
    if (batch_count < 1) throw std::invalid_argument("batch_count: must be at least 1");
    if (batch_count > target_accepted - warmup_accepted)
        throw std::invalid_argument("batch_count: more batches than measured deliveries");
}

// ---------------------------------------------------------------------------

bool EventQueue::Later::operator()(const Event& x, const Event& y) const noexcept {
    if (x.time != y.time) return x.time > y.time;
    if (x.kind != y.kind) return static_cast<int>(x.kind) > static_cast<int>(y.kind);
    return x.sequence > y.sequence;
}

void EventQueue::push(Event e) {
    e.sequence = next_sequence_++;
    heap_.push(e);
}

Event EventQueue::pop() {
    if (heap_.empty()) throw std::logic_error("EventQueue::pop on an empty queue");
    Event e = heap_.top();
    heap_.pop();
    return e;
}

// ---------------------------------------------------------------------------

namespace {

struct BatchMark {
    double area = 0.0;
    double elapsed = 0.0;
    double peak_sum = 0.0;
    std::uint64_t accepted = 0;
    std::uint64_t obsolete = 0;
};

// Owns the AoI path for one run: warm-up, batch bookkeeping, refresh-state
// tracking and the optional trace.
class Monitor {
public:
    Monitor(const SimConfig& config, bool dual)
        : config_(config),
          dual_(dual),
          measured_target_(config.target_accepted - config.warmup_accepted),
          measuring_(config.warmup_accepted == 0) {
        marks_.reserve(config.batch_count);
    }

    bool done() const noexcept { return accepted_total_ >= config_.target_accepted; }

    // `other_generation` is the generation time of the update the other
    // dual sensor is serving; unused for single-queue systems.
    void deliver(double generation_time, double now, int sensor, double other_generation) {
        const Delivery d = path_.deliver(generation_time, now);
        if (config_.emit_trace) result_.deliveries.push_back({now, generation_time, sensor, d == Delivery::Accepted});
        if (d == Delivery::Obsolete) return;

        ++accepted_total_;
        TransitionRecord record;
        record.time = now;
        record.generation_time = generation_time;
        record.sensor = sensor;
        record.interarrival = now - last_accept_time_;
        record.service = now - generation_time;
        last_accept_time_ = now;

        if (dual_) {
            const markov::RefreshContext ctx{sensor == 0 ? markov::Sensor::A : markov::Sensor::B, other_generation,
                                             generation_time};
            record.new_state = markov::refresh_state(ctx);
            if (state_) {
                record.prev_state = state_;
                record.path_index = markov::classify_refresh(*state_, ctx).path_index;
            }
            state_ = record.new_state;
        }

        if (!measuring_) {
            if (accepted_total_ == config_.warmup_accepted) {
                path_.reset_statistics();
                measuring_ = true;
                result_.measurement_start = now;
                result_.refresh_at_start = path_.last_refresh_timestamp();
            }
            return;
        }
        if (config_.emit_trace) result_.trace.push_back(record);
        const std::uint64_t measured = path_.deliveries_accepted();
        const std::uint64_t boundary = (marks_.size() + 1) * measured_target_ / config_.batch_count;
        if (measured == boundary)
            marks_.push_back({path_.integrated_area(), path_.elapsed(), path_.peak_sum(), measured,
                              path_.deliveries_obsolete()});
    }

    SimResult finish() {
        SimStats& s = result_.stats;
        s.n_accepted = path_.deliveries_accepted();
        s.n_obsolete = path_.deliveries_obsolete();
        s.sim_time = path_.elapsed();
        s.avg_aoi = path_.average_age();
        s.avg_paoi = path_.average_peak();
        s.effective_arrival_rate = s.sim_time > 0.0 ? static_cast<double>(s.n_accepted) / s.sim_time : 0.0;
        const double delivered = static_cast<double>(s.n_accepted + s.n_obsolete);
        s.obsolete_ratio = delivered > 0.0 ? static_cast<double>(s.n_obsolete) / delivered : 0.0;

        std::vector<double> aoi, paoi, rate, obsolete;
        BatchMark prev;
        for (const BatchMark& m : marks_) {
            const double dt = m.elapsed - prev.elapsed;
            const double dacc = static_cast<double>(m.accepted - prev.accepted);
            const double dobs = static_cast<double>(m.obsolete - prev.obsolete);
            aoi.push_back((m.area - prev.area) / dt);
            paoi.push_back((m.peak_sum - prev.peak_sum) / dacc);
            rate.push_back(dacc / dt);
            obsolete.push_back(dobs / (dacc + dobs));
            prev = m;
        }
        s.half_width_aoi = stats::batch_means_half_width(aoi);
        s.half_width_paoi = stats::batch_means_half_width(paoi);
        s.half_width_rate = stats::batch_means_half_width(rate);
        s.half_width_obsolete = stats::batch_means_half_width(obsolete);
        return std::move(result_);
    }

private:
    const SimConfig& config_;
    bool dual_;
    std::uint64_t measured_target_;
    bool measuring_;
    AoiPath path_;
    std::uint64_t accepted_total_ = 0;
    double last_accept_time_ = 0.0;
    std::optional<MmState> state_;
    std::vector<BatchMark> marks_;
    SimResult result_;
};

Event next_event(EventQueue& queue) {
    if (queue.empty()) throw std::logic_error("simulation event queue ran dry");
    return queue.pop();
}

SimResult run_dual(const SimConfig& config) {
    const SystemSpec& spec = config.spec;
    const ServiceModel& law_a = spec.sensor_a;
    const ServiceModel& law_b = *spec.sensor_b;
    RandomStream stream_a(config.seed, streams::kServiceA);
    RandomStream stream_b(config.seed, streams::kServiceB);

    double start_b = 0.0;
    if (spec.kind == SystemKind::DD) {
        if (spec.dd_offset) {
            start_b = *spec.dd_offset;
        } else {
            RandomStream phase(config.seed, streams::kPhase);
            start_b = phase.uniform() * law_b.period();
        }
    }

    Monitor monitor(config, true);
    EventQueue queue;
    // Generation time of the update each sensor is serving.
    double gen_a = 0.0;
    double gen_b = start_b;
    queue.push({sample_service(law_a, stream_a), EventKind::ServiceCompletionA, gen_a});
    queue.push({start_b + sample_service(law_b, stream_b), EventKind::ServiceCompletionB, gen_b});

    while (!monitor.done()) {
        const Event e = next_event(queue);
        if (e.kind == EventKind::ServiceCompletionA) {
            monitor.deliver(e.generation_time, e.time, 0, gen_b);
            gen_a = e.time;
            queue.push({e.time + sample_service(law_a, stream_a), EventKind::ServiceCompletionA, gen_a});
        } else {
            monitor.deliver(e.generation_time, e.time, 1, gen_a);
            gen_b = e.time;
            queue.push({e.time + sample_service(law_b, stream_b), EventKind::ServiceCompletionB, gen_b});
        }
    }
    return monitor.finish();
}

constexpr double kNoGeneration = -std::numeric_limits<double>::infinity();

SimResult run_mm2(const SimConfig& config) {
    const double lambda = *config.spec.arrival_rate;
    const ServiceModel& law = config.spec.sensor_a;
    RandomStream arrivals(config.seed, streams::kArrivals);
    RandomStream servers[2] = {RandomStream(config.seed, streams::kServiceA),
                               RandomStream(config.seed, streams::kServiceB)};
    constexpr EventKind kCompletion[2] = {EventKind::ServiceCompletionA, EventKind::ServiceCompletionB};

    Monitor monitor(config, false);
    EventQueue queue;
    std::deque<double> waiting;  // arrival (= generation) times, FCFS
    bool busy[2] = {false, false};

    auto start = [&](int server, double now, double generation) {
        busy[server] = true;
        queue.push({now + sample_service(law, servers[server]), kCompletion[server], generation});
    };

    queue.push({arrivals.exponential(lambda), EventKind::ExternalArrival, 0.0});
    while (!monitor.done()) {
        const Event e = next_event(queue);
        if (e.kind == EventKind::ExternalArrival) {
            if (!busy[0])
                start(0, e.time, e.time);
            else if (!busy[1])
                start(1, e.time, e.time);
            else
                waiting.push_back(e.time);
            queue.push({e.time + arrivals.exponential(lambda), EventKind::ExternalArrival, 0.0});
            continue;
        }
        const int server = e.kind == EventKind::ServiceCompletionA ? 0 : 1;
        monitor.deliver(e.generation_time, e.time, server, kNoGeneration);
        busy[server] = false;
        if (!waiting.empty()) {
            const double next = waiting.front();
            waiting.pop_front();
            start(server, e.time, next);
        }
    }
    return monitor.finish();
}

SimResult run_mm11_preempt(const SimConfig& config) {
    const double lambda = *config.spec.arrival_rate;
    const ServiceModel& law = config.spec.sensor_a;
    RandomStream arrivals(config.seed, streams::kArrivals);
    RandomStream service(config.seed, streams::kServiceA);

    Monitor monitor(config, false);
    EventQueue queue;
    std::uint64_t current = 0;  // token of the packet in service
    bool busy = false;

    queue.push({arrivals.exponential(lambda), EventKind::ExternalArrival, 0.0});
    while (!monitor.done()) {
        const Event e = next_event(queue);
        if (e.kind == EventKind::ExternalArrival) {
            // A fresh packet replaces whatever is in service.
            busy = true;
            ++current;
            queue.push({e.time + sample_service(law, service), EventKind::ServiceCompletionA, e.time, current});
            queue.push({e.time + arrivals.exponential(lambda), EventKind::ExternalArrival, 0.0});
            continue;
        }
        if (!busy || e.token != current) continue;  // preempted
        busy = false;
        monitor.deliver(e.generation_time, e.time, 0, kNoGeneration);
    }
    return monitor.finish();
}

std::string format_number(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

SimResult run(const SimConfig& config) {
    config.validate();
    switch (config.spec.kind) {
        case SystemKind::MM:
        case SystemKind::MD:
        case SystemKind::DD: return run_dual(config);
        case SystemKind::MM2: return run_mm2(config);
        case SystemKind::MM11Preempt: return run_mm11_preempt(config);
    }
    throw std::logic_error("unhandled system kind");
}

std::string trace_csv_header() { return "t,gen_time,sensor,prev_state,new_state,path_l,Y,T_service"; }

std::string trace_csv_row(const TransitionRecord& r) {
    std::string row = format_number(r.time) + ',' + format_number(r.generation_time) + ',';
    row += r.sensor == 0 ? "A" : "B";
    row += ',';
    if (r.prev_state) row += markov::to_string(*r.prev_state);
    row += ',';
    if (r.new_state) row += markov::to_string(*r.new_state);
    row += ',';
    if (r.path_index > 0) row += std::to_string(r.path_index);
    row += ',' + format_number(r.interarrival) + ',' + format_number(r.service);
    return row;
}

// ---------------------------------------------------------------------------

ReplayResult replay_oracle(std::span<const DeliveryPoint> deliveries, double horizon, double start_time,
                           double initial_refresh) {
    if (initial_refresh > start_time) throw std::invalid_argument("replay_oracle: initial refresh after start");
    double freshest = initial_refresh;
    double t = start_time;
    ReplayResult out;
    double peak_total = 0.0;
    auto trapezoid = [&](double from, double to) { return (to - from) * ((from - freshest) + (to - freshest)) / 2.0; };
    for (const DeliveryPoint& d : deliveries) {
        if (d.time < t) throw std::invalid_argument("replay_oracle: deliveries are not sorted by time");
        if (d.generation_time > d.time) throw std::invalid_argument("replay_oracle: update generated after delivery");
        out.area += trapezoid(t, d.time);
        t = d.time;
        if (d.generation_time > freshest) {
            peak_total += d.time - freshest;
            ++out.accepted;
            freshest = d.generation_time;
        }
    }
    if (horizon < t) throw std::invalid_argument("replay_oracle: horizon precedes the last delivery");
    out.area += trapezoid(t, horizon);
    out.avg_aoi = horizon > start_time ? out.area / (horizon - start_time) : 0.0;
    out.avg_paoi = out.accepted ? peak_total / static_cast<double>(out.accepted)
                                : std::numeric_limits<double>::quiet_NaN();
    return out;
}

ConditionalEstimate conditional_md_oracle(double mu, double period, std::size_t k, std::size_t n,
                                          std::uint64_t samples, std::uint64_t seed) {
    if (!(mu > 0.0) || !(period > 0.0)) throw std::invalid_argument("conditional_md_oracle: mu and period must be positive");
    if (samples < 10'000) throw std::invalid_argument("conditional_md_oracle: at least 10^4 samples required");
    const double x = mu * period;
    const double log_accept = (static_cast<double>(k + n)) * std::log(x) - 2.0 * x -
                              std::lgamma(static_cast<double>(k) + 1.0) - std::lgamma(static_cast<double>(n) + 1.0);
    if (std::log(static_cast<double>(samples)) - log_accept > std::log(2e9))
        throw std::invalid_argument("conditional_md_oracle: conditioning event too rare for rejection sampling");

    const double T = period;
    RandomStream stream(seed, "md_conditional");
    stats::RunningMoments peak_sum, area, peak_count;
    std::vector<double> prev, cur;
    std::uint64_t attempts = 0;

    while (peak_sum.count() < samples) {
        ++attempts;
        // Sensor-A completion instants on (−T, T]; the process restarts at −T
        // by memorylessness.
        prev.clear();
        cur.clear();
        bool reject = false;
        for (double t = -T + stream.exponential(mu); t < T; t += stream.exponential(mu)) {
            auto& bucket = t < 0.0 ? prev : cur;
            bucket.push_back(t);
            if (prev.size() > k || cur.size() > n) {
                reject = true;
                break;
            }
        }
        if (reject || prev.size() != k || cur.size() != n) continue;

        // Freshest generation time held at the start of the current period:
        // sensor B's update from −T, or the update sensor A delivered last.
        double freshest = -T;
        if (k >= 2) freshest = std::max(freshest, prev[k - 2]);
        // Generation time of the update sensor A is serving at time 0.
        double in_service = k >= 1 ? prev[k - 1] : -std::numeric_limits<double>::infinity();

        double t = 0.0, q = 0.0, peaks = 0.0;
        int count = 0;
        auto reach = [&](double to, double generation) {
            q += (to - t) * ((t - freshest) + (to - freshest)) / 2.0;
            t = to;
            if (generation > freshest) {
                peaks += to - freshest;
                ++count;
                freshest = generation;
            }
        };
        for (double c : cur) {
            reach(c, in_service);
            in_service = c;
        }
        reach(T, 0.0);  // sensor B delivers the update it started at 0
        peak_sum.add(peaks);
        area.add(q);
        peak_count.add(count);
    }

    ConditionalEstimate e;
    e.samples = peak_sum.count();
    e.attempts = attempts;
    e.peak_count = peak_count.mean();
    e.peak_sum = peak_sum.mean();
    e.peak_sum_se = peak_sum.standard_error();
    e.area = area.mean();
    e.area_se = area.standard_error();
    return e;
}

}  // namespace dualaoi::sim
