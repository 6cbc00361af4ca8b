#include "dualaoi/markov.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace dualaoi::markov {

namespace {

void require_rates(double mu_a, double mu_b) {
    if (!(std::isfinite(mu_a) && mu_a > 0.0)) throw std::invalid_argument("mu_a must be positive and finite");
    if (!(std::isfinite(mu_b) && mu_b > 0.0)) throw std::invalid_argument("mu_b must be positive and finite");
}

using enum MmState;

struct Edge {
    MmState from;
    MmState to;
};

// Path l connects kEdges[l-1].from to kEdges[l-1].to.
constexpr std::array<Edge, kPathCount> kEdges{{
    {A0, A1}, {A0, B0}, {A1, A0}, {A1, A1}, {A1, B1},
    {B0, A0}, {B0, B1}, {B1, A1}, {B1, B0}, {B1, B1},
}};

}  // namespace

std::string_view to_string(MmState s) noexcept {
    switch (s) {
        case A0: return "A0";
        case A1: return "A1";
        case B0: return "B0";
        case B1: return "B1";
    }
    return "?";
}

MmState parse_state(std::string_view name) {
    for (MmState s : {A0, A1, B0, B1})
        if (to_string(s) == name) return s;
    throw std::invalid_argument("unknown refresh state '" + std::string(name) + "'");
}

MmState swap_sensors(MmState s) noexcept {
    switch (s) {
        case A0: return B0;
        case A1: return B1;
        case B0: return A0;
        case B1: return A1;
    }
    return s;
}

std::string_view to_string(Sensor s) noexcept { return s == Sensor::A ? "A" : "B"; }

// ---------------------------------------------------------------------------

TransitionMatrix mm_transition_matrix(double mu_a, double mu_b) {
    TransitionMatrix m{};
    for (const PathStats& p : mm_path_table(mu_a, mu_b)) m[index(p.from)][index(p.to)] = p.prob;
    return m;
}

StateVector mm_steady_state(double mu_a, double mu_b) {
    require_rates(mu_a, mu_b);
    const double s = mu_a + mu_b;
    const double xi = mu_a * mu_a + mu_a * mu_b + mu_b * mu_b;
    return {mu_a * mu_a * mu_b / (xi * s), mu_a * mu_a / xi, mu_a * mu_b * mu_b / (xi * s), mu_b * mu_b / xi};
}

StateVector solve_steady_state(const TransitionMatrix& matrix) {
    Eigen::Matrix4d system;
    for (std::size_t i = 0; i < kStateCount; ++i)
        for (std::size_t j = 0; j < kStateCount; ++j)
            system(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                matrix[j][i] - (i == j ? 1.0 : 0.0);
    system.row(kStateCount - 1).setOnes();
    Eigen::Vector4d rhs = Eigen::Vector4d::Zero();
    rhs(kStateCount - 1) = 1.0;
    const auto lu = system.fullPivLu();
    if (!lu.isInvertible()) throw std::invalid_argument("transition matrix has no unique stationary distribution");
    const Eigen::Vector4d pi = lu.solve(rhs);
    return {pi(0), pi(1), pi(2), pi(3)};
}

// ---------------------------------------------------------------------------

PathTable mm_path_table(double mu_a, double mu_b) {
    require_rates(mu_a, mu_b);
    const double a = mu_a;
    const double b = mu_b;
    const double s = a + b;
    const double s2 = s * s;

    // {p_l, E[T_l], E[Y_l], E[Y_l²]}; sensor-B paths mirror the sensor-A ones.
    struct Row {
        double prob, service, inter, inter2;
    };
    const std::array<Row, kPathCount> rows{{
        {a / s, 1.0 / s, 1.0 / s, 2.0 / s2},
        {b / s, 2.0 / s, 1.0 / s, 2.0 / s2},
        {a * b / s2, 2.0 / s, 2.0 / s, 6.0 / s2},
        {a / s, 1.0 / s, 1.0 / s, 2.0 / s2},
        {b * b / s2, 1.0 / s, 2.0 / s, 6.0 / s2},
        {a / s, 2.0 / s, 1.0 / s, 2.0 / s2},
        {b / s, 1.0 / s, 1.0 / s, 2.0 / s2},
        {a * a / s2, 1.0 / s, 2.0 / s, 6.0 / s2},
        {a * b / s2, 2.0 / s, 2.0 / s, 6.0 / s2},
        {b / s, 1.0 / s, 1.0 / s, 2.0 / s2},
    }};

    const StateVector pi = mm_steady_state(mu_a, mu_b);
    PathTable table{};
    for (std::size_t i = 0; i < kPathCount; ++i) {
        PathStats& p = table[i];
        p.path_index = static_cast<int>(i) + 1;
        p.from = kEdges[i].from;
        p.to = kEdges[i].to;
        p.prob = rows[i].prob;
        p.occurrence = pi[index(p.from)] * p.prob;
        p.mean_service = rows[i].service;
        p.mean_interarrival = rows[i].inter;
        p.second_moment_interarrival = rows[i].inter2;
    }
    return table;
}

std::optional<int> path_between(MmState from, MmState to) noexcept {
    for (std::size_t i = 0; i < kPathCount; ++i)
        if (kEdges[i].from == from && kEdges[i].to == to) return static_cast<int>(i) + 1;
    return std::nullopt;
}

double mm_mean_interarrival(double mu_a, double mu_b) {
    require_rates(mu_a, mu_b);
    return (mu_a + mu_b) / (mu_a * mu_a + mu_a * mu_b + mu_b * mu_b);
}

double mm_mean_service(double mu_a, double mu_b) { return mm_mean_interarrival(mu_a, mu_b); }

double weighted_interarrival(const PathTable& table) {
    double sum = 0.0;
    for (const PathStats& p : table) sum += p.occurrence * p.mean_interarrival;
    return sum;
}

double weighted_service(const PathTable& table) {
    double sum = 0.0;
    for (const PathStats& p : table) sum += p.occurrence * p.mean_service;
    return sum;
}

double mm_peak_aoi_from_paths(double mu_a, double mu_b) {
    const PathTable table = mm_path_table(mu_a, mu_b);
    return weighted_service(table) + weighted_interarrival(table);
}

// ---------------------------------------------------------------------------

namespace {

// The thirteen cases that start in A0 or A1, in closed form.
std::array<TwoStepCase, 13> listed_two_step_cases(double a, double b) {
    const double s = a + b;
    const double s2 = s * s;
    const double xi = a * a + a * b + b * b;
    const double a2 = a * a, a3 = a2 * a, a4 = a3 * a;
    const double b2 = b * b, b3 = b2 * b;
    const double xs2 = xi * s2, xs3 = xs2 * s, xs4 = xs3 * s;

    auto row = [&](int c, MmState q0, MmState q1, MmState q2, double prob, double ty, double y2) {
        TwoStepCase t;
        t.case_index = c;
        t.triple = {q0, q1, q2};
        t.first_path = *path_between(q0, q1);
        t.second_path = *path_between(q1, q2);
        t.prob = prob;
        t.mean_service_times_interarrival = ty / s2;
        t.second_moment = y2 / s2;
        return t;
    };

    return {{
        row(1, A0, A1, A0, a4 * b2 / xs4, 2, 6),
        row(2, A0, A1, A1, a4 * b / xs3, 1, 2),
        row(3, A0, A1, B1, a3 * b3 / xs4, 2, 6),
        row(4, A0, B0, A0, a3 * b2 / xs3, 2, 2),
        row(5, A0, B0, B1, a2 * b3 / xs3, 2, 2),
        row(6, A1, A0, A1, a4 * b / xs3, 2, 2),
        row(7, A1, A0, B0, a3 * b2 / xs3, 2, 2),
        row(8, A1, A1, A0, a4 * b / xs3, 2, 6),
        row(9, A1, A1, A1, a4 / xs2, 1, 2),
        row(10, A1, A1, B1, a3 * b2 / xs3, 2, 6),
        row(11, A1, B1, A1, a4 * b2 / xs4, 2, 6),
        row(12, A1, B1, B0, a3 * b3 / xs4, 2, 6),
        row(13, A1, B1, B1, a2 * b3 / xs3, 1, 2),
    }};
}

}  // namespace

TwoStepTable mm_two_step_table(double mu_a, double mu_b) {
    require_rates(mu_a, mu_b);
    const auto listed = listed_two_step_cases(mu_a, mu_b);
    const auto mirrored = listed_two_step_cases(mu_b, mu_a);
    TwoStepTable table{};
    for (std::size_t i = 0; i < listed.size(); ++i) {
        table[i] = listed[i];
        TwoStepCase m = mirrored[i];
        m.case_index = static_cast<int>(i + listed.size()) + 1;
        for (MmState& q : m.triple) q = swap_sensors(q);
        m.first_path = *path_between(m.triple[0], m.triple[1]);
        m.second_path = *path_between(m.triple[1], m.triple[2]);
        table[i + listed.size()] = m;
    }
    return table;
}

double mm_avg_aoi_graphical(double mu_a, double mu_b) {
    double area = 0.0;
    for (const TwoStepCase& c : mm_two_step_table(mu_a, mu_b))
        area += c.prob * (c.mean_service_times_interarrival + 0.5 * c.second_moment);
    return area / weighted_interarrival(mm_path_table(mu_a, mu_b));
}

// ---------------------------------------------------------------------------

MmState refresh_state(const RefreshContext& context) noexcept {
    const bool other_fresh = context.other_in_service_generation > context.last_refresh_timestamp;
    if (context.delivering == Sensor::A) return other_fresh ? A0 : A1;
    return other_fresh ? B0 : B1;
}

Classification classify_refresh(MmState previous, const RefreshContext& context) {
    const MmState next = refresh_state(context);
    const auto path = path_between(previous, next);
    if (!path)
        throw std::invalid_argument("classify_refresh: no path from " + std::string(to_string(previous)) + " to " +
                                    std::string(to_string(next)));
    return {next, *path};
}

}  // namespace dualaoi::markov
