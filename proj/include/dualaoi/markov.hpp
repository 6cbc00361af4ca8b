#pragma once

// Refresh-state machinery of the M-M system.
//
// At every accepted delivery the monitor is in one of four states: the last
// fresh update came from sensor A or B, and the update the *other* sensor is
// currently serving is either still fresh (0) or already stale (1). Ten
// transition paths connect the states; averaging their per-path statistics
// over the embedded chain gives a second, independent route to the M-M
// closed forms.

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace dualaoi::markov {

enum class MmState { A0 = 0, A1 = 1, B0 = 2, B1 = 3 };

inline constexpr std::size_t kStateCount = 4;
inline constexpr std::size_t kPathCount = 10;
inline constexpr std::size_t kTwoStepCount = 26;

std::string_view to_string(MmState s) noexcept;
MmState parse_state(std::string_view name);
constexpr std::size_t index(MmState s) noexcept { return static_cast<std::size_t>(s); }
/// Exchange the roles of the two sensors (A0 ↔ B0, A1 ↔ B1).
MmState swap_sensors(MmState s) noexcept;

using TransitionMatrix = std::array<std::array<double, kStateCount>, kStateCount>;
using StateVector = std::array<double, kStateCount>;

/// Row-stochastic matrix of the embedded refresh chain, states ordered A0, A1, B0, B1.
TransitionMatrix mm_transition_matrix(double mu_a, double mu_b);

/// Closed-form stationary distribution of the refresh chain.
StateVector mm_steady_state(double mu_a, double mu_b);
/// Numeric stationary distribution: solves π = πΛ with one balance equation
/// replaced by Σπ = 1.
StateVector solve_steady_state(const TransitionMatrix& matrix);

/// One transition path and its statistics.
struct PathStats {
    int path_index = 0;  // 1..10
    MmState from = MmState::A0;
    MmState to = MmState::A0;
    double prob = 0.0;                        // p_l, conditional on `from`
    double occurrence = 0.0;                  // P_l = π(from)·p_l
    double mean_service = 0.0;                // E[T_l]
    double mean_interarrival = 0.0;           // E[Y_l]
    double second_moment_interarrival = 0.0;  // E[Y_l²]
};

using PathTable = std::array<PathStats, kPathCount>;

PathTable mm_path_table(double mu_a, double mu_b);

/// Path index for an edge of the state graph, or nullopt if no path connects them.
std::optional<int> path_between(MmState from, MmState to) noexcept;

/// E[Y] = E[T] = (μA+μB)/(μA²+μAμB+μB²).
double mm_mean_interarrival(double mu_a, double mu_b);
double mm_mean_service(double mu_a, double mu_b);

/// Occurrence-weighted sums Σ P_l E[Y_l] and Σ P_l E[T_l] over a path table.
double weighted_interarrival(const PathTable& table);
double weighted_service(const PathTable& table);

/// Peak AoI assembled as E[T] + E[Y] from the path table.
double mm_peak_aoi_from_paths(double mu_a, double mu_b);

/// Two consecutive paths q → q′ → q″.
struct TwoStepCase {
    int case_index = 0;  // 1..26
    std::array<MmState, 3> triple{};
    int first_path = 0;
    int second_path = 0;
    double prob = 0.0;                             // P_c
    double mean_service_times_interarrival = 0.0;  // E[T_{first} · Y_{second}]
    double second_moment = 0.0;                    // E[Y_{second}²]
};

using TwoStepTable = std::array<TwoStepCase, kTwoStepCount>;

/// Cases 1..13 start in A0/A1 (listed in closed form); cases 14..26 are the
/// sensor-swapped images of 1..13 evaluated with the rates exchanged.
TwoStepTable mm_two_step_table(double mu_a, double mu_b);

/// Average AoI as Σ_c P_c (E[TY_c] + E[Y_c²]/2) / E[Y].
double mm_avg_aoi_graphical(double mu_a, double mu_b);

// --- classification of simulated refreshes ----------------------------------

enum class Sensor { A = 0, B = 1 };

std::string_view to_string(Sensor s) noexcept;

struct RefreshContext {
    Sensor delivering = Sensor::A;
    /// Generation time of the update the other sensor is serving right now.
    double other_in_service_generation = 0.0;
    /// Freshest generation time at the monitor after this refresh.
    double last_refresh_timestamp = 0.0;
};

struct Classification {
    MmState next = MmState::A0;
    int path_index = 0;
};

/// State reached by an accepted delivery, independent of the previous state.
MmState refresh_state(const RefreshContext& context) noexcept;

/// Classify an accepted delivery into one of the ten paths. Throws
/// std::invalid_argument if the implied transition is not an edge of the graph.
Classification classify_refresh(MmState previous, const RefreshContext& context);

}  // namespace dualaoi::markov
