#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "invctl/markov.hpp"
#include "invctl/model.hpp"

namespace invctl {

// Sufficient statistic of the observation process: elapsed time, posterior
// over hidden states, current inventory.
struct FilterState {
    double time = 0.0;
    std::vector<double> belief;
    int inventory = 0;
};

struct LogEvent {
    double time = 0.0;
    bool is_demand = false;
    Mark mark;        // valid when is_demand
    int supply = 0;   // valid when !is_demand; may be negative under sell-back
};

struct EventLog {
    std::vector<LogEvent> events;

    static LogEvent demand(double t, Mark mark) { return LogEvent{t, true, mark, 0}; }
    static LogEvent supply(double t, int amount) { return LogEvent{t, false, Mark{}, amount}; }
};

// Deterministic drift for dt time units without arrivals; inventory fixed.
FilterState flow(const Propagator& prop, const FilterState& state, double dt);

// Bayes update at an observed mark; decrements inventory by the filled
// amount. Throws on marks with zero total likelihood.
FilterState bayes_update(const ModelSpec& spec, const FilterState& state, const Mark& mark);

// Instantaneous supply order; beliefs carry no information about the hidden
// chain, so only inventory moves.
FilterState apply_supply(const ModelSpec& spec, const FilterState& state, int amount);

// Replays a log from (pi0, a0): alternating flow / mark updates / supply
// actions in time order, ending with a final flow to the horizon. Returns the
// initial state, a pre and post state per event, and the terminal state.
std::vector<FilterState> replay(const ModelSpec& spec, std::span<const double> pi0, int a0,
                                const EventLog& log);

// Same recursion on unnormalized likelihood weights: drift the mass vector,
// scale componentwise by lambda_i * g_i at marks. belief == weights/sum.
struct WeightedState {
    double time = 0.0;
    std::vector<double> weights;
    int inventory = 0;
};
std::vector<WeightedState> replay_unnormalized(const ModelSpec& spec,
                                               std::span<const double> pi0, int a0,
                                               const EventLog& log);

// Discrete-time reference filter on a delta-grid (transition exp(Q delta),
// no-arrival likelihood e^{-lambda_i delta}, arrival likelihood
// lambda_i delta g_i at event steps). First-order accurate in delta; used to
// cross-check replay().
std::vector<FilterState> grid_reference_filter(const ModelSpec& spec,
                                               std::span<const double> pi0, int a0,
                                               const EventLog& log, double delta);

// JSON-lines serialization:
//   {"t":..,"kind":"demand","z1":..,"z2":"full","y":..}
//   {"t":..,"kind":"demand","z1":..,"z2":"stockout"}
//   {"t":..,"kind":"supply","xi":..}
std::string event_log_to_jsonl(const EventLog& log);
EventLog event_log_from_jsonl(const std::string& text);
EventLog load_event_log(const std::string& path);
void save_event_log(const EventLog& log, const std::string& path);

// CSV trajectory (t, pi_1..pi_m, P), one row per replay state.
void write_trajectory_csv(std::ostream& out, const std::vector<FilterState>& states);

}  // namespace invctl
