#pragma once

#include <span>
#include <string>
#include <vector>

namespace invctl {

enum class Censoring { Censored, Uncensored };

// Full problem instance. Immutable after validation; shared read-only by the
// filter, solver and simulator.
struct ModelSpec {
    int num_states = 0;                          // m
    std::vector<std::vector<double>> generator;  // Q, m x m, rows sum to 0
    std::vector<double> arrival_rate;            // lambda_i > 0
    std::vector<std::vector<double>> demand_pmf; // f[i][y-1] = P(size == y), y in 1..R
    int max_demand = 0;                          // R
    int max_inventory = 0;                       // Pbar
    std::vector<double> storage_cost;            // c[a], a in 0..Pbar, nondecreasing
    std::vector<double> stockout_penalty;        // K[a], a in 0..R, K[0] = 0, nondecreasing
    double unit_cost = 0.0;                      // h
    double fixed_cost = 0.0;                     // zeta
    double discount_rate = 0.0;                  // rho
    double horizon = 0.0;                        // T
    Censoring censoring = Censoring::Censored;
    double salvage_fraction = 0.0;               // terminal recovery of unit_cost per unit
    bool allow_sellback = false;

    double pmf(int state, int size) const { return demand_pmf[state][size - 1]; }
    // P(demand size > a | state), a >= 0.
    double tail_mass(int state, int a) const;
    double max_rate() const;
};

// Observed datum at a demand arrival: the filled amount plus either the
// revealed total size or a stock-out flag.
enum class MarkKind { Full, Stockout };

struct Mark {
    MarkKind kind = MarkKind::Full;
    int filled = 0;  // units shipped
    int demand = 0;  // observed total size; meaningful only when kind == Full

    bool operator==(const Mark&) const = default;
};

// Returns one message per violated invariant, empty when the instance is
// well-formed. Total function: never throws on bad values.
std::vector<std::string> validate(const ModelSpec& spec);

// Throws std::invalid_argument listing all violations when validate() fails.
void require_valid(const ModelSpec& spec);

// Maps a realized demand of size y against inventory p to the observed mark.
Mark censor(int y, int p, Censoring mode);

// P(mark | state, pre-arrival inventory p). Zero for impossible marks.
double mark_likelihood(const ModelSpec& spec, int state, const Mark& mark, int p);

// E[K((Y - a)+) weighted by arrival intensity: sum_i pi_i lambda_i sum_{y>a} f_i(y) K(y-a).
double intensity_weighted_penalty(const ModelSpec& spec, std::span<const double> belief, int a);

// E[K(Y - a) | stock-out observed at inventory a, beliefs pi just before the
// arrival]. Throws if a stock-out is impossible (a >= R or zero likelihood).
double expected_penalty_given_stockout(const ModelSpec& spec, std::span<const double> belief,
                                       int a);

// pmf of a negative binomial (r successes, success probability p, counting
// failures) conditioned on {1..max_size}.
std::vector<double> truncated_negative_binomial(double r, double p, int max_size);

// JSON (de)serialization; field names are the wire contract.
ModelSpec model_from_json(const std::string& text);
ModelSpec load_model(const std::string& path);
std::string model_to_json(const ModelSpec& spec);
void save_model(const ModelSpec& spec, const std::string& path);

}  // namespace invctl
