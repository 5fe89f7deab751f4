#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "invctl/belief_grid.hpp"
#include "invctl/model.hpp"

namespace invctl {

// Which Bayes update the jump expectation uses; FromModel follows the
// instance's censoring mode.
enum class JumpVariant { FromModel, Censored, Uncensored };

struct SolveOptions {
    int time_steps = 0;   // slices on [0, T]; 0 -> 300
    int threads = 1;
    JumpVariant jump_variant = JumpVariant::FromModel;
    bool compute_residual = true;
};

// Value and policy data on the (time x belief lattice x inventory) grid,
// plus the scalars needed to act on it stand-alone.
struct ValueSurface {
    int num_states = 0;
    int resolution = 0;
    int n_slices = 0;  // time index runs 0..n_slices, slice i <-> horizon i*dt
    int n_nodes = 0;
    int n_inv = 0;     // max inventory + 1
    int max_demand = 0;
    double dt = 0.0;

    double unit_cost = 0.0;
    double fixed_cost = 0.0;
    double discount_rate = 0.0;
    double salvage_fraction = 0.0;
    double horizon = 0.0;
    bool censored = true;
    bool allow_sellback = false;

    std::vector<double> value;          // optimal cost U
    std::vector<double> intervention;   // best immediate-order cost MU
    std::vector<double> no_action;      // never-order cost U0
    std::vector<std::uint8_t> act;      // 1 where value == intervention
    std::vector<std::int16_t> order_to; // smallest minimizing order-up-to level

    double residual = -1.0;  // sup-norm self-consistency defect, when measured

    size_t idx(int t, int node, int a) const {
        return (static_cast<size_t>(t) * n_nodes + node) * n_inv + a;
    }
    double u(int t, int node, int a) const { return value[idx(t, node, a)]; }
    double mu(int t, int node, int a) const { return intervention[idx(t, node, a)]; }
    double u0(int t, int node, int a) const { return no_action[idx(t, node, a)]; }
};

// Forward sweep: terminal slice first, then each horizon slice from the
// already-computed ones, inventory descending within a slice.
ValueSurface solve_forward(const ModelSpec& spec, const BeliefGrid& grid,
                           const SolveOptions& options = {});

// Re-applies the one-step optimality recursion to a finished surface and
// returns max |L(U) - U| over the lattice.
double fixed_point_residual(const ValueSurface& surface, const ModelSpec& spec,
                            const BeliefGrid& grid, int threads = 1);

// Successive approximation started from the never-order surface; converges
// monotonically down to the forward solution.
struct IterationTrace {
    ValueSurface surface;
    std::vector<double> sup_changes;  // per iteration
    bool monotone = true;
    int iterations = 0;
};
IterationTrace fixed_point_iteration(const ModelSpec& spec, const BeliefGrid& grid,
                                     const SolveOptions& options, int max_iterations,
                                     double tol);

// One time slice of lattice values, [node][inventory].
struct SliceValues {
    const double* data = nullptr;
    int n_inv = 0;
    double at(int node, int a) const {
        return data[static_cast<size_t>(node) * n_inv + a];
    }
};

// E[ continuation value + stock-out penalty | a demand arrives now ] with the
// continuation read from one slice by barycentric interpolation.
double expected_arrival_value(const ModelSpec& spec, const BeliefGrid& grid, SliceValues slice,
                              std::span<const double> belief, int a,
                              JumpVariant variant = JumpVariant::FromModel);

// min_b { slice(pi, b) + h (b - a) } + zeta over the admissible order range,
// with the smallest minimizer. Interpolates each inventory row at `belief`.
struct InterventionResult {
    double value = 0.0;
    int order_to = 0;
};
InterventionResult intervention_value(const ModelSpec& spec, const BeliefGrid& grid,
                                      SliceValues slice, std::span<const double> belief, int a);

}  // namespace invctl
