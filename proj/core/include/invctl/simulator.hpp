#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "invctl/filter.hpp"
#include "invctl/model.hpp"

namespace invctl {

// One realization of the hidden chain and its demand arrivals on [0, T].
struct ChainSegment {
    int state = 0;
    double begin = 0.0;
    double end = 0.0;
};

struct DemandArrival {
    double time = 0.0;
    int size = 0;
};

struct SamplePath {
    std::vector<ChainSegment> segments;   // partition of [0, T]
    std::vector<DemandArrival> arrivals;  // sorted by time
    std::uint64_t seed = 0;
};

// Decision rule: (time remaining, beliefs, inventory) -> order amount, 0 to
// wait. Negative amounts are sell-backs.
using PolicyFn = std::function<int(double, const std::vector<double>&, int)>;

struct CostBreakdown {
    double storage = 0.0;
    double ordering = 0.0;
    double stockout = 0.0;
    double salvage = 0.0;
    double total = 0.0;
};

struct PolicyRun {
    EventLog log;
    CostBreakdown cost;
    FilterState final_state;
};

struct McResult {
    double mean = 0.0;
    double stderror = 0.0;
    CostBreakdown mean_breakdown;
    int n_paths = 0;
};

struct TailBoundResult {
    double empirical = 0.0;  // fraction of paths with at least n arrivals before T
    double bound = 0.0;      // max_rate * T / (n - 1)
    double stderror = 0.0;   // binomial
};

// Samples the hidden chain from (pi0, Q) and arrivals at rate lambda_i with
// sizes drawn from f_i. Reproducible given the seed.
SamplePath sample_path(const ModelSpec& spec, std::span<const double> pi0, std::uint64_t seed);

// Executes one path under a policy: marks are generated by censor(), beliefs
// follow the exact filter, the policy is polled on a poll_dt grid and right
// after every arrival. Stock-out charges are the realized penalty when sizes
// are observed and the conditional expected penalty under censoring.
PolicyRun run_policy(const ModelSpec& spec, const SamplePath& path, const PolicyFn& policy,
                     std::span<const double> pi0, int a0, double poll_dt);

// i.i.d. replication of run_policy with per-path seed streams; identical
// results for any thread count.
McResult mc_evaluate(const ModelSpec& spec, const PolicyFn& policy, std::span<const double> pi0,
                     int a0, int n_paths, std::uint64_t seed, double poll_dt, int threads = 1);

// Empirical check of P{n-th arrival before horizon} <= max_rate*horizon/(n-1).
TailBoundResult tail_bound_check(const ModelSpec& spec, std::span<const double> pi0, int n,
                                 double horizon, int n_paths, std::uint64_t seed);

// Built-in reference policies.
PolicyFn never_order_policy();
// Order up to `level` whenever inventory is below it.
PolicyFn basestock_policy(int level);

// splitmix64; used to derive per-path seeds.
std::uint64_t mix_seed(std::uint64_t seed);

}  // namespace invctl
