#include "invctl/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace invctl {

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

namespace {

// Minimal counter-free xoshiro-style stream built on splitmix64; avoids the
// implementation-defined draw order of std:: distributions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log1p(-u01()) / rate; }

    int discrete(std::span<const double> weights) {
        const double u = u01();
        double acc = 0.0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

  private:
    std::uint64_t state_;
};

int sample_demand_size(const ModelSpec& spec, int state, Rng& rng) {
    return rng.discrete(spec.demand_pmf[state]) + 1;
}

}  // namespace

SamplePath sample_path(const ModelSpec& spec, std::span<const double> pi0, std::uint64_t seed) {
    Rng rng(mix_seed(seed));
    SamplePath path;
    path.seed = seed;

    int state = rng.discrete(pi0);
    double t = 0.0;
    std::vector<double> jump_probs(spec.num_states);
    while (t < spec.horizon) {
        const double exit_rate = -spec.generator[state][state];
        double hold = spec.horizon - t;
        if (exit_rate > 0.0) hold = std::min(hold, rng.exponential(exit_rate));
        const double seg_end = std::min(t + hold, spec.horizon);
        path.segments.push_back(ChainSegment{state, t, seg_end});

        double arrival = t;
        const double rate = spec.arrival_rate[state];
        while (true) {
            arrival += rng.exponential(rate);
            if (arrival >= seg_end) break;
            path.arrivals.push_back(DemandArrival{arrival, sample_demand_size(spec, state, rng)});
        }

        t = seg_end;
        if (t >= spec.horizon) break;
        for (int j = 0; j < spec.num_states; ++j)
            jump_probs[j] = j == state ? 0.0 : spec.generator[state][j] / exit_rate;
        state = rng.discrete(jump_probs);
    }
    return path;
}

namespace {

class DiscountedCosts {
  public:
    explicit DiscountedCosts(double rho) : rho_(rho) {}

    double factor(double t) const { return std::exp(-rho_ * t); }

    double integral(double rate, double t0, double t1) const {
        if (rate == 0.0 || t1 <= t0) return 0.0;
        if (rho_ == 0.0) return rate * (t1 - t0);
        return rate / rho_ * (std::exp(-rho_ * t0) - std::exp(-rho_ * t1));
    }

  private:
    double rho_;
};

}  // namespace

PolicyRun run_policy(const ModelSpec& spec, const SamplePath& path, const PolicyFn& policy,
                     std::span<const double> pi0, int a0, double poll_dt) {
    if (!(poll_dt > 0.0)) throw std::invalid_argument("poll_dt must be positive");
    Propagator prop(spec);
    const StepCache poll_step(prop, poll_dt);  // grid moves dominate; arrivals are few
    DiscountedCosts disc(spec.discount_rate);

    PolicyRun run;
    FilterState state{0.0, std::vector<double>(pi0.begin(), pi0.end()), a0};
    CostBreakdown& cost = run.cost;

    auto poll = [&]() {
        const double t_rem = spec.horizon - state.time;
        const int amount = policy(t_rem, state.belief, state.inventory);
        if (amount == 0) return;
        if (amount < 0 && !spec.allow_sellback)
            throw std::runtime_error("policy sold inventory without sell-back enabled");
        const int target = state.inventory + amount;
        if (target < 0 || target > spec.max_inventory)
            throw std::runtime_error("policy ordered outside [0, Pbar]");
        cost.ordering += disc.factor(state.time) * (spec.unit_cost * amount + spec.fixed_cost);
        state = apply_supply(spec, state, amount);
        run.log.events.push_back(EventLog::supply(state.time, amount));
    };

    auto advance_to = [&](double t_next) {
        cost.storage += disc.integral(spec.storage_cost[state.inventory], state.time, t_next);
        const double dt = t_next - state.time;
        if (std::abs(dt - poll_dt) < 1e-12) {
            poll_step.advance(state.belief);
            renormalize(state.belief);
            state.time = t_next;
        } else {
            state = flow(prop, state, dt);
        }
    };

    poll();  // orders may be placed at time zero

    size_t next_arrival = 0;
    long next_poll = 1;
    while (state.time < spec.horizon) {
        const double poll_time = std::min(next_poll * poll_dt, spec.horizon);
        const double arrival_time = next_arrival < path.arrivals.size()
                                        ? path.arrivals[next_arrival].time
                                        : spec.horizon + 1.0;
        if (arrival_time <= poll_time && arrival_time < spec.horizon) {
            advance_to(arrival_time);
            const int y = path.arrivals[next_arrival].size;
            const Mark mark = censor(y, state.inventory, spec.censoring);
            if (spec.censoring == Censoring::Censored) {
                if (mark.kind == MarkKind::Stockout)
                    cost.stockout += disc.factor(state.time) *
                                     expected_penalty_given_stockout(spec, state.belief,
                                                                     state.inventory);
            } else if (y > state.inventory) {
                cost.stockout +=
                    disc.factor(state.time) * spec.stockout_penalty[y - state.inventory];
            }
            state = bayes_update(spec, state, mark);
            run.log.events.push_back(EventLog::demand(state.time, mark));
            ++next_arrival;
            poll();
            if (arrival_time == poll_time) ++next_poll;
        } else if (poll_time < spec.horizon) {
            advance_to(poll_time);
            ++next_poll;
            poll();
        } else {
            advance_to(spec.horizon);
        }
    }

    cost.salvage = -spec.salvage_fraction * spec.unit_cost * state.inventory *
                   disc.factor(spec.horizon);
    cost.total = cost.storage + cost.ordering + cost.stockout + cost.salvage;
    run.final_state = state;
    return run;
}

McResult mc_evaluate(const ModelSpec& spec, const PolicyFn& policy, std::span<const double> pi0,
                     int a0, int n_paths, std::uint64_t seed, double poll_dt, int threads) {
    if (n_paths < 2) throw std::invalid_argument("need at least two paths");
    std::vector<CostBreakdown> results(n_paths);

    auto worker = [&](std::atomic<int>& counter) {
        for (int i = counter.fetch_add(1); i < n_paths; i = counter.fetch_add(1)) {
            const std::uint64_t path_seed = mix_seed(seed + 0x51ed2701ull * (i + 1));
            const SamplePath path = sample_path(spec, pi0, path_seed);
            results[i] = run_policy(spec, path, policy, pi0, a0, poll_dt).cost;
        }
    };

    std::atomic<int> counter{0};
    if (threads <= 1) {
        worker(counter);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker, std::ref(counter));
        for (auto& t : pool) t.join();
    }

    McResult res;
    res.n_paths = n_paths;
    for (const auto& c : results) {
        res.mean += c.total;
        res.mean_breakdown.storage += c.storage;
        res.mean_breakdown.ordering += c.ordering;
        res.mean_breakdown.stockout += c.stockout;
        res.mean_breakdown.salvage += c.salvage;
    }
    res.mean /= n_paths;
    res.mean_breakdown.storage /= n_paths;
    res.mean_breakdown.ordering /= n_paths;
    res.mean_breakdown.stockout /= n_paths;
    res.mean_breakdown.salvage /= n_paths;
    res.mean_breakdown.total = res.mean;

    double ss = 0.0;
    for (const auto& c : results) ss += (c.total - res.mean) * (c.total - res.mean);
    res.stderror = std::sqrt(ss / (static_cast<double>(n_paths) * (n_paths - 1)));
    return res;
}

TailBoundResult tail_bound_check(const ModelSpec& spec, std::span<const double> pi0, int n,
                                 double horizon, int n_paths, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("tail bound requires n >= 2");
    ModelSpec clipped = spec;
    clipped.horizon = horizon;
    int hits = 0;
    for (int i = 0; i < n_paths; ++i) {
        const SamplePath path =
            sample_path(clipped, pi0, mix_seed(seed + 0x7f4a7c15ull * (i + 1)));
        if (static_cast<int>(path.arrivals.size()) >= n) ++hits;
    }
    TailBoundResult res;
    res.empirical = static_cast<double>(hits) / n_paths;
    res.bound = spec.max_rate() * horizon / (n - 1);
    res.stderror = std::sqrt(std::max(res.empirical * (1.0 - res.empirical), 1e-12) / n_paths);
    return res;
}

PolicyFn never_order_policy() {
    return [](double, const std::vector<double>&, int) { return 0; };
}

PolicyFn basestock_policy(int level) {
    return [level](double, const std::vector<double>&, int inventory) {
        return inventory < level ? level - inventory : 0;
    };
}

}  // namespace invctl
