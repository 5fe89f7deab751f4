#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "invctl/filter.hpp"
#include "invctl/fixtures.hpp"
#include "invctl/model.hpp"

namespace invctl::testing {

// Feasible random event log: demand marks generated through censor() against
// the tracked inventory, with occasional random restocks.
inline EventLog random_log(const ModelSpec& spec, std::uint64_t seed, int a0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    EventLog log;
    int inventory = a0;
    double t = 0.0;
    while (true) {
        t += -std::log(1.0 - u01(rng)) / 2.5;  // denser than the model's arrivals
        if (t >= spec.horizon) break;
        if (u01(rng) < 0.35 && inventory < spec.max_inventory) {
            const int amount = 1 + static_cast<int>(u01(rng) * (spec.max_inventory - inventory));
            log.events.push_back(EventLog::supply(t, amount));
            inventory += amount;
        } else {
            const int y = 1 + static_cast<int>(u01(rng) * spec.max_demand);
            const Mark mark = censor(y, inventory, spec.censoring);
            log.events.push_back(EventLog::demand(t, mark));
            inventory -= mark.filled;
        }
    }
    return log;
}

inline double sup_belief_gap(const std::vector<FilterState>& a,
                             const std::vector<FilterState>& b) {
    double gap = 0.0;
    const size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < a[i].belief.size(); ++j)
            gap = std::max(gap, std::abs(a[i].belief[j] - b[i].belief[j]));
    return gap;
}

}  // namespace invctl::testing
