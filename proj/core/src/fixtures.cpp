#include "invctl/fixtures.hpp"

#include <stdexcept>

namespace invctl {
namespace fixtures {

ModelSpec two_regime(const std::string& variant) {
    ModelSpec spec;
    spec.num_states = 2;
    spec.generator = {{-1.0, 1.0}, {1.0, -1.0}};
    spec.arrival_rate = {2.0, 1.0};
    spec.demand_pmf = {{0.5, 0.4, 0.1}, {0.1, 0.3, 0.6}};
    spec.max_demand = 3;
    spec.max_inventory = 3;
    spec.storage_cost = {0.0, 2.0, 4.0, 6.0};
    spec.stockout_penalty = {0.0, 3.2, 6.4, 9.6};
    spec.unit_cost = 1.25;
    spec.fixed_cost = 1.0;
    spec.discount_rate = 0.0;
    spec.horizon = 3.0;
    spec.censoring = Censoring::Censored;

    if (variant == "base-censored") {
        // defaults
    } else if (variant == "base-uncensored") {
        spec.censoring = Censoring::Uncensored;
    } else if (variant == "low-stockout") {
        spec.stockout_penalty = {0.0, 2.0, 4.0, 6.0};
    } else if (variant == "zero-storage") {
        spec.storage_cost = {0.0, 0.0, 0.0, 0.0};
    } else if (variant == "zero-fixed-cost") {
        spec.fixed_cost = 0.0;
    } else if (variant == "salvage-50") {
        spec.salvage_fraction = 0.5;
    } else if (variant == "buy-sell") {
        spec.allow_sellback = true;
    } else {
        throw std::invalid_argument("unknown two-regime variant: " + variant);
    }
    return spec;
}

const std::vector<TwoRegimeReference>& two_regime_reference() {
    static const std::vector<TwoRegimeReference> table = {
        {"base-uncensored", 25.21, 2}, {"base-censored", 25.97, 3},
        {"low-stockout", 16.37, 0},    {"zero-storage", 16.71, 3},
        {"zero-fixed-cost", 22.92, 1}, {"salvage-50", 24.75, 2},
        {"buy-sell", 24.30, 2},
    };
    return table;
}

ModelSpec three_regime(double penalty_scale, char dynamics) {
    ModelSpec spec;
    spec.num_states = 3;
    switch (dynamics) {
        case 's':
            spec.generator = {{-0.8, 0.4, 0.4}, {0.4, -0.8, 0.4}, {0.4, 0.4, -0.8}};
            break;
        case 'u':
            spec.generator = {{-0.2, 0.1, 0.1}, {0.0, -0.2, 0.2}, {0.0, 0.0, 0.0}};
            break;
        case 'd':
            spec.generator = {{0.0, 0.0, 0.0}, {0.2, -0.2, 0.0}, {0.1, 0.1, -0.2}};
            break;
        default:
            throw std::invalid_argument("dynamics must be 's', 'u' or 'd'");
    }
    spec.arrival_rate = {1.0, 1.0, 1.0};
    spec.max_demand = 18;
    spec.demand_pmf = {
        truncated_negative_binomial(100.0, 0.99, spec.max_demand),
        truncated_negative_binomial(900.0, 0.99, spec.max_demand),
        truncated_negative_binomial(1600.0, 0.99, spec.max_demand),
    };
    spec.max_inventory = 18;
    spec.storage_cost.resize(spec.max_inventory + 1);
    for (int a = 0; a <= spec.max_inventory; ++a) spec.storage_cost[a] = a;
    spec.stockout_penalty.resize(spec.max_demand + 1);
    for (int a = 0; a <= spec.max_demand; ++a) spec.stockout_penalty[a] = penalty_scale * a;
    spec.unit_cost = 0.0;
    spec.fixed_cost = 0.0;
    spec.discount_rate = 0.0;
    spec.horizon = 5.0;
    spec.censoring = Censoring::Censored;
    return spec;
}

EventLog walkthrough_log(bool include_third_demand) {
    EventLog log;
    log.events.push_back(EventLog::supply(0.0, 3));
    log.events.push_back(EventLog::demand(1.7, Mark{MarkKind::Full, 2, 2}));
    log.events.push_back(EventLog::demand(1.83, Mark{MarkKind::Stockout, 1, 0}));
    log.events.push_back(EventLog::supply(1.83, 1));
    if (include_third_demand)
        log.events.push_back(EventLog::demand(1.87, Mark{MarkKind::Full, 1, 1}));
    log.events.push_back(EventLog::supply(2.19, 1));
    return log;
}

std::vector<std::pair<std::string, ModelSpec>> bundled_models() {
    std::vector<std::pair<std::string, ModelSpec>> out;
    for (const auto& ref : two_regime_reference())
        out.emplace_back("two_regime_" + ref.variant, two_regime(ref.variant));
    out.emplace_back("three_regime_sym_k2", three_regime(2.0, 's'));
    out.emplace_back("three_regime_sym_k4", three_regime(4.0, 's'));
    out.emplace_back("three_regime_up", three_regime(2.0, 'u'));
    out.emplace_back("three_regime_down", three_regime(2.0, 'd'));
    return out;
}

}  // namespace fixtures
}  // namespace invctl
