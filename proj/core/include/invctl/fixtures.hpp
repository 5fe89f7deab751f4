#pragma once

#include <string>
#include <utility>
#include <vector>

#include "invctl/filter.hpp"
#include "invctl/model.hpp"

namespace invctl {
namespace fixtures {

// Two-regime instance with size-at-most-3 demand: Q symmetric rate 1,
// lambda = (2, 1), censored by default. Variants:
//   base-censored, base-uncensored, low-stockout (K = 2a), zero-storage,
//   zero-fixed-cost, salvage-50, buy-sell
ModelSpec two_regime(const std::string& variant = "base-censored");

// Expected outcomes for the two-regime variants at T = 3, pi = (0.5, 0.5),
// empty inventory: (variant, value, order-up-to level).
struct TwoRegimeReference {
    std::string variant;
    double value;
    int order_to;
};
const std::vector<TwoRegimeReference>& two_regime_reference();

// Three-regime instance with truncated negative-binomial demand sizes
// (maximum 18), unit storage cost and linear stock-out penalty scaled by
// `penalty_scale`; `dynamics` is 's' (symmetric), 'u' (upward drift) or 'd'
// (downward drift).
ModelSpec three_regime(double penalty_scale = 2.0, char dynamics = 's');

// Sample-path walk-through for the two-regime censored model: supplies at
// t=0 (+3), after the second arrival (+1) and at t=2.19 (+1); demand marks
// Full(2) at 1.7, Stockout at 1.83, and optionally Full(1) at 1.87.
EventLog walkthrough_log(bool include_third_demand = true);

// All bundled instances by file stem, for `fixtures --out-dir`.
std::vector<std::pair<std::string, ModelSpec>> bundled_models();

}  // namespace fixtures
}  // namespace invctl
