#pragma once

#include <iosfwd>
#include <memory>
#include <span>

#include "invctl/simulator.hpp"
#include "invctl/solver.hpp"

namespace invctl {

struct Recommendation {
    bool order = false;
    int order_up_to = 0;
};

// Executable decision rule over a solved surface: order exactly where the
// optimal and intervention values coincide (within act_tol), to the smallest
// order-up-to level recommended by the containing cell's acting vertices.
class DecisionRule {
  public:
    // act_tol < 0 picks the default: twice the measured fixed-point residual,
    // floored at 1e-9 * (1 + max |U|) to absorb interpolation noise.
    DecisionRule(std::shared_ptr<const ValueSurface> surface,
                 std::shared_ptr<const BeliefGrid> grid, double act_tol = -1.0);

    Recommendation recommend(double t_remaining, std::span<const double> belief, int a) const;

    // Adapter for the simulator: returns order amounts.
    PolicyFn as_policy() const;

    double act_tol() const { return act_tol_; }
    const ValueSurface& surface() const { return *surface_; }
    const BeliefGrid& grid() const { return *grid_; }

  private:
    std::shared_ptr<const ValueSurface> surface_;
    std::shared_ptr<const BeliefGrid> grid_;
    double act_tol_;
};

// CSV of (T_rem, pi_1..pi_m, a, d, act) over the whole lattice at one fixed
// inventory level, for external region plots.
void export_regions(const DecisionRule& rule, int a_fixed, std::ostream& out);

}  // namespace invctl
