#include "invctl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace invctl {

DecisionRule::DecisionRule(std::shared_ptr<const ValueSurface> surface,
                           std::shared_ptr<const BeliefGrid> grid, double act_tol)
    : surface_(std::move(surface)), grid_(std::move(grid)), act_tol_(act_tol) {
    if (!surface_ || !grid_) throw std::invalid_argument("null surface or grid");
    if (grid_->num_nodes() != surface_->n_nodes || grid_->dim() != surface_->num_states)
        throw std::invalid_argument("grid does not match surface");
    if (act_tol_ < 0.0) {
        double umax = 0.0;
        for (double v : surface_->value) umax = std::max(umax, std::abs(v));
        const double floor = 1e-9 * (1.0 + umax);
        act_tol_ = std::max(2.0 * std::max(surface_->residual, 0.0), floor);
    }
}

Recommendation DecisionRule::recommend(double t_remaining, std::span<const double> belief,
                                       int a) const {
    const ValueSurface& s = *surface_;
    if (t_remaining < -1e-9 || t_remaining > s.horizon + 1e-9)
        throw std::out_of_range("time remaining outside [0, T]");
    if (a < 0 || a >= s.n_inv) throw std::out_of_range("inventory out of range");

    const int t = std::clamp(static_cast<int>(std::lround(t_remaining / s.dt)), 0, s.n_slices);
    const Stencil st = grid_->locate(belief);
    const double* slice = s.value.data() + s.idx(t, 0, 0);

    const double u_here = st.interpolate(slice + a, s.n_inv);
    const int lo = s.allow_sellback ? 0 : a;
    double mu = std::numeric_limits<double>::infinity();
    for (int b = lo; b < s.n_inv; ++b)
        mu = std::min(mu, st.interpolate(slice + b, s.n_inv) + s.unit_cost * (b - a));
    mu += s.fixed_cost;

    Recommendation rec;
    if (mu - u_here > act_tol_) return rec;

    int target = s.n_inv;  // sentinel
    for (int v = 0; v < st.size; ++v) {
        const size_t i = s.idx(t, st.node[v], a);
        if (s.act[i]) target = std::min(target, static_cast<int>(s.order_to[i]));
    }
    if (target == s.n_inv || target == a) return rec;

    // never place an order the surface itself prices as value-destroying
    const double u_target = st.interpolate(slice + target, s.n_inv);
    if (u_target + s.unit_cost * (target - a) + s.fixed_cost > u_here + act_tol_) return rec;

    rec.order = true;
    rec.order_up_to = target;
    return rec;
}

PolicyFn DecisionRule::as_policy() const {
    auto rule = std::make_shared<DecisionRule>(*this);
    return [rule](double t_rem, const std::vector<double>& belief, int inventory) -> int {
        const Recommendation rec = rule->recommend(t_rem, belief, inventory);
        return rec.order ? rec.order_up_to - inventory : 0;
    };
}

void export_regions(const DecisionRule& rule, int a_fixed, std::ostream& out) {
    const ValueSurface& s = rule.surface();
    const BeliefGrid& grid = rule.grid();
    if (a_fixed < 0 || a_fixed >= s.n_inv) throw std::out_of_range("inventory out of range");

    out << "T_rem";
    for (int i = 1; i <= s.num_states; ++i) out << ",pi_" << i;
    out << ",a,d,act\n";
    out.precision(17);
    for (int t = 0; t <= s.n_slices; ++t) {
        for (int node = 0; node < s.n_nodes; ++node) {
            out << t * s.dt;
            for (double v : grid.belief(node)) out << ',' << v;
            const size_t i = s.idx(t, node, a_fixed);
            out << ',' << a_fixed << ',' << s.order_to[i] << ','
                << static_cast<int>(s.act[i]) << '\n';
        }
    }
}

}  // namespace invctl
