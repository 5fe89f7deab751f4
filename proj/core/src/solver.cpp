#include "invctl/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "invctl/markov.hpp"

namespace invctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n < 2 * threads) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> counter{0};
    auto worker = [&]() {
        for (int i = counter.fetch_add(1); i < n; i = counter.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

bool censored_updates(const ModelSpec& spec, JumpVariant variant) {
    switch (variant) {
        case JumpVariant::Censored: return true;
        case JumpVariant::Uncensored: return false;
        default: return spec.censoring == Censoring::Censored;
    }
}

// Per-node kinematics and jump data along the no-arrival flow, shared by all
// slices: flowed beliefs, survival mass, and interpolation stencils plus
// weights for every feasible post-arrival belief.
struct NodeTables {
    std::vector<double> x;        // (L+1) x m flowed beliefs
    std::vector<double> surv;     // L+1
    std::vector<int> xs_node;     // (L+1) x m stencil of the flowed belief
    std::vector<double> xs_w;
    std::vector<double> w_full;   // (L+1) x R arrival weights per revealed size
    std::vector<int> sf_node;     // (L+1) x R x m post-arrival stencils
    std::vector<double> sf_w;
    std::vector<double> w_so;     // (L+1) x n_so stock-out atom weights (a = 0..n_so-1)
    std::vector<int> sso_node;    // (L+1) x n_so x m
    std::vector<double> sso_w;
    std::vector<double> pen;      // (L+1) x n_inv intensity-weighted penalties
};

class Solver {
  public:
    Solver(const ModelSpec& spec, const BeliefGrid& grid, const SolveOptions& options)
        : spec_(spec),
          grid_(grid),
          opts_(options),
          m_(spec.num_states),
          n_nodes_(grid.num_nodes()),
          n_inv_(spec.max_inventory + 1),
          censored_(censored_updates(spec, options.jump_variant)) {
        require_valid(spec);
        if (grid.dim() != m_) throw std::invalid_argument("grid dimension != state count");
        steps_ = options.time_steps > 0 ? options.time_steps : 300;
        dt_ = spec.horizon / steps_;
        n_so_ = std::min(spec.max_inventory + 1, spec.max_demand);  // atoms exist for a < R
        disc_.resize(steps_ + 1);
        for (int l = 0; l <= steps_; ++l) disc_[l] = std::exp(-spec.discount_rate * l * dt_);
        build_tables();
    }

    ValueSurface solve() {
        ValueSurface surf = make_surface();
        fill_terminal(surf);
        compute_no_action(surf);
        for (int n = 1; n <= steps_; ++n) {
            for (int a = n_inv_ - 1; a >= 0; --a) {
                parallel_for(n_nodes_, opts_.threads, [&](int node) {
                    surf.value[surf.idx(n, node, a)] =
                        cell_value(surf.value.data(), surf, n, node, a, false);
                });
            }
            if (spec_.allow_sellback) close_interventions(surf, n);
            record_policy(surf, n);
        }
        if (opts_.compute_residual) surf.residual = residual(surf);
        return surf;
    }

    double residual(const ValueSurface& surf) const {
        std::vector<double> worst(n_nodes_, 0.0);
        for (int n = 1; n <= steps_; ++n) {
            parallel_for(n_nodes_, opts_.threads, [&](int node) {
                for (int a = 0; a < n_inv_; ++a) {
                    const double lu = cell_value(surf.value.data(), surf, n, node, a, true);
                    worst[node] = std::max(worst[node],
                                           std::abs(lu - surf.u(n, node, a)));
                }
            });
        }
        double r = 0.0;
        for (double v : worst) r = std::max(r, v);
        return r;
    }

    IterationTrace iterate(int max_iterations, double tol) {
        IterationTrace trace;
        ValueSurface w = make_surface();
        fill_terminal(w);
        compute_no_action(w);
        w.value = w.no_action;  // seed at the never-order surface
        for (int n = 0; n <= steps_; ++n) record_policy(w, n);

        ValueSurface next = w;
        for (int it = 0; it < max_iterations; ++it) {
            double sup = 0.0;
            for (int n = 1; n <= steps_; ++n) {
                for (int a = n_inv_ - 1; a >= 0; --a) {
                    parallel_for(n_nodes_, opts_.threads, [&](int node) {
                        next.value[next.idx(n, node, a)] =
                            cell_value(w.value.data(), w, n, node, a, false);
                    });
                }
                if (spec_.allow_sellback) close_interventions(next, n);
            }
            for (size_t i = 0; i < w.value.size(); ++i) {
                const double d = w.value[i] - next.value[i];
                if (next.value[i] > w.value[i] + 1e-12) trace.monotone = false;
                sup = std::max(sup, std::abs(d));
            }
            trace.sup_changes.push_back(sup);
            w.value.swap(next.value);
            ++trace.iterations;
            if (sup <= tol) break;
        }
        for (int n = 1; n <= steps_; ++n) record_policy(w, n);
        trace.surface = std::move(w);
        return trace;
    }

  private:
    const ModelSpec& spec_;
    const BeliefGrid& grid_;
    SolveOptions opts_;
    int m_;
    int n_nodes_;
    int n_inv_;
    bool censored_;
    int steps_ = 0;
    int n_so_ = 0;
    double dt_ = 0.0;
    std::vector<double> disc_;
    std::vector<NodeTables> tables_;

    double terminal_value(int a) const {
        return -spec_.salvage_fraction * spec_.unit_cost * a;
    }

    ValueSurface make_surface() const {
        ValueSurface s;
        s.num_states = m_;
        s.resolution = grid_.resolution();
        s.n_slices = steps_;
        s.n_nodes = n_nodes_;
        s.n_inv = n_inv_;
        s.max_demand = spec_.max_demand;
        s.dt = dt_;
        s.unit_cost = spec_.unit_cost;
        s.fixed_cost = spec_.fixed_cost;
        s.discount_rate = spec_.discount_rate;
        s.salvage_fraction = spec_.salvage_fraction;
        s.horizon = spec_.horizon;
        s.censored = censored_;
        s.allow_sellback = spec_.allow_sellback;
        const size_t cells = static_cast<size_t>(steps_ + 1) * n_nodes_ * n_inv_;
        s.value.assign(cells, 0.0);
        s.intervention.assign(cells, 0.0);
        s.no_action.assign(cells, 0.0);
        s.act.assign(cells, 0);
        s.order_to.assign(cells, 0);
        return s;
    }

    void fill_terminal(ValueSurface& surf) const {
        for (int node = 0; node < n_nodes_; ++node)
            for (int a = 0; a < n_inv_; ++a) {
                surf.value[surf.idx(0, node, a)] = terminal_value(a);
                surf.no_action[surf.idx(0, node, a)] = terminal_value(a);
            }
        record_policy(surf, 0);
    }

    void build_tables() {
        const Propagator prop(spec_);
        const StepCache step(prop, dt_);
        const int L = steps_;
        tables_.assign(n_nodes_, NodeTables{});

        parallel_for(n_nodes_, opts_.threads, [&](int node) {
            NodeTables& nt = tables_[node];
            nt.x.resize(static_cast<size_t>(L + 1) * m_);
            nt.surv.resize(L + 1);
            nt.xs_node.resize(static_cast<size_t>(L + 1) * m_);
            nt.xs_w.resize(static_cast<size_t>(L + 1) * m_);
            nt.w_full.assign(static_cast<size_t>(L + 1) * spec_.max_demand, 0.0);
            nt.sf_node.assign(static_cast<size_t>(L + 1) * spec_.max_demand * m_, 0);
            nt.sf_w.assign(static_cast<size_t>(L + 1) * spec_.max_demand * m_, 0.0);
            nt.w_so.assign(static_cast<size_t>(L + 1) * n_so_, 0.0);
            nt.sso_node.assign(static_cast<size_t>(L + 1) * n_so_ * m_, 0);
            nt.sso_w.assign(static_cast<size_t>(L + 1) * n_so_ * m_, 0.0);
            nt.pen.assign(static_cast<size_t>(L + 1) * n_inv_, 0.0);

            const auto pi0 = grid_.belief(node);
            std::vector<double> mass(pi0.begin(), pi0.end());
            std::vector<double> x(m_), post(m_);
            for (int l = 0; l <= L; ++l) {
                double surv = 0.0;
                for (double v : mass) surv += v;
                nt.surv[l] = surv;
                for (int i = 0; i < m_; ++i) x[i] = mass[i] / surv;
                std::copy(x.begin(), x.end(), nt.x.begin() + static_cast<size_t>(l) * m_);

                store_stencil(grid_.locate(x), &nt.xs_node[static_cast<size_t>(l) * m_],
                              &nt.xs_w[static_cast<size_t>(l) * m_]);

                for (int y = 1; y <= spec_.max_demand; ++y) {
                    double w = 0.0;
                    for (int i = 0; i < m_; ++i)
                        w += x[i] * spec_.arrival_rate[i] * spec_.pmf(i, y);
                    const size_t slot = static_cast<size_t>(l) * spec_.max_demand + (y - 1);
                    nt.w_full[slot] = w;
                    if (w <= 0.0) continue;
                    for (int i = 0; i < m_; ++i)
                        post[i] = x[i] * spec_.arrival_rate[i] * spec_.pmf(i, y) / w;
                    store_stencil(grid_.locate(post), &nt.sf_node[slot * m_],
                                  &nt.sf_w[slot * m_]);
                }

                for (int a = 0; a < n_so_; ++a) {
                    double w = 0.0;
                    for (int i = 0; i < m_; ++i)
                        w += x[i] * spec_.arrival_rate[i] * spec_.tail_mass(i, a);
                    const size_t slot = static_cast<size_t>(l) * n_so_ + a;
                    nt.w_so[slot] = w;
                    if (w <= 0.0) continue;
                    for (int i = 0; i < m_; ++i)
                        post[i] = x[i] * spec_.arrival_rate[i] * spec_.tail_mass(i, a) / w;
                    store_stencil(grid_.locate(post), &nt.sso_node[slot * m_],
                                  &nt.sso_w[slot * m_]);
                }

                for (int a = 0; a < n_inv_; ++a)
                    nt.pen[static_cast<size_t>(l) * n_inv_ + a] =
                        intensity_weighted_penalty(spec_, x, a);

                if (l < L) step.advance(mass);
            }
        });
    }

    void store_stencil(const Stencil& s, int* nodes, double* weights) const {
        for (int v = 0; v < m_; ++v) {
            nodes[v] = v < s.size ? s.node[v] : 0;
            weights[v] = v < s.size ? s.weight[v] : 0.0;
        }
    }

    double interp(const double* slice, const int* nodes, const double* weights, int a) const {
        double s = 0.0;
        for (int v = 0; v < m_; ++v)
            s += weights[v] * slice[static_cast<size_t>(nodes[v]) * n_inv_ + a];
        return s;
    }

    // E-value of (continuation + penalty) * arrival intensity at flow point l
    // of `node`, continuation values taken from `slice`.
    double jump_term(const double* slice, const NodeTables& nt, int l, int a) const {
        const int R = spec_.max_demand;
        double s = nt.pen[static_cast<size_t>(l) * n_inv_ + a];
        if (censored_) {
            const int maxy = std::min(a, R);
            for (int y = 1; y <= maxy; ++y) {
                const size_t slot = static_cast<size_t>(l) * R + (y - 1);
                const double w = nt.w_full[slot];
                if (w > 0.0)
                    s += w * interp(slice, &nt.sf_node[slot * m_], &nt.sf_w[slot * m_], a - y);
            }
            if (a < R) {
                const size_t slot = static_cast<size_t>(l) * n_so_ + a;
                const double w = nt.w_so[slot];
                if (w > 0.0)
                    s += w * interp(slice, &nt.sso_node[slot * m_], &nt.sso_w[slot * m_], 0);
            }
        } else {
            for (int y = 1; y <= R; ++y) {
                const size_t slot = static_cast<size_t>(l) * R + (y - 1);
                const double w = nt.w_full[slot];
                if (w > 0.0)
                    s += w * interp(slice, &nt.sf_node[slot * m_], &nt.sf_w[slot * m_],
                                    std::max(a - y, 0));
            }
        }
        return s;
    }

    // min_{b in range} interp(values[t][.][b]) + h (b - a), plus the fixed
    // cost; `lo` picks the admissible bottom of the range.
    double interp_intervention(const double* values, const ValueSurface& surf, int t,
                               const NodeTables& nt, int l, int a) const {
        const double* slice = values + surf.idx(t, 0, 0);
        const int lo = spec_.allow_sellback ? 0 : a;
        const int* nodes = &nt.xs_node[static_cast<size_t>(l) * m_];
        const double* weights = &nt.xs_w[static_cast<size_t>(l) * m_];
        double best = kInf;
        for (int b = lo; b < n_inv_; ++b) {
            const double v = interp(slice, nodes, weights, b) + spec_.unit_cost * (b - a);
            best = std::min(best, v);
        }
        return best + spec_.fixed_cost;
    }

    // One-cell application of the first-jump recursion. `values` is the value
    // array candidates read from (the surface being built during the forward
    // sweep, or a frozen input during iteration/residual checks). The running
    // integral's left endpoint reads the previous slice: the descending
    // inventory sweep has not produced same-slice post-arrival values yet.
    double cell_value(const double* values, const ValueSurface& surf, int n, int node, int a,
                      bool widen_same_slice) const {
        const NodeTables& nt = tables_[node];
        const double c_a = spec_.storage_cost[a];

        double best = kInf;
        {  // immediate intervention against same-slice values
            const double* slice = values + surf.idx(n, 0, 0);
            const size_t row = static_cast<size_t>(node) * n_inv_;
            double mv = kInf;
            for (int b = a + 1; b < n_inv_; ++b)
                mv = std::min(mv, slice[row + b] + spec_.unit_cost * (b - a));
            if (widen_same_slice && spec_.allow_sellback)
                for (int b = 0; b < a; ++b)
                    mv = std::min(mv, slice[row + b] + spec_.unit_cost * (b - a));
            if (mv < kInf) best = mv + spec_.fixed_cost;
        }

        double integral = 0.0;
        double g_prev =
            nt.surv[0] * (c_a + jump_term(values + surf.idx(n - 1, 0, 0), nt, 0, a));
        for (int j = 1; j <= n; ++j) {
            const double g =
                disc_[j] * nt.surv[j] *
                (c_a + jump_term(values + surf.idx(n - j, 0, 0), nt, j, a));
            integral += 0.5 * dt_ * (g_prev + g);
            g_prev = g;
            const double candidate =
                integral +
                disc_[j] * nt.surv[j] * interp_intervention(values, surf, n - j, nt, j, a);
            best = std::min(best, candidate);
        }
        const double never = integral + disc_[n] * nt.surv[n] * terminal_value(a);
        return std::min(best, never);
    }

    // Never-order recursion: the same quadrature with interventions disabled.
    void compute_no_action(ValueSurface& surf) const {
        for (int n = 1; n <= steps_; ++n) {
            parallel_for(n_nodes_, opts_.threads, [&](int node) {
                const NodeTables& nt = tables_[node];
                for (int a = 0; a < n_inv_; ++a) {
                    const double c_a = spec_.storage_cost[a];
                    double integral = 0.0;
                    double g_prev =
                        nt.surv[0] *
                        (c_a + jump_term(surf.no_action.data() + surf.idx(n - 1, 0, 0), nt, 0, a));
                    for (int j = 1; j <= n; ++j) {
                        const double g =
                            disc_[j] * nt.surv[j] *
                            (c_a +
                             jump_term(surf.no_action.data() + surf.idx(n - j, 0, 0), nt, j, a));
                        integral += 0.5 * dt_ * (g_prev + g);
                        g_prev = g;
                    }
                    surf.no_action[surf.idx(n, node, a)] =
                        integral + disc_[n] * nt.surv[n] * terminal_value(a);
                }
            });
        }
    }

    // Under sell-back an instantaneous order may move inventory down; the
    // descending sweep cannot see those targets, so close the slice under the
    // intervention map until stable.
    void close_interventions(ValueSurface& surf, int n) const {
        for (int pass = 0; pass < n_inv_; ++pass) {
            bool changed = false;
            for (int node = 0; node < n_nodes_; ++node) {
                double* row = surf.value.data() + surf.idx(n, node, 0);
                for (int a = 0; a < n_inv_; ++a) {
                    double mv = kInf;
                    for (int b = 0; b < n_inv_; ++b) {
                        if (b == a) continue;
                        mv = std::min(mv, row[b] + spec_.unit_cost * (b - a));
                    }
                    mv += spec_.fixed_cost;
                    if (mv < row[a]) {
                        row[a] = mv;
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }
    }

    void record_policy(ValueSurface& surf, int n) const {
        for (int node = 0; node < n_nodes_; ++node) {
            const double* row = surf.value.data() + surf.idx(n, node, 0);
            for (int a = 0; a < n_inv_; ++a) {
                const int lo = spec_.allow_sellback ? 0 : a;
                double best = kInf;
                int best_b = a;
                for (int b = lo; b < n_inv_; ++b) {
                    const double v = row[b] + spec_.unit_cost * (b - a);
                    if (v < best) {
                        best = v;
                        best_b = b;
                    }
                }
                best += spec_.fixed_cost;
                const size_t i = surf.idx(n, node, a);
                surf.intervention[i] = best;
                surf.order_to[i] = static_cast<std::int16_t>(best_b);
                surf.act[i] = best - row[a] <= 1e-9 * (1.0 + std::abs(row[a])) ? 1 : 0;
            }
        }
    }
};

}  // namespace

ValueSurface solve_forward(const ModelSpec& spec, const BeliefGrid& grid,
                           const SolveOptions& options) {
    Solver solver(spec, grid, options);
    return solver.solve();
}

double fixed_point_residual(const ValueSurface& surface, const ModelSpec& spec,
                            const BeliefGrid& grid, int threads) {
    SolveOptions options;
    options.time_steps = surface.n_slices;
    options.threads = threads;
    options.jump_variant = surface.censored ? JumpVariant::Censored : JumpVariant::Uncensored;
    options.compute_residual = false;
    Solver solver(spec, grid, options);
    return solver.residual(surface);
}

IterationTrace fixed_point_iteration(const ModelSpec& spec, const BeliefGrid& grid,
                                     const SolveOptions& options, int max_iterations,
                                     double tol) {
    Solver solver(spec, grid, options);
    return solver.iterate(max_iterations, tol);
}

double expected_arrival_value(const ModelSpec& spec, const BeliefGrid& grid, SliceValues slice,
                              std::span<const double> belief, int a, JumpVariant variant) {
    const bool censored = censored_updates(spec, variant);
    const int m = spec.num_states;
    const int R = spec.max_demand;

    double rate = 0.0;
    for (int i = 0; i < m; ++i) rate += belief[i] * spec.arrival_rate[i];

    double s = intensity_weighted_penalty(spec, belief, a);
    std::vector<double> post(m);
    auto add_mark = [&](double w, int post_inv) {
        if (w <= 0.0) return;
        renormalize(post);
        const Stencil st = grid.locate(post);
        s += w * st.interpolate(slice.data + post_inv, slice.n_inv);
    };

    for (int y = 1; y <= R; ++y) {
        if (censored && y > a) break;
        double w = 0.0;
        for (int i = 0; i < m; ++i) {
            post[i] = belief[i] * spec.arrival_rate[i] * spec.pmf(i, y);
            w += post[i];
        }
        add_mark(w, std::max(a - y, 0));
    }
    if (censored && a < R) {
        double w = 0.0;
        for (int i = 0; i < m; ++i) {
            post[i] = belief[i] * spec.arrival_rate[i] * spec.tail_mass(i, a);
            w += post[i];
        }
        add_mark(w, 0);
    }
    return s / rate;
}

InterventionResult intervention_value(const ModelSpec& spec, const BeliefGrid& grid,
                                      SliceValues slice, std::span<const double> belief, int a) {
    const Stencil st = grid.locate(belief);
    const int lo = spec.allow_sellback ? 0 : a;
    InterventionResult out;
    out.value = kInf;
    out.order_to = a;
    for (int b = lo; b <= spec.max_inventory; ++b) {
        const double v =
            st.interpolate(slice.data + b, slice.n_inv) + spec.unit_cost * (b - a);
        if (v < out.value) {
            out.value = v;
            out.order_to = b;
        }
    }
    out.value += spec.fixed_cost;
    return out;
}

}  // namespace invctl
