#include "invctl/workflows.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

#include "json.hpp"

#include "invctl/fixtures.hpp"

namespace invctl {

namespace {

using nlohmann::json;

struct ProbeResult {
    double value = 0.0;
    int order_to = 0;
};

ProbeResult probe(const ModelSpec& spec, int time_steps, int resolution, int threads) {
    BeliefGrid grid(spec.num_states, resolution);
    SolveOptions options;
    options.time_steps = time_steps;
    options.threads = threads;
    options.compute_residual = false;
    const ValueSurface surf = solve_forward(spec, grid, options);

    std::vector<int> coords(spec.num_states, 0);
    // probe point: the uniform belief (resolution must be divisible by m)
    for (int i = 0; i < spec.num_states; ++i) coords[i] = resolution / spec.num_states;
    const int node = grid.node_index(coords);
    ProbeResult out;
    out.value = surf.u(surf.n_slices, node, 0);
    out.order_to = surf.order_to[surf.idx(surf.n_slices, node, 0)];
    return out;
}

}  // namespace

ReproduceReport reproduce_two_regime(const ReproduceOptions& options) {
    ReproduceReport report;
    report.options = options;
    report.pass = true;
    for (const auto& ref : fixtures::two_regime_reference()) {
        const ModelSpec spec = fixtures::two_regime(ref.variant);
        ReproduceRow row;
        row.variant = ref.variant;
        row.reference_value = ref.value;
        row.reference_order = ref.order_to;

        const auto t0 = std::chrono::steady_clock::now();
        const ProbeResult base =
            probe(spec, options.time_steps, options.resolution, options.threads);
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.value = base.value;
        row.order_to = base.order_to;

        if (options.refine) {
            const ProbeResult fine =
                probe(spec, 2 * options.time_steps, 2 * options.resolution, options.threads);
            row.refined_value = fine.value;
            row.refine_rel_change = std::abs(fine.value - base.value) / std::abs(base.value);
        }

        row.value_ok = std::abs(row.value - ref.value) <= options.value_rtol * ref.value &&
                       (!options.refine || row.refine_rel_change < options.refine_rtol);
        row.order_ok = row.order_to == ref.order_to;
        report.pass = report.pass && row.value_ok && row.order_ok;
        report.rows.push_back(row);
    }
    return report;
}

std::string to_json(const ReproduceReport& report) {
    json j;
    j["command"] = "reproduce";
    j["pass"] = report.pass;
    j["config"] = {{"time_steps", report.options.time_steps},
                   {"resolution", report.options.resolution},
                   {"value_rtol", report.options.value_rtol},
                   {"refine_rtol", report.options.refine_rtol},
                   {"refine", report.options.refine}};
    j["rows"] = json::array();
    for (const auto& r : report.rows) {
        j["rows"].push_back({{"variant", r.variant},
                             {"value", r.value},
                             {"order_to", r.order_to},
                             {"reference_value", r.reference_value},
                             {"reference_order", r.reference_order},
                             {"refined_value", r.refined_value},
                             {"refine_rel_change", r.refine_rel_change},
                             {"value_ok", r.value_ok},
                             {"order_ok", r.order_ok},
                             {"seconds", r.seconds}});
    }
    return j.dump(2) + "\n";
}

std::string to_text(const ReproduceReport& report) {
    std::ostringstream out;
    out << "variant            value   expected   d  exp  refine%   status\n";
    for (const auto& r : report.rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%-17s %7.2f   %7.2f   %2d  %2d   %6.3f   %s\n",
                      r.variant.c_str(), r.value, r.reference_value, r.order_to,
                      r.reference_order, 100.0 * r.refine_rel_change,
                      r.value_ok && r.order_ok ? "ok" : "MISMATCH");
        out << line;
    }
    out << (report.pass ? "all configurations match\n" : "MISMATCHES PRESENT\n");
    return out.str();
}

EndToEndReport end_to_end(const ModelSpec& spec, std::span<const double> pi0, int a0,
                          const EndToEndOptions& options) {
    require_valid(spec);
    auto grid = std::make_shared<BeliefGrid>(spec.num_states, options.resolution);
    SolveOptions sopt;
    sopt.time_steps = options.time_steps;
    sopt.threads = options.threads;
    auto surface = std::make_shared<ValueSurface>(solve_forward(spec, *grid, sopt));

    EndToEndReport report;
    const Stencil st = grid->locate(pi0);
    const double* top = surface->value.data() + surface->idx(surface->n_slices, 0, 0);
    report.value = st.interpolate(top + a0, surface->n_inv);
    const double* top0 = surface->no_action.data() + surface->idx(surface->n_slices, 0, 0);
    report.no_action_value = st.interpolate(top0 + a0, surface->n_inv);
    report.tolerance = options.grid_rtol * std::abs(report.value);

    DecisionRule rule(surface, grid);
    const double poll_dt = surface->dt;
    const McResult mc = mc_evaluate(spec, rule.as_policy(), pi0, a0, options.n_paths,
                                    options.seed, poll_dt, options.threads);
    report.mc_mean = mc.mean;
    report.mc_stderr = mc.stderror;
    report.policy_ok =
        std::abs(mc.mean - report.value) <= 3.0 * mc.stderror + report.tolerance;

    const McResult never = mc_evaluate(spec, never_order_policy(), pi0, a0, options.n_paths,
                                       options.seed + 1, poll_dt, options.threads);
    report.baseline_mean = never.mean;
    report.baseline_stderr = never.stderror;
    report.baseline_ok =
        std::abs(never.mean - report.no_action_value) <= 3.0 * never.stderror + report.tolerance;

    std::vector<std::pair<std::string, PolicyFn>> heuristics;
    heuristics.emplace_back("never-order", never_order_policy());
    for (int level = 1; level <= spec.max_inventory; ++level)
        heuristics.emplace_back("basestock-" + std::to_string(level), basestock_policy(level));

    report.pass = report.policy_ok && report.baseline_ok;
    const int heuristic_paths = std::min(options.n_paths, 20000);
    for (size_t i = 0; i < heuristics.size(); ++i) {
        const McResult r = mc_evaluate(spec, heuristics[i].second, pi0, a0, heuristic_paths,
                                       options.seed + 100 + i, poll_dt, options.threads);
        EndToEndBaseline b;
        b.name = heuristics[i].first;
        b.mc_mean = r.mean;
        b.mc_stderr = r.stderror;
        b.above_value = r.mean >= report.value - 3.0 * r.stderror - report.tolerance;
        report.pass = report.pass && b.above_value;
        report.heuristics.push_back(b);
    }
    return report;
}

std::string to_json(const EndToEndReport& report) {
    json j;
    j["command"] = "evaluate";
    j["pass"] = report.pass;
    j["value"] = report.value;
    j["no_action_value"] = report.no_action_value;
    j["mc_mean"] = report.mc_mean;
    j["mc_stderr"] = report.mc_stderr;
    j["tolerance"] = report.tolerance;
    j["policy_ok"] = report.policy_ok;
    j["baseline_mean"] = report.baseline_mean;
    j["baseline_stderr"] = report.baseline_stderr;
    j["baseline_ok"] = report.baseline_ok;
    j["heuristics"] = json::array();
    for (const auto& h : report.heuristics)
        j["heuristics"].push_back({{"name", h.name},
                                   {"mc_mean", h.mc_mean},
                                   {"mc_stderr", h.mc_stderr},
                                   {"above_value", h.above_value}});
    return j.dump(2) + "\n";
}

std::string to_text(const EndToEndReport& report) {
    std::ostringstream out;
    out.precision(5);
    out << "value            " << report.value << "\n"
        << "policy MC        " << report.mc_mean << " +- " << report.mc_stderr
        << (report.policy_ok ? "  (consistent)" : "  (OFF)") << "\n"
        << "no-action value  " << report.no_action_value << "\n"
        << "never-order MC   " << report.baseline_mean << " +- " << report.baseline_stderr
        << (report.baseline_ok ? "  (consistent)" : "  (OFF)") << "\n";
    for (const auto& h : report.heuristics)
        out << "  " << h.name << ": " << h.mc_mean << " +- " << h.mc_stderr
            << (h.above_value ? "" : "  BELOW VALUE") << "\n";
    out << (report.pass ? "pass\n" : "FAIL\n");
    return out.str();
}

}  // namespace invctl
