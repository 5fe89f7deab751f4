// invctl: solve, simulate and interrogate partially observed
// regime-switching inventory models.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "invctl/filter.hpp"
#include "invctl/fixtures.hpp"
#include "invctl/model.hpp"
#include "invctl/policy.hpp"
#include "invctl/simulator.hpp"
#include "invctl/solver.hpp"
#include "invctl/surface_io.hpp"
#include "invctl/workflows.hpp"

namespace {

using namespace invctl;
using nlohmann::json;

int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<double> parse_belief(const std::string& text, int m) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (static_cast<int>(out.size()) != m)
        throw std::runtime_error("--pi needs " + std::to_string(m) + " comma-separated entries");
    double total = 0.0;
    for (double v : out) total += v;
    if (std::abs(total - 1.0) > 1e-9) throw std::runtime_error("--pi must sum to 1");
    return out;
}

int default_resolution(int m) { return m == 2 ? 200 : 60; }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

struct SurfaceBundle {
    std::shared_ptr<const ValueSurface> surface;
    std::shared_ptr<const BeliefGrid> grid;
};

SurfaceBundle load_bundle(const std::string& path) {
    auto surface = std::make_shared<ValueSurface>(load_surface(path));
    auto grid = std::make_shared<BeliefGrid>(surface->num_states, surface->resolution);
    return {surface, grid};
}

PolicyFn make_named_policy(const std::string& name, const std::string& surface_path,
                           double act_tol) {
    if (name == "never") return never_order_policy();
    if (name.rfind("basestock:", 0) == 0)
        return basestock_policy(std::stoi(name.substr(10)));
    if (name == "surface") {
        if (surface_path.empty()) throw std::runtime_error("--policy surface needs --surface");
        SurfaceBundle b = load_bundle(surface_path);
        return DecisionRule(b.surface, b.grid, act_tol).as_policy();
    }
    throw std::runtime_error("unknown policy: " + name +
                             " (expected surface | never | basestock:<level>)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"partially observed regime-switching inventory control toolkit"};
    app.require_subcommand(1);

    std::string model_path, surface_path, out_path, csv_path, log_path, pi_text, policy_name;
    std::string report_path;
    int time_steps = 0, resolution = 0, inventory = 0, paths = 100000, region_inv = 0;
    int threads = default_threads();
    double t_rem = -1.0, act_tol = -1.0;
    std::uint64_t seed = 20240901;
    bool no_refine = false;
    std::string jump_variant = "model";

    auto add_model = [&](CLI::App* cmd) {
        cmd->add_option("--model", model_path, "model JSON file")->required();
    };

    // validate
    auto* c_validate = app.add_subcommand("validate", "check a model file");
    add_model(c_validate);

    // solve
    auto* c_solve = app.add_subcommand("solve", "compute the value surface and policy");
    add_model(c_solve);
    c_solve->add_option("--dt", time_steps,
                        "number of time steps on [0, T] (default 300)");
    c_solve->add_option("--belief-res", resolution, "belief grid resolution");
    c_solve->add_option("--threads", threads, "worker threads");
    c_solve->add_option("--out", out_path, "binary surface output")->required();
    c_solve->add_option("--csv", csv_path, "optional U.csv export");
    c_solve->add_option("--jump-variant", jump_variant,
                        "jump update variant: model | censored | uncensored");

    // advise
    auto* c_advise = app.add_subcommand("advise", "query a solved surface");
    c_advise->add_option("--surface", surface_path, "surface file")->required();
    c_advise->add_option("--t", t_rem, "time remaining")->required();
    c_advise->add_option("--pi", pi_text, "belief, comma separated")->required();
    c_advise->add_option("--a", inventory, "current inventory")->required();
    c_advise->add_option("--tol", act_tol, "act tolerance override");

    // regions
    auto* c_regions = app.add_subcommand("regions", "export order regions as CSV");
    c_regions->add_option("--surface", surface_path, "surface file")->required();
    c_regions->add_option("--a", region_inv, "inventory level")->required();
    c_regions->add_option("--out", out_path, "CSV output (default stdout)");

    // filter
    auto* c_filter = app.add_subcommand("filter", "replay an event log through the filter");
    add_model(c_filter);
    c_filter->add_option("--log", log_path, "event log (JSON lines)")->required();
    c_filter->add_option("--pi", pi_text, "initial belief")->required();
    c_filter->add_option("--a", inventory, "initial inventory")->required();
    c_filter->add_option("--out", out_path, "trajectory CSV (default stdout)");

    // simulate
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo evaluation of a policy");
    add_model(c_sim);
    c_sim->add_option("--policy", policy_name, "surface | never | basestock:<level>")
        ->required();
    c_sim->add_option("--surface", surface_path, "surface file for --policy surface");
    c_sim->add_option("--pi", pi_text, "initial belief")->required();
    c_sim->add_option("--a", inventory, "initial inventory");
    c_sim->add_option("--paths", paths, "number of paths");
    c_sim->add_option("--seed", seed, "RNG seed");
    c_sim->add_option("--dt", time_steps, "policy polling steps per horizon (default 300)");
    c_sim->add_option("--threads", threads, "worker threads");
    c_sim->add_option("--out", csv_path, "per-path CSV output");
    c_sim->add_option("--summary", report_path, "aggregate JSON output");
    c_sim->add_option("--tol", act_tol, "act tolerance override");

    // evaluate
    auto* c_eval = app.add_subcommand(
        "evaluate", "solve, extract the rule, Monte Carlo it and compare");
    add_model(c_eval);
    c_eval->add_option("--dt", time_steps, "time steps (default 300)");
    c_eval->add_option("--belief-res", resolution, "belief grid resolution");
    c_eval->add_option("--pi", pi_text, "initial belief")->required();
    c_eval->add_option("--a", inventory, "initial inventory");
    c_eval->add_option("--paths", paths, "number of paths");
    c_eval->add_option("--seed", seed, "RNG seed");
    c_eval->add_option("--threads", threads, "worker threads");
    c_eval->add_option("--out", report_path, "JSON report output");

    // reproduce
    auto* c_repro = app.add_subcommand(
        "reproduce", "solve the bundled two-regime variants and compare to the reference");
    c_repro->add_option("--dt", time_steps, "time steps (default 300)");
    c_repro->add_option("--belief-res", resolution, "belief resolution (default 200)");
    c_repro->add_option("--threads", threads, "worker threads");
    c_repro->add_flag("--no-refine", no_refine, "skip the refinement pass");
    c_repro->add_option("--out", report_path, "JSON report output");

    // fixtures
    auto* c_fix = app.add_subcommand("fixtures", "write the bundled models to a directory");
    c_fix->add_option("--out-dir", out_path, "target directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_validate) {
            const ModelSpec spec = load_model(model_path);
            const auto violations = validate(spec);
            if (violations.empty()) {
                std::cout << "ok\n";
                return 0;
            }
            for (const auto& v : violations) std::cout << v << "\n";
            return 1;
        }

        if (*c_solve) {
            const ModelSpec spec = load_model(model_path);
            require_valid(spec);
            if (resolution == 0) resolution = default_resolution(spec.num_states);
            BeliefGrid grid(spec.num_states, resolution);
            SolveOptions opt;
            opt.time_steps = time_steps;
            opt.threads = threads;
            if (jump_variant == "censored") opt.jump_variant = JumpVariant::Censored;
            else if (jump_variant == "uncensored") opt.jump_variant = JumpVariant::Uncensored;
            else if (jump_variant != "model")
                throw std::runtime_error("--jump-variant must be model|censored|uncensored");
            const ValueSurface surf = solve_forward(spec, grid, opt);
            save_surface(surf, out_path);
            if (!csv_path.empty()) export_surface_csv(surf, grid, csv_path);
            json j;
            j["command"] = "solve";
            j["nodes"] = surf.n_nodes;
            j["time_steps"] = surf.n_slices;
            j["dt"] = surf.dt;
            j["resolution"] = surf.resolution;
            j["residual"] = surf.residual;
            j["out"] = out_path;
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*c_advise) {
            SurfaceBundle b = load_bundle(surface_path);
            DecisionRule rule(b.surface, b.grid, act_tol);
            const auto pi = parse_belief(pi_text, b.surface->num_states);
            const Recommendation rec = rule.recommend(t_rem, pi, inventory);
            json j;
            j["command"] = "advise";
            j["t"] = t_rem;
            j["pi"] = pi;
            j["a"] = inventory;
            j["action"] = rec.order ? "order" : "wait";
            if (rec.order) j["order_up_to"] = rec.order_up_to;
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*c_regions) {
            SurfaceBundle b = load_bundle(surface_path);
            DecisionRule rule(b.surface, b.grid);
            if (out_path.empty()) {
                export_regions(rule, region_inv, std::cout);
            } else {
                std::ofstream out(out_path);
                if (!out) throw std::runtime_error("cannot write " + out_path);
                export_regions(rule, region_inv, out);
            }
            return 0;
        }

        if (*c_filter) {
            const ModelSpec spec = load_model(model_path);
            require_valid(spec);
            const auto pi = parse_belief(pi_text, spec.num_states);
            const EventLog log = load_event_log(log_path);
            const auto states = replay(spec, pi, inventory, log);
            if (out_path.empty()) {
                write_trajectory_csv(std::cout, states);
            } else {
                std::ofstream out(out_path);
                if (!out) throw std::runtime_error("cannot write " + out_path);
                write_trajectory_csv(out, states);
            }
            return 0;
        }

        if (*c_sim) {
            const ModelSpec spec = load_model(model_path);
            require_valid(spec);
            const auto pi = parse_belief(pi_text, spec.num_states);
            const PolicyFn policy = make_named_policy(policy_name, surface_path, act_tol);
            const int steps = time_steps > 0 ? time_steps : 300;
            const double poll_dt = spec.horizon / steps;

            std::ofstream csv;
            if (!csv_path.empty()) {
                csv.open(csv_path);
                if (!csv) throw std::runtime_error("cannot write " + csv_path);
                csv << "seed,total,storage,ordering,stockout,salvage\n";
                csv.precision(17);
            }
            McResult agg;
            agg.n_paths = paths;
            std::vector<double> totals(paths);
            for (int i = 0; i < paths; ++i) {
                const std::uint64_t path_seed = mix_seed(seed + 0x51ed2701ull * (i + 1));
                const SamplePath path = sample_path(spec, pi, path_seed);
                const CostBreakdown c = run_policy(spec, path, policy, pi, inventory, poll_dt).cost;
                totals[i] = c.total;
                agg.mean += c.total;
                agg.mean_breakdown.storage += c.storage;
                agg.mean_breakdown.ordering += c.ordering;
                agg.mean_breakdown.stockout += c.stockout;
                agg.mean_breakdown.salvage += c.salvage;
                if (csv.is_open())
                    csv << path_seed << ',' << c.total << ',' << c.storage << ',' << c.ordering
                        << ',' << c.stockout << ',' << c.salvage << '\n';
            }
            agg.mean /= paths;
            double ss = 0.0;
            for (double t : totals) ss += (t - agg.mean) * (t - agg.mean);
            agg.stderror = std::sqrt(ss / (double(paths) * (paths - 1)));
            json j;
            j["command"] = "simulate";
            j["paths"] = paths;
            j["mean"] = agg.mean;
            j["stderr"] = agg.stderror;
            j["storage"] = agg.mean_breakdown.storage / paths;
            j["ordering"] = agg.mean_breakdown.ordering / paths;
            j["stockout"] = agg.mean_breakdown.stockout / paths;
            j["salvage"] = agg.mean_breakdown.salvage / paths;
            if (!report_path.empty()) write_file(report_path, j.dump(2) + "\n");
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*c_eval) {
            const ModelSpec spec = load_model(model_path);
            require_valid(spec);
            const auto pi = parse_belief(pi_text, spec.num_states);
            EndToEndOptions opt;
            if (time_steps > 0) opt.time_steps = time_steps;
            opt.resolution = resolution > 0 ? resolution : default_resolution(spec.num_states);
            opt.n_paths = paths;
            opt.seed = seed;
            opt.threads = threads;
            const EndToEndReport report = end_to_end(spec, pi, inventory, opt);
            if (!report_path.empty()) write_file(report_path, to_json(report));
            std::cout << to_text(report);
            return report.pass ? 0 : 1;
        }

        if (*c_repro) {
            ReproduceOptions opt;
            if (time_steps > 0) opt.time_steps = time_steps;
            if (resolution > 0) opt.resolution = resolution;
            opt.refine = !no_refine;
            opt.threads = threads;
            const ReproduceReport report = reproduce_two_regime(opt);
            if (!report_path.empty()) write_file(report_path, to_json(report));
            std::cout << to_text(report);
            return report.pass ? 0 : 1;
        }

        if (*c_fix) {
            std::filesystem::create_directories(out_path);
            for (const auto& [name, spec] : fixtures::bundled_models())
                save_model(spec, out_path + "/" + name + ".json");
            save_event_log(fixtures::walkthrough_log(true),
                           out_path + "/walkthrough_log.jsonl");
            std::cout << "wrote fixtures to " << out_path << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
