#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "invctl/model.hpp"
#include "invctl/policy.hpp"
#include "invctl/solver.hpp"

namespace invctl {

// Solves the bundled two-regime variants and compares value and order level
// at T = 3, pi = (0.5, 0.5), a = 0 against the reference outcomes, refining
// the grid once to report discretization stability.
struct ReproduceRow {
    std::string variant;
    double value = 0.0;
    int order_to = 0;
    double reference_value = 0.0;
    int reference_order = 0;
    double refined_value = 0.0;
    double refine_rel_change = 0.0;
    bool value_ok = false;
    bool order_ok = false;
    double seconds = 0.0;
};

struct ReproduceOptions {
    int time_steps = 300;
    int resolution = 200;
    double value_rtol = 0.02;
    double refine_rtol = 0.005;
    bool refine = true;
    int threads = 1;
};

struct ReproduceReport {
    std::vector<ReproduceRow> rows;
    ReproduceOptions options;
    bool pass = false;
};

ReproduceReport reproduce_two_regime(const ReproduceOptions& options);
std::string to_json(const ReproduceReport& report);
std::string to_text(const ReproduceReport& report);

// Solve -> extract rule -> Monte Carlo: the simulated cost of the extracted
// policy must straddle the computed value within 3 standard errors plus the
// grid tolerance; the never-order baseline must match the no-action value;
// every policy's cost must stay above value - tolerance.
struct EndToEndOptions {
    int time_steps = 300;
    int resolution = 200;
    int n_paths = 100000;
    std::uint64_t seed = 20240901;
    double grid_rtol = 0.01;  // tolerance as a fraction of the value
    int threads = 1;
};

struct EndToEndBaseline {
    std::string name;
    double mc_mean = 0.0;
    double mc_stderr = 0.0;
    bool above_value = false;  // mean >= value - tolerance
};

struct EndToEndReport {
    double value = 0.0;          // U at (T, pi0, a0)
    double no_action_value = 0.0;
    double mc_mean = 0.0;
    double mc_stderr = 0.0;
    double tolerance = 0.0;      // grid_rtol * value
    bool policy_ok = false;      // |mc - value| <= 3 se + tolerance
    bool baseline_ok = false;    // |never-order mc - U0| <= 3 se + tolerance
    double baseline_mean = 0.0;
    double baseline_stderr = 0.0;
    std::vector<EndToEndBaseline> heuristics;
    bool pass = false;
};

EndToEndReport end_to_end(const ModelSpec& spec, std::span<const double> pi0, int a0,
                          const EndToEndOptions& options);
std::string to_json(const EndToEndReport& report);
std::string to_text(const EndToEndReport& report);

}  // namespace invctl
