#include "invctl/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace invctl {

double ModelSpec::tail_mass(int state, int a) const {
    double s = 0.0;
    for (int y = a + 1; y <= max_demand; ++y) s += pmf(state, y);
    return s;
}

double ModelSpec::max_rate() const {
    double r = 0.0;
    for (double v : arrival_rate) r = std::max(r, v);
    return r;
}

std::vector<std::string> validate(const ModelSpec& spec) {
    std::vector<std::string> out;
    auto fail = [&out](const std::string& msg) { out.push_back(msg); };

    const int m = spec.num_states;
    if (m < 1) fail("m: must be >= 1");
    if (spec.max_demand < 1) fail("R: must be >= 1");
    if (spec.max_inventory < 1) fail("Pbar: must be >= 1");
    if (!(spec.horizon > 0.0)) fail("T: must be > 0");
    if (spec.discount_rate < 0.0) fail("rho: must be >= 0");
    if (spec.unit_cost < 0.0) fail("h: must be >= 0");
    if (spec.fixed_cost < 0.0) fail("zeta: must be >= 0");
    if (spec.salvage_fraction < 0.0 || spec.salvage_fraction > 1.0)
        fail("salvage_fraction: must be in [0,1]");
    if (m < 1) return out;

    if (static_cast<int>(spec.generator.size()) != m) {
        fail("Q: expected " + std::to_string(m) + " rows");
    } else {
        for (int i = 0; i < m; ++i) {
            if (static_cast<int>(spec.generator[i].size()) != m) {
                fail("Q.row[" + std::to_string(i) + "]: expected " + std::to_string(m) +
                     " entries");
                continue;
            }
            double row_sum = 0.0;
            for (int j = 0; j < m; ++j) {
                const double q = spec.generator[i][j];
                row_sum += q;
                if (i != j && q < 0.0)
                    fail("Q[" + std::to_string(i) + "][" + std::to_string(j) +
                         "]: off-diagonal entry must be >= 0");
            }
            if (std::abs(row_sum) > 1e-10)
                fail("Q.row[" + std::to_string(i) + "]: sums to " + std::to_string(row_sum));
        }
    }

    if (static_cast<int>(spec.arrival_rate.size()) != m) {
        fail("lambda: expected " + std::to_string(m) + " entries");
    } else {
        for (int i = 0; i < m; ++i)
            if (!(spec.arrival_rate[i] > 0.0))
                fail("lambda[" + std::to_string(i) + "]: must be > 0");
    }

    if (static_cast<int>(spec.demand_pmf.size()) != m) {
        fail("f: expected " + std::to_string(m) + " rows");
    } else {
        for (int i = 0; i < m; ++i) {
            if (static_cast<int>(spec.demand_pmf[i].size()) != spec.max_demand) {
                fail("f.row[" + std::to_string(i) + "]: expected " +
                     std::to_string(spec.max_demand) + " entries");
                continue;
            }
            double s = 0.0;
            for (int y = 0; y < spec.max_demand; ++y) {
                if (spec.demand_pmf[i][y] < 0.0)
                    fail("f[" + std::to_string(i) + "][" + std::to_string(y) +
                         "]: must be >= 0");
                s += spec.demand_pmf[i][y];
            }
            if (std::abs(s - 1.0) > 1e-12)
                fail("f.row[" + std::to_string(i) + "]: sums to " + std::to_string(s));
        }
    }

    if (static_cast<int>(spec.storage_cost.size()) != spec.max_inventory + 1) {
        fail("c: expected " + std::to_string(spec.max_inventory + 1) + " entries");
    } else {
        if (spec.storage_cost[0] < 0.0) fail("c[0]: must be >= 0");
        for (size_t a = 1; a < spec.storage_cost.size(); ++a)
            if (spec.storage_cost[a] < spec.storage_cost[a - 1])
                fail("c: not nondecreasing at index " + std::to_string(a));
    }

    if (static_cast<int>(spec.stockout_penalty.size()) != spec.max_demand + 1) {
        fail("K: expected " + std::to_string(spec.max_demand + 1) + " entries");
    } else {
        if (spec.stockout_penalty[0] != 0.0) fail("K[0]: must be 0");
        for (size_t a = 1; a < spec.stockout_penalty.size(); ++a)
            if (spec.stockout_penalty[a] < spec.stockout_penalty[a - 1])
                fail("K: not nondecreasing at index " + std::to_string(a));
    }

    return out;
}

void require_valid(const ModelSpec& spec) {
    const auto violations = validate(spec);
    if (violations.empty()) return;
    std::string msg = "invalid model:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw std::invalid_argument(msg);
}

Mark censor(int y, int p, Censoring mode) {
    if (y < 1) throw std::out_of_range("demand size must be >= 1");
    if (p < 0) throw std::out_of_range("inventory must be >= 0");
    if (y <= p) return Mark{MarkKind::Full, y, y};
    if (mode == Censoring::Censored) return Mark{MarkKind::Stockout, p, 0};
    return Mark{MarkKind::Full, p, y};
}

double mark_likelihood(const ModelSpec& spec, int state, const Mark& mark, int p) {
    if (state < 0 || state >= spec.num_states) throw std::out_of_range("state out of range");
    if (p < 0 || p > spec.max_inventory) throw std::out_of_range("inventory out of range");
    if (mark.kind == MarkKind::Stockout) {
        if (mark.filled != p) return 0.0;
        return spec.tail_mass(state, p);
    }
    if (mark.demand < 1 || mark.demand > spec.max_demand) return 0.0;
    if (mark.demand <= p && mark.filled != mark.demand) return 0.0;
    if (mark.demand > p && mark.filled != p) return 0.0;
    return spec.pmf(state, mark.demand);
}

double intensity_weighted_penalty(const ModelSpec& spec, std::span<const double> belief, int a) {
    double total = 0.0;
    for (int i = 0; i < spec.num_states; ++i) {
        double e = 0.0;
        for (int y = a + 1; y <= spec.max_demand; ++y)
            e += spec.pmf(i, y) * spec.stockout_penalty[y - a];
        total += belief[i] * spec.arrival_rate[i] * e;
    }
    return total;
}

double expected_penalty_given_stockout(const ModelSpec& spec, std::span<const double> belief,
                                       int a) {
    double norm = 0.0;
    for (int i = 0; i < spec.num_states; ++i)
        norm += belief[i] * spec.arrival_rate[i] * spec.tail_mass(i, a);
    if (norm <= 0.0)
        throw std::runtime_error("stock-out impossible at inventory " + std::to_string(a));
    return intensity_weighted_penalty(spec, belief, a) / norm;
}

std::vector<double> truncated_negative_binomial(double r, double p, int max_size) {
    if (!(r > 0.0) || !(p > 0.0) || !(p < 1.0) || max_size < 1)
        throw std::invalid_argument("bad negative binomial parameters");
    std::vector<double> pmf(max_size);
    double total = 0.0;
    for (int k = 1; k <= max_size; ++k) {
        const double log_pmf = std::lgamma(k + r) - std::lgamma(r) - std::lgamma(k + 1.0) +
                               r * std::log(p) + k * std::log1p(-p);
        pmf[k - 1] = std::exp(log_pmf);
        total += pmf[k - 1];
    }
    for (double& v : pmf) v /= total;
    return pmf;
}

namespace {

using nlohmann::json;

std::vector<std::vector<double>> read_matrix(const json& j, const std::string& name) {
    if (!j.is_array()) throw std::invalid_argument(name + ": expected nested array");
    std::vector<std::vector<double>> out;
    for (const auto& row : j) out.push_back(row.get<std::vector<double>>());
    return out;
}

}  // namespace

ModelSpec model_from_json(const std::string& text) {
    json j = json::parse(text);
    ModelSpec spec;
    spec.num_states = j.at("m").get<int>();
    spec.generator = read_matrix(j.at("Q"), "Q");
    spec.arrival_rate = j.at("lambda").get<std::vector<double>>();
    spec.demand_pmf = read_matrix(j.at("f"), "f");
    spec.max_demand = j.at("R").get<int>();
    spec.max_inventory = j.at("Pbar").get<int>();
    spec.storage_cost = j.at("c").get<std::vector<double>>();
    spec.stockout_penalty = j.at("K").get<std::vector<double>>();
    spec.unit_cost = j.at("h").get<double>();
    spec.fixed_cost = j.at("zeta").get<double>();
    spec.discount_rate = j.at("rho").get<double>();
    spec.horizon = j.at("T").get<double>();
    const std::string mode = j.at("censoring").get<std::string>();
    if (mode == "Censored")
        spec.censoring = Censoring::Censored;
    else if (mode == "Uncensored")
        spec.censoring = Censoring::Uncensored;
    else
        throw std::invalid_argument("censoring: expected \"Censored\" or \"Uncensored\"");
    spec.salvage_fraction = j.value("salvage_fraction", 0.0);
    spec.allow_sellback = j.value("allow_sellback", false);
    return spec;
}

ModelSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

std::string model_to_json(const ModelSpec& spec) {
    json j;
    j["m"] = spec.num_states;
    j["Q"] = spec.generator;
    j["lambda"] = spec.arrival_rate;
    j["f"] = spec.demand_pmf;
    j["R"] = spec.max_demand;
    j["Pbar"] = spec.max_inventory;
    j["c"] = spec.storage_cost;
    j["K"] = spec.stockout_penalty;
    j["h"] = spec.unit_cost;
    j["zeta"] = spec.fixed_cost;
    j["rho"] = spec.discount_rate;
    j["T"] = spec.horizon;
    j["censoring"] = spec.censoring == Censoring::Censored ? "Censored" : "Uncensored";
    j["salvage_fraction"] = spec.salvage_fraction;
    j["allow_sellback"] = spec.allow_sellback;
    return j.dump(2) + "\n";
}

void save_model(const ModelSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << model_to_json(spec);
}

}  // namespace invctl
