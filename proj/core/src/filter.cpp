#include "invctl/filter.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace invctl {

namespace {

void check_log(const ModelSpec& spec, const EventLog& log) {
    double last = 0.0;
    for (const auto& e : log.events) {
        if (e.time < last) throw std::invalid_argument("event log times must be nondecreasing");
        if (e.time > spec.horizon + 1e-12)
            throw std::invalid_argument("event log extends past the horizon");
        last = e.time;
    }
}

}  // namespace

FilterState flow(const Propagator& prop, const FilterState& state, double dt) {
    if (dt < 0.0) throw std::invalid_argument("negative flow duration");
    FilterState next = state;
    next.time += dt;
    if (dt > 0.0) next.belief = prop.flow(state.belief, dt);
    return next;
}

FilterState bayes_update(const ModelSpec& spec, const FilterState& state, const Mark& mark) {
    if (mark.filled > state.inventory)
        throw std::invalid_argument("mark fills more than available inventory");
    FilterState next = state;
    double total = 0.0;
    for (int i = 0; i < spec.num_states; ++i) {
        const double w =
            spec.arrival_rate[i] * mark_likelihood(spec, i, mark, state.inventory);
        next.belief[i] = w * state.belief[i];
        total += next.belief[i];
    }
    if (!(total > 0.0))
        throw std::runtime_error("mark has zero likelihood at inventory " +
                                 std::to_string(state.inventory));
    renormalize(next.belief);
    next.inventory -= mark.filled;
    return next;
}

FilterState apply_supply(const ModelSpec& spec, const FilterState& state, int amount) {
    if (amount < 0 && !spec.allow_sellback)
        throw std::invalid_argument("negative supply requires sell-back");
    const int target = state.inventory + amount;
    if (target < 0 || target > spec.max_inventory)
        throw std::out_of_range("supply order leaves inventory out of range");
    FilterState next = state;
    next.inventory = target;
    return next;
}

std::vector<FilterState> replay(const ModelSpec& spec, std::span<const double> pi0, int a0,
                                const EventLog& log) {
    check_log(spec, log);
    Propagator prop(spec);
    FilterState state{0.0, std::vector<double>(pi0.begin(), pi0.end()), a0};

    std::vector<FilterState> out;
    out.push_back(state);
    for (const auto& e : log.events) {
        state = flow(prop, state, e.time - state.time);
        out.push_back(state);  // pre-event
        state = e.is_demand ? bayes_update(spec, state, e.mark)
                            : apply_supply(spec, state, e.supply);
        out.push_back(state);  // post-event
    }
    state = flow(prop, state, spec.horizon - state.time);
    out.push_back(state);
    return out;
}

std::vector<WeightedState> replay_unnormalized(const ModelSpec& spec,
                                               std::span<const double> pi0, int a0,
                                               const EventLog& log) {
    check_log(spec, log);
    Propagator prop(spec);
    WeightedState state{0.0, std::vector<double>(pi0.begin(), pi0.end()), a0};

    auto drift = [&prop, &state](double until) {
        if (until > state.time) {
            state.weights = prop.propagate_mass(state.weights, until - state.time);
            state.time = until;
        }
    };

    std::vector<WeightedState> out;
    out.push_back(state);
    for (const auto& e : log.events) {
        drift(e.time);
        out.push_back(state);
        if (e.is_demand) {
            double total = 0.0;
            for (int i = 0; i < spec.num_states; ++i) {
                state.weights[i] *= spec.arrival_rate[i] *
                                    mark_likelihood(spec, i, e.mark, state.inventory);
                total += state.weights[i];
            }
            if (!(total > 0.0)) throw std::runtime_error("mark has zero likelihood");
            state.inventory -= e.mark.filled;
        } else {
            state.inventory += e.supply;
            if (state.inventory < 0 || state.inventory > spec.max_inventory)
                throw std::out_of_range("supply order leaves inventory out of range");
        }
        out.push_back(state);
    }
    drift(spec.horizon);
    out.push_back(state);
    return out;
}

std::vector<FilterState> grid_reference_filter(const ModelSpec& spec,
                                               std::span<const double> pi0, int a0,
                                               const EventLog& log, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    check_log(spec, log);

    SquareMatrix q(spec.num_states);
    for (int i = 0; i < spec.num_states; ++i)
        for (int j = 0; j < spec.num_states; ++j) q.at(i, j) = spec.generator[j][i];
    const SquareMatrix trans = matrix_exponential(q, delta);  // already transposed

    std::vector<double> belief(pi0.begin(), pi0.end());
    int inventory = a0;
    std::vector<FilterState> out;
    out.push_back(FilterState{0.0, belief, inventory});

    const long n_steps = std::lround(std::ceil(spec.horizon / delta - 1e-9));
    size_t next_event = 0;
    for (long step = 0; step < n_steps; ++step) {
        const double t_end = std::min((step + 1) * delta, spec.horizon);
        belief = mat_vec(trans, belief);

        // Supplies scheduled in this step move inventory only.
        while (next_event < log.events.size() && !log.events[next_event].is_demand &&
               log.events[next_event].time <= t_end + 1e-15) {
            inventory += log.events[next_event].supply;
            ++next_event;
        }

        const bool arrival = next_event < log.events.size() &&
                             log.events[next_event].is_demand &&
                             log.events[next_event].time <= t_end + 1e-15;
        if (arrival) {
            out.push_back(FilterState{t_end, belief, inventory});  // pre-mark
            const Mark& mark = log.events[next_event].mark;
            for (int i = 0; i < spec.num_states; ++i)
                belief[i] *= spec.arrival_rate[i] * delta *
                             mark_likelihood(spec, i, mark, inventory);
            renormalize(belief);
            inventory -= mark.filled;
            ++next_event;
            // Post-arrival supplies at the same timestamp (e.g. reorder on
            // stock-out) land in the same step.
            while (next_event < log.events.size() && !log.events[next_event].is_demand &&
                   log.events[next_event].time <= t_end + 1e-15) {
                inventory += log.events[next_event].supply;
                ++next_event;
            }
            out.push_back(FilterState{t_end, belief, inventory});  // post-mark
        } else {
            for (int i = 0; i < spec.num_states; ++i)
                belief[i] *= std::exp(-spec.arrival_rate[i] * delta);
            renormalize(belief);
        }
    }
    out.push_back(FilterState{spec.horizon, belief, inventory});
    return out;
}

namespace {

using nlohmann::json;

}  // namespace

std::string event_log_to_jsonl(const EventLog& log) {
    std::string out;
    for (const auto& e : log.events) {
        json j;
        j["t"] = e.time;
        if (e.is_demand) {
            j["kind"] = "demand";
            j["z1"] = e.mark.filled;
            if (e.mark.kind == MarkKind::Stockout) {
                j["z2"] = "stockout";
            } else {
                j["z2"] = "full";
                j["y"] = e.mark.demand;
            }
        } else {
            j["kind"] = "supply";
            j["xi"] = e.supply;
        }
        out += j.dump();
        out += '\n';
    }
    return out;
}

EventLog event_log_from_jsonl(const std::string& text) {
    EventLog log;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error("event log line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
        LogEvent event;
        event.time = j.at("t").get<double>();
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "demand") {
            event.is_demand = true;
            event.mark.filled = j.at("z1").get<int>();
            const std::string z2 = j.at("z2").get<std::string>();
            if (z2 == "stockout") {
                event.mark.kind = MarkKind::Stockout;
            } else if (z2 == "full") {
                event.mark.kind = MarkKind::Full;
                event.mark.demand = j.at("y").get<int>();
            } else {
                throw std::runtime_error("event log line " + std::to_string(line_no) +
                                         ": z2 must be \"full\" or \"stockout\"");
            }
        } else if (kind == "supply") {
            event.supply = j.at("xi").get<int>();
        } else {
            throw std::runtime_error("event log line " + std::to_string(line_no) +
                                     ": kind must be \"demand\" or \"supply\"");
        }
        log.events.push_back(event);
    }
    return log;
}

EventLog load_event_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open event log: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return event_log_from_jsonl(buf.str());
}

void save_event_log(const EventLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write event log: " + path);
    out << event_log_to_jsonl(log);
}

void write_trajectory_csv(std::ostream& out, const std::vector<FilterState>& states) {
    if (states.empty()) return;
    out << "t";
    for (size_t i = 1; i <= states.front().belief.size(); ++i) out << ",pi_" << i;
    out << ",P\n";
    out.precision(17);
    for (const auto& s : states) {
        out << s.time;
        for (double v : s.belief) out << ',' << v;
        out << ',' << s.inventory << '\n';
    }
}

}  // namespace invctl
