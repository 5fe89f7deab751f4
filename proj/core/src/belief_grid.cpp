#include "invctl/belief_grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace invctl {

namespace {

void enumerate_compositions(int dim, int pos, int remaining, std::vector<int>& cur,
                            const std::function<void(const std::vector<int>&)>& emit) {
    if (pos == dim - 1) {
        cur[pos] = remaining;
        emit(cur);
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        cur[pos] = v;
        enumerate_compositions(dim, pos + 1, remaining - v, cur, emit);
    }
}

}  // namespace

BeliefGrid::BeliefGrid(int dim, int resolution) : dim_(dim), resolution_(resolution) {
    if (dim < 1 || dim > kMaxStates) throw std::invalid_argument("grid dim out of range");
    if (resolution < 1) throw std::invalid_argument("grid resolution must be >= 1");

    std::vector<int> cur(dim, 0);
    enumerate_compositions(dim, 0, resolution, cur, [this](const std::vector<int>& comp) {
        index_[key(comp)] = static_cast<int>(coords_.size());
        coords_.push_back(comp);
        for (int v : comp) beliefs_.push_back(static_cast<double>(v) / resolution_);
    });
}

std::uint64_t BeliefGrid::key(std::span<const int> coords) const {
    std::uint64_t k = 0;
    for (int i = 0; i < dim_; ++i)
        k = k * static_cast<std::uint64_t>(resolution_ + 1) + coords[i];
    return k;
}

int BeliefGrid::node_index(std::span<const int> coords) const {
    const auto it = index_.find(key(coords));
    if (it == index_.end()) throw std::out_of_range("coords not on grid");
    return it->second;
}

Stencil BeliefGrid::locate(std::span<const double> belief) const {
    if (static_cast<int>(belief.size()) != dim_)
        throw std::invalid_argument("belief dimension mismatch");

    if (dim_ == 1) {
        Stencil s;
        s.size = 1;
        s.node[0] = 0;
        s.weight[0] = 1.0;
        return s;
    }

    // Staircase coordinates u_i = resolution * sum_{j >= i} pi_j are
    // nonincreasing with u_0 == resolution; the Kuhn/Freudenthal cell is the
    // floor staircase plus unit bumps in decreasing order of the fractional
    // parts (Lovejoy's simplex interpolation).
    std::array<double, kMaxStates> u{};
    double tail = 0.0;
    for (int i = dim_ - 1; i >= 0; --i) {
        tail += belief[i];
        u[i] = resolution_ * tail;
    }
    u[0] = static_cast<double>(resolution_);

    std::array<int, kMaxStates> base{};
    std::array<double, kMaxStates> frac{};
    for (int i = 0; i < dim_; ++i) {
        double f = std::floor(u[i] + 1e-12);
        f = std::clamp(f, 0.0, static_cast<double>(resolution_));
        base[i] = static_cast<int>(f);
        frac[i] = std::clamp(u[i] - f, 0.0, 1.0);
        if (frac[i] < 1e-12) frac[i] = 0.0;
    }
    base[0] = resolution_;
    frac[0] = 0.0;

    // order coordinates 1..dim-1 by descending fractional part (index breaks
    // ties so the staircase stays monotone)
    std::array<int, kMaxStates> order{};
    for (int i = 0; i < dim_ - 1; ++i) order[i] = i + 1;
    std::sort(order.begin(), order.begin() + (dim_ - 1), [&frac](int a, int b) {
        if (frac[a] != frac[b]) return frac[a] > frac[b];
        return a < b;
    });

    Stencil s;
    std::array<int, kMaxStates> stair = base;
    std::array<int, kMaxStates> comp{};
    auto push_vertex = [&](double w) {
        if (w <= 1e-14) return;
        for (int i = 0; i < dim_; ++i) {
            const int next = i + 1 < dim_ ? stair[i + 1] : 0;
            comp[i] = stair[i] - next;
            if (comp[i] < 0) throw std::runtime_error("belief outside the simplex");
        }
        s.node[s.size] = node_index({comp.data(), static_cast<size_t>(dim_)});
        s.weight[s.size] = w;
        ++s.size;
    };

    double prev = 1.0;
    for (int j = 0; j < dim_ - 1; ++j) {
        const double d = frac[order[j]];
        push_vertex(prev - d);
        stair[order[j]] += 1;
        prev = d;
    }
    push_vertex(prev);

    // guard against accumulated rounding
    double total = 0.0;
    for (int v = 0; v < s.size; ++v) total += s.weight[v];
    for (int v = 0; v < s.size; ++v) s.weight[v] /= total;
    return s;
}

}  // namespace invctl
