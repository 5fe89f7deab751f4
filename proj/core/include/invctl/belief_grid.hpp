#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace invctl {

inline constexpr int kMaxStates = 8;

// Up to kMaxStates vertices and barycentric weights of the simplex cell
// containing a query belief.
struct Stencil {
    std::array<int, kMaxStates> node{};
    std::array<double, kMaxStates> weight{};
    int size = 0;

    double interpolate(std::span<const double> values) const {
        double s = 0.0;
        for (int v = 0; v < size; ++v) s += weight[v] * values[node[v]];
        return s;
    }
    // values laid out with a stride between node entries
    double interpolate(const double* values, int stride) const {
        double s = 0.0;
        for (int v = 0; v < size; ++v)
            s += weight[v] * values[static_cast<size_t>(node[v]) * stride];
        return s;
    }
};

// Regular lattice on the probability simplex with dim coordinates: nodes are
// all integer compositions of `resolution`, triangulated into Kuhn simplices
// so that locate() yields nonnegative weights summing to one, exact at nodes
// and linear-precise inside cells.
class BeliefGrid {
  public:
    BeliefGrid(int dim, int resolution);

    int dim() const { return dim_; }
    int resolution() const { return resolution_; }
    int num_nodes() const { return static_cast<int>(coords_.size()); }

    std::span<const double> belief(int node) const {
        return {beliefs_.data() + static_cast<size_t>(node) * dim_, static_cast<size_t>(dim_)};
    }
    std::span<const int> coords(int node) const {
        return {coords_[node].data(), static_cast<size_t>(dim_)};
    }

    int node_index(std::span<const int> coords) const;

    Stencil locate(std::span<const double> belief) const;

  private:
    int dim_;
    int resolution_;
    std::vector<std::vector<int>> coords_;
    std::vector<double> beliefs_;  // num_nodes x dim
    std::unordered_map<std::uint64_t, int> index_;

    std::uint64_t key(std::span<const int> coords) const;
};

}  // namespace invctl
