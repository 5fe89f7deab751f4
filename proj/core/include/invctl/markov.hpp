#pragma once

#include <span>
#include <vector>

#include "invctl/linalg.hpp"
#include "invctl/model.hpp"

namespace invctl {

// Renormalizes a nonnegative vector to the probability simplex in place.
// Throws when the total mass underflows.
void renormalize(std::span<double> belief);

bool on_simplex(std::span<const double> belief, double tol = 1e-10);

// Deterministic belief dynamics between demand arrivals. Everything is a
// function of A = Q^T - diag(lambda): the joint mass of {state == i, no
// arrival yet} evolves linearly as exp(At) pi.
class Propagator {
  public:
    explicit Propagator(const ModelSpec& spec);

    int dim() const { return a_.n; }

    // exp(At) pi; entries in [0,1], componentwise mass of "in state i and no
    // arrival by t".
    std::vector<double> propagate_mass(std::span<const double> pi, double t) const;

    // P{no arrival within t | beliefs pi} = sum_i propagate_mass(pi,t)_i.
    double survival(std::span<const double> pi, double t) const;

    // Belief after t units without an arrival: propagate_mass normalized.
    std::vector<double> flow(std::span<const double> pi, double t) const;

    const SquareMatrix& matrix() const { return a_; }

  private:
    SquareMatrix a_;
};

// Cached single-step transition exp(A dt) for uniform-grid sweeps.
class StepCache {
  public:
    StepCache(const Propagator& prop, double dt);

    double dt() const { return dt_; }
    // mass <- exp(A dt) mass
    void advance(std::vector<double>& mass) const;

  private:
    SquareMatrix step_;
    double dt_;
};

}  // namespace invctl
