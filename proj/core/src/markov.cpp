#include "invctl/markov.hpp"

#include <cmath>
#include <stdexcept>

namespace invctl {

void renormalize(std::span<double> belief) {
    double total = 0.0;
    for (double& v : belief) {
        if (v < 0.0 && v > -1e-12) v = 0.0;  // absorb rounding
        total += v;
    }
    if (!(total > 0.0) || !std::isfinite(total))
        throw std::runtime_error("belief normalizer underflow");
    for (double& v : belief) v /= total;
}

bool on_simplex(std::span<const double> belief, double tol) {
    double total = 0.0;
    for (double v : belief) {
        if (v < -tol) return false;
        total += v;
    }
    return std::abs(total - 1.0) <= tol;
}

Propagator::Propagator(const ModelSpec& spec) : a_(spec.num_states) {
    for (int i = 0; i < spec.num_states; ++i) {
        for (int j = 0; j < spec.num_states; ++j) a_.at(i, j) = spec.generator[j][i];
        a_.at(i, i) -= spec.arrival_rate[i];
    }
}

std::vector<double> Propagator::propagate_mass(std::span<const double> pi, double t) const {
    if (t < 0.0) throw std::invalid_argument("negative propagation time");
    if (t == 0.0) return std::vector<double>(pi.begin(), pi.end());
    const SquareMatrix e = matrix_exponential(a_, t);
    std::vector<double> mass = mat_vec(e, pi);
    for (double& v : mass)
        if (v < 0.0) v = 0.0;  // clip exp() rounding
    return mass;
}

double Propagator::survival(std::span<const double> pi, double t) const {
    const auto mass = propagate_mass(pi, t);
    double s = 0.0;
    for (double v : mass) s += v;
    return s;
}

std::vector<double> Propagator::flow(std::span<const double> pi, double t) const {
    auto mass = propagate_mass(pi, t);
    renormalize(mass);
    return mass;
}

StepCache::StepCache(const Propagator& prop, double dt)
    : step_(matrix_exponential(prop.matrix(), dt)), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
}

void StepCache::advance(std::vector<double>& mass) const {
    static thread_local std::vector<double> scratch;
    scratch.assign(mass.begin(), mass.end());
    mat_vec(step_, scratch, mass);
    for (double& v : mass)
        if (v < 0.0) v = 0.0;
}

}  // namespace invctl
