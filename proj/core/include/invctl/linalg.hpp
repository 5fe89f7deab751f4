#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace invctl {

// Dense row-major square matrix; sized for small hidden-state counts (n <= 8
// in practice, nothing enforces that here).
struct SquareMatrix {
    int n = 0;
    std::vector<double> a;

    SquareMatrix() = default;
    explicit SquareMatrix(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, 0.0) {}

    double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

    static SquareMatrix identity(int dim);
};

SquareMatrix operator*(const SquareMatrix& lhs, const SquareMatrix& rhs);

// y = M x
void mat_vec(const SquareMatrix& m, std::span<const double> x, std::span<double> y);
std::vector<double> mat_vec(const SquareMatrix& m, std::span<const double> x);

// Solves A X = B for X with partial pivoting; throws on singular A.
SquareMatrix solve(SquareMatrix a, const SquareMatrix& b);

// exp(A t) by scaling-and-squaring with a degree-13 Pade approximant.
// Throws on non-finite input.
SquareMatrix matrix_exponential(const SquareMatrix& a, double t);

}  // namespace invctl
