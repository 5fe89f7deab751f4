#include "invctl/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace invctl {

SquareMatrix SquareMatrix::identity(int dim) {
    SquareMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
}

SquareMatrix operator*(const SquareMatrix& lhs, const SquareMatrix& rhs) {
    if (lhs.n != rhs.n) throw std::invalid_argument("matrix size mismatch");
    SquareMatrix out(lhs.n);
    for (int i = 0; i < lhs.n; ++i) {
        for (int k = 0; k < lhs.n; ++k) {
            const double v = lhs.at(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < lhs.n; ++j) out.at(i, j) += v * rhs.at(k, j);
        }
    }
    return out;
}

void mat_vec(const SquareMatrix& m, std::span<const double> x, std::span<double> y) {
    if (static_cast<int>(x.size()) != m.n || static_cast<int>(y.size()) != m.n)
        throw std::invalid_argument("vector size mismatch");
    for (int i = 0; i < m.n; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.n; ++j) s += m.at(i, j) * x[j];
        y[i] = s;
    }
}

std::vector<double> mat_vec(const SquareMatrix& m, std::span<const double> x) {
    std::vector<double> y(m.n);
    mat_vec(m, x, y);
    return y;
}

SquareMatrix solve(SquareMatrix a, const SquareMatrix& b) {
    const int n = a.n;
    if (b.n != n) throw std::invalid_argument("matrix size mismatch");
    SquareMatrix x = b;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;

    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(a.at(col, col));
        for (int r = col + 1; r < n; ++r) {
            const double v = std::abs(a.at(r, col));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) throw std::runtime_error("singular matrix in solve()");
        if (pivot != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(a.at(col, j), a.at(pivot, j));
                std::swap(x.at(col, j), x.at(pivot, j));
            }
        }
        const double inv = 1.0 / a.at(col, col);
        for (int r = col + 1; r < n; ++r) {
            const double f = a.at(r, col) * inv;
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a.at(r, j) -= f * a.at(col, j);
            for (int j = 0; j < n; ++j) x.at(r, j) -= f * x.at(col, j);
        }
    }
    for (int col = n - 1; col >= 0; --col) {
        const double inv = 1.0 / a.at(col, col);
        for (int j = 0; j < n; ++j) {
            double s = x.at(col, j);
            for (int k = col + 1; k < n; ++k) s -= a.at(col, k) * x.at(k, j);
            x.at(col, j) = s * inv;
        }
    }
    return x;
}

namespace {

double one_norm(const SquareMatrix& m) {
    double best = 0.0;
    for (int j = 0; j < m.n; ++j) {
        double s = 0.0;
        for (int i = 0; i < m.n; ++i) s += std::abs(m.at(i, j));
        best = std::max(best, s);
    }
    return best;
}

SquareMatrix scaled(const SquareMatrix& m, double f) {
    SquareMatrix out = m;
    for (double& v : out.a) v *= f;
    return out;
}

SquareMatrix add(const SquareMatrix& a, const SquareMatrix& b) {
    SquareMatrix out = a;
    for (size_t i = 0; i < out.a.size(); ++i) out.a[i] += b.a[i];
    return out;
}

}  // namespace

SquareMatrix matrix_exponential(const SquareMatrix& a, double t) {
    for (double v : a.a)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite matrix entry");
    if (!std::isfinite(t)) throw std::invalid_argument("non-finite time");

    const int n = a.n;
    SquareMatrix at = scaled(a, t);

    // Pade(13) coefficients.
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const double theta13 = 5.371920351148152;

    const double norm = one_norm(at);
    int squarings = 0;
    if (norm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
        at = scaled(at, std::ldexp(1.0, -squarings));
    }

    const SquareMatrix ident = SquareMatrix::identity(n);
    const SquareMatrix a2 = at * at;
    const SquareMatrix a4 = a2 * a2;
    const SquareMatrix a6 = a4 * a2;

    SquareMatrix w1 = add(scaled(a6, b[13]), add(scaled(a4, b[11]), scaled(a2, b[9])));
    SquareMatrix w2 = add(a6 * w1, add(scaled(a6, b[7]),
                                       add(scaled(a4, b[5]),
                                           add(scaled(a2, b[3]), scaled(ident, b[1])))));
    SquareMatrix u = at * w2;
    SquareMatrix z1 = add(scaled(a6, b[12]), add(scaled(a4, b[10]), scaled(a2, b[8])));
    SquareMatrix v = add(a6 * z1, add(scaled(a6, b[6]),
                                      add(scaled(a4, b[4]),
                                          add(scaled(a2, b[2]), scaled(ident, b[0])))));

    SquareMatrix num = add(v, u);
    SquareMatrix den = add(v, scaled(u, -1.0));
    SquareMatrix r = solve(den, num);

    for (int s = 0; s < squarings; ++s) r = r * r;
    return r;
}

}  // namespace invctl
