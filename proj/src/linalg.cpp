#include "ddl/linalg.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

namespace ddl {

Scalar largest_eigenvalue_spd(const Eigen::Ref<const Matrix>& m, Scalar tol, int max_iters) {
    const Index n = m.rows();
    require(n == m.cols(), "largest_eigenvalue_spd: matrix must be square");
    if (n == 0) return 0.0;

    const Scalar fro = m.norm();
    if (fro == 0.0) return 0.0;

    // Deterministic start: normalized ones. If the iterate ever lands in the
    // null space we restart from a basis vector, so a start vector orthogonal
    // to the top eigenspace cannot wedge the iteration.
    Vector v = Vector::Ones(n) / std::sqrt(static_cast<Scalar>(n));
    Index restart = 0;
    Scalar lambda = 0.0;
    int settled = 0;

    for (int it = 0; it < max_iters; ++it) {
        Vector w = m * v;
        Scalar wn = w.norm();
        if (wn == 0.0) {
            if (restart >= n) return 0.0;
            v = Vector::Unit(n, restart++);
            continue;
        }
        w /= wn;
        Scalar next = w.dot(m * w);
        if (it > 0 && std::abs(next - lambda) <= tol * std::max(std::abs(next), fro * 1e-16)) {
            if (++settled >= 2) return next;
        } else {
            settled = 0;
        }
        lambda = next;
        v = w;
    }
    throw EigenConvergenceError("largest_eigenvalue_spd: no convergence within max_iters");
}

Matrix solve_gram(const Eigen::Ref<const Matrix>& g, const Eigen::Ref<const Matrix>& b,
                  Scalar ridge) {
    const Index k = g.rows();
    require(k == g.cols(), "solve_gram: gram matrix must be square");
    require(b.cols() == k, "solve_gram: rhs column count must match gram size");
    require(ridge >= 0.0, "solve_gram: ridge must be nonnegative");

    Matrix reg = g;
    reg.diagonal().array() += ridge;

    Eigen::LDLT<Matrix> ldlt(reg);
    if (ridge == 0.0) {
        const Vector d = ldlt.vectorD();
        const Scalar dmax = d.maxCoeff();
        const Scalar dmin = d.minCoeff();
        const Scalar eps = std::numeric_limits<Scalar>::epsilon();
        if (dmax <= 0.0 || dmin <= static_cast<Scalar>(k) * eps * dmax) {
            throw SingularGramError("solve_gram: singular gram matrix with ridge = 0");
        }
    }
    // M (g + ridge I) = b  <=>  (g + ridge I) M^T = b^T by symmetry.
    return ldlt.solve(b.transpose()).transpose();
}

ColumnNormalization normalize_columns(const Eigen::Ref<const Matrix>& m, Scalar zero_tol) {
    ColumnNormalization out;
    out.normalized = m;
    for (Index j = 0; j < m.cols(); ++j) {
        const Scalar norm = out.normalized.col(j).norm();
        if (norm > zero_tol) {
            out.normalized.col(j) /= norm;
        } else {
            out.zero_columns.push_back(j);
        }
    }
    return out;
}

}  // namespace ddl
