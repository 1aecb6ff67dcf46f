// Minimal dense linear-algebra kernel: norms, top-eigenvalue bounds, Gram
// solves and column normalization. Everything downstream (sparse coding,
// dictionary updates, diffusion) builds on these four operations.
#pragma once

#include <vector>

#include "ddl/types.hpp"

namespace ddl {

// Frobenius norm, sqrt of the sum of squared entries.
template <typename Derived>
Scalar frobenius_norm(const Eigen::MatrixBase<Derived>& m) {
    return m.norm();
}

// Largest eigenvalue of a symmetric PSD matrix by power iteration with a
// deterministic start vector. Throws std::invalid_argument for non-square
// input and EigenConvergenceError when the Rayleigh quotient has not settled
// to relative tolerance `tol` within `max_iters` sweeps; callers may fall back
// to frobenius_norm(m), which upper-bounds lambda_max for PSD input.
Scalar largest_eigenvalue_spd(const Eigen::Ref<const Matrix>& m, Scalar tol = 1e-10,
                              int max_iters = 10000);

// Solves M (g + ridge I) = b for M, the (regularized) normal equations with a
// K x K symmetric PSD Gram g and a p x K right-hand side b. Uses an LDL^T
// factorization. Throws SingularGramError when g is (near-)singular and
// ridge == 0.
Matrix solve_gram(const Eigen::Ref<const Matrix>& g, const Eigen::Ref<const Matrix>& b,
                  Scalar ridge = 0.0);

struct ColumnNormalization {
    Matrix normalized;
    std::vector<Index> zero_columns;  // indices with L2 norm <= zero_tol, left untouched
};

// Rescales every column with norm > zero_tol to unit L2 norm; near-zero
// columns are reported, not repaired (the dictionary update owns that policy).
ColumnNormalization normalize_columns(const Eigen::Ref<const Matrix>& m,
                                      Scalar zero_tol = 1e-12);

}  // namespace ddl
