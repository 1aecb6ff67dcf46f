#include "ddl/dict_update.hpp"

namespace ddl {

namespace {

// lambda_max of the smaller Gram of X (they share nonzero spectrum), with the
// Frobenius upper bound as fallback if power iteration stalls.
Scalar gram_lambda_max(const Eigen::Ref<const Matrix>& X) {
    const Matrix g = X.rows() <= X.cols() ? Matrix(X * X.transpose())
                                          : Matrix(X.transpose() * X);
    try {
        return largest_eigenvalue_spd(g, 1e-10, 10000);
    } catch (const EigenConvergenceError&) {
        return g.norm();
    }
}

}  // namespace

Scalar max_eta(const Eigen::Ref<const Matrix>& X) {
    const Scalar lmax = gram_lambda_max(X);
    if (lmax <= 0.0) {
        throw std::invalid_argument("max_eta: all-zero codes, step bound is unbounded");
    }
    return 2.0 / lmax;
}

Matrix gradient_dict_step(const Eigen::Ref<const Matrix>& Y, const Eigen::Ref<const Matrix>& D,
                          const Eigen::Ref<const Matrix>& X, Scalar eta) {
    require(D.rows() == Y.rows(), "gradient_dict_step: D and Y row counts differ");
    require(X.rows() == D.cols(), "gradient_dict_step: X rows must equal atom count");
    require(X.cols() == Y.cols(), "gradient_dict_step: X and Y column counts differ");
    if (!(eta > 0.0)) throw StepSizeError("gradient_dict_step: eta must be positive");
    const Scalar lmax = gram_lambda_max(X);
    if (lmax > 0.0 && !(eta * lmax < 2.0)) {
        throw StepSizeError("gradient_dict_step: eta outside (0, 2/lambda_max(X X^T))");
    }
    return D + eta * (Y - D * X) * X.transpose();
}

Matrix mod_update(const Eigen::Ref<const Matrix>& Y, const Eigen::Ref<const Matrix>& X,
                  Scalar ridge) {
    require(X.cols() == Y.cols(), "mod_update: X and Y column counts differ");
    const Matrix gram = X * X.transpose();
    return solve_gram(gram, Y * X.transpose(), ridge);
}

Dictionary finish_update(const Eigen::Ref<const Matrix>& D_raw,
                         const Eigen::Ref<const Matrix>& Y_local,
                         const DictUpdateConfig& cfg, SeededRng& rng) {
    ColumnNormalization norm = normalize_columns(D_raw, cfg.zero_tol);
    if (!norm.zero_columns.empty() && cfg.dead_atom_policy == DeadAtomPolicy::reseed_from_data) {
        const Index q = Y_local.cols();
        require(q > 0, "finish_update: reseed requested but local data is empty");
        for (Index dead : norm.zero_columns) {
            // Draw observations until one has usable norm; give up after a
            // full scan's worth of draws (all-zero data cannot reseed).
            bool replaced = false;
            for (Index attempt = 0; attempt < 16 * q; ++attempt) {
                const Index pick = rng.uniform_index(q);
                const Scalar n = Y_local.col(pick).norm();
                if (n > cfg.zero_tol) {
                    norm.normalized.col(dead) = Y_local.col(pick) / n;
                    replaced = true;
                    break;
                }
            }
            if (!replaced) {
                throw std::invalid_argument(
                    "finish_update: no nonzero observation available to reseed a dead atom");
            }
        }
    }
    return Dictionary(std::move(norm.normalized));
}

}  // namespace ddl
