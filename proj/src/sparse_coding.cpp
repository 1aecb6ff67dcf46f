#include "ddl/sparse_coding.hpp"

namespace ddl {

namespace {

void check_shapes(const Eigen::Ref<const Matrix>& Y, const Eigen::Ref<const Matrix>& D,
                  const Eigen::Ref<const Matrix>& X) {
    require(D.rows() == Y.rows(), "sparse_coding: D and Y row counts differ");
    require(X.rows() == D.cols(), "sparse_coding: X rows must equal atom count");
    require(X.cols() == Y.cols(), "sparse_coding: X and Y column counts differ");
}

}  // namespace

Scalar objective_l1(const Eigen::Ref<const Matrix>& Y, const Eigen::Ref<const Matrix>& D,
                    const Eigen::Ref<const Matrix>& X, Scalar lambda) {
    check_shapes(Y, D, X);
    return 0.5 * (Y - D * X).squaredNorm() + lambda * X.template lpNorm<1>();
}

Scalar resolve_mu(const SparseCodingConfig& cfg, const Eigen::Ref<const Matrix>& D) {
    const Scalar dfro2 = D.squaredNorm();
    if (cfg.mu_auto) {
        require(dfro2 > 0.0, "sparse_coding: cannot derive mu from an all-zero dictionary");
        return 0.99 / dfro2;
    }
    if (!(cfg.mu > 0.0) || !(cfg.mu * dfro2 < 2.0)) {
        throw StepSizeError("sparse_coding: mu outside (0, 2/||D||_F^2)");
    }
    return cfg.mu;
}

Scalar effective_step(const SparseCodingConfig& cfg, Scalar mu) {
    return cfg.standard_ista ? mu : cfg.lambda * mu;
}

Scalar effective_l1_weight(const SparseCodingConfig& cfg) {
    return cfg.standard_ista ? cfg.lambda : 1.0;
}

Matrix ista_iteration(const Eigen::Ref<const Matrix>& Y, const Eigen::Ref<const Matrix>& D,
                      const Eigen::Ref<const Matrix>& X, const SparseCodingConfig& cfg) {
    check_shapes(Y, D, X);
    require(cfg.lambda >= 0.0, "sparse_coding: lambda must be nonnegative");
    const Scalar mu = resolve_mu(cfg, D);
    const Scalar step = effective_step(cfg, mu);
    const Scalar tau = cfg.lambda * mu;
    return soft_threshold((X + step * (D.transpose() * (Y - D * X))).eval(), tau);
}

Matrix sparse_code(const Eigen::Ref<const Matrix>& Y, const Eigen::Ref<const Matrix>& D,
                   const SparseCodingConfig& cfg, const Matrix& X0) {
    require(cfg.inner_iters >= 1, "sparse_coding: inner_iters must be >= 1");
    Matrix X = X0.size() == 0 ? Matrix::Zero(D.cols(), Y.cols()) : X0;
    check_shapes(Y, D, X);

    const Scalar mu = resolve_mu(cfg, D);
    const Scalar step = effective_step(cfg, mu);
    const Scalar tau = cfg.lambda * mu;

    Matrix next;
    for (int t = 0; t < cfg.inner_iters; ++t) {
        next = soft_threshold((X + step * (D.transpose() * (Y - D * X))).eval(), tau);
        if (cfg.early_stop) {
            const Scalar denom = std::max(X.norm(), Scalar(1e-300));
            if ((next - X).norm() < cfg.early_stop_tol * denom) {
                X.swap(next);
                break;
            }
        }
        X.swap(next);
    }
    return X;
}

}  // namespace ddl
