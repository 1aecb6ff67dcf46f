// Dictionary half of the block coordinate descent: gradient step, MOD
// (exact least-squares) update, and normalization with dead-atom repair.
#pragma once

#include "ddl/linalg.hpp"
#include "ddl/rng.hpp"
#include "ddl/types.hpp"

namespace ddl {

// p x K matrix whose columns (atoms) carry unit L2 norm after any public
// update. K > p is the expected redundant regime.
struct Dictionary {
    Matrix atoms;

    Dictionary() = default;
    explicit Dictionary(Matrix a) : atoms(std::move(a)) {}

    Index patch_dim() const { return atoms.rows(); }   // p
    Index num_atoms() const { return atoms.cols(); }   // K

    bool columns_normalized(Scalar tol = 1e-10) const {
        for (Index j = 0; j < atoms.cols(); ++j) {
            if (std::abs(atoms.col(j).norm() - 1.0) > tol) return false;
        }
        return true;
    }
};

enum class DictRule { gradient, mod };
enum class DeadAtomPolicy { reseed_from_data, keep };

struct DictUpdateConfig {
    DictRule rule = DictRule::gradient;
    Scalar eta = 0.0;      // explicit gradient step; used only when !eta_auto
    bool eta_auto = true;  // eta = 0.9 * max_eta(X), recomputed per call
    Scalar zero_tol = 1e-12;
    DeadAtomPolicy dead_atom_policy = DeadAtomPolicy::reseed_from_data;
    Scalar mod_ridge = -1.0;  // < 0: retry with 1e-10 tr(XX^T)/K when the Gram is singular
};

// 2 / lambda_max(X X^T), the open upper bound for the gradient step eta.
// Throws on all-zero X (the bound is unbounded; codes are degenerate).
Scalar max_eta(const Eigen::Ref<const Matrix>& X);

// D + eta (Y - D X) X^T, un-normalized. Enforces 0 < eta < max_eta(X).
Matrix gradient_dict_step(const Eigen::Ref<const Matrix>& Y, const Eigen::Ref<const Matrix>& D,
                          const Eigen::Ref<const Matrix>& X, Scalar eta);

// Y X^T (X X^T + ridge I)^{-1}, the exact minimizer of (1/2)||Y - D X||_F^2
// when ridge = 0. Throws SingularGramError for a singular Gram with ridge = 0.
Matrix mod_update(const Eigen::Ref<const Matrix>& Y, const Eigen::Ref<const Matrix>& X,
                  Scalar ridge = 0.0);

// Column normalization plus dead-atom repair: near-zero columns are replaced
// by a random normalized observation from Y_local (reseed_from_data) or left
// alone (keep).
Dictionary finish_update(const Eigen::Ref<const Matrix>& D_raw,
                         const Eigen::Ref<const Matrix>& Y_local,
                         const DictUpdateConfig& cfg, SeededRng& rng);

}  // namespace ddl
