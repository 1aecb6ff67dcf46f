// L1-penalized sparse representation by iterated soft thresholding
// (forward-backward splitting) with the dictionary held fixed.
//
// Two operator variants are supported. The default multiplies the gradient
// step by lambda*mu and thresholds at lambda*mu:
//
//     X <- SoftThreshold_{lambda mu}( X + lambda mu D^T (Y - D X) )
//
// which is forward-backward splitting with step lambda*mu on the objective
// (1/2)||Y - D X||_F^2 + ||X||_1. Setting `standard_ista` switches to the
// textbook operator (gradient step mu, threshold lambda*mu), whose descent
// objective is (1/2)||Y - D X||_F^2 + lambda ||X||_1. Use
// effective_l1_weight() to evaluate the objective the active variant actually
// descends.
#pragma once

#include <cmath>

#include "ddl/linalg.hpp"
#include "ddl/types.hpp"

namespace ddl {

struct SparseCodingConfig {
    Scalar lambda = 0.1;  // L1 penalty weight
    Scalar mu = 0.0;      // explicit gradient step; used only when !mu_auto
    bool mu_auto = true;  // mu = 0.99 / ||D||_F^2
    int inner_iters = 30;
    bool standard_ista = false;
    bool early_stop = false;  // optional stop on small relative code change
    Scalar early_stop_tol = 1e-8;
};

// Shrinkage operator sign(x) * max(|x| - tau, 0), the proximal map of tau|.|.
inline Scalar soft_threshold(Scalar x, Scalar tau) {
    const Scalar mag = std::abs(x) - tau;
    return mag > 0.0 ? (x > 0.0 ? mag : -mag) : 0.0;
}

template <typename Derived>
typename Derived::PlainObject soft_threshold(const Eigen::MatrixBase<Derived>& x,
                                             Scalar tau) {
    return (x.array().sign() * (x.array().abs() - tau).max(0.0)).matrix();
}

// (1/2)||Y - D X||_F^2 + lambda * sum |X_ij|
Scalar objective_l1(const Eigen::Ref<const Matrix>& Y, const Eigen::Ref<const Matrix>& D,
                    const Eigen::Ref<const Matrix>& X, Scalar lambda);

// Step size mu resolved against a concrete dictionary: 0.99/||D||_F^2 when
// mu_auto, else the configured value checked against (0, 2/||D||_F^2).
Scalar resolve_mu(const SparseCodingConfig& cfg, const Eigen::Ref<const Matrix>& D);

// Gradient-step multiplier actually applied: lambda*mu (default operator) or
// mu (standard_ista). The threshold is lambda*mu in both variants.
Scalar effective_step(const SparseCodingConfig& cfg, Scalar mu);

// L1 weight of the objective the active operator descends: 1 for the default
// operator, lambda for standard_ista.
Scalar effective_l1_weight(const SparseCodingConfig& cfg);

// One forward-backward sweep.
Matrix ista_iteration(const Eigen::Ref<const Matrix>& Y, const Eigen::Ref<const Matrix>& D,
                      const Eigen::Ref<const Matrix>& X, const SparseCodingConfig& cfg);

// cfg.inner_iters sweeps from X0 (pass an empty X0 for the all-zero start).
Matrix sparse_code(const Eigen::Ref<const Matrix>& Y, const Eigen::Ref<const Matrix>& D,
                   const SparseCodingConfig& cfg, const Matrix& X0 = Matrix());

}  // namespace ddl
