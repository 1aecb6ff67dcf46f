// Common scalar/matrix aliases and error types shared by every module.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ddl {

using Scalar = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Gram matrix is singular and no ridge was supplied; callers may retry with ridge > 0.
struct SingularGramError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A gradient step size violates its stability bound.
struct StepSizeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Power iteration failed to converge within the iteration budget.
struct EigenConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterate norm blew past the configured divergence ceiling.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.allFinite();
}

}  // namespace ddl
