#include <doctest.h>

#include <cmath>

#include "ddl/linalg.hpp"
#include "ddl/rng.hpp"

using namespace ddl;

namespace {

Matrix random_matrix(SeededRng& rng, Index r, Index c) {
    Matrix m(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i) m(i, j) = rng.gaussian();
    return m;
}

// Independent oracle: top eigenvalue of a symmetric 3x3 via the closed-form
// (trigonometric) solution of the characteristic cubic.
Scalar top_eigenvalue_3x3_cubic(const Matrix& a) {
    const Scalar p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    if (p1 == 0.0) return a.diagonal().maxCoeff();
    const Scalar q = a.trace() / 3.0;
    const Scalar p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                      (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
    const Scalar p = std::sqrt(p2 / 6.0);
    Matrix b = (a - q * Matrix::Identity(3, 3)) / p;
    Scalar r = b.determinant() / 2.0;
    r = std::clamp(r, -1.0, 1.0);
    const Scalar phi = std::acos(r) / 3.0;
    return q + 2.0 * p * std::cos(phi);
}

}  // namespace

TEST_CASE("frobenius_norm basics") {
    Matrix m(1, 2);
    m << 3.0, 4.0;
    CHECK(frobenius_norm(m) == doctest::Approx(5.0));
    CHECK(frobenius_norm(Matrix::Zero(2, 2)) == 0.0);
    CHECK(frobenius_norm(Matrix::Identity(3, 3)) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("frobenius_norm triangle inequality on random matrices") {
    SeededRng rng(11);
    for (int t = 0; t < 50; ++t) {
        Matrix a = random_matrix(rng, 5, 7);
        Matrix b = random_matrix(rng, 5, 7);
        CHECK(frobenius_norm((a + b).eval()) <= frobenius_norm(a) + frobenius_norm(b) + 1e-12);
    }
}

TEST_CASE("largest_eigenvalue_spd on simple matrices") {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 2.0;
    CHECK(largest_eigenvalue_spd(d) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(largest_eigenvalue_spd(Matrix::Zero(2, 2)) == 0.0);
    CHECK_THROWS_AS(largest_eigenvalue_spd(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("largest_eigenvalue_spd matches the closed-form cubic on 3x3 Grams") {
    SeededRng rng(7);
    for (int t = 0; t < 25; ++t) {
        Matrix g = random_matrix(rng, 3, 3);
        Matrix gram = g.transpose() * g;
        const Scalar oracle = top_eigenvalue_3x3_cubic(gram);
        const Scalar got = largest_eigenvalue_spd(gram, 1e-12, 20000);
        CHECK(got == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("largest_eigenvalue_spd bounded by the Frobenius norm for PSD input") {
    SeededRng rng(23);
    for (int t = 0; t < 25; ++t) {
        Matrix g = random_matrix(rng, 4, 6);
        Matrix gram = g * g.transpose();
        CHECK(largest_eigenvalue_spd(gram) <= frobenius_norm(gram) * (1.0 + 1e-10));
    }
}

TEST_CASE("solve_gram identity and scalar cases") {
    Matrix b(2, 2);
    b << 1.0, 2.0, 3.0, 4.0;
    Matrix m = solve_gram(Matrix::Identity(2, 2), b, 0.0);
    CHECK((m - b).norm() == doctest::Approx(0.0));

    Matrix g1(1, 1), b1(1, 1);
    g1 << 2.0;
    b1 << 3.0;
    CHECK(solve_gram(g1, b1, 0.0)(0, 0) == doctest::Approx(1.5));

    Matrix g0 = Matrix::Zero(1, 1), bz = Matrix::Ones(1, 1);
    CHECK_THROWS_AS(solve_gram(g0, bz, 0.0), SingularGramError);
    CHECK(std::isfinite(solve_gram(g0, bz, 1e-6)(0, 0)));
}

TEST_CASE("solve_gram residual on random nonsingular systems") {
    SeededRng rng(31);
    for (int t = 0; t < 25; ++t) {
        Matrix x = random_matrix(rng, 5, 12);
        Matrix gram = x * x.transpose();
        Matrix b = random_matrix(rng, 3, 5);
        Matrix m = solve_gram(gram, b, 0.0);
        CHECK((m * gram - b).norm() < 1e-8 * b.norm());
    }
}

TEST_CASE("normalize_columns scales and flags") {
    Matrix m(2, 3);
    m << 3.0, 0.6, 0.0,
         4.0, 0.8, 0.0;
    auto result = normalize_columns(m, 1e-12);
    CHECK(result.normalized(0, 0) == doctest::Approx(0.6));
    CHECK(result.normalized(1, 0) == doctest::Approx(0.8));
    // already-unit column untouched beyond rounding
    CHECK(std::abs(result.normalized(0, 1) - 0.6) < 1e-15);
    CHECK(std::abs(result.normalized(1, 1) - 0.8) < 1e-15);
    REQUIRE(result.zero_columns.size() == 1);
    CHECK(result.zero_columns[0] == 2);
    CHECK(result.normalized.col(2).norm() == 0.0);
}

TEST_CASE("normalize_columns output has unit columns") {
    SeededRng rng(47);
    Matrix m = random_matrix(rng, 6, 10);
    auto result = normalize_columns(m);
    REQUIRE(result.zero_columns.empty());
    for (Index j = 0; j < m.cols(); ++j) {
        CHECK(std::abs(result.normalized.col(j).norm() - 1.0) < 1e-12);
    }
}
