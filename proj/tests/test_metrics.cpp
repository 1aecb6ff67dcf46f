#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddl/linalg.hpp"
#include "ddl/metrics.hpp"
#include "ddl/rng.hpp"

using namespace ddl;

namespace {

Dictionary random_dictionary(SeededRng& rng, Index p, Index k) {
    Matrix m(p, k);
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i < p; ++i) m(i, j) = rng.gaussian();
    return Dictionary(normalize_columns(m).normalized);
}

// Exhaustive oracle: best sum of |d1_k . d2_perm(k)| over all permutations.
Scalar brute_force_match_score(const Dictionary& d1, const Dictionary& d2) {
    const Index k = d1.num_atoms();
    Matrix score = (d1.atoms.transpose() * d2.atoms).cwiseAbs();
    std::vector<Index> perm(k);
    std::iota(perm.begin(), perm.end(), Index(0));
    Scalar best = -1.0;
    do {
        Scalar total = 0.0;
        for (Index i = 0; i < k; ++i) total += score(i, perm[i]);
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

Dictionary signed_permuted_copy(const Dictionary& d, SeededRng& rng, std::vector<Index>* perm_out,
                                std::vector<int>* sign_out) {
    const Index k = d.num_atoms();
    std::vector<Index> perm(k);
    std::iota(perm.begin(), perm.end(), Index(0));
    for (Index i = k - 1; i > 0; --i) {
        std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
    }
    Matrix atoms(d.patch_dim(), k);
    std::vector<int> signs(k);
    for (Index i = 0; i < k; ++i) {
        signs[i] = rng.bernoulli(0.5) ? 1 : -1;
        atoms.col(perm[i]) = static_cast<Scalar>(signs[i]) * d.atoms.col(i);
    }
    if (perm_out) *perm_out = perm;
    if (sign_out) *sign_out = signs;
    return Dictionary(atoms);
}

}  // namespace

TEST_CASE("match_atoms on identical and signed-permuted dictionaries") {
    SeededRng rng(3);
    Dictionary d = random_dictionary(rng, 6, 5);

    AtomMatching self = match_atoms(d, d);
    CHECK(self.mean_abs_correlation == doctest::Approx(1.0));
    for (Index i = 0; i < 5; ++i) {
        CHECK(self.permutation[i] == i);
        CHECK(self.signs[i] == 1);
    }

    std::vector<Index> perm;
    std::vector<int> signs;
    Dictionary shuffled = signed_permuted_copy(d, rng, &perm, &signs);
    AtomMatching m = match_atoms(d, shuffled);
    CHECK(m.mean_abs_correlation == doctest::Approx(1.0));
    for (Index i = 0; i < 5; ++i) {
        CHECK(m.permutation[i] == perm[i]);
        CHECK(m.signs[i] == signs[i]);
    }
}

TEST_CASE("match_atoms equals the exhaustive optimum for small K") {
    SeededRng rng(7);
    for (int t = 0; t < 30; ++t) {
        const Index k = 2 + static_cast<Index>(rng.uniform_index(4));  // K in [2,5]
        Dictionary d1 = random_dictionary(rng, 5, k);
        Dictionary d2 = random_dictionary(rng, 5, k);
        AtomMatching m = match_atoms(d1, d2);
        CHECK(m.total_score == doctest::Approx(brute_force_match_score(d1, d2)).epsilon(1e-12));
    }
}

TEST_CASE("greedy fallback above 512 atoms still yields a valid matching") {
    SeededRng rng(5);
    Dictionary d = random_dictionary(rng, 6, 520);
    Dictionary shuffled = signed_permuted_copy(d, rng, nullptr, nullptr);
    AtomMatching m = match_atoms(d, shuffled);
    std::vector<int> used(520, 0);
    for (Index k = 0; k < 520; ++k) ++used[m.permutation[k]];
    for (int u : used) CHECK(u == 1);
    // a signed permutation of itself is a perfect-score instance, which
    // greedy selection recovers
    CHECK(m.mean_abs_correlation == doctest::Approx(1.0));
}

TEST_CASE("dictionary_distance is zero exactly on signed permutations") {
    SeededRng rng(11);
    Dictionary d = random_dictionary(rng, 8, 6);
    CHECK(dictionary_distance(d, d) == 0.0);
    for (int t = 0; t < 20; ++t) {
        Dictionary shuffled = signed_permuted_copy(d, rng, nullptr, nullptr);
        CHECK(dictionary_distance(d, shuffled) < 1e-12);
    }
}

TEST_CASE("dictionary_distance of one rotated atom") {
    // orthonormal pairs sharing one atom; the other is orthogonal, distance sqrt(2)/K
    Matrix a(3, 2), b(3, 2);
    a << 1, 0,
         0, 1,
         0, 0;
    b << 1, 0,
         0, 0,
         0, 1;
    CHECK(dictionary_distance(Dictionary(a), Dictionary(b)) ==
          doctest::Approx(std::sqrt(2.0) / 2.0));
}

TEST_CASE("dictionary_distance behaves like a pseudometric") {
    SeededRng rng(13);
    for (int t = 0; t < 15; ++t) {
        Dictionary a = random_dictionary(rng, 6, 4);
        Dictionary b = random_dictionary(rng, 6, 4);
        Dictionary c = random_dictionary(rng, 6, 4);
        const Scalar ab = dictionary_distance(a, b);
        const Scalar ba = dictionary_distance(b, a);
        const Scalar ac = dictionary_distance(a, c);
        const Scalar cb = dictionary_distance(c, b);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-10));
        CHECK(ab <= ac + cb + 1e-10);
    }
}

TEST_CASE("reconstruction_mse basics") {
    SeededRng rng(17);
    Dictionary d = random_dictionary(rng, 4, 6);
    Matrix x(6, 3);
    x.setZero();
    x(0, 0) = 1.0;
    Matrix y = d.atoms * x;
    CHECK(reconstruction_mse(y, d.atoms, x) == 0.0);

    Matrix zero_d = Matrix::Zero(4, 6);
    CHECK(reconstruction_mse(y, zero_d, x) == doctest::Approx(y.squaredNorm() / 12.0));

    Matrix y1(1, 1), d1(1, 1), x1(1, 1);
    y1 << 2.0;
    d1 << 1.0;
    x1 << 1.0;
    CHECK(reconstruction_mse(y1, d1, x1) == doctest::Approx(1.0));
}

TEST_CASE("consensus_disagreement") {
    SeededRng rng(19);
    Dictionary d = random_dictionary(rng, 5, 4);
    CHECK(consensus_disagreement({}) == 0.0);
    CHECK(consensus_disagreement({d}) == 0.0);
    CHECK(consensus_disagreement({d, d, d}) == 0.0);

    Dictionary flipped = d;
    flipped.atoms.col(2) *= -1.0;
    CHECK(consensus_disagreement({d, flipped}) == doctest::Approx(2.0 / std::sqrt(4.0)));
    // the matched variant sees through the sign flip
    CHECK(consensus_disagreement_matched({d, flipped}) < 1e-12);
}
