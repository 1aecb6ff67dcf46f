#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>

#include "ddl/network.hpp"
#include "ddl/rng.hpp"

using namespace ddl;

namespace {

Topology random_connected_topology(SeededRng& rng, int max_nodes) {
    const int n = 2 + static_cast<int>(rng.uniform_index(max_nodes - 1));
    std::vector<std::pair<int, int>> edges;
    // random spanning tree first, extra edges after
    for (int v = 1; v < n; ++v) {
        edges.emplace_back(v, static_cast<int>(rng.uniform_index(v)));
    }
    const int extra = static_cast<int>(rng.uniform_index(n + 1));
    for (int e = 0; e < extra; ++e) {
        int a = static_cast<int>(rng.uniform_index(n));
        int b = static_cast<int>(rng.uniform_index(n));
        if (a != b) edges.emplace_back(a, b);
    }
    return Topology::from_edges(n, edges);
}

}  // namespace

TEST_CASE("topology invariants") {
    Topology t = Topology::from_edges(3, {{0, 1}, {1, 2}});
    for (int n = 0; n < 3; ++n) {
        const auto& nb = t.neighbors(n);
        CHECK(std::binary_search(nb.begin(), nb.end(), n));  // self-loop
        for (int l : nb) {
            const auto& back = t.neighbors(l);
            CHECK(std::binary_search(back.begin(), back.end(), n));  // symmetry
        }
    }
    CHECK(t.degree(0) == 2);
    CHECK(t.degree(1) == 3);
    CHECK(t.connected());
    CHECK_FALSE(Topology::from_edges(3, {{0, 1}}).connected());
    CHECK_THROWS_AS(Topology::from_edges(2, {{0, 5}}), std::invalid_argument);
}

TEST_CASE("validate_combination accepts the ring4 matrix and identity") {
    auto [topo, a] = preset_ring4();
    CHECK_NOTHROW(validate_combination(a.weights(), topo));
    CHECK_NOTHROW(validate_combination(Matrix::Identity(4, 4), topo));
}

TEST_CASE("validate_combination rejects bad matrices") {
    Topology topo = Topology::ring(4);
    Matrix a(4, 4);
    a << 0.6, 0.2, 0.0, 0.2,
         0.2, 0.6, 0.2, 0.0,
         0.0, 0.2, 0.6, 0.2,
         0.2, 0.0, 0.2, 0.6;

    // nonzero weight across the non-edge (1,3)
    Matrix bad = a;
    bad(1, 3) = 0.2;
    bad(3, 3) = 0.4;
    CHECK_THROWS_WITH_AS(validate_combination(bad, topo),
                         doctest::Contains("non-edge"), std::invalid_argument);

    Matrix neg = a;
    neg(0, 0) = -0.1;
    neg(1, 0) = 0.9;
    CHECK_THROWS_WITH_AS(validate_combination(neg, topo),
                         doctest::Contains("negative"), std::invalid_argument);

    Matrix sum = a;
    sum(0, 0) = 0.7;
    CHECK_THROWS_WITH_AS(validate_combination(sum, topo),
                         doctest::Contains("sum"), std::invalid_argument);
}

TEST_CASE("relative degree variance weights, hand-evaluated path graph") {
    // path 0-1-2 with self-loops: degrees (2, 3, 2), all sigma^2 = 1
    Topology topo = Topology::from_edges(3, {{0, 1}, {1, 2}});
    CombinationMatrix a = relative_degree_variance_weights(topo, {1.0, 1.0, 1.0});
    CHECK(a.weights()(0, 1) == doctest::Approx(2.0 / 7.0));
    CHECK(a.weights()(1, 1) == doctest::Approx(3.0 / 7.0));
    CHECK(a.weights()(2, 1) == doctest::Approx(2.0 / 7.0));

    CombinationMatrix single = relative_degree_variance_weights(Topology::isolated(1), {2.0});
    CHECK(single.weights()(0, 0) == doctest::Approx(1.0));

    CombinationMatrix full = relative_degree_variance_weights(Topology::complete(5),
                                                              {1.0, 1.0, 1.0, 1.0, 1.0});
    CHECK((full.weights().array() - 0.2).abs().maxCoeff() < 1e-14);
}

TEST_CASE("relative degree variance columns sum to one on random graphs") {
    SeededRng rng(61);
    for (int t = 0; t < 120; ++t) {
        Topology topo = random_connected_topology(rng, 20);
        std::vector<Scalar> sigma2(topo.n_nodes());
        for (auto& s : sigma2) s = 0.1 + 2.0 * rng.uniform();
        CombinationMatrix a = relative_degree_variance_weights(topo, sigma2);
        for (int col = 0; col < topo.n_nodes(); ++col) {
            CHECK(std::abs(a.weights().col(col).sum() - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("uniform weights") {
    CHECK(uniform_weights(Topology::isolated(1)).weights()(0, 0) == doctest::Approx(1.0));

    Topology ring4 = Topology::ring(4);
    CombinationMatrix ring = uniform_weights(ring4);
    for (int col = 0; col < 4; ++col) {
        const auto& nb = ring4.neighbors(col);
        CHECK(nb.size() == 3);
        for (int row : nb) CHECK(ring.weights()(row, col) == doctest::Approx(1.0 / 3.0));
    }

    // path ends have |N| = 2
    CombinationMatrix path = uniform_weights(Topology::from_edges(3, {{0, 1}, {1, 2}}));
    CHECK(path.weights()(0, 0) == doctest::Approx(0.5));
    CHECK(path.weights()(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("preset_ring4 matches the fixed matrix exactly") {
    auto [topo, a] = preset_ring4();
    Matrix expected(4, 4);
    expected << 0.6, 0.2, 0.0, 0.2,
                0.2, 0.6, 0.2, 0.0,
                0.0, 0.2, 0.6, 0.2,
                0.2, 0.0, 0.2, 0.6;
    CHECK((a.weights() - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.weights() - a.weights().transpose()).norm() == 0.0);  // symmetric
    for (int col = 0; col < 4; ++col) CHECK(a.weights().col(col).sum() == doctest::Approx(1.0));
    for (int row = 0; row < 4; ++row) CHECK(a.weights().row(row).sum() == doctest::Approx(1.0));
    CHECK(topo.connected());
}

TEST_CASE("averaging contracts the disagreement subspace for symmetric stochastic A") {
    SeededRng rng(67);
    for (int t = 0; t < 20; ++t) {
        Topology topo = random_connected_topology(rng, 10);
        const int n = topo.n_nodes();
        // symmetrize a uniform rule: Metropolis-style weights are symmetric,
        // column stochastic, and respect the pattern
        Matrix a = Matrix::Zero(n, n);
        for (int col = 0; col < n; ++col) {
            for (int row : topo.neighbors(col)) {
                if (row == col) continue;
                a(row, col) = 1.0 / std::max(topo.degree(row), topo.degree(col));
            }
        }
        for (int col = 0; col < n; ++col) a(col, col) = 1.0 - a.col(col).sum();
        CombinationMatrix cm = validate_combination(a, topo);

        // second-largest singular value restricted to the disagreement subspace
        Matrix proj = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
        Matrix restricted = proj * cm.weights() * proj;
        Eigen::JacobiSVD<Matrix> svd(restricted);
        CHECK(svd.singularValues()(0) < 1.0 - 1e-12);
    }
}
