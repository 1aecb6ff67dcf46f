#include "ddl/network.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace ddl {

Topology Topology::from_edges(int n_nodes, const std::vector<std::pair<int, int>>& edges) {
    require(n_nodes >= 1, "topology: need at least one node");
    std::vector<std::set<int>> nbrs(n_nodes);
    for (int n = 0; n < n_nodes; ++n) nbrs[n].insert(n);
    for (const auto& [a, b] : edges) {
        require(a >= 0 && a < n_nodes && b >= 0 && b < n_nodes,
                "topology: edge endpoint out of range");
        nbrs[a].insert(b);
        nbrs[b].insert(a);
    }
    Topology t;
    t.nbrs_.reserve(n_nodes);
    for (auto& s : nbrs) t.nbrs_.emplace_back(s.begin(), s.end());
    return t;
}

Topology Topology::ring(int n_nodes) {
    std::vector<std::pair<int, int>> edges;
    for (int n = 0; n + 1 < n_nodes; ++n) edges.emplace_back(n, n + 1);
    if (n_nodes > 2) edges.emplace_back(n_nodes - 1, 0);
    return from_edges(n_nodes, edges);
}

Topology Topology::complete(int n_nodes) {
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n_nodes; ++a)
        for (int b = a + 1; b < n_nodes; ++b) edges.emplace_back(a, b);
    return from_edges(n_nodes, edges);
}

Topology Topology::isolated(int n_nodes) { return from_edges(n_nodes, {}); }

bool Topology::connected() const {
    const int n = n_nodes();
    std::vector<char> seen(n, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : nbrs_[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

std::vector<std::pair<int, int>> Topology::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int n = 0; n < n_nodes(); ++n) {
        for (int l : nbrs_[n]) {
            if (l < n) out.emplace_back(l, n);
        }
    }
    return out;
}

CombinationMatrix validate_combination(const Matrix& A, const Topology& topo) {
    const int n = topo.n_nodes();
    require(A.rows() == n && A.cols() == n, "combination: matrix size must match topology");
    for (int col = 0; col < n; ++col) {
        const auto& nbrs = topo.neighbors(col);
        for (int row = 0; row < n; ++row) {
            const Scalar w = A(row, col);
            if (w < 0.0) {
                throw std::invalid_argument("combination: negative weight at (" +
                                            std::to_string(row) + "," + std::to_string(col) + ")");
            }
            const bool edge = std::binary_search(nbrs.begin(), nbrs.end(), row);
            if (!edge && w != 0.0) {
                throw std::invalid_argument("combination: nonzero weight across non-edge (" +
                                            std::to_string(row) + "," + std::to_string(col) + ")");
            }
        }
        if (std::abs(A.col(col).sum() - 1.0) > 1e-12) {
            throw std::invalid_argument("combination: column " + std::to_string(col) +
                                        " does not sum to 1");
        }
    }
    return CombinationMatrix(A);
}

CombinationMatrix uniform_weights(const Topology& topo) {
    const int n = topo.n_nodes();
    Matrix A = Matrix::Zero(n, n);
    for (int col = 0; col < n; ++col) {
        const auto& nbrs = topo.neighbors(col);
        const Scalar w = 1.0 / static_cast<Scalar>(nbrs.size());
        for (int row : nbrs) A(row, col) = w;
    }
    return validate_combination(A, topo);
}

CombinationMatrix relative_degree_variance_weights(const Topology& topo,
                                                   const std::vector<Scalar>& sigma2) {
    const int n = topo.n_nodes();
    require(static_cast<int>(sigma2.size()) == n,
            "relative_degree_variance: need one sigma^2 per node");
    for (Scalar s : sigma2) require(s > 0.0, "relative_degree_variance: sigma^2 must be positive");

    Matrix A = Matrix::Zero(n, n);
    for (int col = 0; col < n; ++col) {
        const auto& nbrs = topo.neighbors(col);
        Scalar denom = 0.0;
        for (int m : nbrs) denom += topo.degree(m) * sigma2[m];
        for (int row : nbrs) A(row, col) = topo.degree(row) * sigma2[row] / denom;
        A.col(col) /= A.col(col).sum();  // absorb rounding residue
    }
    return validate_combination(A, topo);
}

std::pair<Topology, CombinationMatrix> preset_ring4() {
    Topology topo = Topology::ring(4);
    Matrix A(4, 4);
    A << 0.6, 0.2, 0.0, 0.2,
         0.2, 0.6, 0.2, 0.0,
         0.0, 0.2, 0.6, 0.2,
         0.2, 0.0, 0.2, 0.6;
    return {topo, validate_combination(A, topo)};
}

}  // namespace ddl
