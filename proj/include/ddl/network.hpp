// Topologies and combination matrices.
//
// Convention: entry a(l, n) of a combination matrix is the weight node n
// assigns to neighbor l's intermediate estimate, so every column sums to one
// (1^T A = 1^T) and a(l, n) = 0 off the neighbor pattern. Degrees count the
// self-loop, since every neighborhood includes the node itself.
#pragma once

#include <utility>
#include <vector>

#include "ddl/types.hpp"

namespace ddl {

class Topology {
  public:
    // Undirected edges between distinct nodes; self-loops are implicit and
    // always present. Throws on out-of-range node indices.
    static Topology from_edges(int n_nodes, const std::vector<std::pair<int, int>>& edges);
    static Topology ring(int n_nodes);
    static Topology complete(int n_nodes);
    static Topology isolated(int n_nodes);  // self-loops only

    int n_nodes() const { return static_cast<int>(nbrs_.size()); }
    // Sorted, always contains n itself.
    const std::vector<int>& neighbors(int n) const { return nbrs_.at(n); }
    int degree(int n) const { return static_cast<int>(nbrs_.at(n).size()); }
    bool connected() const;
    std::vector<std::pair<int, int>> edges() const;  // without self-loops, l < n

  private:
    std::vector<std::vector<int>> nbrs_;
};

// Nonnegative weights on the topology's sparsity pattern with unit column
// sums; construct through validate_combination or one of the weight rules.
class CombinationMatrix {
  public:
    const Matrix& weights() const { return a_; }
    int n_nodes() const { return static_cast<int>(a_.cols()); }

  private:
    friend CombinationMatrix validate_combination(const Matrix&, const Topology&);
    explicit CombinationMatrix(Matrix a) : a_(std::move(a)) {}
    Matrix a_;
};

// Checks nonnegativity, the sparsity pattern against topo, and column sums
// (tolerance 1e-12); throws std::invalid_argument on any violation.
CombinationMatrix validate_combination(const Matrix& A, const Topology& topo);

// a(l, n) = 1 / |N_n| for l in N_n.
CombinationMatrix uniform_weights(const Topology& topo);

// a(l, n) = nu_l sigma2_l / sum_{m in N_n} nu_m sigma2_m for l in N_n, the
// relative-degree-variance rule. All sigma2 must be positive.
CombinationMatrix relative_degree_variance_weights(const Topology& topo,
                                                   const std::vector<Scalar>& sigma2);

// The 4-node cycle with the fixed symmetric weight matrix
// [.6 .2 0 .2; .2 .6 .2 0; 0 .2 .6 .2; .2 0 .2 .6].
std::pair<Topology, CombinationMatrix> preset_ring4();

}  // namespace ddl
