#include "ddl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ddl {

namespace {

// Kuhn-Munkres with potentials, O(K^3), minimizing. Returns rowsol[r] = c.
std::vector<Index> solve_assignment_min(const Matrix& cost) {
    const Index n = cost.rows();
    std::vector<Scalar> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<Index> p(n + 1, 0), way(n + 1, 0);
    for (Index i = 1; i <= n; ++i) {
        p[0] = i;
        Index j0 = 0;
        std::vector<Scalar> minv(n + 1, std::numeric_limits<Scalar>::infinity());
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            Index i0 = p[j0], j1 = 0;
            Scalar delta = std::numeric_limits<Scalar>::infinity();
            for (Index j = 1; j <= n; ++j) {
                if (used[j]) continue;
                Scalar cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (Index j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            Index j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<Index> rowsol(n, -1);
    for (Index j = 1; j <= n; ++j) {
        if (p[j]) rowsol[p[j] - 1] = j - 1;
    }
    return rowsol;
}

std::vector<Index> solve_assignment_max_greedy(const Matrix& score) {
    const Index n = score.rows();
    struct Entry {
        Scalar s;
        Index r, c;
    };
    std::vector<Entry> entries;
    entries.reserve(n * n);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c) entries.push_back({score(r, c), r, c});
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.s > b.s; });
    std::vector<Index> rowsol(n, -1);
    std::vector<char> col_used(n, 0);
    Index assigned = 0;
    for (const Entry& e : entries) {
        if (rowsol[e.r] >= 0 || col_used[e.c]) continue;
        rowsol[e.r] = e.c;
        col_used[e.c] = 1;
        if (++assigned == n) break;
    }
    return rowsol;
}

}  // namespace

AtomMatching match_atoms(const Dictionary& d1, const Dictionary& d2) {
    require(d1.patch_dim() == d2.patch_dim() && d1.num_atoms() == d2.num_atoms(),
            "match_atoms: dictionaries must share p and K");
    const Index k = d1.num_atoms();
    const Matrix corr = d1.atoms.transpose() * d2.atoms;
    const Matrix score = corr.cwiseAbs();

    AtomMatching out;
    out.permutation = k > 512 ? solve_assignment_max_greedy(score)
                              : solve_assignment_min(Matrix(-score));
    out.signs.resize(k);
    Scalar total = 0.0;
    for (Index i = 0; i < k; ++i) {
        const Index j = out.permutation[i];
        out.signs[i] = corr(i, j) >= 0.0 ? 1 : -1;
        total += score(i, j);
    }
    out.total_score = total;
    out.mean_abs_correlation = total / static_cast<Scalar>(k);
    return out;
}

Scalar dictionary_distance(const Dictionary& d1, const Dictionary& d2) {
    const AtomMatching m = match_atoms(d1, d2);
    const Index k = d1.num_atoms();
    Scalar sum = 0.0;
    for (Index i = 0; i < k; ++i) {
        sum += (d1.atoms.col(i) -
                static_cast<Scalar>(m.signs[i]) * d2.atoms.col(m.permutation[i]))
                   .norm();
    }
    return sum / static_cast<Scalar>(k);
}

Scalar reconstruction_mse(const Eigen::Ref<const Matrix>& Y, const Eigen::Ref<const Matrix>& D,
                          const Eigen::Ref<const Matrix>& X) {
    require(D.rows() == Y.rows() && X.rows() == D.cols() && X.cols() == Y.cols(),
            "reconstruction_mse: shapes do not conform");
    return (Y - D * X).squaredNorm() / static_cast<Scalar>(Y.rows() * Y.cols());
}

Scalar consensus_disagreement(const std::vector<Dictionary>& dicts) {
    if (dicts.size() < 2) return 0.0;
    const Scalar root_k = std::sqrt(static_cast<Scalar>(dicts[0].num_atoms()));
    Scalar worst = 0.0;
    for (std::size_t a = 0; a < dicts.size(); ++a) {
        for (std::size_t b = a + 1; b < dicts.size(); ++b) {
            worst = std::max(worst, (dicts[a].atoms - dicts[b].atoms).norm() / root_k);
        }
    }
    return worst;
}

Scalar consensus_disagreement_matched(const std::vector<Dictionary>& dicts) {
    if (dicts.size() < 2) return 0.0;
    Scalar worst = 0.0;
    for (std::size_t a = 0; a < dicts.size(); ++a) {
        for (std::size_t b = a + 1; b < dicts.size(); ++b) {
            worst = std::max(worst, dictionary_distance(dicts[a], dicts[b]));
        }
    }
    return worst;
}

}  // namespace ddl
