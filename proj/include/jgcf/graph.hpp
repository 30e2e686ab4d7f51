#ifndef JGCF_GRAPH_HPP
#define JGCF_GRAPH_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "jgcf/dataset.hpp"

namespace jgcf {

/// Symmetric bipartite adjacency in CSR. Nonzeros live only between the user
/// block [0, num_users) and the item block [num_users, n).
struct SparseAdjacency {
    int n = 0;
    int num_users = 0;
    std::vector<int> row_ptr;   // size n+1
    std::vector<int> col;       // size nnz
    std::vector<double> val;    // size nnz
    std::vector<int> degree;    // size n

    std::size_t nnz() const { return col.size(); }

    Eigen::MatrixXd to_dense() const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (int r = 0; r < n; ++r)
            for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p) m(r, col[p]) = val[p];
        return m;
    }
};

/// Same layout with values 1/sqrt(D_ii * D_jj). Symmetric by construction,
/// spectrum contained in [-1, 1].
using NormalizedAdjacency = SparseAdjacency;

inline SparseAdjacency build_adjacency(const InteractionDataset& train) {
    if (train.interactions.empty()) throw std::invalid_argument("train split is empty");
    SparseAdjacency adj;
    adj.num_users = train.num_users;
    adj.n = train.num_users + train.num_items;
    adj.degree.assign(adj.n, 0);
    for (auto [u, i] : train.interactions) {
        ++adj.degree[u];
        ++adj.degree[train.num_users + i];
    }
    adj.row_ptr.assign(adj.n + 1, 0);
    for (int r = 0; r < adj.n; ++r) adj.row_ptr[r + 1] = adj.row_ptr[r] + adj.degree[r];
    adj.col.resize(adj.row_ptr.back());
    adj.val.assign(adj.row_ptr.back(), 1.0);

    std::vector<int> cursor(adj.row_ptr.begin(), adj.row_ptr.end() - 1);
    for (auto [u, i] : train.interactions) {
        int v = train.num_users + i;
        adj.col[cursor[u]++] = v;
        adj.col[cursor[v]++] = u;
    }
    for (int r = 0; r < adj.n; ++r)
        std::sort(adj.col.begin() + adj.row_ptr[r], adj.col.begin() + adj.row_ptr[r + 1]);
    return adj;
}

inline NormalizedAdjacency normalize_adjacency(const SparseAdjacency& a) {
    NormalizedAdjacency out = a;
    for (int r = 0; r < a.n; ++r) {
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
            int c = a.col[p];
            out.val[p] = 1.0 / std::sqrt(static_cast<double>(a.degree[r]) *
                                         static_cast<double>(a.degree[c]));
        }
    }
    return out;
}

/// Exact sparse-times-dense product, O(nnz * d).
inline Eigen::MatrixXd spmm(const SparseAdjacency& a, const Eigen::MatrixXd& x) {
    if (x.rows() != a.n) throw std::invalid_argument("spmm: row count mismatch");
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(a.n, x.cols());
    for (int r = 0; r < a.n; ++r) {
        auto row = y.row(r);
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
            row += a.val[p] * x.row(a.col[p]);
    }
    return y;
}

struct Subgraph {
    std::vector<int> nodes;   // ascending original indices
    SparseAdjacency adj;      // induced, re-indexed; raw values 1
};

/// Breadth-first expansion from the seed nodes, truncated at max_nodes.
/// Neighbor lists are visited in ascending index so the result is deterministic
/// for a fixed seed set. Selected nodes are re-indexed in ascending original
/// order, which keeps the user block a contiguous prefix.
inline Subgraph bfs_subgraph(const SparseAdjacency& a, const std::vector<int>& seed_nodes,
                             std::size_t max_nodes) {
    if (seed_nodes.empty() || max_nodes < seed_nodes.size())
        throw std::invalid_argument("bfs_subgraph: need max_nodes >= |seeds| > 0");

    std::vector<char> visited(a.n, 0);
    std::deque<int> queue;
    std::vector<int> selected;
    for (int s : seed_nodes) {
        if (s < 0 || s >= a.n) throw std::invalid_argument("bfs_subgraph: seed out of range");
        if (!visited[s]) {
            visited[s] = 1;
            queue.push_back(s);
            selected.push_back(s);
        }
    }
    while (!queue.empty() && selected.size() < max_nodes) {
        int u = queue.front();
        queue.pop_front();
        for (int p = a.row_ptr[u]; p < a.row_ptr[u + 1] && selected.size() < max_nodes; ++p) {
            int v = a.col[p];
            if (!visited[v]) {
                visited[v] = 1;
                queue.push_back(v);
                selected.push_back(v);
            }
        }
    }

    Subgraph sub;
    sub.nodes = selected;
    std::sort(sub.nodes.begin(), sub.nodes.end());
    std::vector<int> remap(a.n, -1);
    for (std::size_t k = 0; k < sub.nodes.size(); ++k) remap[sub.nodes[k]] = static_cast<int>(k);

    auto& s = sub.adj;
    s.n = static_cast<int>(sub.nodes.size());
    s.num_users = static_cast<int>(
        std::count_if(sub.nodes.begin(), sub.nodes.end(), [&](int v) { return v < a.num_users; }));
    s.degree.assign(s.n, 0);
    s.row_ptr.assign(s.n + 1, 0);
    std::vector<std::vector<int>> rows(s.n);
    for (int k = 0; k < s.n; ++k) {
        int orig = sub.nodes[k];
        for (int p = a.row_ptr[orig]; p < a.row_ptr[orig + 1]; ++p) {
            int m = remap[a.col[p]];
            if (m >= 0) rows[k].push_back(m);
        }
        s.degree[k] = static_cast<int>(rows[k].size());
        s.row_ptr[k + 1] = s.row_ptr[k] + s.degree[k];
    }
    for (auto& r : rows)
        for (int c : r) s.col.push_back(c);
    s.val.assign(s.col.size(), 1.0);
    return sub;
}

/// Debug dump in coordinate-list text, one "row col value" triplet per line.
inline void dump_coo(const SparseAdjacency& a, const std::filesystem::path& path) {
    std::ofstream out(path);
    for (int r = 0; r < a.n; ++r)
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
            out << r << ' ' << a.col[p] << ' ' << a.val[p] << '\n';
}

}  // namespace jgcf

#endif
