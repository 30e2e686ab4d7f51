#ifndef JGCF_SPECTRAL_HPP
#define JGCF_SPECTRAL_HPP

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "jgcf/dataset.hpp"
#include "jgcf/graph.hpp"
#include "jgcf/polybasis.hpp"

namespace jgcf {

/// Full eigensystem of a dense symmetric normalized adjacency snapshot.
struct SpectralDecomposition {
    Eigen::MatrixXd u;         // orthogonal eigenvectors, columns
    Eigen::VectorXd lambda;    // eigenvalues, ascending
    std::vector<int> node_map; // subgraph index -> original node index (may be empty)
};

inline constexpr int kDenseEigCap = 4000;

inline SpectralDecomposition eigendecompose(const Eigen::MatrixXd& a_hat,
                                            int size_cap = kDenseEigCap) {
    if (a_hat.rows() != a_hat.cols()) throw std::invalid_argument("matrix not square");
    if (a_hat.rows() > size_cap)
        throw std::invalid_argument(
            "matrix exceeds dense eigendecomposition cap; reduce with bfs_subgraph first");
    if ((a_hat - a_hat.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a_hat);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    SpectralDecomposition dec;
    dec.u = solver.eigenvectors();
    dec.lambda = solver.eigenvalues();
    return dec;
}

/// Per-eigenvector energy of a test adjacency B: t_i = u_i^T B u_i.
inline Eigen::VectorXd spectral_target(const SpectralDecomposition& dec,
                                       const Eigen::MatrixXd& b) {
    if (b.rows() != dec.u.rows() || b.cols() != dec.u.rows())
        throw std::invalid_argument("spectral_target: dimension mismatch");
    Eigen::MatrixXd bu = b * dec.u;
    Eigen::VectorXd t(dec.u.cols());
    for (int i = 0; i < dec.u.cols(); ++i) t(i) = dec.u.col(i).dot(bu.col(i));
    return t;
}

inline double pearson_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("pearson: need two equal-length series of >= 3 points");
    double mx = x.mean(), my = y.mean();
    Eigen::VectorXd dx = x.array() - mx, dy = y.array() - my;
    double sx = dx.norm(), sy = dy.norm();
    if (sx == 0.0 || sy == 0.0)
        throw std::domain_error("pearson undefined: zero variance input");
    return dx.dot(dy) / (sx * sy);
}

/// Reference spectral filter U diag(g(lambda)) U^T E0; the dense oracle that
/// recursive propagation is checked against.
inline Eigen::MatrixXd spectral_filter_oracle(const SpectralDecomposition& dec,
                                              const std::function<double(double)>& g,
                                              const Eigen::MatrixXd& e0) {
    Eigen::VectorXd gl(dec.lambda.size());
    for (int i = 0; i < dec.lambda.size(); ++i) gl(i) = g(dec.lambda(i));
    return dec.u * gl.asDiagonal() * dec.u.transpose() * e0;
}

struct BfsConfig {
    int num_seeds = 4;
    std::size_t max_nodes = 3000;
};

struct SpectralAnalysis {
    SpectralDecomposition dec;
    Eigen::VectorXd targets;
    std::vector<std::pair<std::string, double>> correlations;  // (basis label, pearson r)
};

namespace detail {

/// Dense adjacency of a split restricted to a node subset (subset ascending,
/// remap consistent with bfs_subgraph ordering). Edges leaving the subset drop.
inline Eigen::MatrixXd restrict_split(const InteractionDataset& split,
                                      const std::vector<int>& nodes, int num_users) {
    std::vector<int> remap;
    int total = split.num_users + split.num_items;
    remap.assign(total, -1);
    for (std::size_t k = 0; k < nodes.size(); ++k) remap[nodes[k]] = static_cast<int>(k);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(nodes.size(), nodes.size());
    for (auto [u, i] : split.interactions) {
        int ru = remap[u], ri = remap[num_users + i];
        if (ru >= 0 && ri >= 0) {
            b(ru, ri) = 1.0;
            b(ri, ru) = 1.0;
        }
    }
    return b;
}

}  // namespace detail

/// The spectral-transformation analysis pipeline: BFS-subsample the train
/// graph, renormalize with subgraph degrees, eigendecompose, compute test
/// targets diag(U^T B U), and correlate each basis's transformed spectrum
/// against them. Seeds for the BFS are drawn from the provided RNG stream.
inline SpectralAnalysis correlation_table(const InteractionDataset& train,
                                          const InteractionDataset& test,
                                          const std::vector<FilterParams>& bases,
                                          const BfsConfig& cfg, std::mt19937_64& rng) {
    SparseAdjacency full = build_adjacency(train);
    std::vector<int> seeds;
    std::uniform_int_distribution<int> dist(0, full.n - 1);
    while (seeds.size() < static_cast<std::size_t>(cfg.num_seeds)) {
        int s = dist(rng);
        if (full.degree[s] > 0 &&
            std::find(seeds.begin(), seeds.end(), s) == seeds.end())
            seeds.push_back(s);
    }

    Subgraph sub = bfs_subgraph(full, seeds, cfg.max_nodes);
    // Degrees recomputed from the subgraph so the spectrum stays in [-1, 1];
    // isolated nodes in the sample are dropped from the analysis.
    NormalizedAdjacency norm = normalize_adjacency(sub.adj);

    SpectralAnalysis out;
    out.dec = eigendecompose(norm.to_dense());
    out.dec.node_map = sub.nodes;
    out.targets = spectral_target(out.dec, detail::restrict_split(test, sub.nodes, train.num_users));

    for (const auto& fp : bases) {
        Eigen::VectorXd f(out.dec.lambda.size());
        for (int i = 0; i < f.size(); ++i) f(i) = band_stop_response(fp, out.dec.lambda(i));
        std::string label = basis_name(fp.basis);
        if (fp.basis == Basis::jacobi)
            label += "(" + std::to_string(fp.a) + "," + std::to_string(fp.b) + ")";
        out.correlations.emplace_back(label, pearson_correlation(f, out.targets));
    }
    return out;
}

}  // namespace jgcf

#endif
