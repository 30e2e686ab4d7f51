#ifndef JGCF_PROPAGATION_HPP
#define JGCF_PROPAGATION_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

#include "jgcf/graph.hpp"
#include "jgcf/polybasis.hpp"

namespace jgcf {

/// Per-order filtered embeddings E^(k) = P_k(A_hat) E^(0) plus the aggregated
/// band-stop / band-pass blocks and their concatenation.
struct OrderStack {
    std::vector<Eigen::MatrixXd> orders;  // K+1 matrices, discount already applied
    Eigen::MatrixXd band_stop;
    Eigen::MatrixXd band_pass;
    Eigen::MatrixXd final;                // N x 2d, [band_stop | band_pass]
};

/// Recursive order computation: one sparse product per step for the three-term
/// bases. P_k(A_hat) is never materialized. The discount multiplies orders[k]
/// by gamma^k after the recurrence (the recurrence itself runs undiscounted).
inline std::vector<Eigen::MatrixXd> propagate_orders(const NormalizedAdjacency& adj,
                                                     const Eigen::MatrixXd& e0,
                                                     const FilterParams& fp) {
    fp.validate();
    if (e0.rows() != adj.n) throw std::invalid_argument("embedding row count != node count");
    int K = fp.order;
    std::vector<Eigen::MatrixXd> orders;
    orders.reserve(K + 1);
    orders.push_back(e0);

    switch (fp.basis) {
        case Basis::monomial:
            for (int k = 1; k <= K; ++k) orders.push_back(spmm(adj, orders.back()));
            break;
        case Basis::chebyshev:
            if (K >= 1) orders.push_back(spmm(adj, e0));
            for (int k = 2; k <= K; ++k)
                orders.push_back(2.0 * spmm(adj, orders[k - 1]) - orders[k - 2]);
            break;
        case Basis::legendre:
            if (K >= 1) orders.push_back(spmm(adj, e0));
            for (int k = 2; k <= K; ++k)
                orders.push_back(((2.0 * k - 1.0) * spmm(adj, orders[k - 1]) -
                                  (k - 1.0) * orders[k - 2]) /
                                 static_cast<double>(k));
            break;
        case Basis::jacobi:
            if (K >= 1)
                orders.push_back(0.5 * (fp.a - fp.b) * e0 +
                                 0.5 * (fp.a + fp.b + 2.0) * spmm(adj, e0));
            for (int k = 2; k <= K; ++k) {
                auto c = jacobi_coeffs(k, fp.a, fp.b);
                orders.push_back(c.theta * spmm(adj, orders[k - 1]) +
                                 c.theta_prime * orders[k - 1] - c.theta_pprime * orders[k - 2]);
            }
            break;
        case Basis::bernstein:
            // B_{k,K}(A) = C(K,k) ((I-A)/2)^{K-k} ((I+A)/2)^k; no three-term
            // recurrence in k, so each order is built by repeated application.
            for (int k = 1; k <= K; ++k) {
                Eigen::MatrixXd y = e0;
                for (int q = 0; q < k; ++q) y = 0.5 * (y + spmm(adj, y));
                for (int q = 0; q < K - k; ++q) y = 0.5 * (y - spmm(adj, y));
                orders.push_back(detail::binom(K, k) * y);
            }
            {
                Eigen::MatrixXd y = e0;
                for (int q = 0; q < K; ++q) y = 0.5 * (y - spmm(adj, y));
                orders[0] = y;
            }
            break;
    }

    if (fp.discount != 1.0) {
        double disc = 1.0;
        for (int k = 1; k <= K; ++k) {
            disc *= fp.discount;
            orders[k] *= disc;
        }
    }
    return orders;
}

inline Eigen::MatrixXd band_stop_aggregate(const std::vector<Eigen::MatrixXd>& orders,
                                           const FilterParams& fp) {
    if (orders.size() != static_cast<std::size_t>(fp.order) + 1)
        throw std::invalid_argument("order stack size mismatch");
    Eigen::MatrixXd out = fp.weight(0) * orders[0];
    for (int k = 1; k <= fp.order; ++k) out += fp.weight(k) * orders[k];
    return out;
}

/// The band-stop operator M(X) = sum_k w_k gamma^k P_k(A_hat) X applied to an
/// arbitrary dense matrix. M is a polynomial in the symmetric A_hat, hence
/// symmetric itself; backward reuses it directly.
inline Eigen::MatrixXd apply_band_stop(const NormalizedAdjacency& adj, const FilterParams& fp,
                                       const Eigen::MatrixXd& x) {
    return band_stop_aggregate(propagate_orders(adj, x, fp), fp);
}

/// Elementwise tanh(alpha * E0 - band_stop). Valid only when the band-stop used
/// uniform order weights, so alpha*E0 - band_stop matches the filter argument.
inline Eigen::MatrixXd band_pass_transform(const Eigen::MatrixXd& e0,
                                           const Eigen::MatrixXd& band_stop,
                                           const FilterParams& fp) {
    if (!fp.uniform_weights())
        throw std::invalid_argument("band-pass shortcut requires uniform order weights");
    return (fp.alpha * e0 - band_stop).array().tanh();
}

inline OrderStack forward(const NormalizedAdjacency& adj, const Eigen::MatrixXd& e0,
                          const FilterParams& fp) {
    OrderStack s;
    s.orders = propagate_orders(adj, e0, fp);
    s.band_stop = band_stop_aggregate(s.orders, fp);
    s.band_pass = band_pass_transform(e0, s.band_stop, fp);
    s.final.resize(e0.rows(), 2 * e0.cols());
    s.final << s.band_stop, s.band_pass;
    return s;
}

/// Exact gradient of the forward map. With G = [G_bs | G_bp] the incoming
/// gradient and H = G_bp .* (1 - band_pass^2):
///   grad_E0 = M(G_bs - H) + alpha * H
inline Eigen::MatrixXd backward(const NormalizedAdjacency& adj, const FilterParams& fp,
                                const Eigen::MatrixXd& grad_final, const OrderStack& cache) {
    auto d = cache.band_stop.cols();
    if (grad_final.cols() != 2 * d || grad_final.rows() != cache.band_stop.rows())
        throw std::invalid_argument("backward: gradient shape mismatch");
    Eigen::MatrixXd h =
        grad_final.rightCols(d).array() * (1.0 - cache.band_pass.array().square());
    Eigen::MatrixXd grad = apply_band_stop(adj, fp, grad_final.leftCols(d) - h);
    grad += fp.alpha * h;
    return grad;
}

}  // namespace jgcf

#endif
