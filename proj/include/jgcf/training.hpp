#ifndef JGCF_TRAINING_HPP
#define JGCF_TRAINING_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "jgcf/dataset.hpp"
#include "jgcf/evaluation.hpp"
#include "jgcf/propagation.hpp"
#include "jgcf/rng.hpp"

namespace jgcf {

struct TrainConfig {
    double learning_rate = 0.001;
    double l2_lambda = 1e-6;
    std::size_t batch_size = 4096;
    int max_epochs = 100;
    int patience = 5;          // early stopping on validation Recall@20
    std::uint64_t seed = 2023;
    int embedding_dim = 64;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    void validate() const {
        if (learning_rate < 0) throw std::invalid_argument("learning_rate must be >= 0");
        if (patience < 1) throw std::invalid_argument("patience must be >= 1");
        if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
        if (embedding_dim < 1) throw std::invalid_argument("embedding_dim must be >= 1");
    }
};

struct TrainState {
    Eigen::MatrixXd e0;       // the only learnable parameters
    Eigen::MatrixXd adam_m;
    Eigen::MatrixXd adam_v;
    std::int64_t step = 0;    // Adam timestep
    int epoch = 0;
    double best_metric = -1.0;
    int best_epoch = -1;
};

struct EpochRecord {
    int epoch;
    double mean_loss;
    double valid_recall20;
};

struct FitResult {
    Eigen::MatrixXd e0;       // parameters at the best validation epoch
    std::vector<EpochRecord> history;
};

/// Xavier-uniform init on [-sqrt(6/(2d)), +sqrt(6/(2d))].
inline Eigen::MatrixXd xavier_init(int n, int d, std::mt19937_64& rng) {
    double bound = std::sqrt(6.0 / (2.0 * d));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Eigen::MatrixXd e0(n, d);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < d; ++c) e0(r, c) = dist(rng);
    return e0;
}

namespace detail {

inline double softplus(double x) {
    // ln(1 + e^x), overflow-safe
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace detail

/// Batch-averaged BPR loss -mean ln sigma(y_ui - y_uj) + lambda ||E0||_F^2,
/// scored on the filtered 2d embeddings.
inline double bpr_loss(const Eigen::MatrixXd& final_e, const TrainBatch& batch, int num_users,
                       const Eigen::MatrixXd& e0, double l2_lambda) {
    double loss = 0.0;
    for (const auto& t : batch.triples) {
        double diff = final_e.row(t.user).dot(final_e.row(num_users + t.pos)) -
                      final_e.row(t.user).dot(final_e.row(num_users + t.neg));
        loss += detail::softplus(-diff);
    }
    loss /= static_cast<double>(batch.triples.size());
    return loss + l2_lambda * e0.squaredNorm();
}

struct BprGrad {
    Eigen::MatrixXd grad_final;  // N x 2d, nonzero only on touched rows
    Eigen::MatrixXd grad_l2;     // 2*lambda*E0, added to grad_E0 after backward
};

inline BprGrad bpr_backward(const TrainBatch& batch, const Eigen::MatrixXd& final_e,
                            int num_users, double l2_lambda, const Eigen::MatrixXd& e0) {
    BprGrad g;
    g.grad_final = Eigen::MatrixXd::Zero(final_e.rows(), final_e.cols());
    double inv_n = 1.0 / static_cast<double>(batch.triples.size());
    for (const auto& t : batch.triples) {
        auto eu = final_e.row(t.user);
        auto ei = final_e.row(num_users + t.pos);
        auto ej = final_e.row(num_users + t.neg);
        double s = detail::logistic(ej.dot(eu) - ei.dot(eu)) * inv_n;
        g.grad_final.row(t.user) += s * (ej - ei);
        g.grad_final.row(num_users + t.pos) -= s * eu;
        g.grad_final.row(num_users + t.neg) += s * eu;
    }
    g.grad_l2 = 2.0 * l2_lambda * e0;
    return g;
}

inline void adam_step(TrainState& state, const Eigen::MatrixXd& grad, const TrainConfig& cfg) {
    if (!grad.allFinite()) throw std::runtime_error("non-finite gradient encountered");
    ++state.step;
    state.adam_m = cfg.adam_beta1 * state.adam_m + (1.0 - cfg.adam_beta1) * grad;
    state.adam_v = cfg.adam_beta2 * state.adam_v.array().matrix() +
                   (1.0 - cfg.adam_beta2) * grad.array().square().matrix();
    double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(state.step));
    state.e0.array() -= cfg.learning_rate * (state.adam_m.array() / bc1) /
                        ((state.adam_v.array() / bc2).sqrt() + cfg.adam_eps);
}

/// Full training loop: epochs of minibatches (forward, BPR loss, exact
/// backward, Adam on E0), validation Recall@20 after each epoch, early
/// stopping with patience, best-epoch parameters returned.
inline FitResult fit(const InteractionDataset& train, const InteractionDataset& valid,
                     const NormalizedAdjacency& adj, const FilterParams& fp,
                     const TrainConfig& cfg) {
    cfg.validate();
    fp.validate();

    auto init_rng = make_stream(cfg.seed, "init");
    auto batch_rng = make_stream(cfg.seed, "batch");

    TrainState state;
    state.e0 = xavier_init(adj.n, cfg.embedding_dim, init_rng);
    state.adam_m = Eigen::MatrixXd::Zero(adj.n, cfg.embedding_dim);
    state.adam_v = Eigen::MatrixXd::Zero(adj.n, cfg.embedding_dim);

    bool use_valid = !valid.interactions.empty();
    if (!use_valid && cfg.max_epochs > 0)
        std::cerr << "warning: empty validation split, early stopping disabled\n";

    FitResult result;
    result.e0 = state.e0;
    std::size_t batches_per_epoch =
        (train.interactions.size() + cfg.batch_size - 1) / cfg.batch_size;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        double loss_sum = 0.0;
        for (std::size_t b = 0; b < batches_per_epoch; ++b) {
            TrainBatch batch = sample_batch(train, cfg.batch_size, batch_rng);
            OrderStack stack = forward(adj, state.e0, fp);
            loss_sum += bpr_loss(stack.final, batch, train.num_users, state.e0, cfg.l2_lambda);
            BprGrad bg = bpr_backward(batch, stack.final, train.num_users, cfg.l2_lambda, state.e0);
            Eigen::MatrixXd grad = backward(adj, fp, bg.grad_final, stack);
            grad += bg.grad_l2;
            adam_step(state, grad, cfg);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.mean_loss = loss_sum / static_cast<double>(batches_per_epoch);
        rec.valid_recall20 = 0.0;
        if (use_valid) {
            OrderStack stack = forward(adj, state.e0, fp);
            MetricsReport m = evaluate(stack.final, train.num_users, valid, {&train}, {20});
            rec.valid_recall20 = m.recall.count(20) ? m.recall.at(20) : 0.0;
        }
        result.history.push_back(rec);

        if (!use_valid || rec.valid_recall20 > state.best_metric) {
            state.best_metric = rec.valid_recall20;
            state.best_epoch = epoch;
            result.e0 = state.e0;
        } else if (epoch - state.best_epoch >= cfg.patience) {
            break;
        }
    }
    if (!use_valid) result.e0 = state.e0;
    return result;
}

}  // namespace jgcf

#endif
