#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "jgcf/evaluation.hpp"
#include "jgcf/synthetic.hpp"
#include "jgcf/training.hpp"

using namespace jgcf;

namespace {

FilterParams default_filter() {
    FilterParams fp;
    fp.basis = Basis::jacobi;
    fp.order = 3;
    fp.a = 1.0;
    fp.b = 1.0;
    fp.alpha = 0.1;
    return fp;
}

TrainBatch fixed_batch(std::vector<TrainBatch::Triple> triples) {
    TrainBatch b;
    b.triples = std::move(triples);
    return b;
}

}  // namespace

TEST(BprLoss, EqualScoresGiveLnTwo) {
    Eigen::MatrixXd final_e = Eigen::MatrixXd::Zero(3, 4);
    Eigen::MatrixXd e0 = Eigen::MatrixXd::Zero(3, 2);
    auto batch = fixed_batch({{0, 0, 1}});
    EXPECT_NEAR(bpr_loss(final_e, batch, 1, e0, 0.0), std::log(2.0), 1e-12);
}

TEST(BprLoss, UnitMarginValue) {
    // single triple with y_ui - y_uj = 1 -> ln(1 + e^-1)
    Eigen::MatrixXd final_e(3, 1);
    final_e << 1.0, 2.0, 1.0;  // u=0, i scores 2, j scores 1
    Eigen::MatrixXd e0 = Eigen::MatrixXd::Zero(3, 1);
    auto batch = fixed_batch({{0, 0, 1}});
    EXPECT_NEAR(bpr_loss(final_e, batch, 1, e0, 0.0), std::log1p(std::exp(-1.0)), 1e-12);
}

TEST(BprLoss, SaturationLeavesOnlyRegularizer) {
    Eigen::MatrixXd final_e(3, 1);
    final_e << 1.0, 100.0, -100.0;
    Eigen::MatrixXd e0 = Eigen::MatrixXd::Ones(3, 1);
    auto batch = fixed_batch({{0, 0, 1}});
    EXPECT_NEAR(bpr_loss(final_e, batch, 1, e0, 0.5), 0.5 * 3.0, 1e-10);
}

TEST(BprBackward, SaturatedTripleNearZeroGradient) {
    Eigen::MatrixXd final_e(3, 1);
    final_e << 1.0, 100.0, -100.0;
    Eigen::MatrixXd e0 = Eigen::MatrixXd::Zero(3, 1);
    auto g = bpr_backward(fixed_batch({{0, 0, 1}}), final_e, 1, 0.0, e0);
    EXPECT_LT(g.grad_final.cwiseAbs().maxCoeff(), 1e-30);
}

TEST(BprBackward, L2TermIsTwoLambdaE0) {
    Eigen::MatrixXd final_e = Eigen::MatrixXd::Zero(3, 2);
    Eigen::MatrixXd e0 = Eigen::MatrixXd::Random(3, 1);
    auto g = bpr_backward(fixed_batch({{0, 0, 1}}), final_e, 1, 0.25, e0);
    EXPECT_LT((g.grad_l2 - 0.5 * e0).norm(), 1e-14);
}

TEST(BprBackward, FiniteDifferenceOnScores) {
    // Check the grad wrt final embeddings directly against central differences.
    auto rng = make_stream(5, "fd");
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd final_e(10, 3);
    for (int r = 0; r < 10; ++r)
        for (int c = 0; c < 3; ++c) final_e(r, c) = gauss(rng);
    Eigen::MatrixXd e0 = Eigen::MatrixXd::Zero(10, 3);
    auto batch = fixed_batch({{0, 0, 1}, {1, 2, 3}, {2, 1, 4}});
    auto g = bpr_backward(batch, final_e, 5, 0.0, e0);

    const double h = 1e-6;
    for (int r = 0; r < 10; ++r)
        for (int c = 0; c < 3; ++c) {
            Eigen::MatrixXd ep = final_e, em = final_e;
            ep(r, c) += h;
            em(r, c) -= h;
            double fd = (bpr_loss(ep, batch, 5, e0, 0.0) - bpr_loss(em, batch, 5, e0, 0.0)) / (2 * h);
            EXPECT_NEAR(g.grad_final(r, c), fd, 1e-6);
        }
}

TEST(AdamStep, ZeroGradientIsFixedPoint) {
    TrainConfig cfg;
    TrainState st;
    st.e0 = Eigen::MatrixXd::Random(4, 3);
    st.adam_m = Eigen::MatrixXd::Zero(4, 3);
    st.adam_v = Eigen::MatrixXd::Zero(4, 3);
    Eigen::MatrixXd before = st.e0;
    adam_step(st, Eigen::MatrixXd::Zero(4, 3), cfg);
    EXPECT_EQ((st.e0 - before).norm(), 0.0);
}

TEST(AdamStep, FirstStepMagnitudeIsLearningRate) {
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    TrainState st;
    st.e0 = Eigen::MatrixXd::Zero(2, 2);
    st.adam_m = Eigen::MatrixXd::Zero(2, 2);
    st.adam_v = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd g(2, 2);
    g << 3.0, -2.0, 0.5, -7.0;
    adam_step(st, g, cfg);
    // after bias correction the first update is ~ -lr * sign(g)
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            EXPECT_NEAR(st.e0(r, c), -cfg.learning_rate * (g(r, c) > 0 ? 1.0 : -1.0), 1e-6);
}

TEST(AdamStep, ZeroLearningRateLeavesParamsUnchanged) {
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    TrainState st;
    st.e0 = Eigen::MatrixXd::Random(3, 3);
    st.adam_m = Eigen::MatrixXd::Zero(3, 3);
    st.adam_v = Eigen::MatrixXd::Zero(3, 3);
    Eigen::MatrixXd before = st.e0;
    adam_step(st, Eigen::MatrixXd::Random(3, 3), cfg);
    EXPECT_EQ((st.e0 - before).norm(), 0.0);
}

TEST(AdamStep, NonFiniteGradientAborts) {
    TrainConfig cfg;
    TrainState st;
    st.e0 = Eigen::MatrixXd::Zero(2, 2);
    st.adam_m = Eigen::MatrixXd::Zero(2, 2);
    st.adam_v = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    g(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(adam_step(st, g, cfg), std::runtime_error);
}

TEST(XavierInit, BoundAndSpread) {
    auto rng = make_stream(11, "init");
    auto e0 = xavier_init(1000, 16, rng);
    double bound = std::sqrt(6.0 / 32.0);
    EXPECT_LE(e0.cwiseAbs().maxCoeff(), bound);
    EXPECT_GT(e0.cwiseAbs().maxCoeff(), 0.9 * bound);
    EXPECT_NEAR(e0.mean(), 0.0, 0.01);
}

TEST(Fit, ZeroEpochsReturnsInitialization) {
    auto ds = two_block_dataset(10, 10, 0.5, 0.1, 1);
    auto split = split_dataset(ds, 0.8, 0.1, 1);
    auto adj = normalize_adjacency(build_adjacency(split.train));
    TrainConfig cfg;
    cfg.max_epochs = 0;
    cfg.embedding_dim = 8;
    auto result = fit(split.train, split.valid, adj, default_filter(), cfg);
    EXPECT_TRUE(result.history.empty());
    auto init_rng = make_stream(cfg.seed, "init");
    EXPECT_EQ((result.e0 - xavier_init(adj.n, 8, init_rng)).norm(), 0.0);
}

TEST(Fit, DeterministicLossTrajectory) {
    auto ds = two_block_dataset(12, 12, 0.5, 0.1, 2);
    auto split = split_dataset(ds, 0.8, 0.1, 2);
    auto adj = normalize_adjacency(build_adjacency(split.train));
    TrainConfig cfg;
    cfg.max_epochs = 3;
    cfg.embedding_dim = 8;
    cfg.batch_size = 64;
    cfg.seed = 99;
    auto r1 = fit(split.train, split.valid, adj, default_filter(), cfg);
    auto r2 = fit(split.train, split.valid, adj, default_filter(), cfg);
    ASSERT_EQ(r1.history.size(), r2.history.size());
    for (std::size_t i = 0; i < r1.history.size(); ++i)
        EXPECT_EQ(r1.history[i].mean_loss, r2.history[i].mean_loss);
}

TEST(Fit, InitialLossNearLnTwo) {
    // Order 0 keeps scores symmetric in (pos, neg): propagation at higher
    // orders correlates a user's embedding with its neighbours' and biases
    // the initial margin positive, so the ln 2 invariant only holds pre-mixing.
    auto ds = two_block_dataset(20, 20, 0.5, 0.05, 3);
    auto split = split_dataset(ds, 0.8, 0.1, 3);
    auto adj = normalize_adjacency(build_adjacency(split.train));
    auto init_rng = make_stream(7, "init");
    auto e0 = xavier_init(adj.n, 32, init_rng);
    auto fp = default_filter();
    fp.order = 0;
    auto stack = forward(adj, e0, fp);
    auto batch_rng = make_stream(7, "batch");
    auto batch = sample_batch(split.train, 4096, batch_rng);
    double loss = bpr_loss(stack.final, batch, split.train.num_users, e0, 1e-6);
    EXPECT_NEAR(loss, std::log(2.0), 0.05 * std::log(2.0));
}

TEST(Fit, LossMostlyDecreasesOnToyDataset) {
    auto ds = two_block_dataset(20, 20, 0.5, 0.02, 4);
    auto split = split_dataset(ds, 0.8, 0.1, 4);
    auto adj = normalize_adjacency(build_adjacency(split.train));
    TrainConfig cfg;
    cfg.max_epochs = 10;
    cfg.embedding_dim = 16;
    cfg.batch_size = 256;
    cfg.learning_rate = 0.01;
    cfg.patience = 10;
    auto result = fit(split.train, split.valid, adj, default_filter(), cfg);
    ASSERT_EQ(result.history.size(), 10u);
    int decreases = 0;
    for (int i = 1; i < 10; ++i)
        if (result.history[i].mean_loss <= result.history[i - 1].mean_loss) ++decreases;
    EXPECT_GE(decreases, 7);
}

TEST(Fit, BeatsPopularityOnBlockStructure) {
    auto ds = two_block_dataset(20, 20, 0.6, 0.02, 5);
    auto split = split_dataset(ds, 0.8, 0.1, 5);
    auto adj = normalize_adjacency(build_adjacency(split.train));
    TrainConfig cfg;
    cfg.max_epochs = 50;
    cfg.embedding_dim = 16;
    cfg.batch_size = 256;
    cfg.learning_rate = 0.05;
    cfg.patience = 50;
    auto result = fit(split.train, split.valid, adj, default_filter(), cfg);

    // Recall@5 on a 20-item catalogue: a cutoff of 20 would cover every item
    // and make both rankers trivially perfect.
    auto stack = forward(adj, result.e0, default_filter());
    auto model = evaluate(stack.final, split.train.num_users, split.valid, {&split.train}, {5});
    auto pop = evaluate_ranking(popularity_baseline(split.train), split.valid,
                                {&split.train}, {5});
    EXPECT_GT(model.recall.at(5), pop.recall.at(5));
}

// Best-epoch parameters are kept even when later epochs degrade.
TEST(Fit, EarlyStoppingReturnsBestEpoch) {
    auto ds = two_block_dataset(16, 16, 0.5, 0.05, 6);
    auto split = split_dataset(ds, 0.8, 0.1, 6);
    auto adj = normalize_adjacency(build_adjacency(split.train));
    TrainConfig cfg;
    cfg.max_epochs = 30;
    cfg.embedding_dim = 8;
    cfg.batch_size = 128;
    cfg.patience = 3;
    auto result = fit(split.train, split.valid, adj, default_filter(), cfg);

    // The returned parameters must reproduce the best recorded validation metric.
    double best = -1;
    for (const auto& r : result.history) best = std::max(best, r.valid_recall20);
    auto stack = forward(adj, result.e0, default_filter());
    auto m = evaluate(stack.final, split.train.num_users, split.valid, {&split.train}, {20});
    EXPECT_NEAR(m.recall.at(20), best, 1e-12);
}

// End-to-end gradient: BPR loss through forward propagation vs finite differences.
TEST(Fit, EndToEndGradientMatchesFiniteDifferences) {
    auto ds = random_bipartite(8, 8, 30, 7);
    auto adj = normalize_adjacency(build_adjacency(ds));
    auto fp = default_filter();
    auto init_rng = make_stream(13, "init");
    auto e0 = xavier_init(adj.n, 4, init_rng);
    auto batch = fixed_batch({{0, 1, 2}, {3, 0, 5}, {1, 4, 6}});
    const double lambda = 1e-3;

    auto loss_at = [&](const Eigen::MatrixXd& e) {
        auto stack = forward(adj, e, fp);
        return bpr_loss(stack.final, batch, ds.num_users, e, lambda);
    };

    auto stack = forward(adj, e0, fp);
    auto bg = bpr_backward(batch, stack.final, ds.num_users, lambda, e0);
    Eigen::MatrixXd grad = backward(adj, fp, bg.grad_final, stack) + bg.grad_l2;

    const double h = 1e-5;
    double max_rel = 0;
    for (int r = 0; r < adj.n; ++r)
        for (int c = 0; c < 4; ++c) {
            Eigen::MatrixXd ep = e0, em = e0;
            ep(r, c) += h;
            em(r, c) -= h;
            double fd = (loss_at(ep) - loss_at(em)) / (2 * h);
            max_rel = std::max(max_rel,
                               std::abs(fd - grad(r, c)) / std::max(1e-6, std::abs(fd)));
        }
    EXPECT_LT(max_rel, 1e-4);
}
