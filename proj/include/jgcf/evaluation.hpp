#ifndef JGCF_EVALUATION_HPP
#define JGCF_EVALUATION_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <thread>
#include <vector>

#include "jgcf/dataset.hpp"

namespace jgcf {

struct MetricsReport {
    std::map<int, double> recall;  // K -> Recall@K
    std::map<int, double> ndcg;    // K -> NDCG@K
    int num_evaluated_users = 0;
};

inline int thread_cap() {
    if (const char* env = std::getenv("SPECGCF_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/// Dot-product scores of user u against every item row, with the user's
/// masked-history items set to -inf.
inline Eigen::VectorXd score_all_items(const Eigen::MatrixXd& final_e, int num_users, int u,
                                       const std::vector<int>& masked_items) {
    int num_items = static_cast<int>(final_e.rows()) - num_users;
    Eigen::VectorXd scores =
        final_e.bottomRows(num_items) * final_e.row(u).transpose();
    for (int i : masked_items) scores(i) = -std::numeric_limits<double>::infinity();
    return scores;
}

/// Top-K indices by descending score, ties broken by ascending item index.
inline std::vector<int> top_k(const Eigen::VectorXd& scores, int k) {
    std::vector<int> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    k = std::min<int>(k, static_cast<int>(idx.size()));
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
        if (scores(a) != scores(b)) return scores(a) > scores(b);
        return a < b;
    });
    idx.resize(k);
    return idx;
}

inline double recall_at_k(const std::vector<int>& ranked, const std::vector<int>& truth, int k) {
    if (truth.empty()) throw std::invalid_argument("recall: empty ground truth");
    int hits = 0;
    int limit = std::min<int>(k, static_cast<int>(ranked.size()));
    for (int p = 0; p < limit; ++p)
        if (std::binary_search(truth.begin(), truth.end(), ranked[p])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

inline double ndcg_at_k(const std::vector<int>& ranked, const std::vector<int>& truth, int k) {
    if (truth.empty()) throw std::invalid_argument("ndcg: empty ground truth");
    double dcg = 0.0;
    int limit = std::min<int>(k, static_cast<int>(ranked.size()));
    for (int p = 0; p < limit; ++p)
        if (std::binary_search(truth.begin(), truth.end(), ranked[p]))
            dcg += 1.0 / std::log2(p + 2.0);
    double idcg = 0.0;
    int ideal = std::min<int>(k, static_cast<int>(truth.size()));
    for (int p = 0; p < ideal; ++p) idcg += 1.0 / std::log2(p + 2.0);
    return dcg / idcg;
}

/// Full-ranking evaluation: for each user with ground truth in eval_split,
/// mask the mask_splits history, rank everything else, average both metrics.
/// Users whose truth is empty (or entirely masked away) are skipped.
inline MetricsReport evaluate(const Eigen::MatrixXd& final_e, int num_users,
                              const InteractionDataset& eval_split,
                              const std::vector<const InteractionDataset*>& mask_splits,
                              const std::vector<int>& ks = {10, 20, 50}) {
    int max_k = *std::max_element(ks.begin(), ks.end());

    std::vector<int> users;
    for (int u = 0; u < eval_split.num_users; ++u)
        if (!eval_split.user_items[u].empty()) users.push_back(u);

    int nthreads = std::max(1, std::min<int>(thread_cap(), static_cast<int>(users.size())));
    std::vector<std::map<int, double>> recall_acc(nthreads), ndcg_acc(nthreads);
    std::vector<int> counted(nthreads, 0);

    auto work = [&](int tid) {
        for (std::size_t w = tid; w < users.size(); w += nthreads) {
            int u = users[w];
            std::vector<int> masked;
            for (const auto* m : mask_splits)
                masked.insert(masked.end(), m->user_items[u].begin(), m->user_items[u].end());
            const auto& truth = eval_split.user_items[u];
            Eigen::VectorXd scores = score_all_items(final_e, num_users, u, masked);
            auto ranked = top_k(scores, max_k);
            for (int k : ks) {
                recall_acc[tid][k] += recall_at_k(ranked, truth, k);
                ndcg_acc[tid][k] += ndcg_at_k(ranked, truth, k);
            }
            ++counted[tid];
        }
    };
    if (nthreads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
        for (auto& t : pool) t.join();
    }

    MetricsReport report;
    for (int t = 0; t < nthreads; ++t) report.num_evaluated_users += counted[t];
    if (report.num_evaluated_users == 0) return report;
    for (int k : ks) {
        double r = 0, n = 0;
        for (int t = 0; t < nthreads; ++t) {
            r += recall_acc[t][k];
            n += ndcg_acc[t][k];
        }
        report.recall[k] = r / report.num_evaluated_users;
        report.ndcg[k] = n / report.num_evaluated_users;
    }
    return report;
}

/// Items ranked by train interaction count descending, ties by index.
inline std::vector<int> popularity_baseline(const InteractionDataset& train) {
    std::vector<int> counts(train.num_items, 0);
    for (auto [u, i] : train.interactions) ++counts[i];
    std::vector<int> order(train.num_items);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return counts[a] > counts[b]; });
    return order;
}

/// Metrics for a fixed global item ranking (masked per user). Used to score
/// the popularity baseline under the same protocol as the model.
inline MetricsReport evaluate_ranking(const std::vector<int>& global_ranking,
                                      const InteractionDataset& eval_split,
                                      const std::vector<const InteractionDataset*>& mask_splits,
                                      const std::vector<int>& ks = {10, 20, 50}) {
    int max_k = *std::max_element(ks.begin(), ks.end());
    MetricsReport report;
    for (int u = 0; u < eval_split.num_users; ++u) {
        const auto& truth = eval_split.user_items[u];
        if (truth.empty()) continue;
        std::vector<int> masked;
        for (const auto* m : mask_splits)
            masked.insert(masked.end(), m->user_items[u].begin(), m->user_items[u].end());
        std::sort(masked.begin(), masked.end());
        std::vector<int> ranked;
        for (int item : global_ranking) {
            if (std::binary_search(masked.begin(), masked.end(), item)) continue;
            ranked.push_back(item);
            if (static_cast<int>(ranked.size()) == max_k) break;
        }
        for (int k : ks) {
            report.recall[k] += recall_at_k(ranked, truth, k);
            report.ndcg[k] += ndcg_at_k(ranked, truth, k);
        }
        ++report.num_evaluated_users;
    }
    if (report.num_evaluated_users > 0)
        for (int k : ks) {
            report.recall[k] /= report.num_evaluated_users;
            report.ndcg[k] /= report.num_evaluated_users;
        }
    return report;
}

}  // namespace jgcf

#endif
