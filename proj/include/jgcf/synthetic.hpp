#ifndef JGCF_SYNTHETIC_HPP
#define JGCF_SYNTHETIC_HPP

#include <random>

#include "jgcf/dataset.hpp"

namespace jgcf {

/// Two-community bipartite generator: users and items split into two equal
/// blocks, within-block interaction probability p_in >> cross-block p_out.
/// The in-repo stand-in for Gowalla-scale spectral and learning claims.
inline InteractionDataset two_block_dataset(int num_users, int num_items, double p_in,
                                            double p_out, std::uint64_t seed) {
    InteractionDataset ds;
    ds.num_users = num_users;
    ds.num_items = num_items;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    int ublock = num_users / 2, iblock = num_items / 2;
    for (int u = 0; u < num_users; ++u) {
        for (int i = 0; i < num_items; ++i) {
            bool same_block = (u < ublock) == (i < iblock);
            if (coin(rng) < (same_block ? p_in : p_out)) ds.interactions.emplace_back(u, i);
        }
    }
    ds.rebuild_user_items();
    return ds;
}

/// Random bipartite graph with a fixed edge count, no duplicates.
inline InteractionDataset random_bipartite(int num_users, int num_items, int num_edges,
                                           std::uint64_t seed) {
    InteractionDataset ds;
    ds.num_users = num_users;
    ds.num_items = num_items;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> udist(0, num_users - 1), idist(0, num_items - 1);
    std::unordered_set<std::uint64_t> seen;
    while (static_cast<int>(ds.interactions.size()) < num_edges) {
        int u = udist(rng), i = idist(rng);
        std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(i);
        if (seen.insert(key).second) ds.interactions.emplace_back(u, i);
    }
    ds.rebuild_user_items();
    return ds;
}

}  // namespace jgcf

#endif
