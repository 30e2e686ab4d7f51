#ifndef JGCF_DATASET_HPP
#define JGCF_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace jgcf {

/// Implicit-feedback interaction data over densely re-indexed user/item ids.
/// Immutable after load/split; safe to share read-only across threads.
struct InteractionDataset {
    int num_users = 0;
    int num_items = 0;
    std::vector<std::pair<int, int>> interactions;  // (user, item)
    std::vector<std::vector<int>> user_items;       // per-user sorted item lists

    // raw-id decode tables (empty for synthetic datasets)
    std::vector<std::string> user_ids;
    std::vector<std::string> item_ids;

    void rebuild_user_items() {
        user_items.assign(num_users, {});
        for (auto [u, i] : interactions) user_items[u].push_back(i);
        for (auto& v : user_items) std::sort(v.begin(), v.end());
    }

    bool user_has_item(int u, int i) const {
        const auto& v = user_items[u];
        return std::binary_search(v.begin(), v.end(), i);
    }
};

struct TrainBatch {
    struct Triple {
        int user, pos, neg;
    };
    std::vector<Triple> triples;
    std::size_t skipped = 0;  // positives dropped after bounded negative rejection
};

namespace detail {

inline bool looks_like_header(const std::vector<std::string>& tokens) {
    for (const auto& t : tokens) {
        std::string low;
        for (char c : t) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        if (low.find("user") != std::string::npos || low.find("item") != std::string::npos ||
            low.find(':') != std::string::npos)
            return true;
    }
    return false;
}

inline std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

}  // namespace detail

/// Shared dense re-indexing state, so several files (e.g. the three split
/// files of one dataset) map raw ids into one consistent index space.
struct IdSpace {
    std::unordered_map<std::string, int> umap, imap;
    std::vector<std::string> user_ids, item_ids;
};

namespace detail {

inline void load_pairs_into(const std::filesystem::path& path, IdSpace& ids,
                            InteractionDataset& ds) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open interaction file: " + path.string());

    std::unordered_set<std::uint64_t> seen;

    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::split_tokens(line);
        if (toks.empty()) continue;
        if (first) {
            first = false;
            if (detail::looks_like_header(toks)) continue;
        }
        if (toks.size() < 2)
            throw std::runtime_error("malformed line " + std::to_string(lineno) + " in " +
                                     path.string() + ": expected two tokens");
        auto intern = [](std::unordered_map<std::string, int>& m, std::vector<std::string>& names,
                         const std::string& key) {
            auto [it, inserted] = m.emplace(key, static_cast<int>(names.size()));
            if (inserted) names.push_back(key);
            return it->second;
        };
        int u = intern(ids.umap, ids.user_ids, toks[0]);
        int i = intern(ids.imap, ids.item_ids, toks[1]);
        std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(i);
        if (seen.insert(key).second) ds.interactions.emplace_back(u, i);
    }
}

}  // namespace detail

/// Reads a whitespace/TAB-separated pair-per-line file (optional header).
/// Raw ids are densely re-indexed in first-appearance order; duplicate pairs collapse.
inline InteractionDataset load_interactions(const std::filesystem::path& path) {
    InteractionDataset ds;
    IdSpace ids;
    detail::load_pairs_into(path, ids, ds);
    if (ds.interactions.empty())
        throw std::runtime_error("no interactions found in " + path.string());
    ds.num_users = static_cast<int>(ids.user_ids.size());
    ds.num_items = static_cast<int>(ids.item_ids.size());
    ds.user_ids = std::move(ids.user_ids);
    ds.item_ids = std::move(ids.item_ids);
    ds.rebuild_user_items();
    return ds;
}

inline void save_interactions(const InteractionDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (auto [u, i] : ds.interactions) {
        if (!ds.user_ids.empty())
            out << ds.user_ids[u] << '\t' << ds.item_ids[i] << '\n';
        else
            out << u << '\t' << i << '\n';
    }
}

struct SplitResult {
    InteractionDataset train, valid, test;
};

/// Per-user split: ceil(train_frac*|N_u|) interactions to train; the remainders
/// are pooled, shuffled globally, and cut so valid holds valid_frac of ALL
/// interactions. Same seed reproduces the split bit-exactly.
inline SplitResult split_dataset(const InteractionDataset& ds, double train_frac,
                                 double valid_frac, std::uint64_t seed) {
    if (train_frac <= 0 || valid_frac < 0 || train_frac + valid_frac >= 1.0)
        throw std::invalid_argument("split fractions must satisfy 0 < train, 0 <= valid, train+valid < 1");

    std::mt19937_64 rng(seed);
    SplitResult r;
    for (auto* part : {&r.train, &r.valid, &r.test}) {
        part->num_users = ds.num_users;
        part->num_items = ds.num_items;
        part->user_ids = ds.user_ids;
        part->item_ids = ds.item_ids;
    }

    std::vector<std::pair<int, int>> holdout;
    std::size_t singletons = 0;
    for (int u = 0; u < ds.num_users; ++u) {
        std::vector<int> items = ds.user_items[u];
        if (items.empty()) continue;
        if (items.size() < 2) {
            r.train.interactions.emplace_back(u, items[0]);
            ++singletons;
            continue;
        }
        std::shuffle(items.begin(), items.end(), rng);
        auto n_train = static_cast<std::size_t>(
            std::ceil(train_frac * static_cast<double>(items.size())));
        n_train = std::min(n_train, items.size());
        for (std::size_t k = 0; k < items.size(); ++k) {
            if (k < n_train)
                r.train.interactions.emplace_back(u, items[k]);
            else
                holdout.emplace_back(u, items[k]);
        }
    }
    if (singletons > 0)
        std::cerr << "warning: " << singletons
                  << " users with <2 interactions assigned entirely to train\n";

    std::shuffle(holdout.begin(), holdout.end(), rng);
    auto n_valid = std::min<std::size_t>(
        holdout.size(),
        static_cast<std::size_t>(std::llround(valid_frac * static_cast<double>(ds.interactions.size()))));
    for (std::size_t k = 0; k < holdout.size(); ++k) {
        if (k < n_valid)
            r.valid.interactions.push_back(holdout[k]);
        else
            r.test.interactions.push_back(holdout[k]);
    }

    r.train.rebuild_user_items();
    r.valid.rebuild_user_items();
    r.test.rebuild_user_items();
    return r;
}

/// Loads train.tsv / valid.tsv / test.tsv from a split directory with one
/// shared id space, so indices agree across the three splits.
inline SplitResult load_split_dir(const std::filesystem::path& dir) {
    SplitResult r;
    IdSpace ids;
    detail::load_pairs_into(dir / "train.tsv", ids, r.train);
    if (r.train.interactions.empty())
        throw std::runtime_error("empty train split in " + dir.string());
    for (const char* name : {"valid.tsv", "test.tsv"}) {
        auto p = dir / name;
        if (std::filesystem::exists(p)) {
            InteractionDataset& part = (std::string(name) == "valid.tsv") ? r.valid : r.test;
            detail::load_pairs_into(p, ids, part);
        }
    }
    for (auto* part : {&r.train, &r.valid, &r.test}) {
        part->num_users = static_cast<int>(ids.user_ids.size());
        part->num_items = static_cast<int>(ids.item_ids.size());
        part->user_ids = ids.user_ids;
        part->item_ids = ids.item_ids;
        part->rebuild_user_items();
    }
    return r;
}

/// Uniform positives with one rejection-sampled negative each. A user whose
/// train set covers the whole catalog gets skipped after bounded attempts.
inline TrainBatch sample_batch(const InteractionDataset& train, std::size_t batch_size,
                               std::mt19937_64& rng) {
    if (train.interactions.empty()) throw std::invalid_argument("train split is empty");
    constexpr int kMaxRejects = 200;

    TrainBatch batch;
    batch.triples.reserve(batch_size);
    std::uniform_int_distribution<std::size_t> pos_dist(0, train.interactions.size() - 1);
    std::uniform_int_distribution<int> item_dist(0, train.num_items - 1);

    while (batch.triples.size() < batch_size) {
        auto [u, i] = train.interactions[pos_dist(rng)];
        int j = -1;
        for (int attempt = 0; attempt < kMaxRejects; ++attempt) {
            int cand = item_dist(rng);
            if (!train.user_has_item(u, cand)) {
                j = cand;
                break;
            }
        }
        if (j < 0) {
            ++batch.skipped;
            if (batch.skipped > 10 * batch_size)
                throw std::runtime_error("negative sampling stalled: users interact with all items");
            continue;
        }
        batch.triples.push_back({u, i, j});
    }
    return batch;
}

}  // namespace jgcf

#endif
