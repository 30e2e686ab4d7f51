// Command-line front end for the JGCF pipeline: split, train, evaluate,
// analyze, response, sweep. Every run writes its resolved configuration next
// to its outputs for provenance.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "jgcf/checkpoint.hpp"
#include "jgcf/dataset.hpp"
#include "jgcf/evaluation.hpp"
#include "jgcf/graph.hpp"
#include "jgcf/polybasis.hpp"
#include "jgcf/propagation.hpp"
#include "jgcf/rng.hpp"
#include "jgcf/spectral.hpp"
#include "jgcf/training.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace jgcf;

namespace {

struct RunConfig {
    TrainConfig train;
    FilterParams filter;

    static RunConfig from_file(const fs::path& path) {
        RunConfig rc;
        auto kv = parse_config(path);
        for (const auto& [k, v] : kv) {
            if (k == "learning_rate") rc.train.learning_rate = std::stod(v);
            else if (k == "l2_lambda") rc.train.l2_lambda = std::stod(v);
            else if (k == "batch_size") rc.train.batch_size = std::stoul(v);
            else if (k == "max_epochs") rc.train.max_epochs = std::stoi(v);
            else if (k == "patience") rc.train.patience = std::stoi(v);
            else if (k == "seed") rc.train.seed = std::stoull(v);
            else if (k == "embedding_dim") rc.train.embedding_dim = std::stoi(v);
            else if (k == "adam_beta1") rc.train.adam_beta1 = std::stod(v);
            else if (k == "adam_beta2") rc.train.adam_beta2 = std::stod(v);
            else if (k == "adam_eps") rc.train.adam_eps = std::stod(v);
            else if (k == "basis") rc.filter.basis = parse_basis(v);
            else if (k == "order") rc.filter.order = std::stoi(v);
            else if (k == "a") rc.filter.a = std::stod(v);
            else if (k == "b") rc.filter.b = std::stod(v);
            else if (k == "alpha") rc.filter.alpha = std::stod(v);
            else if (k == "discount") rc.filter.discount = std::stod(v);
            else throw std::runtime_error("unknown config key: " + k);
        }
        rc.train.validate();
        rc.filter.validate();
        return rc;
    }

    std::map<std::string, std::string> to_map() const {
        auto fmt = [](double x) {
            std::ostringstream ss;
            ss << x;
            return ss.str();
        };
        return {{"learning_rate", fmt(train.learning_rate)},
                {"l2_lambda", fmt(train.l2_lambda)},
                {"batch_size", std::to_string(train.batch_size)},
                {"max_epochs", std::to_string(train.max_epochs)},
                {"patience", std::to_string(train.patience)},
                {"seed", std::to_string(train.seed)},
                {"embedding_dim", std::to_string(train.embedding_dim)},
                {"adam_beta1", fmt(train.adam_beta1)},
                {"adam_beta2", fmt(train.adam_beta2)},
                {"adam_eps", fmt(train.adam_eps)},
                {"basis", basis_name(filter.basis)},
                {"order", std::to_string(filter.order)},
                {"a", fmt(filter.a)},
                {"b", fmt(filter.b)},
                {"alpha", fmt(filter.alpha)},
                {"discount", fmt(filter.discount)}};
    }
};

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

// "jacobi:1.0:1.0,monomial,chebyshev" -> FilterParams list with shared order.
std::vector<FilterParams> parse_bases(const std::string& spec, int order) {
    std::vector<FilterParams> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        FilterParams fp;
        fp.order = order;
        auto c1 = tok.find(':');
        if (c1 == std::string::npos) {
            fp.basis = parse_basis(tok);
        } else {
            fp.basis = parse_basis(tok.substr(0, c1));
            auto c2 = tok.find(':', c1 + 1);
            if (c2 == std::string::npos) throw std::runtime_error("basis spec needs a:b: " + tok);
            fp.a = std::stod(tok.substr(c1 + 1, c2 - c1 - 1));
            fp.b = std::stod(tok.substr(c2 + 1));
        }
        out.push_back(fp);
    }
    return out;
}

FitResult train_once(const SplitResult& split, const RunConfig& rc) {
    auto adj = normalize_adjacency(build_adjacency(split.train));
    return fit(split.train, split.valid, adj, rc.filter, rc.train);
}

void write_history(const std::vector<EpochRecord>& history, const fs::path& path) {
    std::ofstream out(path);
    for (const auto& r : history) {
        json j{{"epoch", r.epoch}, {"loss", r.mean_loss}, {"valid_recall20", r.valid_recall20}};
        out << j.dump() << '\n';
    }
}

json metrics_to_json(const MetricsReport& report) {
    json j;
    j["num_evaluated_users"] = report.num_evaluated_users;
    for (const auto& [k, v] : report.recall) j["recall"][std::to_string(k)] = v;
    for (const auto& [k, v] : report.ndcg) j["ndcg"][std::to_string(k)] = v;
    return j;
}

int cmd_split(const fs::path& input, double train_frac, double valid_frac,
              std::uint64_t seed, const fs::path& out_dir) {
    auto ds = load_interactions(input);
    std::cerr << "loaded " << ds.num_users << " users, " << ds.num_items << " items, "
              << ds.interactions.size() << " interactions\n";
    auto split = split_dataset(ds, train_frac, valid_frac, make_stream(seed, "split")());
    fs::create_directories(out_dir);
    save_interactions(split.train, out_dir / "train.tsv");
    save_interactions(split.valid, out_dir / "valid.tsv");
    save_interactions(split.test, out_dir / "test.tsv");
    write_config({{"input", input.string()},
                  {"train_frac", std::to_string(train_frac)},
                  {"valid_frac", std::to_string(valid_frac)},
                  {"seed", std::to_string(seed)}},
                 out_dir / "config.resolved");
    return 0;
}

int cmd_train(const fs::path& config, const fs::path& data_dir, const fs::path& out_dir) {
    RunConfig rc = config.empty() ? RunConfig{} : RunConfig::from_file(config);
    auto split = load_split_dir(data_dir);
    auto result = train_once(split, rc);

    fs::create_directories(out_dir);
    Checkpoint ck;
    ck.e0 = result.e0;
    ck.num_users = static_cast<std::uint32_t>(split.train.num_users);
    ck.filter = rc.filter;
    save_checkpoint(ck, out_dir / "checkpoint.bin");
    write_history(result.history, out_dir / "history.jsonl");
    write_config(rc.to_map(), out_dir / "config.resolved");
    if (!result.history.empty())
        std::cerr << "trained " << result.history.size() << " epochs, final loss "
                  << result.history.back().mean_loss << "\n";
    return 0;
}

int cmd_evaluate(const fs::path& checkpoint, const fs::path& data_dir,
                 const std::string& ks_str, const fs::path& out_file) {
    auto ck = load_checkpoint(checkpoint);
    auto split = load_split_dir(data_dir);
    auto adj = normalize_adjacency(build_adjacency(split.train));
    if (adj.n != ck.e0.rows())
        throw std::runtime_error("checkpoint node count does not match dataset");
    auto stack = forward(adj, ck.e0, ck.filter);
    // test-time protocol: mask train + valid history
    auto report = evaluate(stack.final, split.train.num_users, split.test,
                           {&split.train, &split.valid}, parse_int_list(ks_str));
    json j = metrics_to_json(report);
    if (out_file.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::ofstream(out_file) << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_analyze(const fs::path& data_dir, const std::string& bases_spec, int order,
                std::size_t max_nodes, int num_seeds, std::uint64_t seed,
                const fs::path& out_dir) {
    auto split = load_split_dir(data_dir);
    auto bases = parse_bases(bases_spec, order);
    BfsConfig cfg;
    cfg.num_seeds = num_seeds;
    cfg.max_nodes = max_nodes;
    auto rng = make_stream(seed, "bfs");
    auto analysis = correlation_table(split.train, split.test, bases, cfg, rng);

    fs::create_directories(out_dir);
    {
        std::ofstream out(out_dir / "scatter.csv");
        out << "lambda,target\n";
        for (int i = 0; i < analysis.dec.lambda.size(); ++i)
            out << analysis.dec.lambda(i) << ',' << analysis.targets(i) << '\n';
    }
    {
        std::ofstream out(out_dir / "correlations.csv");
        out << "basis,pearson_r\n";
        for (const auto& [name, r] : analysis.correlations) out << name << ',' << r << '\n';
    }
    write_config({{"bases", bases_spec},
                  {"order", std::to_string(order)},
                  {"max_nodes", std::to_string(max_nodes)},
                  {"seeds", std::to_string(num_seeds)},
                  {"seed", std::to_string(seed)}},
                 out_dir / "config.resolved");
    for (const auto& [name, r] : analysis.correlations)
        std::cout << name << "\t" << r << '\n';
    return 0;
}

int cmd_response(const std::string& basis, double a, double b, int order, double alpha,
                 const std::string& mode, int grid_points, const fs::path& out_file) {
    FilterParams fp;
    fp.basis = parse_basis(basis);
    fp.a = a;
    fp.b = b;
    fp.order = order;
    fp.alpha = alpha;
    std::vector<double> grid;
    for (int g = 0; g < grid_points; ++g)
        grid.push_back(-1.0 + 2.0 * g / (grid_points - 1));
    auto resp_mode = mode == "band_pass" ? ResponseMode::band_pass : ResponseMode::band_stop;
    auto curve = filter_response(fp, resp_mode, grid);
    std::ofstream out(out_file);
    out << "x,response\n";
    for (auto [x, r] : curve) out << x << ',' << r << '\n';
    return 0;
}

int cmd_sweep(const fs::path& config, const fs::path& data_dir, const fs::path& out_dir,
              const std::string& a_grid, const std::string& b_grid,
              const std::string& alpha_grid, const std::string& k_grid) {
    RunConfig base = config.empty() ? RunConfig{} : RunConfig::from_file(config);
    auto split = load_split_dir(data_dir);
    fs::create_directories(out_dir);

    double best_recall = -1.0;
    RunConfig best = base;
    json runs = json::array();
    for (double a : parse_double_list(a_grid))
        for (double b : parse_double_list(b_grid))
            for (double alpha : parse_double_list(alpha_grid))
                for (int k : parse_int_list(k_grid)) {
                    RunConfig rc = base;
                    rc.filter.a = a;
                    rc.filter.b = b;
                    rc.filter.alpha = alpha;
                    rc.filter.order = k;
                    auto result = train_once(split, rc);
                    double recall = 0.0;
                    for (const auto& r : result.history)
                        recall = std::max(recall, r.valid_recall20);
                    runs.push_back({{"a", a}, {"b", b}, {"alpha", alpha}, {"K", k},
                                    {"valid_recall20", recall}});
                    std::cerr << "a=" << a << " b=" << b << " alpha=" << alpha << " K=" << k
                              << " -> valid Recall@20 " << recall << '\n';
                    if (recall > best_recall) {
                        best_recall = recall;
                        best = rc;
                    }
                }
    json summary{{"runs", runs}, {"best", {{"a", best.filter.a}, {"b", best.filter.b},
                 {"alpha", best.filter.alpha}, {"K", best.filter.order},
                 {"valid_recall20", best_recall}}}};
    std::ofstream(out_dir / "sweep.json") << summary.dump(2) << '\n';
    write_config(best.to_map(), out_dir / "config.resolved");
    std::cout << summary["best"].dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jacobi polynomial spectral-filter collaborative filtering"};
    app.require_subcommand(1);

    // split
    auto* split = app.add_subcommand("split", "split raw interactions into train/valid/test");
    fs::path split_input, split_out;
    double train_frac = 0.8, valid_frac = 0.1;
    std::uint64_t split_seed = 2023;
    split->add_option("--input", split_input, "pair-per-line interaction file")->required();
    split->add_option("--train-frac", train_frac);
    split->add_option("--valid-frac", valid_frac);
    split->add_option("--seed", split_seed);
    split->add_option("--out", split_out, "output directory")->required();

    // train
    auto* train = app.add_subcommand("train", "train JGCF embeddings");
    fs::path train_config, train_data, train_out;
    train->add_option("--config", train_config, "key = value config file");
    train->add_option("--data", train_data, "split directory")->required();
    train->add_option("--out", train_out, "output directory")->required();

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "full-ranking top-K evaluation");
    fs::path eval_ck, eval_data, eval_out;
    std::string eval_ks = "10,20,50";
    eval->add_option("--checkpoint", eval_ck)->required();
    eval->add_option("--data", eval_data)->required();
    eval->add_option("--ks", eval_ks);
    eval->add_option("--out", eval_out, "metrics JSON path (stdout if omitted)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "spectral transformation analysis");
    fs::path an_data, an_out;
    std::string an_bases = "jacobi:1.0:1.0,monomial,chebyshev,legendre,bernstein";
    int an_order = 3, an_seeds = 4;
    std::size_t an_max_nodes = 3000;
    std::uint64_t an_seed = 17;
    analyze->add_option("--data", an_data)->required();
    analyze->add_option("--bases", an_bases);
    analyze->add_option("--order", an_order);
    analyze->add_option("--max-nodes", an_max_nodes);
    analyze->add_option("--seeds", an_seeds);
    analyze->add_option("--seed", an_seed);
    analyze->add_option("--out", an_out)->required();

    // response
    auto* response = app.add_subcommand("response", "filter response curve CSV");
    std::string r_basis = "jacobi", r_mode = "band_stop";
    double r_a = 1.0, r_b = 1.0, r_alpha = 0.1;
    int r_order = 3, r_grid = 401;
    fs::path r_out = "curve.csv";
    response->add_option("--basis", r_basis);
    response->add_option("--a", r_a);
    response->add_option("--b", r_b);
    response->add_option("--order", r_order);
    response->add_option("--alpha", r_alpha);
    response->add_option("--mode", r_mode)->check(CLI::IsMember({"band_stop", "band_pass"}));
    response->add_option("--grid-points", r_grid)->check(CLI::Range(2, 100000));
    response->add_option("--out", r_out);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "grid search over (a, b, alpha, K)");
    fs::path sw_config, sw_data, sw_out;
    std::string sw_a = "-0.5,0,0.5,1.0,1.5,2.0", sw_b = "-0.5,0,0.5,1.0,1.5,2.0";
    std::string sw_alpha = "0.1", sw_k = "1,2,3,4";
    sweep->add_option("--config", sw_config);
    sweep->add_option("--data", sw_data)->required();
    sweep->add_option("--out", sw_out)->required();
    sweep->add_option("--a-grid", sw_a);
    sweep->add_option("--b-grid", sw_b);
    sweep->add_option("--alpha-grid", sw_alpha);
    sweep->add_option("--k-grid", sw_k);

    CLI11_PARSE(app, argc, argv);

    try {
        if (split->parsed())
            return cmd_split(split_input, train_frac, valid_frac, split_seed, split_out);
        if (train->parsed()) return cmd_train(train_config, train_data, train_out);
        if (eval->parsed()) return cmd_evaluate(eval_ck, eval_data, eval_ks, eval_out);
        if (analyze->parsed())
            return cmd_analyze(an_data, an_bases, an_order, an_max_nodes, an_seeds, an_seed,
                               an_out);
        if (response->parsed())
            return cmd_response(r_basis, r_a, r_b, r_order, r_alpha, r_mode, r_grid, r_out);
        if (sweep->parsed())
            return cmd_sweep(sw_config, sw_data, sw_out, sw_a, sw_b, sw_alpha, sw_k);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
