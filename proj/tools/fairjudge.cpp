// fairjudge: trust scoring for bipartite rating networks.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 non-convergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairjudge/behavior.hpp"
#include "fairjudge/csv.hpp"
#include "fairjudge/engine.hpp"
#include "fairjudge/ensemble.hpp"
#include "fairjudge/error.hpp"
#include "fairjudge/eval.hpp"
#include "fairjudge/graph.hpp"
#include "fairjudge/io.hpp"
#include "fairjudge/synth.hpp"

using namespace fairjudge;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kNonConvergence = 3;

struct InputOptions {
    std::string ratings;
    std::string unipartite;
    double rating_min = 1.0;
    double rating_max = 5.0;
    std::string priors;
    int bins = 32;
    double smoothing = 1.0;
};

struct SolverOptions {
    HyperParams hp;
    double epsilon = 1e-6;
    int max_iter = 0;
};

struct EnsembleFlags {
    int param_max = 5;
    int jobs = 1;
};

struct OutputOptions {
    std::string out;
    std::string edges_out;
    bool quiet = false;
};

void add_input(CLI::App* cmd, InputOptions& in, bool with_priors) {
    auto* r = cmd->add_option("--ratings", in.ratings,
                              "Ratings CSV (user_id,product_id,rating,timestamp)")
                  ->check(CLI::ExistingFile);
    auto* u = cmd->add_option("--unipartite", in.unipartite,
                              "Unipartite CSV (source_id,target_id,rating,timestamp), split "
                              "into user and product sides")
                  ->check(CLI::ExistingFile);
    r->excludes(u);
    cmd->add_option("--rating-min", in.rating_min, "Lowest raw rating, mapped to -1")
        ->capture_default_str();
    cmd->add_option("--rating-max", in.rating_max, "Highest raw rating, mapped to +1")
        ->capture_default_str();
    if (!with_priors)
        return;
    cmd->add_option("--priors", in.priors,
                    "Behavior priors CSV (entity_id,side,normality); computed from "
                    "inter-rating times when omitted")
        ->check(CLI::ExistingFile);
    cmd->add_option("--bins", in.bins, "Inter-rating time histogram bins")
        ->capture_default_str()
        ->check(CLI::Range(1, 64));
    cmd->add_option("--smoothing", in.smoothing, "Histogram smoothing pseudo-count")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

void add_solver(CLI::App* cmd, SolverOptions& s, bool with_params) {
    if (with_params) {
        cmd->add_option("--alpha1", s.hp.alpha1, "User cold-start prior strength")
            ->capture_default_str()
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--alpha2", s.hp.alpha2, "User behavior prior strength")
            ->capture_default_str()
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--beta1", s.hp.beta1, "Product cold-start prior strength")
            ->capture_default_str()
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--beta2", s.hp.beta2, "Product behavior prior strength")
            ->capture_default_str()
            ->check(CLI::NonNegativeNumber);
    }
    cmd->add_option("--epsilon", s.epsilon, "Convergence tolerance on the max score change")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", s.max_iter, "Iteration cap (0 = theoretical bound)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
}

void add_ensemble(CLI::App* cmd, EnsembleFlags& e) {
    cmd->add_option("--param-max", e.param_max,
                    "Grid covers every integer alpha1, alpha2, beta1, beta2 in [0, N]")
        ->capture_default_str()
        ->check(CLI::Range(0, 20));
    cmd->add_option("--jobs", e.jobs, "Parallel solver runs")
        ->envname("FAIRJUDGE_JOBS")
        ->capture_default_str()
        ->check(CLI::Range(1, 1024));
}

void add_output(CLI::App* cmd, OutputOptions& o, bool with_edges) {
    cmd->add_option("--out", o.out, "Output file (default: standard output)");
    if (with_edges)
        cmd->add_option("--edges-out", o.edges_out,
                        "Write per-rating reliability CSV (user_id,product_id,reliability)");
    cmd->add_flag("--quiet", o.quiet, "Suppress progress lines on standard error");
}

RatingGraph load_graph(const InputOptions& in) {
    if (!in.unipartite.empty())
        return split_unipartite(load_unipartite(in.unipartite, in.rating_min, in.rating_max));
    if (in.ratings.empty())
        throw CLI::RequiredError("--ratings or --unipartite");
    RatingSchema schema;
    schema.min = in.rating_min;
    schema.max = in.rating_max;
    return load_ratings(in.ratings, schema);
}

BehaviorPriors load_or_compute_priors(const InputOptions& in, const RatingGraph& graph) {
    if (in.priors.empty())
        return compute_behavior_priors(graph, in.bins, in.smoothing);
    std::vector<std::string> warnings;
    auto priors = load_priors(in.priors, graph, &warnings);
    for (const auto& w : warnings)
        std::cerr << "warning: " << w << '\n';
    return priors;
}

// Streams to --out when given, else standard output.
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    auto out = csv::open_output(path);
    fn(out);
    if (!out)
        throw DataError("failed writing " + path);
}

void write_state(const ScoreState<double>& state, const RatingGraph& graph,
                 const OutputOptions& o) {
    emit(o.out, [&](std::ostream& os) { write_scores(state, graph, os); });
    if (!o.edges_out.empty())
        emit(o.edges_out, [&](std::ostream& os) { write_reliability(state, graph, os); });
}

EnsembleResult ensemble_run(const RatingGraph& graph, const BehaviorPriors& priors,
                            const SolverOptions& s, const EnsembleFlags& e, bool quiet) {
    auto grid = build_grid(e.param_max);
    EnsembleOptions opts;
    opts.epsilon = s.epsilon;
    opts.max_iterations = s.max_iter;
    opts.jobs = e.jobs;
    if (!quiet)
        opts.on_combo = [n = grid.combos.size()](std::size_t c, const HyperParams& hp,
                                                 const ConvergenceReport& r) {
            std::cerr << "combo=" << c + 1 << '/' << n << " params=" << column_name(hp)
                      << " iterations=" << r.iterations
                      << " error=" << csv::format(r.error_trace.back()) << '\n';
        };
    return run_ensemble(graph, priors, grid, opts);
}

std::vector<Index> parse_sizes(const std::string& text) {
    std::vector<Index> sizes;
    for (auto field : csv::split(text))
        sizes.push_back(static_cast<Index>(csv::parse_int(field, 0, "size")));
    return sizes;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fairness, goodness and reliability scores for rating networks"};
    app.require_subcommand(1);

    InputOptions in;
    SolverOptions solver;
    EnsembleFlags ens;
    OutputOptions out;

    auto* priors_cmd = app.add_subcommand("priors", "Compute behavioral normality priors");
    add_input(priors_cmd, in, true);
    add_output(priors_cmd, out, false);

    auto* score_cmd = app.add_subcommand("score", "Score one hyperparameter setting");
    add_input(score_cmd, in, true);
    add_solver(score_cmd, solver, true);
    add_output(score_cmd, out, true);

    auto* ensemble_cmd = app.add_subcommand("ensemble", "Average scores over the parameter grid");
    add_input(ensemble_cmd, in, true);
    add_solver(ensemble_cmd, solver, false);
    add_ensemble(ensemble_cmd, ens);
    add_output(ensemble_cmd, out, true);

    std::string labels_path;
    auto* features_cmd =
        app.add_subcommand("features", "Export per-combination fairness as user features");
    add_input(features_cmd, in, true);
    add_solver(features_cmd, solver, false);
    add_ensemble(features_cmd, ens);
    add_output(features_cmd, out, false);
    features_cmd->add_option("--labels", labels_path, "Labels CSV appended as a label column")
        ->check(CLI::ExistingFile);

    std::string scores_path, edges_path, report_out, hist_out, positive = "unfair",
                                                               selector = "labels";
    int top = 0, hist_bins = 20, hist_k = 1000;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate fairness scores against labels");
    eval_cmd->add_option("--scores", scores_path, "Scores CSV (entity_id,side,score)")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--labels", labels_path, "Labels CSV (user_id,label)")
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--positive", positive, "Positive class for AP and AUC")
        ->capture_default_str()
        ->check(CLI::IsMember({"fair", "unfair"}));
    eval_cmd->add_option("--top", top, "Write the K least fair users (rank,user_id,fairness)")
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--report-out", report_out, "Destination of the --top report");
    add_input(eval_cmd, in, false);
    eval_cmd->add_option("--edges", edges_path,
                         "Reliability CSV; with --ratings enables the reliability histogram")
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--hist-out", hist_out, "Reliability histogram CSV destination");
    eval_cmd->add_option("--hist-bins", hist_bins, "Reliability histogram bins")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--selector", selector, "Fair/unfair sets for the histogram")
        ->capture_default_str()
        ->check(CLI::IsMember({"labels", "topk"}));
    eval_cmd->add_option("--hist-k", hist_k, "Set size for --selector topk")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    SynthConfig synth;
    AttackConfig attack;
    attack.n_shills = 0;
    std::string targets, labels_out;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic network with planted shills");
    gen_cmd->add_option("--users", synth.n_users, "Benign users")->capture_default_str();
    gen_cmd->add_option("--products", synth.n_products, "Benign products")->capture_default_str();
    gen_cmd->add_option("--edges", synth.n_edges, "Benign ratings")->capture_default_str();
    gen_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    gen_cmd->add_option("--shills", attack.n_shills, "Injected shill accounts")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--shill-edges", attack.edges_per_shill, "Ratings per shill")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    gen_cmd->add_option("--camouflage", attack.camouflage_fraction,
                        "Fraction of each shill's ratings that mimic benign users")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--burst-gap", attack.burst_gap, "Seconds between attack ratings")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--attack-score", attack.attack_score, "Score of attack ratings")
        ->capture_default_str()
        ->check(CLI::Range(-1.0, 1.0));
    gen_cmd->add_option("--targets", targets,
                        "Comma-separated target products (default: shills rate each other)");
    gen_cmd->add_option("--out", out.out, "Ratings CSV destination (scores on [-1, 1])")
        ->required();
    gen_cmd->add_option("--labels-out", labels_out, "Labels CSV destination");

    std::string sizes_text = "10000,20000,40000,80000";
    int repeats = 3;
    std::uint64_t bench_seed = 1;
    auto* bench_cmd = app.add_subcommand("bench", "Time single runs on growing random graphs");
    bench_cmd->add_option("--sizes", sizes_text, "Comma-separated ascending edge counts")
        ->capture_default_str();
    bench_cmd->add_option("--seed", bench_seed, "Random seed")->capture_default_str();
    bench_cmd->add_option("--repeats", repeats, "Runs per size; the fastest is reported")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_solver(bench_cmd, solver, true);
    bench_cmd->add_option("--out", out.out, "Output file (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (*priors_cmd) {
            auto graph = load_graph(in);
            auto priors = load_or_compute_priors(in, graph);
            emit(out.out, [&](std::ostream& os) { write_priors(priors, graph, os); });
        } else if (*score_cmd) {
            auto graph = load_graph(in);
            auto priors = load_or_compute_priors(in, graph);
            RunOptions<double> opts;
            opts.epsilon = solver.epsilon;
            opts.max_iterations = solver.max_iter;
            if (!out.quiet)
                opts.on_iteration = [](int t, const ScoreState<double>&, double error) {
                    std::cerr << "iteration=" << t << " error=" << csv::format(error) << '\n';
                };
            auto result = run<double>(graph, priors, solver.hp, opts);
            if (!result.report.converged) {
                std::cerr << "error: no convergence within " << result.report.max_iterations
                          << " iterations\n";
                return kNonConvergence;
            }
            write_state(result.state, graph, out);
        } else if (*ensemble_cmd) {
            auto graph = load_graph(in);
            auto priors = load_or_compute_priors(in, graph);
            auto result = ensemble_run(graph, priors, solver, ens, out.quiet);
            write_state(result.average, graph, out);
        } else if (*features_cmd) {
            auto graph = load_graph(in);
            std::optional<LabelSet> labels;
            if (!labels_path.empty()) {
                labels = load_labels(labels_path);
                labels->resolve(graph.users());
            }
            auto priors = load_or_compute_priors(in, graph);
            auto result = ensemble_run(graph, priors, solver, ens, out.quiet);
            emit(out.out, [&](std::ostream& os) {
                export_features(result.features, graph.users(), labels ? &*labels : nullptr, os);
            });
        } else if (*eval_cmd) {
            auto scores = read_user_scores(scores_path);
            std::optional<LabelSet> labels;
            if (!labels_path.empty())
                labels = load_labels(labels_path);
            if (labels) {
                Label pos = parse_label(positive);
                std::printf("AP=%.6f AUC=%.6f\n", average_precision(scores, *labels, pos),
                            roc_auc(scores, *labels, pos));
            }
            EntityTable users;
            for (const auto& id : scores.ids)
                users.intern(id);
            Eigen::Map<const Eigen::VectorXd> fairness(scores.fairness.data(),
                                                       static_cast<Index>(scores.fairness.size()));
            if (top > 0)
                emit(report_out, [&](std::ostream& os) {
                    write_rank_report(rank_report(fairness, top), users, os);
                });
            if (!hist_out.empty()) {
                if (edges_path.empty())
                    throw CLI::RequiredError("--edges (for --hist-out)");
                auto graph = load_graph(in);
                auto reliability = read_reliability(edges_path, graph);
                UserSelection sel;
                if (selector == "labels") {
                    if (!labels)
                        throw CLI::RequiredError("--labels (for --selector labels)");
                    sel = select_by_labels(graph.users(), *labels);
                } else {
                    Eigen::VectorXd f(graph.num_users());
                    for (Index u = 0; u < graph.num_users(); ++u) {
                        auto i = users.find(graph.users().id(u));
                        if (!i)
                            throw DataError("no score for user " + graph.users().id(u));
                        f[u] = fairness[*i];
                    }
                    sel = select_top_k(f, hist_k);
                }
                emit(hist_out, [&](std::ostream& os) {
                    write_histogram(reliability_distribution(graph, reliability, sel, hist_bins),
                                    os);
                });
            }
        } else if (*gen_cmd) {
            auto net = generate_random(synth);
            if (attack.n_shills > 0) {
                if (!targets.empty()) {
                    attack.mode = AttackMode::products;
                    for (auto t : csv::split(targets))
                        attack.targets.emplace_back(t);
                }
                net = inject_fraud(net, attack, synth.seed + 1);
            }
            write_ratings(net.graph, out.out);
            if (!labels_out.empty()) {
                auto lo = csv::open_output(labels_out);
                write_labels(net.labels, lo);
            }
        } else if (*bench_cmd) {
            auto rows = benchmark_scaling(parse_sizes(sizes_text), solver.hp, solver.epsilon,
                                          bench_seed, repeats);
            emit(out.out, [&](std::ostream& os) { write_benchmark(rows, os); });
        }
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
    return 0;
}
