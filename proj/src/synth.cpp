#include "fairjudge/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <limits>
#include <random>

#include "fairjudge/csv.hpp"
#include "fairjudge/error.hpp"

namespace fairjudge {

namespace {

// Explicit mappings from the engine's raw output keep generated graphs
// identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection to avoid modulo bias.
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

double benign_score(Rng& rng, double quality, double noise) {
    return std::clamp(quality + rng.uniform(-noise, noise), -1.0, 1.0);
}

std::string user_id(Index i) { return "u" + std::to_string(i); }
std::string product_id(Index i) { return "p" + std::to_string(i); }

struct PendingEdge {
    std::string user;
    std::string product;
    double score;
    std::int64_t timestamp;
};

RatingGraph build_sorted(std::vector<PendingEdge> edges) {
    std::stable_sort(edges.begin(), edges.end(), [](const PendingEdge& a, const PendingEdge& b) {
        return a.timestamp < b.timestamp;
    });
    GraphBuilder builder;
    for (const auto& e : edges)
        builder.add(e.user, e.product, e.score, e.timestamp);
    return std::move(builder).build();
}

} // namespace

SyntheticNetwork generate_random(const SynthConfig& config) {
    if (config.n_users < 1 || config.n_products < 1 || config.n_edges < 1)
        throw DataError("synthetic network needs positive user, product and edge counts");
    if (config.n_edges < std::max(config.n_users, config.n_products))
        throw DataError("n_edges must be >= max(n_users, n_products)");
    if (!(config.noise >= 0.0) || config.min_gap < 0 || config.max_gap < config.min_gap ||
        config.start_window < 0)
        throw DataError("invalid benign rating model");

    Rng rng(config.seed);
    std::vector<double> quality(static_cast<std::size_t>(config.n_products));
    for (auto& q : quality)
        q = rng.uniform(-1.0, 1.0);

    // The first max(n_users, n_products) edges cover every entity once.
    std::vector<Index> product_perm(static_cast<std::size_t>(config.n_products));
    std::iota(product_perm.begin(), product_perm.end(), Index{0});
    rng.shuffle(product_perm);

    std::vector<std::pair<Index, Index>> pairs;
    pairs.reserve(static_cast<std::size_t>(config.n_edges));
    const Index cover = std::max(config.n_users, config.n_products);
    for (Index k = 0; k < cover; ++k)
        pairs.emplace_back(k % config.n_users,
                           product_perm[static_cast<std::size_t>(k % config.n_products)]);
    for (Index k = cover; k < config.n_edges; ++k)
        pairs.emplace_back(static_cast<Index>(rng.below(static_cast<std::uint64_t>(config.n_users))),
                           static_cast<Index>(rng.below(static_cast<std::uint64_t>(config.n_products))));

    std::vector<std::int64_t> clock(static_cast<std::size_t>(config.n_users));
    for (auto& c : clock)
        c = rng.between(config.start_time, config.start_time + config.start_window);

    std::vector<PendingEdge> edges;
    edges.reserve(pairs.size());
    std::vector<bool> started(static_cast<std::size_t>(config.n_users), false);
    for (auto [u, p] : pairs) {
        auto& c = clock[static_cast<std::size_t>(u)];
        if (started[static_cast<std::size_t>(u)])
            c += rng.between(config.min_gap, config.max_gap);
        started[static_cast<std::size_t>(u)] = true;
        edges.push_back({user_id(u), product_id(p),
                         benign_score(rng, quality[static_cast<std::size_t>(p)], config.noise), c});
    }

    auto graph = build_sorted(std::move(edges));
    std::vector<double> aligned(quality.size());
    for (Index i = 0; i < config.n_products; ++i)
        aligned[static_cast<std::size_t>(*graph.products().find(product_id(i)))] =
            quality[static_cast<std::size_t>(i)];
    LabelSet labels;
    for (const auto& id : graph.users().ids())
        labels.insert(id, Label::fair);
    return {std::move(graph), std::move(labels), std::move(aligned), config};
}

SyntheticNetwork inject_fraud(const SyntheticNetwork& base, const AttackConfig& attack,
                              std::uint64_t seed) {
    if (attack.n_shills < 1)
        throw DataError("need at least one shill");
    if (!(attack.camouflage_fraction >= 0.0 && attack.camouflage_fraction <= 1.0))
        throw DataError("camouflage fraction must lie in [0, 1]");
    if (attack.edges_per_shill < 1)
        throw DataError("edges per shill must be >= 1");
    if (!(attack.attack_score >= -1.0 && attack.attack_score <= 1.0))
        throw DataError("attack score must lie in [-1, 1]");
    if (attack.burst_gap < 0)
        throw DataError("burst gap must be >= 0");

    const auto& g = base.graph;
    std::vector<std::string> shills;
    for (Index i = 0; i < attack.n_shills; ++i) {
        auto id = attack.id_prefix + std::to_string(i);
        if (g.users().find(id) || g.products().find(id))
            throw DataError("shill id '" + id + "' already present in the graph");
        shills.push_back(id);
    }
    std::vector<std::string> targets;
    if (attack.mode == AttackMode::products) {
        if (attack.targets.empty())
            throw DataError("product attack needs target products");
        for (const auto& t : attack.targets) {
            if (!g.products().find(t))
                throw DataError("target product '" + t + "' not in graph");
            targets.push_back(t);
        }
    }

    const int n_camo = static_cast<int>(
        std::floor(attack.camouflage_fraction * attack.edges_per_shill + 1e-9));
    const int n_attack = attack.edges_per_shill - n_camo;
    if (attack.mode == AttackMode::mutual && n_attack > 0 && attack.n_shills < 2)
        throw DataError("mutual attack needs at least two shills");
    std::vector<Index> benign_products;
    for (std::size_t p = 0; p < base.product_quality.size(); ++p)
        if (!std::isnan(base.product_quality[p]))
            benign_products.push_back(static_cast<Index>(p));
    if (n_camo > 0 && benign_products.empty())
        throw DataError("camouflage needs benign products");

    const auto& cfg = base.config;
    const std::int64_t start =
        attack.attack_start.value_or(cfg.start_time + cfg.start_window / 2);

    Rng rng(seed);
    std::vector<PendingEdge> edges;
    for (const auto& e : g.edges())
        edges.push_back({g.users().id(e.user), g.products().id(e.product), e.score, e.timestamp});

    for (Index i = 0; i < attack.n_shills; ++i) {
        const auto& shill = shills[static_cast<std::size_t>(i)];
        std::int64_t t = start + i * attack.burst_gap;
        for (int k = 0; k < n_attack; ++k) {
            std::string target;
            if (attack.mode == AttackMode::mutual) {
                // Walk the ring of other shills: i+1, i+2, ... skipping i.
                Index j = (i + 1 + k % (attack.n_shills - 1)) % attack.n_shills;
                target = shills[static_cast<std::size_t>(j)];
            } else {
                target = targets[static_cast<std::size_t>(k) % targets.size()];
            }
            edges.push_back({shill, target, attack.attack_score, t});
            t += attack.burst_gap;
        }
        std::int64_t c = rng.between(cfg.start_time, cfg.start_time + cfg.start_window);
        for (int k = 0; k < n_camo; ++k) {
            if (k > 0)
                c += rng.between(cfg.min_gap, cfg.max_gap);
            Index p = benign_products[rng.below(benign_products.size())];
            edges.push_back({shill, g.products().id(p),
                             benign_score(rng, base.product_quality[static_cast<std::size_t>(p)],
                                          cfg.noise),
                             c});
        }
    }

    auto graph = build_sorted(std::move(edges));
    std::vector<double> quality(static_cast<std::size_t>(graph.num_products()),
                                std::numeric_limits<double>::quiet_NaN());
    for (Index p = 0; p < graph.num_products(); ++p)
        if (auto old = g.products().find(graph.products().id(p)))
            quality[static_cast<std::size_t>(p)] = base.product_quality[static_cast<std::size_t>(*old)];

    LabelSet labels = base.labels;
    for (const auto& s : shills)
        labels.insert(s, Label::unfair);
    return {std::move(graph), std::move(labels), std::move(quality), cfg};
}

std::vector<ScalingRow> benchmark_scaling(std::span<const Index> sizes, const HyperParams& hp,
                                          double epsilon, std::uint64_t seed, int repeats) {
    if (!std::is_sorted(sizes.begin(), sizes.end()))
        throw std::invalid_argument("benchmark sizes must be ascending");
    std::vector<ScalingRow> rows;
    for (Index edges : sizes) {
        SynthConfig cfg;
        cfg.n_edges = edges;
        cfg.n_users = std::max<Index>(1, edges / 10);
        cfg.n_products = std::max<Index>(1, edges / 20);
        cfg.seed = seed;
        auto net = generate_random(cfg);
        auto priors = compute_behavior_priors(net.graph);
        RunOptions<double> opts;
        opts.epsilon = epsilon;
        double best = std::numeric_limits<double>::infinity();
        int iterations = 0;
        for (int r = 0; r < std::max(1, repeats); ++r) {
            auto t0 = std::chrono::steady_clock::now();
            auto result = run<double>(net.graph, priors, hp, opts);
            auto t1 = std::chrono::steady_clock::now();
            best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
            iterations = result.report.iterations;
        }
        rows.push_back({edges, best, iterations});
    }
    return rows;
}

void write_benchmark(const std::vector<ScalingRow>& rows, std::ostream& out) {
    out << "edges,seconds,iterations\n";
    for (const auto& r : rows)
        out << r.edges << ',' << csv::format(r.seconds) << ',' << r.iterations << '\n';
}

} // namespace fairjudge
