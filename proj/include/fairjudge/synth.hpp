#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairjudge/engine.hpp"
#include "fairjudge/graph.hpp"

namespace fairjudge {

inline constexpr std::int64_t kHour = 3600;
inline constexpr std::int64_t kDay = 86400;

/// Benign network recipe. Every product has a latent quality drawn from
/// U[-1, 1]; a benign rating is clamp(quality + U[-noise, noise], -1, 1).
/// A user's consecutive ratings are spaced by gaps drawn from
/// U[min_gap, max_gap], starting at a time drawn from
/// U[start_time, start_time + start_window].
struct SynthConfig {
    Index n_users = 1000;
    Index n_products = 200;
    Index n_edges = 10000;
    std::uint64_t seed = 1;
    double noise = 0.2;
    std::int64_t min_gap = kHour;
    std::int64_t max_gap = 30 * kDay;
    std::int64_t start_time = 1'500'000'000;
    std::int64_t start_window = 365 * kDay;
};

/// A generated graph with its ground truth. product_quality is aligned with
/// the graph's product indices and is NaN for product-side shill accounts.
struct SyntheticNetwork {
    RatingGraph graph;
    LabelSet labels;
    std::vector<double> product_quality;
    SynthConfig config;
};

/// Random benign network; every user and product gets degree >= 1 and all
/// users are labeled fair. Deterministic in the config (including seed).
SyntheticNetwork generate_random(const SynthConfig& config);

enum class AttackMode {
    mutual,  ///< shills rate each other's product-side accounts
    products ///< shills rate the listed target products
};

/// Shill injection. Each shill issues edges_per_shill ratings, of which
/// floor(camouflage_fraction * edges_per_shill) are camouflage ratings that
/// follow the benign recipe and the rest are attack ratings of
/// attack_score spaced burst_gap seconds apart.
struct AttackConfig {
    Index n_shills = 40;
    AttackMode mode = AttackMode::mutual;
    std::vector<std::string> targets;
    double attack_score = 1.0;
    double camouflage_fraction = 0.0;
    std::int64_t burst_gap = 15;
    int edges_per_shill = 10;
    std::string id_prefix = "shill_";
    /// Defaults to the middle of the benign start window.
    std::optional<std::int64_t> attack_start;
};

/// Appends shills (labeled unfair) to a benign network.
SyntheticNetwork inject_fraud(const SyntheticNetwork& base, const AttackConfig& attack,
                              std::uint64_t seed);

struct ScalingRow {
    Index edges;
    double seconds;
    int iterations;
};

/// Times one solver run per size on a random graph with edges/10 users and
/// edges/20 products. The reported time is the fastest of `repeats` runs.
std::vector<ScalingRow> benchmark_scaling(std::span<const Index> sizes, const HyperParams& hp,
                                          double epsilon, std::uint64_t seed, int repeats = 1);

void write_benchmark(const std::vector<ScalingRow>& rows, std::ostream& out);

} // namespace fairjudge
