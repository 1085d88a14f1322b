#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fairjudge/graph.hpp"

namespace fairjudge {

/// Consecutive gaps of the sorted timestamps; empty for fewer than two.
std::vector<std::int64_t> compute_irt(std::vector<std::int64_t> timestamps);

/// Log2-binned histogram of inter-rating gaps. A gap of dt seconds lands in
/// bin min(floor(log2(dt + 1)), bin_count - 1).
class IrtHistogram {
public:
    explicit IrtHistogram(int bin_count);

    static int bin_of(std::int64_t gap, int bin_count);

    void add(std::int64_t gap);
    IrtHistogram& operator+=(const IrtHistogram& other);

    int bin_count() const { return static_cast<int>(counts_.size()); }
    std::span<const std::uint64_t> counts() const { return counts_; }
    std::uint64_t total() const { return total_; }

private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

IrtHistogram build_histogram(std::span<const std::int64_t> gaps, int bin_count);

/// exp(-KL(p || q)) where q is the floored global distribution and p is the
/// entity histogram smoothed toward q with pseudo-count `smoothing`.
/// Returns a value in (0, 1]; 1 means indistinguishable from the population.
double normality_score(const IrtHistogram& entity, const IrtHistogram& global,
                       double smoothing);

/// Per-entity behavioral normality in [0, 1], aligned with the graph's
/// user and product indices.
struct BehaviorPriors {
    Eigen::VectorXd user_normality;
    Eigen::VectorXd product_normality;

    /// All-ones priors (no behavioral evidence against anyone).
    static BehaviorPriors neutral(const RatingGraph& graph);
};

BehaviorPriors compute_behavior_priors(const RatingGraph& graph, int bin_count = 32,
                                       double smoothing = 1.0);

/// Reads `entity_id,side,normality`. Entities missing from the file keep 1.0;
/// ids unknown to the graph are skipped and reported through `warnings`.
BehaviorPriors load_priors(const std::filesystem::path& path, const RatingGraph& graph,
                           std::vector<std::string>* warnings = nullptr);

void write_priors(const BehaviorPriors& priors, const RatingGraph& graph, std::ostream& out);

} // namespace fairjudge
