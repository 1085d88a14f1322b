#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fairjudge/graph.hpp"

namespace fairjudge {

/// Per-user fairness scores; lower fairness is more suspicious. Position in
/// the vectors is the tie-breaking order.
struct RankedScores {
    std::vector<std::string> ids;
    std::vector<double> fairness;

    static RankedScores from(const EntityTable& users, const Eigen::VectorXd& fairness);
};

/// Non-interpolated average precision over the labeled users. With
/// positive == unfair the ranking is by ascending fairness, otherwise by
/// descending fairness; ties keep their RankedScores order.
double average_precision(const RankedScores& scores, const LabelSet& labels, Label positive);

/// Probability that a random positive outranks a random negative (ties
/// count one half), via the rank-sum statistic over the labeled users.
double roc_auc(const RankedScores& scores, const LabelSet& labels, Label positive);

struct RankEntry {
    int rank;
    Index user;
    double fairness;
};

/// The k least fair users, ascending fairness, ties by index.
std::vector<RankEntry> rank_report(const Eigen::VectorXd& fairness, int k);
void write_rank_report(const std::vector<RankEntry>& report, const EntityTable& users,
                       std::ostream& out);

struct UserSelection {
    std::vector<Index> fair;
    std::vector<Index> unfair;
};

UserSelection select_by_labels(const EntityTable& users, const LabelSet& labels);

/// The k most unfair users and the k fairest of the remaining users.
UserSelection select_top_k(const Eigen::VectorXd& fairness, int k);

struct ReliabilityHistogram {
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<double> freq_fair;
    std::vector<double> freq_unfair;
};

/// Normalized histograms over [0, 1] of the reliabilities of every rating
/// given by each user set. `reliability` is aligned with graph.edges().
ReliabilityHistogram reliability_distribution(const RatingGraph& graph,
                                              const Eigen::VectorXd& reliability,
                                              const UserSelection& selection, int bins = 20);
void write_histogram(const ReliabilityHistogram& hist, std::ostream& out);

} // namespace fairjudge
