#include "fairjudge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "fairjudge/csv.hpp"
#include "fairjudge/error.hpp"

namespace fairjudge {

RankedScores RankedScores::from(const EntityTable& users, const Eigen::VectorXd& fairness) {
    RankedScores out;
    out.ids = users.ids();
    out.fairness.assign(fairness.data(), fairness.data() + fairness.size());
    return out;
}

namespace {

struct Labeled {
    double key; // larger = ranked earlier
    bool positive;
};

// Labeled users in RankedScores order with a ranking key oriented so that
// larger keys rank first.
std::vector<Labeled> labeled_population(const RankedScores& scores, const LabelSet& labels,
                                        Label positive) {
    if (scores.ids.size() != scores.fairness.size())
        throw std::invalid_argument("ranked scores are misaligned");
    EntityTable table;
    for (const auto& id : scores.ids)
        table.intern(id);
    if (table.size() != static_cast<Index>(scores.ids.size()))
        throw DataError("duplicate user id in scores");
    auto resolved = labels.resolve(table);

    std::vector<Labeled> out;
    for (std::size_t i = 0; i < resolved.size(); ++i) {
        if (!resolved[i])
            continue;
        double f = scores.fairness[i];
        if (std::isnan(f))
            throw DataError("NaN score for user " + scores.ids[i]);
        out.push_back({positive == Label::unfair ? -f : f, *resolved[i] == positive});
    }
    return out;
}

} // namespace

double average_precision(const RankedScores& scores, const LabelSet& labels, Label positive) {
    auto pop = labeled_population(scores, labels, positive);
    std::stable_sort(pop.begin(), pop.end(),
                     [](const Labeled& a, const Labeled& b) { return a.key > b.key; });
    std::size_t positives = 0;
    double sum = 0.0;
    for (std::size_t k = 0; k < pop.size(); ++k) {
        if (pop[k].positive) {
            ++positives;
            sum += static_cast<double>(positives) / static_cast<double>(k + 1);
        }
    }
    if (positives == 0)
        throw DataError("no positive (" + std::string(to_string(positive)) +
                        ") users among the scored users");
    return sum / static_cast<double>(positives);
}

double roc_auc(const RankedScores& scores, const LabelSet& labels, Label positive) {
    auto pop = labeled_population(scores, labels, positive);
    std::sort(pop.begin(), pop.end(),
              [](const Labeled& a, const Labeled& b) { return a.key < b.key; });
    double n_pos = 0.0, n_neg = 0.0, pos_rank_sum = 0.0;
    for (std::size_t i = 0; i < pop.size();) {
        std::size_t j = i;
        while (j < pop.size() && pop[j].key == pop[i].key)
            ++j;
        // Midrank of the tie block, 1-based.
        double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (pop[k].positive) {
                n_pos += 1.0;
                pos_rank_sum += midrank;
            } else {
                n_neg += 1.0;
            }
        }
        i = j;
    }
    if (n_pos == 0.0 || n_neg == 0.0)
        throw DataError("ROC AUC needs both positive and negative labeled users");
    return (pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

namespace {

std::vector<Index> ascending_order(const Eigen::VectorXd& fairness) {
    std::vector<Index> order(static_cast<std::size_t>(fairness.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return fairness[a] < fairness[b]; });
    return order;
}

} // namespace

std::vector<RankEntry> rank_report(const Eigen::VectorXd& fairness, int k) {
    if (k < 1)
        throw std::invalid_argument("k must be >= 1");
    auto order = ascending_order(fairness);
    order.resize(std::min(order.size(), static_cast<std::size_t>(k)));
    std::vector<RankEntry> out;
    for (std::size_t i = 0; i < order.size(); ++i)
        out.push_back({static_cast<int>(i + 1), order[i], fairness[order[i]]});
    return out;
}

void write_rank_report(const std::vector<RankEntry>& report, const EntityTable& users,
                       std::ostream& out) {
    out << "rank,user_id,fairness\n";
    for (const auto& r : report)
        out << r.rank << ',' << users.id(r.user) << ',' << csv::format(r.fairness) << '\n';
}

UserSelection select_by_labels(const EntityTable& users, const LabelSet& labels) {
    auto resolved = labels.resolve(users);
    UserSelection sel;
    for (std::size_t i = 0; i < resolved.size(); ++i) {
        if (!resolved[i])
            continue;
        (*resolved[i] == Label::fair ? sel.fair : sel.unfair).push_back(static_cast<Index>(i));
    }
    return sel;
}

UserSelection select_top_k(const Eigen::VectorXd& fairness, int k) {
    if (k < 1)
        throw std::invalid_argument("k must be >= 1");
    auto order = ascending_order(fairness);
    const std::size_t n = order.size();
    const std::size_t take = std::min(static_cast<std::size_t>(k), n);
    UserSelection sel;
    sel.unfair.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
    const std::size_t fair_take = std::min(static_cast<std::size_t>(k), n - take);
    for (std::size_t i = 0; i < fair_take; ++i)
        sel.fair.push_back(order[n - 1 - i]);
    return sel;
}

ReliabilityHistogram reliability_distribution(const RatingGraph& graph,
                                              const Eigen::VectorXd& reliability,
                                              const UserSelection& selection, int bins) {
    if (bins < 1)
        throw std::invalid_argument("bins must be >= 1");
    if (reliability.size() != graph.num_edges())
        throw std::invalid_argument("reliability does not match the graph");
    if (selection.fair.empty() || selection.unfair.empty())
        throw DataError("reliability distribution needs non-empty fair and unfair sets");

    auto histogram = [&](const std::vector<Index>& users) {
        std::vector<double> freq(static_cast<std::size_t>(bins), 0.0);
        double total = 0.0;
        for (Index u : users) {
            for (Index e : graph.out_edges(u)) {
                double r = std::clamp(reliability[e], 0.0, 1.0);
                auto b = std::min(static_cast<int>(r * bins), bins - 1);
                freq[static_cast<std::size_t>(b)] += 1.0;
                total += 1.0;
            }
        }
        for (auto& f : freq)
            f /= total;
        return freq;
    };

    ReliabilityHistogram hist;
    for (int b = 0; b < bins; ++b) {
        hist.lo.push_back(static_cast<double>(b) / bins);
        hist.hi.push_back(static_cast<double>(b + 1) / bins);
    }
    hist.freq_fair = histogram(selection.fair);
    hist.freq_unfair = histogram(selection.unfair);
    return hist;
}

void write_histogram(const ReliabilityHistogram& hist, std::ostream& out) {
    out << "bin_lo,bin_hi,freq_fair,freq_unfair\n";
    for (std::size_t b = 0; b < hist.lo.size(); ++b)
        out << csv::format(hist.lo[b]) << ',' << csv::format(hist.hi[b]) << ','
            << csv::format(hist.freq_fair[b]) << ',' << csv::format(hist.freq_unfair[b]) << '\n';
}

} // namespace fairjudge
