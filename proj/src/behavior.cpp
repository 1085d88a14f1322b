#include "fairjudge/behavior.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

#include "fairjudge/csv.hpp"
#include "fairjudge/error.hpp"

namespace fairjudge {

namespace {

constexpr double kProbabilityFloor = 1e-12;

} // namespace

std::vector<std::int64_t> compute_irt(std::vector<std::int64_t> timestamps) {
    std::sort(timestamps.begin(), timestamps.end());
    std::vector<std::int64_t> gaps;
    if (timestamps.size() < 2)
        return gaps;
    gaps.reserve(timestamps.size() - 1);
    for (std::size_t i = 1; i < timestamps.size(); ++i)
        gaps.push_back(timestamps[i] - timestamps[i - 1]);
    return gaps;
}

IrtHistogram::IrtHistogram(int bin_count) {
    if (bin_count < 1)
        throw std::invalid_argument("histogram needs at least one bin");
    counts_.assign(static_cast<std::size_t>(bin_count), 0);
}

int IrtHistogram::bin_of(std::int64_t gap, int bin_count) {
    auto shifted = static_cast<std::uint64_t>(std::max<std::int64_t>(gap, 0)) + 1;
    // floor(log2(x)) for x >= 1, exact in integer arithmetic.
    int bin = static_cast<int>(std::bit_width(shifted)) - 1;
    return std::min(bin, bin_count - 1);
}

void IrtHistogram::add(std::int64_t gap) {
    ++counts_[static_cast<std::size_t>(bin_of(gap, bin_count()))];
    ++total_;
}

IrtHistogram& IrtHistogram::operator+=(const IrtHistogram& other) {
    if (other.bin_count() != bin_count())
        throw std::invalid_argument("histogram bin counts differ");
    for (std::size_t i = 0; i < counts_.size(); ++i)
        counts_[i] += other.counts_[i];
    total_ += other.total_;
    return *this;
}

IrtHistogram build_histogram(std::span<const std::int64_t> gaps, int bin_count) {
    IrtHistogram h(bin_count);
    for (auto g : gaps)
        h.add(g);
    return h;
}

double normality_score(const IrtHistogram& entity, const IrtHistogram& global,
                       double smoothing) {
    if (entity.bin_count() != global.bin_count())
        throw std::invalid_argument("histogram bin counts differ");
    if (global.total() == 0)
        throw std::invalid_argument("global histogram is empty");
    if (!(smoothing > 0.0))
        throw std::invalid_argument("smoothing must be positive");

    const auto bins = static_cast<std::size_t>(global.bin_count());
    const double g_total = static_cast<double>(global.total());
    const double renorm = 1.0 + kProbabilityFloor * static_cast<double>(bins);
    const double e_total = static_cast<double>(entity.total());

    double kl = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
        double q = (static_cast<double>(global.counts()[i]) / g_total + kProbabilityFloor) / renorm;
        double p = (static_cast<double>(entity.counts()[i]) + smoothing * q) / (e_total + smoothing);
        kl += p * std::log(p / q);
    }
    // Rounding can leave a tiny negative divergence for p == q.
    return std::exp(-std::max(kl, 0.0));
}

BehaviorPriors BehaviorPriors::neutral(const RatingGraph& graph) {
    return {Eigen::VectorXd::Ones(graph.num_users()),
            Eigen::VectorXd::Ones(graph.num_products())};
}

namespace {

std::vector<IrtHistogram> side_histograms(const RatingGraph& graph, bool users, int bins) {
    const Index n = users ? graph.num_users() : graph.num_products();
    std::vector<IrtHistogram> out;
    out.reserve(static_cast<std::size_t>(n));
    std::vector<std::int64_t> stamps;
    for (Index i = 0; i < n; ++i) {
        stamps.clear();
        for (Index e : users ? graph.out_edges(i) : graph.in_edges(i))
            stamps.push_back(graph.edges()[static_cast<std::size_t>(e)].timestamp);
        out.push_back(build_histogram(compute_irt(stamps), bins));
    }
    return out;
}

Eigen::VectorXd side_normality(const std::vector<IrtHistogram>& hists, int bins,
                               double smoothing) {
    IrtHistogram global(bins);
    for (const auto& h : hists)
        global += h;
    Eigen::VectorXd out = Eigen::VectorXd::Ones(static_cast<Index>(hists.size()));
    if (global.total() == 0)
        return out;
    for (std::size_t i = 0; i < hists.size(); ++i)
        if (hists[i].total() > 0)
            out[static_cast<Index>(i)] = normality_score(hists[i], global, smoothing);
    return out;
}

} // namespace

BehaviorPriors compute_behavior_priors(const RatingGraph& graph, int bin_count,
                                       double smoothing) {
    if (bin_count < 1)
        throw std::invalid_argument("bin count must be >= 1");
    if (!(smoothing > 0.0))
        throw std::invalid_argument("smoothing must be positive");
    return {side_normality(side_histograms(graph, true, bin_count), bin_count, smoothing),
            side_normality(side_histograms(graph, false, bin_count), bin_count, smoothing)};
}

BehaviorPriors load_priors(const std::filesystem::path& path, const RatingGraph& graph,
                           std::vector<std::string>* warnings) {
    auto priors = BehaviorPriors::neutral(graph);
    csv::Reader reader(path);
    auto c_id = reader.column("entity_id");
    auto c_side = reader.column("side");
    auto c_value = reader.column("normality");
    std::vector<std::string_view> row;
    while (reader.next(row)) {
        auto line = reader.line_number();
        auto where = path.string() + ": line " + std::to_string(line) + ": ";
        double value = csv::parse_double(row[c_value], line, "normality");
        if (!(value >= 0.0 && value <= 1.0))
            throw DataError(where + "normality " + std::string(row[c_value]) +
                            " outside [0, 1]");
        bool is_user = row[c_side] == "user";
        if (!is_user && row[c_side] != "product")
            throw DataError(where + "unknown side '" + std::string(row[c_side]) + "'");
        const auto& table = is_user ? graph.users() : graph.products();
        auto idx = table.find(row[c_id]);
        if (!idx) {
            if (warnings)
                warnings->push_back(where + "unknown " + std::string(row[c_side]) + " '" +
                                    std::string(row[c_id]) + "' skipped");
            continue;
        }
        (is_user ? priors.user_normality : priors.product_normality)[*idx] = value;
    }
    return priors;
}

void write_priors(const BehaviorPriors& priors, const RatingGraph& graph, std::ostream& out) {
    out << "entity_id,side,normality\n";
    for (Index u = 0; u < graph.num_users(); ++u)
        out << graph.users().id(u) << ",user," << csv::format(priors.user_normality[u]) << '\n';
    for (Index p = 0; p < graph.num_products(); ++p)
        out << graph.products().id(p) << ",product," << csv::format(priors.product_normality[p])
            << '\n';
}

} // namespace fairjudge
