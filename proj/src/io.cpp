#include "fairjudge/io.hpp"

#include <map>
#include <ostream>
#include <utility>

#include "fairjudge/csv.hpp"
#include "fairjudge/error.hpp"

namespace fairjudge {

void write_scores(const ScoreState<double>& state, const RatingGraph& graph, std::ostream& out) {
    out << "entity_id,side,score\n";
    for (Index u = 0; u < graph.num_users(); ++u)
        out << graph.users().id(u) << ",user," << csv::format(state.fairness[u]) << '\n';
    for (Index p = 0; p < graph.num_products(); ++p)
        out << graph.products().id(p) << ",product," << csv::format(state.goodness[p]) << '\n';
}

void write_reliability(const ScoreState<double>& state, const RatingGraph& graph,
                       std::ostream& out) {
    out << "user_id,product_id,reliability\n";
    const auto& edges = graph.edges();
    for (std::size_t k = 0; k < edges.size(); ++k)
        out << graph.users().id(edges[k].user) << ',' << graph.products().id(edges[k].product)
            << ',' << csv::format(state.reliability[static_cast<Index>(k)]) << '\n';
}

RankedScores read_user_scores(const std::filesystem::path& path) {
    csv::Reader reader(path);
    auto c_id = reader.column("entity_id");
    auto c_side = reader.column("side");
    auto c_score = reader.column("score");
    RankedScores out;
    std::vector<std::string_view> row;
    while (reader.next(row)) {
        if (row[c_side] != "user")
            continue;
        out.ids.emplace_back(row[c_id]);
        out.fairness.push_back(csv::parse_double(row[c_score], reader.line_number(), "score"));
    }
    if (out.ids.empty())
        throw DataError(path.string() + ": no user scores");
    return out;
}

Eigen::VectorXd read_reliability(const std::filesystem::path& path, const RatingGraph& graph) {
    // Parallel edges are matched in order of occurrence.
    std::map<std::pair<Index, Index>, std::vector<Index>> slots;
    const auto& edges = graph.edges();
    for (std::size_t k = 0; k < edges.size(); ++k)
        slots[{edges[k].user, edges[k].product}].push_back(static_cast<Index>(k));
    std::map<std::pair<Index, Index>, std::size_t> used;

    Eigen::VectorXd out = Eigen::VectorXd::Constant(graph.num_edges(), -1.0);
    csv::Reader reader(path);
    auto c_user = reader.column("user_id");
    auto c_product = reader.column("product_id");
    auto c_rel = reader.column("reliability");
    std::vector<std::string_view> row;
    while (reader.next(row)) {
        auto where = path.string() + ": line " + std::to_string(reader.line_number()) + ": ";
        auto u = graph.users().find(row[c_user]);
        auto p = graph.products().find(row[c_product]);
        if (!u || !p)
            throw DataError(where + "edge not in the ratings graph");
        auto key = std::make_pair(*u, *p);
        auto& n = used[key];
        auto it = slots.find(key);
        if (it == slots.end() || n >= it->second.size())
            throw DataError(where + "edge not in the ratings graph");
        out[it->second[n++]] = csv::parse_double(row[c_rel], reader.line_number(), "reliability");
    }
    if (out.size() > 0 && out.minCoeff() < 0.0)
        throw DataError(path.string() + ": reliability missing for some edges");
    return out;
}

} // namespace fairjudge
