#include "fairjudge/graph.hpp"

#include <cmath>
#include <ostream>

#include "fairjudge/csv.hpp"
#include "fairjudge/error.hpp"

namespace fairjudge {

Index EntityTable::intern(std::string_view id) {
    auto it = index_.find(std::string(id));
    if (it != index_.end())
        return it->second;
    Index i = size();
    ids_.emplace_back(id);
    index_.emplace(ids_.back(), i);
    return i;
}

std::optional<Index> EntityTable::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

Rating::Rating(Index user_, Index product_, double score_, std::int64_t timestamp_)
    : user(user_), product(product_), score(score_), timestamp(timestamp_) {
    if (!(score >= -1.0 && score <= 1.0))
        throw DataError("rating score " + csv::format(score) + " outside [-1, 1]");
    if (timestamp < 0)
        throw DataError("negative timestamp " + std::to_string(timestamp));
}

namespace {

void build_csr(Index n, const std::vector<Rating>& edges, bool by_user,
               std::vector<Index>& offsets, std::vector<Index>& list) {
    offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& e : edges)
        ++offsets[static_cast<std::size_t>(by_user ? e.user : e.product) + 1];
    for (std::size_t i = 1; i < offsets.size(); ++i)
        offsets[i] += offsets[i - 1];
    list.resize(edges.size());
    std::vector<Index> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        auto owner = static_cast<std::size_t>(by_user ? edges[k].user : edges[k].product);
        list[static_cast<std::size_t>(cursor[owner]++)] = static_cast<Index>(k);
    }
}

} // namespace

RatingGraph::RatingGraph(EntityTable users, EntityTable products, std::vector<Rating> edges)
    : users_(std::move(users)), products_(std::move(products)), edges_(std::move(edges)) {
    if (edges_.empty())
        throw DataError("rating graph has no edges");
    scores_.resize(num_edges());
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const auto& e = edges_[k];
        if (e.user < 0 || e.user >= num_users() || e.product < 0 || e.product >= num_products())
            throw DataError("edge " + std::to_string(k) + " references an unknown entity");
        scores_[static_cast<Index>(k)] = e.score;
    }
    build_csr(num_users(), edges_, true, out_offsets_, out_list_);
    build_csr(num_products(), edges_, false, in_offsets_, in_list_);
    for (Index u = 0; u < num_users(); ++u)
        if (out_edges(u).empty())
            throw DataError("user '" + users_.id(u) + "' has no ratings");
    for (Index p = 0; p < num_products(); ++p)
        if (in_edges(p).empty())
            throw DataError("product '" + products_.id(p) + "' has no ratings");
}

std::span<const Index> RatingGraph::out_edges(Index user) const {
    auto b = static_cast<std::size_t>(out_offsets_[static_cast<std::size_t>(user)]);
    auto e = static_cast<std::size_t>(out_offsets_[static_cast<std::size_t>(user) + 1]);
    return std::span<const Index>(out_list_).subspan(b, e - b);
}

std::span<const Index> RatingGraph::in_edges(Index product) const {
    auto b = static_cast<std::size_t>(in_offsets_[static_cast<std::size_t>(product)]);
    auto e = static_cast<std::size_t>(in_offsets_[static_cast<std::size_t>(product) + 1]);
    return std::span<const Index>(in_list_).subspan(b, e - b);
}

void GraphBuilder::add(std::string_view user, std::string_view product, double score,
                       std::int64_t timestamp) {
    Rating r(users_.intern(user), products_.intern(product), score, timestamp);
    edges_.push_back(r);
}

RatingGraph GraphBuilder::build() && {
    return RatingGraph(std::move(users_), std::move(products_), std::move(edges_));
}

double rescale_score(double raw, double min, double max) {
    if (!(min < max))
        throw DataError("rating range requires min < max");
    if (!(raw >= min && raw <= max))
        throw DataError("rating " + csv::format(raw) + " outside [" + csv::format(min) + ", " +
                        csv::format(max) + "]");
    // Identity range: pass through untouched so written graphs reload bit-exactly.
    if (min == -1.0 && max == 1.0)
        return raw;
    return 2.0 * (raw - min) / (max - min) - 1.0;
}

RatingGraph load_ratings(const std::filesystem::path& path, const RatingSchema& schema) {
    if (!(schema.min < schema.max))
        throw DataError("rating range requires min < max");
    csv::Reader reader(path);
    auto c_user = reader.column(schema.user_column);
    auto c_product = reader.column(schema.product_column);
    auto c_rating = reader.column(schema.rating_column);
    auto c_time = reader.column(schema.timestamp_column);

    GraphBuilder builder;
    std::vector<std::string_view> row;
    std::size_t rows = 0;
    while (reader.next(row)) {
        auto line = reader.line_number();
        try {
            double raw = csv::parse_double(row[c_rating], line, "rating");
            auto ts = csv::parse_int(row[c_time], line, "timestamp");
            if (row[c_user].empty() || row[c_product].empty())
                throw DataError("empty id");
            builder.add(row[c_user], row[c_product], rescale_score(raw, schema.min, schema.max),
                        ts);
        } catch (const DataError& e) {
            throw DataError(path.string() + ": line " + std::to_string(line) + ": " + e.what());
        }
        ++rows;
    }
    if (rows == 0)
        throw DataError(path.string() + ": no ratings");
    return std::move(builder).build();
}

void write_ratings(const RatingGraph& graph, std::ostream& out) {
    out << "user_id,product_id,rating,timestamp\n";
    for (const auto& e : graph.edges())
        out << graph.users().id(e.user) << ',' << graph.products().id(e.product) << ','
            << csv::format(e.score) << ',' << e.timestamp << '\n';
}

void write_ratings(const RatingGraph& graph, const std::filesystem::path& path) {
    auto out = csv::open_output(path);
    write_ratings(graph, out);
}

RatingGraph split_unipartite(std::span<const UnipartiteEdge> edges) {
    GraphBuilder builder;
    for (const auto& e : edges)
        builder.add(e.source, e.target, e.score, e.timestamp);
    return std::move(builder).build();
}

std::vector<UnipartiteEdge> load_unipartite(const std::filesystem::path& path, double min,
                                            double max) {
    csv::Reader reader(path);
    auto c_src = reader.column("source_id");
    auto c_dst = reader.column("target_id");
    auto c_rating = reader.column("rating");
    auto c_time = reader.column("timestamp");
    std::vector<UnipartiteEdge> out;
    std::vector<std::string_view> row;
    while (reader.next(row)) {
        auto line = reader.line_number();
        try {
            double raw = csv::parse_double(row[c_rating], line, "rating");
            out.push_back({std::string(row[c_src]), std::string(row[c_dst]),
                           rescale_score(raw, min, max),
                           csv::parse_int(row[c_time], line, "timestamp")});
        } catch (const DataError& e) {
            throw DataError(path.string() + ": line " + std::to_string(line) + ": " + e.what());
        }
    }
    if (out.empty())
        throw DataError(path.string() + ": no ratings");
    return out;
}

std::string_view to_string(Label label) {
    return label == Label::fair ? "fair" : "unfair";
}

Label parse_label(std::string_view token) {
    if (token == "fair")
        return Label::fair;
    if (token == "unfair")
        return Label::unfair;
    throw DataError("unknown label '" + std::string(token) + "'");
}

void LabelSet::insert(const std::string& id, Label label) {
    auto [it, inserted] = labels_.emplace(id, label);
    if (!inserted && it->second != label)
        throw DataError("conflicting labels for '" + id + "'");
}

std::optional<Label> LabelSet::find(std::string_view id) const {
    auto it = labels_.find(id);
    if (it == labels_.end())
        return std::nullopt;
    return it->second;
}

std::size_t LabelSet::count(Label label) const {
    std::size_t n = 0;
    for (const auto& [id, l] : labels_)
        n += (l == label);
    return n;
}

std::vector<std::optional<Label>> LabelSet::resolve(const EntityTable& users) const {
    std::vector<std::optional<Label>> out(static_cast<std::size_t>(users.size()));
    std::vector<std::string> missing;
    for (const auto& [id, label] : labels_) {
        if (auto i = users.find(id))
            out[static_cast<std::size_t>(*i)] = label;
        else
            missing.push_back(id);
    }
    if (!missing.empty()) {
        std::string msg = std::to_string(missing.size()) + " labeled id(s) not among users:";
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i)
            msg += " " + missing[i];
        if (missing.size() > 20)
            msg += " ...";
        throw DataError(msg);
    }
    return out;
}

LabelSet load_labels(const std::filesystem::path& path) {
    csv::Reader reader(path);
    auto c_id = reader.column("user_id");
    auto c_label = reader.column("label");
    LabelSet labels;
    std::vector<std::string_view> row;
    while (reader.next(row)) {
        try {
            labels.insert(std::string(row[c_id]), parse_label(row[c_label]));
        } catch (const DataError& e) {
            throw DataError(path.string() + ": line " + std::to_string(reader.line_number()) +
                            ": " + e.what());
        }
    }
    return labels;
}

void write_labels(const LabelSet& labels, std::ostream& out) {
    out << "user_id,label\n";
    for (const auto& [id, label] : labels.entries())
        out << id << ',' << to_string(label) << '\n';
}

} // namespace fairjudge
