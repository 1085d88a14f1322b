#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace fairjudge {

using Index = Eigen::Index;

/// Bijection between opaque external ids and dense indices 0..n-1,
/// assigned in order of first appearance.
class EntityTable {
public:
    Index intern(std::string_view id);
    std::optional<Index> find(std::string_view id) const;

    const std::string& id(Index i) const { return ids_[static_cast<std::size_t>(i)]; }
    const std::vector<std::string>& ids() const { return ids_; }
    Index size() const { return static_cast<Index>(ids_.size()); }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, Index> index_;
};

/// One timestamped rating. The score is already on the [-1, 1] scale.
struct Rating {
    Rating(Index user, Index product, double score, std::int64_t timestamp);

    Index user;
    Index product;
    double score;
    std::int64_t timestamp;
};

/// Immutable bipartite multigraph of users rating products.
///
/// Out(u) and In(p) are stored in CSR form and list edge indices in edge
/// order. Every user and every product has at least one edge, so all the
/// per-entity denominators of the solver are >= 1.
class RatingGraph {
public:
    RatingGraph(EntityTable users, EntityTable products, std::vector<Rating> edges);

    const EntityTable& users() const { return users_; }
    const EntityTable& products() const { return products_; }
    const std::vector<Rating>& edges() const { return edges_; }

    Index num_users() const { return users_.size(); }
    Index num_products() const { return products_.size(); }
    Index num_edges() const { return static_cast<Index>(edges_.size()); }

    std::span<const Index> out_edges(Index user) const;
    std::span<const Index> in_edges(Index product) const;

    /// Edge scores as a dense vector aligned with edges().
    const Eigen::VectorXd& scores() const { return scores_; }

private:
    EntityTable users_;
    EntityTable products_;
    std::vector<Rating> edges_;
    Eigen::VectorXd scores_;
    std::vector<Index> out_offsets_, out_list_;
    std::vector<Index> in_offsets_, in_list_;
};

/// Accumulates ratings keyed by external ids, then freezes them into a graph.
class GraphBuilder {
public:
    void add(std::string_view user, std::string_view product, double score,
             std::int64_t timestamp);
    RatingGraph build() &&;

private:
    EntityTable users_;
    EntityTable products_;
    std::vector<Rating> edges_;
};

/// Affine map of [min, max] onto [-1, 1].
double rescale_score(double raw, double min, double max);

struct RatingSchema {
    std::string user_column = "user_id";
    std::string product_column = "product_id";
    std::string rating_column = "rating";
    std::string timestamp_column = "timestamp";
    double min = 1.0;
    double max = 5.0;
};

RatingGraph load_ratings(const std::filesystem::path& path, const RatingSchema& schema = {});

/// Writes `user_id,product_id,rating,timestamp` with scores on the [-1, 1]
/// scale; reload with min=-1, max=1 to get the identical graph back.
void write_ratings(const RatingGraph& graph, std::ostream& out);
void write_ratings(const RatingGraph& graph, const std::filesystem::path& path);

struct UnipartiteEdge {
    std::string source;
    std::string target;
    double score;
    std::int64_t timestamp;
};

/// Turns a single-namespace directed network into a bipartite one: every
/// id X becomes user "X" for its outgoing edges and product "X" for its
/// incoming edges. Self-loops become ordinary edges.
RatingGraph split_unipartite(std::span<const UnipartiteEdge> edges);

/// Reads `source_id,target_id,rating,timestamp`, rescaling into [-1, 1].
std::vector<UnipartiteEdge> load_unipartite(const std::filesystem::path& path, double min,
                                            double max);

enum class Label { fair, unfair };

std::string_view to_string(Label label);
Label parse_label(std::string_view token);

/// Ground-truth labels keyed by user id. Unlabeled users are absent.
class LabelSet {
public:
    /// Throws DataError if `id` already carries a different label.
    void insert(const std::string& id, Label label);

    std::optional<Label> find(std::string_view id) const;
    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    std::size_t count(Label label) const;

    const std::map<std::string, Label, std::less<>>& entries() const { return labels_; }

    /// Per-user labels aligned with `users`. Throws DataError listing every
    /// labeled id that is not in the table.
    std::vector<std::optional<Label>> resolve(const EntityTable& users) const;

private:
    std::map<std::string, Label, std::less<>> labels_;
};

LabelSet load_labels(const std::filesystem::path& path);
void write_labels(const LabelSet& labels, std::ostream& out);

} // namespace fairjudge
