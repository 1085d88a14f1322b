#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fairjudge/engine.hpp"
#include "fairjudge/eval.hpp"
#include "fairjudge/graph.hpp"

namespace fairjudge {

/// `entity_id,side,score`: users with fairness, then products with goodness.
void write_scores(const ScoreState<double>& state, const RatingGraph& graph, std::ostream& out);

/// `user_id,product_id,reliability`, one row per edge in edge order.
void write_reliability(const ScoreState<double>& state, const RatingGraph& graph,
                       std::ostream& out);

/// User rows of a scores file, in file order.
RankedScores read_user_scores(const std::filesystem::path& path);

/// Reliability per edge, matched to the graph's edges by (user, product)
/// pairs in order of occurrence.
Eigen::VectorXd read_reliability(const std::filesystem::path& path, const RatingGraph& graph);

} // namespace fairjudge
