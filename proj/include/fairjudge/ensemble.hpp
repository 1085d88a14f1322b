#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fairjudge/engine.hpp"

namespace fairjudge {

/// Hyperparameter combinations in lexicographic (alpha1, alpha2, beta1, beta2) order.
struct ParamGrid {
    std::vector<HyperParams> combos;
};

/// All integer 4-tuples in [0, max_value]^4.
ParamGrid build_grid(int max_value = 5);

/// Users x combos matrix of per-run fairness; column j belongs to columns[j].
struct FeatureMatrix {
    Eigen::MatrixXd values;
    std::vector<HyperParams> columns;
};

struct EnsembleOptions {
    double epsilon = 1e-6;
    int max_iterations = 0;
    int jobs = 1;
    /// Called in grid order once each combo's run is folded into the average.
    std::function<void(std::size_t combo, const HyperParams&, const ConvergenceReport&)> on_combo;
};

struct EnsembleResult {
    ScoreState<double> average;
    FeatureMatrix features;
    std::vector<ConvergenceReport> reports;
};

/// Runs the solver once per combo and averages fairness, goodness and
/// reliability over the grid. Throws NonConvergenceError if any run fails.
EnsembleResult run_ensemble(const RatingGraph& graph, const BehaviorPriors& priors,
                            const ParamGrid& grid, const EnsembleOptions& options = {});

/// Column name `a1_a2_b1_b2`.
std::string column_name(const HyperParams& hp);

/// `user_id,<a1_a2_b1_b2>...[,label]`; unlabeled users get an empty label.
void export_features(const FeatureMatrix& matrix, const EntityTable& users,
                     const LabelSet* labels, std::ostream& out);
void export_features(const FeatureMatrix& matrix, const EntityTable& users,
                     const LabelSet* labels, const std::filesystem::path& path);

} // namespace fairjudge
