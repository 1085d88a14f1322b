#include "fairjudge/ensemble.hpp"

#include <algorithm>
#include <exception>
#include <ostream>
#include <thread>

#include "fairjudge/csv.hpp"
#include "fairjudge/error.hpp"

namespace fairjudge {

ParamGrid build_grid(int max_value) {
    if (max_value < 0)
        throw std::invalid_argument("grid max must be >= 0");
    ParamGrid grid;
    for (int a1 = 0; a1 <= max_value; ++a1)
        for (int a2 = 0; a2 <= max_value; ++a2)
            for (int b1 = 0; b1 <= max_value; ++b1)
                for (int b2 = 0; b2 <= max_value; ++b2)
                    grid.combos.push_back({double(a1), double(a2), double(b1), double(b2)});
    return grid;
}

std::string column_name(const HyperParams& hp) {
    return csv::format(hp.alpha1) + "_" + csv::format(hp.alpha2) + "_" + csv::format(hp.beta1) +
           "_" + csv::format(hp.beta2);
}

EnsembleResult run_ensemble(const RatingGraph& graph, const BehaviorPriors& priors,
                            const ParamGrid& grid, const EnsembleOptions& options) {
    if (grid.combos.empty())
        throw std::invalid_argument("empty parameter grid");
    const std::size_t n = grid.combos.size();
    const std::size_t jobs = static_cast<std::size_t>(std::max(1, options.jobs));

    EnsembleResult result;
    result.average.fairness = Eigen::VectorXd::Zero(graph.num_users());
    result.average.goodness = Eigen::VectorXd::Zero(graph.num_products());
    result.average.reliability = Eigen::VectorXd::Zero(graph.num_edges());
    result.features.values.resize(graph.num_users(), static_cast<Index>(n));
    result.features.columns = grid.combos;
    result.reports.reserve(n);

    RunOptions<double> run_options;
    run_options.epsilon = options.epsilon;
    run_options.max_iterations = options.max_iterations;

    // Batches of `jobs` runs execute concurrently; folding into the sums
    // happens after each batch in grid order, so the result is independent
    // of the thread count.
    std::vector<RunResult<double>> batch(jobs);
    std::vector<std::exception_ptr> errors(jobs);
    for (std::size_t start = 0; start < n; start += jobs) {
        const std::size_t count = std::min(jobs, n - start);
        auto work = [&](std::size_t slot) {
            try {
                batch[slot] = run<double>(graph, priors, grid.combos[start + slot], run_options);
            } catch (...) {
                errors[slot] = std::current_exception();
            }
        };
        if (count == 1) {
            work(0);
        } else {
            std::vector<std::thread> threads;
            for (std::size_t s = 0; s < count; ++s)
                threads.emplace_back(work, s);
            for (auto& t : threads)
                t.join();
        }
        for (std::size_t s = 0; s < count; ++s) {
            if (errors[s])
                std::rethrow_exception(errors[s]);
            const std::size_t c = start + s;
            auto& r = batch[s];
            if (!r.report.converged)
                throw NonConvergenceError(
                    "combo " + column_name(grid.combos[c]) + " did not converge within " +
                    std::to_string(r.report.max_iterations) + " iterations (last error " +
                    csv::format(r.report.error_trace.back()) + ")");
            result.average.fairness += r.state.fairness;
            result.average.goodness += r.state.goodness;
            result.average.reliability += r.state.reliability;
            result.features.values.col(static_cast<Index>(c)) = r.state.fairness;
            if (options.on_combo)
                options.on_combo(c, grid.combos[c], r.report);
            result.reports.push_back(std::move(r.report));
        }
    }
    const double denom = static_cast<double>(n);
    result.average.fairness /= denom;
    result.average.goodness /= denom;
    result.average.reliability /= denom;
    return result;
}

void export_features(const FeatureMatrix& matrix, const EntityTable& users,
                     const LabelSet* labels, std::ostream& out) {
    if (matrix.values.rows() != users.size())
        throw std::invalid_argument("feature matrix rows do not cover all users");
    out << "user_id";
    for (const auto& hp : matrix.columns)
        out << ',' << column_name(hp);
    if (labels)
        out << ",label";
    out << '\n';
    for (Index u = 0; u < users.size(); ++u) {
        out << users.id(u);
        for (Index c = 0; c < matrix.values.cols(); ++c)
            out << ',' << csv::format(matrix.values(u, c));
        if (labels) {
            out << ',';
            if (auto l = labels->find(users.id(u)))
                out << to_string(*l);
        }
        out << '\n';
    }
}

void export_features(const FeatureMatrix& matrix, const EntityTable& users,
                     const LabelSet* labels, const std::filesystem::path& path) {
    auto out = csv::open_output(path);
    export_features(matrix, users, labels, out);
    if (!out)
        throw DataError("failed writing " + path.string());
}

} // namespace fairjudge
