#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <bit>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "fairjudge/behavior.hpp"
#include "fairjudge/graph.hpp"

namespace fairjudge {

/// Prior strengths: alpha1 (user cold start), alpha2 (user behavior),
/// beta1 (product cold start), beta2 (product behavior). All >= 0.
struct HyperParams {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;

    void validate() const;
    friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Fairness per user in [0,1], goodness per product in [-1,1], reliability
/// per edge in [0,1].
template <typename Scalar = double>
struct ScoreState {
    Vector<Scalar> fairness;
    Vector<Scalar> goodness;
    Vector<Scalar> reliability;
};

struct ConvergenceReport {
    int iterations = 0;
    std::vector<double> error_trace;
    bool converged = false;
    double epsilon = 0.0;
    int max_iterations = 0;
};

enum class Phase { goodness, reliability, fairness };

template <typename Scalar = double>
struct RunOptions {
    double epsilon = 1e-6;
    /// 0 selects max_iterations_bound(epsilon).
    int max_iterations = 0;
    /// Called after each phase with the array that phase just wrote.
    std::function<void(int iteration, Phase, const Vector<Scalar>&)> on_phase;
    /// Called after each full iteration with the new state and its error.
    std::function<void(int iteration, const ScoreState<Scalar>&, double error)> on_iteration;
};

template <typename Scalar = double>
struct RunResult {
    ScoreState<Scalar> state;
    ConvergenceReport report;
};

/// Upper bound on iterations until the error drops to epsilon:
/// 2 + ceil(log(epsilon / 2) / log(3/4)). Requires 0 < epsilon < 2.
int max_iterations_bound(double epsilon);

namespace detail {

/// Sums a multiset of terms in IEEE total order, so the result depends only
/// on the values and not on edge order or entity labelling.
/// Signed integer whose ordering is the IEEE 754 totalOrder of `v`
/// (so -0.0 sorts before +0.0).
template <typename Scalar>
auto total_order_key(Scalar v) {
    using Int = std::conditional_t<sizeof(Scalar) == 8, std::int64_t, std::int32_t>;
    static_assert(sizeof(Int) == sizeof(Scalar));
    auto bits = std::bit_cast<Int>(v);
    constexpr Int magnitude = std::numeric_limits<Int>::max();
    return bits ^ ((bits >> (sizeof(Int) * 8 - 1)) & magnitude);
}

template <typename Scalar>
class CanonicalSum {
public:
    void clear() { terms_.clear(); }
    void add(Scalar v) { terms_.push_back(v); }

    Scalar total() {
        std::sort(terms_.begin(), terms_.end(),
                  [](Scalar a, Scalar b) { return total_order_key(a) < total_order_key(b); });
        Scalar s(0);
        for (Scalar v : terms_)
            s += v;
        return s;
    }

private:
    std::vector<Scalar> terms_;
};

template <typename Scalar>
bool within(const Vector<Scalar>& v, Scalar lo, Scalar hi) {
    return v.size() == 0 || (v.minCoeff() >= lo && v.maxCoeff() <= hi);
}

} // namespace detail

template <typename Scalar = double>
ScoreState<Scalar> init_state(const RatingGraph& graph) {
    return {Vector<Scalar>::Ones(graph.num_users()), Vector<Scalar>::Ones(graph.num_products()),
            Vector<Scalar>::Ones(graph.num_edges())};
}

/// G(p) = (beta2 * normality(p) + sum_In(p) R_prev * score) / (beta1 + beta2 + |In(p)|)
template <typename Scalar>
void update_goodness(const RatingGraph& graph, const Vector<Scalar>& reliability_prev,
                     const Eigen::VectorXd& product_normality, const HyperParams& hp,
                     Vector<Scalar>& goodness, detail::CanonicalSum<Scalar>& sum) {
    const auto& scores = graph.scores();
    goodness.resize(graph.num_products());
    for (Index p = 0; p < graph.num_products(); ++p) {
        auto in = graph.in_edges(p);
        sum.clear();
        for (Index e : in)
            sum.add(reliability_prev[e] * static_cast<Scalar>(scores[e]));
        Scalar prior = static_cast<Scalar>(hp.beta2 * product_normality[p]);
        Scalar denom = static_cast<Scalar>(hp.beta1 + hp.beta2 + static_cast<double>(in.size()));
        goodness[p] = (prior + sum.total()) / denom;
    }
    assert(detail::within<Scalar>(goodness, Scalar(-1), Scalar(1)));
}

template <typename Scalar>
Vector<Scalar> update_goodness(const ScoreState<Scalar>& state, const RatingGraph& graph,
                               const BehaviorPriors& priors, const HyperParams& hp) {
    Vector<Scalar> out;
    detail::CanonicalSum<Scalar> sum;
    update_goodness<Scalar>(graph, state.reliability, priors.product_normality, hp, out, sum);
    return out;
}

/// R(u,p) = (F_prev(u) + 1 - |score - G_curr(p)| / 2) / 2
template <typename Scalar>
void update_reliability(const RatingGraph& graph, const Vector<Scalar>& fairness_prev,
                        const Vector<Scalar>& goodness_curr, Vector<Scalar>& reliability) {
    const auto& edges = graph.edges();
    reliability.resize(graph.num_edges());
    for (Index k = 0; k < graph.num_edges(); ++k) {
        const auto& e = edges[static_cast<std::size_t>(k)];
        Scalar deviation = std::abs(static_cast<Scalar>(e.score) - goodness_curr[e.product]);
        reliability[k] = Scalar(0.5) * (fairness_prev[e.user] + (Scalar(1) - deviation / Scalar(2)));
    }
    assert(detail::within<Scalar>(reliability, Scalar(0), Scalar(1)));
}

/// Reads fairness from the previous iteration and goodness from this one.
template <typename Scalar>
Vector<Scalar> update_reliability(const ScoreState<Scalar>& state, const RatingGraph& graph) {
    Vector<Scalar> out;
    update_reliability<Scalar>(graph, state.fairness, state.goodness, out);
    return out;
}

/// F(u) = (alpha1 / 2 + alpha2 * normality(u) + sum_Out(u) R_curr) / (alpha1 + alpha2 + |Out(u)|)
template <typename Scalar>
void update_fairness(const RatingGraph& graph, const Vector<Scalar>& reliability_curr,
                     const Eigen::VectorXd& user_normality, const HyperParams& hp,
                     Vector<Scalar>& fairness, detail::CanonicalSum<Scalar>& sum) {
    fairness.resize(graph.num_users());
    for (Index u = 0; u < graph.num_users(); ++u) {
        auto out = graph.out_edges(u);
        sum.clear();
        for (Index e : out)
            sum.add(reliability_curr[e]);
        Scalar prior = static_cast<Scalar>(0.5 * hp.alpha1 + hp.alpha2 * user_normality[u]);
        Scalar denom = static_cast<Scalar>(hp.alpha1 + hp.alpha2 + static_cast<double>(out.size()));
        fairness[u] = (prior + sum.total()) / denom;
    }
    assert(detail::within<Scalar>(fairness, Scalar(0), Scalar(1)));
}

template <typename Scalar>
Vector<Scalar> update_fairness(const ScoreState<Scalar>& state, const RatingGraph& graph,
                               const BehaviorPriors& priors, const HyperParams& hp) {
    Vector<Scalar> out;
    detail::CanonicalSum<Scalar> sum;
    update_fairness<Scalar>(graph, state.reliability, priors.user_normality, hp, out, sum);
    return out;
}

/// Largest absolute per-entry change across fairness, reliability and goodness.
template <typename Scalar>
Scalar compute_error(const ScoreState<Scalar>& prev, const ScoreState<Scalar>& curr) {
    if (prev.fairness.size() != curr.fairness.size() ||
        prev.goodness.size() != curr.goodness.size() ||
        prev.reliability.size() != curr.reliability.size())
        throw std::invalid_argument("score states have different shapes");
    auto max_delta = [](const Vector<Scalar>& a, const Vector<Scalar>& b) {
        return a.size() == 0 ? Scalar(0) : (a - b).cwiseAbs().maxCoeff();
    };
    return std::max({max_delta(prev.fairness, curr.fairness),
                     max_delta(prev.reliability, curr.reliability),
                     max_delta(prev.goodness, curr.goodness)});
}

/// Iterates goodness, reliability and fairness updates from the all-ones
/// state until the error is at most epsilon. Hitting the iteration budget
/// returns with report.converged == false.
template <typename Scalar = double>
RunResult<Scalar> run(const RatingGraph& graph, const BehaviorPriors& priors,
                      const HyperParams& hp, const RunOptions<Scalar>& options = {}) {
    hp.validate();
    if (!(options.epsilon > 0.0))
        throw std::invalid_argument("epsilon must be positive");
    if (priors.user_normality.size() != graph.num_users() ||
        priors.product_normality.size() != graph.num_products())
        throw std::invalid_argument("priors do not match the graph");

    ConvergenceReport report;
    report.epsilon = options.epsilon;
    report.max_iterations = options.max_iterations > 0
                                ? options.max_iterations
                                : max_iterations_bound(std::min(options.epsilon, 1.0));

    ScoreState<Scalar> prev = init_state<Scalar>(graph);
    ScoreState<Scalar> curr = prev;
    detail::CanonicalSum<Scalar> sum;

    while (report.iterations < report.max_iterations) {
        const int t = ++report.iterations;
        update_goodness<Scalar>(graph, prev.reliability, priors.product_normality, hp,
                                curr.goodness, sum);
        if (options.on_phase)
            options.on_phase(t, Phase::goodness, curr.goodness);
        update_reliability<Scalar>(graph, prev.fairness, curr.goodness, curr.reliability);
        if (options.on_phase)
            options.on_phase(t, Phase::reliability, curr.reliability);
        update_fairness<Scalar>(graph, curr.reliability, priors.user_normality, hp,
                                curr.fairness, sum);
        if (options.on_phase)
            options.on_phase(t, Phase::fairness, curr.fairness);

        const double error = static_cast<double>(compute_error(prev, curr));
        report.error_trace.push_back(error);
        if (options.on_iteration)
            options.on_iteration(t, curr, error);
        std::swap(prev, curr);
        if (error <= options.epsilon) {
            report.converged = true;
            break;
        }
    }
    return {std::move(prev), std::move(report)};
}

} // namespace fairjudge
