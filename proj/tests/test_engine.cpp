#include <doctest.h>

#include <cmath>
#include <random>

#include "fairjudge/engine.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fairjudge;
using fairjudge::testing::toy_graph;

namespace {

struct OracleInput {
    int n_users, n_products;
    std::vector<oracle::Edge> edges;
    std::vector<double> user_norm, product_norm;
};

OracleInput to_oracle(const RatingGraph& g, const BehaviorPriors& pr) {
    OracleInput in{static_cast<int>(g.num_users()), static_cast<int>(g.num_products()), {}, {}, {}};
    for (const auto& e : g.edges())
        in.edges.push_back({static_cast<int>(e.user), static_cast<int>(e.product), e.score});
    in.user_norm.assign(pr.user_normality.data(), pr.user_normality.data() + g.num_users());
    in.product_norm.assign(pr.product_normality.data(),
                           pr.product_normality.data() + g.num_products());
    return in;
}

double max_diff(const Eigen::VectorXd& a, const std::vector<double>& b) {
    double m = 0;
    for (Index i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[static_cast<std::size_t>(i)]));
    return m;
}

} // namespace

TEST_CASE("max_iterations_bound") {
    CHECK(max_iterations_bound(1e-6) == 53);
    CHECK(max_iterations_bound(1.5) == 3);
    for (int k = 1; k <= 40; ++k)
        CHECK(max_iterations_bound(2.0 * std::pow(0.75, k)) == 2 + k);
    CHECK_THROWS(max_iterations_bound(0.0));
    CHECK_THROWS(max_iterations_bound(2.0));
    CHECK_THROWS(max_iterations_bound(-1.0));
}

TEST_CASE("init_state is all ones and sized to the graph") {
    auto g = toy_graph();
    auto s = init_state(g);
    CHECK(s.fairness.size() == 6);
    CHECK(s.goodness.size() == 3);
    CHECK(s.reliability.size() == 18);
    CHECK(s.fairness.isOnes());
    CHECK(s.goodness.isOnes());
    CHECK(s.reliability.isOnes());
}

TEST_CASE("update_goodness") {
    auto g = toy_graph();
    auto pr = BehaviorPriors::neutral(g);
    auto s = init_state(g);
    auto good = update_goodness(s, g, pr, HyperParams{});
    CHECK(good[0] == doctest::Approx(4.0 / 6.0));
    CHECK(good[1] == doctest::Approx(0.25));
    CHECK(good[2] == doctest::Approx(-4.0 / 6.0));

    GraphBuilder one;
    one.add("u", "p", 1.0, 0);
    auto single = std::move(one).build();
    CHECK(update_goodness(init_state(single), single, BehaviorPriors::neutral(single), {})[0] == 1.0);

    GraphBuilder two;
    two.add("u", "p", 1.0, 0);
    two.add("v", "p", -1.0, 0);
    auto pair = std::move(two).build();
    auto pp = BehaviorPriors::neutral(pair);
    pp.product_normality[0] = 0.5;
    HyperParams hp{0, 0, 1, 2};
    CHECK(update_goodness(init_state(pair), pair, pp, hp)[0] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("update_reliability") {
    GraphBuilder b;
    b.add("u", "p", 1.0, 0);
    b.add("v", "q", -1.0, 0);
    auto g = std::move(b).build();
    ScoreState<double> s = init_state(g);

    s.goodness << 1.0, 0.67;
    auto r = update_reliability(s, g);
    CHECK(r[0] == 1.0);
    CHECK(r[1] == doctest::Approx(0.5825).epsilon(1e-12));

    s.goodness << 1.0, 4.0 / 6.0;
    CHECK(update_reliability(s, g)[1] == doctest::Approx(0.5833333333333334).epsilon(1e-12));

    s.fairness << 0.0, 1.0;
    s.goodness << -1.0, 1.0;
    CHECK(update_reliability(s, g)[0] == 0.0);
}

TEST_CASE("update_fairness") {
    GraphBuilder b;
    b.add("u", "p", 1.0, 0);
    auto g = std::move(b).build();
    auto pr = BehaviorPriors::neutral(g);
    auto s = init_state(g);
    CHECK(update_fairness(s, g, pr, HyperParams{})[0] == 1.0);
    CHECK(update_fairness(s, g, pr, HyperParams{5, 0, 0, 0})[0] ==
          doctest::Approx(3.5 / 6.0).epsilon(1e-15));
    pr.user_normality[0] = 0.2;
    CHECK(update_fairness(s, g, pr, HyperParams{1, 2, 0, 0})[0] ==
          doctest::Approx((0.5 + 0.4 + 1.0) / 4.0).epsilon(1e-15));
}

TEST_CASE("compute_error") {
    auto g = toy_graph();
    auto a = init_state(g), b = init_state(g);
    CHECK(compute_error(a, b) == 0.0);
    b.goodness[1] -= 0.3;
    CHECK(compute_error(a, b) == doctest::Approx(0.3));
    b.reliability[17] = 0.1;
    CHECK(compute_error(a, b) == doctest::Approx(0.9));
    b.fairness.resize(2);
    CHECK_THROWS(compute_error(a, b));
}

TEST_CASE("run on the toy graph tracks the reference loop") {
    auto g = toy_graph();
    auto pr = BehaviorPriors::neutral(g);
    std::vector<ScoreState<double>> trace;
    RunOptions<double> opts;
    opts.on_iteration = [&](int, const ScoreState<double>& s, double) { trace.push_back(s); };
    auto res = run(g, pr, HyperParams{}, opts);
    CHECK(res.report.converged);
    CHECK(res.report.iterations == static_cast<int>(res.report.error_trace.size()));
    CHECK(res.report.error_trace.back() <= 1e-6);

    auto in = to_oracle(g, pr);
    auto ref = oracle::reference_loop(in.n_users, in.n_products, in.edges, in.user_norm,
                                      in.product_norm, {}, 1e-6);
    REQUIRE(ref.size() == trace.size() + 1);
    for (std::size_t t = 0; t < trace.size(); ++t) {
        CHECK(max_diff(trace[t].fairness, ref[t + 1].F) < 1e-12);
        CHECK(max_diff(trace[t].goodness, ref[t + 1].G) < 1e-12);
        CHECK(max_diff(trace[t].reliability, ref[t + 1].R) < 1e-12);
    }
    // Error between iterations 1 and 2 is the largest per-entry change.
    double e12 = 0;
    for (std::size_t u = 0; u < ref[1].F.size(); ++u)
        e12 = std::max(e12, std::abs(ref[2].F[u] - ref[1].F[u]));
    for (std::size_t k = 0; k < ref[1].R.size(); ++k)
        e12 = std::max(e12, std::abs(ref[2].R[k] - ref[1].R[k]));
    for (std::size_t p = 0; p < ref[1].G.size(); ++p)
        e12 = std::max(e12, std::abs(ref[2].G[p] - ref[1].G[p]));
    CHECK(res.report.error_trace[1] == doctest::Approx(e12).epsilon(1e-12));
    CHECK(e12 >= std::abs(0.62 - 0.43) - 0.01);

    auto uf = *g.users().find("U_F");
    CHECK(res.state.fairness[uf] == doctest::Approx(0.22).epsilon(0.05));
}

TEST_CASE("single perfect rating is already a fixed point") {
    GraphBuilder b;
    b.add("u", "p", 1.0, 0);
    auto g = std::move(b).build();
    auto res = run(g, BehaviorPriors::neutral(g), HyperParams{});
    CHECK(res.report.converged);
    CHECK(res.report.iterations == 1);
    CHECK(res.report.error_trace[0] == 0.0);
    CHECK(res.state.fairness[0] == 1.0);
    CHECK(res.state.goodness[0] == 1.0);
    CHECK(res.state.reliability[0] == 1.0);
}

TEST_CASE("two users disagreeing on one product match the reference loop") {
    GraphBuilder b;
    b.add("u", "p", 1.0, 0);
    b.add("v", "p", -1.0, 0);
    auto g = std::move(b).build();
    auto pr = BehaviorPriors::neutral(g);
    auto res = run(g, pr, HyperParams{});
    auto in = to_oracle(g, pr);
    auto ref = oracle::reference_loop(in.n_users, in.n_products, in.edges, in.user_norm,
                                      in.product_norm, {}, 1e-6);
    CHECK(res.report.iterations == static_cast<int>(ref.size()) - 1);
    CHECK(max_diff(res.state.fairness, ref.back().F) < 1e-9);
    CHECK(max_diff(res.state.goodness, ref.back().G) < 1e-9);
    CHECK(max_diff(res.state.reliability, ref.back().R) < 1e-9);
}

TEST_CASE("random graphs with priors match the reference loop") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        auto g = fairjudge::testing::random_graph(rng, {15, 10, 60});
        auto pr = fairjudge::testing::random_priors(rng, g);
        auto hp = fairjudge::testing::random_params(rng);
        auto res = run(g, pr, hp);
        auto in = to_oracle(g, pr);
        auto ref = oracle::reference_loop(in.n_users, in.n_products, in.edges, in.user_norm,
                                          in.product_norm, {hp.alpha1, hp.alpha2, hp.beta1, hp.beta2},
                                          1e-6);
        CHECK(res.report.converged);
        CHECK(res.report.iterations == static_cast<int>(ref.size()) - 1);
        CHECK(max_diff(res.state.fairness, ref.back().F) < 1e-9);
        CHECK(max_diff(res.state.goodness, ref.back().G) < 1e-9);
        CHECK(max_diff(res.state.reliability, ref.back().R) < 1e-9);
    }
}

TEST_CASE("phases see the staleness order of the update rules") {
    auto g = toy_graph();
    auto pr = BehaviorPriors::neutral(g);
    std::vector<Phase> phases;
    RunOptions<double> opts;
    opts.max_iterations = 2;
    opts.epsilon = 1e-300;
    opts.on_phase = [&](int, Phase p, const Vector<double>&) { phases.push_back(p); };
    auto res = run(g, pr, HyperParams{}, opts);
    CHECK_FALSE(res.report.converged);
    CHECK(res.report.iterations == 2);
    CHECK(phases == std::vector<Phase>{Phase::goodness, Phase::reliability, Phase::fairness,
                                       Phase::goodness, Phase::reliability, Phase::fairness});
}

TEST_CASE("single-precision instantiation stays in range and close to double") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = fairjudge::testing::random_graph(rng, {30, 20, 150});
        auto pr = fairjudge::testing::random_priors(rng, g);
        auto hp = fairjudge::testing::random_params(rng);
        RunOptions<float> fo;
        fo.epsilon = 1e-5;
        auto f = run<float>(g, pr, hp, fo);
        auto d = run<double>(g, pr, hp);
        CHECK(f.report.converged);
        CHECK(f.state.fairness.minCoeff() >= 0.0f);
        CHECK(f.state.fairness.maxCoeff() <= 1.0f);
        CHECK((f.state.fairness.cast<double>() - d.state.fairness).cwiseAbs().maxCoeff() < 1e-3);
    }
}

TEST_CASE("run validates its inputs") {
    auto g = toy_graph();
    auto pr = BehaviorPriors::neutral(g);
    CHECK_THROWS(run(g, pr, HyperParams{-1, 0, 0, 0}));
    RunOptions<double> bad;
    bad.epsilon = 0;
    CHECK_THROWS(run(g, pr, HyperParams{}, bad));
    BehaviorPriors wrong{Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(3)};
    CHECK_THROWS(run(g, wrong, HyperParams{}));
}
