#pragma once

// Fixtures shared by the unit and acceptance suites.

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fairjudge/behavior.hpp"
#include "fairjudge/engine.hpp"
#include "fairjudge/graph.hpp"

namespace fairjudge::testing {

/// The six-user, three-product running example: U_A..U_E agree, U_F
/// contradicts them on every product.
inline RatingGraph toy_graph() {
    GraphBuilder b;
    std::int64_t t = 1000;
    for (const char* u : {"U_A", "U_B", "U_C", "U_D", "U_E"}) {
        b.add(u, "P1", 1.0, t++);
        b.add(u, "P2", 0.5, t++);
        b.add(u, "P3", -1.0, t++);
    }
    b.add("U_F", "P1", -1.0, t++);
    b.add("U_F", "P2", -1.0, t++);
    b.add("U_F", "P3", 1.0, t++);
    return std::move(b).build();
}

struct RandomGraphLimits {
    int max_users = 200;
    int max_products = 100;
    int max_edges = 2000;
};

/// Random graph with every entity of degree >= 1; scores on the half-star
/// grid mixed with arbitrary reals.
inline RatingGraph random_graph(std::mt19937_64& rng, const RandomGraphLimits& limits = {}) {
    std::uniform_int_distribution<int> nu_d(1, limits.max_users);
    std::uniform_int_distribution<int> np_d(1, limits.max_products);
    int nu = nu_d(rng), np = np_d(rng);
    int lo = std::max(nu, np);
    int ne = std::uniform_int_distribution<int>(lo, std::max(lo, limits.max_edges))(rng);
    std::uniform_real_distribution<double> score_d(-1.0, 1.0);
    std::uniform_int_distribution<int> grid_d(0, 4);
    std::uniform_int_distribution<std::int64_t> time_d(0, 10'000'000);
    auto score = [&] {
        return (rng() & 1) ? score_d(rng) : -1.0 + 0.5 * grid_d(rng);
    };
    GraphBuilder b;
    for (int k = 0; k < ne; ++k) {
        int u = k < lo ? k % nu : std::uniform_int_distribution<int>(0, nu - 1)(rng);
        int p = k < lo ? k % np : std::uniform_int_distribution<int>(0, np - 1)(rng);
        b.add("u" + std::to_string(u), "p" + std::to_string(p), score(), time_d(rng));
    }
    return std::move(b).build();
}

inline BehaviorPriors random_priors(std::mt19937_64& rng, const RatingGraph& g) {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    BehaviorPriors pr = BehaviorPriors::neutral(g);
    for (Index i = 0; i < pr.user_normality.size(); ++i)
        pr.user_normality[i] = d(rng);
    for (Index i = 0; i < pr.product_normality.size(); ++i)
        pr.product_normality[i] = d(rng);
    return pr;
}

inline HyperParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(0.0, 5.0);
    return {d(rng), d(rng), d(rng), d(rng)};
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("fairjudge_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream(path) << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace fairjudge::testing
