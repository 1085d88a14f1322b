#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>
#include <string>

#include "fairjudge/io.hpp"
#include "support.hpp"

using fairjudge::testing::read_file;
using fairjudge::testing::TempDir;
using fairjudge::testing::write_file;

namespace {

const std::string kCli = FAIRJUDGE_CLI;
const std::string kData = FAIRJUDGE_DATA_DIR;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(const TempDir& dir, const std::string& args, const std::string& env = "") {
    auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    std::string cmd = env + " '" + kCli + "' " + args + " >'" + out.string() + "' 2>'" +
                      err.string() + "'";
    int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(out), read_file(err)};
}

std::string toy() { return "--ratings '" + kData + "/toy.csv'"; }

double user_score(const std::string& csv, const std::string& id) {
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(id + ",user,", 0) == 0)
            return std::stod(line.substr(id.size() + 6));
    return -1;
}

} // namespace

TEST_CASE("score reproduces the toy network") {
    TempDir dir;
    auto r = cli(dir, "score " + toy() + " --alpha1 0 --alpha2 0 --beta1 0 --beta2 0");
    REQUIRE(r.code == 0);
    CHECK(std::abs(user_score(r.out, "U_F") - 0.22) <= 0.01);
    CHECK(std::abs(user_score(r.out, "U_A") - 0.86) <= 0.01);
    CHECK(r.err.find("iteration=1 error=") != std::string::npos);
}

TEST_CASE("ensemble over the single all-zero combo equals score byte for byte") {
    TempDir dir;
    auto a = cli(dir, "score " + toy() + " --quiet --out '" + (dir / "a.csv").string() + "'");
    auto b = cli(dir, "ensemble " + toy() + " --param-max 0 --quiet --out '" +
                          (dir / "b.csv").string() + "'");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
}

TEST_CASE("ensemble honours FAIRJUDGE_JOBS and stays byte-identical") {
    TempDir dir;
    auto a = cli(dir, "ensemble " + toy() + " --param-max 1 --quiet --out '" +
                          (dir / "a.csv").string() + "'");
    auto b = cli(dir, "ensemble " + toy() + " --param-max 1 --quiet --out '" +
                          (dir / "b.csv").string() + "'",
                 "FAIRJUDGE_JOBS=4");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
}

TEST_CASE("eval on a perfect ranking") {
    TempDir dir;
    write_file(dir / "s.csv", "entity_id,side,score\na,user,0.9\nb,user,0.1\nx,product,0.3\n");
    write_file(dir / "l.csv", "user_id,label\na,fair\nb,unfair\n");
    auto r = cli(dir, "eval --scores '" + (dir / "s.csv").string() + "' --labels '" +
                          (dir / "l.csv").string() + "'");
    REQUIRE(r.code == 0);
    CHECK(r.out == "AP=1.000000 AUC=1.000000\n");
}

TEST_CASE("eval writes top-k and reliability histogram reports") {
    TempDir dir;
    auto s = cli(dir, "score " + toy() + " --quiet --out '" + (dir / "s.csv").string() +
                          "' --edges-out '" + (dir / "e.csv").string() + "'");
    REQUIRE(s.code == 0);
    CHECK(read_file(dir / "e.csv").rfind("user_id,product_id,reliability\nU_A,P1,", 0) == 0);
    auto r = cli(dir, "eval --scores '" + (dir / "s.csv").string() + "' --labels '" + kData +
                          "/toy_labels.csv' --top 1 --report-out '" + (dir / "top.csv").string() +
                          "' " + toy() + " --edges '" + (dir / "e.csv").string() +
                          "' --hist-out '" + (dir / "h.csv").string() + "' --hist-bins 4");
    REQUIRE(r.code == 0);
    CHECK(read_file(dir / "top.csv").rfind("rank,user_id,fairness\n1,U_F,", 0) == 0);
    auto hist = read_file(dir / "h.csv");
    CHECK(hist.rfind("bin_lo,bin_hi,freq_fair,freq_unfair\n0,0.25,", 0) == 0);
    CHECK(std::count(hist.begin(), hist.end(), '\n') == 5);

    auto k = cli(dir, "eval --scores '" + (dir / "s.csv").string() + "' " + toy() + " --edges '" +
                          (dir / "e.csv").string() + "' --hist-out '" +
                          (dir / "h2.csv").string() + "' --selector topk --hist-k 1");
    CHECK(k.code == 0);
}

TEST_CASE("features export with labels") {
    TempDir dir;
    auto r = cli(dir, "features " + toy() + " --param-max 1 --quiet --labels '" + kData +
                          "/toy_labels.csv' --out '" + (dir / "f.csv").string() + "'");
    REQUIRE(r.code == 0);
    auto text = read_file(dir / "f.csv");
    auto header = text.substr(0, text.find('\n'));
    CHECK(header.rfind("user_id,0_0_0_0,0_0_0_1,", 0) == 0);
    CHECK(std::count(header.begin(), header.end(), ',') == 17);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("priors subcommand") {
    TempDir dir;
    auto r = cli(dir, "priors " + toy() + " --bins 16 --smoothing 2");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("entity_id,side,normality\nU_A,user,", 0) == 0);
    write_file(dir / "p.csv", "entity_id,side,normality\nU_F,user,0.1\nghost,user,0.5\n");
    auto s = cli(dir, "score " + toy() + " --alpha2 3 --priors '" + (dir / "p.csv").string() + "'");
    CHECK(s.code == 0);
    CHECK(s.err.find("warning:") != std::string::npos);
}

TEST_CASE("gen is reproducible and feeds score") {
    TempDir dir;
    std::string common = "gen --users 50 --products 20 --edges 400 --seed 9 --shills 5 "
                         "--camouflage 0.2 --burst-gap 15 --labels-out '" +
                         (dir / "l.csv").string() + "' --out ";
    REQUIRE(cli(dir, common + "'" + (dir / "a.csv").string() + "'").code == 0);
    REQUIRE(cli(dir, common + "'" + (dir / "b.csv").string() + "'").code == 0);
    CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
    CHECK(read_file(dir / "l.csv").find("shill_4,unfair") != std::string::npos);
    auto s = cli(dir, "score --ratings '" + (dir / "a.csv").string() +
                          "' --rating-min -1 --rating-max 1 --alpha2 1 --quiet");
    CHECK(s.code == 0);
}

TEST_CASE("unipartite input") {
    TempDir dir;
    write_file(dir / "u.csv",
               "source_id,target_id,rating,timestamp\na,b,10,1\nb,a,-10,2\nc,b,5,3\n");
    auto r = cli(dir, "score --unipartite '" + (dir / "u.csv").string() +
                          "' --rating-min -10 --rating-max 10 --quiet");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("c,user,") != std::string::npos);
    CHECK(r.out.find("b,product,") != std::string::npos);
}

TEST_CASE("bench emits one row per size") {
    TempDir dir;
    auto r = cli(dir, "bench --sizes 1000,2000 --repeats 1");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("edges,seconds,iterations\n1000,", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);
}

TEST_CASE("exit codes") {
    TempDir dir;
    CHECK(cli(dir, "").code == 1);
    CHECK(cli(dir, "score").code == 1);
    CHECK(cli(dir, "score --ratings '" + (dir / "missing.csv").string() + "'").code == 1);
    CHECK(cli(dir, "score " + toy() + " --alpha1 -1").code == 1);
    CHECK(cli(dir, "score " + toy() + " --bogus").code == 1);

    write_file(dir / "bad.csv", "user_id,product_id,rating,timestamp\nu,p,9,1\n");
    auto bad = cli(dir, "score --ratings '" + (dir / "bad.csv").string() + "'");
    CHECK(bad.code == 2);
    CHECK(bad.err.find("line 2") != std::string::npos);

    write_file(dir / "l.csv", "user_id,label\nnobody,fair\n");
    CHECK(cli(dir, "features " + toy() + " --param-max 0 --labels '" + (dir / "l.csv").string() +
                       "'")
              .code == 2);

    CHECK(cli(dir, "score " + toy() + " --max-iter 2 --quiet").code == 3);
    CHECK(cli(dir, "ensemble " + toy() + " --param-max 0 --max-iter 2 --quiet").code == 3);
}

TEST_CASE("--help documents every flag with defaults") {
    TempDir dir;
    struct Expect {
        const char* cmd;
        std::vector<const char*> flags;
    };
    std::vector<Expect> expected{
        {"priors", {"--ratings", "--unipartite", "--rating-min", "--rating-max", "--bins", "--smoothing", "--out"}},
        {"score", {"--epsilon", "--alpha1", "--alpha2", "--beta1", "--beta2", "--max-iter", "--edges-out", "--priors"}},
        {"ensemble", {"--param-max", "--jobs", "--epsilon", "--max-iter", "--out", "--edges-out"}},
        {"features", {"--param-max", "--jobs", "--labels", "--out"}},
        {"eval", {"--scores", "--labels", "--positive", "--top", "--edges", "--hist-out", "--selector"}},
        {"gen", {"--seed", "--users", "--products", "--edges", "--shills", "--camouflage", "--burst-gap"}},
        {"bench", {"--sizes", "--seed", "--repeats", "--epsilon"}},
    };
    for (const auto& e : expected) {
        auto r = cli(dir, std::string(e.cmd) + " --help");
        CHECK(r.code == 0);
        for (const char* f : e.flags) {
            INFO(e.cmd << " " << f);
            CHECK(r.out.find(f) != std::string::npos);
        }
    }
    auto score_help = cli(dir, "score --help").out;
    CHECK(score_help.find("1e-06") != std::string::npos);
    CHECK(cli(dir, "ensemble --help").out.find("FAIRJUDGE_JOBS") != std::string::npos);
}
