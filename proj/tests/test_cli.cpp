// End-to-end checks of the command-line surface: exit codes, output shape,
// determinism, and the documented walkthroughs. Shells out to the binary
// named by CTQ_CLI.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
    const char* env = std::getenv("CTQ_CLI");
    return env ? env : "build/tools/ctq";
}

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

RunResult run(const std::string& args, const std::string& env = "") {
    fs::path out = fs::temp_directory_path() / "ctq_cli_out.txt";
    fs::path err = fs::temp_directory_path() / "ctq_cli_err.txt";
    std::string cmd = env + (env.empty() ? "" : " ") + cli_path() + " " + args + " > " +
                      out.string() + " 2> " + err.string();
    int rc = std::system(cmd.c_str());
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    return {WEXITSTATUS(rc), slurp(out), slurp(err)};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("build reports a summary and exit codes follow the contract") {
    TempDir dir("ctq_cli_build");
    RunResult r = run("build --fixture-fig1 " + (dir.path / "idx").string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"n\":6") != std::string::npos);
    CHECK(r.out.find("\"d\":10") != std::string::npos);
    CHECK(r.out.find("\"c\":") != std::string::npos);
    CHECK(r.out.find("\"hullVertexCount\":") != std::string::npos);

    // malformed input names the line and exits 1
    write_file(dir.path / "bad.tsv", "ok\t0:0.5\nx\t3:abc\n");
    RunResult bad = run("build " + (dir.path / "bad.tsv").string() + " " +
                        (dir.path / "idx2").string());
    CHECK(bad.exit_code == 1);
    CHECK(bad.err.find(":2") != std::string::npos);

    // unreadable input exits 2
    RunResult missing =
        run("build " + (dir.path / "nope.tsv").string() + " " + (dir.path / "idx3").string());
    CHECK(missing.exit_code == 2);

    // an empty input yields a valid empty index
    write_file(dir.path / "empty.tsv", "# nothing here\n");
    RunResult empty = run("build " + (dir.path / "empty.tsv").string() + " " +
                          (dir.path / "idx4").string());
    CHECK(empty.exit_code == 0);
    CHECK(empty.out.find("\"n\":0") != std::string::npos);
}

TEST_CASE("query emits ordered rows and candidate stats") {
    TempDir dir("ctq_cli_query");
    std::string idx = (dir.path / "idx").string();
    REQUIRE(run("build --fixture-fig1 " + idx).exit_code == 0);
    write_file(dir.path / "q.tsv", "q\t1:0.8 3:0.3 4:0.5\n");

    RunResult r = run("query " + idx + " " + (dir.path / "q.tsv").string() +
                      " --theta 0.6 --strategy lockstep --stop baseline --stats");
    CHECK(r.exit_code == 0);
    // rows sorted by score descending
    std::istringstream rows(r.out);
    std::string line;
    std::vector<std::string> ids;
    double prev = 2.0;
    while (std::getline(rows, line)) {
        std::istringstream t(line);
        std::string qid, vid, score;
        std::getline(t, qid, '\t');
        std::getline(t, vid, '\t');
        std::getline(t, score, '\t');
        ids.push_back(vid);
        double s = std::strtod(score.c_str(), nullptr);
        CHECK(s <= prev);
        prev = s;
    }
    CHECK(ids == std::vector<std::string>{"s1", "s5"});
    CHECK(r.err.find("\"candidates\":[\"s1\",\"s2\",\"s3\",\"s5\"]") != std::string::npos);
    CHECK(r.err.find("\"accessCost\":9") != std::string::npos);

    // flag validation: exactly one of --theta/--topk
    RunResult both = run("query " + idx + " " + (dir.path / "q.tsv").string() +
                         " --theta 0.5 --topk 2");
    CHECK(both.exit_code == 1);
    RunResult neither = run("query " + idx + " " + (dir.path / "q.tsv").string());
    CHECK(neither.exit_code == 1);
    RunResult badstrat = run("query " + idx + " " + (dir.path / "q.tsv").string() +
                             " --theta 0.5 --strategy wobble");
    CHECK(badstrat.exit_code == 1);

    // hull+tight returns identical rows with no higher access cost
    RunResult hull = run("query " + idx + " " + (dir.path / "q.tsv").string() +
                         " --theta 0.6 --strategy hull --stop tight");
    CHECK(hull.exit_code == 0);
    CHECK(hull.out == r.out);

    // the approximation constant tunes the traversal, never the answer
    RunResult tuned = run("query " + idx + " " + (dir.path / "q.tsv").string() +
                          " --theta 0.6 --strategy hull --tau-tilde 2.5");
    CHECK(tuned.exit_code == 0);
    CHECK(tuned.out == r.out);
}

TEST_CASE("every input vector matches itself at theta = 1") {
    TempDir dir("ctq_cli_roundtrip");
    std::string data =
        "a\t0:0.6 2:0.8\n"
        "b\t1:1.5 3:2.5 4:0.5\n"
        "c\t2:0.3 5:0.4 7:0.8\n";
    write_file(dir.path / "data.tsv", data);
    std::string idx = (dir.path / "idx").string();
    REQUIRE(run("build " + (dir.path / "data.tsv").string() + " " + idx).exit_code == 0);

    RunResult r = run("query " + idx + " " + (dir.path / "data.tsv").string() + " --theta 1.0",
                      "CTQ_THREADS=2");
    CHECK(r.exit_code == 0);
    for (const char* id : {"a", "b", "c"}) {
        std::string needle = std::string(id) + "\t" + id + "\t";
        CHECK(r.out.find(needle) != std::string::npos);
    }

    // worker count must not affect output or ordering
    RunResult serial =
        run("query " + idx + " " + (dir.path / "data.tsv").string() + " --theta 1.0",
            "CTQ_THREADS=1");
    CHECK(serial.out == r.out);
}

TEST_CASE("top-k rows per query") {
    TempDir dir("ctq_cli_topk");
    std::string idx = (dir.path / "idx").string();
    REQUIRE(run("build --fixture-fig1 " + idx).exit_code == 0);
    write_file(dir.path / "q.tsv", "q\t1:0.8 3:0.3 4:0.5\n");
    RunResult r = run("query " + idx + " " + (dir.path / "q.tsv").string() + " --topk 3");
    CHECK(r.exit_code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);
    CHECK(r.out.find("q\ts1\t") == 0);  // best match first
}

TEST_CASE("bench CSV is deterministic and OPT-annotated on tiny instances") {
    TempDir dir("ctq_cli_bench");
    std::string idx = (dir.path / "idx").string();
    RunResult build = run("build --fixture-fig1 " + idx);
    REQUIRE(build.exit_code == 0);
    // convexity constant from the build summary
    size_t cpos = build.out.find("\"c\":");
    REQUIRE(cpos != std::string::npos);
    long c = std::strtol(build.out.c_str() + cpos + 4, nullptr, 10);

    write_file(dir.path / "q.tsv", "q\t1:0.8 3:0.3 4:0.5\nq2\t1:0.7 4:0.7\n");
    std::string args = "bench " + idx + " " + (dir.path / "q.tsv").string() +
                       " --theta 0.4 --strategies lockstep,maxred,hull --seed 7";
    RunResult a = run(args);
    RunResult b = run(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);  // same seed, byte-identical CSV

    std::istringstream csv(a.out);
    std::string line;
    std::getline(csv, line);
    CHECK(line == "query,strategy,theta,accessCost,opt,lastGap,epsilonUpper,gapFraction");
    size_t rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        std::istringstream t(line);
        std::string qid, strategy, theta, cost, opt, gap, eps, frac;
        std::getline(t, qid, ',');
        std::getline(t, strategy, ',');
        std::getline(t, theta, ',');
        std::getline(t, cost, ',');
        std::getline(t, opt, ',');
        std::getline(t, gap, ',');
        std::getline(t, eps, ',');
        std::getline(t, frac, ',');
        double fraction = std::strtod(frac.c_str(), nullptr);
        CHECK(fraction >= 0.0);
        CHECK(fraction <= 1.0);
        CHECK_FALSE(opt.empty());  // tiny instance: the lattice guard permits OPT
        if (strategy == "hull") {
            long costv = std::strtol(cost.c_str(), nullptr, 10);
            long optv = std::strtol(opt.c_str(), nullptr, 10);
            CHECK(costv < optv + c);
        }
    }
    CHECK(rows == 6);

    RunResult to_file = run(args + " --emit-csv " + (dir.path / "out.csv").string());
    CHECK(to_file.exit_code == 0);
    std::ifstream written(dir.path / "out.csv");
    std::stringstream ss;
    ss << written.rdbuf();
    CHECK(ss.str() == a.out);
}
