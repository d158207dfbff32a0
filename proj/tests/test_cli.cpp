#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "qgraph/cli.hpp"

using namespace qgraph;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) {
    return std::string(QGRAPH_TEST_DATA_DIR) + "/" + name;
}

// rows of a CSV body as split fields, header dropped
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (first) {
            first = false;
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        rows.push_back(fields);
    }
    return rows;
}

}  // namespace

TEST_CASE("spectrum: interval CSV lists k = pi, 2pi, 3pi") {
    RunResult r = run_cli({"spectrum", data("interval.graph"), "--kmax", "10"});
    REQUIRE(r.code == 0);
    auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 4);
    REQUIRE(std::stod(rows[0][1]) == 0.0);
    for (int n = 1; n <= 3; ++n) {
        REQUIRE(std::stod(rows[n][1]) == Catch::Approx(n * M_PI).epsilon(1e-9));
        REQUIRE(rows[n][3] == "1");
    }
}

TEST_CASE("gap: circle of length 2") {
    RunResult r = run_cli({"gap", data("circle2.graph")});
    REQUIRE(r.code == 0);
    auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 1);
    REQUIRE(std::stod(rows[0][0]) == Catch::Approx(M_PI * M_PI).epsilon(1e-9));
    REQUIRE(rows[0][2] == "2");
}

TEST_CASE("verify join on the interval: holds, exit 0") {
    RunResult r = run_cli({"verify", "--theorem", "join", "--v1", "0", "--v2", "1",
                           data("interval.graph")});
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("theorem=join") != std::string::npos);
    REQUIRE(r.out.find("verdict=holds") != std::string::npos);
}

TEST_CASE("verify add with a short edge: no claim, exit 2") {
    RunResult r = run_cli({"verify", "--theorem", "add", "--v1", "0", "--v2", "1", "--len", "0.5",
                           data("interval.graph")});
    REQUIRE(r.code == 2);
    REQUIRE(r.out.find("verdict=no-claim") != std::string::npos);
}

TEST_CASE("verify long-edge and cut and interval theorems route correctly") {
    RunResult le = run_cli({"verify", "--theorem", "long-edge", "--v1", "0", "--v2", "1", "--len",
                            "2.5", data("interval.graph")});
    REQUIRE(le.code == 0);
    REQUIRE(le.out.find("theorem=long-edge") != std::string::npos);
    REQUIRE(le.out.find("verdict=holds") != std::string::npos);

    RunResult cut = run_cli({"verify", "--theorem", "cut", "--edge", "0", "--t", "0.5",
                             data("circle2.graph")});
    REQUIRE(cut.code == 0);
    REQUIRE(cut.out.find("verdict=holds") != std::string::npos);

    RunResult iv = run_cli({"verify", "--theorem", "interval", "--edge", "0", "--x", "0.5",
                            "--len", "0.3", data("circle2.graph")});
    REQUIRE(iv.code == 0);
    REQUIRE(iv.out.find("theorem=interval") != std::string::npos);

    RunResult missing = run_cli({"verify", "--theorem", "pendant", data("interval.graph")});
    REQUIRE(missing.code == 1);
    REQUIRE(missing.err.find("--v1") != std::string::npos);
}

TEST_CASE("verify delete on a missing file: exit 1 with a message") {
    RunResult r = run_cli({"verify", "--theorem", "delete", "--edge", "5", "missing.graph"});
    REQUIRE(r.code == 1);
    REQUIRE(r.err.find("missing.graph") != std::string::npos);
}

TEST_CASE("surgery: glue emits a loop graph that round-trips") {
    RunResult r = run_cli({"surgery", data("interval.graph"), "--op", "glue:0,1"});
    REQUIRE(r.code == 0);
    MetricGraph g = parse_graph(r.out);
    REQUIRE(g.vertex_count() == 1);
    REQUIRE(g.edge_count() == 1);
    REQUIRE(serialize(g) == r.out);
}

TEST_CASE("surgery: bad op string is an error") {
    RunResult r = run_cli({"surgery", data("interval.graph"), "--op", "explode:1"});
    REQUIRE(r.code == 1);
    REQUIRE(r.err.find("unknown surgery op") != std::string::npos);
}

TEST_CASE("oracle: interval eigenvalues via FEM") {
    RunResult r = run_cli({"oracle", data("interval.graph"), "--h", "0.015625", "--n", "2"});
    REQUIRE(r.code == 0);
    auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    REQUIRE(std::fabs(std::stod(rows[0][1])) <= 1e-8);
    REQUIRE(std::stod(rows[1][1]) == Catch::Approx(M_PI * M_PI).epsilon(0.005));
}

TEST_CASE("suite: small run has zero violations and is byte-deterministic") {
    RunResult a = run_cli({"suite", "--seed", "42", "--n", "3"});
    REQUIRE(a.code == 0);
    REQUIRE(a.out.find("violated=0") != std::string::npos);
    REQUIRE(a.out.find("# summary") != std::string::npos);
    REQUIRE(a.out.find("seed=") != std::string::npos);

    RunResult b = run_cli({"suite", "--seed", "42", "--n", "3"});
    REQUIRE(a.out == b.out);

    RunResult c = run_cli({"suite", "--seed", "43", "--n", "3"});
    REQUIRE(a.out != c.out);
}

TEST_CASE("suite: n = 0 is an error") {
    RunResult r = run_cli({"suite", "--seed", "1", "--n", "0"});
    REQUIRE(r.code == 1);
}

TEST_CASE("--out redirects instead of printing") {
    std::string path = "/tmp/qgraph_test_spectrum_out.csv";
    RunResult r = run_cli({"spectrum", data("interval.graph"), "--kmax", "4", "--out", path});
    REQUIRE(r.code == 0);
    REQUIRE(r.out.empty());
    std::ifstream f(path);
    REQUIRE(f.good());
    std::string header;
    std::getline(f, header);
    REQUIRE(header == "index,k,lambda,multiplicity");
    f.close();
    std::remove(path.c_str());
}

TEST_CASE("discrete graph file parses through the same format") {
    GraphFile f = parse_graph_file(cli::detail::read_file(data("discrete_p3.graph")));
    REQUIRE(f.discrete);
    DiscreteGraph d = to_discrete(f);
    REQUIRE(d.vertex_count() == 3);
    DiscreteSpectrum s = spectrum(d);
    REQUIRE(s.values[1] == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("help exits cleanly") {
    RunResult r = run_cli({"--help"});
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("spectrum") != std::string::npos);
}

TEST_CASE("unknown subcommand is an error") {
    RunResult r = run_cli({"fly"});
    REQUIRE(r.code == 1);
}
