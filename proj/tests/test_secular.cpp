#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qgraph/fem.hpp"
#include "qgraph/random.hpp"
#include "qgraph/secular.hpp"

using namespace qgraph;
using Catch::Approx;

namespace {

MetricGraph interval(double a = 1.0) { return MetricGraph({0, 1}, {Edge(0, 1, a)}); }

MetricGraph circle2() {
    // glue the ends of two unit edges
    MetricGraph path({0, 1, 2}, {Edge(0, 1, 1.0), Edge(1, 2, 1.0)});
    return glue_vertices(path, 0, 2).graph;
}

MetricGraph star3() {
    return MetricGraph({0, 1, 2, 3}, {Edge(0, 1, 1.0), Edge(0, 2, 1.0), Edge(0, 3, 1.0)});
}

double det2(const Mat& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

}  // namespace

TEST_CASE("secular_matrix: interval rows and determinant") {
    for (double k : {0.3, 1.0, 2.7}) {
        Mat m = secular_matrix(interval(), k);
        REQUIRE(m.rows() == 2);
        REQUIRE(m(0, 0) == 0.0);
        REQUIRE(m(0, 1) == 1.0);
        REQUIRE(m(1, 0) == Approx(std::sin(k)).margin(1e-15));
        REQUIRE(m(1, 1) == Approx(-std::cos(k)).margin(1e-15));
        REQUIRE(det2(m) == Approx(-std::sin(k)).margin(1e-14));
    }
}

TEST_CASE("secular_matrix: loop determinant vanishes exactly when cos(kl) = 1") {
    MetricGraph loop({0}, {Edge(0, 0, 1.5)});
    for (double k : {0.5, 1.0, 2.0, 4.0}) {
        Mat m = secular_matrix(loop, k);
        REQUIRE(det2(m) == Approx(2.0 - 2.0 * std::cos(1.5 * k)).margin(1e-13));
    }
    double k_eigen = 2.0 * M_PI / 1.5;
    REQUIRE(secular_indicator(loop, k_eigen).sigma_min <= 1e-9);
}

TEST_CASE("secular_matrix: k = 0 is rejected") {
    REQUIRE_THROWS_AS(secular_matrix(interval(), 0.0), Error);
    REQUIRE_THROWS_AS(secular_matrix(interval(), -1.0), Error);
}

TEST_CASE("secular_indicator: interval") {
    REQUIRE(secular_indicator(interval(), M_PI).sigma_min <= 1e-9);
    REQUIRE(secular_indicator(interval(), M_PI / 2.0).sigma_min >= 0.1);
}

TEST_CASE("secular_indicator: circle of length 2*pi has a 2-dimensional null space at k=1") {
    MetricGraph circle({0}, {Edge(0, 0, 2.0 * M_PI)});
    Svd s = svd(secular_matrix(circle, 1.0));
    REQUIRE(s.sigma[0] <= 1e-9);
    REQUIRE(s.sigma[1] <= 1e-9);
}

TEST_CASE("eigenvalues: interval spectrum k = n*pi, all simple") {
    Spectrum s = eigenvalues(interval(), 10.0);
    REQUIRE(s.entries.size() == 4);
    REQUIRE(s.entries[0].k == 0.0);
    REQUIRE(s.entries[0].multiplicity == 1);
    for (int n = 1; n <= 3; ++n) {
        REQUIRE(s.entries[n].k == Approx(n * M_PI).margin(1e-8 * (1.0 + n * M_PI)));
        REQUIRE(s.entries[n].multiplicity == 1);
        REQUIRE(s.entries[n].lambda == Approx(s.entries[n].k * s.entries[n].k));
    }
    REQUIRE(s.warnings.empty());
}

TEST_CASE("eigenvalues: circle of length 2 has double eigenvalues at k = n*pi") {
    Spectrum s = eigenvalues(circle2(), 10.0);
    REQUIRE(s.entries.size() == 4);
    for (int n = 1; n <= 3; ++n) {
        REQUIRE(s.entries[n].k == Approx(n * M_PI).margin(1e-8 * (1.0 + n * M_PI)));
        REQUIRE(s.entries[n].multiplicity == 2);
    }
}

TEST_CASE("eigenvalues: equilateral 3-star starts at k = pi/2 with multiplicity 2") {
    Spectrum s = eigenvalues(star3(), 4.0);
    REQUIRE(s.entries.size() >= 2);
    REQUIRE(s.entries[1].k == Approx(M_PI / 2.0).margin(1e-8));
    REQUIRE(s.entries[1].multiplicity == 2);
}

TEST_CASE("eigenvalues: disconnected input is rejected") {
    MetricGraph two({0, 1, 2, 3}, {Edge(0, 1, 1.0), Edge(2, 3, 1.0)});
    REQUIRE_THROWS_AS(eigenvalues(two, 5.0), Error);
}

TEST_CASE("eigenspace: interval at k = pi is sqrt(2) cos(pi x)") {
    auto space = eigenspace(interval(), M_PI);
    REQUIRE(space.size() == 1);
    const Eigenfunction& f = space[0];
    REQUIRE(f.coefficients()[0][0] == Approx(std::sqrt(2.0)).margin(1e-9));
    REQUIRE(f.coefficients()[0][1] == Approx(0.0).margin(1e-9));
    REQUIRE(vertex_value(interval(), f, 0) == Approx(std::sqrt(2.0)).margin(1e-9));
    REQUIRE(vertex_value(interval(), f, 1) == Approx(-std::sqrt(2.0)).margin(1e-9));
    REQUIRE(l2_inner(f, f) == Approx(1.0).margin(1e-9));
}

TEST_CASE("eigenspace: circle of circumference 2*pi at k = 1 is 2-dimensional") {
    MetricGraph circle({0}, {Edge(0, 0, 2.0 * M_PI)});
    auto space = eigenspace(circle, 1.0);
    REQUIRE(space.size() == 2);
    REQUIRE(l2_inner(space[0], space[0]) == Approx(1.0).margin(1e-9));
    REQUIRE(l2_inner(space[1], space[1]) == Approx(1.0).margin(1e-9));
    REQUIRE(l2_inner(space[0], space[1]) == Approx(0.0).margin(1e-9));
}

TEST_CASE("eigenspace: non-eigenvalue k is an error") {
    REQUIRE_THROWS_AS(eigenspace(interval(), 1.7), Error);
}

TEST_CASE("eigenspace: ground state is the normalized constant") {
    auto space = eigenspace(circle2(), 0.0);
    REQUIRE(space.size() == 1);
    REQUIRE(space[0].value(0, 0.3) == Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
    REQUIRE(l2_inner(space[0], space[0]) == Approx(1.0).margin(1e-12));
}

TEST_CASE("vertex_value: missing vertex is an error") {
    auto space = eigenspace(interval(), M_PI);
    REQUIRE_THROWS_AS(vertex_value(interval(), space[0], 9), Error);
}

TEST_CASE("edge_trace: shift identities") {
    Vec lengths{1.0};
    Eigenfunction cospix(M_PI, {{1.0, 0.0}}, lengths);

    EdgeTrace at0 = edge_trace(cospix, 0, 0.0);
    REQUIRE(at0.alpha == Approx(0.0).margin(1e-15));
    REQUIRE(at0.beta == Approx(1.0).margin(1e-15));

    EdgeTrace mid = edge_trace(cospix, 0, 0.5);
    REQUIRE(mid.alpha == Approx(-1.0).margin(1e-12));
    REQUIRE(mid.beta == Approx(0.0).margin(1e-12));

    REQUIRE_THROWS_AS(edge_trace(cospix, 0, 1.0), Error);

    // beta = psi(x*), alpha = psi'(x*)/k at a generic point
    Eigenfunction f(2.0, {{0.7, -0.4}}, lengths);
    EdgeTrace t = edge_trace(f, 0, 0.37);
    REQUIRE(t.beta == Approx(f.value(0, 0.37)).margin(1e-14));
    REQUIRE(t.alpha == Approx(f.derivative(0, 0.37) / 2.0).margin(1e-14));
}

TEST_CASE("weyl_count_check: fixtures and a broken spectrum") {
    Spectrum s = eigenvalues(interval(), 10.0);
    REQUIRE(weyl_count_check(interval(), s, 10.0));

    Spectrum c = eigenvalues(circle2(), 10.0);
    long long count = 0;
    for (const auto& e : c.entries)
        if (e.k > 0.0) count += e.multiplicity;
    REQUIRE(count == 6);
    REQUIRE(weyl_count_check(circle2(), c, 10.0));

    // dropping more roots than the slack N + M + 2 fails the check
    Spectrum broken = eigenvalues(interval(), 40.0);
    REQUIRE(weyl_count_check(interval(), broken, 40.0));
    while (broken.entries.size() > 5) broken.entries.pop_back();
    REQUIRE_FALSE(weyl_count_check(interval(), broken, 40.0));
}

TEST_CASE("eigenfunction invariants on assorted graphs") {
    Rng rng(71);
    std::vector<MetricGraph> graphs{interval(), circle2(), star3(), flower({1.0, 1.0})};
    for (int trial = 0; trial < 6; ++trial)
        graphs.push_back(random_connected_metric_graph(rng));

    for (const MetricGraph& g : graphs) {
        Spectrum s = first_n_positive(g, 3);
        int checked = 0;
        for (const auto& entry : s.entries) {
            if (entry.k == 0.0 || checked >= 3) continue;
            ++checked;
            auto space = eigenspace(g, entry.k);
            REQUIRE(static_cast<int>(space.size()) == entry.multiplicity);
            for (const auto& f : space) {
                REQUIRE(matching_residual(g, f) < 1e-7);
                REQUIRE(l2_inner(f, f) == Approx(1.0).margin(1e-9));
                REQUIRE(std::fabs(graph_integral(f)) < 1e-7);
            }
        }
    }
}

TEST_CASE("scale covariance: doubling all lengths halves every k") {
    Rng rng(72);
    for (int trial = 0; trial < 5; ++trial) {
        MetricGraph g = random_connected_metric_graph(rng);
        std::vector<Edge> scaled_edges;
        for (const Edge& e : g.edges()) scaled_edges.emplace_back(e.a, e.b, 2.0 * e.length);
        MetricGraph scaled(g.vertices(), std::move(scaled_edges));

        Spectrum s1 = first_n_positive(g, 3);
        Spectrum s2 = first_n_positive(scaled, 3);
        for (std::size_t i = 1; i < std::min<std::size_t>(4, std::min(s1.entries.size(), s2.entries.size())); ++i) {
            REQUIRE(s2.entries[i].k == Approx(s1.entries[i].k / 2.0).epsilon(1e-8));
            REQUIRE(s2.entries[i].multiplicity == s1.entries[i].multiplicity);
        }
    }
}

TEST_CASE("subdividing an edge leaves the spectrum unchanged") {
    Rng rng(73);
    for (int trial = 0; trial < 5; ++trial) {
        MetricGraph g = random_connected_metric_graph(rng);
        EdgeId e = rng.index(g.edge_count());
        double t = rng.uniform(0.2, 0.8) * g.edges()[e].length;
        CutResult cut = cut_edge(g, e, t);
        MetricGraph subdivided = glue_vertices(cut.graph, cut.leaf_a, cut.leaf_b).graph;

        Spectrum s1 = first_n_positive(g, 2);
        Spectrum s2 = first_n_positive(subdivided, 2);
        for (std::size_t i = 1; i < 3 && i < std::min(s1.entries.size(), s2.entries.size()); ++i) {
            REQUIRE(s2.entries[i].k == Approx(s1.entries[i].k).epsilon(1e-7));
            REQUIRE(s2.entries[i].multiplicity == s1.entries[i].multiplicity);
        }
    }
}

TEST_CASE("regression: root cluster tighter than the coarse scan grid") {
    // three simple roots at k = 3.7113, 3.7545, 3.7629 share one grid cell
    // (step pi/(8L) = 0.067) with no net determinant sign change; the fine
    // rescan of active cells has to resolve all of them
    MetricGraph g({0, 1, 2}, {Edge(0, 1, 1.5075931455865819), Edge(1, 2, 0.8246725585785171),
                              Edge(0, 1, 1.8319635767634646), Edge(1, 1, 1.69298528540172)});
    Spectrum s = eigenvalues(g, 4.2);
    std::vector<double> expect{0.0, 1.185339317, 1.881442907, 1.888093648, 2.572268857,
                               3.711305326, 3.754540404, 3.762885814};
    REQUIRE(s.entries.size() == expect.size());
    for (std::size_t i = 1; i < expect.size(); ++i) {
        REQUIRE(s.entries[i].k == Approx(expect[i]).margin(1e-7));
        REQUIRE(s.entries[i].multiplicity == 1);
    }
    // cross-check against the oracle
    Vec fem = oracle_eigenvalues(g, g.edges()[1].length / 64.0, 6);
    Vec sec = s.positive_lambdas();
    for (int j = 1; j <= 5; ++j)
        REQUIRE(fem[j] == Approx(sec[j - 1]).epsilon(0.005));
}

TEST_CASE("lower bound: lambda1 >= (pi/L)^2 on random connected graphs") {
    Rng rng(74);
    for (int trial = 0; trial < 20; ++trial) {
        MetricGraph g = random_connected_metric_graph(rng);
        SpectrumEntry gap = first_positive_eigenvalue(g);
        double bound = std::pow(M_PI / g.total_length(), 2);
        REQUIRE(gap.lambda >= bound - 1e-7 * (1.0 + gap.lambda));
    }
}
