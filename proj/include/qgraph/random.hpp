// Seeded randomness for the property suites. Distributions are hand-rolled
// on top of mt19937_64 so that a given seed produces the same stream on
// every platform.
#pragma once

#include <cstdint>
#include <random>

#include "qgraph/graph.hpp"

namespace qgraph {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53 bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform in [0, n), unbiased by rejection.
    std::size_t index(std::size_t n) {
        if (n == 0) throw Error("Rng::index: empty range");
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % n);
    }

    // Uniform integer in [lo, hi] inclusive.
    long long integer(long long lo, long long hi) {
        return lo + static_cast<long long>(index(static_cast<std::size_t>(hi - lo + 1)));
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 eng_;
};

// Connected metric graph: a random spanning tree plus extra edges (loops and
// parallel edges allowed), vertex ids 0..M-1.
inline MetricGraph random_connected_metric_graph(Rng& rng, int max_vertices = 6,
                                                 int max_edges = 9, double len_lo = 0.3,
                                                 double len_hi = 3.0) {
    int m = static_cast<int>(rng.integer(2, max_vertices));
    std::vector<VertexId> vertices;
    for (int v = 0; v < m; ++v) vertices.push_back(static_cast<VertexId>(v));
    std::vector<Edge> edges;
    for (int v = 1; v < m; ++v) {
        VertexId parent = static_cast<VertexId>(rng.index(static_cast<std::size_t>(v)));
        edges.emplace_back(parent, static_cast<VertexId>(v), rng.uniform(len_lo, len_hi));
    }
    int extra = static_cast<int>(rng.integer(0, max_edges - (m - 1)));
    for (int i = 0; i < extra; ++i) {
        VertexId a = static_cast<VertexId>(rng.index(static_cast<std::size_t>(m)));
        VertexId b = static_cast<VertexId>(rng.index(static_cast<std::size_t>(m)));
        edges.emplace_back(a, b, rng.uniform(len_lo, len_hi));
    }
    return MetricGraph(std::move(vertices), std::move(edges));
}

// Erdos-Renyi conditioned on connectivity.
inline DiscreteGraph random_connected_simple_graph(Rng& rng, int max_vertices = 8) {
    int m = static_cast<int>(rng.integer(2, max_vertices));
    double p = rng.uniform(0.3, 0.9);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<std::pair<int, int>> edges;
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b)
                if (rng.bernoulli(p)) edges.emplace_back(a, b);
        DiscreteGraph g(m, std::move(edges));
        if (g.is_connected()) return g;
    }
    throw Error("random_connected_simple_graph: did not produce a connected graph");
}

// Random connected multigraph on the given edge lengths: every edge keeps its
// length, endpoints are re-paired at random. Used by the flower probe.
inline MetricGraph random_pairing(Rng& rng, const std::vector<double>& lengths) {
    const std::size_t n = lengths.size();
    for (int attempt = 0; attempt < 500; ++attempt) {
        std::size_t m = rng.index(2 * n) + 1;
        std::vector<VertexId> vertices;
        for (std::size_t v = 0; v < m; ++v) vertices.push_back(v);
        std::vector<Edge> edges;
        std::vector<bool> used(m, false);
        for (double len : lengths) {
            VertexId a = rng.index(m), b = rng.index(m);
            used[a] = used[b] = true;
            edges.emplace_back(a, b, len);
        }
        bool all_used = true;
        for (bool u : used) all_used = all_used && u;
        if (!all_used) continue;
        MetricGraph g(std::move(vertices), std::move(edges));
        if (g.is_connected()) return g;
    }
    return flower(lengths);  // m = 1 always works; unreachable in practice
}

}  // namespace qgraph
