// Discrete graph Laplacians L = V - C, the normalized and averaging
// variants, their spectra, and numerical checks of the two algebraic
// connectivity monotonicity statements (edge added between existing
// vertices, pendant vertex attached).
#pragma once

#include <string>

#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"
#include "qgraph/report.hpp"

namespace qgraph {

enum class LaplacianKind { standard, normalized, averaging };

// standard:   L = V - C
// normalized: I - V^{-1/2} C V^{-1/2}   (eigenvalues in [0, 2])
// averaging:  V^{-1} L = V^{-1/2} (normalized) V^{1/2}
inline Mat laplacian(const DiscreteGraph& g, LaplacianKind kind = LaplacianKind::standard) {
    const int m = g.vertex_count();
    std::vector<int> deg = g.degrees();
    if (kind != LaplacianKind::standard) {
        for (int v = 0; v < m; ++v)
            if (deg[v] == 0)
                throw Error("laplacian: isolated vertex " + std::to_string(v) +
                            " makes the valence matrix singular");
    }
    Mat l(m, m);
    for (int v = 0; v < m; ++v) l(v, v) = static_cast<double>(deg[v]);
    for (auto [a, b] : g.edges()) {
        l(a, b) = -1.0;
        l(b, a) = -1.0;
    }
    switch (kind) {
        case LaplacianKind::standard:
            return l;
        case LaplacianKind::normalized: {
            Mat out(m, m);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    out(i, j) = l(i, j) / std::sqrt(static_cast<double>(deg[i]) * deg[j]);
            return out;
        }
        case LaplacianKind::averaging: {
            Mat out(m, m);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) out(i, j) = l(i, j) / deg[i];
            return out;
        }
    }
    throw Error("laplacian: unknown kind");
}

struct DiscreteSpectrum {
    Vec values;   // ascending
    Mat vectors;  // orthonormal columns
};

inline DiscreteSpectrum spectrum(const DiscreteGraph& g) {
    EigenSym es = eigen_sym(laplacian(g));
    return {std::move(es.values), std::move(es.vectors)};
}

inline std::string digest(const DiscreteGraph& g) {
    std::ostringstream s;
    s << "discrete " << g.vertex_count();
    for (auto [a, b] : g.edges()) s << ' ' << a << '-' << b;
    std::uint64_t h = 1469598103934665603ull;
    for (char c : s.str()) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

namespace detail {

// Columns of `vectors` whose eigenvalue lies within 1e-8 * (1 + |lambda1|)
// of lambda1 = values[1]; the graph is assumed connected.
inline std::vector<int> lambda1_eigenspace(const DiscreteSpectrum& s) {
    std::vector<int> idx;
    double l1 = s.values[1];
    double tol = 1e-8 * (1.0 + std::fabs(l1));
    for (int j = 1; j < static_cast<int>(s.values.size()); ++j)
        if (std::fabs(s.values[j] - l1) <= tol) idx.push_back(j);
    return idx;
}

}  // namespace detail

// Adding one edge between non-adjacent vertices never lowers the algebraic
// connectivity; equality holds iff some lambda1-eigenvector takes equal
// values at the two vertices.
inline VerificationReport check_prop1(const DiscreteGraph& g, int m1, int m2) {
    if (!g.is_connected()) throw Error("check_prop1: graph must be connected");
    if (m1 == m2) throw Error("check_prop1: vertices must be distinct");
    if (g.adjacent(m1, m2)) throw Error("check_prop1: vertices already adjacent");

    DiscreteSpectrum before = spectrum(g);
    DiscreteGraph g2 = g.with_edge(m1, m2);
    DiscreteSpectrum after = spectrum(g2);
    double l1 = before.values[1], l1p = after.values[1];

    std::vector<int> space = detail::lambda1_eigenspace(before);
    bool diag;
    if (space.size() >= 2) {
        diag = true;  // a 1-form on a >=2 dimensional space always has a kernel
    } else {
        double f = before.vectors(m1, space[0]) - before.vectors(m2, space[0]);
        diag = std::fabs(f) <= 1e-7;
    }

    VerificationReport r;
    r.theorem = "prop1";
    r.graph_digest = digest(g);
    r.params = "m1=" + std::to_string(m1) + ";m2=" + std::to_string(m2);
    r.lambda_before = l1;
    r.lambda_after = l1p;
    r.mult_before = static_cast<int>(space.size());
    r.mult_after = static_cast<int>(detail::lambda1_eigenspace(after).size());
    r.hypothesis = Hypothesis::satisfied;
    r.tolerance = 1e-8 * (1.0 + l1);
    r.verdict = (l1 <= l1p + r.tolerance) ? Verdict::holds : Verdict::violated;
    bool equal = std::fabs(l1 - l1p) <= r.tolerance;
    r.detail = std::string("equality=") + (equal ? "yes" : "no") +
               ";equal_values_diagnostic=" + (diag ? "yes" : "no") +
               ";eigenspace_dim=" + std::to_string(space.size());
    return r;
}

// Attaching a pendant vertex never raises the algebraic connectivity;
// equality requires every lambda1-eigenvector to vanish at the attachment
// vertex.
inline VerificationReport check_prop2(const DiscreteGraph& g, int m1) {
    if (!g.is_connected()) throw Error("check_prop2: graph must be connected");
    if (m1 < 0 || m1 >= g.vertex_count()) throw Error("check_prop2: vertex out of range");

    DiscreteSpectrum before = spectrum(g);
    DiscreteGraph g2 = g.with_pendant(m1);
    DiscreteSpectrum after = spectrum(g2);
    double l1 = before.values[1], l1p = after.values[1];

    std::vector<int> space = detail::lambda1_eigenspace(before);
    bool all_vanish = true;
    for (int j : space) all_vanish = all_vanish && std::fabs(before.vectors(m1, j)) <= 1e-7;

    VerificationReport r;
    r.theorem = "prop2";
    r.graph_digest = digest(g);
    r.params = "m1=" + std::to_string(m1);
    r.lambda_before = l1;
    r.lambda_after = l1p;
    r.mult_before = static_cast<int>(space.size());
    r.mult_after = static_cast<int>(detail::lambda1_eigenspace(after).size());
    r.hypothesis = Hypothesis::satisfied;
    r.tolerance = 1e-8 * (1.0 + l1);
    r.verdict = (l1 >= l1p - r.tolerance) ? Verdict::holds : Verdict::violated;
    bool equal = std::fabs(l1 - l1p) <= r.tolerance;
    r.detail = std::string("equality=") + (equal ? "yes" : "no") +
               ";vanishes_diagnostic=" + (all_vanish ? "yes" : "no") +
               ";eigenspace_dim=" + std::to_string(space.size());
    return r;
}

}  // namespace qgraph
