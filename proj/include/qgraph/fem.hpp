// Independent piecewise-linear finite element discretization of the metric
// graph; the brute-force oracle used to validate the secular solver.
//
// Continuity at vertices is realized by sharing nodes, which is exactly the
// quadratic-form domain of the standard Laplacian, so the generalized
// eigenvalues of K u = lambda B u are upper bounds for the true eigenvalues
// (min-max over a conforming subspace) and converge at order h^2.
//
// Node layout: vertex nodes first (in vertex-list order), then the interior
// nodes of each edge. With at least two elements per edge every vertex-vertex
// coupling goes through interior nodes, so K and B are per-edge tridiagonal
// blocks bordered by a small vertex block. The shift-invert solves in the
// eigensolver factor that structure directly: per-edge tridiagonal LDL^T plus
// a dense Cholesky of the vertex Schur complement, O(nodes) per solve.
#pragma once

#include <memory>
#include <optional>
#include <random>

#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"
#include "qgraph/secular.hpp"

namespace qgraph {

class MeshedGraph {
public:
    struct EdgeMesh {
        int elements;       // >= 2, so >= 1 interior node
        double he;          // element length
        std::size_t first;  // global index of the first interior node
        std::size_t va, vb; // global indices of the endpoint vertex nodes
    };

    MeshedGraph(const MetricGraph& g, std::vector<int> elements_per_edge) {
        vertex_nodes_ = g.vertex_count();
        std::size_t next = vertex_nodes_;
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            int elems = elements_per_edge[e];
            if (elems < 2) throw Error("mesh: need at least two elements per edge");
            EdgeMesh em;
            em.elements = elems;
            em.he = g.edges()[e].length / elems;
            em.first = next;
            em.va = g.vertex_index(g.edges()[e].a);
            em.vb = g.vertex_index(g.edges()[e].b);
            next += static_cast<std::size_t>(elems - 1);
            edges_.push_back(em);
        }
        total_nodes_ = next;
    }

    std::size_t node_count() const { return total_nodes_; }
    std::size_t vertex_node_count() const { return vertex_nodes_; }
    const std::vector<EdgeMesh>& edge_meshes() const { return edges_; }

    // y += K x  (element stiffness (1/h)[[1,-1],[-1,1]])
    void accumulate_stiffness(const Vec& x, Vec& y) const {
        accumulate(x, y, [](double he) { return std::pair{1.0 / he, -1.0 / he}; });
    }

    // y += B x  (element mass (h/6)[[2,1],[1,2]])
    void accumulate_mass(const Vec& x, Vec& y) const {
        accumulate(x, y, [](double he) { return std::pair{he / 3.0, he / 6.0}; });
    }

    Vec stiffness_times(const Vec& x) const {
        Vec y(total_nodes_, 0.0);
        accumulate_stiffness(x, y);
        return y;
    }

    Vec mass_times(const Vec& x) const {
        Vec y(total_nodes_, 0.0);
        accumulate_mass(x, y);
        return y;
    }

    Mat dense_stiffness() const { return dense([this](const Vec& x) { return stiffness_times(x); }); }
    Mat dense_mass() const { return dense([this](const Vec& x) { return mass_times(x); }); }

private:
    template <class ElemCoeffs>
    void accumulate(const Vec& x, Vec& y, ElemCoeffs coeffs) const {
        for (const EdgeMesh& em : edges_) {
            auto [d, o] = coeffs(em.he);
            std::size_t prev = em.va;
            for (int j = 0; j < em.elements; ++j) {
                std::size_t cur = (j == em.elements - 1) ? em.vb : em.first + j;
                y[prev] += d * x[prev] + o * x[cur];
                y[cur] += o * x[prev] + d * x[cur];
                prev = cur;
            }
        }
    }

    template <class MatVec>
    Mat dense(MatVec mv) const {
        const int n = static_cast<int>(total_nodes_);
        Mat out(n, n);
        Vec e(total_nodes_, 0.0);
        for (int j = 0; j < n; ++j) {
            e[j] = 1.0;
            Vec col = mv(e);
            for (int i = 0; i < n; ++i) out(i, j) = col[i];
            e[j] = 0.0;
        }
        return out;
    }

    std::size_t vertex_nodes_ = 0;
    std::size_t total_nodes_ = 0;
    std::vector<EdgeMesh> edges_;
};

inline std::vector<int> element_counts(const MetricGraph& g, double h) {
    if (!(h > 0.0)) throw Error("assemble: mesh size must be positive");
    std::vector<int> counts;
    for (const Edge& e : g.edges())
        counts.push_back(std::max(2, static_cast<int>(std::ceil(e.length / h))));
    return counts;
}

inline MeshedGraph assemble(const MetricGraph& g, double h) {
    return MeshedGraph(g, element_counts(g, h));
}

namespace detail {

// Factorization of A = K + B exploiting the tridiagonal-plus-vertex-border
// structure.
class ShiftedFactor {
public:
    explicit ShiftedFactor(const MeshedGraph& mesh) : mesh_(&mesh) {
        const auto& edges = mesh.edge_meshes();
        const std::size_t nv = mesh.vertex_node_count();
        Mat schur(static_cast<int>(nv), static_cast<int>(nv));

        for (const auto& em : edges) {
            const int m = em.elements - 1;
            const double ad = 2.0 / em.he + 2.0 * em.he / 3.0;   // interior diagonal of K+B
            const double ao = -1.0 / em.he + em.he / 6.0;        // off-diagonal and border
            schur(static_cast<int>(em.va), static_cast<int>(em.va)) += 1.0 / em.he + em.he / 3.0;
            schur(static_cast<int>(em.vb), static_cast<int>(em.vb)) += 1.0 / em.he + em.he / 3.0;

            Vec diag(m, ad), off(m > 1 ? m - 1 : 0, ao);
            Tridiag t(diag, off);

            Vec e1(m, 0.0), em_(m, 0.0);
            e1[0] = ao;       // border column of va
            em_[m - 1] = ao;  // border column of vb
            Vec z1 = t.solve(e1);
            Vec zm = t.solve(em_);

            schur(static_cast<int>(em.va), static_cast<int>(em.va)) -= ao * z1[0];
            schur(static_cast<int>(em.vb), static_cast<int>(em.vb)) -= ao * zm[m - 1];
            schur(static_cast<int>(em.va), static_cast<int>(em.vb)) -= ao * zm[0];
            schur(static_cast<int>(em.vb), static_cast<int>(em.va)) -= ao * z1[m - 1];

            factors_.push_back(std::move(t));
            z1_.push_back(std::move(z1));
            zm_.push_back(std::move(zm));
        }
        schur_ = std::make_unique<Cholesky>(std::move(schur));
    }

    Vec solve(const Vec& rhs) const {
        const auto& edges = mesh_->edge_meshes();
        const std::size_t nv = mesh_->vertex_node_count();
        Vec x(rhs.size(), 0.0);

        std::vector<Vec> yi(edges.size());
        Vec rhs_s(nv);
        for (std::size_t v = 0; v < nv; ++v) rhs_s[v] = rhs[v];
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto& em = edges[e];
            const int m = em.elements - 1;
            const double ao = -1.0 / em.he + em.he / 6.0;
            Vec r(m);
            for (int j = 0; j < m; ++j) r[j] = rhs[em.first + j];
            yi[e] = factors_[e].solve(std::move(r));
            rhs_s[em.va] -= ao * yi[e][0];
            rhs_s[em.vb] -= ao * yi[e][m - 1];
        }

        Vec xv = schur_->solve(std::move(rhs_s));
        for (std::size_t v = 0; v < nv; ++v) x[v] = xv[v];
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto& em = edges[e];
            const int m = em.elements - 1;
            for (int j = 0; j < m; ++j)
                x[em.first + j] = yi[e][j] - z1_[e][j] * xv[em.va] - zm_[e][j] * xv[em.vb];
        }
        return x;
    }

private:
    const MeshedGraph* mesh_;
    std::vector<Tridiag> factors_;
    std::vector<Vec> z1_, zm_;
    std::unique_ptr<Cholesky> schur_;
};

}  // namespace detail

// Smallest `count` generalized eigenvalues of K u = lambda B u by
// shift-invert subspace iteration with Rayleigh-Ritz extraction. Ritz values
// over the conforming FEM space stay upper bounds of the continuous
// eigenvalues throughout.
inline Vec smallest_generalized_eigenvalues(const MeshedGraph& mesh, int count) {
    const std::size_t n = mesh.node_count();
    if (count < 1) throw Error("oracle: count must be positive");
    if (static_cast<std::size_t>(count) > n - 1)
        throw Error("oracle: count exceeds node count - 1");
    const int q = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(count) + 8));

    detail::ShiftedFactor factor(mesh);

    // deterministic start: the constant vector plus fixed pseudo-random fill
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    auto uniform = [&rng]() { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
    std::vector<Vec> x(q, Vec(n));
    for (std::size_t i = 0; i < n; ++i) x[0][i] = 1.0;
    for (int j = 1; j < q; ++j)
        for (std::size_t i = 0; i < n; ++i) x[j][i] = uniform();

    Vec prev(count, std::numeric_limits<double>::infinity());
    int stable = 0;
    for (int iter = 0; iter < 500; ++iter) {
        // Y = (K+B)^{-1} B X
        std::vector<Vec> y(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) y[j] = factor.solve(mesh.mass_times(x[j]));

        const int qe = static_cast<int>(y.size());
        std::vector<Vec> ky(qe), by(qe);
        for (int j = 0; j < qe; ++j) {
            ky[j] = mesh.stiffness_times(y[j]);
            by[j] = mesh.mass_times(y[j]);
        }
        Mat kr(qe, qe), br(qe, qe);
        for (int i = 0; i < qe; ++i)
            for (int j = i; j < qe; ++j) {
                kr(i, j) = kr(j, i) = dot(y[i], ky[j]);
                br(i, j) = br(j, i) = dot(y[i], by[j]);
            }

        Mat c = orthonormal_from_gram(br, 1e-13);
        const int r = c.cols();
        if (r < count) throw Error("oracle: subspace collapsed");
        Mat kp(r, r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                double s = 0.0;
                for (int a = 0; a < qe; ++a)
                    for (int b = 0; b < qe; ++b) s += c(a, i) * kr(a, b) * c(b, j);
                kp(i, j) = s;
            }
        for (int i = 0; i < r; ++i)
            for (int j = i + 1; j < r; ++j) kp(i, j) = kp(j, i) = 0.5 * (kp(i, j) + kp(j, i));
        EigenSym ritz = eigen_sym(kp);

        // X = Y * C * P
        std::vector<Vec> xn(r, Vec(n, 0.0));
        for (int j = 0; j < r; ++j) {
            Vec& col = xn[j];
            for (int a = 0; a < qe; ++a) {
                double coef = 0.0;
                for (int i = 0; i < r; ++i) coef += c(a, i) * ritz.vectors(i, j);
                if (coef == 0.0) continue;
                for (std::size_t row = 0; row < n; ++row) col[row] += coef * y[a][row];
            }
        }
        x = std::move(xn);

        bool converged = true;
        for (int j = 0; j < count; ++j) {
            if (std::fabs(ritz.values[j] - prev[j]) > 1e-11 * (1.0 + std::fabs(ritz.values[j])))
                converged = false;
            prev[j] = ritz.values[j];
        }
        if (converged && ++stable >= 2) {
            Vec out(prev.begin(), prev.begin() + count);
            return out;
        }
        if (!converged) stable = 0;
    }
    throw Error("oracle: eigensolve did not converge");
}

inline Vec oracle_eigenvalues(const MetricGraph& g, double h, int count) {
    return smallest_generalized_eigenvalues(assemble(g, h), count);
}

// log2(err(h) / err(h/2)) for the index-th positive eigenvalue against the
// secular reference; nullopt when the errors sit at round-off and the order
// is meaningless.
inline std::optional<double> convergence_order(const MetricGraph& g, double h, int index = 1) {
    if (index < 1) return std::nullopt;  // ground state is exact, order meaningless
    Spectrum s = first_n_positive(g, index);
    Vec ref = s.positive_lambdas();
    double exact = ref[static_cast<std::size_t>(index) - 1];

    Vec coarse = oracle_eigenvalues(g, h, index + 1);
    Vec fine = oracle_eigenvalues(g, 0.5 * h, index + 1);
    double e1 = std::fabs(coarse[index] - exact);
    double e2 = std::fabs(fine[index] - exact);
    if (e1 <= 1e-12 * (1.0 + exact) || e2 <= 1e-12 * (1.0 + exact)) return std::nullopt;
    return std::log2(e1 / e2);
}

}  // namespace qgraph
