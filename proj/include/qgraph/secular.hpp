// Spectrum and eigenfunctions of the standard (Kirchhoff) Laplacian on a
// compact metric graph.
//
// On each edge of length l a solution at wavenumber k is written as
// psi(x) = a cos(kx) + b sin(kx), x in [0, l]. Vertex conditions (continuity
// plus vanishing sum of outward derivatives) become a real 2N x 2N linear
// system M(k) (a_1, b_1, ..., a_N, b_N)^T = 0 whose determinant vanishes
// exactly at eigenwavenumbers. Derivative rows are scaled by 1/k so the
// entries stay O(1); the zeros are unaffected for k > 0.
#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"

namespace qgraph {

struct SolverOptions {
    double k_min = 1e-6;             // scan start; the ground state is handled analytically
    double grid_divisor = 8.0;       // grid step = pi / (grid_divisor * total length)
    double refine_rel = 1e-9;        // root location accuracy |dk| <= refine_rel * (1 + k)
    double null_tol_rel = 1e-7;      // singular values below this * sigma_max count as null
    double merge_rel = 1e-6;         // roots closer than this * (1 + k) are one root
    double fold_threshold = 1e-5;    // roots below this fold into the ground state
    double min_detect_factor = 10.0; // sigma_min local minima below factor * median qualify
};

namespace detail {

struct EdgeEnd {
    EdgeId e;
    int side;  // 0 = coordinate-0 end, 1 = coordinate-length end
};

inline std::vector<std::vector<EdgeEnd>> incidence(const MetricGraph& g) {
    std::vector<std::vector<EdgeEnd>> ends(g.vertex_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        ends[g.vertex_index(g.edges()[e].a)].push_back({e, 0});
        ends[g.vertex_index(g.edges()[e].b)].push_back({e, 1});
    }
    return ends;
}

}  // namespace detail

// Rows: per vertex (in vertex-list order) deg-1 continuity rows followed by
// one Kirchhoff row. Columns: (a_e, b_e) pairs in edge order.
inline Mat secular_matrix(const MetricGraph& g, double k) {
    if (!(k > 0.0)) throw Error("secular_matrix: k must be positive (ground state is analytic)");
    if (g.edge_count() == 0) throw Error("secular_matrix: graph has no edges");
    const std::size_t n = g.edge_count();
    Mat m(static_cast<int>(2 * n), static_cast<int>(2 * n));
    auto ends = detail::incidence(g);

    // value(end) and outward derivative / k as coefficients on (a_e, b_e)
    auto value_coeffs = [&](detail::EdgeEnd end) -> std::array<double, 2> {
        if (end.side == 0) return {1.0, 0.0};
        double kl = k * g.edges()[end.e].length;
        return {std::cos(kl), std::sin(kl)};
    };
    auto deriv_coeffs = [&](detail::EdgeEnd end) -> std::array<double, 2> {
        if (end.side == 0) return {0.0, 1.0};
        double kl = k * g.edges()[end.e].length;
        return {std::sin(kl), -std::cos(kl)};
    };

    int row = 0;
    for (std::size_t vi = 0; vi < g.vertex_count(); ++vi) {
        const auto& inc = ends[vi];
        for (std::size_t j = 0; j + 1 < inc.size(); ++j) {
            auto c1 = value_coeffs(inc[j]);
            auto c2 = value_coeffs(inc[j + 1]);
            m(row, static_cast<int>(2 * inc[j].e)) += c1[0];
            m(row, static_cast<int>(2 * inc[j].e + 1)) += c1[1];
            m(row, static_cast<int>(2 * inc[j + 1].e)) -= c2[0];
            m(row, static_cast<int>(2 * inc[j + 1].e + 1)) -= c2[1];
            ++row;
        }
        if (!inc.empty()) {
            for (const auto& end : inc) {
                auto c = deriv_coeffs(end);
                m(row, static_cast<int>(2 * end.e)) += c[0];
                m(row, static_cast<int>(2 * end.e + 1)) += c[1];
            }
            ++row;
        }
    }
    if (row != static_cast<int>(2 * n))
        throw Error("secular_matrix: isolated vertex in graph");  // row deficit
    return m;
}

struct Indicator {
    double sigma_min;
    int det_sign;  // -1, 0, +1
};

inline Indicator secular_indicator(const MetricGraph& g, double k) {
    Mat m = secular_matrix(g, k);
    Svd s = svd(m);
    return {s.sigma.back(), det_sign(m)};
}

struct SpectrumEntry {
    double k;
    double lambda;
    int multiplicity;
};

struct Spectrum {
    std::vector<SpectrumEntry> entries;  // ascending in k, ground state first
    std::vector<std::string> warnings;

    // positive eigenvalues expanded with multiplicity
    Vec positive_lambdas() const {
        Vec out;
        for (const auto& e : entries)
            if (e.k > 0.0)
                for (int i = 0; i < e.multiplicity; ++i) out.push_back(e.lambda);
        return out;
    }
};

namespace detail {

struct RootCandidate {
    double k;
    double sigma;
    bool from_sign_change;
};

inline double sigma_min_at(const MetricGraph& g, double k) {
    Svd s = svd(secular_matrix(g, k));
    return s.sigma.back();
}

inline double refine_bisection(const MetricGraph& g, double a, double b, int sa, double tol) {
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        double mid = 0.5 * (a + b);
        int sm = det_sign(secular_matrix(g, mid));
        if (sm == 0) return mid;
        if (sm == sa) a = mid;
        else b = mid;
    }
    return 0.5 * (a + b);
}

inline double refine_golden(const MetricGraph& g, double a, double b, double tol) {
    const double phi = 0.6180339887498949;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = sigma_min_at(g, x1), f2 = sigma_min_at(g, x2);
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = sigma_min_at(g, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = sigma_min_at(g, x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

}  // namespace detail

// All eigenvalues with k in (0, k_max], each located to |dk| <=
// refine_rel * (1 + k); multiplicity is the null-space dimension of M(k) at
// the refined root. The ground state (0, 0, 1) is prepended.
inline Spectrum eigenvalues(const MetricGraph& g, double k_max,
                            const SolverOptions& opt = SolverOptions{}) {
    if (!(k_max > 0.0)) throw Error("eigenvalues: k_max must be positive");
    if (!g.is_connected()) throw Error("eigenvalues: graph must be connected");
    Spectrum out;
    out.entries.push_back({0.0, 0.0, 1});
    if (g.edge_count() == 0) return out;

    const double total = g.total_length();
    const double dk = M_PI / (opt.grid_divisor * total);
    const std::size_t steps = static_cast<std::size_t>(std::ceil((k_max - opt.k_min) / dk)) + 2;

    std::vector<double> ks(steps), sig(steps);
    std::vector<int> sgn(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        ks[i] = opt.k_min + static_cast<double>(i) * dk;
        Mat m = secular_matrix(g, ks[i]);
        sig[i] = svd(m).sigma.back();
        sgn[i] = det_sign(m);
    }

    Vec sorted_sig = sig;
    std::nth_element(sorted_sig.begin(), sorted_sig.begin() + sorted_sig.size() / 2,
                     sorted_sig.end());
    const double median = sorted_sig[sorted_sig.size() / 2];
    const double dip_level = opt.min_detect_factor * median;

    // Cells worth a closer look: determinant sign changes and local minima
    // of sigma_min below the dip level. Root clusters tighter than the grid
    // leave no net sign change and a single shared dip, so every active
    // region is rescanned on a 64x finer grid before refinement; flanks of
    // located roots are then re-checked for leftover sign changes.
    std::vector<bool> active(steps - 1, false);
    std::vector<detail::RootCandidate> candidates;
    for (std::size_t i = 0; i + 1 < steps; ++i) {
        if (sgn[i] == 0) {
            candidates.push_back({ks[i], sig[i], true});
            if (i > 0) active[i - 1] = true;
            active[i] = true;
        } else if (sgn[i + 1] != 0 && sgn[i] != sgn[i + 1]) {
            active[i] = true;
        }
    }
    for (std::size_t i = 1; i + 1 < steps; ++i) {
        if (sig[i] <= sig[i - 1] && sig[i] <= sig[i + 1] && sig[i] < dip_level) {
            active[i - 1] = true;
            active[i] = true;
        }
    }

    std::vector<std::pair<double, double>> flanks;
    auto add_root = [&](double lo, double hi, double root, bool from_sign) {
        candidates.push_back({root, detail::sigma_min_at(g, root), from_sign});
        double eps = opt.merge_rel * (1.0 + root);
        if (root - eps > lo) flanks.emplace_back(lo, root - eps);
        if (hi > root + eps) flanks.emplace_back(root + eps, hi);
    };

    for (std::size_t run = 0; run + 1 < steps; ++run) {
        if (!active[run]) continue;
        std::size_t end = run;
        while (end + 2 < steps && active[end + 1]) ++end;

        const std::size_t fine = 64 * (end - run + 1);
        const double a = ks[run], b = ks[end + 1];
        const double fdk = (b - a) / static_cast<double>(fine);
        std::vector<double> fk(fine + 1), fs(fine + 1);
        std::vector<int> fg(fine + 1);
        for (std::size_t i = 0; i <= fine; ++i) {
            fk[i] = a + static_cast<double>(i) * fdk;
            Mat m = secular_matrix(g, fk[i]);
            fs[i] = svd(m).sigma.back();
            fg[i] = det_sign(m);
        }
        for (std::size_t i = 0; i < fine; ++i) {
            if (fg[i] == 0) {
                candidates.push_back({fk[i], fs[i], true});
            } else if (fg[i + 1] != 0 && fg[i] != fg[i + 1]) {
                double tol = 0.5 * opt.refine_rel * (1.0 + fk[i]);
                double root = detail::refine_bisection(g, fk[i], fk[i + 1], fg[i], tol);
                add_root(fk[i], fk[i + 1], root, true);
            }
        }
        for (std::size_t i = 1; i < fine; ++i) {
            if (fs[i] <= fs[i - 1] && fs[i] <= fs[i + 1] && fs[i] < dip_level) {
                double tol = 0.5 * opt.refine_rel * (1.0 + fk[i]);
                double root = detail::refine_golden(g, fk[i - 1], fk[i + 1], tol);
                add_root(fk[i - 1], fk[i + 1], root, false);
            }
        }
        run = end;
    }

    for (std::size_t idx = 0; idx < flanks.size() && idx < 1024; ++idx) {
        auto [lo, hi] = flanks[idx];
        int slo = det_sign(secular_matrix(g, lo));
        int shi = det_sign(secular_matrix(g, hi));
        if (slo == 0 || shi == 0 || slo == shi) continue;
        double tol = 0.5 * opt.refine_rel * (1.0 + lo);
        double root = detail::refine_bisection(g, lo, hi, slo, tol);
        add_root(lo, hi, root, true);
    }

    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) { return a.k < b.k; });

    std::size_t i = 0;
    while (i < candidates.size()) {
        std::size_t j = i;
        detail::RootCandidate best = candidates[i];
        bool any_sign = candidates[i].from_sign_change;
        while (j + 1 < candidates.size() &&
               candidates[j + 1].k - candidates[j].k <= opt.merge_rel * (1.0 + candidates[j].k)) {
            ++j;
            any_sign = any_sign || candidates[j].from_sign_change;
            if (candidates[j].sigma < best.sigma) best = candidates[j];
        }
        i = j + 1;

        if (best.k > k_max * (1.0 + 1e-12)) continue;
        Svd s = svd(secular_matrix(g, best.k));
        // entries are O(1) by the 1/k scaling; floor the scale in case the
        // whole matrix vanishes (fully degenerate root)
        double tol_null = opt.null_tol_rel * std::max(s.sigma.front(), 1.0);
        int mult = 0;
        for (double sv : s.sigma)
            if (sv < tol_null) ++mult;
        if (mult == 0) {
            if (any_sign)
                throw Error("eigenvalues: scan failure, determinant sign change near k=" +
                            format_double(best.k) + " did not resolve to a root (sigma_min=" +
                            format_double(best.sigma) + ")");
            continue;  // shallow indicator minimum, not a root
        }
        if (best.k < opt.fold_threshold) {
            out.warnings.push_back("root at k=" + format_double(best.k) +
                                   " folded into the ground state");
            continue;
        }
        out.entries.push_back({best.k, best.k * best.k, mult});
    }
    return out;
}

// True iff the eigenvalue count (with multiplicity) up to k_max agrees with
// the Weyl estimate total_length * k_max / pi within N + M + 2. Used to
// detect missed secular roots.
inline bool weyl_count_check(const MetricGraph& g, const Spectrum& spectrum, double k_max) {
    long long count = 0;
    for (const auto& e : spectrum.entries)
        if (e.k > 0.0 && e.k <= k_max * (1.0 + 1e-12)) count += e.multiplicity;
    double expected = g.total_length() * k_max / M_PI;
    double slack = static_cast<double>(g.edge_count() + g.vertex_count() + 2);
    return std::fabs(static_cast<double>(count) - expected) <= slack;
}

// ---------------------------------------------------------------------------
// Eigenfunctions.

class Eigenfunction {
public:
    Eigenfunction(double k, std::vector<std::array<double, 2>> coeff, Vec lengths)
        : k_(k), coeff_(std::move(coeff)), lengths_(std::move(lengths)) {}

    double k() const { return k_; }
    std::size_t edge_count() const { return coeff_.size(); }
    const std::vector<std::array<double, 2>>& coefficients() const { return coeff_; }
    double edge_length(EdgeId e) const { return lengths_.at(e); }

    double value(EdgeId e, double x) const {
        const auto& c = coeff_.at(e);
        if (k_ == 0.0) return c[0];
        return c[0] * std::cos(k_ * x) + c[1] * std::sin(k_ * x);
    }

    // psi'(x); for the Kirchhoff residual and the Neumann diagnostics.
    double derivative(EdgeId e, double x) const {
        const auto& c = coeff_.at(e);
        if (k_ == 0.0) return 0.0;
        return k_ * (-c[0] * std::sin(k_ * x) + c[1] * std::cos(k_ * x));
    }

    double max_coefficient() const {
        double m = 0.0;
        for (const auto& c : coeff_) m = std::max({m, std::fabs(c[0]), std::fabs(c[1])});
        return m;
    }

private:
    double k_;
    std::vector<std::array<double, 2>> coeff_;
    Vec lengths_;
};

namespace detail {

// integral over [0, l] of (a1 cos kx + b1 sin kx)(a2 cos kx + b2 sin kx)
inline double edge_l2_inner(double k, double l, const std::array<double, 2>& c1,
                            const std::array<double, 2>& c2) {
    if (k == 0.0) return c1[0] * c2[0] * l;
    double s4 = std::sin(2.0 * k * l) / (4.0 * k);
    double sc = (1.0 - std::cos(2.0 * k * l)) / (4.0 * k);
    return c1[0] * c2[0] * (0.5 * l + s4) + c1[1] * c2[1] * (0.5 * l - s4) +
           (c1[0] * c2[1] + c1[1] * c2[0]) * sc;
}

}  // namespace detail

inline double l2_inner(const Eigenfunction& f, const Eigenfunction& h) {
    if (f.edge_count() != h.edge_count()) throw Error("l2_inner: edge count mismatch");
    double s = 0.0;
    for (EdgeId e = 0; e < f.edge_count(); ++e)
        s += detail::edge_l2_inner(f.k(), f.edge_length(e), f.coefficients()[e],
                                   h.coefficients()[e]);
    return s;
}

// integral of psi over the whole graph; zero for k > 0 eigenfunctions
inline double graph_integral(const Eigenfunction& f) {
    double s = 0.0;
    for (EdgeId e = 0; e < f.edge_count(); ++e) {
        const auto& c = f.coefficients()[e];
        double l = f.edge_length(e);
        if (f.k() == 0.0) {
            s += c[0] * l;
        } else {
            s += c[0] * std::sin(f.k() * l) / f.k() +
                 c[1] * (1.0 - std::cos(f.k() * l)) / f.k();
        }
    }
    return s;
}

// Orthonormal basis of the eigenspace at wavenumber k: null-space vectors of
// M(k), L2(Gamma)-orthonormalized in closed form, sign fixed so the largest
// coefficient is positive. k = 0 returns the constant 1/sqrt(L).
inline std::vector<Eigenfunction> eigenspace(const MetricGraph& g, double k,
                                             const SolverOptions& opt = SolverOptions{}) {
    Vec lengths;
    for (const Edge& e : g.edges()) lengths.push_back(e.length);

    if (k == 0.0) {
        if (!g.is_connected()) throw Error("eigenspace: ground state needs a connected graph");
        double c = 1.0 / std::sqrt(g.total_length());
        std::vector<std::array<double, 2>> coeff(g.edge_count(), {c, 0.0});
        return {Eigenfunction(0.0, std::move(coeff), std::move(lengths))};
    }

    Svd s = svd(secular_matrix(g, k));
    double tol_null = opt.null_tol_rel * std::max(s.sigma.front(), 1.0);
    std::vector<int> null_cols;
    for (int j = 0; j < static_cast<int>(s.sigma.size()); ++j)
        if (s.sigma[j] < tol_null) null_cols.push_back(j);
    if (null_cols.empty())
        throw Error("eigenspace: k=" + format_double(k) + " is not an eigenvalue (sigma_min=" +
                    format_double(s.sigma.back()) + ")");

    const int d = static_cast<int>(null_cols.size());
    std::vector<Eigenfunction> raw;
    for (int j = 0; j < d; ++j) {
        std::vector<std::array<double, 2>> coeff(g.edge_count());
        for (EdgeId e = 0; e < g.edge_count(); ++e)
            coeff[e] = {s.v(static_cast<int>(2 * e), null_cols[j]),
                        s.v(static_cast<int>(2 * e + 1), null_cols[j])};
        raw.emplace_back(k, std::move(coeff), lengths);
    }

    Mat gram(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) gram(i, j) = gram(j, i) = l2_inner(raw[i], raw[j]);
    Mat c = orthonormal_from_gram(gram);

    std::vector<Eigenfunction> out;
    for (int j = 0; j < c.cols(); ++j) {
        std::vector<std::array<double, 2>> coeff(g.edge_count(), {0.0, 0.0});
        for (int i = 0; i < d; ++i)
            for (EdgeId e = 0; e < g.edge_count(); ++e) {
                coeff[e][0] += c(i, j) * raw[i].coefficients()[e][0];
                coeff[e][1] += c(i, j) * raw[i].coefficients()[e][1];
            }
        // sign convention: largest-magnitude coefficient positive
        double best = 0.0;
        for (const auto& cc : coeff)
            for (double x : {cc[0], cc[1]})
                if (std::fabs(x) > std::fabs(best)) best = x;
        if (best < 0.0)
            for (auto& cc : coeff) {
                cc[0] = -cc[0];
                cc[1] = -cc[1];
            }
        out.emplace_back(k, std::move(coeff), lengths);
    }
    return out;
}

// Worst matching-condition residual of the function relative to its
// coefficient scale; small for genuine eigenfunctions.
inline double matching_residual(const MetricGraph& g, const Eigenfunction& f) {
    if (f.k() == 0.0) return 0.0;
    Mat m = secular_matrix(g, f.k());
    Vec c(2 * g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        c[2 * e] = f.coefficients()[e][0];
        c[2 * e + 1] = f.coefficients()[e][1];
    }
    Vec r = m * c;
    double worst = 0.0;
    for (double x : r) worst = std::max(worst, std::fabs(x));
    return worst / std::max(f.max_coefficient(), 1e-300);
}

// Common value psi(v); incident edge-end values must agree within the
// residual tolerance.
inline double vertex_value(const MetricGraph& g, const Eigenfunction& f, VertexId v) {
    g.vertex_index(v);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    int n = 0;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const Edge& edge = g.edges()[e];
        if (edge.a == v) {
            double val = f.value(e, 0.0);
            lo = std::min(lo, val); hi = std::max(hi, val); sum += val; ++n;
        }
        if (edge.b == v) {
            double val = f.value(e, edge.length);
            lo = std::min(lo, val); hi = std::max(hi, val); sum += val; ++n;
        }
    }
    if (n == 0) throw Error("vertex_value: vertex has no incident edges");
    if (hi - lo > 1e-6 * (1.0 + f.max_coefficient()))
        throw Error("vertex_value: incident edge-end values disagree; not an eigenfunction");
    return sum / n;
}

// Local expansion psi(x) = alpha sin k(x - x_star) + beta cos k(x - x_star)
// about an interior point of an edge: beta = psi(x_star), alpha = psi'(x_star)/k.
struct EdgeTrace {
    double alpha;
    double beta;
};

inline EdgeTrace edge_trace(const Eigenfunction& f, EdgeId e, double x_star) {
    if (e >= f.edge_count()) throw Error("edge_trace: no edge " + std::to_string(e));
    if (!(x_star >= 0.0) || !(x_star < f.edge_length(e)))
        throw Error("edge_trace: point outside the edge");
    if (f.k() == 0.0) return {0.0, f.coefficients()[e][0]};
    const auto& c = f.coefficients()[e];
    double kx = f.k() * x_star;
    return {-c[0] * std::sin(kx) + c[1] * std::cos(kx),
            c[0] * std::cos(kx) + c[1] * std::sin(kx)};
}

// ---------------------------------------------------------------------------
// Convenience scans.

// First positive eigenvalue (the spectral gap for connected graphs).
inline SpectrumEntry first_positive_eigenvalue(const MetricGraph& g,
                                               const SolverOptions& opt = SolverOptions{}) {
    double k_max = 2.0 * M_PI / g.total_length();
    for (int attempt = 0; attempt < 14; ++attempt) {
        Spectrum s = eigenvalues(g, k_max, opt);
        for (const auto& e : s.entries)
            if (e.k > 0.0) return e;
        k_max *= 2.0;
    }
    throw Error("first_positive_eigenvalue: no root found; scan failed");
}

// Spectrum containing at least n positive eigenvalues counted with
// multiplicity (more may be returned).
inline Spectrum first_n_positive(const MetricGraph& g, int n,
                                 const SolverOptions& opt = SolverOptions{}) {
    double k_max = (static_cast<double>(n) + 2.0) * M_PI / g.total_length();
    for (int attempt = 0; attempt < 20; ++attempt) {
        Spectrum s = eigenvalues(g, k_max, opt);
        int count = 0;
        for (const auto& e : s.entries)
            if (e.k > 0.0) count += e.multiplicity;
        if (count >= n) return s;
        k_max *= 1.6;
    }
    throw Error("first_n_positive: scan did not reach the requested count");
}

}  // namespace qgraph
