// Mechanical verification of the spectral-gap surgery statements: evaluate
// each theorem's hypothesis on a concrete graph, compute lambda_1 before and
// after the surgery, and report whether the claimed inequality holds.
//
// Conditions quantified over the lambda_1 eigenspace are evaluated as linear
// algebra on an orthonormal basis: "some eigenfunction satisfies f(psi) = 0"
// is a kernel question for the 1-form f (always solvable in dimension >= 2),
// "every eigenfunction satisfies ..." is checked on all basis members, and
// suprema of ratios of two 1-forms are classified as constant (forms
// parallel) or unbounded (forms independent).
#pragma once

#include "qgraph/fem.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/random.hpp"
#include "qgraph/report.hpp"
#include "qgraph/secular.hpp"

namespace qgraph {

struct GapInfo {
    double lambda1;
    double k1;
    int multiplicity;
};

inline GapInfo spectral_gap(const MetricGraph& g, const SolverOptions& opt = SolverOptions{}) {
    if (!g.is_connected()) throw Error("spectral_gap: graph must be connected");
    SpectrumEntry e = first_positive_eigenvalue(g, opt);
    return {e.lambda, e.k, e.multiplicity};
}

namespace detail {

// sup over the eigenspace of (u . x)^2 / (w . x)^2 for two 1-forms given by
// their values u, w on an orthonormal basis
struct RatioSup {
    enum class Kind { undefined, finite, infinite } kind;
    double value = 0.0;           // finite: the constant ratio
    bool w_identically_zero = false;
};

inline RatioSup ratio_sup(const Vec& u, const Vec& w, double zero_tol) {
    double nu = norm2(u), nw = norm2(w);
    if (std::max(nu, nw) <= zero_tol) return {RatioSup::Kind::undefined, 0.0, false};
    if (nw <= 1e-8 * nu) return {RatioSup::Kind::infinite, 0.0, true};
    double t = dot(u, w) / dot(w, w);
    double resid = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double r = u[i] - t * w[i];
        resid += r * r;
    }
    if (std::sqrt(resid) <= 1e-8 * (nu + nw)) return {RatioSup::Kind::finite, t * t, false};
    return {RatioSup::Kind::infinite, 0.0, false};
}

// can psi in the span attain f(psi) = 0 with psi != 0?
inline bool kernel_nonempty(const Vec& f, double zero_tol) {
    if (f.size() >= 2) return true;
    return std::fabs(f[0]) <= zero_tol;
}

inline double coefficient_scale(const std::vector<Eigenfunction>& space) {
    double s = 0.0;
    for (const auto& f : space) s = std::max(s, f.max_coefficient());
    return s;
}

inline std::string yesno(bool b) { return b ? "yes" : "no"; }

}  // namespace detail

// Joining two vertices: lambda_1 never decreases; equality iff some
// lambda_1-eigenfunction takes equal values at the pair.
inline VerificationReport verify_join(const MetricGraph& g, VertexId v1, VertexId v2,
                                      const SolverOptions& opt = SolverOptions{}) {
    GlueResult glued = glue_vertices(g, v1, v2);
    GapInfo before = spectral_gap(g, opt);
    GapInfo after = spectral_gap(glued.graph, opt);

    auto space = eigenspace(g, before.k1, opt);
    Vec f;
    for (const auto& psi : space) f.push_back(vertex_value(g, psi, v1) - vertex_value(g, psi, v2));
    bool diag = detail::kernel_nonempty(f, 1e-6 * (1.0 + detail::coefficient_scale(space)));

    VerificationReport r;
    r.theorem = "join";
    r.graph_digest = g.digest();
    r.params = "v1=" + std::to_string(v1) + ";v2=" + std::to_string(v2);
    r.lambda_before = before.lambda1;
    r.lambda_after = after.lambda1;
    r.mult_before = before.multiplicity;
    r.mult_after = after.multiplicity;
    r.hypothesis = Hypothesis::satisfied;
    r.tolerance = 1e-7 * (1.0 + before.lambda1);
    r.verdict = before.lambda1 <= after.lambda1 + r.tolerance ? Verdict::holds : Verdict::violated;
    bool equal = std::fabs(before.lambda1 - after.lambda1) <= 1e-6 * (1.0 + before.lambda1);
    r.detail = "equality=" + detail::yesno(equal) +
               ";equal_values_diagnostic=" + detail::yesno(diag) +
               ";eigenspace_dim=" + std::to_string(space.size());
    return r;
}

// Attaching a pendant edge: lambda_1 never increases; equality requires
// every lambda_1-eigenfunction to vanish at the attachment vertex.
inline VerificationReport verify_pendant(const MetricGraph& g, VertexId v1, double len,
                                         const SolverOptions& opt = SolverOptions{}) {
    PendantResult pend = add_pendant(g, v1, len);
    GapInfo before = spectral_gap(g, opt);
    GapInfo after = spectral_gap(pend.graph, opt);

    auto space = eigenspace(g, before.k1, opt);
    double zero_tol = 1e-6 * (1.0 + detail::coefficient_scale(space));
    bool all_vanish = true;
    for (const auto& psi : space)
        all_vanish = all_vanish && std::fabs(vertex_value(g, psi, v1)) <= zero_tol;

    VerificationReport r;
    r.theorem = "pendant";
    r.graph_digest = g.digest();
    r.params = "v1=" + std::to_string(v1) + ";len=" + format_double(len);
    r.lambda_before = before.lambda1;
    r.lambda_after = after.lambda1;
    r.mult_before = before.multiplicity;
    r.mult_after = after.multiplicity;
    r.hypothesis = Hypothesis::satisfied;
    r.tolerance = 1e-7 * (1.0 + before.lambda1);
    r.verdict = before.lambda1 >= after.lambda1 - r.tolerance ? Verdict::holds : Verdict::violated;
    bool equal = std::fabs(before.lambda1 - after.lambda1) <= 1e-6 * (1.0 + before.lambda1);
    r.detail = "equality=" + detail::yesno(equal) +
               ";vanishes_diagnostic=" + detail::yesno(all_vanish) +
               ";eigenspace_dim=" + std::to_string(space.size());
    return r;
}

enum class AddEdgeGate { either, long_edge_only };

// Adding an edge between existing vertices. Two independent sufficient
// conditions for lambda_1 to drop: (a) some lambda_1-eigenfunction takes
// equal values at the endpoints, (b) the new edge is longer than the whole
// graph. Without either, no direction is claimed.
inline VerificationReport verify_add_edge(const MetricGraph& g, VertexId v1, VertexId v2,
                                          double len, AddEdgeGate gate = AddEdgeGate::either,
                                          const SolverOptions& opt = SolverOptions{}) {
    MetricGraph bigger = add_edge(g, v1, v2, len);
    GapInfo before = spectral_gap(g, opt);
    GapInfo after = spectral_gap(bigger, opt);

    auto space = eigenspace(g, before.k1, opt);
    Vec f;
    for (const auto& psi : space) f.push_back(vertex_value(g, psi, v1) - vertex_value(g, psi, v2));
    bool hyp_equal_values = detail::kernel_nonempty(f, 1e-6 * (1.0 + detail::coefficient_scale(space)));
    bool hyp_long_edge = len > g.total_length();
    bool hyp = gate == AddEdgeGate::either ? (hyp_equal_values || hyp_long_edge) : hyp_long_edge;

    VerificationReport r;
    r.theorem = gate == AddEdgeGate::either ? "add" : "long-edge";
    r.graph_digest = g.digest();
    r.params = "v1=" + std::to_string(v1) + ";v2=" + std::to_string(v2) +
               ";len=" + format_double(len);
    r.lambda_before = before.lambda1;
    r.lambda_after = after.lambda1;
    r.mult_before = before.multiplicity;
    r.mult_after = after.multiplicity;
    r.lhs = len;
    r.rhs = g.total_length();
    r.hypothesis = hyp ? Hypothesis::satisfied : Hypothesis::not_satisfied;
    r.tolerance = 1e-7 * (1.0 + before.lambda1);
    if (hyp) {
        r.verdict =
            before.lambda1 >= after.lambda1 - r.tolerance ? Verdict::holds : Verdict::violated;
    } else {
        r.verdict = Verdict::no_claim;
    }
    r.detail = "equal_values_hypothesis=" + detail::yesno(hyp_equal_values) +
               ";long_edge_hypothesis=" + detail::yesno(hyp_long_edge) +
               ";eigenspace_dim=" + std::to_string(space.size()) + ";observed=" +
               (after.lambda1 < before.lambda1 - r.tolerance
                    ? "decrease"
                    : (after.lambda1 > before.lambda1 + r.tolerance ? "increase" : "equal"));
    return r;
}

// Cutting an edge at an internal point: lambda_1 never increases. If the
// gap is unchanged every original eigenfunction is Neumann at the cut; if
// some cut-graph eigenfunction matches values at the two new leaves the gap
// must be unchanged.
inline VerificationReport verify_cut(const MetricGraph& g, EdgeId e, double t,
                                     const SolverOptions& opt = SolverOptions{}) {
    VerificationReport r;
    r.theorem = "cut";
    r.graph_digest = g.digest();
    r.params = "edge=" + std::to_string(e) + ";t=" + format_double(t);

    CutResult cut = cut_edge(g, e, t);
    GapInfo before = spectral_gap(g, opt);
    r.lambda_before = before.lambda1;
    r.mult_before = before.multiplicity;
    r.tolerance = 1e-7 * (1.0 + before.lambda1);

    if (!cut.graph.is_connected()) {
        r.hypothesis = Hypothesis::not_applicable;
        r.verdict = Verdict::no_claim;
        r.detail = "cut_disconnects=yes";
        return r;
    }
    GapInfo after = spectral_gap(cut.graph, opt);
    r.lambda_after = after.lambda1;
    r.mult_after = after.multiplicity;
    r.hypothesis = Hypothesis::satisfied;
    r.verdict = after.lambda1 <= before.lambda1 + r.tolerance ? Verdict::holds : Verdict::violated;

    bool equal = std::fabs(before.lambda1 - after.lambda1) <= 1e-6 * (1.0 + before.lambda1);
    auto space = eigenspace(g, before.k1, opt);
    double scale = 1.0 + detail::coefficient_scale(space);
    bool neumann = true;
    for (const auto& psi : space)
        neumann = neumann && std::fabs(edge_trace(psi, e, t).alpha) <= 1e-5 * scale;

    auto star_space = eigenspace(cut.graph, after.k1, opt);
    Vec f;
    for (const auto& psi : star_space)
        f.push_back(vertex_value(cut.graph, psi, cut.leaf_a) -
                    vertex_value(cut.graph, psi, cut.leaf_b));
    bool star_matching =
        detail::kernel_nonempty(f, 1e-6 * (1.0 + detail::coefficient_scale(star_space)));

    r.detail = "equality=" + detail::yesno(equal) + ";neumann_at_cut=" + detail::yesno(neumann) +
               ";star_matching=" + detail::yesno(star_matching) +
               ";eigenspace_dim=" + std::to_string(space.size());
    return r;
}

// Geometric criterion for deleting an edge of length l: with theta = k1*l/2
// and the local trace psi|_E = alpha sin k1(x - mid) + beta cos k1(x - mid),
// the gap cannot grow if
//     sup_psi (alpha^2/beta^2 - 1) * (k1/2) cot(theta)  >=  1/(L - l).
// The supremum over the eigenspace is a constant when the alpha- and
// beta-forms are parallel and unbounded otherwise (attaining ratio 0 from
// below, which caps the expression at +(k1/2)|cot| for negative cotangent).
struct DeleteCriterion {
    bool applicable = false;
    bool satisfied = false;
    double lhs = std::numeric_limits<double>::quiet_NaN();
    double rhs = std::numeric_limits<double>::quiet_NaN();
    double k1 = 0.0;
    int eigenspace_dim = 0;
    std::string detail;
};

inline DeleteCriterion delete_criterion(const MetricGraph& g, EdgeId e,
                                        const SolverOptions& opt = SolverOptions{}) {
    DeleteCriterion out;
    if (e >= g.edge_count()) throw Error("delete_criterion: no edge " + std::to_string(e));
    try {
        delete_edge(g, e);
    } catch (const Error&) {
        out.detail = "deletion_disconnects";
        return out;
    }

    GapInfo gap = spectral_gap(g, opt);
    out.k1 = gap.k1;
    const double len = g.edges()[e].length;
    const double total = g.total_length();
    out.rhs = 1.0 / (total - len);

    double theta = 0.5 * gap.k1 * len;
    double s = std::sin(theta), c = std::cos(theta);
    if (std::fabs(s) <= 1e-8) {
        out.detail = "cot_pole";  // sin(k1 l / 2) = 0, trace form breaks down
        return out;
    }
    double cot = c / s;

    auto space = eigenspace(g, gap.k1, opt);
    out.eigenspace_dim = static_cast<int>(space.size());
    Vec alpha, beta;
    for (const auto& psi : space) {
        EdgeTrace tr = edge_trace(psi, e, 0.5 * len);
        alpha.push_back(tr.alpha);
        beta.push_back(tr.beta);
    }
    double zero_tol = 1e-7 * (1.0 + detail::coefficient_scale(space));
    detail::RatioSup sup = detail::ratio_sup(alpha, beta, zero_tol);

    if (sup.kind == detail::RatioSup::Kind::undefined) {
        out.detail = "eigenspace_vanishes_on_edge";
        return out;
    }
    if (sup.w_identically_zero) {
        out.detail = "beta_identically_zero";  // psi(V1) + psi(V2) = 0 on the whole eigenspace
        return out;
    }

    out.applicable = true;
    if (std::fabs(cot) <= 1e-8) {
        out.lhs = 0.0;  // the criterion expression collapses for every eigenfunction
        out.detail = "cot_zero";
    } else if (sup.kind == detail::RatioSup::Kind::infinite) {
        if (cot > 0.0) {
            out.lhs = std::numeric_limits<double>::infinity();
            out.detail = "ratio_unbounded";
        } else {
            out.lhs = -0.5 * gap.k1 * cot;  // supremum sits at ratio 0
            out.detail = "ratio_unbounded_negative_cot";
        }
    } else {
        out.lhs = (sup.value - 1.0) * 0.5 * gap.k1 * cot;
        out.detail = "ratio_constant=" + format_double(sup.value);
    }
    out.satisfied = out.lhs >= out.rhs;
    return out;
}

inline VerificationReport verify_delete(const MetricGraph& g, EdgeId e,
                                        const SolverOptions& opt = SolverOptions{}) {
    VerificationReport r;
    r.theorem = "delete";
    r.graph_digest = g.digest();
    r.params = "edge=" + std::to_string(e);

    DeleteCriterion crit = delete_criterion(g, e, opt);
    r.lhs = crit.lhs;
    r.rhs = crit.rhs;
    if (!crit.applicable) {
        r.hypothesis = Hypothesis::not_applicable;
        r.verdict = Verdict::no_claim;
        r.detail = crit.detail;
        return r;
    }

    GapInfo before = spectral_gap(g, opt);
    GapInfo after = spectral_gap(delete_edge(g, e), opt);
    r.lambda_before = before.lambda1;
    r.lambda_after = after.lambda1;
    r.mult_before = before.multiplicity;
    r.mult_after = after.multiplicity;
    r.tolerance = 1e-7 * (1.0 + before.lambda1);
    r.hypothesis = crit.satisfied ? Hypothesis::satisfied : Hypothesis::not_satisfied;
    if (crit.satisfied) {
        r.verdict =
            after.lambda1 <= before.lambda1 + r.tolerance ? Verdict::holds : Verdict::violated;
    } else {
        r.verdict = Verdict::no_claim;
    }
    r.detail = crit.detail + ";eigenspace_dim=" + std::to_string(crit.eigenspace_dim) +
               ";observed=" +
               (after.lambda1 < before.lambda1 - r.tolerance
                    ? "decrease"
                    : (after.lambda1 > before.lambda1 + r.tolerance ? "increase" : "equal"));
    return r;
}

// Removing an interval of length l centred at x_star on edge e. The gap
// cannot grow if, for some lambda_1-eigenfunction,
//   l < pi/(2 k1),  |alpha| > |beta|,  l <= (pi/4)(L - l)(alpha^2/beta^2 - 1)
// with (alpha, beta) the local trace at x_star.
inline VerificationReport interval_criterion(const MetricGraph& g, EdgeId e, double x_star,
                                             double len,
                                             const SolverOptions& opt = SolverOptions{}) {
    VerificationReport r;
    r.theorem = "interval";
    r.graph_digest = g.digest();
    r.params = "edge=" + std::to_string(e) + ";x=" + format_double(x_star) +
               ";len=" + format_double(len);

    std::optional<RemoveIntervalResult> removed;
    try {
        removed.emplace(remove_interval(g, e, x_star, len));
    } catch (const Error& err) {
        std::string msg = err.what();
        if (msg.find("disconnects") == std::string::npos) throw;  // geometry errors propagate
        r.hypothesis = Hypothesis::not_applicable;
        r.verdict = Verdict::no_claim;
        r.detail = "removal_disconnects";
        return r;
    }

    GapInfo before = spectral_gap(g, opt);
    GapInfo after = spectral_gap(removed->graph, opt);
    r.lambda_before = before.lambda1;
    r.lambda_after = after.lambda1;
    r.mult_before = before.multiplicity;
    r.mult_after = after.multiplicity;
    r.tolerance = 1e-7 * (1.0 + before.lambda1);

    const double total = g.total_length();
    const double gate = 0.5 * M_PI / before.k1;

    auto space = eigenspace(g, before.k1, opt);
    Vec alpha, beta;
    for (const auto& psi : space) {
        EdgeTrace tr = edge_trace(psi, e, x_star);
        alpha.push_back(tr.alpha);
        beta.push_back(tr.beta);
    }
    double zero_tol = 1e-7 * (1.0 + detail::coefficient_scale(space));
    detail::RatioSup sup = detail::ratio_sup(alpha, beta, zero_tol);

    if (sup.kind == detail::RatioSup::Kind::undefined) {
        r.hypothesis = Hypothesis::not_applicable;
        r.verdict = Verdict::no_claim;
        r.detail = "eigenspace_vanishes_at_point";
        return r;
    }

    // combined bound: len <= min(gate, (pi/4)(L - len)(ratio - 1))
    r.lhs = len;
    bool unbounded = sup.kind == detail::RatioSup::Kind::infinite;
    double ratio_bound = unbounded
                             ? std::numeric_limits<double>::infinity()
                             : 0.25 * M_PI * (total - len) * (sup.value - 1.0);
    r.rhs = std::min(gate, ratio_bound);
    bool hyp = len < gate && (unbounded || len <= ratio_bound);

    r.hypothesis = hyp ? Hypothesis::satisfied : Hypothesis::not_satisfied;
    if (hyp) {
        r.verdict =
            after.lambda1 <= before.lambda1 + r.tolerance ? Verdict::holds : Verdict::violated;
    } else {
        r.verdict = Verdict::no_claim;
    }
    std::string how = unbounded ? (sup.w_identically_zero ? "trivially_satisfied_unbounded_ratio"
                                                          : "ratio_unbounded")
                                : "ratio_constant=" + format_double(sup.value);
    r.detail = "gate=" + format_double(gate) + ";" + how +
               ";eigenspace_dim=" + std::to_string(space.size()) + ";observed=" +
               (after.lambda1 < before.lambda1 - r.tolerance
                    ? "decrease"
                    : (after.lambda1 > before.lambda1 + r.tolerance ? "increase" : "equal"));
    return r;
}

// lambda_1 >= (pi / total length)^2 on every connected graph.
inline VerificationReport lower_bound_check(const MetricGraph& g,
                                            const SolverOptions& opt = SolverOptions{}) {
    GapInfo gap = spectral_gap(g, opt);
    VerificationReport r;
    r.theorem = "lower-bound";
    r.graph_digest = g.digest();
    r.lambda_before = gap.lambda1;
    r.lambda_after = gap.lambda1;
    r.mult_before = gap.multiplicity;
    r.mult_after = gap.multiplicity;
    r.lhs = gap.lambda1;
    r.rhs = std::pow(M_PI / g.total_length(), 2);
    r.hypothesis = Hypothesis::satisfied;
    r.tolerance = 1e-7 * (1.0 + gap.lambda1);
    r.verdict = r.lhs >= r.rhs - r.tolerance ? Verdict::holds : Verdict::violated;
    return r;
}

// The flower on a given edge multiset has the largest gap among all
// connected pairings of the same edges; probe with random pairings.
inline VerificationReport flower_probe(const std::vector<double>& lengths, int trials,
                                       std::uint64_t seed,
                                       const SolverOptions& opt = SolverOptions{}) {
    if (trials < 1) throw Error("flower_probe: trials must be >= 1");
    MetricGraph f = flower(lengths);
    GapInfo flower_gap = spectral_gap(f, opt);

    Rng rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    int failures = 0;
    double tol = 1e-7 * (1.0 + flower_gap.lambda1);
    for (int t = 0; t < trials; ++t) {
        MetricGraph candidate = random_pairing(rng, lengths);
        GapInfo gap = spectral_gap(candidate, opt);
        worst = std::max(worst, gap.lambda1);
        if (flower_gap.lambda1 < gap.lambda1 - tol) ++failures;
    }

    VerificationReport r;
    r.theorem = "flower";
    r.graph_digest = f.digest();
    r.params = "trials=" + std::to_string(trials);
    r.lambda_before = flower_gap.lambda1;
    r.lambda_after = worst;  // largest competitor
    r.mult_before = flower_gap.multiplicity;
    r.hypothesis = Hypothesis::satisfied;
    r.tolerance = tol;
    r.verdict = failures == 0 ? Verdict::holds : Verdict::violated;
    r.detail = "pairings_beaten=" + std::to_string(trials - failures) + "/" +
               std::to_string(trials);
    r.seed = seed;
    return r;
}

}  // namespace qgraph
