// Verification records: one structured-text line per check plus a summary
// block for batch runs.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

namespace qgraph {

enum class Hypothesis { satisfied, not_satisfied, not_applicable };
enum class Verdict { holds, violated, no_claim };

inline const char* to_string(Hypothesis h) {
    switch (h) {
        case Hypothesis::satisfied: return "satisfied";
        case Hypothesis::not_satisfied: return "not-satisfied";
        default: return "not-applicable";
    }
}

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::violated: return "violated";
        default: return "no-claim";
    }
}

struct VerificationReport {
    std::string theorem;
    std::string graph_digest;
    std::string params;
    double lambda_before = std::numeric_limits<double>::quiet_NaN();
    double lambda_after = std::numeric_limits<double>::quiet_NaN();
    int mult_before = 0;
    int mult_after = 0;
    Hypothesis hypothesis = Hypothesis::not_applicable;
    double lhs = std::numeric_limits<double>::quiet_NaN();  // criterion value when one exists
    double rhs = std::numeric_limits<double>::quiet_NaN();
    Verdict verdict = Verdict::no_claim;
    double tolerance = 0.0;
    std::string detail;  // evaluated quantities, interpretation flags
    std::optional<std::uint64_t> seed;

    std::string to_line() const {
        auto num = [](double x) -> std::string {
            if (std::isnan(x)) return "nan";
            if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
            std::ostringstream s;
            s.precision(12);
            s << x;
            return s.str();
        };
        std::ostringstream out;
        out << "theorem=" << theorem << " graph=" << graph_digest;
        if (!params.empty()) out << " params=" << params;
        out << " lambda1_before=" << num(lambda_before) << " lambda1_after=" << num(lambda_after)
            << " mult_before=" << mult_before << " mult_after=" << mult_after
            << " hypothesis=" << to_string(hypothesis);
        if (!std::isnan(lhs) || !std::isnan(rhs)) out << " lhs=" << num(lhs) << " rhs=" << num(rhs);
        out << " verdict=" << to_string(verdict) << " tol=" << num(tolerance);
        if (!detail.empty()) out << " detail=\"" << detail << '"';
        if (seed) out << " seed=" << *seed;
        return out.str();
    }
};

struct ReportSummary {
    int total = 0;
    int holds = 0;
    int violated = 0;
    int no_claim = 0;
    int not_applicable = 0;

    void add(const VerificationReport& r) {
        ++total;
        if (r.hypothesis == Hypothesis::not_applicable) ++not_applicable;
        switch (r.verdict) {
            case Verdict::holds: ++holds; break;
            case Verdict::violated: ++violated; break;
            case Verdict::no_claim: ++no_claim; break;
        }
    }

    std::string block() const {
        std::ostringstream out;
        out << "# summary\n"
            << "total=" << total << " holds=" << holds << " no-claim=" << no_claim
            << " not-applicable=" << not_applicable << " violated=" << violated << '\n';
        return out.str();
    }
};

}  // namespace qgraph
