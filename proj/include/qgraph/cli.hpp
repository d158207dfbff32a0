// Command-line surface: spectrum | gap | surgery | verify | oracle | suite.
//
// Exit codes: 0 success, 2 when a verify verdict is "hypothesis unmet" or
// "not applicable", 1 on errors (including a violated verdict, which would
// mean a bug). All outputs are deterministic for fixed inputs and seed.
#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qgraph/discrete.hpp"
#include "qgraph/verify.hpp"

namespace qgraph::cli {

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw Error("cannot write '" + out_path + "'");
    f << text;
}

inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline SurgeryOp parse_op(const std::string& text) {
    auto colon = text.find(':');
    std::string name = text.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::string rest = text.substr(colon + 1);
        std::istringstream in(rest);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            double value = 0.0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
            if (ec != std::errc() || p != tok.data() + tok.size())
                throw Error("bad surgery parameter '" + tok + "'");
            args.push_back(value);
        }
    }
    auto want = [&](std::size_t n) {
        if (args.size() != n)
            throw Error("op '" + name + "' expects " + std::to_string(n) + " parameters");
    };
    auto id = [](double x) { return static_cast<std::size_t>(x); };
    if (name == "glue") { want(2); return GlueOp{id(args[0]), id(args[1])}; }
    if (name == "add") { want(3); return AddEdgeOp{id(args[0]), id(args[1]), args[2]}; }
    if (name == "pendant") { want(2); return PendantOp{id(args[0]), args[1]}; }
    if (name == "cut") { want(2); return CutOp{id(args[0]), args[1]}; }
    if (name == "delete") { want(1); return DeleteOp{id(args[0])}; }
    if (name == "cutout") { want(3); return RemoveIntervalOp{id(args[0]), args[1], args[2]}; }
    throw Error("unknown surgery op '" + name + "' (glue|add|pendant|cut|delete|cutout)");
}

inline int verdict_exit_code(const VerificationReport& r) {
    if (r.verdict == Verdict::holds) return 0;
    if (r.verdict == Verdict::violated) return 1;
    return 2;  // hypothesis unmet / not applicable
}

inline std::string spectrum_csv(const Spectrum& s) {
    std::ostringstream out;
    out << "index,k,lambda,multiplicity\n";
    int i = 0;
    for (const auto& e : s.entries)
        out << i++ << ',' << num(e.k) << ',' << num(e.lambda) << ',' << e.multiplicity << '\n';
    return out.str();
}

// one metric + one discrete instance per index; reports appended in a fixed order
inline void suite_instance(std::uint64_t sub_seed, std::vector<VerificationReport>& reports) {
    Rng local(sub_seed);
    MetricGraph g = random_connected_metric_graph(local);

    VertexId v1 = local.index(g.vertex_count());
    VertexId v2 = local.index(g.vertex_count());
    if (v1 != v2) reports.push_back(verify_join(g, v1, v2));

    reports.push_back(verify_pendant(g, v1, local.uniform(0.3, 3.0)));

    EdgeId e = local.index(g.edge_count());
    double t = local.uniform(0.2, 0.8) * g.edges()[e].length;
    reports.push_back(verify_cut(g, e, t));

    double len = g.total_length() * local.uniform(1.05, 2.0);
    reports.push_back(verify_add_edge(g, v1, v2, len));

    reports.push_back(verify_delete(g, e));

    double el = g.edges()[e].length;
    double x_star = local.uniform(0.35, 0.65) * el;
    double cut_len = local.uniform(0.2, 0.6) * std::min(x_star, el - x_star);
    reports.push_back(interval_criterion(g, e, x_star, cut_len));

    reports.push_back(lower_bound_check(g));

    DiscreteGraph d = random_connected_simple_graph(local);
    int m1 = -1, m2 = -1;
    for (int a = 0; a < d.vertex_count() && m1 < 0; ++a)
        for (int b = a + 1; b < d.vertex_count(); ++b)
            if (!d.adjacent(a, b)) {
                m1 = a;
                m2 = b;
                break;
            }
    if (m1 >= 0) reports.push_back(check_prop1(d, m1, m2));
    reports.push_back(check_prop2(d, static_cast<int>(local.index(d.vertex_count()))));

    for (auto& r : reports)
        if (!r.seed) r.seed = sub_seed;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"standard Laplacian spectra on metric graphs and surgery verification"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");  // keep -h free for the mesh-size flag

    std::string path, out_path, op_text, theorem;
    double kmax = 10.0, h = 0.0, t = 0.0, x = 0.0, len = 0.0;
    std::uint64_t seed = 1;
    long long n = 1, v1 = -1, v2 = -1, edge = -1;

    auto* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalues up to --kmax as CSV");
    spectrum_cmd->add_option("file", path)->required();
    spectrum_cmd->add_option("--kmax", kmax, "wavenumber scan limit")->check(CLI::PositiveNumber);
    spectrum_cmd->add_option("--out", out_path);

    auto* gap_cmd = app.add_subcommand("gap", "first excited eigenvalue");
    gap_cmd->add_option("file", path)->required();
    gap_cmd->add_option("--out", out_path);

    auto* surgery_cmd = app.add_subcommand("surgery", "apply --op and emit the new graph");
    surgery_cmd->add_option("file", path)->required();
    surgery_cmd
        ->add_option("--op", op_text,
                     "glue:v1,v2 | add:v1,v2,len | pendant:v,len | cut:e,t | delete:e | "
                     "cutout:e,x,len")
        ->required();
    surgery_cmd->add_option("--out", out_path);

    auto* verify_cmd = app.add_subcommand("verify", "check one theorem on the graph");
    verify_cmd->add_option("file", path)->required();
    verify_cmd
        ->add_option("--theorem", theorem, "join|pendant|add|long-edge|cut|delete|interval")
        ->required();
    verify_cmd->add_option("--v1", v1);
    verify_cmd->add_option("--v2", v2);
    verify_cmd->add_option("--edge", edge);
    verify_cmd->add_option("--t", t);
    verify_cmd->add_option("--x", x);
    verify_cmd->add_option("--len", len);
    verify_cmd->add_option("--out", out_path);

    auto* oracle_cmd = app.add_subcommand("oracle", "finite-element eigenvalues as CSV");
    oracle_cmd->set_help_flag("--help", "print help");
    oracle_cmd->add_option("file", path)->required();
    oracle_cmd->add_option("--h", h, "mesh size")->check(CLI::PositiveNumber);
    oracle_cmd->add_option("--n", n, "eigenvalue count")->check(CLI::PositiveNumber);
    oracle_cmd->add_option("--out", out_path);

    auto* suite_cmd = app.add_subcommand("suite", "seeded property suite over random instances");
    suite_cmd->add_option("--seed", seed);
    suite_cmd->add_option("--n", n, "instance count")->required();
    suite_cmd->add_option("--out", out_path);

    std::vector<const char*> argv;
    argv.push_back("qgraph");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (spectrum_cmd->parsed()) {
            MetricGraph g = parse_graph(detail::read_file(path));
            Spectrum s = eigenvalues(g, kmax);
            std::string text = detail::spectrum_csv(s);
            for (const auto& w : s.warnings) text += "# warning: " + w + '\n';
            detail::emit(text, out_path, out);
            return 0;
        }

        if (gap_cmd->parsed()) {
            MetricGraph g = parse_graph(detail::read_file(path));
            GapInfo gap = spectral_gap(g);
            detail::emit("lambda1,k1,multiplicity\n" + detail::num(gap.lambda1) + ',' +
                             detail::num(gap.k1) + ',' + std::to_string(gap.multiplicity) + '\n',
                         out_path, out);
            return 0;
        }

        if (surgery_cmd->parsed()) {
            MetricGraph g = parse_graph(detail::read_file(path));
            MetricGraph result = qgraph::apply(g, detail::parse_op(op_text));
            detail::emit(serialize(result), out_path, out);
            return 0;
        }

        if (verify_cmd->parsed()) {
            MetricGraph g = parse_graph(detail::read_file(path));
            auto need = [&](bool ok, const char* what) {
                if (!ok) throw Error(std::string("verify --theorem ") + theorem + " needs " + what);
            };
            VerificationReport r;
            if (theorem == "join") {
                need(v1 >= 0 && v2 >= 0, "--v1 and --v2");
                r = verify_join(g, static_cast<VertexId>(v1), static_cast<VertexId>(v2));
            } else if (theorem == "pendant") {
                need(v1 >= 0 && len > 0, "--v1 and --len");
                r = verify_pendant(g, static_cast<VertexId>(v1), len);
            } else if (theorem == "add" || theorem == "long-edge") {
                need(v1 >= 0 && v2 >= 0 && len > 0, "--v1, --v2 and --len");
                r = verify_add_edge(g, static_cast<VertexId>(v1), static_cast<VertexId>(v2), len,
                                    theorem == "add" ? AddEdgeGate::either
                                                     : AddEdgeGate::long_edge_only);
            } else if (theorem == "cut") {
                need(edge >= 0 && t > 0, "--edge and --t");
                r = verify_cut(g, static_cast<EdgeId>(edge), t);
            } else if (theorem == "delete") {
                need(edge >= 0, "--edge");
                r = verify_delete(g, static_cast<EdgeId>(edge));
            } else if (theorem == "interval") {
                need(edge >= 0 && x > 0 && len > 0, "--edge, --x and --len");
                r = interval_criterion(g, static_cast<EdgeId>(edge), x, len);
            } else {
                throw Error("unknown theorem '" + theorem + "'");
            }
            detail::emit(r.to_line() + '\n', out_path, out);
            return detail::verdict_exit_code(r);
        }

        if (oracle_cmd->parsed()) {
            if (!(h > 0)) throw Error("oracle needs --h > 0");
            MetricGraph g = parse_graph(detail::read_file(path));
            Vec values = oracle_eigenvalues(g, h, static_cast<int>(n));
            std::ostringstream text;
            text << "index,lambda\n";
            for (std::size_t i = 0; i < values.size(); ++i)
                text << i << ',' << detail::num(values[i]) << '\n';
            detail::emit(text.str(), out_path, out);
            return 0;
        }

        if (suite_cmd->parsed()) {
            if (n < 1) throw Error("suite needs --n >= 1");
            Rng master(seed);
            std::vector<VerificationReport> reports;
            for (long long i = 0; i < n; ++i) detail::suite_instance(master.next_u64(), reports);
            ReportSummary summary;
            std::ostringstream text;
            text << "# suite seed=" << seed << " n=" << n << '\n';
            for (const auto& r : reports) {
                summary.add(r);
                text << r.to_line() << '\n';
            }
            text << summary.block();
            detail::emit(text.str(), out_path, out);
            return summary.violated == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace qgraph::cli
