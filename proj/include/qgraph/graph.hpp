// Metric and discrete graph data model, the on-disk graph format and the
// surgery operations (glue, add edge, pendant, cut, delete, remove interval).
//
// Graphs are immutable values: surgeries return new graphs. Edges carry a
// positive length and are parameterized by arc length [0, len] from endpoint
// `a` to endpoint `b`. Loops and parallel edges are allowed in metric graphs;
// discrete graphs are simple.
#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qgraph/linalg.hpp"

namespace qgraph {

using VertexId = std::size_t;
using EdgeId = std::size_t;

struct ParseError : Error {
    using Error::Error;
};

// Shortest decimal string that round-trips the value.
inline std::string format_double(double x) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

struct Edge {
    VertexId a = 0;
    VertexId b = 0;
    double length = 0.0;
    std::string length_text;  // literal from the file, preserved on round-trip
    std::string name;

    Edge() = default;
    Edge(VertexId a_, VertexId b_, double len, std::string name_ = {})
        : a(a_), b(b_), length(len), length_text(format_double(len)), name(std::move(name_)) {}
};

class MetricGraph {
public:
    MetricGraph(std::vector<VertexId> vertices, std::vector<Edge> edges)
        : vertices_(std::move(vertices)), edges_(std::move(edges)) {
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            if (!index_.emplace(vertices_[i], i).second)
                throw Error("duplicate vertex id " + std::to_string(vertices_[i]));
        }
        for (const Edge& e : edges_) {
            if (!index_.count(e.a)) throw Error("dangling endpoint id " + std::to_string(e.a));
            if (!index_.count(e.b)) throw Error("dangling endpoint id " + std::to_string(e.b));
            if (!(e.length > 0.0) || !std::isfinite(e.length))
                throw Error("non-positive length on edge (" + std::to_string(e.a) + "," +
                            std::to_string(e.b) + ")");
        }
    }

    const std::vector<VertexId>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    bool has_vertex(VertexId v) const { return index_.count(v) != 0; }

    // Position of the id in the vertex list; stable across reads of one file.
    std::size_t vertex_index(VertexId v) const {
        auto it = index_.find(v);
        if (it == index_.end()) throw Error("missing vertex " + std::to_string(v));
        return it->second;
    }

    double total_length() const {
        double s = 0.0;
        for (const Edge& e : edges_) s += e.length;
        return s;
    }

    // Loops contribute 2 to the degree of their vertex.
    std::size_t degree(VertexId v) const {
        std::size_t d = 0;
        for (const Edge& e : edges_) {
            if (e.a == v) ++d;
            if (e.b == v) ++d;
        }
        if (!has_vertex(v)) throw Error("missing vertex " + std::to_string(v));
        return d;
    }

    bool is_connected() const {
        if (vertices_.empty()) return true;
        std::vector<std::size_t> parent(vertices_.size());
        for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const Edge& e : edges_) {
            std::size_t ra = find(vertex_index(e.a)), rb = find(vertex_index(e.b));
            if (ra != rb) parent[ra] = rb;
        }
        std::size_t root = find(0);
        for (std::size_t i = 1; i < parent.size(); ++i)
            if (find(i) != root) return false;
        return true;
    }

    // M - N; surgeries shift this by a known amount.
    long long euler_characteristic() const {
        return static_cast<long long>(vertex_count()) - static_cast<long long>(edge_count());
    }

    // FNV-1a over the canonical serialization; used to tag reports.
    std::string digest() const;

private:
    std::vector<VertexId> vertices_;
    std::vector<Edge> edges_;
    std::map<VertexId, std::size_t> index_;
};

// Simple undirected graph on vertices 0..M-1.
class DiscreteGraph {
public:
    DiscreteGraph(int vertex_count, std::vector<std::pair<int, int>> edges)
        : m_(vertex_count) {
        if (m_ <= 0) throw Error("discrete graph needs a positive vertex count");
        std::set<std::pair<int, int>> seen;
        for (auto [a, b] : edges) {
            if (a == b) throw Error("discrete graph must be simple: loop at " + std::to_string(a));
            if (a < 0 || b < 0 || a >= m_ || b >= m_)
                throw Error("discrete edge endpoint out of range");
            auto key = std::minmax(a, b);
            if (!seen.insert({key.first, key.second}).second)
                throw Error("discrete graph must be simple: duplicate edge");
        }
        edges_.assign(seen.begin(), seen.end());
    }

    int vertex_count() const { return m_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    std::vector<int> degrees() const {
        std::vector<int> d(m_, 0);
        for (auto [a, b] : edges_) {
            ++d[a];
            ++d[b];
        }
        return d;
    }

    bool adjacent(int a, int b) const {
        auto key = std::minmax(a, b);
        return std::binary_search(edges_.begin(), edges_.end(),
                                  std::pair<int, int>{key.first, key.second});
    }

    bool is_connected() const {
        std::vector<int> parent(m_);
        for (int i = 0; i < m_; ++i) parent[i] = i;
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (auto [a, b] : edges_) {
            int ra = find(a), rb = find(b);
            if (ra != rb) parent[ra] = rb;
        }
        for (int i = 1; i < m_; ++i)
            if (find(i) != find(0)) return false;
        return true;
    }

    int component_count() const {
        std::vector<int> parent(m_);
        for (int i = 0; i < m_; ++i) parent[i] = i;
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (auto [a, b] : edges_) {
            int ra = find(a), rb = find(b);
            if (ra != rb) parent[ra] = rb;
        }
        std::set<int> roots;
        for (int i = 0; i < m_; ++i) roots.insert(find(i));
        return static_cast<int>(roots.size());
    }

    DiscreteGraph with_edge(int a, int b) const {
        auto e = edges_;
        e.emplace_back(a, b);
        return DiscreteGraph(m_, std::move(e));
    }

    // New vertex gets index M and one edge to m1.
    DiscreteGraph with_pendant(int m1) const {
        if (m1 < 0 || m1 >= m_) throw Error("pendant vertex out of range");
        auto e = edges_;
        e.emplace_back(m1, m_);
        return DiscreteGraph(m_ + 1, std::move(e));
    }

private:
    int m_ = 0;
    std::vector<std::pair<int, int>> edges_;  // normalized (a<b), sorted
};

// ---------------------------------------------------------------------------
// File format.
//
//   # comment
//   vertices: 0 1 2
//   edge: 0 1 1.5 optional-name
//   discrete: true        (lengths ignored, graph must be simple)
//
// Round-trip preserves vertex ids, edge order and length literals verbatim.

struct GraphFile {
    bool discrete = false;
    std::vector<VertexId> vertices;
    std::vector<Edge> edges;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline ParseError parse_error(int line, const std::string& msg) {
    return ParseError("line " + std::to_string(line) + ": " + msg);
}

}  // namespace detail

inline GraphFile parse_graph_file(const std::string& text) {
    GraphFile out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool saw_vertices = false;
    std::vector<int> edge_lines;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed = line;
        auto first = trimmed.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        trimmed = trimmed.substr(first);
        if (trimmed[0] == '#') continue;

        auto toks = detail::split_ws(trimmed);
        const std::string& key = toks[0];
        if (key == "vertices:") {
            saw_vertices = true;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                VertexId v = 0;
                auto [p, ec] = std::from_chars(toks[i].data(), toks[i].data() + toks[i].size(), v);
                if (ec != std::errc() || p != toks[i].data() + toks[i].size())
                    throw detail::parse_error(lineno, "bad vertex id '" + toks[i] + "'");
                out.vertices.push_back(v);
            }
        } else if (key == "edge:") {
            if (toks.size() < 4 || toks.size() > 5)
                throw detail::parse_error(lineno, "edge needs 'edge: a b len [name]'");
            Edge e;
            auto read_id = [&](const std::string& t, VertexId& v) {
                auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
                if (ec != std::errc() || p != t.data() + t.size())
                    throw detail::parse_error(lineno, "bad vertex id '" + t + "'");
            };
            read_id(toks[1], e.a);
            read_id(toks[2], e.b);
            e.length_text = toks[3];
            {
                const char* lo = toks[3].data();
                const char* hi = lo + toks[3].size();
                auto [p, ec] = std::from_chars(lo, hi, e.length);
                if (ec != std::errc() || p != hi)
                    throw detail::parse_error(lineno, "bad length '" + toks[3] + "'");
            }
            if (!(e.length > 0.0) || !std::isfinite(e.length))
                throw detail::parse_error(lineno, "non-positive length '" + toks[3] + "'");
            if (toks.size() == 5) e.name = toks[4];
            out.edges.push_back(std::move(e));
            edge_lines.push_back(lineno);
        } else if (key == "discrete:") {
            if (toks.size() != 2 || (toks[1] != "true" && toks[1] != "false"))
                throw detail::parse_error(lineno, "discrete expects true or false");
            out.discrete = toks[1] == "true";
        } else {
            throw detail::parse_error(lineno, "unknown field '" + key + "'");
        }
    }
    if (!saw_vertices) throw ParseError("missing 'vertices:' line");
    if (out.vertices.empty()) throw ParseError("graph needs at least one vertex");
    std::set<VertexId> declared(out.vertices.begin(), out.vertices.end());
    for (std::size_t i = 0; i < out.edges.size(); ++i) {
        for (VertexId v : {out.edges[i].a, out.edges[i].b})
            if (!declared.count(v))
                throw detail::parse_error(edge_lines[i],
                                          "dangling endpoint id " + std::to_string(v));
    }
    return out;
}

inline MetricGraph parse_graph(const std::string& text) {
    GraphFile f = parse_graph_file(text);
    if (f.discrete) throw ParseError("file is marked 'discrete: true'; expected a metric graph");
    try {
        return MetricGraph(std::move(f.vertices), std::move(f.edges));
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

inline DiscreteGraph to_discrete(const GraphFile& f) {
    std::map<VertexId, int> idx;
    for (std::size_t i = 0; i < f.vertices.size(); ++i) {
        if (!idx.emplace(f.vertices[i], static_cast<int>(i)).second)
            throw ParseError("duplicate vertex id " + std::to_string(f.vertices[i]));
    }
    std::vector<std::pair<int, int>> edges;
    for (const Edge& e : f.edges) {
        auto a = idx.find(e.a), b = idx.find(e.b);
        if (a == idx.end() || b == idx.end()) throw ParseError("dangling endpoint id");
        edges.emplace_back(a->second, b->second);
    }
    return DiscreteGraph(static_cast<int>(f.vertices.size()), std::move(edges));
}

inline std::string serialize(const MetricGraph& g) {
    std::ostringstream out;
    out << "vertices:";
    for (VertexId v : g.vertices()) out << ' ' << v;
    out << '\n';
    for (const Edge& e : g.edges()) {
        out << "edge: " << e.a << ' ' << e.b << ' '
            << (e.length_text.empty() ? format_double(e.length) : e.length_text);
        if (!e.name.empty()) out << ' ' << e.name;
        out << '\n';
    }
    return out.str();
}

inline std::string MetricGraph::digest() const {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : serialize(*this)) {
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

// ---------------------------------------------------------------------------
// Surgeries. Each returns a fresh graph; inputs are never modified.

namespace detail {

inline VertexId next_vertex_id(const MetricGraph& g) {
    VertexId m = 0;
    for (VertexId v : g.vertices()) m = std::max(m, v + 1);
    return m;
}

}  // namespace detail

struct GlueResult {
    MetricGraph graph;
    VertexId merged;                       // = min(v1, v2)
    std::map<VertexId, VertexId> relabel;  // old id -> new id, identity off the pair
};

// Merges v1 and v2 into one vertex keeping the smaller id. Edge set and all
// lengths are unchanged, so the total length is preserved exactly.
inline GlueResult glue_vertices(const MetricGraph& g, VertexId v1, VertexId v2) {
    if (v1 == v2) throw Error("glue_vertices: vertices must be distinct");
    g.vertex_index(v1);
    g.vertex_index(v2);
    VertexId keep = std::min(v1, v2), drop = std::max(v1, v2);

    std::vector<VertexId> vertices;
    for (VertexId v : g.vertices())
        if (v != drop) vertices.push_back(v);
    std::vector<Edge> edges = g.edges();
    for (Edge& e : edges) {
        if (e.a == drop) e.a = keep;
        if (e.b == drop) e.b = keep;
    }
    GlueResult out{MetricGraph(std::move(vertices), std::move(edges)), keep, {}};
    for (VertexId v : g.vertices()) out.relabel[v] = (v == drop) ? keep : v;
    return out;
}

inline MetricGraph add_edge(const MetricGraph& g, VertexId v1, VertexId v2, double len) {
    if (!(len > 0.0) || !std::isfinite(len)) throw Error("add_edge: non-positive length");
    g.vertex_index(v1);
    g.vertex_index(v2);
    std::vector<Edge> edges = g.edges();
    edges.emplace_back(v1, v2, len);
    return MetricGraph(g.vertices(), std::move(edges));
}

struct PendantResult {
    MetricGraph graph;
    VertexId new_vertex;
};

inline PendantResult add_pendant(const MetricGraph& g, VertexId v1, double len) {
    if (!(len > 0.0) || !std::isfinite(len)) throw Error("add_pendant: non-positive length");
    g.vertex_index(v1);
    VertexId w = detail::next_vertex_id(g);
    std::vector<VertexId> vertices = g.vertices();
    vertices.push_back(w);
    std::vector<Edge> edges = g.edges();
    edges.emplace_back(v1, w, len);
    return {MetricGraph(std::move(vertices), std::move(edges)), w};
}

struct CutResult {
    MetricGraph graph;
    VertexId leaf_a;   // new degree-1 vertex on the [0, t] piece
    VertexId leaf_b;   // new degree-1 vertex on the [t, len] piece
    EdgeId piece_a;
    EdgeId piece_b;
};

// Cuts edge e at the internal point t of its [0, len] parameterization. The
// two pieces end at two new leaves which are NOT joined; the result may be
// disconnected.
inline CutResult cut_edge(const MetricGraph& g, EdgeId e, double t) {
    if (e >= g.edge_count()) throw Error("cut_edge: no edge " + std::to_string(e));
    const Edge& old = g.edges()[e];
    if (!(t > 0.0) || !(t < old.length))
        throw Error("cut_edge: cut point must be interior to (0, " + format_double(old.length) + ")");
    VertexId w1 = detail::next_vertex_id(g);
    VertexId w2 = w1 + 1;
    std::vector<VertexId> vertices = g.vertices();
    vertices.push_back(w1);
    vertices.push_back(w2);
    std::vector<Edge> edges;
    edges.reserve(g.edge_count() + 1);
    EdgeId pa = 0, pb = 0;
    for (EdgeId i = 0; i < g.edge_count(); ++i) {
        if (i == e) {
            pa = edges.size();
            edges.emplace_back(old.a, w1, t);
            pb = edges.size();
            edges.emplace_back(w2, old.b, old.length - t);
        } else {
            edges.push_back(g.edges()[i]);
        }
    }
    return {MetricGraph(std::move(vertices), std::move(edges)), w1, w2, pa, pb};
}

// Removes edge e keeping its endpoints. Refuses to disconnect the graph
// (isolated endpoints count as disconnection).
inline MetricGraph delete_edge(const MetricGraph& g, EdgeId e) {
    if (e >= g.edge_count()) throw Error("delete_edge: no edge " + std::to_string(e));
    std::vector<Edge> edges;
    for (EdgeId i = 0; i < g.edge_count(); ++i)
        if (i != e) edges.push_back(g.edges()[i]);
    MetricGraph out(g.vertices(), std::move(edges));
    if (!out.is_connected()) throw Error("delete_edge: deletion disconnects the graph");
    return out;
}

struct RemoveIntervalResult {
    MetricGraph graph;
    VertexId leaf_a;
    VertexId leaf_b;
};

// Cuts away the interval [x_star - len/2, x_star + len/2] from edge e,
// leaving two pendant stubs with new leaf vertices. Both stubs must have
// positive length and the result must stay connected.
inline RemoveIntervalResult remove_interval(const MetricGraph& g, EdgeId e, double x_star,
                                            double len) {
    if (e >= g.edge_count()) throw Error("remove_interval: no edge " + std::to_string(e));
    if (!(len > 0.0)) throw Error("remove_interval: non-positive length");
    const Edge& old = g.edges()[e];
    double lo = x_star - 0.5 * len;
    double hi = x_star + 0.5 * len;
    if (!(lo > 0.0) || !(hi < old.length))
        throw Error("remove_interval: interval exceeds the edge interior");
    VertexId w1 = detail::next_vertex_id(g);
    VertexId w2 = w1 + 1;
    std::vector<VertexId> vertices = g.vertices();
    vertices.push_back(w1);
    vertices.push_back(w2);
    std::vector<Edge> edges;
    for (EdgeId i = 0; i < g.edge_count(); ++i) {
        if (i == e) {
            edges.emplace_back(old.a, w1, lo);
            edges.emplace_back(w2, old.b, old.length - hi);
        } else {
            edges.push_back(g.edges()[i]);
        }
    }
    MetricGraph out(std::move(vertices), std::move(edges));
    if (!out.is_connected()) throw Error("remove_interval: removal disconnects the graph");
    return {std::move(out), w1, w2};
}

// N loops of the given lengths attached to a single vertex.
inline MetricGraph flower(const std::vector<double>& lengths) {
    if (lengths.empty()) throw Error("flower: needs at least one loop");
    std::vector<Edge> edges;
    for (double len : lengths) {
        if (!(len > 0.0) || !std::isfinite(len)) throw Error("flower: non-positive length");
        edges.emplace_back(0, 0, len);
    }
    return MetricGraph({0}, std::move(edges));
}

// ---------------------------------------------------------------------------
// Tagged surgery description, used by the CLI.

struct GlueOp { VertexId v1, v2; };
struct AddEdgeOp { VertexId v1, v2; double len; };
struct PendantOp { VertexId v; double len; };
struct CutOp { EdgeId e; double t; };
struct DeleteOp { EdgeId e; };
struct RemoveIntervalOp { EdgeId e; double x_star, len; };

using SurgeryOp = std::variant<GlueOp, AddEdgeOp, PendantOp, CutOp, DeleteOp, RemoveIntervalOp>;

inline MetricGraph apply(const MetricGraph& g, const SurgeryOp& op) {
    return std::visit(
        [&](const auto& o) -> MetricGraph {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, GlueOp>) return glue_vertices(g, o.v1, o.v2).graph;
            else if constexpr (std::is_same_v<T, AddEdgeOp>) return add_edge(g, o.v1, o.v2, o.len);
            else if constexpr (std::is_same_v<T, PendantOp>) return add_pendant(g, o.v, o.len).graph;
            else if constexpr (std::is_same_v<T, CutOp>) return cut_edge(g, o.e, o.t).graph;
            else if constexpr (std::is_same_v<T, DeleteOp>) return delete_edge(g, o.e);
            else return remove_interval(g, o.e, o.x_star, o.len).graph;
        },
        op);
}

}  // namespace qgraph
