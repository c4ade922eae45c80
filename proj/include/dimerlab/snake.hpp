#ifndef DIMERLAB_SNAKE_HPP
#define DIMERLAB_SNAKE_HPP

#include <dimerlab/graph.hpp>
#include <dimerlab/moves.hpp>
#include <dimerlab/zoo.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dimerlab {

/// Lower-left corners of the tiles of a snake. Each letter of the word (N or E) places the
/// next tile above or to the right of the previous one.
inline std::vector<std::pair<int, int>> snake_tiles(const std::string& word) {
    std::vector<std::pair<int, int>> t{{0, 0}};
    for (char ch : word) {
        auto [x, y] = t.back();
        if (ch == 'N' || ch == 'n') t.push_back({x, y + 1});
        else if (ch == 'E' || ch == 'e') t.push_back({x + 1, y});
        else throw input_error(std::string("snake word letters must be N or E, got '") + ch + "'");
    }
    return t;
}

inline std::string snake_point(int x, int y) { return "p" + std::to_string(x) + "_" + std::to_string(y); }

/// Snake graph with uniform multiplicity n. Lattice point (x, y) is white when x + y is even.
/// Edges are named "h<x>_<y>" (to (x+1, y)) and "v<x>_<y>" (to (x, y+1)); weights missing from
/// the map are the identity.
template <typename T>
EmbeddedGraph<T> snake_graph(const std::string& word, std::size_t n, const std::map<std::string, Matrix<T>>& weights = {}) {
    const auto tiles = snake_tiles(word);
    std::map<std::pair<int, int>, VertexId> pts;
    std::map<std::string, std::pair<std::pair<int, int>, std::pair<int, int>>> segs;
    GeometricBuilder<T> gb;
    auto point = [&](int x, int y) {
        auto it = pts.find({x, y});
        if (it != pts.end()) return it->second;
        const Color c = (x + y) % 2 == 0 ? Color::white : Color::black;
        return pts[{x, y}] = gb.vertex(snake_point(x, y), c, n, x, y);
    };
    std::vector<std::string> order;
    auto seg = [&](std::string name, std::pair<int, int> p, std::pair<int, int> q) {
        if (segs.emplace(name, std::make_pair(p, q)).second) order.push_back(name);
    };
    for (auto [x, y] : tiles) {
        seg("h" + std::to_string(x) + "_" + std::to_string(y), {x, y}, {x + 1, y});
        seg("v" + std::to_string(x + 1) + "_" + std::to_string(y), {x + 1, y}, {x + 1, y + 1});
        seg("h" + std::to_string(x) + "_" + std::to_string(y + 1), {x, y + 1}, {x + 1, y + 1});
        seg("v" + std::to_string(x) + "_" + std::to_string(y), {x, y}, {x, y + 1});
    }
    for (const auto& [name, w] : weights)
        if (!segs.count(name)) throw input_error("snake has no edge named '" + name + "'");
    for (const auto& name : order) {
        const auto& [p, q] = segs.at(name);
        const VertexId u = point(p.first, p.second), v = point(q.first, q.second);
        auto it = weights.find(name);
        gb.edge(name, u, v, it == weights.end() ? eye<T>(n) : it->second);
    }
    return gb.build();
}

/// The three-tile L-shaped snake (word "NE") with the letter names of the worked example.
template <typename T>
EmbeddedGraph<T> snake_example(const std::map<std::string, Matrix<T>>& letters) {
    static const std::map<std::string, std::string> rename{
        {"A", "v0_0"}, {"B", "h0_0"}, {"C", "v1_0"}, {"D", "h0_1"}, {"E", "v0_1"},
        {"F", "h0_2"}, {"G", "v1_1"}, {"H", "h1_1"}, {"M", "v2_1"}, {"N", "h1_2"}};
    std::map<std::string, Matrix<T>> w;
    std::size_t n = 0;
    for (const auto& [k, m] : letters) {
        auto it = rename.find(k);
        if (it == rename.end()) throw input_error("unknown snake example edge '" + k + "'");
        w[it->second] = m;
        n = m.rows();
    }
    if (n == 0) throw input_error("snake example needs at least one weight");
    EmbeddedGraph<T> g = snake_graph<T>("NE", n, w);
    for (const auto& [letter, name] : rename) g.set_edge_name(g.edge_by_name(name), letter);
    return g.finalize(), g;
}

/// Result of straightening a snake. `normalized` is the input with every corner edge gauged to
/// the identity; `edge_map` sends its edges to edges of `result` (merged pairs share a target).
template <typename T>
struct SnakeReduction {
    EmbeddedGraph<T> normalized;
    EmbeddedGraph<T> result;
    std::vector<MoveCertificate<T>> certificates;
    std::vector<std::optional<EdgeId>> edge_map;
    std::vector<EdgeId> touched;  // edges of `normalized` removed or merged along the way
};

/// Outer corner of each turning tile: the corner of the tile shared with neither neighbour.
inline std::vector<std::pair<int, int>> snake_turn_corners(const std::string& word) {
    const auto t = snake_tiles(word);
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        const char in = word[i - 1] == 'n' ? 'N' : (word[i - 1] == 'e' ? 'E' : word[i - 1]);
        const char nx = word[i] == 'n' ? 'N' : (word[i] == 'e' ? 'E' : word[i]);
        if (in == nx) continue;
        auto [x, y] = t[i];
        // N then E: glued on the south and east sides, free corner is top-left
        out.push_back(in == 'N' ? std::make_pair(x, y + 1) : std::make_pair(x + 1, y));
    }
    return out;
}

/// Contracts the outer corner of every turning tile and merges the resulting parallels, leaving
/// a straight 2 x N grid. Vertices must carry the names produced by snake_graph.
template <Field T>
SnakeReduction<T> snake_reduce(const EmbeddedGraph<T>& g, const std::string& word) {
    SnakeReduction<T> red;
    const auto corners = snake_turn_corners(word);
    EmbeddedGraph<T> cur = g;
    for (auto [x, y] : corners) {
        const VertexId c = cur.vertex_by_name(snake_point(x, y));
        if (cur.degree(c) != 2) throw input_error("snake corner " + snake_point(x, y) + " does not have degree 2");
        for (EdgeId e : cur.vertex(c).rotation) gauge_edge_to_identity(cur, e, cur.other_end(e, c));
    }
    red.normalized = cur;
    std::vector<std::optional<EdgeId>> map(cur.num_edges());
    for (EdgeId e = 0; e < cur.num_edges(); ++e) map[e] = e;
    auto compose = [&](const MoveCertificate<T>& cert) {
        for (auto& m : map)
            if (m) m = cert.edge_map[*m];
        red.certificates.push_back(cert);
    };
    for (auto [x, y] : corners) {
        const VertexId c = cur.vertex_by_name(snake_point(x, y));
        const VertexId z = cur.other_end(cur.vertex(c).rotation[0], c);
        auto cert = contract(cur, c);
        compose(cert);
        cur = cert.after;
        const std::string zname = cert.before.vertex(z).name + "+";
        VertexId merged = cur.num_vertices();
        for (VertexId v = 0; v < cur.num_vertices(); ++v)
            if (cur.vertex(v).name.rfind(zname, 0) == 0) merged = v;
        std::map<VertexId, int> count;
        for (EdgeId e : cur.vertex(merged).rotation) ++count[cur.other_end(e, merged)];
        for (auto [v, k] : count) {
            if (k < 2) continue;
            const bool white = cur.vertex(v).color == Color::white;
            auto pc = parallel_reduce(cur, white ? v : merged, white ? merged : v);
            compose(pc);
            cur = pc.after;
            break;
        }
    }
    std::vector<EdgeId> touched;
    for (EdgeId e = 0; e < map.size(); ++e) {
        if (!map[e]) {
            touched.push_back(e);
            continue;
        }
        for (EdgeId f = 0; f < map.size(); ++f)
            if (f != e && map[f] == map[e]) {
                touched.push_back(e);
                break;
            }
    }
    red.touched = std::move(touched);
    red.result = cur;
    red.edge_map = map;
    return red;
}

} // namespace dimerlab

#endif
