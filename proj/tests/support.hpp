// Shared fixtures: seeded random rational weights and the graph corpus.
#ifndef DIMERLAB_TESTS_SUPPORT_HPP
#define DIMERLAB_TESTS_SUPPORT_HPP

#include <dimerlab/kasteleyn.hpp>
#include <dimerlab/snake.hpp>
#include <dimerlab/zoo.hpp>

#include <random>
#include <string>
#include <vector>

namespace dimerlab::testing {

using Q = Rational;

/// Nonzero rationals p/q with |p| <= 5, 1 <= q <= 4; positive unless `allow_negative`.
inline Q random_rational(std::mt19937_64& rng, bool allow_negative = false) {
    std::uniform_int_distribution<int> num(1, 5), den(1, 4), flip(0, 1);
    Q x(num(rng), den(rng));
    x.canonicalize();
    return allow_negative && flip(rng) ? Q(-x) : x;
}

inline Matrix<Q> random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, bool allow_negative = true) {
    Matrix<Q> m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = random_rational(rng, allow_negative);
    return m;
}

inline Matrix<Q> random_invertible(std::size_t n, std::mt19937_64& rng) {
    for (;;) {
        auto m = random_matrix(n, n, rng);
        if (sgn(det(m)) != 0) return m;
    }
}

/// Replaces every edge weight by a random matrix of the same shape, retrying until det K != 0.
inline EmbeddedGraph<Q> randomize(const EmbeddedGraph<Q>& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        EmbeddedGraph<Q> h = g;
        for (EdgeId e = 0; e < g.num_edges(); ++e) {
            const auto& w = g.edge(e).weight;
            h.set_weight(e, random_matrix(w.rows(), w.cols(), rng));
        }
        h.finalize();
        if (sgn(assemble(h).det_K()) != 0) return h;
    }
    throw std::runtime_error("could not find nonsingular random weights");
}

/// Attaches a two-edge tail (v - t - leaf) at an outer corner of black vertex v, both edges
/// carrying the identity. The leaf edge is forced, so Z is unchanged.
inline EmbeddedGraph<Q> with_tail(const EmbeddedGraph<Q>& g, VertexId v) {
    if (g.vertex(v).color != Color::black) throw std::invalid_argument("tail needs a black vertex");
    const std::size_t n = g.vertex(v).multiplicity;
    std::size_t corner = 0;
    while (g.face_of_corner(v, corner) != g.outer_face()) ++corner;
    EmbeddedGraph<Q> h = g;
    const VertexId t = h.add_vertex("tail_w", Color::white, n);
    const VertexId leaf = h.add_vertex("tail_b", Color::black, n);
    const EdgeId e1 = h.add_edge("tail", t, v, eye<Q>(n), false);
    const EdgeId e2 = h.add_edge("leaf", t, leaf, eye<Q>(n), false);
    auto rot = g.vertex(v).rotation;
    rot.insert(rot.begin() + static_cast<long>(corner), e1);
    std::size_t cil = g.vertex(v).cilium;
    if (cil > corner) ++cil;
    h.set_rotation(v, rot);
    h.set_cilium(v, cil);
    h.set_rotation(t, {e1, e2});
    h.set_rotation(leaf, {e2});
    h.finalize();
    return h;
}

struct CorpusEntry {
    std::string name;
    EmbeddedGraph<Q> graph;
};

/// Identity-weighted corpus graphs with uniform multiplicity n, plus the mixed graphs when
/// `with_mixed` is set.
inline std::vector<CorpusEntry> corpus(std::size_t n, bool with_mixed, std::size_t max_grid = 5) {
    const auto I = eye<Q>(n);
    std::vector<CorpusEntry> out;
    out.push_back({"single_edge", single_edge<Q>(I)});
    out.push_back({"four_cycle", four_cycle<Q>(I, I, I, I)});
    out.push_back({"dimerwt", dimerwt_graph<Q>(I, I, I, I, I, I, I)});
    std::map<std::string, Matrix<Q>> letters;
    for (const char* k : {"A", "B", "C", "D", "E", "F", "G", "H", "M", "N"}) letters[k] = I;
    out.push_back({"snake", snake_example<Q>(letters)});
    for (std::size_t N = 1; N <= max_grid; ++N) out.push_back({"grid" + std::to_string(N), grid_graph(uniform_grid<Q>(N, n))});
    if (with_mixed) {
        out.push_back({"mixed_ex", mixed_ex_identity<Q>()});
        out.push_back({"six_vertex_2x2", six_vertex<Q>(2, 2, Q(3, 5), Q(4, 5))});
    }
    return out;
}

} // namespace dimerlab::testing

#endif
