#ifndef DIMERLAB_ORACLE_HPP
#define DIMERLAB_ORACLE_HPP

#include <dimerlab/kasteleyn.hpp>

#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace dimerlab {

/// Edge multiplicities of one (mixed) dimer cover, indexed by EdgeId.
using Cover = std::vector<std::size_t>;

struct OracleLimits {
    std::size_t max_covers = 1000000;
    std::size_t max_colorings = 10000000;
    bool transpose_minors = false;  // debug: rows by black colors instead of white (negative control)

    /// Defaults, with DIMERLAB_ORACLE_CAP overriding both caps when set.
    static OracleLimits from_env() {
        OracleLimits l;
        if (const char* s = std::getenv("DIMERLAB_ORACLE_CAP")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(s, &end, 10);
            if (end != s && *end == '\0' && v > 0) l.max_covers = l.max_colorings = static_cast<std::size_t>(v);
        }
        return l;
    }
};

/// All covers in lexicographic order of (m_0, m_1, ...) by edge id.
template <typename T>
std::vector<Cover> enumerate_covers(const EmbeddedGraph<T>& g, const OracleLimits& lim = OracleLimits::from_env()) {
    const std::size_t ne = g.num_edges();
    std::vector<std::size_t> residual(g.num_vertices());
    std::vector<EdgeId> last(g.num_vertices(), 0);
    for (VertexId v = 0; v < g.num_vertices(); ++v) residual[v] = g.vertex(v).multiplicity;
    for (EdgeId e = 0; e < ne; ++e) {
        last[g.edge(e).white] = std::max(last[g.edge(e).white], e);
        last[g.edge(e).black] = std::max(last[g.edge(e).black], e);
    }
    std::vector<Cover> out;
    if (ne == 0) {
        if (g.num_vertices() == 0) out.push_back({});
        return out;
    }
    Cover m(ne, 0);
    std::function<void(EdgeId)> rec = [&](EdgeId e) {
        if (e == ne) {
            if (out.size() >= lim.max_covers)
                throw cap_exceeded("more than " + std::to_string(lim.max_covers) + " covers");
            out.push_back(m);
            return;
        }
        const VertexId w = g.edge(e).white, b = g.edge(e).black;
        std::size_t hi = std::min(residual[w], residual[b]);
        std::size_t lo = 0;
        if (last[w] == e) lo = std::max(lo, residual[w]);
        if (last[b] == e) lo = std::max(lo, residual[b]);
        if (lo > hi) return;
        if (last[w] == e) hi = std::min(hi, residual[w]);
        if (last[b] == e) hi = std::min(hi, residual[b]);
        for (std::size_t k = lo; k <= hi; ++k) {
            m[e] = k;
            residual[w] -= k;
            residual[b] -= k;
            rec(e + 1);
            residual[w] += k;
            residual[b] += k;
        }
        m[e] = 0;
    };
    rec(0);
    return out;
}

/// Color sets handed to the incident edges of one vertex, in reading order, and the sign of
/// the permutation read off from the cilium.
struct VertexColoring {
    std::vector<EdgeId> edges;                   // linear order from the cilium
    std::vector<std::vector<std::size_t>> sets;  // sets[i] goes to edges[i], sorted
    int sign = 1;
};

namespace detail {

inline int permutation_sign(const std::vector<std::size_t>& p) {
    int s = 1;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) s = -s;
    return s;
}

/// Every way to split colors 0..n-1 over the incident edges with the given sizes.
template <typename T>
std::vector<VertexColoring> vertex_colorings(const EmbeddedGraph<T>& g, VertexId v, const Cover& m) {
    VertexColoring base;
    base.edges = g.linear_order(v);
    const std::size_t n = g.vertex(v).multiplicity;
    base.sets.assign(base.edges.size(), {});
    std::vector<VertexColoring> out;
    std::vector<bool> used(n, false);
    std::function<void(std::size_t, std::size_t, std::size_t)> rec = [&](std::size_t slot, std::size_t start,
                                                                         std::size_t need) {
        if (slot == base.edges.size()) {
            std::vector<std::size_t> perm;
            for (const auto& s : base.sets) perm.insert(perm.end(), s.begin(), s.end());
            base.sign = permutation_sign(perm);
            out.push_back(base);
            return;
        }
        if (need == 0) {
            const std::size_t nxt = slot + 1;
            rec(nxt, 0, nxt < base.edges.size() ? m[base.edges[nxt]] : 0);
            return;
        }
        for (std::size_t c = start; c < n; ++c) {
            if (used[c]) continue;
            used[c] = true;
            base.sets[slot].push_back(c);
            rec(slot, c + 1, need - 1);
            base.sets[slot].pop_back();
            used[c] = false;
        }
    };
    rec(0, 0, base.edges.empty() ? 0 : m[base.edges[0]]);
    return out;
}

template <typename T>
T edge_minor(const Matrix<T>& w, const std::vector<std::size_t>& white_colors, const std::vector<std::size_t>& black_colors,
             bool transpose) {
    if (!transpose) return minor<T>(w, white_colors, black_colors);
    for (auto i : black_colors)
        if (i >= w.rows()) throw input_error("transposed convention needs square weights");
    for (auto j : white_colors)
        if (j >= w.cols()) throw input_error("transposed convention needs square weights");
    return minor<T>(w, black_colors, white_colors);
}

template <typename T>
const std::vector<std::size_t>& set_for(const VertexColoring& vc, EdgeId e) {
    for (std::size_t i = 0; i < vc.edges.size(); ++i)
        if (vc.edges[i] == e) return vc.sets[i];
    throw std::logic_error("edge not at vertex");
}

} // namespace detail

/// One half-edge coloring of a cover: a color arrangement at every vertex and its total sign.
struct Coloring {
    std::vector<VertexColoring> at;  // indexed by VertexId
    int sign = 1;
};

/// Explicit enumeration of all colorings of a cover. Capped by max_colorings.
template <typename T>
std::vector<Coloring> enumerate_colorings(const EmbeddedGraph<T>& g, const Cover& m,
                                          const OracleLimits& lim = OracleLimits::from_env()) {
    std::vector<std::vector<VertexColoring>> per(g.num_vertices());
    double total = 1;
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        per[v] = detail::vertex_colorings(g, v, m);
        total *= static_cast<double>(per[v].size());
    }
    if (total > static_cast<double>(lim.max_colorings))
        throw cap_exceeded("more than " + std::to_string(lim.max_colorings) + " colorings");
    std::vector<Coloring> out;
    Coloring cur;
    cur.at.resize(g.num_vertices());
    std::function<void(VertexId, int)> rec = [&](VertexId v, int sign) {
        if (v == g.num_vertices()) {
            cur.sign = sign;
            out.push_back(cur);
            return;
        }
        for (const auto& vc : per[v]) {
            cur.at[v] = vc;
            rec(v + 1, sign * vc.sign);
        }
    };
    rec(0, 1);
    return out;
}

/// Contribution of one coloring: sign times the product over edges of the minor with rows the
/// white-side colors and columns the black-side colors.
template <typename T>
T coloring_term(const EmbeddedGraph<T>& g, const Cover& m, const Coloring& c, bool transpose = false) {
    T term = scalar_traits<T>::from_int(c.sign);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        if (m[e] == 0) continue;
        const auto& ed = g.edge(e);
        term *= detail::edge_minor(ed.weight, detail::set_for<T>(c.at[ed.white], e), detail::set_for<T>(c.at[ed.black], e),
                                   transpose);
    }
    return term;
}

/// Cover weight: the signed sum over all colorings. Evaluated by enumerating the joint
/// arrangements on one color class; the other class then factorizes vertex by vertex.
template <typename T>
T cover_weight(const EmbeddedGraph<T>& g, const Cover& m, const OracleLimits& lim = OracleLimits::from_env()) {
    using tr = scalar_traits<T>;
    std::vector<std::vector<VertexColoring>> per(g.num_vertices());
    double joint_white = 1, joint_black = 1;
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        per[v] = detail::vertex_colorings(g, v, m);
        (g.vertex(v).color == Color::white ? joint_white : joint_black) *= static_cast<double>(per[v].size());
    }
    const Color outer = joint_white <= joint_black ? Color::white : Color::black;
    std::vector<VertexId> outer_v, inner_v;
    for (VertexId v = 0; v < g.num_vertices(); ++v) (g.vertex(v).color == outer ? outer_v : inner_v).push_back(v);
    const double joint = std::min(joint_white, joint_black);
    if (joint * static_cast<double>(std::max<std::size_t>(inner_v.size(), 1)) > static_cast<double>(lim.max_colorings))
        throw cap_exceeded("cover weight needs more than " + std::to_string(lim.max_colorings) + " terms");

    std::vector<const VertexColoring*> chosen(g.num_vertices(), nullptr);
    T total = tr::zero();
    std::function<void(std::size_t, int)> rec = [&](std::size_t k, int sign) {
        if (k == outer_v.size()) {
            T prod = tr::from_int(sign);
            for (VertexId v : inner_v) {
                T sum = tr::zero();
                for (const auto& vc : per[v]) {
                    T t = tr::from_int(vc.sign);
                    for (std::size_t i = 0; i < vc.edges.size() && !tr::is_zero(t); ++i) {
                        const EdgeId e = vc.edges[i];
                        if (m[e] == 0) continue;
                        const auto& ed = g.edge(e);
                        const auto& other = detail::set_for<T>(*chosen[g.other_end(e, v)], e);
                        t *= outer == Color::white ? detail::edge_minor(ed.weight, other, vc.sets[i], lim.transpose_minors)
                                                   : detail::edge_minor(ed.weight, vc.sets[i], other, lim.transpose_minors);
                    }
                    sum += t;
                }
                prod *= sum;
                if (tr::is_zero(prod)) break;
            }
            total += prod;
            return;
        }
        const VertexId v = outer_v[k];
        for (const auto& vc : per[v]) {
            chosen[v] = &vc;
            rec(k + 1, sign * vc.sign);
        }
    };
    rec(0, 1);
    return total;
}

/// Covers paired with their weights, in enumeration order.
template <typename T>
struct WeightedCovers {
    std::vector<Cover> covers;
    std::vector<T> weights;
    T Z;
};

template <typename T>
WeightedCovers<T> weighted_covers(const EmbeddedGraph<T>& g, const OracleLimits& lim = OracleLimits::from_env()) {
    WeightedCovers<T> out;
    out.covers = enumerate_covers(g, lim);
    out.Z = scalar_traits<T>::zero();
    for (const auto& c : out.covers) {
        out.weights.push_back(cover_weight(g, c, lim));
        out.Z += out.weights.back();
    }
    return out;
}

template <typename T>
T oracle_partition(const EmbeddedGraph<T>& g, const OracleLimits& lim = OracleLimits::from_env()) {
    return weighted_covers(g, lim).Z;
}

/// Pr[m_e = k] for k = 0..min(n_w, n_b).
template <Field T>
std::vector<T> oracle_distribution(const EmbeddedGraph<T>& g, EdgeId e, const WeightedCovers<T>& wc) {
    const auto& ed = g.edge(e);
    std::vector<T> pmf(std::min(g.vertex(ed.white).multiplicity, g.vertex(ed.black).multiplicity) + 1,
                       scalar_traits<T>::zero());
    if (scalar_traits<T>::is_zero(wc.Z)) throw singular_matrix("partition function is zero");
    for (std::size_t i = 0; i < wc.covers.size(); ++i) pmf.at(wc.covers[i][e]) += wc.weights[i];
    for (auto& p : pmf) p /= wc.Z;
    return pmf;
}

template <Field T>
std::vector<T> oracle_distribution(const EmbeddedGraph<T>& g, EdgeId e) {
    return oracle_distribution(g, e, weighted_covers(g));
}

/// E[prod_i m_{e_i}^{p_i}] by direct summation; edges may repeat.
template <Field T>
T oracle_product_expectation(const WeightedCovers<T>& wc, const std::vector<EdgeId>& edges) {
    if (scalar_traits<T>::is_zero(wc.Z)) throw singular_matrix("partition function is zero");
    T acc = scalar_traits<T>::zero();
    for (std::size_t i = 0; i < wc.covers.size(); ++i) {
        T t = wc.weights[i];
        for (EdgeId e : edges) t *= scalar_traits<T>::from_int(static_cast<long>(wc.covers[i][e]));
        acc += t;
    }
    return acc / wc.Z;
}

template <Field T>
T oracle_product_expectation(const EmbeddedGraph<T>& g, const std::vector<EdgeId>& edges) {
    return oracle_product_expectation(weighted_covers(g), edges);
}

/// E[m_e^N].
template <Field T>
T oracle_moment(const WeightedCovers<T>& wc, EdgeId e, unsigned N) {
    return oracle_product_expectation(wc, std::vector<EdgeId>(N, e));
}

/// Joint law of the multiplicities of the given edges.
template <Field T>
std::map<std::vector<std::size_t>, T> oracle_joint_distribution(const WeightedCovers<T>& wc,
                                                                const std::vector<EdgeId>& edges) {
    std::map<std::vector<std::size_t>, T> out;
    for (std::size_t i = 0; i < wc.covers.size(); ++i) {
        std::vector<std::size_t> key;
        for (EdgeId e : edges) key.push_back(wc.covers[i][e]);
        auto [it, ins] = out.try_emplace(key, scalar_traits<T>::zero());
        it->second += wc.weights[i];
    }
    for (auto& [k, v] : out) v /= wc.Z;
    return out;
}

/// Assembles K and checks |det K| against the enumerated partition function.
template <typename T>
KasteleynSystem<T> certified_system(const EmbeddedGraph<T>& g, const OracleLimits& lim = OracleLimits::from_env()) {
    auto sys = assemble(g);
    const T z = oracle_partition(g, lim);
    const T d = sys.partition_function();
    // signed weights can make the enumerated sum negative; the determinant only fixes |Z|
    if (!(d == z || d == T(-z)))
        throw certificate_mismatch("|det K| = " + scalar_traits<T>::to_string(d) + " but enumeration gives Z = " +
                                   scalar_traits<T>::to_string(z));
    return sys;
}

} // namespace dimerlab

#endif
