#ifndef DIMERLAB_MOVES_HPP
#define DIMERLAB_MOVES_HPP

#include <dimerlab/graph.hpp>
#include <dimerlab/kasteleyn.hpp>
#include <dimerlab/statistics.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dimerlab {

/// Multiplies every edge weight at v by M: on the left at a white vertex, on the right at a black one.
template <Field T>
EmbeddedGraph<T> gauge(const EmbeddedGraph<T>& g, VertexId v, const Matrix<T>& M) {
    const std::size_t n = g.vertex(v).multiplicity;
    if (M.rows() != n || M.cols() != n) throw input_error("gauge matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    if (scalar_traits<T>::is_zero(det(M))) throw singular_matrix("gauge matrix is singular");
    EmbeddedGraph<T> out = g;
    for (EdgeId e : g.vertex(v).rotation) {
        const auto& w = g.edge(e).weight;
        out.set_weight(e, g.vertex(v).color == Color::white ? M * w : w * M);
    }
    out.finalize();
    return out;
}

/// Gauges at the far end of e from `keep` so that e carries the identity. Returns det of the
/// gauge matrix (the factor picked up by Z).
template <Field T>
T gauge_edge_to_identity(EmbeddedGraph<T>& g, EdgeId e, VertexId at) {
    const auto& w = g.edge(e).weight;
    if (!w.is_square()) throw input_error("edge '" + g.edge(e).name + "' is not square and cannot be gauged to I");
    const Matrix<T> m = inverse(w);
    g = gauge(g, at, m);
    return det(m);
}

enum class MoveKind { leaf_trim, parallel_reduce, contract, square };

inline const char* move_name(MoveKind k) {
    switch (k) {
        case MoveKind::leaf_trim: return "leaf_trim";
        case MoveKind::parallel_reduce: return "parallel_reduce";
        case MoveKind::contract: return "contract";
        default: return "square";
    }
}

/// Record of one local move. `before` is the input after gauging the designated edges to the
/// identity: Z(before) = normalization * Z(original) and Z(after) = factor * Z(before), with Z
/// taken as |det K|. edge_map sends surviving edges of `before` to their ids in `after`.
template <typename T>
struct MoveCertificate {
    MoveKind kind;
    EmbeddedGraph<T> original;
    EmbeddedGraph<T> before;
    EmbeddedGraph<T> after;
    T factor;
    T normalization;
    std::vector<std::optional<EdgeId>> edge_map;
    Connection before_signs;
    Connection after_signs;  // signs read off the elimination, valid for the cilia of `after`
    std::vector<EdgeId> merged;  // parallel edges of `before` now carried by one edge
};

namespace detail {

/// Mutable working copy used to build the graph produced by a move.
template <typename T>
struct Draft {
    std::vector<Vertex> v;
    std::vector<Edge<T>> e;
    std::vector<bool> v_alive, e_alive;
    Connection eps;
    std::optional<Dart> witness_hint;
    std::vector<Dart> outer_darts;

    explicit Draft(const EmbeddedGraph<T>& g, Connection signs) : v(g.vertices()), e(g.edges()), eps(std::move(signs)) {
        v_alive.assign(v.size(), true);
        e_alive.assign(e.size(), true);
        for (auto& ed : e) ed.sign.reset();
        if (g.num_faces() > 0) outer_darts = g.face(g.outer_face()).boundary;
    }

    VertexId add_vertex(std::string name, Color c, std::size_t n) {
        Vertex x;
        x.name = std::move(name);
        x.color = c;
        x.multiplicity = n;
        v.push_back(x);
        v_alive.push_back(true);
        return v.size() - 1;
    }
    EdgeId add_edge(std::string name, VertexId w, VertexId b, Matrix<T> wt, int sign) {
        Edge<T> x;
        x.name = std::move(name);
        x.white = w;
        x.black = b;
        x.weight = std::move(wt);
        e.push_back(x);
        e_alive.push_back(true);
        eps.push_back(sign);
        return e.size() - 1;
    }

    std::size_t slot(VertexId x, EdgeId id) const {
        const auto& r = v[x].rotation;
        return static_cast<std::size_t>(std::find(r.begin(), r.end(), id) - r.begin());
    }

    /// Drops one slot from a rotation; the cilium keeps pointing at the same gap.
    void remove_slot(VertexId x, std::size_t s) {
        auto& vx = v[x];
        vx.rotation.erase(vx.rotation.begin() + static_cast<long>(s));
        if (s < vx.cilium) --vx.cilium;
        if (vx.rotation.empty()) vx.cilium = 0;
        else vx.cilium %= vx.rotation.size();
    }

    void remove_edge(EdgeId id) {
        if (!e_alive[id]) return;
        e_alive[id] = false;
        for (VertexId end : {e[id].white, e[id].black})
            if (v_alive[end]) {
                const std::size_t s = slot(end, id);
                if (s < v[end].rotation.size()) remove_slot(end, s);
            }
    }

    void remove_vertex(VertexId x) {
        for (EdgeId id : std::vector<EdgeId>(v[x].rotation)) remove_edge(id);
        v_alive[x] = false;
    }

    struct Compiled {
        EmbeddedGraph<T> g;
        std::vector<std::optional<VertexId>> vmap;
        std::vector<std::optional<EdgeId>> emap;
        Connection eps;
    };

    Compiled compile() const {
        Compiled out;
        out.vmap.assign(v.size(), std::nullopt);
        out.emap.assign(e.size(), std::nullopt);
        for (VertexId x = 0; x < v.size(); ++x)
            if (v_alive[x]) out.vmap[x] = out.g.add_vertex(v[x].name, v[x].color, v[x].multiplicity);
        for (EdgeId id = 0; id < e.size(); ++id)
            if (e_alive[id]) {
                if (!out.vmap[e[id].white] || !out.vmap[e[id].black]) throw std::logic_error("edge to removed vertex");
                out.emap[id] = out.g.add_edge(e[id].name, *out.vmap[e[id].white], *out.vmap[e[id].black], e[id].weight, false);
                out.eps.push_back(eps[id]);
            }
        for (VertexId x = 0; x < v.size(); ++x) {
            if (!v_alive[x]) continue;
            std::vector<EdgeId> rot;
            for (EdgeId id : v[x].rotation) rot.push_back(*out.emap.at(id));
            out.g.set_rotation(*out.vmap[x], rot);
            out.g.set_cilium(*out.vmap[x], v[x].cilium);
        }
        for (const Dart& d : outer_darts)
            if (out.emap[d.edge]) {
                out.g.set_outer_witness(Dart{*out.emap[d.edge], d.side});
                break;
            }
        if (witness_hint && out.emap[witness_hint->edge])
            out.g.set_outer_witness(Dart{*out.emap[witness_hint->edge], witness_hint->side});
        return out;
    }
};

/// Chooses cilia at the listed vertices (even multiplicity only matters) so that the signs
/// read off the elimination satisfy the face rule on the new graph. Current cilia are tried first.
template <typename T>
void fit_cilia(EmbeddedGraph<T>& g, const Connection& eps, std::vector<VertexId> picture) {
    g.finalize();
    if (violated_faces(g, eps).empty()) return;
    std::sort(picture.begin(), picture.end());
    picture.erase(std::unique(picture.begin(), picture.end()), picture.end());
    std::vector<VertexId> free;
    for (VertexId x : picture)
        if (g.vertex(x).multiplicity % 2 == 0 && g.degree(x) > 1) free.push_back(x);
    std::vector<std::size_t> start(free.size());
    for (std::size_t i = 0; i < free.size(); ++i) start[i] = g.vertex(free[i]).cilium;
    std::size_t combos = 1;
    for (VertexId x : free) combos *= g.degree(x);
    if (combos > 200000) throw certificate_mismatch("too many cilium choices to search after move");
    for (std::size_t k = 1; k < combos; ++k) {
        std::size_t r = k;
        for (std::size_t i = 0; i < free.size(); ++i) {
            const std::size_t d = g.degree(free[i]);
            g.set_cilium(free[i], (start[i] + r % d) % d);
            r /= d;
        }
        g.finalize();
        if (violated_faces(g, eps).empty()) return;
    }
    throw certificate_mismatch("no cilium choice makes the eliminated signs a Kasteleyn connection");
}

template <Field T>
T abs_det(const KasteleynSystem<T>& s) {
    T d = s.det_K();
    return d < 0 ? T(-d) : d;
}

template <Field T>
MoveCertificate<T> finish(MoveKind kind, const EmbeddedGraph<T>& original, const EmbeddedGraph<T>& before,
                          const Connection& before_eps, T normalization, T factor, const Draft<T>& draft,
                          const std::vector<VertexId>& picture_draft_ids) {
    auto c = draft.compile();
    std::vector<VertexId> picture;
    for (VertexId x : picture_draft_ids)
        if (x < c.vmap.size() && c.vmap[x]) picture.push_back(*c.vmap[x]);
    if (c.g.num_vertices() > 0) fit_cilia(c.g, c.eps, picture);
    c.g.finalize();

    const KasteleynSystem<T> sb(before, before_eps);
    const KasteleynSystem<T> sa = assemble(c.g);
    const T lhs = abs_det(sa);
    T rhs = factor * abs_det(sb);
    if (rhs < 0) rhs = -rhs;
    if (!(lhs == rhs))
        throw certificate_mismatch(std::string(move_name(kind)) + ": |det K'| = " + scalar_traits<T>::to_string(lhs) +
                                   " but factor * |det K| = " + scalar_traits<T>::to_string(rhs));
    std::vector<std::optional<EdgeId>> emap(before.num_edges());
    for (EdgeId id = 0; id < before.num_edges(); ++id) emap[id] = c.emap[id];
    return MoveCertificate<T>{kind, original, before, c.g, factor, normalization, emap, before_eps, c.eps, {}};
}

template <typename T>
Connection signs_of(const EmbeddedGraph<T>& g) {
    if (auto s = supplied_signs(g)) return *s;
    return solve_signs(g);
}

} // namespace detail

/// Type (i): the edge has an endpoint of degree 1. The leaf edge is gauged to I at the leaf,
/// then the leaf and its partner are removed together with all edges at the partner.
template <Field T>
MoveCertificate<T> leaf_trim(const EmbeddedGraph<T>& g, EdgeId edge) {
    const auto& ed = g.edge(edge);
    VertexId leaf, partner;
    if (g.degree(ed.black) == 1) {
        leaf = ed.black;
        partner = ed.white;
    } else if (g.degree(ed.white) == 1) {
        leaf = ed.white;
        partner = ed.black;
    } else {
        throw input_error("leaf_trim: edge '" + ed.name + "' has no endpoint of degree 1");
    }
    if (g.vertex(leaf).multiplicity != g.vertex(partner).multiplicity)
        throw input_error("leaf_trim: leaf and partner multiplicities differ");
    EmbeddedGraph<T> before = g;
    const T norm = gauge_edge_to_identity(before, edge, leaf);
    const Connection eps = detail::signs_of(before);
    detail::Draft<T> d(before, eps);
    std::vector<VertexId> picture;
    for (EdgeId id : before.vertex(partner).rotation) picture.push_back(before.other_end(id, partner));
    d.remove_vertex(partner);
    d.remove_vertex(leaf);
    picture.erase(std::remove(picture.begin(), picture.end(), leaf), picture.end());
    return detail::finish(MoveKind::leaf_trim, g, before, eps, norm, scalar_traits<T>::one(), d, picture);
}

/// Type (ii): all edges between w and b (at least two, consecutive in both rotations) become
/// one edge in the slot of the first, carrying the sum of their signed weights.
template <Field T>
MoveCertificate<T> parallel_reduce(const EmbeddedGraph<T>& g, VertexId w, VertexId b) {
    if (g.vertex(w).color != Color::white || g.vertex(b).color != Color::black)
        throw input_error("parallel_reduce expects (white, black)");
    std::vector<EdgeId> par;
    for (EdgeId id : g.vertex(w).rotation)
        if (g.edge(id).black == b) par.push_back(id);
    if (par.size() < 2) throw input_error("parallel_reduce: fewer than two parallel edges");
    const Connection eps = detail::signs_of(g);
    // parallels must be consecutive around both endpoints
    for (VertexId x : {w, b}) {
        const auto& rot = g.vertex(x).rotation;
        const std::size_t dg = rot.size();
        std::size_t runs = 0;
        for (std::size_t s = 0; s < dg; ++s) {
            const bool in = std::count(par.begin(), par.end(), rot[s]) > 0;
            const bool prev_in = std::count(par.begin(), par.end(), rot[(s + dg - 1) % dg]) > 0;
            if (in && !prev_in) ++runs;
        }
        if (runs > 1 && par.size() < dg)
            throw input_error("parallel_reduce: parallel edges are separated by other edges at '" + g.vertex(x).name + "'");
    }
    detail::Draft<T> d(g, eps);
    const EdgeId keep = *std::min_element(par.begin(), par.end());
    Matrix<T> sum(g.vertex(w).multiplicity, g.vertex(b).multiplicity);
    for (EdgeId id : par) sum += eps[id] < 0 ? Matrix<T>(-g.edge(id).weight) : g.edge(id).weight;
    d.e[keep].weight = eps[keep] < 0 ? Matrix<T>(-sum) : sum;
    for (EdgeId id : par)
        if (id != keep) d.remove_edge(id);
    auto cert = detail::finish(MoveKind::parallel_reduce, g, g, eps, scalar_traits<T>::one(), scalar_traits<T>::one(), d,
                               {w, b});
    std::sort(par.begin(), par.end());
    const EdgeId merged_to = *cert.edge_map[keep];
    for (EdgeId id : par) cert.edge_map[id] = merged_to;
    cert.merged = par;
    return cert;
}

/// Type (iii): a degree-2 vertex c with distinct neighbours x (first in c's rotation) and y.
/// Both edges are gauged to I at x and y, then c, x, y become one vertex whose rotation is
/// x's edges after the edge to c followed by y's edges after the edge to c. Shared neighbours
/// of x and y produce parallel edges.
template <Field T>
MoveCertificate<T> contract(const EmbeddedGraph<T>& g, VertexId center) {
    if (g.degree(center) != 2) throw input_error("contract: vertex '" + g.vertex(center).name + "' does not have degree 2");
    const EdgeId e1 = g.vertex(center).rotation[0], e2 = g.vertex(center).rotation[1];
    const VertexId x = g.other_end(e1, center), y = g.other_end(e2, center);
    if (x == y) throw input_error("contract: both edges go to the same vertex; reduce parallels first");
    const std::size_t n = g.vertex(center).multiplicity;
    if (g.vertex(x).multiplicity != n || g.vertex(y).multiplicity != n)
        throw input_error("contract: multiplicities at the center and its neighbours differ");
    EmbeddedGraph<T> before = g;
    T norm = gauge_edge_to_identity(before, e1, x);
    norm *= gauge_edge_to_identity(before, e2, y);
    const Connection eps = detail::signs_of(before);
    detail::Draft<T> d(before, eps);
    // the merged vertex reuses x; edges from x pick up -eps(e1) eps(e2)
    const int flip = -eps[e1] * eps[e2];
    std::vector<EdgeId> rot;
    auto tail_after = [&](VertexId v, EdgeId skip) {
        const auto& r = before.vertex(v).rotation;
        const std::size_t s = before.slot_of(v, skip);
        for (std::size_t k = 1; k < r.size(); ++k) rot.push_back(r[(s + k) % r.size()]);
    };
    tail_after(x, e1);
    tail_after(y, e2);
    for (EdgeId id : before.vertex(x).rotation)
        if (id != e1) d.eps[id] *= flip;
    for (EdgeId id : before.vertex(y).rotation) {
        if (id == e2) continue;
        if (before.vertex(y).color == Color::white) d.e[id].white = x;
        else d.e[id].black = x;
    }
    d.e_alive[e1] = d.e_alive[e2] = false;
    d.v_alive[center] = d.v_alive[y] = false;
    d.v[x].rotation = rot;
    d.v[x].cilium = 0;
    d.v[x].name = before.vertex(x).name + "+" + before.vertex(y).name;
    return detail::finish(MoveKind::contract, g, before, eps, norm, scalar_traits<T>::one(), d, {x});
}

/// Corners of a bounded quadrilateral face in the layout b_BL, w_BR, b_TR, w_TL (ccw), with
/// a = (w_TL, b_BL), b = (w_BR, b_BL), c = (w_BR, b_TR), d = (w_TL, b_TR).
struct SquareFace {
    VertexId bBL, wBR, bTR, wTL;
    EdgeId a, b, c, d;
};

template <typename T>
SquareFace square_face(const EmbeddedGraph<T>& g, FaceId f) {
    if (f == g.outer_face()) throw input_error("square move needs a bounded face");
    const Face& face = g.face(f);
    if (face.length() != 4) throw input_error("square move needs a face of length 4");
    std::size_t k = 0;
    while (g.vertex(g.tail(face.boundary[k])).color != Color::black) ++k;
    const Dart d0 = face.boundary[k], d1 = face.boundary[(k + 1) % 4], d2 = face.boundary[(k + 2) % 4],
               d3 = face.boundary[(k + 3) % 4];
    SquareFace s{g.tail(d0), g.tail(d1), g.tail(d2), g.tail(d3), d3.edge, d0.edge, d1.edge, d2.edge};
    std::set<VertexId> distinct{s.bBL, s.wBR, s.bTR, s.wTL};
    if (distinct.size() != 4) throw input_error("square move needs four distinct vertices on the face");
    return s;
}

/// Type (iv): the spider / urban renewal move on a bounded 4-face. Z(after) = det[[A,B],[-D,C]] Z(before).
template <Field T>
MoveCertificate<T> square_move(const EmbeddedGraph<T>& g, FaceId f) {
    const SquareFace s = square_face(g, f);
    const std::size_t n = g.vertex(s.bBL).multiplicity;
    for (VertexId x : {s.wBR, s.bTR, s.wTL})
        if (g.vertex(x).multiplicity != n) throw input_error("square move needs equal multiplicities on the face");
    Connection eps = detail::signs_of(g);
    // flip signs at face vertices so a, b, c carry +1; the replacement paths then match
    // the parity of the faces across each edge
    auto flip_at = [&](VertexId v) {
        for (EdgeId id : g.vertex(v).rotation) eps[id] = -eps[id];
    };
    if (eps[s.a] < 0) flip_at(s.wTL);
    if (eps[s.b] < 0) flip_at(s.wBR);
    if (eps[s.c] < 0) flip_at(s.bTR);
    auto signed_w = [&](EdgeId id) { return eps[id] < 0 ? Matrix<T>(-g.edge(id).weight) : g.edge(id).weight; };
    // K restricted to the face is [[a, -d], [b, c]]
    const Matrix<T> a = signed_w(s.a), b = signed_w(s.b), c = signed_w(s.c), d = -signed_w(s.d);
    auto inv = [](const Matrix<T>& m, const char* what) {
        try {
            return inverse(m);
        } catch (const singular_matrix&) {
            throw singular_matrix(std::string("square move: ") + what + " is singular");
        }
    };
    const Matrix<T> ai = inv(a, "a"), bi = inv(b, "b"), ci = inv(c, "c"), di = inv(d, "d");
    const Matrix<T> A = inv(a + d * ci * b, "a + d c^-1 b");
    const Matrix<T> B = inv(b + c * di * a, "b + c d^-1 a");
    const Matrix<T> C = inv(c + b * ai * d, "c + b a^-1 d");
    const Matrix<T> D = inv(d + a * bi * c, "d + a b^-1 c");
    BlockMatrix<T> N({n, n}, {n, n});
    N.set_block(0, 0, A);
    N.set_block(0, 1, B);
    N.set_block(1, 0, -D);
    N.set_block(1, 1, C);
    const T factor = det(N.flat());

    detail::Draft<T> dr(g, eps);
    std::string prefix;
    for (int k = 0;; ++k) {
        prefix = "sq" + std::to_string(k) + ".";
        bool used = false;
        for (const auto& ed : g.edges()) used = used || ed.name.rfind(prefix, 0) == 0;
        if (!used) break;
    }
    const VertexId wBLn = dr.add_vertex(g.vertex(s.bBL).name + "'", Color::white, n);
    const VertexId bTLn = dr.add_vertex(g.vertex(s.wTL).name + "'", Color::black, n);
    const VertexId bBRn = dr.add_vertex(g.vertex(s.wBR).name + "'", Color::black, n);
    const VertexId wTRn = dr.add_vertex(g.vertex(s.bTR).name + "'", Color::white, n);
    const Matrix<T> I = Matrix<T>::identity(n);
    const EdgeId eA = dr.add_edge(prefix + "A", wBLn, bTLn, A, 1);
    const EdgeId eB = dr.add_edge(prefix + "B", wBLn, bBRn, B, 1);
    const EdgeId eC = dr.add_edge(prefix + "C", wTRn, bBRn, C, 1);
    const EdgeId eD = dr.add_edge(prefix + "D", wTRn, bTLn, D, -1);
    const EdgeId tl = dr.add_edge(prefix + "tl", s.wTL, bTLn, I, 1);
    const EdgeId br = dr.add_edge(prefix + "br", s.wBR, bBRn, I, 1);
    const EdgeId bl = dr.add_edge(prefix + "bl", wBLn, s.bBL, I, -1);
    const EdgeId tr = dr.add_edge(prefix + "tr", wTRn, s.bTR, I, -1);
    dr.v[wBLn].rotation = {eB, eA, bl};
    dr.v[bTLn].rotation = {eD, tl, eA};
    dr.v[bBRn].rotation = {eC, eB, br};
    dr.v[wTRn].rotation = {tr, eD, eC};
    // each old corner: the two face edges collapse into the connector
    auto splice = [&](VertexId x, EdgeId first, EdgeId second, EdgeId conn) {
        auto& r = dr.v[x].rotation;
        const std::size_t p1 = dr.slot(x, first), p2 = dr.slot(x, second);
        r[p1] = conn;
        dr.remove_slot(x, p2);
    };
    splice(s.bBL, s.a, s.b, bl);
    splice(s.wBR, s.b, s.c, br);
    splice(s.bTR, s.c, s.d, tr);
    splice(s.wTL, s.d, s.a, tl);
    dr.e_alive[s.a] = dr.e_alive[s.b] = dr.e_alive[s.c] = dr.e_alive[s.d] = false;
    return detail::finish(MoveKind::square, g, g, eps, scalar_traits<T>::one(), factor, dr,
                          {s.bBL, s.wBR, s.bTR, s.wTL, wBLn, bTLn, bBRn, wTRn});
}

/// Per-edge check that P_e is unchanged by a move, for every edge that survives it. Merged
/// parallels are checked as one entry: the P of the merged edge is the sum of their P.
struct InvarianceReport {
    std::vector<std::string> edges;
    std::vector<bool> equal;
    bool all() const { return std::all_of(equal.begin(), equal.end(), [](bool b) { return b; }); }
};

template <Field T>
InvarianceReport verify_move_invariance(const MoveCertificate<T>& cert) {
    InvarianceReport rep;
    const KasteleynSystem<T> sb(cert.before, cert.before_signs);
    const KasteleynSystem<T> sa = assemble(cert.after);
    for (EdgeId e = 0; e < cert.before.num_edges(); ++e) {
        if (!cert.edge_map[e] || std::count(cert.merged.begin(), cert.merged.end(), e)) continue;
        rep.edges.push_back(cert.before.edge(e).name);
        rep.equal.push_back(probability_matrix(sb, e) == probability_matrix(sa, *cert.edge_map[e]));
    }
    if (!cert.merged.empty()) {
        std::string name;
        Matrix<T> sum = probability_matrix(sb, cert.merged[0]);
        for (std::size_t i = 1; i < cert.merged.size(); ++i) sum += probability_matrix(sb, cert.merged[i]);
        for (EdgeId e : cert.merged) name += (name.empty() ? "" : "+") + cert.before.edge(e).name;
        rep.edges.push_back(name);
        rep.equal.push_back(sum == probability_matrix(sa, *cert.edge_map[cert.merged[0]]));
    }
    return rep;
}

/// P_e of one edge before and after, compared exactly.
template <Field T>
bool verify_move_invariance(const MoveCertificate<T>& cert, EdgeId before_edge) {
    if (!cert.edge_map.at(before_edge)) throw input_error("edge does not survive the move");
    if (std::count(cert.merged.begin(), cert.merged.end(), before_edge))
        throw input_error("edge was merged with its parallels; compare the sum");
    const KasteleynSystem<T> sb(cert.before, cert.before_signs);
    const KasteleynSystem<T> sa = assemble(cert.after);
    return probability_matrix(sb, before_edge) == probability_matrix(sa, *cert.edge_map[before_edge]);
}

} // namespace dimerlab

#endif
