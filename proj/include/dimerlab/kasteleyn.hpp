#ifndef DIMERLAB_KASTELEYN_HPP
#define DIMERLAB_KASTELEYN_HPP

#include <dimerlab/graph.hpp>

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace dimerlab {

/// Edge signs, +1 or -1, indexed by EdgeId.
using Connection = std::vector<int>;

/// Required parity of a bounded face: the product of signs must be (-1)^(l-1+k), with 2l the
/// boundary walk length and k the inward cilia at even-multiplicity vertices. For uniform n this
/// is the usual rule (k counts every inward cilium when n is even, none when n is odd).
template <typename T>
int face_parity(const EmbeddedGraph<T>& g, FaceId f) {
    const Face& face = g.face(f);
    const std::size_t ell = face.length() / 2;
    return static_cast<int>((ell + 1 + face.inward_cilia_even) % 2);
}

/// Bounded faces whose sign product violates the parity rule.
template <typename T>
std::vector<FaceId> violated_faces(const EmbeddedGraph<T>& g, const Connection& eps) {
    std::vector<FaceId> bad;
    for (FaceId f : g.bounded_faces()) {
        int odd = 0;
        for (const Dart& d : g.face(f).boundary) odd ^= eps.at(d.edge) < 0 ? 1 : 0;
        if (odd != face_parity(g, f)) bad.push_back(f);
    }
    return bad;
}

/// GF(2) elimination, one equation per bounded face. Pivots are taken from the highest edge
/// index down and free edges get +1, so the result depends only on the edge order.
template <typename T>
Connection solve_signs(const EmbeddedGraph<T>& g) {
    const std::size_t ne = g.num_edges();
    const std::size_t words = (ne + 64) / 64;  // one extra bit column for the right-hand side
    auto get = [](const std::vector<std::uint64_t>& r, std::size_t c) { return (r[c / 64] >> (c % 64)) & 1u; };
    auto flip = [](std::vector<std::uint64_t>& r, std::size_t c) { r[c / 64] ^= std::uint64_t{1} << (c % 64); };

    std::vector<std::vector<std::uint64_t>> rows;
    for (FaceId f : g.bounded_faces()) {
        std::vector<std::uint64_t> r(words, 0);
        for (const Dart& d : g.face(f).boundary) flip(r, d.edge);
        if (face_parity(g, f)) flip(r, ne);
        rows.push_back(std::move(r));
    }
    std::vector<bool> is_pivot_row(rows.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (column, row)
    for (std::size_t col = ne; col-- > 0;) {
        std::size_t pr = rows.size();
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (!is_pivot_row[r] && get(rows[r], col)) {
                pr = r;
                break;
            }
        if (pr == rows.size()) continue;
        is_pivot_row[pr] = true;
        pivots.push_back({col, pr});
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != pr && get(rows[r], col))
                for (std::size_t w = 0; w < words; ++w) rows[r][w] ^= rows[pr][w];
    }
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (!is_pivot_row[r] && get(rows[r], ne))
            throw input_error("Kasteleyn sign system is infeasible; the embedding is not planar as given");
    Connection eps(ne, 1);
    for (auto [col, r] : pivots)
        if (get(rows[r], ne)) eps[col] = -1;
    return eps;
}

/// Signs stored on the edges, when every edge carries one.
template <typename T>
std::optional<Connection> supplied_signs(const EmbeddedGraph<T>& g) {
    Connection eps(g.num_edges(), 1);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        if (!g.edge(e).sign) return std::nullopt;
        eps[e] = *g.edge(e).sign;
    }
    return eps;
}

/// Block Kasteleyn matrix with rows indexed by white vertices and columns by black vertices.
/// The inverse is computed on first request and shared by copies.
template <typename T>
class KasteleynSystem {
public:
    KasteleynSystem(EmbeddedGraph<T> graph, Connection eps)
        : graph_(std::make_shared<const EmbeddedGraph<T>>(std::move(graph))),
          eps_(std::move(eps)),
          cache_(std::make_shared<Cache>()) {
        const auto& g = *graph_;
        if (eps_.size() != g.num_edges()) throw input_error("connection size does not match edge count");
        std::vector<std::size_t> rs, cs;
        index_.assign(g.num_vertices(), 0);
        for (VertexId v = 0; v < g.num_vertices(); ++v) {
            const auto& vx = g.vertex(v);
            if (vx.color == Color::white) {
                index_[v] = rs.size();
                rs.push_back(vx.multiplicity);
                whites_.push_back(v);
            } else {
                index_[v] = cs.size();
                cs.push_back(vx.multiplicity);
                blacks_.push_back(v);
            }
        }
        if (g.white_total() != g.black_total()) throw input_error("Kasteleyn matrix would not be square");
        k_ = BlockMatrix<T>(rs, cs);
        for (EdgeId e = 0; e < g.num_edges(); ++e) {
            const auto& ed = g.edge(e);
            Matrix<T> w = ed.weight;
            if (eps_[e] < 0) w = -w;
            k_.add_to_block(index_[ed.white], index_[ed.black], w);
        }
    }

    const EmbeddedGraph<T>& graph() const { return *graph_; }
    const Connection& connection() const { return eps_; }
    const BlockMatrix<T>& K() const { return k_; }

    /// Block index of a vertex among vertices of its own color.
    std::size_t block_index(VertexId v) const { return index_.at(v); }
    const std::vector<VertexId>& whites() const { return whites_; }
    const std::vector<VertexId>& blacks() const { return blacks_; }

    /// K_{[w],[b]}.
    Matrix<T> k_block(VertexId w, VertexId b) const { return k_.block(index_.at(w), index_.at(b)); }

    T det_K() const {
        std::call_once(cache_->det_once, [&] { cache_->det = det(k_.flat()); });
        return *cache_->det;
    }

    /// |det K|.
    T partition_function() const
        requires scalar_traits<T>::is_ordered
    {
        T d = det_K();
        return d < 0 ? T(-d) : d;
    }

    /// The whole inverse, blocked with black rows and white columns.
    const BlockMatrix<T>& inverse_matrix() const
        requires Field<T>
    {
        std::call_once(cache_->inv_once, [&] {
            cache_->inv.emplace(k_.col_sizes(), k_.row_sizes(), inverse(k_.flat()));
        });
        return *cache_->inv;
    }

    /// K^{[b],[w]}, the (b, w) block of K^{-1}. Throws singular_matrix if det K = 0.
    Matrix<T> inverse_block(VertexId b, VertexId w) const
        requires Field<T>
    {
        if (graph_->vertex(b).color != Color::black || graph_->vertex(w).color != Color::white)
            throw input_error("inverse_block expects (black, white)");
        return inverse_matrix().block(index_.at(b), index_.at(w));
    }

private:
    struct Cache {
        std::once_flag det_once, inv_once;
        std::optional<T> det;
        std::optional<BlockMatrix<T>> inv;
    };

    std::shared_ptr<const EmbeddedGraph<T>> graph_;
    Connection eps_;
    std::vector<std::size_t> index_;
    std::vector<VertexId> whites_, blacks_;
    BlockMatrix<T> k_;
    std::shared_ptr<Cache> cache_;
};

/// Solves the sign system (or uses signs supplied on every edge) and assembles K.
template <typename T>
KasteleynSystem<T> assemble(const EmbeddedGraph<T>& g) {
    if (auto s = supplied_signs(g)) return KasteleynSystem<T>(g, *s);
    return KasteleynSystem<T>(g, solve_signs(g));
}

template <typename T>
KasteleynSystem<T> assemble(const EmbeddedGraph<T>& g, Connection eps) {
    return KasteleynSystem<T>(g, std::move(eps));
}

template <typename T>
T partition_function(const KasteleynSystem<T>& sys) {
    return sys.partition_function();
}

} // namespace dimerlab

#endif
