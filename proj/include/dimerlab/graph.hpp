#ifndef DIMERLAB_GRAPH_HPP
#define DIMERLAB_GRAPH_HPP

#include <dimerlab/errors.hpp>
#include <dimerlab/matrix.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dimerlab {

using VertexId = std::size_t;
using EdgeId = std::size_t;
using FaceId = std::size_t;

enum class Color { white, black };

inline const char* color_name(Color c) { return c == Color::white ? "white" : "black"; }

struct Vertex {
    std::string name;
    Color color = Color::white;
    std::size_t multiplicity = 1;
    std::vector<EdgeId> rotation;  // ccw
    std::size_t cilium = 0;        // corner between slots cilium-1 and cilium
};

template <typename T>
struct Edge {
    std::string name;
    VertexId white = 0;
    VertexId black = 0;
    Matrix<T> weight;
    std::optional<int> sign;  // user-supplied Kasteleyn sign, if any
};

/// Directed side of an edge. side 0 runs white -> black, side 1 black -> white.
struct Dart {
    EdgeId edge = 0;
    int side = 0;
    friend bool operator==(const Dart&, const Dart&) = default;
};

struct Corner {
    VertexId vertex = 0;
    std::size_t index = 0;
};

struct Face {
    std::vector<Dart> boundary;
    std::vector<Corner> corners;   // corners[i] sits at the head of boundary[i]
    std::size_t inward_cilia = 0;  // all cilia pointing into this face
    std::size_t inward_cilia_even = 0;  // those at even-multiplicity vertices
    std::size_t length() const { return boundary.size(); }
};

/// Planar bipartite ciliated graph with a rotation system and matrix edge weights.
/// Built by adding vertices and edges, then calling finalize(); read-only afterwards.
template <typename T>
class EmbeddedGraph {
public:
    using scalar_type = T;

    VertexId add_vertex(std::string name, Color color, std::size_t multiplicity) {
        Vertex v;
        v.name = name.empty() ? "v" + std::to_string(vertices_.size()) : std::move(name);
        v.color = color;
        v.multiplicity = multiplicity;
        vertices_.push_back(std::move(v));
        finalized_ = false;
        return vertices_.size() - 1;
    }

    /// Adds an edge; it is appended to both endpoint rotations unless append_to_rotation is false.
    EdgeId add_edge(std::string name, VertexId white, VertexId black, Matrix<T> weight, bool append_to_rotation = true) {
        if (white >= vertices_.size() || black >= vertices_.size()) throw input_error("edge endpoint out of range");
        Edge<T> e;
        e.name = name.empty() ? "e" + std::to_string(edges_.size()) : std::move(name);
        e.white = white;
        e.black = black;
        e.weight = std::move(weight);
        edges_.push_back(std::move(e));
        const EdgeId id = edges_.size() - 1;
        if (append_to_rotation) {
            vertices_[white].rotation.push_back(id);
            vertices_[black].rotation.push_back(id);
        }
        finalized_ = false;
        return id;
    }

    void set_rotation(VertexId v, std::vector<EdgeId> rot) {
        vertices_.at(v).rotation = std::move(rot);
        finalized_ = false;
    }
    void set_cilium(VertexId v, std::size_t corner) {
        vertices_.at(v).cilium = corner;
        finalized_ = false;
    }
    void set_weight(EdgeId e, Matrix<T> w) { edges_.at(e).weight = std::move(w); }
    void set_sign(EdgeId e, std::optional<int> s) { edges_.at(e).sign = s; }
    void set_edge_name(EdgeId e, std::string name) { edges_.at(e).name = std::move(name); }
    void set_outer_witness(Dart d) {
        outer_witness_ = d;
        finalized_ = false;
    }
    void clear_outer_witness() {
        outer_witness_.reset();
        finalized_ = false;
    }

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_edges() const { return edges_.size(); }
    std::size_t num_faces() const { return faces_.size(); }
    const Vertex& vertex(VertexId v) const { return vertices_.at(v); }
    const Edge<T>& edge(EdgeId e) const { return edges_.at(e); }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge<T>>& edges() const { return edges_; }
    const std::optional<Dart>& outer_witness() const { return outer_witness_; }

    const std::vector<Face>& faces() const {
        require_finalized();
        return faces_;
    }
    const Face& face(FaceId f) const { return faces().at(f); }
    FaceId outer_face() const {
        require_finalized();
        return outer_;
    }
    std::vector<FaceId> bounded_faces() const {
        std::vector<FaceId> out;
        for (FaceId f = 0; f < faces().size(); ++f)
            if (f != outer_) out.push_back(f);
        return out;
    }
    FaceId face_of_dart(Dart d) const {
        require_finalized();
        return dart_face_.at(2 * d.edge + d.side);
    }
    FaceId face_of_corner(VertexId v, std::size_t corner) const {
        require_finalized();
        return corner_face_.at(v).at(corner);
    }
    bool finalized() const { return finalized_; }

    std::size_t degree(VertexId v) const { return vertices_.at(v).rotation.size(); }

    std::optional<EdgeId> find_edge(const std::string& name) const {
        for (EdgeId e = 0; e < edges_.size(); ++e)
            if (edges_[e].name == name) return e;
        return std::nullopt;
    }
    EdgeId edge_by_name(const std::string& name) const {
        auto e = find_edge(name);
        if (!e) throw input_error("no edge named '" + name + "'");
        return *e;
    }
    std::optional<VertexId> find_vertex(const std::string& name) const {
        for (VertexId v = 0; v < vertices_.size(); ++v)
            if (vertices_[v].name == name) return v;
        return std::nullopt;
    }
    VertexId vertex_by_name(const std::string& name) const {
        auto v = find_vertex(name);
        if (!v) throw input_error("no vertex named '" + name + "'");
        return *v;
    }

    /// Slot of edge e in the rotation of v.
    std::size_t slot_of(VertexId v, EdgeId e) const {
        const auto& rot = vertices_.at(v).rotation;
        auto it = std::find(rot.begin(), rot.end(), e);
        if (it == rot.end()) throw input_error("edge not incident to vertex");
        return static_cast<std::size_t>(it - rot.begin());
    }

    /// Incident edges in reading order: from the cilium ccw at black, cw at white.
    std::vector<EdgeId> linear_order(VertexId v) const {
        const Vertex& vx = vertices_.at(v);
        const std::size_t d = vx.rotation.size();
        std::vector<EdgeId> out;
        out.reserve(d);
        for (std::size_t k = 0; k < d; ++k) {
            std::size_t slot = vx.color == Color::black ? (vx.cilium + k) % d : (vx.cilium + d - 1 - k) % d;
            out.push_back(vx.rotation[slot]);
        }
        return out;
    }

    VertexId tail(Dart d) const { return d.side == 0 ? edges_.at(d.edge).white : edges_.at(d.edge).black; }
    VertexId head(Dart d) const { return d.side == 0 ? edges_.at(d.edge).black : edges_.at(d.edge).white; }
    VertexId other_end(EdgeId e, VertexId v) const {
        const auto& ed = edges_.at(e);
        return ed.white == v ? ed.black : ed.white;
    }

    std::size_t white_total() const { return total(Color::white); }
    std::size_t black_total() const { return total(Color::black); }
    bool uniform_multiplicity() const {
        for (const auto& v : vertices_)
            if (v.multiplicity != vertices_.front().multiplicity) return false;
        return true;
    }
    std::size_t max_multiplicity() const {
        std::size_t m = 0;
        for (const auto& v : vertices_) m = std::max(m, v.multiplicity);
        return m;
    }

    /// Violated invariants, one line each. Empty means the graph is well formed.
    std::vector<std::string> validate() const {
        std::vector<std::string> diag;
        std::set<std::string> vnames, enames;
        for (VertexId v = 0; v < vertices_.size(); ++v) {
            const Vertex& vx = vertices_[v];
            if (!vnames.insert(vx.name).second) diag.push_back("duplicate vertex id '" + vx.name + "'");
            if (vx.multiplicity < 1) diag.push_back("vertex '" + vx.name + "' has multiplicity < 1");
            if (vx.rotation.empty()) diag.push_back("vertex '" + vx.name + "' is isolated");
            else if (vx.cilium >= vx.rotation.size())
                diag.push_back("vertex '" + vx.name + "' cilium " + std::to_string(vx.cilium) + " >= degree " +
                               std::to_string(vx.rotation.size()));
            std::set<EdgeId> seen;
            for (EdgeId e : vx.rotation) {
                if (e >= edges_.size()) {
                    diag.push_back("vertex '" + vx.name + "' rotation names unknown edge " + std::to_string(e));
                    continue;
                }
                if (!seen.insert(e).second)
                    diag.push_back("vertex '" + vx.name + "' lists edge '" + edges_[e].name + "' twice");
                if (edges_[e].white != v && edges_[e].black != v)
                    diag.push_back("vertex '" + vx.name + "' lists non-incident edge '" + edges_[e].name + "'");
            }
        }
        for (EdgeId e = 0; e < edges_.size(); ++e) {
            const Edge<T>& ed = edges_[e];
            if (!enames.insert(ed.name).second) diag.push_back("duplicate edge id '" + ed.name + "'");
            if (ed.white >= vertices_.size() || ed.black >= vertices_.size()) {
                diag.push_back("edge '" + ed.name + "' has a dangling endpoint");
                continue;
            }
            const Vertex& w = vertices_[ed.white];
            const Vertex& b = vertices_[ed.black];
            if (w.color != Color::white || b.color != Color::black)
                diag.push_back("edge '" + ed.name + "' is not white-black (graph not bipartite as given)");
            if (ed.weight.rows() != w.multiplicity || ed.weight.cols() != b.multiplicity)
                diag.push_back("edge '" + ed.name + "' weight is " + ed.weight.shape() + ", expected " +
                               std::to_string(w.multiplicity) + "x" + std::to_string(b.multiplicity));
            for (VertexId end : {ed.white, ed.black}) {
                const auto& rot = vertices_[end].rotation;
                if (std::count(rot.begin(), rot.end(), e) != 1)
                    diag.push_back("edge '" + ed.name + "' missing from rotation of '" + vertices_[end].name + "'");
            }
            if (ed.sign && *ed.sign != 1 && *ed.sign != -1)
                diag.push_back("edge '" + ed.name + "' sign must be +1 or -1");
        }
        if (white_total() != black_total())
            diag.push_back("non-square K: white multiplicities sum to " + std::to_string(white_total()) +
                           ", black to " + std::to_string(black_total()));
        if (!diag.empty() || vertices_.empty()) return diag;

        if (components() != 1) diag.push_back("graph is disconnected");
        const auto traced = trace();
        const long euler = static_cast<long>(vertices_.size()) - static_cast<long>(edges_.size()) +
                           static_cast<long>(traced.size());
        if (euler != 2)
            diag.push_back("Euler check failed: V - E + F = " + std::to_string(euler) + " (rotation system not planar)");
        if (outer_witness_ && (outer_witness_->edge >= edges_.size() || outer_witness_->side < 0 ||
                               outer_witness_->side > 1))
            diag.push_back("outer face witness is not a valid edge side");
        return diag;
    }

    /// Validates, traces faces and resolves cilium corners. Throws input_error on any diagnostic.
    EmbeddedGraph& finalize() {
        auto diag = validate();
        if (!diag.empty()) {
            std::string msg = "invalid graph:";
            for (const auto& d : diag) msg += "\n  " + d;
            throw input_error(msg);
        }
        faces_ = trace();
        dart_face_.assign(2 * edges_.size(), 0);
        corner_face_.assign(vertices_.size(), {});
        for (VertexId v = 0; v < vertices_.size(); ++v) corner_face_[v].assign(vertices_[v].rotation.size(), 0);
        for (FaceId f = 0; f < faces_.size(); ++f) {
            Face& face = faces_[f];
            for (std::size_t i = 0; i < face.boundary.size(); ++i) {
                dart_face_[2 * face.boundary[i].edge + face.boundary[i].side] = f;
                const Corner c = face.corners[i];
                corner_face_[c.vertex][c.index] = f;
                if (vertices_[c.vertex].cilium == c.index) {
                    ++face.inward_cilia;
                    if (vertices_[c.vertex].multiplicity % 2 == 0) ++face.inward_cilia_even;
                }
            }
        }
        if (outer_witness_) {
            outer_ = faces_.empty() ? 0 : dart_face_[2 * outer_witness_->edge + outer_witness_->side];
        } else {
            outer_ = 0;
            for (FaceId f = 1; f < faces_.size(); ++f)
                if (faces_[f].length() > faces_[outer_].length()) outer_ = f;
            if (!faces_.empty()) outer_witness_ = faces_[outer_].boundary.front();
        }
        finalized_ = true;
        return *this;
    }

private:
    std::size_t total(Color c) const {
        std::size_t s = 0;
        for (const auto& v : vertices_)
            if (v.color == c) s += v.multiplicity;
        return s;
    }

    std::size_t components() const {
        std::vector<std::size_t> parent(vertices_.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const auto& e : edges_) parent[find(e.white)] = find(e.black);
        std::size_t n = 0;
        for (std::size_t v = 0; v < vertices_.size(); ++v)
            if (find(v) == v) ++n;
        return n;
    }

    // Face on the left: arriving at v along rotation slot p, leave along slot p-1.
    std::vector<Face> trace() const {
        std::vector<char> used(2 * edges_.size(), 0);
        std::vector<Face> out;
        for (EdgeId e0 = 0; e0 < edges_.size(); ++e0)
            for (int s0 = 0; s0 < 2; ++s0) {
                if (used[2 * e0 + s0]) continue;
                Face f;
                Dart d{e0, s0};
                while (!used[2 * d.edge + d.side]) {
                    used[2 * d.edge + d.side] = 1;
                    f.boundary.push_back(d);
                    const VertexId v = head(d);
                    const auto& rot = vertices_[v].rotation;
                    const std::size_t p = slot_of(v, d.edge);
                    const EdgeId next = rot[(p + rot.size() - 1) % rot.size()];
                    f.corners.push_back({v, p});
                    d = Dart{next, edges_[next].white == v ? 0 : 1};
                }
                out.push_back(std::move(f));
            }
        return out;
    }

    void require_finalized() const {
        if (!finalized_) throw std::logic_error("graph used before finalize()");
    }

    std::vector<Vertex> vertices_;
    std::vector<Edge<T>> edges_;
    std::optional<Dart> outer_witness_;

    bool finalized_ = false;
    std::vector<Face> faces_;
    std::vector<FaceId> dart_face_;
    std::vector<std::vector<FaceId>> corner_face_;
    FaceId outer_ = 0;
};

/// Convert weights to another scalar kind, keeping the combinatorics.
template <typename U, typename T, typename F>
EmbeddedGraph<U> convert_graph(const EmbeddedGraph<T>& g, F&& conv) {
    EmbeddedGraph<U> out;
    for (const auto& v : g.vertices()) {
        VertexId id = out.add_vertex(v.name, v.color, v.multiplicity);
        out.set_rotation(id, v.rotation);
        out.set_cilium(id, v.cilium);
    }
    for (const auto& e : g.edges()) {
        EdgeId id = out.add_edge(e.name, e.white, e.black, e.weight.map(conv), false);
        out.set_sign(id, e.sign);
    }
    if (g.outer_witness()) out.set_outer_witness(*g.outer_witness());
    out.finalize();
    return out;
}

/// Builds an embedded graph from planar coordinates: rotations are sorted by angle and the
/// outer face is the one with the most negative signed area. Cilia are given as a direction
/// angle (radians) or, when absent, placed in the first corner that lies in the outer face.
template <typename T>
class GeometricBuilder {
public:
    VertexId vertex(std::string name, Color color, std::size_t multiplicity, double x, double y,
                    std::optional<double> cilium_angle = std::nullopt) {
        pos_.push_back({x, y});
        cilia_.push_back(cilium_angle);
        return g_.add_vertex(std::move(name), color, multiplicity);
    }

    /// Endpoints in either order; colors decide which is white.
    EdgeId edge(std::string name, VertexId u, VertexId v, Matrix<T> weight) {
        VertexId w = u, b = v;
        if (g_.vertex(u).color == Color::black) std::swap(w, b);
        return g_.add_edge(std::move(name), w, b, std::move(weight));
    }

    EmbeddedGraph<T> build() {
        for (VertexId v = 0; v < g_.num_vertices(); ++v) {
            auto rot = g_.vertex(v).rotation;
            std::stable_sort(rot.begin(), rot.end(),
                             [&](EdgeId a, EdgeId b) { return angle_from(v, a) < angle_from(v, b); });
            for (std::size_t i = 1; i < rot.size(); ++i)
                if (angle_from(v, rot[i]) == angle_from(v, rot[i - 1]))
                    throw input_error("overlapping edges at vertex '" + g_.vertex(v).name + "'");
            g_.set_rotation(v, rot);
            g_.set_cilium(v, 0);
        }
        g_.clear_outer_witness();
        g_.finalize();
        FaceId outer = 0;
        double best = 0;
        for (FaceId f = 0; f < g_.num_faces(); ++f) {
            double a = signed_area(g_.face(f));
            if (f == 0 || a < best) {
                best = a;
                outer = f;
            }
        }
        if (g_.num_faces() > 0) g_.set_outer_witness(g_.face(outer).boundary.front());
        g_.finalize();
        std::vector<std::size_t> chosen(g_.num_vertices(), 0);
        for (VertexId v = 0; v < g_.num_vertices(); ++v) {
            const auto& rot = g_.vertex(v).rotation;
            const std::size_t d = rot.size();
            std::size_t corner = 0;
            if (cilia_[v]) {
                const double t = normalize(*cilia_[v]);
                bool found = false;
                for (std::size_t c = 0; c < d && !found; ++c) {
                    // corner c spans ccw from slot c-1 to slot c
                    const double lo = angle_from(v, rot[(c + d - 1) % d]);
                    const double hi = angle_from(v, rot[c]);
                    const double span = d == 1 ? 2 * std::numbers::pi : normalize(hi - lo);
                    if (normalize(t - lo) < span) {
                        corner = c;
                        found = true;
                    }
                }
            } else {
                for (std::size_t c = 0; c < d; ++c)
                    if (g_.face_of_corner(v, c) == outer) {
                        corner = c;
                        break;
                    }
            }
            chosen[v] = corner;
        }
        for (VertexId v = 0; v < g_.num_vertices(); ++v) g_.set_cilium(v, chosen[v]);
        g_.finalize();
        return g_;
    }

private:
    static double normalize(double a) {
        a = std::fmod(a, 2 * std::numbers::pi);
        return a < 0 ? a + 2 * std::numbers::pi : a;
    }
    double angle_from(VertexId v, EdgeId e) const {
        const VertexId u = g_.other_end(e, v);
        return normalize(std::atan2(pos_[u][1] - pos_[v][1], pos_[u][0] - pos_[v][0]));
    }
    double signed_area(const Face& f) const {
        double a = 0;
        for (const Dart& d : f.boundary) {
            const auto& p = pos_[g_.tail(d)];
            const auto& q = pos_[g_.head(d)];
            a += p[0] * q[1] - q[0] * p[1];
        }
        return a / 2;
    }

    EmbeddedGraph<T> g_;
    std::vector<std::array<double, 2>> pos_;
    std::vector<std::optional<double>> cilia_;
};

} // namespace dimerlab

#endif
