#include <dimerlab/graph_spec.hpp>
#include <dimerlab/zoo.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <string>

using namespace dimerlab;
using dimerlab::testing::Q;

namespace {

bool mentions(const std::vector<std::string>& diag, const std::string& needle) {
    return std::any_of(diag.begin(), diag.end(), [&](const std::string& d) { return d.find(needle) != std::string::npos; });
}

EmbeddedGraph<Q> four_cycle_n2() {
    const auto I = eye<Q>(2);
    return four_cycle<Q>(I, I, I, I);
}

} // namespace

TEST(Build, FourCycle) {
    const auto g = four_cycle_n2();
    EXPECT_EQ(g.num_vertices(), 4u);
    EXPECT_EQ(g.num_edges(), 4u);
    EXPECT_EQ(g.num_faces(), 2u);
    ASSERT_EQ(g.bounded_faces().size(), 1u);
    EXPECT_EQ(g.face(g.bounded_faces()[0]).length(), 4u);
    EXPECT_TRUE(g.validate().empty());
}

TEST(Build, SingleEdgeHasOnlyTheOuterFace) {
    const auto g = single_edge<Q>(Matrix<Q>{{Q(3, 2)}});
    EXPECT_EQ(g.num_faces(), 1u);
    EXPECT_TRUE(g.bounded_faces().empty());
    EXPECT_EQ(g.face(g.outer_face()).length(), 2u);
}

TEST(Build, DimerwtGrid) {
    const auto I = eye<Q>(2);
    const auto g = dimerwt_graph<Q>(I, I, I, I, I, I, I);
    EXPECT_EQ(g.num_vertices(), 6u);
    EXPECT_EQ(g.num_edges(), 7u);
    EXPECT_EQ(g.num_faces(), 3u);
    for (FaceId f : g.bounded_faces()) EXPECT_EQ(g.face(f).length(), 4u);
}

TEST(Faces, EveryDartOnExactlyOneFace) {
    for (const auto& [name, g] : dimerlab::testing::corpus(2, true)) {
        std::vector<int> hits(2 * g.num_edges(), 0);
        for (const auto& f : g.faces())
            for (const Dart& d : f.boundary) ++hits[2 * d.edge + d.side];
        EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; })) << name;
        EXPECT_EQ(static_cast<long>(g.num_vertices()) - static_cast<long>(g.num_edges()) + static_cast<long>(g.num_faces()), 2)
            << name;
    }
}

TEST(Faces, EachCiliumCountedOnce) {
    for (const auto& [name, g] : dimerlab::testing::corpus(1, true)) {
        std::size_t total = 0;
        for (const auto& f : g.faces()) total += f.inward_cilia;
        EXPECT_EQ(total, g.num_vertices()) << name;
    }
}

TEST(Faces, OutwardCiliaOnFourCycle) {
    const auto g = four_cycle_n2();
    EXPECT_EQ(g.face(g.bounded_faces()[0]).inward_cilia, 0u);
    EXPECT_EQ(g.face(g.outer_face()).inward_cilia, 4u);
}

TEST(Faces, MovingACiliumInward) {
    auto g = four_cycle_n2();
    const VertexId v = 0;
    for (std::size_t c = 0; c < g.degree(v); ++c) {
        auto h = g;
        h.set_cilium(v, c);
        h.finalize();
        EXPECT_EQ(h.face(h.face_of_corner(v, c)).inward_cilia, h.face_of_corner(v, c) == h.outer_face() ? 4u : 1u);
    }
}

TEST(LinearOrder, BlackCcwWhiteCw) {
    auto g = dimerlab::testing::corpus(1, false)[2].graph;  // dimerwt
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        const auto& vx = g.vertex(v);
        const auto lo = g.linear_order(v);
        ASSERT_EQ(lo.size(), vx.rotation.size());
        const std::size_t d = vx.rotation.size();
        for (std::size_t i = 0; i < d; ++i) {
            const std::size_t slot = vx.color == Color::black ? (vx.cilium + i) % d : (vx.cilium + d - 1 - i) % d;
            EXPECT_EQ(lo[i], vx.rotation[slot]);
        }
    }
}

TEST(Validate, ShapeMismatch) {
    EmbeddedGraph<Q> g;
    const auto w = g.add_vertex("w", Color::white, 1);
    const auto b = g.add_vertex("b", Color::black, 1);
    g.add_edge("e", w, b, eye<Q>(2));
    EXPECT_TRUE(mentions(g.validate(), "weight is 2x2, expected 1x1"));
    EXPECT_THROW(g.finalize(), input_error);
}

TEST(Validate, NonSquareK) {
    EmbeddedGraph<Q> g;
    const auto w = g.add_vertex("w", Color::white, 2);
    const auto b = g.add_vertex("b", Color::black, 1);
    g.add_edge("e", w, b, Matrix<Q>(2, 1));
    EXPECT_TRUE(mentions(g.validate(), "non-square K"));
}

TEST(Validate, NonBipartite) {
    EmbeddedGraph<Q> g;
    const auto w = g.add_vertex("w", Color::white, 1);
    const auto x = g.add_vertex("x", Color::white, 1);
    g.add_edge("e", w, x, eye<Q>(1));
    EXPECT_TRUE(mentions(g.validate(), "not white-black"));
}

TEST(Validate, NonPlanarRotation) {
    // swapping two slots at a degree-3 vertex breaks the embedding
    auto g = dimerlab::testing::corpus(1, false)[2].graph;
    VertexId v = 0;
    while (g.degree(v) != 3) ++v;
    auto rot = g.vertex(v).rotation;
    std::swap(rot[0], rot[1]);
    g.set_rotation(v, rot);
    EXPECT_TRUE(mentions(g.validate(), "Euler check failed"));
}

TEST(Validate, DuplicateIds) {
    EmbeddedGraph<Q> g;
    const auto w = g.add_vertex("v", Color::white, 1);
    const auto b = g.add_vertex("v", Color::black, 1);
    g.add_edge("e", w, b, eye<Q>(1));
    EXPECT_TRUE(mentions(g.validate(), "duplicate vertex id"));
}

TEST(Validate, CiliumOutOfRange) {
    auto g = four_cycle_n2();
    g.set_cilium(0, 5);
    EXPECT_TRUE(mentions(g.validate(), "cilium 5 >= degree 2"));
}

TEST(GraphSpec, RoundTripCorpus) {
    for (const auto& [name, g] : dimerlab::testing::corpus(2, true)) {
        const auto h = graph_from_json<Q>(graph_to_json(g));
        EXPECT_TRUE(same_graph(g, h)) << name;
        EXPECT_EQ(graph_to_json(h), graph_to_json(g)) << name;
    }
}

TEST(GraphSpec, RoundTripRandomWeights) {
    const auto g = dimerlab::testing::randomize(four_cycle_n2(), 11);
    EXPECT_TRUE(same_graph(g, graph_from_json<Q>(graph_to_json(g))));
}

TEST(GraphSpec, ParsesDocument) {
    const auto doc = nlohmann::json::parse(R"({
      "default_multiplicity": 1,
      "vertices": [
        {"id": "w", "color": "white", "rotation": ["a", "b"], "cilium": 0},
        {"id": "b", "color": "black", "rotation": ["b", "a"], "cilium": 0}
      ],
      "edges": [
        {"id": "a", "white": "w", "black": "b", "weight": [["1/2"]]},
        {"id": "b", "white": "w", "black": "b", "weight": [["0.25"]]}
      ],
      "outer_face_witness": ["a", 0]
    })");
    const auto g = graph_from_json<Q>(doc);
    EXPECT_EQ(g.num_faces(), 2u);
    EXPECT_EQ(g.edge(g.edge_by_name("a")).weight(0, 0), Q(1, 2));
    EXPECT_EQ(g.edge(g.edge_by_name("b")).weight(0, 0), Q(1, 4));
    EXPECT_EQ(g.outer_face(), g.face_of_dart({g.edge_by_name("a"), 0}));
}

TEST(GraphSpec, RejectsUnknownEdge) {
    const auto doc = nlohmann::json::parse(R"({
      "default_multiplicity": 1,
      "vertices": [{"id": "w", "color": "white", "rotation": ["zz"], "cilium": 0}],
      "edges": []
    })");
    EXPECT_THROW(graph_from_json<Q>(doc), input_error);
}

TEST(GraphSpec, ExampleFilesLoad) {
    for (const char* f : {"square.json", "mixed_ex.json", "snake.json", "grid4_n2.json", "six_vertex_3x3.json", "dimerwt.json"}) {
        const auto g = load_graph<Q>(std::string(DIMERLAB_DATA_DIR) + "/" + f);
        EXPECT_TRUE(g.validate().empty()) << f;
    }
}

TEST(Convert, RationalToDouble) {
    const auto g = dimerlab::testing::randomize(four_cycle_n2(), 5);
    const auto h = convert_graph<double>(g, [](const Q& x) { return x.get_d(); });
    EXPECT_EQ(h.num_faces(), g.num_faces());
    EXPECT_DOUBLE_EQ(h.edge(0).weight(0, 0), g.edge(0).weight(0, 0).get_d());
}
