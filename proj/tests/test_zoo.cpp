#include <dimerlab/oracle.hpp>
#include <dimerlab/snake.hpp>
#include <dimerlab/statistics.hpp>
#include <dimerlab/zoo.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace dimerlab;
using dimerlab::testing::Q;
using M = Matrix<Q>;

namespace {

GridSpec<Q> random_grid(std::size_t N, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    GridSpec<Q> s;
    for (std::size_t i = 0; i <= N; ++i) s.B.push_back(dimerlab::testing::random_invertible(n, rng));
    for (std::size_t i = 1; i <= N; ++i) {
        s.A.push_back(dimerlab::testing::random_invertible(n, rng));
        s.C.push_back(dimerlab::testing::random_invertible(n, rng));
    }
    return s;
}

Q edge_p(const KasteleynSystem<Q>& sys, const std::string& e) {
    return probability_matrix(sys, sys.graph().edge_by_name(e)).trace();
}

} // namespace

TEST(Grid, SmallestGrid) {
    const auto g = grid_graph(uniform_grid<Q>(1, 1));
    const auto sys = assemble(g);
    EXPECT_EQ(sys.partition_function(), 2);
    EXPECT_EQ(oracle_partition(g), 2);
    EXPECT_EQ(edge_p(sys, "a1"), Q(1, 2));
    EXPECT_EQ(edge_p(sys, "c1"), Q(1, 2));
    const auto s = uniform_grid<Q>(1, 1);
    EXPECT_EQ(grid_horizontal_P(s, 1, Horizontal::a), M{{Q(1, 2)}});
    EXPECT_EQ(grid_horizontal_P(s, 1, Horizontal::c), M{{Q(1, 2)}});
}

TEST(Grid, BlockTridiagonal) {
    const auto s = random_grid(4, 2, 1);
    const auto g = grid_graph(s);
    const auto sys = assemble(g);
    for (std::size_t i = 0; i <= 4; ++i)
        for (std::size_t j = 0; j <= 4; ++j) {
            const auto blk = sys.k_block(g.vertex_by_name("w" + std::to_string(i)), g.vertex_by_name("b" + std::to_string(j)));
            if (i == j) EXPECT_EQ(blk, s.B[i]);
            else if (j == i + 1) EXPECT_EQ(blk, s.a(j));
            else if (i == j + 1) EXPECT_EQ(blk, M(-s.c(i)));
            else EXPECT_EQ(blk, M(2, 2));
        }
}

TEST(Grid, FibonacciCounts) {
    for (unsigned N = 1; N <= 8; ++N) {
        const auto g = grid_graph(uniform_grid<Q>(N, 1));
        EXPECT_EQ(assemble(g).partition_function(), Q(fibonacci(N + 2))) << N;
        EXPECT_EQ(enumerate_covers(g).size(), fibonacci(N + 2).get_ui()) << N;
    }
}

TEST(ContinuedFraction, BasicsAndFibonacci) {
    const auto s = random_grid(3, 2, 2);
    for (std::size_t i = 0; i <= 3; ++i) EXPECT_EQ(continued_fraction(s.B, i, i), s.B[i]);
    EXPECT_EQ(continued_fraction(s.B, 0, 1), M(s.B[0] + inverse(s.B[1])));
    EXPECT_EQ(continued_fraction(s.B, 2, 1), M(s.B[2] + inverse(s.B[1])));
    for (unsigned N = 1; N <= 8; ++N) {
        const std::vector<M> ones(N + 1, eye<Q>(1));
        EXPECT_EQ(continued_fraction(ones, 0, N)(0, 0), Q(fibonacci(N + 2)) / Q(fibonacci(N + 1))) << N;
    }
    EXPECT_THROW(continued_fraction(std::vector<M>{M{{1}}, M{{-1}}, M{{1}}}, 0, 2), singular_matrix);
}

TEST(ContinuedFraction, CornerInverseBlock) {
    const auto s = random_grid(4, 2, 3);
    const auto g = grid_graph(s);
    EXPECT_EQ(grid_corner_inverse_block(s), assemble(g).inverse_block(g.vertex_by_name("b0"), g.vertex_by_name("w0")));
}

TEST(GridP, ClosedFormsMatchGeneric) {
    for (std::uint64_t seed : {4u, 5u}) {
        const auto s = random_grid(4, 2, seed);
        const auto sys = assemble(grid_graph(s));
        auto P = [&](const std::string& e) { return probability_matrix(sys, sys.graph().edge_by_name(e)); };
        for (std::size_t i = 0; i <= 4; ++i) EXPECT_EQ(grid_vertical_P(s, i), P("v" + std::to_string(i)));
        for (std::size_t i = 1; i <= 4; ++i) {
            const auto pa = grid_horizontal_P(s, i, Horizontal::a), pc = grid_horizontal_P(s, i, Horizontal::c);
            EXPECT_EQ(pa, P("a" + std::to_string(i)));
            EXPECT_EQ(pc, P("c" + std::to_string(i)));
        }
        EXPECT_EQ(grid_vertical_P(s, 0), M(grid_corner_inverse_block(s) * s.B[0]));
    }
}

TEST(GridP, SplitIdentity) {
    const auto s = random_grid(4, 2, 6);
    const auto sys = assemble(grid_graph(s));
    for (std::size_t i = 1; i < 4; ++i) {
        GridSpec<Q> left, right;
        left.B.assign(s.B.begin(), s.B.begin() + i + 1);
        left.A.assign(s.A.begin(), s.A.begin() + i);
        left.C.assign(s.C.begin(), s.C.begin() + i);
        right.B.assign(s.B.begin() + i, s.B.end());
        right.A.assign(s.A.begin() + i, s.A.end());
        right.C.assign(s.C.begin() + i, s.C.end());
        const auto pl = probability_matrix(assemble(grid_graph(left)), grid_graph(left).edge_by_name("v" + std::to_string(i)));
        const auto pr = probability_matrix(assemble(grid_graph(right)), grid_graph(right).edge_by_name("v0"));
        EXPECT_EQ(grid_split_P(pl, pr), probability_matrix(sys, sys.graph().edge_by_name("v" + std::to_string(i)))) << i;
    }
}

TEST(GridCovariance, OnesAndRandom) {
    const auto ones = uniform_grid<Q>(4, 1);
    const auto g = grid_graph(ones);
    const auto sys = assemble(g);
    const auto wc = weighted_covers(g);
    for (std::size_t i = 0; i <= 4; ++i)
        for (std::size_t j = i + 1; j <= 4; ++j) {
            const EdgeId ei = g.edge_by_name("v" + std::to_string(i)), ej = g.edge_by_name("v" + std::to_string(j));
            const Q cov = grid_covariance(ones, i, j);
            const Q oracle = oracle_product_expectation(wc, {ei, ej}) -
                             oracle_product_expectation(wc, {ei}) * oracle_product_expectation(wc, {ej});
            EXPECT_EQ(cov, oracle) << i << "," << j;
            // the sign alternates with the distance
            EXPECT_EQ(sgn(cov), (j - i) % 2 == 0 ? -1 : 1) << i << "," << j;
        }
    const auto s = random_grid(3, 2, 7);
    const auto rs = assemble(grid_graph(s));
    for (std::size_t i = 0; i <= 3; ++i)
        for (std::size_t j = i + 1; j <= 3; ++j)
            EXPECT_EQ(grid_covariance(s, i, j), covariance(rs, rs.graph().edge_by_name("v" + std::to_string(i)),
                                                          rs.graph().edge_by_name("v" + std::to_string(j))));
}

TEST(QFibonacci, IdentityCollapses) {
    // fibonacci() starts f_0 = 0, f_1 = 1
    for (std::size_t N = 1; N <= 6; ++N) {
        const auto [g, tr] = q_fibonacci_grid(N, eye<Q>(2));
        EXPECT_EQ(tr, Q(2) * Q(fibonacci(N + 1)) / Q(fibonacci(N + 2))) << N;
        EXPECT_EQ(edge_p(assemble(g), "v0"), tr) << N;
    }
}

TEST(QFibonacci, ScalarAndMatrix) {
    std::mt19937_64 rng(9);
    for (std::size_t N = 1; N <= 6; ++N) {
        const M q{{Q(2, 3)}};
        const auto [g, tr] = q_fibonacci_grid(N, q);
        EXPECT_EQ(edge_p(assemble(g), "v0"), tr) << N;
        const M Qm = dimerlab::testing::random_invertible(2, rng);
        const auto [h, trm] = q_fibonacci_grid(N, Qm);
        EXPECT_EQ(edge_p(assemble(h), "v0"), trm) << N;
    }
}

TEST(QFibonacci, PrintedSeedDisagreesFromTwo) {
    const M q{{Q(2, 3)}};
    EXPECT_EQ(q_fibonacci_trace(1, q, true), q_fibonacci_trace(1, q));
    EXPECT_NE(q_fibonacci_trace(2, q, true), q_fibonacci_trace(2, q));
    // N = 2: q(1+q)/(1+q+q^2)
    const Q x(2, 3);
    EXPECT_EQ(q_fibonacci_trace(2, q), x * (1 + x) / (1 + x + x * x));
}

TEST(Snake, StraightWordIsAlreadyAGrid) {
    const auto g = dimerlab::testing::randomize(snake_graph<Q>("EEE", 2), 1);
    const auto red = snake_reduce(g, "EEE");
    EXPECT_TRUE(red.certificates.empty());
    EXPECT_TRUE(red.touched.empty());
    EXPECT_EQ(red.result.num_edges(), g.num_edges());
}

TEST(Snake, Shapes) {
    EXPECT_EQ(snake_tiles("NE").size(), 3u);
    EXPECT_EQ(snake_turn_corners("NE"), (std::vector<std::pair<int, int>>{{0, 2}}));
    EXPECT_THROW(snake_tiles("NX"), input_error);
    const auto g = snake_graph<Q>("NENE", 1);
    EXPECT_EQ(g.bounded_faces().size(), 5u);
    EXPECT_EQ(assemble(g).partition_function(), oracle_partition(g));
}

TEST(SixVertex, CentralProbabilitiesAtPythagoreanPoint) {
    const auto g = six_vertex<Q>(3, 3, Q(3, 5), Q(4, 5));
    const auto sys = assemble(g);
    const Q c2 = Q(9, 25), s2 = Q(16, 25);
    EXPECT_EQ(edge_p(sys, "x1y1-E"), c2 * c2 + s2 * s2);
    EXPECT_EQ(edge_p(sys, "x1y1-E"), Q(337, 625));
    EXPECT_EQ(edge_p(sys, "x1y1-W"), Q(337, 625));
    EXPECT_EQ(edge_p(sys, "x1y1-N"), 2 * c2 * s2);
    EXPECT_EQ(edge_p(sys, "x1y1-S"), 2 * c2 * s2);
    EXPECT_EQ(sys.partition_function(), oracle_partition(g));
}

TEST(SixVertex, QuarterTurnFloat) {
    const auto g = six_vertex_angle(3, 3, std::numbers::pi / 4);
    const auto sys = assemble(g);
    for (const char* d : {"E", "W", "N", "S"}) {
        const double p = probability_matrix(sys, g.edge_by_name(std::string("x1y1-") + d)).trace();
        EXPECT_NEAR(p, 0.5, 1e-12) << d;
    }
    const double th = 0.3;
    const auto h = six_vertex_angle(3, 3, th);
    const double east = probability_matrix(assemble(h), h.edge_by_name("x1y1-E")).trace();
    EXPECT_NEAR(east, std::pow(std::cos(th), 4) + std::pow(std::sin(th), 4), 1e-12);
}

TEST(SixVertex, SmallLatticesAgreeWithOracle) {
    for (std::size_t r = 1; r <= 2; ++r) {
        const auto g = six_vertex<Q>(r, r, Q(5, 13), Q(12, 13));
        EXPECT_EQ(assemble(g).partition_function(), abs(oracle_partition(g))) << r;
    }
    // domain wall boundary balances the colors only on square lattices
    EXPECT_THROW(six_vertex<Q>(2, 3, Q(5, 13), Q(12, 13)), input_error);
}

TEST(FreeFermion, Relation) {
    const Q s(4, 5), c(3, 5);
    EXPECT_TRUE(free_fermion_check(s, s, c, c, Q(1), Q(1)));
    EXPECT_FALSE(free_fermion_check(Q(1), Q(1), Q(1), Q(1), Q(1), Q(1)));
    std::mt19937_64 rng(10);
    for (int t = 0; t < 10; ++t) {
        const auto w = six_vertex_weights(dimerlab::testing::random_matrix(4, 2, rng));
        EXPECT_TRUE(free_fermion_check(w[0], w[1], w[2], w[3], w[4], w[5]));
    }
}
