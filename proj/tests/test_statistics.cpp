#include <dimerlab/oracle.hpp>
#include <dimerlab/statistics.hpp>
#include <dimerlab/zoo.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

using namespace dimerlab;
using dimerlab::testing::Q;
using M = Matrix<Q>;

namespace {

// 4-cycle, n = 2, identity weights: two independent copies of the n = 1 square
struct DiagSquare {
    EmbeddedGraph<Q> g = four_cycle_uniform<Q>(2);
    KasteleynSystem<Q> sys = assemble(g);
    EdgeId A = g.edge_by_name("A"), B = g.edge_by_name("B"), C = g.edge_by_name("C");
};

Polynomial univariate(const std::vector<Q>& c, std::size_t var) {
    Polynomial p, t = Polynomial::variable(var), pw(1L);
    for (const Q& x : c) {
        p += Polynomial(x) * pw;
        pw *= t;
    }
    return p;
}

M random_p(std::mt19937_64& rng, std::size_t n) { return dimerlab::testing::random_matrix(n, n, rng); }

} // namespace

TEST(Pgf, ForcedAndScalar) {
    EXPECT_EQ(edge_pgf(eye<Q>(2)), (std::vector<Q>{0, 0, 1}));
    const Q p(2, 7);
    EXPECT_EQ(edge_pgf(M{{p}}), (std::vector<Q>{1 - p, p}));
}

TEST(Pgf, DiagonalSquare) {
    DiagSquare s;
    const std::vector<Q> quarter{Q(1, 4), Q(1, 2), Q(1, 4)};
    EXPECT_EQ(edge_pgf(probability_matrix(s.sys, s.A)), quarter);
    EXPECT_EQ(edge_distribution(s.sys, s.A), quarter);
    EXPECT_EQ(edge_distribution(s.sys, s.A), oracle_distribution(s.g, s.A));
}

TEST(Distribution, ZeroMatrix) {
    EXPECT_EQ(multiplicity_distribution(M(2, 2)), (std::vector<Q>{1, 0, 0}));
}

TEST(Distribution, FormulasAgreeOnRandomP) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const M P = random_p(rng, 3);
        const auto c = multiplicity_distribution(P);
        Q sum = 0;
        for (const Q& x : c) sum += x;
        EXPECT_EQ(sum, 1);
        EXPECT_EQ(c, edge_pgf(P));
        EXPECT_EQ(1 - c[0], 1 - det(M(eye<Q>(3) - P)));
        if (sgn(det(M(eye<Q>(3) - P))) != 0) {
            EXPECT_EQ(multiplicity_distribution_via_complement(P), c);
        }
        if (sgn(det(P)) != 0) {
            EXPECT_EQ(multiplicity_distribution_via_inverse(P), c);
        }
    }
}

TEST(Moments, ClosedForms) {
    EXPECT_EQ(expected_multiplicity(eye<Q>(3)), 3);
    EXPECT_EQ(variance(eye<Q>(2)), 0);
    const Q p(3, 8);
    EXPECT_EQ(expected_multiplicity(M{{p}}), p);
    EXPECT_EQ(variance(M{{p}}), p * (1 - p));
    EXPECT_EQ(moment(M{{p}}, 2), p);
    std::mt19937_64 rng(2);
    const M P = random_p(rng, 3);
    EXPECT_EQ(moment(P, 1), P.trace());
    EXPECT_EQ(variance(P), moment(P, 2) - moment(P, 1) * moment(P, 1));
    const auto pmf = multiplicity_distribution(P);
    for (unsigned N = 1; N <= 4; ++N) {
        Q direct = 0;
        for (std::size_t k = 0; k < pmf.size(); ++k) {
            Q kn = 1;
            for (unsigned i = 0; i < N; ++i) kn *= static_cast<long>(k);
            direct += kn * pmf[k];
        }
        EXPECT_EQ(moment(P, N), direct) << N;
    }
}

TEST(Moments, DiagonalSquare) {
    DiagSquare s;
    const M P = probability_matrix(s.sys, s.A);
    EXPECT_EQ(expected_multiplicity(P), 1);
    EXPECT_EQ(variance(P), Q(1, 2));
    EXPECT_EQ(moment(P, 2), Q(3, 2));
}

TEST(Psi, SmallOrders) {
    std::mt19937_64 rng(3);
    const M a = random_p(rng, 2), b = random_p(rng, 2);
    EXPECT_EQ(psi<Q>({a}), a.trace());
    EXPECT_EQ(psi<Q>({a, b}), a.trace() * b.trace() - M(a * b).trace());
    EXPECT_THROW(psi<Q>(std::vector<M>(9, a)), input_error);
}

TEST(Psi, DerivativeOfDeterminant) {
    // entries c + d t_v with v in {t0, t1, none}: det(A) psi(A^-1 dA/dt0, A^-1 dA/dt1) = d^2 det A / dt0 dt1
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> var(0, 2);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix<Polynomial> A(3, 3);
        M d0(3, 3), d1(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                const Q c = dimerlab::testing::random_rational(rng, true);
                const Q d = dimerlab::testing::random_rational(rng, true);
                const int v = var(rng);
                A(i, j) = Polynomial(c);
                if (v < 2) {
                    A(i, j) += Polynomial(d) * Polynomial::variable(v);
                    (v == 0 ? d0 : d1)(i, j) = d;
                }
            }
        const Polynomial mixed = det(A).derivative(0).derivative(1);
        const std::vector<Q> pt{dimerlab::testing::random_rational(rng), dimerlab::testing::random_rational(rng)};
        M a(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) a(i, j) = A(i, j).evaluate(pt);
        if (sgn(det(a)) == 0) continue;
        const M ai = inverse(a);
        EXPECT_EQ(det(a) * psi<Q>({M(ai * d0), M(ai * d1)}), mixed.evaluate(pt));
    }
}

TEST(Products, FourCycle) {
    const auto g = four_cycle_uniform<Q>(1);
    const auto sys = assemble(g);
    const EdgeId A = g.edge_by_name("A"), B = g.edge_by_name("B"), C = g.edge_by_name("C");
    EXPECT_EQ(product_expectation(sys, {A}), probability_matrix(sys, A).trace());
    EXPECT_EQ(product_expectation(sys, {A, C}), Q(1, 2));
    EXPECT_EQ(product_expectation(sys, {A, B}), 0);
    EXPECT_EQ(covariance(sys, A, B), Q(-1, 4));
    EXPECT_EQ(covariance(sys, A, C), Q(1, 4));
    EXPECT_THROW(product_expectation(sys, {A, A}), input_error);
    EXPECT_THROW(covariance(sys, A, A), input_error);
    EXPECT_EQ(cycle_probability_matrix(sys, {A, B}).trace(), Q(1, 4));
}

TEST(Products, ScalarCovarianceFormula) {
    const auto g = dimerlab::testing::randomize(grid_graph(uniform_grid<Q>(3, 1)), 6);
    const auto sys = assemble(g);
    auto K = [&](EdgeId e) { return sys.k_block(g.edge(e).white, g.edge(e).black)(0, 0); };
    auto Kinv = [&](EdgeId from, EdgeId to) { return sys.inverse_block(g.edge(from).black, g.edge(to).white)(0, 0); };
    for (EdgeId e1 = 0; e1 < g.num_edges(); ++e1)
        for (EdgeId e2 = e1 + 1; e2 < g.num_edges(); ++e2)
            EXPECT_EQ(covariance(sys, e1, e2), -Kinv(e1, e2) * Kinv(e2, e1) * K(e1) * K(e2));
}

TEST(Products, DiagonalSquareAgainstOracle) {
    DiagSquare s;
    const auto wc = weighted_covers(s.g);
    EXPECT_EQ(product_expectation(s.sys, {s.A, s.B}), oracle_product_expectation(wc, {s.A, s.B}));
    EXPECT_EQ(product_expectation(s.sys, {s.A, s.C}), oracle_product_expectation(wc, {s.A, s.C}));
    const Q ea = probability_matrix(s.sys, s.A).trace(), eb = probability_matrix(s.sys, s.B).trace();
    EXPECT_EQ(product_expectation(s.sys, {s.A, s.B}), ea * eb + covariance(s.sys, s.A, s.B));
}

TEST(Products, TripleAgainstOracle) {
    const auto g = dimerlab::testing::randomize(grid_graph(uniform_grid<Q>(3, 2)), 12);
    const auto sys = assemble(g);
    const auto wc = weighted_covers(g);
    for (EdgeId a = 0; a + 2 < g.num_edges(); ++a)
        EXPECT_EQ(product_expectation(sys, {a, a + 1, a + 2}), oracle_product_expectation(wc, {a, a + 1, a + 2}));
}

TEST(JointPgf, Specializations) {
    const auto g = four_cycle_uniform<Q>(1);
    const auto sys = assemble(g);
    const EdgeId A = g.edge_by_name("A"), C = g.edge_by_name("C");
    EXPECT_EQ(joint_pgf(sys, {}), Polynomial(1L));
    EXPECT_EQ(joint_pgf(sys, {A}), univariate(edge_pgf(probability_matrix(sys, A)), 0));
    const Polynomial t1 = Polynomial::variable(0), t2 = Polynomial::variable(1);
    EXPECT_EQ(joint_pgf(sys, {A, C}), Polynomial(Q(1, 2)) * (t1 * t2 + Polynomial(1L)));
    EXPECT_THROW(joint_pgf(sys, {0, 1, 2, 3, 0}), input_error);
}

TEST(JointPgf, MarginalsAndOracle) {
    const auto g = dimerlab::testing::randomize(grid_graph(uniform_grid<Q>(2, 2)), 4);
    const auto sys = assemble(g);
    const auto wc = weighted_covers(g);
    const std::vector<EdgeId> marked{0, 2, 3};
    const Polynomial j = joint_pgf(sys, marked);
    EXPECT_EQ(j.substitute(1, 1).substitute(2, 1), univariate(edge_distribution(sys, 0), 0));
    for (const auto& [ms, p] : oracle_joint_distribution(wc, marked)) {
        Monomial mono(ms.begin(), ms.end());
        EXPECT_EQ(j.coefficient(mono), p);
    }
}

TEST(Gauge, CharCoeffsInvariant) {
    std::mt19937_64 rng(13);
    const auto g = dimerlab::testing::randomize(dimerwt_graph<Q>(eye<Q>(2), eye<Q>(2), eye<Q>(2), eye<Q>(2), eye<Q>(2),
                                                                 eye<Q>(2), eye<Q>(2)),
                                                21);
    const auto sys = assemble(g);
    for (EdgeId e = 0; e < g.num_edges(); ++e)
        for (VertexId v : {g.edge(e).white, g.edge(e).black}) {
            EmbeddedGraph<Q> h = g;
            const M m = dimerlab::testing::random_invertible(2, rng);
            for (EdgeId f : g.vertex(v).rotation)
                h.set_weight(f, g.vertex(v).color == Color::white ? M(m * g.edge(f).weight) : M(g.edge(f).weight * m));
            h.finalize();
            EXPECT_EQ(char_coeffs(probability_matrix(assemble(h), e)), char_coeffs(probability_matrix(sys, e)));
        }
}

TEST(Distribution, NegativeMassIsFlaggedNotRejected) {
    const auto g = four_cycle<Q>(eye<Q>(1), eye<Q>(1), M{{Q(-3)}}, eye<Q>(1));
    const auto sys = assemble(g);
    const auto pmf = edge_distribution(sys, g.edge_by_name("A"));
    EXPECT_TRUE(has_negative_mass(pmf));
    EXPECT_EQ(pmf, oracle_distribution(g, g.edge_by_name("A")));
}

TEST(Sampling, SingleEdgeAndDeterminism) {
    const auto s = single_edge<Q>(eye<Q>(2));
    for (std::uint64_t seed : {0u, 5u, 99u}) EXPECT_EQ(sample_covers(s, 3, seed), std::vector<Cover>(3, Cover{2}));
    const auto g = mixed_ex_identity<Q>();
    EXPECT_EQ(sample_covers(g, 50, 7), sample_covers(g, 50, 7));
}

TEST(Sampling, FrequenciesWithinThreeSigma) {
    const std::size_t draws = 10000;
    for (const auto& g : {four_cycle_uniform<Q>(1), mixed_ex_identity<Q>()}) {
        const auto wc = weighted_covers(g);
        std::map<Cover, std::size_t> freq;
        for (const auto& c : sample_covers(g, draws, 2024)) ++freq[c];
        for (std::size_t i = 0; i < wc.covers.size(); ++i) {
            const double p = Q(wc.weights[i] / wc.Z).get_d();
            const double sigma = std::sqrt(p * (1 - p) / draws);
            const double f = static_cast<double>(freq[wc.covers[i]]) / draws;
            EXPECT_LE(std::fabs(f - p), 3 * sigma) << "cover " << i;
        }
    }
}

TEST(Sampling, RejectsNegativeWeights) {
    const auto g = four_cycle<Q>(eye<Q>(1), eye<Q>(1), M{{Q(-3)}}, eye<Q>(1));
    EXPECT_THROW(sample_covers(g, 1, 0), input_error);
}
