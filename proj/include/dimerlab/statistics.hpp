#ifndef DIMERLAB_STATISTICS_HPP
#define DIMERLAB_STATISTICS_HPP

#include <dimerlab/kasteleyn.hpp>
#include <dimerlab/oracle.hpp>
#include <dimerlab/polynomial.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace dimerlab {

/// Signed contribution eps(e) wt(e) of one edge to its K block.
template <typename T>
Matrix<T> signed_weight(const KasteleynSystem<T>& sys, EdgeId e) {
    const auto& w = sys.graph().edge(e).weight;
    return sys.connection().at(e) < 0 ? Matrix<T>(-w) : w;
}

/// P_e = K^{[b],[w]} eps(e) wt(e) for e = (w, b); n_b x n_b.
template <Field T>
Matrix<T> probability_matrix(const KasteleynSystem<T>& sys, EdgeId e) {
    const auto& ed = sys.graph().edge(e);
    return sys.inverse_block(ed.black, ed.white) * signed_weight(sys, e);
}

/// K_{[w1],[b1]} K^{[b1],[w2]} K_{[w2],[b2]} ... K^{[bk],[w1]} over the listed edges; n_w1 x n_w1.
template <Field T>
Matrix<T> cycle_probability_matrix(const KasteleynSystem<T>& sys, const std::vector<EdgeId>& cycle) {
    if (cycle.empty()) throw input_error("empty cycle");
    const auto& g = sys.graph();
    Matrix<T> m = signed_weight(sys, cycle[0]);
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        const EdgeId cur = cycle[i], nxt = cycle[(i + 1) % cycle.size()];
        m = m * sys.inverse_block(g.edge(cur).black, g.edge(nxt).white);
        if (i + 1 < cycle.size()) m = m * signed_weight(sys, nxt);
    }
    return m;
}

namespace detail {

inline mpz_class binomial(unsigned n, unsigned k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

template <typename T>
T from_mpz(const mpz_class& z) {
    if constexpr (std::is_same_v<T, double>) return z.get_d();
    else return T(Rational(z));
}

} // namespace detail

/// Coefficients of det(I + (t-1)P) = sum_k e_k(P) (t-1)^k, lowest degree first.
template <Field T>
std::vector<T> edge_pgf(const Matrix<T>& P) {
    const auto e = char_coeffs(P);
    const std::size_t n = P.rows();
    std::vector<T> c(n + 1, scalar_traits<T>::zero());
    for (std::size_t k = 0; k <= n; ++k)
        for (std::size_t j = 0; j <= k; ++j) {
            T term = e[k] * detail::from_mpz<T>(detail::binomial(k, j));
            if ((k - j) % 2 == 1) c[j] -= term;
            else c[j] += term;
        }
    return c;
}

/// Pr[m = k] = sum_{i >= k} (-1)^{i-k} C(i,k) e_i(P). Division free.
template <Field T>
std::vector<T> multiplicity_distribution(const Matrix<T>& P) {
    const auto e = char_coeffs(P);
    const std::size_t n = P.rows();
    std::vector<T> pmf(n + 1, scalar_traits<T>::zero());
    for (std::size_t k = 0; k <= n; ++k)
        for (std::size_t i = k; i <= n; ++i) {
            T term = e[i] * detail::from_mpz<T>(detail::binomial(i, k));
            if ((i - k) % 2 == 1) pmf[k] -= term;
            else pmf[k] += term;
        }
    return pmf;
}

template <typename T>
Matrix<T> eye_like(const Matrix<T>& m) {
    return Matrix<T>::identity(m.rows());
}

/// Pr[m = k] = det(I - P) e_k((I - P)^{-1} P). Needs I - P invertible.
template <Field T>
std::vector<T> multiplicity_distribution_via_complement(const Matrix<T>& P) {
    const Matrix<T> q = eye_like(P) - P;
    const T d = det(q);
    auto e = char_coeffs(inverse(q) * P);
    for (auto& x : e) x *= d;
    return e;
}

/// Pr[m = k] = det(P) e_{n-k}(P^{-1}(I - P)). Needs P invertible.
template <Field T>
std::vector<T> multiplicity_distribution_via_inverse(const Matrix<T>& P) {
    const T d = det(P);
    auto e = char_coeffs(inverse(P) * (eye_like(P) - P));
    std::reverse(e.begin(), e.end());
    for (auto& x : e) x *= d;
    return e;
}

/// Multiplicity law of an edge, trimmed to 0..min(n_w, n_b).
template <Field T>
std::vector<T> edge_distribution(const KasteleynSystem<T>& sys, EdgeId e) {
    auto pmf = multiplicity_distribution(probability_matrix(sys, e));
    const auto& ed = sys.graph().edge(e);
    pmf.resize(std::min(sys.graph().vertex(ed.white).multiplicity, sys.graph().vertex(ed.black).multiplicity) + 1);
    return pmf;
}

/// True when some mass is negative: the weights are not a positive model.
template <typename T>
bool has_negative_mass(const std::vector<T>& pmf) {
    return std::any_of(pmf.begin(), pmf.end(), [](const T& x) { return x < 0; });
}

template <Field T>
T expected_multiplicity(const Matrix<T>& P) {
    return P.trace();
}

template <Field T>
T variance(const Matrix<T>& P) {
    return P.trace() - (P * P).trace();
}

/// Stirling numbers of the second kind S(N, k), k = 0..N.
inline std::vector<mpz_class> stirling2_row(unsigned N) {
    std::vector<mpz_class> row(N + 1, 0);
    row[0] = 1;
    for (unsigned m = 1; m <= N; ++m) {
        std::vector<mpz_class> next(N + 1, 0);
        for (unsigned k = 1; k <= m; ++k) next[k] = mpz_class(k) * row[k] + row[k - 1];
        row = next;
    }
    return row;
}

/// E[m^N] = sum_{k=1}^N k! S(N,k) e_k(P).
template <Field T>
T moment(const Matrix<T>& P, unsigned N) {
    if (N < 1) throw input_error("moment order must be >= 1");
    const auto e = char_coeffs(P);
    const auto S = stirling2_row(N);
    T acc = scalar_traits<T>::zero();
    mpz_class fact = 1;
    for (unsigned k = 1; k <= N; ++k) {
        fact *= k;
        if (k >= e.size()) break;
        acc += detail::from_mpz<T>(fact * S[k]) * e[k];
    }
    return acc;
}

inline constexpr std::size_t max_psi_order = 8;

/// Calls f(sign, cycles) for every permutation of 0..k-1 in lexicographic order; each cycle
/// lists i, s(i), s(s(i)), ... starting from its smallest element.
template <typename F>
void for_each_permutation_cycles(std::size_t k, F&& f) {
    if (k > max_psi_order) throw input_error("permutation expansion limited to k <= 8");
    std::vector<std::size_t> p(k);
    std::iota(p.begin(), p.end(), 0);
    do {
        std::vector<bool> seen(k, false);
        std::vector<std::vector<std::size_t>> cycles;
        int sign = 1;
        for (std::size_t i = 0; i < k; ++i) {
            if (seen[i]) continue;
            std::vector<std::size_t> c;
            for (std::size_t j = i; !seen[j]; j = p[j]) {
                seen[j] = true;
                c.push_back(j);
            }
            if (c.size() % 2 == 0) sign = -sign;
            cycles.push_back(std::move(c));
        }
        f(sign, cycles);
    } while (std::next_permutation(p.begin(), p.end()));
}

/// Psi_k(A_1..A_k) = sum_s sign(s) prod_{cycles c of s} tr(prod_{i in c} A_i).
template <typename T>
T psi(const std::vector<Matrix<T>>& mats) {
    T total = scalar_traits<T>::zero();
    for_each_permutation_cycles(mats.size(), [&](int sign, const std::vector<std::vector<std::size_t>>& cycles) {
        T term = scalar_traits<T>::from_int(sign);
        for (const auto& c : cycles) {
            Matrix<T> m = mats[c[0]];
            for (std::size_t i = 1; i < c.size(); ++i) m = m * mats[c[i]];
            term *= m.trace();
        }
        total += term;
    });
    return total;
}

/// E[m_1 ... m_k] for distinct edges: sum_s sign(s) prod_{cycles c} tr(P_c).
template <Field T>
T product_expectation(const KasteleynSystem<T>& sys, const std::vector<EdgeId>& edges) {
    if (std::set<EdgeId>(edges.begin(), edges.end()).size() != edges.size())
        throw input_error("product expectation needs distinct edges");
    T total = scalar_traits<T>::zero();
    for_each_permutation_cycles(edges.size(), [&](int sign, const std::vector<std::vector<std::size_t>>& cycles) {
        T term = scalar_traits<T>::from_int(sign);
        for (const auto& c : cycles) {
            std::vector<EdgeId> ce;
            for (auto i : c) ce.push_back(edges[i]);
            term *= cycle_probability_matrix(sys, ce).trace();
        }
        total += term;
    });
    return total;
}

/// Cov(m_1, m_2) = -tr(K_{[w1],[b1]} K^{[b1],[w2]} K_{[w2],[b2]} K^{[b2],[w1]}).
template <Field T>
T covariance(const KasteleynSystem<T>& sys, EdgeId e1, EdgeId e2) {
    if (e1 == e2) throw input_error("covariance of an edge with itself; use variance");
    return -cycle_probability_matrix(sys, {e1, e2}).trace();
}

inline constexpr std::size_t max_joint_pgf_edges = 4;

/// det(K^{-1} K~) with the marked edges scaled by t_0, t_1, ...: the joint generating function of
/// their multiplicities. Only the black blocks touched by marked edges contribute.
inline Polynomial joint_pgf(const KasteleynSystem<Rational>& sys, const std::vector<EdgeId>& edges) {
    if (edges.size() > max_joint_pgf_edges) throw input_error("joint_pgf supports at most 4 marked edges");
    const auto& g = sys.graph();
    std::vector<std::size_t> blocks;
    for (EdgeId e : edges) {
        const std::size_t bi = sys.block_index(g.edge(e).black);
        if (std::find(blocks.begin(), blocks.end(), bi) == blocks.end()) blocks.push_back(bi);
    }
    std::sort(blocks.begin(), blocks.end());
    const auto& K = sys.K();
    const auto idx = K.col_indices(blocks);
    std::vector<std::size_t> local(K.flat().cols(), 0);
    for (std::size_t i = 0; i < idx.size(); ++i) local[idx[i]] = i;
    Matrix<Polynomial> m = Matrix<Polynomial>::identity(idx.size());
    const auto& kinv = sys.inverse_matrix();
    for (std::size_t l = 0; l < edges.size(); ++l) {
        const auto& ed = g.edge(edges[l]);
        const Matrix<Rational> x = signed_weight(sys, edges[l]);
        const std::size_t wrow = K.row_offset(sys.block_index(ed.white));
        const std::size_t bcol = K.col_offset(sys.block_index(ed.black));
        const Polynomial tm1 = Polynomial::variable(l) - Polynomial(1L);
        // column block b of K^{-1} X_l is K^{-1}[:, w rows] * x, restricted to rows in idx
        for (std::size_t r = 0; r < idx.size(); ++r)
            for (std::size_t c = 0; c < x.cols(); ++c) {
                Rational s = 0;
                for (std::size_t k = 0; k < x.rows(); ++k) s += kinv.flat()(idx[r], wrow + k) * x(k, c);
                if (sgn(s) != 0) m(r, local[bcol + c]) += tm1 * Polynomial(s);
            }
    }
    return det(m);
}

/// Draws covers with probability wt / Z from the enumerated distribution. Uniforms are
/// u / 2^64 from mt19937_64 and are compared exactly against cumulative probabilities.
inline std::vector<Cover> sample_covers(const EmbeddedGraph<Rational>& g, std::size_t count, std::uint64_t seed,
                                        const OracleLimits& lim = OracleLimits::from_env()) {
    const auto wc = weighted_covers(g, lim);
    if (sgn(wc.Z) <= 0) throw input_error("sampling needs a positive partition function");
    std::vector<Rational> cumulative;
    Rational acc = 0;
    for (const auto& w : wc.weights) {
        if (sgn(w) < 0) throw input_error("sampling needs nonnegative cover weights");
        acc += w / wc.Z;
        cumulative.push_back(acc);
    }
    std::mt19937_64 rng(seed);
    mpz_class two64 = 1;
    two64 <<= 64;
    std::vector<Cover> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        const std::uint64_t raw = rng();
        mpz_class num;
        mpz_import(num.get_mpz_t(), 1, 1, sizeof raw, 0, 0, &raw);
        Rational u(num, two64);
        u.canonicalize();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        out.push_back(wc.covers[static_cast<std::size_t>(it - cumulative.begin())]);
    }
    return out;
}

} // namespace dimerlab

#endif
