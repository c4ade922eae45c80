#ifndef DIMERLAB_ZOO_HPP
#define DIMERLAB_ZOO_HPP

#include <dimerlab/graph.hpp>
#include <dimerlab/kasteleyn.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace dimerlab {

/// n x n identity of the given scalar kind.
template <typename T>
Matrix<T> eye(std::size_t n) {
    return Matrix<T>::identity(n);
}

/// Two vertices joined by one edge named "e" with weight W (square).
template <typename T>
EmbeddedGraph<T> single_edge(const Matrix<T>& W) {
    GeometricBuilder<T> gb;
    auto w = gb.vertex("w", Color::white, W.rows(), 0, 1);
    auto b = gb.vertex("b", Color::black, W.cols(), 0, 0);
    gb.edge("e", w, b, W);
    return gb.build();
}

/// Square with black corners bottom-left and top-right; A left, B bottom, C right, D top.
/// Cilia point outward, so K = [[A, -D], [B, C]] with rows (w1 top-left, w2 bottom-right).
template <typename T>
EmbeddedGraph<T> four_cycle(const Matrix<T>& A, const Matrix<T>& B, const Matrix<T>& C, const Matrix<T>& D) {
    const std::size_t n = A.rows();
    constexpr double pi = std::numbers::pi;
    GeometricBuilder<T> gb;
    auto w1 = gb.vertex("w1", Color::white, n, 0, 1, 3 * pi / 4);
    auto w2 = gb.vertex("w2", Color::white, n, 1, 0, -pi / 4);
    auto b1 = gb.vertex("b1", Color::black, n, 0, 0, -3 * pi / 4);
    auto b2 = gb.vertex("b2", Color::black, n, 1, 1, pi / 4);
    gb.edge("A", w1, b1, A);
    gb.edge("B", w2, b1, B);
    gb.edge("C", w2, b2, C);
    gb.edge("D", w1, b2, D);
    return gb.build();
}

template <typename T>
EmbeddedGraph<T> four_cycle_uniform(std::size_t n) {
    return four_cycle<T>(eye<T>(n), eye<T>(n), eye<T>(n), eye<T>(n));
}

/// 2x3 grid with black (0,0), (1,1), (2,0), outward cilia and weights
/// A (left), B, C (bottom), M (middle), D (right), F, E (top).
template <typename T>
EmbeddedGraph<T> dimerwt_graph(const Matrix<T>& A, const Matrix<T>& B, const Matrix<T>& C, const Matrix<T>& D,
                               const Matrix<T>& E, const Matrix<T>& F, const Matrix<T>& M) {
    const std::size_t n = A.rows();
    constexpr double pi = std::numbers::pi;
    GeometricBuilder<T> gb;
    auto b00 = gb.vertex("b00", Color::black, n, 0, 0, -3 * pi / 4);
    auto w10 = gb.vertex("w10", Color::white, n, 1, 0, -pi / 2);
    auto b20 = gb.vertex("b20", Color::black, n, 2, 0, -pi / 4);
    auto w21 = gb.vertex("w21", Color::white, n, 2, 1, pi / 4);
    auto b11 = gb.vertex("b11", Color::black, n, 1, 1, pi / 2);
    auto w01 = gb.vertex("w01", Color::white, n, 0, 1, 3 * pi / 4);
    gb.edge("A", w01, b00, A);
    gb.edge("B", w10, b00, B);
    gb.edge("M", w10, b11, M);
    gb.edge("F", w01, b11, F);
    gb.edge("C", w10, b20, C);
    gb.edge("D", w21, b20, D);
    gb.edge("E", w21, b11, E);
    return gb.build();
}

/// The 2x3 grid with multiplicities 1, 2, 3 by column; a is 1x1, B 2x2, C 3x3 and the
/// horizontal edges carry the partial identities of the worked example.
template <typename T>
EmbeddedGraph<T> mixed_ex(const Matrix<T>& a, const Matrix<T>& B, const Matrix<T>& C) {
    constexpr double pi = std::numbers::pi;
    using tr = scalar_traits<T>;
    GeometricBuilder<T> gb;
    auto b00 = gb.vertex("b00", Color::black, 1, 0, 0, -3 * pi / 4);
    auto w01 = gb.vertex("w01", Color::white, 1, 0, 1, 3 * pi / 4);
    auto w10 = gb.vertex("w10", Color::white, 2, 1, 0, -pi / 2);
    auto b11 = gb.vertex("b11", Color::black, 2, 1, 1, pi / 2);
    auto b20 = gb.vertex("b20", Color::black, 3, 2, 0, -pi / 4);
    auto w21 = gb.vertex("w21", Color::white, 3, 2, 1, pi / 4);
    Matrix<T> top(1, 2), bottom(2, 1), bottom_right(2, 3), top_right(3, 2);
    top(0, 0) = tr::one();
    bottom(0, 0) = tr::one();
    bottom_right(0, 0) = bottom_right(1, 1) = tr::one();
    top_right(0, 0) = top_right(1, 1) = tr::one();
    gb.edge("a", w01, b00, a);
    gb.edge("top", w01, b11, top);
    gb.edge("B", w10, b11, B);
    gb.edge("C", w21, b20, C);
    gb.edge("bottomright", w10, b20, bottom_right);
    gb.edge("bottom", w10, b00, bottom);
    gb.edge("topright", w21, b11, top_right);
    return gb.build();
}

template <typename T>
EmbeddedGraph<T> mixed_ex_identity() {
    return mixed_ex<T>(eye<T>(1), eye<T>(2), eye<T>(3));
}

/// 2 x (N+1) grid: vertical weights B_0..B_N, A_i on (w_{i-1}, b_i), C_i on (w_i, b_{i-1}).
/// A and C default to the identity when left empty.
template <typename T>
struct GridSpec {
    std::vector<Matrix<T>> B;
    std::vector<Matrix<T>> A;  // A[i-1] is A_i
    std::vector<Matrix<T>> C;  // C[i-1] is C_i

    std::size_t N() const { return B.size() - 1; }
    std::size_t n() const { return B.front().rows(); }
    Matrix<T> a(std::size_t i) const { return A.empty() ? eye<T>(n()) : A.at(i - 1); }
    Matrix<T> c(std::size_t i) const { return C.empty() ? eye<T>(n()) : C.at(i - 1); }
};

/// Vertex names "w<i>", "b<i>"; edge names "v<i>" (B_i), "a<i>" (A_i), "c<i>" (C_i).
/// Column i has its black vertex at the bottom when i is even. Edges are added as
/// B_0..B_N, A_1..A_N, C_1..C_N so the solved signs put the minus on the C edges.
template <typename T>
EmbeddedGraph<T> grid_graph(const GridSpec<T>& spec) {
    if (spec.B.empty()) throw input_error("grid needs at least one vertical weight");
    const std::size_t N = spec.N(), n = spec.n();
    for (const auto& b : spec.B)
        if (b.rows() != n || b.cols() != n) throw input_error("grid weights must all be n x n");
    if ((!spec.A.empty() && spec.A.size() != N) || (!spec.C.empty() && spec.C.size() != N))
        throw input_error("grid needs N horizontal weights of each kind");
    constexpr double pi = std::numbers::pi;
    GeometricBuilder<T> gb;
    std::vector<VertexId> w(N + 1), b(N + 1);
    for (std::size_t i = 0; i <= N; ++i) {
        const double yb = i % 2 == 0 ? 0 : 1;
        auto cilium = [&](double y) {
            if (y == 0) return i == 0 ? -3 * pi / 4 : (i == N ? -pi / 4 : -pi / 2);
            return i == 0 ? 3 * pi / 4 : (i == N ? pi / 4 : pi / 2);
        };
        w[i] = gb.vertex("w" + std::to_string(i), Color::white, n, double(i), 1 - yb, cilium(1 - yb));
        b[i] = gb.vertex("b" + std::to_string(i), Color::black, n, double(i), yb, cilium(yb));
    }
    for (std::size_t i = 0; i <= N; ++i) gb.edge("v" + std::to_string(i), w[i], b[i], spec.B[i]);
    for (std::size_t i = 1; i <= N; ++i) gb.edge("a" + std::to_string(i), w[i - 1], b[i], spec.a(i));
    for (std::size_t i = 1; i <= N; ++i) gb.edge("c" + std::to_string(i), w[i], b[i - 1], spec.c(i));
    return gb.build();
}

template <typename T>
GridSpec<T> uniform_grid(std::size_t N, std::size_t n) {
    GridSpec<T> s;
    s.B.assign(N + 1, eye<T>(n));
    return s;
}

/// F_{i,j} = [B_i, B_{i+-1}, ..., B_j]: M_j = B_j, M_k = B_k + M_{k+-1}^{-1}, F_{i,j} = M_i.
template <Field T>
Matrix<T> continued_fraction(const std::vector<Matrix<T>>& B, std::size_t i, std::size_t j) {
    if (i >= B.size() || j >= B.size()) throw input_error("continued fraction index out of range");
    Matrix<T> m = B[j];
    std::size_t k = j;
    while (k != i) {
        k = i < j ? k - 1 : k + 1;
        m = B[k] + inverse(m);
    }
    return m;
}

/// Gauge at every vertex that turns all A_i and C_i into the identity: K' = L K R with
/// L, R block diagonal. Returns (L, R, B') with B'_i = L_i B_i R_i.
template <Field T>
struct GridGauge {
    std::vector<Matrix<T>> L, R, B;
};

template <Field T>
GridGauge<T> grid_identity_gauge(const GridSpec<T>& s) {
    const std::size_t N = s.N();
    GridGauge<T> g;
    g.L.assign(N + 1, eye<T>(s.n()));
    g.R.assign(N + 1, eye<T>(s.n()));
    for (std::size_t i = 0; i < N; ++i) {
        g.R[i + 1] = inverse(g.L[i] * s.a(i + 1));
        g.L[i + 1] = inverse(s.c(i + 1) * g.R[i]);
    }
    for (std::size_t i = 0; i <= N; ++i) g.B.push_back(g.L[i] * s.B[i] * g.R[i]);
    return g;
}

/// P for the vertical edge B_i: (B_i^{-1} F_{i,N} + B_i^{-1} F_{i,0} - I)^{-1}.
template <Field T>
Matrix<T> grid_vertical_P(const GridSpec<T>& s, std::size_t i) {
    const auto g = grid_identity_gauge(s);
    const std::size_t N = s.N();
    const Matrix<T> binv = inverse(g.B.at(i));
    const Matrix<T> p = inverse(binv * continued_fraction(g.B, i, N) + binv * continued_fraction(g.B, i, 0) -
                                eye<T>(s.n()));
    return g.R[i] * p * inverse(g.R[i]);
}

/// Which horizontal edge between columns i-1 and i.
enum class Horizontal { a, c };

/// P for a_i = (w_{i-1}, b_i): (I + F_{i-1,0} F_{i,N})^{-1}; for c_i = (w_i, b_{i-1}):
/// (I + F_{i,N} F_{i-1,0})^{-1}.
template <Field T>
Matrix<T> grid_horizontal_P(const GridSpec<T>& s, std::size_t i, Horizontal kind) {
    if (i < 1 || i > s.N()) throw input_error("horizontal edge index out of range");
    const auto g = grid_identity_gauge(s);
    const std::size_t N = s.N();
    const Matrix<T> left = continued_fraction(g.B, i - 1, 0);
    const Matrix<T> right = continued_fraction(g.B, i, N);
    if (kind == Horizontal::a) {
        const Matrix<T> p = inverse(eye<T>(s.n()) + left * right);
        return g.R[i] * p * inverse(g.R[i]);
    }
    const Matrix<T> p = inverse(eye<T>(s.n()) + right * left);
    return g.R[i - 1] * p * inverse(g.R[i - 1]);
}

/// K^{[0],[0]} = F_{0,N}^{-1} in the identity-horizontal gauge, pulled back to the given weights.
template <Field T>
Matrix<T> grid_corner_inverse_block(const GridSpec<T>& s) {
    const auto g = grid_identity_gauge(s);
    return g.R[0] * inverse(continued_fraction(g.B, 0, s.N())) * g.L[0];
}

/// P = P''(P' + P'' - P'P'')^{-1} P' from the probability matrices of the same edge in the
/// left and right subgrids.
template <Field T>
Matrix<T> grid_split_P(const Matrix<T>& left, const Matrix<T>& right) {
    return right * inverse(left + right - left * right) * left;
}

/// Cov(m_{v_i}, m_{v_j}) for vertical edges, i < j:
/// (-1)^{j-i+1} tr(P_i F_{i,0}^{-1} ... F_{j-1,0}^{-1} P_j F_{j,N}^{-1} ... F_{i+1,N}^{-1}).
template <Field T>
T grid_covariance(const GridSpec<T>& s, std::size_t i, std::size_t j) {
    if (!(i < j) || j > s.N()) throw input_error("grid covariance needs i < j <= N");
    const auto g = grid_identity_gauge(s);
    const std::size_t N = s.N();
    auto vertical = [&](std::size_t k) {
        const Matrix<T> binv = inverse(g.B[k]);
        return inverse(binv * continued_fraction(g.B, k, N) + binv * continued_fraction(g.B, k, 0) - eye<T>(s.n()));
    };
    Matrix<T> prod = vertical(i);
    for (std::size_t k = i; k < j; ++k) prod = prod * inverse(continued_fraction(g.B, k, 0));
    prod = prod * vertical(j);
    for (std::size_t k = j; k > i; --k) prod = prod * inverse(continued_fraction(g.B, k, N));
    T t = prod.trace();
    return (j - i) % 2 == 1 ? t : T(-t);
}

/// Fibonacci numbers with f_0 = 0, f_1 = 1.
inline mpz_class fibonacci(unsigned k) {
    mpz_class a = 0, b = 1;
    for (unsigned i = 0; i < k; ++i) {
        mpz_class t = a + b;
        a = b;
        b = t;
    }
    return a;
}

/// Parity-split q-Fibonacci recurrences evaluated at a matrix argument Q:
///   F_n = Q F_{n-1} + F_{n-2} (n even), F_{n-1} + Q^2 F_{n-2} (n odd), F_0 = F_1 = I;
///   G_n = G_{n-1} + Q^2 G_{n-2} (n even), Q G_{n-1} + G_{n-2} (n odd), G_1 = I.
/// G_0 = Q^{-1} makes qG_N / F_{N+1} the left vertical edge probability; printed_seed = true
/// uses G_0 = I instead, which only agrees for N <= 1 or Q = I.
template <Field T>
std::pair<Matrix<T>, Matrix<T>> q_fibonacci(std::size_t N, const Matrix<T>& Q, bool printed_seed = false) {
    const std::size_t n = Q.rows();
    const Matrix<T> I = eye<T>(n), Q2 = Q * Q;
    std::vector<Matrix<T>> F{I, I}, G{printed_seed ? I : inverse(Q), I};
    for (std::size_t k = 2; k <= N + 1; ++k) {
        if (k % 2 == 0) {
            F.push_back(Q * F[k - 1] + F[k - 2]);
            G.push_back(G[k - 1] + Q2 * G[k - 2]);
        } else {
            F.push_back(F[k - 1] + Q2 * F[k - 2]);
            G.push_back(Q * G[k - 1] + G[k - 2]);
        }
    }
    return {F[N + 1], G[N]};
}

/// tr(Q G_N(Q) F_{N+1}(Q)^{-1}).
template <Field T>
T q_fibonacci_trace(std::size_t N, const Matrix<T>& Q, bool printed_seed = false) {
    auto [F, G] = q_fibonacci(N, Q, printed_seed);
    return (Q * G * inverse(F)).trace();
}

/// Grid with B = C = I and A_i = Q for even i, Q^{-1} for odd i; paired with the trace formula.
template <Field T>
std::pair<EmbeddedGraph<T>, T> q_fibonacci_grid(std::size_t N, const Matrix<T>& Q) {
    GridSpec<T> s = uniform_grid<T>(N, Q.rows());
    const Matrix<T> qi = inverse(Q);
    for (std::size_t i = 1; i <= N; ++i) s.A.push_back(i % 2 == 0 ? Q : qi);
    return {grid_graph(s), q_fibonacci_trace(N, Q)};
}

template <Field T>
GridSpec<T> q_fibonacci_spec(std::size_t N, const Matrix<T>& Q) {
    GridSpec<T> s = uniform_grid<T>(N, Q.rows());
    const Matrix<T> qi = inverse(Q);
    for (std::size_t i = 1; i <= N; ++i) s.A.push_back(i % 2 == 0 ? Q : qi);
    return s;
}

/// Six-vertex lattice: black vertices (multiplicity 2) at lattice points x in [0, cols),
/// y in [0, rows), white midpoints (multiplicity 1) on lattice edges and pendant whites on the
/// left and right ends of each row (domain wall). The edge from black b towards direction d
/// carries v_d: v_E = (1,0), v_N = (c,s), v_W = (0,1), v_S = (-s,c). Black cilia point
/// south-east so each vertex reads E, N, W, S and every local weight is a positive minor.
/// Edge names are "x<X>y<Y>-<D>".
template <typename T>
EmbeddedGraph<T> six_vertex(std::size_t rows, std::size_t cols, const T& c, const T& s) {
    if (rows < 1 || cols < 1) throw input_error("six-vertex lattice needs rows, cols >= 1");
    constexpr double pi = std::numbers::pi;
    using tr = scalar_traits<T>;
    auto vec = [&](char d) {
        Matrix<T> v(1, 2);
        switch (d) {
            case 'E': v(0, 0) = tr::one(); break;
            case 'N': v(0, 0) = c; v(0, 1) = s; break;
            case 'W': v(0, 1) = tr::one(); break;
            default: v(0, 0) = -s; v(0, 1) = c; break;
        }
        return v;
    };
    GeometricBuilder<T> gb;
    std::vector<std::vector<VertexId>> black(cols, std::vector<VertexId>(rows));
    for (std::size_t y = 0; y < rows; ++y)
        for (std::size_t x = 0; x < cols; ++x)
            black[x][y] = gb.vertex("x" + std::to_string(x) + "y" + std::to_string(y), Color::black, 2, 2.0 * x,
                                    2.0 * y, -pi / 4);
    auto name = [](std::size_t x, std::size_t y, char d) {
        return "x" + std::to_string(x) + "y" + std::to_string(y) + "-" + d;
    };
    for (std::size_t y = 0; y < rows; ++y) {
        auto wl = gb.vertex("pL" + std::to_string(y), Color::white, 1, -1.0, 2.0 * y);
        gb.edge(name(0, y, 'W'), wl, black[0][y], vec('W'));
        for (std::size_t x = 0; x + 1 < cols; ++x) {
            auto w = gb.vertex("h" + std::to_string(x) + "_" + std::to_string(y), Color::white, 1, 2.0 * x + 1, 2.0 * y);
            gb.edge(name(x, y, 'E'), w, black[x][y], vec('E'));
            gb.edge(name(x + 1, y, 'W'), w, black[x + 1][y], vec('W'));
        }
        auto wr = gb.vertex("pR" + std::to_string(y), Color::white, 1, 2.0 * cols - 1, 2.0 * y);
        gb.edge(name(cols - 1, y, 'E'), wr, black[cols - 1][y], vec('E'));
    }
    for (std::size_t x = 0; x < cols; ++x)
        for (std::size_t y = 0; y + 1 < rows; ++y) {
            auto w = gb.vertex("u" + std::to_string(x) + "_" + std::to_string(y), Color::white, 1, 2.0 * x, 2.0 * y + 1);
            gb.edge(name(x, y, 'N'), w, black[x][y], vec('N'));
            gb.edge(name(x, y + 1, 'S'), w, black[x][y + 1], vec('S'));
        }
    return gb.build();
}

/// Float-backend lattice at angle theta.
inline EmbeddedGraph<double> six_vertex_angle(std::size_t rows, std::size_t cols, double theta) {
    return six_vertex<double>(rows, cols, std::cos(theta), std::sin(theta));
}

/// c1 c2 == a1 a2 + b1 b2, exactly for exact scalars.
template <typename T>
bool free_fermion_check(const T& a1, const T& a2, const T& b1, const T& b2, const T& c1, const T& c2) {
    return c1 * c2 == a1 * a2 + b1 * b2;
}

/// The six local weights of a 4 x 2 matrix with rows v_E, v_N, v_W, v_S read in that order:
/// a1 = (E,N), a2 = (W,S), b1 = (N,W), b2 = (E,S), c1 = (E,W), c2 = (N,S).
template <typename T>
std::array<T, 6> six_vertex_weights(const Matrix<T>& v) {
    auto m = [&](std::size_t i, std::size_t j) -> T { return v(i, 0) * v(j, 1) - v(i, 1) * v(j, 0); };
    return {m(0, 1), m(2, 3), m(1, 2), m(0, 3), m(0, 2), m(1, 3)};
}

} // namespace dimerlab

#endif
