#ifndef DIMERLAB_MATRIX_HPP
#define DIMERLAB_MATRIX_HPP

#include <dimerlab/errors.hpp>
#include <dimerlab/scalar.hpp>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace dimerlab {

/// Dense row-major matrix over a scalar kind. Shapes are checked on every operation.
template <typename T>
class Matrix {
public:
    using value_type = T;
    using traits = scalar_traits<T>;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, traits::zero()) {}
    Matrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw input_error("ragged matrix initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = traits::one();
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_) throw input_error("block out of range");
        Matrix out(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
        return out;
    }

    void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
        if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw input_error("set_block out of range");
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
    }

    Matrix submatrix(std::span<const std::size_t> row_idx, std::span<const std::size_t> col_idx) const {
        Matrix out(row_idx.size(), col_idx.size());
        for (std::size_t i = 0; i < row_idx.size(); ++i)
            for (std::size_t j = 0; j < col_idx.size(); ++j) {
                if (row_idx[i] >= rows_ || col_idx[j] >= cols_) throw input_error("index out of range");
                out(i, j) = (*this)(row_idx[i], col_idx[j]);
            }
        return out;
    }

    Matrix transpose() const {
        Matrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    T trace() const {
        if (!is_square()) throw input_error("trace of non-square matrix");
        T t = traits::zero();
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const T& x) { return traits::is_zero(x); });
    }

    template <typename F>
    auto map(F&& f) const {
        using U = std::decay_t<decltype(f(std::declval<const T&>()))>;
        Matrix<U> out(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(i, j) = f((*this)(i, j));
        return out;
    }

    Matrix& operator+=(const Matrix& o) {
        check_same(o, "+");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same(o, "-");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(const T& s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator-(Matrix a) {
        for (auto& x : a.data_) x = -x;
        return a;
    }
    friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
    friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_)
            throw input_error("matrix product shape mismatch " + a.shape() + " * " + b.shape());
        Matrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T& aik = a(i, k);
                if (traits::is_zero(aik)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

private:
    void check_same(const Matrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw input_error(std::string("shape mismatch in ") + op + ": " + shape() + " vs " + o.shape());
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Flat matrix partitioned into blocks; block (i, j) has row_sizes[i] x col_sizes[j] entries.
template <typename T>
class BlockMatrix {
public:
    BlockMatrix() = default;
    BlockMatrix(std::vector<std::size_t> row_sizes, std::vector<std::size_t> col_sizes)
        : row_sizes_(std::move(row_sizes)), col_sizes_(std::move(col_sizes)) {
        row_off_ = offsets(row_sizes_);
        col_off_ = offsets(col_sizes_);
        flat_ = Matrix<T>(row_off_.back(), col_off_.back());
    }
    BlockMatrix(std::vector<std::size_t> row_sizes, std::vector<std::size_t> col_sizes, Matrix<T> flat)
        : BlockMatrix(std::move(row_sizes), std::move(col_sizes)) {
        if (flat.rows() != flat_.rows() || flat.cols() != flat_.cols())
            throw input_error("block sizes do not match flat matrix");
        flat_ = std::move(flat);
    }

    std::size_t block_rows() const { return row_sizes_.size(); }
    std::size_t block_cols() const { return col_sizes_.size(); }
    const std::vector<std::size_t>& row_sizes() const { return row_sizes_; }
    const std::vector<std::size_t>& col_sizes() const { return col_sizes_; }
    std::size_t row_offset(std::size_t i) const { return row_off_.at(i); }
    std::size_t col_offset(std::size_t j) const { return col_off_.at(j); }

    const Matrix<T>& flat() const { return flat_; }
    Matrix<T>& flat() { return flat_; }

    Matrix<T> block(std::size_t i, std::size_t j) const {
        return flat_.block(row_off_.at(i), col_off_.at(j), row_sizes_.at(i), col_sizes_.at(j));
    }
    void set_block(std::size_t i, std::size_t j, const Matrix<T>& b) {
        if (b.rows() != row_sizes_.at(i) || b.cols() != col_sizes_.at(j))
            throw input_error("block (" + std::to_string(i) + "," + std::to_string(j) + ") expects " +
                              std::to_string(row_sizes_[i]) + "x" + std::to_string(col_sizes_[j]) + ", got " +
                              b.shape());
        flat_.set_block(row_off_[i], col_off_[j], b);
    }
    void add_to_block(std::size_t i, std::size_t j, const Matrix<T>& b) { set_block(i, j, block(i, j) + b); }

    /// Flat row indices covered by the given block rows.
    std::vector<std::size_t> row_indices(std::span<const std::size_t> blocks) const {
        return expand(blocks, row_off_, row_sizes_);
    }
    std::vector<std::size_t> col_indices(std::span<const std::size_t> blocks) const {
        return expand(blocks, col_off_, col_sizes_);
    }

private:
    static std::vector<std::size_t> offsets(const std::vector<std::size_t>& sizes) {
        std::vector<std::size_t> off(sizes.size() + 1, 0);
        std::partial_sum(sizes.begin(), sizes.end(), off.begin() + 1);
        return off;
    }
    static std::vector<std::size_t> expand(std::span<const std::size_t> blocks, const std::vector<std::size_t>& off,
                                           const std::vector<std::size_t>& sizes) {
        std::vector<std::size_t> idx;
        for (std::size_t b : blocks)
            for (std::size_t k = 0; k < sizes.at(b); ++k) idx.push_back(off[b] + k);
        return idx;
    }

    std::vector<std::size_t> row_sizes_, col_sizes_;
    std::vector<std::size_t> row_off_{0}, col_off_{0};
    Matrix<T> flat_;
};

namespace detail {

template <typename T>
std::size_t choose_pivot(const Matrix<T>& a, std::size_t col, std::size_t from) {
    std::size_t best = a.rows();
    if constexpr (scalar_traits<T>::is_exact) {
        for (std::size_t r = from; r < a.rows(); ++r)
            if (!scalar_traits<T>::is_zero(a(r, col))) return r;
    } else {
        double best_abs = 0.0;
        for (std::size_t r = from; r < a.rows(); ++r) {
            double v = scalar_traits<T>::abs(a(r, col));
            if (v > best_abs) {
                best_abs = v;
                best = r;
            }
        }
    }
    return best;
}

template <typename T>
void swap_rows(Matrix<T>& a, std::size_t r1, std::size_t r2) {
    for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(r1, j), a(r2, j));
}

/// Division-free determinant (Bird's algorithm): X_1 = A, X_{k+1} = mu(X_k) A with
/// mu(X) upper triangular, mu_ii = -(x_{i+1,i+1} + ... + x_nn). det A = (-1)^{n-1} (X_n)_{11}.
template <typename T>
T bird_det(const Matrix<T>& a) {
    const std::size_t n = a.rows();
    using tr = scalar_traits<T>;
    if (n == 0) return tr::one();
    Matrix<T> x = a;
    for (std::size_t step = 1; step < n; ++step) {
        Matrix<T> mu(n, n);
        T tail = tr::zero();
        for (std::size_t i = n; i-- > 0;) {
            mu(i, i) = -tail;
            tail += x(i, i);
            for (std::size_t j = i + 1; j < n; ++j) mu(i, j) = x(i, j);
        }
        x = mu * a;
    }
    return (n % 2 == 1) ? x(0, 0) : T(-x(0, 0));
}

} // namespace detail

/// Exact determinant over a field by pivoted elimination; division-free over polynomial rings.
template <typename T>
T det(const Matrix<T>& m) {
    using tr = scalar_traits<T>;
    if (!m.is_square()) throw input_error("det of non-square matrix " + m.shape());
    if constexpr (!tr::is_field) {
        return detail::bird_det(m);
    } else {
        const std::size_t n = m.rows();
        Matrix<T> a = m;
        T d = tr::one();
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = detail::choose_pivot(a, k, k);
            if (p == n) return tr::zero();
            if (p != k) {
                detail::swap_rows(a, p, k);
                d = -d;
            }
            const T pivot = a(k, k);
            d *= pivot;
            for (std::size_t r = k + 1; r < n; ++r) {
                if (tr::is_zero(a(r, k))) continue;
                const T f = a(r, k) / pivot;
                for (std::size_t c = k; c < n; ++c) a(r, c) -= f * a(k, c);
            }
        }
        return d;
    }
}

/// Gauss-Jordan inverse. Throws singular_matrix when no inverse exists.
template <Field T>
Matrix<T> inverse(const Matrix<T>& m) {
    using tr = scalar_traits<T>;
    if (!m.is_square()) throw input_error("inverse of non-square matrix " + m.shape());
    const std::size_t n = m.rows();
    Matrix<T> a = m;
    Matrix<T> inv = Matrix<T>::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = detail::choose_pivot(a, k, k);
        if (p == n) throw singular_matrix("matrix is singular (" + m.shape() + ")");
        if (p != k) {
            detail::swap_rows(a, p, k);
            detail::swap_rows(inv, p, k);
        }
        const T pivot = a(k, k);
        for (std::size_t c = 0; c < n; ++c) {
            a(k, c) /= pivot;
            inv(k, c) /= pivot;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == k || tr::is_zero(a(r, k))) continue;
            const T f = a(r, k);
            for (std::size_t c = 0; c < n; ++c) {
                a(r, c) -= f * a(k, c);
                inv(r, c) -= f * inv(k, c);
            }
        }
    }
    return inv;
}

/// Delta_{I,J}(m): determinant of the rows I and columns J (0-based). The empty minor is 1.
template <typename T>
T minor(const Matrix<T>& m, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    if (rows.size() != cols.size())
        throw input_error("minor needs |I| = |J|, got " + std::to_string(rows.size()) + " and " +
                          std::to_string(cols.size()));
    return det(m.submatrix(rows, cols));
}

/// Schur complement of the square sub-block D = m[rows, cols]: A - B D^{-1} C, where A, B, C
/// are the complementary row/column selections (order preserved).
template <Field T>
Matrix<T> schur(const Matrix<T>& m, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    if (rows.size() != cols.size()) throw input_error("Schur complement needs a square block");
    auto complement = [](std::span<const std::size_t> sel, std::size_t n) {
        std::vector<bool> used(n, false);
        for (std::size_t i : sel) {
            if (i >= n || used[i]) throw input_error("bad Schur block index");
            used[i] = true;
        }
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < n; ++i)
            if (!used[i]) out.push_back(i);
        return out;
    };
    const auto other_rows = complement(rows, m.rows());
    const auto other_cols = complement(cols, m.cols());
    const Matrix<T> d = m.submatrix(rows, cols);
    const Matrix<T> a = m.submatrix(other_rows, other_cols);
    const Matrix<T> b = m.submatrix(other_rows, cols);
    const Matrix<T> c = m.submatrix(rows, other_cols);
    return a - b * inverse(d) * c;
}

/// Schur complement with respect to the block (bi, bj) of a block matrix.
template <Field T>
Matrix<T> schur(const BlockMatrix<T>& m, std::size_t bi, std::size_t bj) {
    const std::size_t r[] = {bi};
    const std::size_t c[] = {bj};
    return schur(m.flat(), m.row_indices(r), m.col_indices(c));
}

/// Elementary symmetric functions e_0..e_n of the eigenvalues of m, from power traces via
/// Newton's identities: k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} tr(m^i).
template <Field T>
std::vector<T> char_coeffs(const Matrix<T>& m) {
    using tr = scalar_traits<T>;
    if (!m.is_square()) throw input_error("char_coeffs of non-square matrix");
    const std::size_t n = m.rows();
    std::vector<T> p(n + 1, tr::zero());
    Matrix<T> power = Matrix<T>::identity(n);
    for (std::size_t i = 1; i <= n; ++i) {
        power = power * m;
        p[i] = power.trace();
    }
    std::vector<T> e(n + 1, tr::zero());
    e[0] = tr::one();
    for (std::size_t k = 1; k <= n; ++k) {
        T acc = tr::zero();
        for (std::size_t i = 1; i <= k; ++i) {
            T term = e[k - i] * p[i];
            if (i % 2 == 1) acc += term;
            else acc -= term;
        }
        e[k] = acc / tr::from_int(static_cast<long>(k));
    }
    return e;
}

template <typename T>
Matrix<T> matrix_power(const Matrix<T>& m, unsigned k) {
    Matrix<T> r = Matrix<T>::identity(m.rows());
    for (unsigned i = 0; i < k; ++i) r = r * m;
    return r;
}

template <typename T>
std::string to_string(const Matrix<T>& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        s += i ? ", [" : "[";
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) s += ", ";
            s += scalar_traits<T>::to_string(m(i, j));
        }
        s += "]";
    }
    return s + "]";
}

} // namespace dimerlab

#endif
