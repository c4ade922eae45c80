#ifndef DIMERLAB_POLYNOMIAL_HPP
#define DIMERLAB_POLYNOMIAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace dimerlab {

/// Exponent vector; trailing zeros are always trimmed so equal monomials compare equal.
using Monomial = std::vector<std::uint32_t>;

inline void trim(Monomial& m) {
    while (!m.empty() && m.back() == 0) m.pop_back();
}

/// Multivariate polynomial with rational coefficients over formal variables t_0, t_1, ...
/// A commutative ring: no division.
class Polynomial {
public:
    using Terms = std::map<Monomial, mpq_class>;

    Polynomial() = default;
    Polynomial(long c) { if (c != 0) terms_[Monomial{}] = c; }  // NOLINT: implicit by design of scalar code
    Polynomial(const mpq_class& c) { if (sgn(c) != 0) terms_[Monomial{}] = c; }  // NOLINT

    static Polynomial variable(std::size_t index) {
        Monomial m(index + 1, 0);
        m[index] = 1;
        Polynomial p;
        p.terms_[m] = 1;
        return p;
    }

    static Polynomial monomial(Monomial m, const mpq_class& coeff) {
        trim(m);
        Polynomial p;
        if (sgn(coeff) != 0) p.terms_[std::move(m)] = coeff;
        return p;
    }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    mpq_class coefficient(Monomial m) const {
        trim(m);
        auto it = terms_.find(m);
        return it == terms_.end() ? mpq_class(0) : it->second;
    }

    mpq_class constant_term() const { return coefficient({}); }

    std::size_t num_variables() const {
        std::size_t n = 0;
        for (const auto& [m, c] : terms_) n = std::max(n, m.size());
        return n;
    }

    /// Total degree in variable `var`.
    std::uint32_t degree_in(std::size_t var) const {
        std::uint32_t d = 0;
        for (const auto& [m, c] : terms_)
            if (var < m.size()) d = std::max(d, m[var]);
        return d;
    }

    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    Polynomial& operator*=(const Polynomial& o) {
        *this = *this * o;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(Polynomial a) {
        for (auto& [m, c] : a.terms_) c = -c;
        return a;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial r;
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                Monomial m(std::max(ma.size(), mb.size()), 0);
                for (std::size_t i = 0; i < ma.size(); ++i) m[i] += ma[i];
                for (std::size_t i = 0; i < mb.size(); ++i) m[i] += mb[i];
                mpq_class c = ca * cb;
                r.add_term(m, c);
            }
        }
        return r;
    }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

    /// Partial derivative with respect to variable `var`.
    Polynomial derivative(std::size_t var) const {
        Polynomial r;
        for (const auto& [m, c] : terms_) {
            if (var >= m.size() || m[var] == 0) continue;
            Monomial d = m;
            mpq_class coeff = c * d[var];
            --d[var];
            trim(d);
            r.add_term(d, coeff);
        }
        return r;
    }

    mpq_class evaluate(std::span<const mpq_class> point) const {
        mpq_class total = 0;
        for (const auto& [m, c] : terms_) {
            mpq_class term = c;
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (m[i] == 0) continue;
                const mpq_class x = i < point.size() ? point[i] : mpq_class(0);
                for (std::uint32_t k = 0; k < m[i]; ++k) term *= x;
            }
            total += term;
        }
        return total;
    }

    /// Substitute a value for one variable, keeping the rest formal.
    Polynomial substitute(std::size_t var, const mpq_class& value) const {
        Polynomial r;
        for (const auto& [m, c] : terms_) {
            Monomial d = m;
            mpq_class coeff = c;
            if (var < d.size()) {
                for (std::uint32_t k = 0; k < d[var]; ++k) coeff *= value;
                d[var] = 0;
                trim(d);
            }
            r.add_term(d, coeff);
        }
        return r;
    }

    std::string to_string(const std::vector<std::string>& names = {}) const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            if (!first) os << (sgn(c) < 0 ? " - " : " + ");
            else if (sgn(c) < 0) os << "-";
            first = false;
            const mpq_class a = abs(c);
            const bool constant = m.empty();
            if (constant || a != 1) os << a.get_str();
            bool need_star = !constant && a != 1;
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (m[i] == 0) continue;
                if (need_star) os << "*";
                os << (i < names.size() ? names[i] : "t" + std::to_string(i));
                if (m[i] > 1) os << "^" << m[i];
                need_star = true;
            }
        }
        return os.str();
    }

private:
    void add_term(const Monomial& m, const mpq_class& c) {
        if (sgn(c) == 0) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (sgn(it->second) == 0) terms_.erase(it);
        }
    }

    Terms terms_;
};

inline std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << p.to_string(); }

} // namespace dimerlab

#endif
