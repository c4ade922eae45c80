#ifndef DIMERLAB_SCALAR_HPP
#define DIMERLAB_SCALAR_HPP

#include <dimerlab/errors.hpp>
#include <dimerlab/polynomial.hpp>

#include <gmpxx.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>

namespace dimerlab {

using Rational = mpq_class;

/// Per-scalar policy. Three kinds are supported: exact rationals (the default),
/// binary floats, and multivariate polynomials over the rationals.
template <typename T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
    static constexpr bool is_field = true;
    static constexpr bool is_exact = true;
    static constexpr bool is_ordered = true;

    static Rational zero() { return 0; }
    static Rational one() { return 1; }
    static Rational from_int(long v) { return v; }
    static bool is_zero(const Rational& x) { return sgn(x) == 0; }
    static Rational abs(const Rational& x) { return ::abs(x); }
    static double to_double(const Rational& x) { return x.get_d(); }
    static std::string to_string(const Rational& x) { return x.get_str(); }

    /// Accepts "p/q", integers and finite decimal literals ("0.25", "-1.5e-3"); all exact.
    static Rational parse(std::string_view text) {
        std::string s(text);
        if (s.empty()) throw input_error("empty scalar literal");
        try {
            if (s.find_first_of(".eE") == std::string::npos) {
                const auto slash = s.find('/');
                mpz_class num(s.substr(0, slash), 10);
                mpz_class den = slash == std::string::npos ? mpz_class(1) : mpz_class(s.substr(slash + 1), 10);
                if (den == 0) throw input_error("zero denominator in '" + s + "'");
                Rational r(num, den);
                r.canonicalize();
                return r;
            }
            return parse_decimal(s);
        } catch (const std::invalid_argument&) {
            throw input_error("bad rational literal '" + s + "'");
        }
    }

private:
    static Rational parse_decimal(const std::string& s) {
        std::size_t epos = s.find_first_of("eE");
        std::string mant = s.substr(0, epos);
        long exp10 = 0;
        if (epos != std::string::npos) exp10 = std::stol(s.substr(epos + 1));
        bool neg = false;
        std::size_t i = 0;
        if (i < mant.size() && (mant[i] == '-' || mant[i] == '+')) neg = mant[i++] == '-';
        std::string digits;
        long frac = 0;
        bool seen_dot = false;
        for (; i < mant.size(); ++i) {
            char c = mant[i];
            if (c == '.') {
                if (seen_dot) throw input_error("bad decimal literal '" + s + "'");
                seen_dot = true;
            } else if (c >= '0' && c <= '9') {
                digits.push_back(c);
                if (seen_dot) ++frac;
            } else {
                throw input_error("bad decimal literal '" + s + "'");
            }
        }
        if (digits.empty()) throw input_error("bad decimal literal '" + s + "'");
        mpz_class num(digits, 10);
        mpz_class ten_pow;
        long shift = exp10 - frac;
        mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
        Rational r = shift >= 0 ? Rational(num * ten_pow) : Rational(num, ten_pow);
        r.canonicalize();
        return neg ? Rational(-r) : r;
    }
};

template <>
struct scalar_traits<double> {
    static constexpr bool is_field = true;
    static constexpr bool is_exact = false;
    static constexpr bool is_ordered = true;

    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double from_int(long v) { return static_cast<double>(v); }
    static bool is_zero(double x) { return x == 0.0; }
    static double abs(double x) { return std::fabs(x); }
    static double to_double(double x) { return x; }
    static std::string to_string(double x) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }
    static double parse(std::string_view text) {
        std::string s(text);
        auto slash = s.find('/');
        try {
            if (slash != std::string::npos)
                return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
            std::size_t used = 0;
            double v = std::stod(s, &used);
            if (used != s.size()) throw input_error("bad float literal '" + s + "'");
            return v;
        } catch (const std::logic_error&) {
            throw input_error("bad float literal '" + s + "'");
        }
    }
};

template <>
struct scalar_traits<Polynomial> {
    static constexpr bool is_field = false;
    static constexpr bool is_exact = true;
    static constexpr bool is_ordered = false;

    static Polynomial zero() { return {}; }
    static Polynomial one() { return Polynomial(1L); }
    static Polynomial from_int(long v) { return Polynomial(v); }
    static bool is_zero(const Polynomial& x) { return x.is_zero(); }
    static std::string to_string(const Polynomial& x) { return x.to_string(); }
};

template <typename T>
concept Field = scalar_traits<T>::is_field;

template <typename T>
concept ExactField = scalar_traits<T>::is_field && scalar_traits<T>::is_exact;

/// "p/q" plus a 12-significant-digit decimal for exact values; floats bare.
template <typename T>
std::string render(const T& x) {
    if constexpr (std::is_same_v<T, Rational>) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", x.get_d());
        return x.get_str() + " (" + buf + ")";
    } else {
        return scalar_traits<T>::to_string(x);
    }
}

} // namespace dimerlab

#endif
