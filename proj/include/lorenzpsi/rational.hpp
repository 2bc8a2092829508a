#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lorenzpsi {

/// Arbitrary-precision rational, always reduced, denominator > 0, zero is 0/1.
/// Thin wrapper over GMP's mpq_class that canonicalizes on every construction
/// path and renders decimal-free "num/den" strings.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(long n, long d) : v_(n, d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        v_.canonicalize();
    }
    explicit Rational(const mpz_class& n) : v_(n) {}
    Rational(const mpz_class& n, const mpz_class& d) : v_(n, d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        v_.canonicalize();
    }
    /// Parses "num", "num/den" or a plain decimal like "-12.25" (exact).
    static Rational from_string(const std::string& s);
    /// Exact value of a finite binary64 (doubles are dyadic rationals).
    static Rational from_double(double v) {
        Rational r;
        r.v_ = mpq_class(v);
        return r;
    }

    const mpz_class& num() const { return v_.get_num(); }
    const mpz_class& den() const { return v_.get_den(); }

    bool is_zero() const { return sgn(v_) == 0; }
    int sign() const { return sgn(v_); }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::domain_error("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    Rational abs() const { return sign() < 0 ? -*this : *this; }
    Rational inv() const {
        if (is_zero()) throw std::domain_error("Rational: inverse of zero");
        return Rational(mpq_class(1 / v_));
    }

    double to_double() const { return v_.get_d(); }
    /// "num" when den == 1, else "num/den".
    std::string str() const {
        if (v_.get_den() == 1) return v_.get_num().get_str();
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

    const mpq_class& raw() const { return v_; }

private:
    explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }
    mpq_class v_;
};

inline Rational Rational::from_string(const std::string& s) {
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        mpq_class q(s);
        q.canonicalize();
        Rational r;
        r.v_ = q;
        return r;
    }
    // exact decimal: sign, integer part, fractional digits over a power of ten
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    mpz_class num(digits);
    mpz_class den(1);
    for (size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return Rational(num, den);
}

/// Exact a + b*i with rational a, b: the coefficient field of the series.
struct GaussianRational {
    Rational re, im;

    GaussianRational() = default;
    GaussianRational(Rational r) : re(std::move(r)) {}
    GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    GaussianRational(long r) : re(r) {}
    GaussianRational(long rn, long rd, long in, long id)
        : re(rn, rd), im(in, id) {}

    static GaussianRational i() { return {Rational(0), Rational(1)}; }

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    bool is_real() const { return im.is_zero(); }
    bool is_imaginary() const { return re.is_zero(); }

    GaussianRational conj() const { return {re, -im}; }
    Rational norm2() const { return re * re + im * im; }  // |z|^2, exact

    GaussianRational operator-() const { return {-re, -im}; }
    GaussianRational& operator+=(const GaussianRational& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        Rational r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) {
        if (o.is_zero()) throw std::domain_error("GaussianRational: division by zero");
        Rational n2 = o.norm2();
        Rational r = (re * o.re + im * o.im) / n2;
        im = (im * o.re - re * o.im) / n2;
        re = r;
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    GaussianRational inv() const {
        if (is_zero()) throw std::domain_error("GaussianRational: inverse of zero");
        Rational n2 = norm2();
        return {re / n2, -(im / n2)};
    }

    std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }
    double abs() const { return std::abs(to_complex()); }
    /// |re| + |im|: exact rational upper bound on the magnitude.
    Rational abs_overestimate() const { return re.abs() + im.abs(); }
    /// Exact |z| for axis-aligned values (re == 0 or im == 0); throws otherwise.
    Rational abs_exact_axis() const {
        if (im.is_zero()) return re.abs();
        if (re.is_zero()) return im.abs();
        throw std::domain_error("abs_exact_axis: value is not purely real or imaginary");
    }

    std::string str() const {
        if (is_zero()) return "0";
        std::string s;
        if (!re.is_zero()) s = re.str();
        if (!im.is_zero()) {
            if (!s.empty() && im.sign() > 0) s += "+";
            s += im.str() + "i";
        }
        return s;
    }
};

}  // namespace lorenzpsi
