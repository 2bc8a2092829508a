#pragma once

#include <complex>
#include <cstdint>

#include "lorenzpsi/rational.hpp"

namespace lorenzpsi {

// The series recursion is written once over an abstract coefficient ring.
// Three rings are used:
//   GaussianRational      exact arithmetic (authoritative results)
//   std::complex<double>  fast shadow for norm sweeps at high order
//   Zp2                   images modulo two 62-bit primes p == 1 (mod 4),
//                         exact zero/degree detection at high order
// All divisions in the recursion are precomputed exactly and converted in,
// so a ring only needs +, -, *, is_zero and a conversion from the exact field.

namespace modp {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p);
uint64_t powmod(uint64_t a, uint64_t e, uint64_t p);
uint64_t invmod(uint64_t a, uint64_t p);
bool is_prime(uint64_t n);

struct Context {
    uint64_t p1, p2;    // primes == 1 (mod 4)
    uint64_t i1, i2;    // square roots of -1 mod p1, p2
};
const Context& context();

uint64_t reduce_mpz(const mpz_class& z, uint64_t p);
uint64_t reduce_rational(const Rational& r, uint64_t p);

}  // namespace modp

/// Residues of one Gaussian-rational value modulo two primes, with i mapped
/// to a square root of -1 in each field.
struct Zp2 {
    uint64_t a = 0, b = 0;

    bool is_zero() const { return a == 0 && b == 0; }
    bool zero_mod_p1() const { return a == 0; }
    bool zero_mod_p2() const { return b == 0; }

    friend Zp2 operator+(const Zp2& x, const Zp2& y) {
        const auto& c = modp::context();
        uint64_t s1 = x.a + y.a;
        if (s1 >= c.p1) s1 -= c.p1;
        uint64_t s2 = x.b + y.b;
        if (s2 >= c.p2) s2 -= c.p2;
        return {s1, s2};
    }
    friend Zp2 operator-(const Zp2& x, const Zp2& y) {
        const auto& c = modp::context();
        uint64_t s1 = x.a >= y.a ? x.a - y.a : x.a + c.p1 - y.a;
        uint64_t s2 = x.b >= y.b ? x.b - y.b : x.b + c.p2 - y.b;
        return {s1, s2};
    }
    friend Zp2 operator*(const Zp2& x, const Zp2& y) {
        const auto& c = modp::context();
        return {modp::mulmod(x.a, y.a, c.p1), modp::mulmod(x.b, y.b, c.p2)};
    }
    Zp2 operator-() const {
        const auto& c = modp::context();
        return {a ? c.p1 - a : 0, b ? c.p2 - b : 0};
    }
    Zp2& operator+=(const Zp2& y) { return *this = *this + y; }
    Zp2& operator-=(const Zp2& y) { return *this = *this - y; }
    Zp2& operator*=(const Zp2& y) { return *this = *this * y; }
    friend bool operator==(const Zp2& x, const Zp2& y) { return x.a == y.a && x.b == y.b; }
};

template <class Ring>
struct RingTraits;

template <>
struct RingTraits<GaussianRational> {
    static GaussianRational from(const GaussianRational& g) { return g; }
    static bool is_zero(const GaussianRational& x) { return x.is_zero(); }
    static constexpr bool exact = true;
};

template <>
struct RingTraits<std::complex<double>> {
    static std::complex<double> from(const GaussianRational& g) { return g.to_complex(); }
    static bool is_zero(const std::complex<double>& x) {
        return x.real() == 0.0 && x.imag() == 0.0;
    }
    static constexpr bool exact = false;
};

template <>
struct RingTraits<Zp2> {
    static Zp2 from(const GaussianRational& g);
    static bool is_zero(const Zp2& x) { return x.is_zero(); }
    static constexpr bool exact = true;
};

}  // namespace lorenzpsi
