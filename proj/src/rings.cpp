#include "lorenzpsi/rings.hpp"

#include <stdexcept>

namespace lorenzpsi {
namespace modp {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

uint64_t powmod(uint64_t a, uint64_t e, uint64_t p) {
    uint64_t r = 1;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

uint64_t invmod(uint64_t a, uint64_t p) {
    if (a % p == 0) throw std::domain_error("invmod: zero residue");
    return powmod(a % p, p - 2, p);
}

bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // deterministic Miller-Rabin bases for n < 3.3e24
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 0; i < s - 1; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

static uint64_t sqrt_minus_one(uint64_t p) {
    // g^((p-1)/4) for a quadratic non-residue g
    for (uint64_t g = 2;; ++g) {
        if (powmod(g, (p - 1) / 2, p) == p - 1) return powmod(g, (p - 1) / 4, p);
    }
}

static Context make_context() {
    Context c{};
    uint64_t found[2];
    int k = 0;
    for (uint64_t n = (1ull << 62) - 3; k < 2; n -= 4) {
        // n == 1 (mod 4) by construction of the start point and stride
        if ((n & 3) != 1) {
            n -= (n & 3) - 1;
        }
        if (is_prime(n)) found[k++] = n;
    }
    c.p1 = found[0];
    c.p2 = found[1];
    c.i1 = sqrt_minus_one(c.p1);
    c.i2 = sqrt_minus_one(c.p2);
    return c;
}

const Context& context() {
    static const Context c = make_context();
    return c;
}

uint64_t reduce_mpz(const mpz_class& z, uint64_t p) {
    mpz_class m = z % static_cast<unsigned long>(p);
    long r = m.get_si();
    if (r < 0) r += static_cast<long>(p);
    return static_cast<uint64_t>(r);
}

uint64_t reduce_rational(const Rational& r, uint64_t p) {
    uint64_t n = reduce_mpz(r.num(), p);
    uint64_t d = reduce_mpz(r.den(), p);
    return mulmod(n, invmod(d, p), p);
}

}  // namespace modp

Zp2 RingTraits<Zp2>::from(const GaussianRational& g) {
    const auto& c = modp::context();
    uint64_t re1 = modp::reduce_rational(g.re, c.p1);
    uint64_t im1 = modp::reduce_rational(g.im, c.p1);
    uint64_t re2 = modp::reduce_rational(g.re, c.p2);
    uint64_t im2 = modp::reduce_rational(g.im, c.p2);
    uint64_t a = re1 + modp::mulmod(im1, c.i1, c.p1);
    if (a >= c.p1) a -= c.p1;
    uint64_t b = re2 + modp::mulmod(im2, c.i2, c.p2);
    if (b >= c.p2) b -= c.p2;
    return {a, b};
}

}  // namespace lorenzpsi
