#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lorenzpsi/rings.hpp"

namespace lorenzpsi {

/// Sparse bivariate polynomial in u = (eta + C) and the undetermined
/// constant D. Terms are kept in canonical (u_power, d_power) order and
/// stored zeros are pruned, so iteration order and serialization are
/// deterministic. PolyT is an immutable-style value type: operations
/// return new polynomials.
template <class Ring>
class PolyT {
public:
    using Key = std::pair<uint32_t, uint32_t>;  // (u_power, d_power)
    using Terms = std::map<Key, Ring>;

    PolyT() = default;

    static PolyT constant(Ring c) {
        PolyT p;
        p.set(0, 0, std::move(c));
        return p;
    }
    static PolyT monomial(uint32_t u_pow, uint32_t d_pow, Ring c) {
        PolyT p;
        p.set(u_pow, d_pow, std::move(c));
        return p;
    }

    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }
    const Terms& terms() const { return terms_; }

    /// -1 for the zero polynomial.
    int deg_u() const {
        int d = -1;
        for (const auto& [k, c] : terms_) d = std::max(d, static_cast<int>(k.first));
        return d;
    }
    int deg_d() const {
        int d = -1;
        for (const auto& [k, c] : terms_) d = std::max(d, static_cast<int>(k.second));
        return d;
    }

    Ring coeff(uint32_t u_pow, uint32_t d_pow) const {
        auto it = terms_.find({u_pow, d_pow});
        return it == terms_.end() ? Ring{} : it->second;
    }

    void set(uint32_t u_pow, uint32_t d_pow, Ring c) {
        if (RingTraits<Ring>::is_zero(c)) {
            terms_.erase({u_pow, d_pow});
        } else {
            terms_[{u_pow, d_pow}] = std::move(c);
        }
    }

    void add_term(uint32_t u_pow, uint32_t d_pow, const Ring& c) {
        auto [it, inserted] = terms_.try_emplace({u_pow, d_pow}, c);
        if (!inserted) {
            it->second += c;
            if (RingTraits<Ring>::is_zero(it->second)) terms_.erase(it);
        }
    }

    PolyT operator-() const {
        PolyT r;
        for (const auto& [k, c] : terms_) r.terms_[k] = -c;
        return r;
    }
    PolyT& operator+=(const PolyT& o) {
        for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, c);
        return *this;
    }
    PolyT& operator-=(const PolyT& o) {
        for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, -c);
        return *this;
    }
    friend PolyT operator+(PolyT a, const PolyT& b) { return a += b; }
    friend PolyT operator-(PolyT a, const PolyT& b) { return a -= b; }

    friend PolyT operator*(const PolyT& a, const PolyT& b) {
        PolyT r;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_)
                r.add_term(ka.first + kb.first, ka.second + kb.second, ca * cb);
        return r;
    }
    PolyT& operator*=(const PolyT& o) { return *this = *this * o; }

    friend PolyT operator*(const Ring& s, const PolyT& p) {
        PolyT r;
        if (RingTraits<Ring>::is_zero(s)) return r;
        for (const auto& [k, c] : p.terms_) r.set(k.first, k.second, s * c);
        return r;
    }

    friend bool operator==(const PolyT& a, const PolyT& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const PolyT& a, const PolyT& b) { return !(a == b); }

    /// Formal d/du; d_power is untouched.
    PolyT diff_u() const {
        PolyT r;
        for (const auto& [k, c] : terms_) {
            if (k.first == 0) continue;
            Ring f = RingTraits<Ring>::from(GaussianRational(static_cast<long>(k.first)));
            r.set(k.first - 1, k.second, f * c);
        }
        return r;
    }

    /// u-antiderivative with zero integration constant.
    PolyT antiderivative_u() const {
        PolyT r;
        for (const auto& [k, c] : terms_) {
            Ring f = RingTraits<Ring>::from(
                GaussianRational(Rational(1, static_cast<long>(k.first) + 1)));
            r.set(k.first + 1, k.second, f * c);
        }
        return r;
    }

    /// Substitutes a numeric value for D, collapsing to a polynomial in u.
    PolyT substitute_d(const Ring& d_val) const {
        PolyT r;
        int dd = deg_d();
        std::vector<Ring> d_pows(static_cast<size_t>(dd + 2));
        d_pows[0] = RingTraits<Ring>::from(GaussianRational(1));
        for (int j = 1; j <= dd; ++j) d_pows[static_cast<size_t>(j)] = d_pows[static_cast<size_t>(j - 1)] * d_val;
        for (const auto& [k, c] : terms_) r.add_term(k.first, 0, c * d_pows[k.second]);
        return r;
    }

private:
    Terms terms_;
};

using PsiPoly = PolyT<GaussianRational>;

/// Horner-style evaluation at numeric (u, D); exact coefficients are
/// converted at call time.
std::complex<double> poly_eval(const PsiPoly& p, std::complex<double> u_val,
                               std::complex<double> d_val);

enum class NormMode { Binary64, RationalOverestimate };

/// The coefficient norm of Section-4 style: D is substituted first, terms
/// are grouped by u-power, and the absolute values of the grouped
/// coefficients are summed. Binary64 magnitudes by default (non-rigorous);
/// the overestimate mode uses |re| + |im| >= |z| for one-sided rigor.
double coeff_norm(const PsiPoly& p, const GaussianRational& d_val,
                  NormMode mode = NormMode::Binary64);
Rational coeff_norm_overestimate(const PsiPoly& p, const GaussianRational& d_val);
/// Errors if D actually appears in p.
double coeff_norm(const PsiPoly& p, NormMode mode = NormMode::Binary64);

/// Norm of a D-free polynomial with complex coefficients, grouped by u-power.
double coeff_norm_numeric(const PolyT<std::complex<double>>& p);

}  // namespace lorenzpsi
