#pragma once

#include <array>
#include <stdexcept>

#include "lorenzpsi/poly.hpp"

namespace lorenzpsi {

/// Dense 3x3 matrix over an exact or numeric ring. Inversion is exact
/// (adjugate over determinant) and is only meaningful for rings with
/// division; it is provided for GaussianRational.
template <class Ring>
struct Mat3T {
    std::array<Ring, 9> a{};

    Ring& operator()(int r, int c) { return a[static_cast<size_t>(3 * r + c)]; }
    const Ring& operator()(int r, int c) const { return a[static_cast<size_t>(3 * r + c)]; }

    static Mat3T identity() {
        Mat3T m;
        Ring one = RingTraits<Ring>::from(GaussianRational(1));
        m(0, 0) = one;
        m(1, 1) = one;
        m(2, 2) = one;
        return m;
    }

    friend Mat3T operator*(const Mat3T& x, const Mat3T& y) {
        Mat3T r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Ring s = x(i, 0) * y(0, j);
                s += x(i, 1) * y(1, j);
                s += x(i, 2) * y(2, j);
                r(i, j) = s;
            }
        return r;
    }

    friend bool operator==(const Mat3T& x, const Mat3T& y) { return x.a == y.a; }

    Ring det() const {
        const Mat3T& m = *this;
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }

    /// Applies the matrix to a vector of polynomials (or ring values).
    template <class Vec>
    std::array<Vec, 3> apply(const std::array<Vec, 3>& v) const {
        std::array<Vec, 3> r;
        for (int i = 0; i < 3; ++i) {
            r[static_cast<size_t>(i)] = (*this)(i, 0) * v[0] + (*this)(i, 1) * v[1] + (*this)(i, 2) * v[2];
        }
        return r;
    }

    template <class R2>
    Mat3T<R2> convert() const {
        Mat3T<R2> m;
        for (size_t k = 0; k < 9; ++k) m.a[k] = RingTraits<R2>::from(a[k]);
        return m;
    }
};

using Mat3 = Mat3T<GaussianRational>;

/// Exact inverse via adjugate/determinant. Throws on a singular matrix
/// (expected exactly for the recursion matrices at m = 0 and m = 2).
Mat3 mat_inverse(const Mat3& m);

}  // namespace lorenzpsi
