#include "lorenzpsi/poly.hpp"

#include <cmath>
#include <map>

#include "lorenzpsi/mat3.hpp"

namespace lorenzpsi {

std::complex<double> poly_eval(const PsiPoly& p, std::complex<double> u_val,
                               std::complex<double> d_val) {
    // group by u-power, evaluate the D-part per group, then Horner in u
    int du = p.deg_u();
    if (du < 0) return {0.0, 0.0};
    std::vector<std::complex<double>> by_u(static_cast<size_t>(du + 1));
    std::vector<std::complex<double>> d_pows(static_cast<size_t>(p.deg_d()) + 2, 1.0);
    for (size_t j = 1; j < d_pows.size(); ++j) d_pows[j] = d_pows[j - 1] * d_val;
    for (const auto& [k, c] : p.terms())
        by_u[k.first] += c.to_complex() * d_pows[k.second];
    std::complex<double> acc = 0.0;
    for (int k = du; k >= 0; --k) acc = acc * u_val + by_u[static_cast<size_t>(k)];
    return acc;
}

double coeff_norm(const PsiPoly& p, const GaussianRational& d_val, NormMode mode) {
    if (mode == NormMode::RationalOverestimate)
        return coeff_norm_overestimate(p, d_val).to_double();
    PsiPoly q = p.deg_d() > 0 ? p.substitute_d(d_val) : p;
    double s = 0.0;
    for (const auto& [k, c] : q.terms()) s += c.abs();
    return s;
}

Rational coeff_norm_overestimate(const PsiPoly& p, const GaussianRational& d_val) {
    PsiPoly q = p.deg_d() > 0 ? p.substitute_d(d_val) : p;
    Rational s;
    for (const auto& [k, c] : q.terms()) s += c.abs_overestimate();
    return s;
}

double coeff_norm(const PsiPoly& p, NormMode mode) {
    if (p.deg_d() > 0)
        throw std::domain_error("coeff_norm: polynomial contains symbolic D, supply a value");
    return coeff_norm(p, GaussianRational(0), mode);
}

double coeff_norm_numeric(const PolyT<std::complex<double>>& p) {
    double s = 0.0;
    for (const auto& [k, c] : p.terms()) s += std::abs(c);
    return s;
}

Mat3 mat_inverse(const Mat3& m) {
    GaussianRational d = m.det();
    if (d.is_zero()) throw std::domain_error("mat_inverse: singular matrix");
    GaussianRational inv_d = d.inv();
    Mat3 r;
    auto cof = [&](int i, int j) {
        int r0 = (i + 1) % 3, r1 = (i + 2) % 3;
        int c0 = (j + 1) % 3, c1 = (j + 2) % 3;
        return m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
    };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(j, i) = cof(i, j) * inv_d;
    return r;
}

}  // namespace lorenzpsi
