#include "lorenzpsi/series.hpp"

#include <cmath>

namespace lorenzpsi {

namespace {

GaussianRational gr(long n) { return GaussianRational(n); }
GaussianRational gr(long n, long d) { return {Rational(n, d), Rational(0)}; }
GaussianRational gri(long n, long d) { return {Rational(0), Rational(n, d)}; }

}  // namespace

std::pair<CoeffTriple, CoeffTriple> leading_coefficients(Family family) {
    CoeffTriple x_m2, x_m1;
    x_m2.m = -2;
    x_m2.P = PsiPoly::constant(gri(2, 1));      // P_{-1} = 2i
    x_m2.Q = PsiPoly::constant(gri(-1, 5));     // Q_{-2} = -i/5
    x_m2.R = PsiPoly::constant(gr(-1, 5));      // R_{-2} = -1/5
    x_m1.m = -1;
    x_m1.P = PsiPoly::constant(gri(71, 9));     // P_0 = 71i/9
    x_m1.Q = PsiPoly::constant(gri(2, 1));      // Q_{-1} = 2i
    x_m1.R = PsiPoly::constant(gr(17, 9));      // R_{-1} = 17/9
    if (family == Family::Minus) {
        x_m2.P = -x_m2.P;
        x_m2.Q = -x_m2.Q;
        x_m1.P = -x_m1.P;
        x_m1.Q = -x_m1.Q;
    }
    return {x_m2, x_m1};
}

Mat3 build_A(int m, Family family) {
    if (m < 0) throw std::domain_error("build_A: m must be >= 0");
    auto [x_m2, x_m1] = leading_coefficients(family);
    GaussianRational p_lead = x_m2.P.coeff(0, 0);  // P_{-1}
    GaussianRational q_lead = x_m2.Q.coeff(0, 0);  // Q_{-2}
    GaussianRational r_lead = x_m2.R.coeff(0, 0);  // R_{-2}
    Mat3 a;
    a(0, 0) = gr(-m - 1);
    a(0, 1) = gr(10);
    a(0, 2) = gr(0);
    a(1, 0) = -r_lead;
    a(1, 1) = gr(-m);
    a(1, 2) = -p_lead;
    a(2, 0) = q_lead;
    a(2, 1) = p_lead;
    a(2, 2) = gr(-m);
    return a;
}

Mat3 eigenvector_matrix(Family family) {
    // columns are eigenvectors of A_0 for eigenvalues 2, 0, -3
    Mat3 v;
    v(0, 0) = gri(-5, 1);
    v(0, 1) = gri(10, 1);
    v(0, 2) = gri(-5, 1);
    v(1, 0) = gri(-3, 2);
    v(1, 1) = gri(1, 1);
    v(1, 2) = gri(1, 1);
    v(2, 0) = gr(1);
    v(2, 1) = gr(1);
    v(2, 2) = gr(1);
    if (family == Family::Minus) {
        // conjugation by diag(-1,-1,1) maps the plus-family A_m to the
        // minus-family A_m, so the eigenvectors flip their first two rows
        for (int j = 0; j < 3; ++j) {
            v(0, j) = -v(0, j);
            v(1, j) = -v(1, j);
        }
    }
    return v;
}

PsiPoly solve_scalar_poly_ode(const GaussianRational& alpha, const PsiPoly& f) {
    if (alpha.is_zero())
        throw std::domain_error(
            "solve_scalar_poly_ode: alpha = 0 has no unique polynomial solution");
    // xi = -sum_k alpha^{-k-1} f^{(k)}, the unique polynomial solution
    PsiPoly xi;
    PsiPoly der = f;
    GaussianRational inv_a = alpha.inv();
    GaussianRational pow = inv_a;
    int n = f.deg_u();
    for (int k = 0; k <= std::max(n, 0); ++k) {
        xi -= pow * der;
        der = der.diff_u();
        if (der.is_zero()) break;
        pow *= inv_a;
    }
    return xi;
}

template <class Ring>
auto SeriesT<Ring>::build_F(int m) const -> Vec3 {
    if (m < 0) throw std::domain_error("build_F: m must be >= 0");
    if (static_cast<int>(coeffs_.size()) < m + 2)
        throw std::domain_error("build_F: history below m is incomplete");
    auto series_P = [&](int k) -> const Poly& { return coeffs_[static_cast<size_t>(k + 1)].P; };
    auto series_Q = [&](int k) -> const Poly& { return coeffs_[static_cast<size_t>(k + 2)].Q; };
    auto series_R = [&](int k) -> const Poly& { return coeffs_[static_cast<size_t>(k + 2)].R; };

    Ring c10 = RingTraits<Ring>::from(GaussianRational(10));
    Ring c28 = RingTraits<Ring>::from(GaussianRational(28));
    Ring c83 = RingTraits<Ring>::from(GaussianRational(Rational(8, 3)));

    Vec3 f;
    f[0] = -(c10 * series_P(m));
    f[1] = c28 * series_P(m - 1) - series_Q(m - 1);
    f[2] = -(c83 * series_R(m - 1));
    for (int j = 0; j <= m; ++j) {
        f[1] -= series_P(j) * series_R(m - j - 1);
        f[2] += series_P(j) * series_Q(m - j - 1);
    }
    return f;
}

template <class Ring>
auto SeriesT<Ring>::residual(int m) const -> Vec3 {
    Vec3 f = has_F() ? F(m) : build_F(m);
    auto a = build_A(m, family_).template convert<Ring>();
    const Triple& x = triple(m);
    std::array<Poly, 3> xv{x.P, x.Q, x.R};
    auto ax = a.apply(xv);
    Vec3 r;
    r[0] = xv[0].diff_u() - ax[0] - f[0];
    r[1] = xv[1].diff_u() - ax[1] - f[1];
    r[2] = xv[2].diff_u() - ax[2] - f[2];
    return r;
}

namespace {

template <class Ring>
double poly_max_abs(const PolyT<Ring>& p) {
    if constexpr (std::is_same_v<Ring, std::complex<double>>) {
        double s = 0;
        for (const auto& [k, c] : p.terms()) s = std::max(s, std::abs(c));
        return s;
    } else {
        return p.is_zero() ? 0.0 : 1.0;
    }
}

}  // namespace

template <class Ring>
auto SeriesT<Ring>::step_zero_eigenvalue(int m, const Vec3& F, const GenerateOptions& opt)
    -> Vec3 {
    // m = 0 or m = 2: one eigenvalue of A_m vanishes. Diagonalize with the
    // (m-independent, exactly rational) eigenvector matrix and solve the
    // three scalar equations.
    Mat3 v_exact = eigenvector_matrix(family_);
    Mat3 vinv_exact = mat_inverse(v_exact);
    auto v = v_exact.template convert<Ring>();
    auto vinv = vinv_exact.template convert<Ring>();

    auto f = vinv.apply(F);
    std::array<Poly, 3> xi;
    std::array<long, 3> alphas = {2 - m, -m, -3 - m};

    for (int i = 0; i < 3; ++i) {
        if (alphas[static_cast<size_t>(i)] != 0) {
            // mirror solve_scalar_poly_ode in the ring, divisions precomputed
            GaussianRational inv_a = GaussianRational(alphas[static_cast<size_t>(i)]).inv();
            GaussianRational pow = inv_a;
            Poly der = f[static_cast<size_t>(i)];
            Poly acc;
            int n = der.deg_u();
            for (int k = 0; k <= std::max(n, 0); ++k) {
                acc -= RingTraits<Ring>::from(pow) * der;
                der = der.diff_u();
                if (der.is_zero()) break;
                pow *= inv_a;
            }
            xi[static_cast<size_t>(i)] = acc;
        }
    }

    if (m == 0) {
        // zero eigenvalue in slot 1: d(xi)/du = f1 integrates to f1*u; the
        // integration constant is the C-gauge, fixed below so that the
        // constant term of P_1 vanishes (the normalization of the exact
        // coefficient table)
        xi[1] = f[1].antiderivative_u();
        auto x = v.apply(xi);
        Ring p_const = x[0].coeff(0, 0);
        GaussianRational v01 = v_exact(0, 1);
        Ring c2 = -(p_const * RingTraits<Ring>::from(v01.inv()));
        for (int i = 0; i < 3; ++i) {
            Ring add = v(i, 1) * c2;
            x[static_cast<size_t>(i)].add_term(0, 0, add);
        }
        return x;
    }

    // m == 2: F_2 is quadratic, so integrating the zero-eigenvalue scalar
    // equation would normally produce a cubic X_2. The top-degree (u^2)
    // coefficient of the zero-eigenvector component of F_2 cancels exactly,
    // which is what keeps X_2 quadratic. A nonzero u^2 load means the
    // recursion itself is broken.
    Poly f0 = f[0];
    Poly top_load;
    for (const auto& [k, c] : f0.terms())
        if (k.first >= 2) top_load.set(k.first, k.second, c);
    if constexpr (RingTraits<Ring>::exact) {
        if (!top_load.is_zero())
            throw std::logic_error(
                "step m=2: nonzero u^2 load of F_2 on the zero eigenvector");
    } else {
        double load = poly_max_abs(top_load);
        double scale = std::max({poly_max_abs(F[0]), poly_max_abs(F[1]), poly_max_abs(F[2]), 1.0});
        if (load > opt.m2_cancellation_tol * scale)
            throw std::logic_error(
                "step m=2: zero-eigenvector u^2 load above tolerance in inexact ring");
        f0 -= top_load;  // drop rounding dust before integrating
    }
    // integrate the remaining degree-1 load
    xi[0] = f0.antiderivative_u();
    auto x = v.apply(xi);
    // D-origin gauge, the analogue of the C-gauge at m = 0: adding a
    // constant multiple of the zero eigenvector is a shift of D, and the
    // exact coefficient table picks the representative whose P-component
    // has no constant term beyond i D itself
    Ring p_const = x[0].coeff(0, 0);
    GaussianRational v00 = v_exact(0, 0);
    Ring c0 = -(p_const * RingTraits<Ring>::from(v00.inv()));
    if (!RingTraits<Ring>::is_zero(c0)) {
        for (int i = 0; i < 3; ++i) x[static_cast<size_t>(i)].add_term(0, 0, v(i, 0) * c0);
    }
    // the integration constant is the new undetermined constant D,
    // normalized as -(1/5) D so the D column of X_2 reads
    // (i D, (3/10) i D, -(1/5) D)
    GaussianRational minus_fifth(Rational(-1, 5));
    GaussianRational d_slot =
        d_value_.has_value() ? minus_fifth * (*d_value_) : minus_fifth;
    uint32_t d_pow = d_value_.has_value() ? 0 : 1;
    if (!d_slot.is_zero()) {
        Ring s0 = RingTraits<Ring>::from(d_slot);
        for (int i = 0; i < 3; ++i) x[static_cast<size_t>(i)].add_term(0, d_pow, v(i, 0) * s0);
    }
    return x;
}

template <class Ring>
auto SeriesT<Ring>::step_general(int m, const Vec3& F) const -> Vec3 {
    // X_m = -sum_{j=0}^{deg F} A_m^{-j-1} d^j F / du^j  (valid whenever A_m
    // is invertible; derived from variation of constants)
    Mat3 a_inv = mat_inverse(build_A(m, family_));
    Mat3 a_inv_pow = a_inv;
    Vec3 x;
    Vec3 der = F;
    int max_j = std::max({F[0].deg_u(), F[1].deg_u(), F[2].deg_u(), 0});
    for (int j = 0; j <= max_j; ++j) {
        auto mat = a_inv_pow.template convert<Ring>();
        auto term = mat.apply(der);
        for (int i = 0; i < 3; ++i) x[static_cast<size_t>(i)] -= term[static_cast<size_t>(i)];
        if (j < max_j) {
            for (int i = 0; i < 3; ++i) der[static_cast<size_t>(i)] = der[static_cast<size_t>(i)].diff_u();
            a_inv_pow = a_inv_pow * a_inv;
        }
    }
    return x;
}

template <class Ring>
auto SeriesT<Ring>::step(int m, const Vec3& F, const GenerateOptions& opt) -> Vec3 {
    if (m == 0 || m == 2) return step_zero_eigenvalue(m, F, opt);
    return step_general(m, F);
}

template <class Ring>
SeriesT<Ring> SeriesT<Ring>::generate(int max_m, Family family,
                                      std::optional<GaussianRational> d_value,
                                      GenerateOptions opt) {
    if (max_m < -2) throw std::domain_error("generate: max_m must be >= -2");
    SeriesT s;
    s.family_ = family;
    s.max_m_ = max_m;
    s.d_value_ = std::move(d_value);

    auto [x_m2, x_m1] = leading_coefficients(family);
    auto push_exact = [&](const CoeffTriple& t) {
        Triple rt;
        rt.m = t.m;
        rt.P = detail::convert_poly<Ring>(t.P);
        rt.Q = detail::convert_poly<Ring>(t.Q);
        rt.R = detail::convert_poly<Ring>(t.R);
        s.coeffs_.push_back(std::move(rt));
    };
    push_exact(x_m2);
    if (max_m >= -1) push_exact(x_m1);

    for (int m = 0; m <= max_m; ++m) {
        Vec3 f = s.build_F(m);
        Vec3 x = s.step(m, f, opt);
        Triple t;
        t.m = m;
        t.P = std::move(x[0]);
        t.Q = std::move(x[1]);
        t.R = std::move(x[2]);
        s.coeffs_.push_back(std::move(t));
        if (opt.keep_F) s.F_.push_back(f);

        StepRecord rec;
        rec.m = m;
        rec.deg_u = s.coeffs_.back().deg_u();
        rec.deg_d = s.coeffs_.back().deg_d();
        int bound = (m + 2) / 2;
        rec.deg_bound_holds = rec.deg_u <= bound;
        rec.deg_bound_equality = rec.deg_u == bound;
        if (opt.check_residual) {
            if (!opt.keep_F) s.F_.push_back(f);  // residual() wants it once
            Vec3 r = s.residual(m);
            if (!opt.keep_F) s.F_.pop_back();
            if constexpr (RingTraits<Ring>::exact) {
                if (!r[0].is_zero() || !r[1].is_zero() || !r[2].is_zero())
                    throw std::logic_error("generate: nonzero recursion residual at m=" +
                                           std::to_string(m));
                rec.residual_rel = 0.0;
            } else {
                double scale = std::max(
                    {poly_max_abs(f[0]), poly_max_abs(f[1]), poly_max_abs(f[2]), 1.0});
                double rr = std::max({poly_max_abs(r[0]), poly_max_abs(r[1]), poly_max_abs(r[2])});
                rec.residual_rel = rr / scale;
            }
        }
        s.records_.push_back(rec);
    }
    return s;
}

template class SeriesT<GaussianRational>;
template class SeriesT<std::complex<double>>;
template class SeriesT<Zp2>;

double triple_norm(const CoeffTriple& t, const GaussianRational& d_val) {
    return std::max({coeff_norm(t.P, d_val), coeff_norm(t.Q, d_val), coeff_norm(t.R, d_val)});
}

double triple_norm(const CoeffTripleT<std::complex<double>>& t) {
    return std::max({coeff_norm_numeric(t.P), coeff_norm_numeric(t.Q), coeff_norm_numeric(t.R)});
}

std::pair<int, int> modular_deg_u(const CoeffTripleT<Zp2>& t) {
    int d1 = -1, d2 = -1;
    for (const auto* poly : {&t.P, &t.Q, &t.R}) {
        for (const auto& [k, c] : poly->terms()) {
            if (!c.zero_mod_p1()) d1 = std::max(d1, static_cast<int>(k.first));
            if (!c.zero_mod_p2()) d2 = std::max(d2, static_cast<int>(k.first));
        }
    }
    return {d1, d2};
}

}  // namespace lorenzpsi
