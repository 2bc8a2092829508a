#include "lorenzpsi/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lorenzpsi {

namespace {

double log_sum_exp(const std::vector<double>& logs) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : logs) mx = std::max(mx, v);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double v : logs) s += std::exp(v - mx);
    return mx + std::log(s);
}

}  // namespace

NormSequence norm_sequence(const PsiSeries& series, const GaussianRational& d_value) {
    NormSequence n;
    n.d = d_value;
    n.x_minus1 = triple_norm(series.triple(-1), d_value);
    for (int m = 0; m <= series.max_m(); ++m) {
        n.x.push_back(triple_norm(series.triple(m), d_value));
        if (series.has_F()) {
            const auto& f = series.F(m);
            n.f.push_back(std::max({coeff_norm(f[0], d_value), coeff_norm(f[1], d_value),
                                    coeff_norm(f[2], d_value)}));
        }
    }
    return n;
}

NormSequence norm_sequence_shadow(int max_m, Family family, const GaussianRational& d_value) {
    ShadowSeries s = ShadowSeries::generate(max_m, family, d_value);
    NormSequence n;
    n.d = d_value;
    n.x_minus1 = triple_norm(s.triple(-1));
    for (int m = 0; m <= max_m; ++m) {
        n.x.push_back(triple_norm(s.triple(m)));
        const auto& f = s.F(m);
        n.f.push_back(std::max({coeff_norm_numeric(f[0]), coeff_norm_numeric(f[1]),
                                coeff_norm_numeric(f[2])}));
    }
    return n;
}

BoundCheck check_F_bound(const NormSequence& n, int m) {
    if (m < 3) throw std::domain_error("check_F_bound: m must be >= 3");
    if (m > n.max_m()) throw std::domain_error("check_F_bound: m beyond sequence");
    BoundCheck b;
    b.lhs = n.f.at(static_cast<size_t>(m));
    b.rhs = 30.0 * n.x[static_cast<size_t>(m - 1)] + 28.0 * n.x[static_cast<size_t>(m - 2)];
    for (int j = 1; j <= m - 1; ++j)
        b.rhs += n.x[static_cast<size_t>(m - j - 1)] * n.x[static_cast<size_t>(j - 1)];
    b.holds = b.lhs <= b.rhs * (1.0 + 1e-12);
    return b;
}

BoundCheck check_X_bound(const NormSequence& n, int m) {
    if (m < 8) throw std::domain_error("check_X_bound: lemma hypothesis needs m >= 8");
    if (m > n.max_m()) throw std::domain_error("check_X_bound: m beyond sequence");
    BoundCheck b;
    b.lhs = n.x[static_cast<size_t>(m)];
    b.rhs = 192.0 * n.f[static_cast<size_t>(m)] / (m - 2);
    b.holds = b.lhs <= b.rhs * (1.0 + 1e-12);
    return b;
}

Rational eigenvector_norm_product() {
    Mat3 v = eigenvector_matrix(Family::Plus);
    Mat3 vinv = mat_inverse(v);
    auto inf_norm = [](const Mat3& m) {
        Rational best;
        for (int i = 0; i < 3; ++i) {
            Rational row;
            for (int j = 0; j < 3; ++j) row += m(i, j).abs_exact_axis();
            if (row > best) best = row;
        }
        return best;
    };
    return inf_norm(v) * inf_norm(vinv);
}

BoundCheck scalar_ode_norm_bound_check(const GaussianRational& alpha, const PsiPoly& f,
                                       double a) {
    if (a <= 1.0) throw std::domain_error("scalar_ode_norm_bound_check: need a > 1");
    int n = std::max(f.deg_u(), 0);
    double abs_alpha = alpha.abs();
    if (abs_alpha < a * (n + 0.5))
        throw std::domain_error("scalar_ode_norm_bound_check: |alpha| >= a(n+1/2) violated");
    PsiPoly xi = solve_scalar_poly_ode(alpha, f);
    BoundCheck b;
    GaussianRational d_one(1);
    b.lhs = coeff_norm(xi, d_one);
    double nf = coeff_norm(f, d_one);
    b.rhs = nf * (a / (a - 1.0)) / abs_alpha;
    b.holds = b.lhs <= b.rhs * (1.0 + 1e-12);
    return b;
}

MajorantSequence majorant_sequence(const std::vector<double>& seed, int max_m) {
    if (seed.size() != 8) throw std::domain_error("majorant_sequence: seed must be x_0..x_7");
    if (max_m < 8) throw std::domain_error("majorant_sequence: max_m must be >= 8");
    MajorantSequence maj;
    maj.seed = seed;
    maj.log_values.reserve(static_cast<size_t>(max_m) + 1);
    for (double v : seed) {
        if (v <= 0.0) throw std::domain_error("majorant_sequence: seed values must be > 0");
        maj.log_values.push_back(std::log(v));
    }
    const double l960 = std::log(960.0), l896 = std::log(896.0), l32 = std::log(32.0);
    std::vector<double> parts;
    for (int m = 8; m <= max_m; ++m) {
        const auto& L = maj.log_values;
        parts.clear();
        parts.push_back(l960 + L[static_cast<size_t>(m - 1)]);
        parts.push_back(l896 + L[static_cast<size_t>(m - 2)]);
        for (int j = 1; j <= m - 1; ++j)
            parts.push_back(l32 + L[static_cast<size_t>(m - j - 1)] + L[static_cast<size_t>(j - 1)]);
        maj.log_values.push_back(log_sum_exp(parts));
    }
    return maj;
}

bool majorant_dominates(const NormSequence& n, const MajorantSequence& maj, double rel_slack) {
    int top = std::min(n.max_m(), maj.max_m());
    for (int m = 0; m <= top; ++m) {
        double lx = std::log(std::max(n.x[static_cast<size_t>(m)], 1e-300));
        if (lx > maj.log_values[static_cast<size_t>(m)] + rel_slack) return false;
    }
    return true;
}

K2Estimate k2_root_test(const MajorantSequence& maj) {
    int top = maj.max_m();
    if (top < 64) throw std::domain_error("k2_root_test: majorant too short");
    int lo = std::max(8, top - std::min(800, top / 2));
    // fit log x_m - log x_{m-1} ~ a + b/m + c/m^2 over the tail window
    double s[3][3] = {};
    double t[3] = {};
    for (int m = lo; m <= top; ++m) {
        double r = maj.log_values[static_cast<size_t>(m)] - maj.log_values[static_cast<size_t>(m - 1)];
        double g[3] = {1.0, 1.0 / m, 1.0 / (static_cast<double>(m) * m)};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) s[i][j] += g[i] * g[j];
            t[i] += g[i] * r;
        }
    }
    double A[3][4] = {{s[0][0], s[0][1], s[0][2], t[0]},
                      {s[1][0], s[1][1], s[1][2], t[1]},
                      {s[2][0], s[2][1], s[2][2], t[2]}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r2 = col + 1; r2 < 3; ++r2)
            if (std::fabs(A[r2][col]) > std::fabs(A[piv][col])) piv = r2;
        std::swap(A[piv], A[col]);
        for (int r2 = 0; r2 < 3; ++r2) {
            if (r2 == col) continue;
            double fac = A[r2][col] / A[col][col];
            for (int c2 = col; c2 < 4; ++c2) A[r2][c2] -= fac * A[col][c2];
        }
    }
    double coef[3] = {A[0][3] / A[0][0], A[1][3] / A[1][1], A[2][3] / A[2][2]};
    K2Estimate est;
    est.k2 = std::exp(coef[0]);
    est.plain_root_test = std::exp(maj.log_values[static_cast<size_t>(top)] / top);
    double rss = 0.0;
    int cnt = 0;
    for (int m = lo; m <= top; ++m) {
        double r = maj.log_values[static_cast<size_t>(m)] - maj.log_values[static_cast<size_t>(m - 1)];
        double fit = coef[0] + coef[1] / m + coef[2] / (static_cast<double>(m) * m);
        rss += (r - fit) * (r - fit);
        ++cnt;
    }
    est.fit_rms = std::sqrt(rss / cnt);
    if (!(est.k2 > 0.0) || est.fit_rms > 1e-4)
        throw std::runtime_error("k2_root_test: tail fit did not converge (rms " +
                                 std::to_string(est.fit_rms) + ")");
    return est;
}

std::vector<double> discriminant_polynomial(const std::vector<double>& seed) {
    if (seed.size() != 8) throw std::domain_error("discriminant_polynomial: need x_0..x_7");
    // c_k = x_k - 960 x_{k-1} - 896 x_{k-2} - 32 sum_{a+b=k-2} x_a x_b
    std::vector<double> c(8, 0.0);
    for (int k = 0; k <= 7; ++k) {
        double v = seed[static_cast<size_t>(k)];
        if (k >= 1) v -= 960.0 * seed[static_cast<size_t>(k - 1)];
        if (k >= 2) {
            v -= 896.0 * seed[static_cast<size_t>(k - 2)];
            double conv = 0.0;
            for (int a2 = 0; a2 <= k - 2; ++a2)
                conv += seed[static_cast<size_t>(a2)] * seed[static_cast<size_t>(k - 2 - a2)];
            v -= 32.0 * conv;
        }
        c[static_cast<size_t>(k)] = v;
    }
    // delta(Z) = (1 - 960 Z - 896 Z^2)^2 - 128 Z^2 c(Z), degree <= 9
    std::vector<double> delta(10, 0.0);
    const double a0 = 1.0, a1 = -960.0, a2 = -896.0;
    delta[0] = a0 * a0;
    delta[1] = 2 * a0 * a1;
    delta[2] = a1 * a1 + 2 * a0 * a2;
    delta[3] = 2 * a1 * a2;
    delta[4] = a2 * a2;
    for (int k = 0; k <= 7; ++k)
        delta[static_cast<size_t>(k + 2)] -= 128.0 * c[static_cast<size_t>(k)];
    while (delta.size() > 1 && delta.back() == 0.0) delta.pop_back();
    return delta;
}

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
    int n = static_cast<int>(coeffs.size()) - 1;
    if (n < 1) return {};
    using C = std::complex<double>;
    std::vector<C> p(coeffs.begin(), coeffs.end());
    auto eval = [&](C z, C& val, C& der) {
        val = p[static_cast<size_t>(n)];
        der = 0.0;
        for (int k = n - 1; k >= 0; --k) {
            der = der * z + val;
            val = val * z + p[static_cast<size_t>(k)];
        }
    };
    // Aberth-Ehrlich from a circle sized by the coefficient balance
    double r0 = std::pow(std::abs(p[0] / p[static_cast<size_t>(n)]), 1.0 / n);
    if (!std::isfinite(r0) || r0 == 0.0) r0 = 1.0;
    std::vector<C> z(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        double ang = 2.0 * std::numbers::pi * k / n + 0.4;
        z[static_cast<size_t>(k)] = r0 * C(std::cos(ang), std::sin(ang));
    }
    for (int iter = 0; iter < 800; ++iter) {
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            C val, der;
            eval(z[static_cast<size_t>(k)], val, der);
            C newton = der == C(0.0) ? C(0.0) : val / der;
            C sum = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != k) sum += 1.0 / (z[static_cast<size_t>(k)] - z[static_cast<size_t>(j)]);
            C denom = 1.0 - newton * sum;
            C step = denom == C(0.0) ? newton : newton / denom;
            z[static_cast<size_t>(k)] -= step;
            worst = std::max(worst,
                             std::abs(step) / std::max(1e-300, std::abs(z[static_cast<size_t>(k)])));
        }
        if (worst < 1e-14) break;
    }
    return z;
}

namespace {

using RatPoly = std::vector<Rational>;  // ascending coefficients

Rational rp_eval(const RatPoly& p, const Rational& z) {
    Rational v;
    for (int k = static_cast<int>(p.size()) - 1; k >= 0; --k) v = v * z + p[static_cast<size_t>(k)];
    return v;
}

RatPoly rp_derivative(const RatPoly& p) {
    RatPoly d;
    for (size_t k = 1; k < p.size(); ++k) d.push_back(Rational(static_cast<long>(k)) * p[k]);
    return d;
}

void rp_trim(RatPoly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

// remainder of a / b (b nonzero), ascending coefficients
RatPoly rp_remainder(RatPoly a, const RatPoly& b) {
    rp_trim(a);
    while (a.size() >= b.size() && !a.empty()) {
        Rational q = a.back() / b.back();
        size_t shift = a.size() - b.size();
        for (size_t k = 0; k < b.size(); ++k) a[shift + k] -= q * b[k];
        rp_trim(a);
    }
    return a;
}

std::vector<RatPoly> sturm_chain(const RatPoly& p) {
    std::vector<RatPoly> chain;
    RatPoly p0 = p;
    rp_trim(p0);
    chain.push_back(p0);
    RatPoly p1 = rp_derivative(p0);
    rp_trim(p1);
    while (!p1.empty()) {
        chain.push_back(p1);
        RatPoly rem = rp_remainder(chain[chain.size() - 2], p1);
        for (auto& c : rem) c = -c;
        p1 = std::move(rem);
    }
    return chain;
}

int sturm_sign_changes(const std::vector<RatPoly>& chain, const Rational& z) {
    int changes = 0, prev = 0;
    for (const auto& p : chain) {
        int s = rp_eval(p, z).sign();
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    return changes;
}

RatPoly exact_discriminant(const std::vector<Rational>& x) {
    if (x.size() != 8) throw std::domain_error("exact_discriminant: need x_0..x_7");
    std::vector<Rational> c(8);
    for (int k = 0; k <= 7; ++k) {
        Rational v = x[static_cast<size_t>(k)];
        if (k >= 1) v -= Rational(960) * x[static_cast<size_t>(k - 1)];
        if (k >= 2) {
            v -= Rational(896) * x[static_cast<size_t>(k - 2)];
            Rational conv;
            for (int a2 = 0; a2 + 2 <= k; ++a2)
                conv += x[static_cast<size_t>(a2)] * x[static_cast<size_t>(k - 2 - a2)];
            v -= Rational(32) * conv;
        }
        c[static_cast<size_t>(k)] = v;
    }
    RatPoly delta(10);
    delta[0] = Rational(1);
    delta[1] = Rational(-1920);
    delta[2] = Rational(960) * Rational(960) - Rational(2 * 896);
    delta[3] = Rational(2) * Rational(960) * Rational(896);
    delta[4] = Rational(896) * Rational(896);
    for (int k = 0; k <= 7; ++k)
        delta[static_cast<size_t>(k + 2)] -= Rational(128) * c[static_cast<size_t>(k)];
    rp_trim(delta);
    return delta;
}

}  // namespace

std::vector<Rational> exact_norm_seed(const PsiSeries& series, const Rational& d_value) {
    if (series.max_m() < 7) throw std::domain_error("exact_norm_seed: need series through m=7");
    GaussianRational d(d_value);
    std::vector<Rational> seed;
    for (int m = 0; m <= 7; ++m) {
        const auto& t = series.triple(m);
        Rational best;
        for (const auto* poly : {&t.P, &t.Q, &t.R}) {
            PsiPoly q = poly->deg_d() > 0 ? poly->substitute_d(d) : *poly;
            Rational s;
            for (const auto& [k, cf] : q.terms()) s += cf.abs_exact_axis();
            if (s > best) best = s;
        }
        seed.push_back(best);
    }
    return seed;
}

double k2_discriminant_exact(const std::vector<Rational>& seed) {
    RatPoly delta = exact_discriminant(seed);
    // x_m >= 960 x_{m-1} forces the radius below 1/960, so the smallest
    // positive root lives in (0, 1.25e-3]
    const Rational bound(125, 100000);
    auto chain = sturm_chain(delta);
    int at_zero = sturm_sign_changes(chain, Rational(0));
    int roots_total = at_zero - sturm_sign_changes(chain, bound);
    if (roots_total >= 1) {
        // bisect for the smallest root: keep (0, hi] holding >= 1 root
        Rational lo(0), hi = bound;
        for (int it = 0; it < 140; ++it) {
            Rational mid = (lo + hi) / Rational(2);
            int in_left = at_zero - sturm_sign_changes(chain, mid);
            if (in_left >= 1)
                hi = mid;
            else
                lo = mid;
        }
        return 1.0 / hi.to_double();
    }
    // Seed rounding can lift the near-degenerate root pair just off the
    // axis. The dip location is stable, so return the argmin of the first
    // deep minimum instead.
    Rational best_z, best_v;
    bool have = false;
    Rational z(1, 1000000);
    const Rational step_num(1002), step_den(1000);
    while (z < bound) {
        Rational v = rp_eval(delta, z);
        if (!have || v < best_v) {
            best_v = v;
            best_z = z;
            have = true;
        }
        z = z * step_num / step_den;
    }
    if (!have || best_v.to_double() > 1e-6)
        throw std::runtime_error("k2_discriminant: no root or deep minimum in (0, 1/800]");
    Rational lo = best_z * Rational(995, 1000), hi = best_z * Rational(1005, 1000);
    for (int it = 0; it < 200; ++it) {
        Rational third = (hi - lo) / Rational(3);
        Rational m1 = lo + third, m2 = hi - third;
        if (rp_eval(delta, m1) < rp_eval(delta, m2))
            hi = m2;
        else
            lo = m1;
    }
    return 2.0 / (lo + hi).to_double();
}

double k2_discriminant(const std::vector<double>& seed) {
    std::vector<Rational> exact;
    exact.reserve(seed.size());
    for (double v : seed) exact.push_back(Rational::from_double(v));
    return k2_discriminant_exact(exact);
}

double radius_estimate(double k2, std::complex<double> c) {
    if (!(k2 > 0.0)) throw std::domain_error("radius_estimate: K2 must be positive");
    double target = 1.0 / k2;
    double ac = std::abs(c);
    // on (0,1), r(|log r| + pi + |C|) is strictly increasing, so bisect
    auto g = [&](double r) { return r * (std::fabs(std::log(r)) + std::numbers::pi + ac); };
    double lo = 1e-300, hi = std::min(0.9999, target);
    if (g(hi) < target) return 0.99 * hi;
    for (int it = 0; it < 2000; ++it) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-16 * hi) break;
    }
    return 0.99 * lo;
}

double k1_from_majorant(const MajorantSequence& maj, double k2) {
    double lk2 = std::log(k2);
    double best = -std::numeric_limits<double>::infinity();
    for (int m = 0; m <= maj.max_m(); ++m)
        best = std::max(best, maj.log_values[static_cast<size_t>(m)] - m * lk2);
    return std::exp(best) * (1.0 + 1e-9);
}

ConvergenceEstimate estimate_convergence(int norm_m, int majorant_m, Family family,
                                         const GaussianRational& d_value,
                                         std::complex<double> c) {
    NormSequence n = norm_sequence_shadow(std::max(norm_m, 8), family, d_value);
    std::vector<double> seed(n.x.begin(), n.x.begin() + 8);
    MajorantSequence maj = majorant_sequence(seed, majorant_m);
    K2Estimate k2 = k2_root_test(maj);
    ConvergenceEstimate est;
    est.k2 = k2.k2;
    est.k1 = k1_from_majorant(maj, k2.k2);
    est.c_used = c;
    est.d_used = d_value;
    est.method = "root_test";
    est.r = radius_estimate(est.k2, c);
    return est;
}

std::vector<EtaRectangle> eta_domain(double k2, std::complex<double> c, int branch_min,
                                     int branch_max) {
    std::vector<EtaRectangle> out;
    for (int b = branch_min; b <= branch_max; ++b) {
        std::complex<double> cb = c + std::complex<double>(0.0, 2.0 * std::numbers::pi * b);
        EtaRectangle rect;
        rect.branch = b;
        rect.r_branch = radius_estimate(k2, cb);
        rect.re_max = std::log(rect.r_branch);
        rect.im_min = -std::numbers::pi + 2.0 * std::numbers::pi * b;
        rect.im_max = std::numbers::pi + 2.0 * std::numbers::pi * b;
        out.push_back(rect);
    }
    return out;
}

}  // namespace lorenzpsi
