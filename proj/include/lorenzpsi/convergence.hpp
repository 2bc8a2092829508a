#pragma once

#include <complex>
#include <vector>

#include "lorenzpsi/series.hpp"

namespace lorenzpsi {

/// |X_m| = max(|P_{m+1}|, |Q_m|, |R_m|) for m = 0..M at a fixed numeric D,
/// together with the matching |F_m| sequence. norm_x(-1) is also kept since
/// the bound proofs lean on |X_{-1}| < 10.
struct NormSequence {
    GaussianRational d;
    double x_minus1 = 0.0;             // |X_{-1}|
    std::vector<double> x;             // x[m] = |X_m|, m = 0..M
    std::vector<double> f;             // f[m] = |F_m|, m = 0..M (f[0..?] as built)
    int max_m() const { return static_cast<int>(x.size()) - 1; }
};

/// Norms straight from an exact series (requires series generated at the
/// same numeric D, or symbolic D substituted here).
NormSequence norm_sequence(const PsiSeries& series, const GaussianRational& d_value);
/// Fast path: binary64 shadow recursion at numeric D up to max_m.
NormSequence norm_sequence_shadow(int max_m, Family family, const GaussianRational& d_value);

struct BoundCheck {
    double lhs = 0.0, rhs = 0.0;
    bool holds = false;
};

/// |F_m| <= 30|X_{m-1}| + 28|X_{m-2}| + sum_{j=1}^{m-1} |X_{m-j-1}||X_{j-1}|, m >= 3.
BoundCheck check_F_bound(const NormSequence& n, int m);
/// |X_m| <= 192 |F_m| / (m-2), m >= 8 (errors below 8: lemma hypothesis).
BoundCheck check_X_bound(const NormSequence& n, int m);

/// ||V||_inf * ||V^-1||_inf, exactly (every entry of V and V^-1 is purely
/// real or purely imaginary). Equals 16.
Rational eigenvector_norm_product();

/// For |alpha| >= a(n + 1/2), a > 1, n = deg f: the polynomial solution of
/// xi' = alpha xi + f satisfies |xi| <= (1/|alpha|) (a/(a-1)) |f|.
BoundCheck scalar_ode_norm_bound_check(const GaussianRational& alpha, const PsiPoly& f,
                                       double a);

/// Dominating sequence x_m = 960 x_{m-1} + 896 x_{m-2}
/// + 32 sum_{j=1}^{m-1} x_{m-j-1} x_{j-1} for m >= 8, seeded with the first
/// eight norms. Kept in the log domain; the values overflow binary64 fast.
struct MajorantSequence {
    std::vector<double> seed;        // x_0 .. x_7
    std::vector<double> log_values;  // log x_m, m = 0..M
    int max_m() const { return static_cast<int>(log_values.size()) - 1; }
};

MajorantSequence majorant_sequence(const std::vector<double>& seed_x0_to_x7, int max_m);

/// x_m >= |X_m| for every m both sequences cover.
bool majorant_dominates(const NormSequence& n, const MajorantSequence& maj,
                        double rel_slack = 1e-12);

struct K2Estimate {
    double k2 = 0.0;
    double fit_rms = 0.0;        // residual of the tail fit (root test)
    double plain_root_test = 0.0;  // un-extrapolated x_M^{1/M}
};

/// lim sup x_m^{1/m} via a tail fit of log x_m - log x_{m-1} against
/// (1, 1/m, 1/m^2). Errors when the fit residual says the tail has not
/// settled.
K2Estimate k2_root_test(const MajorantSequence& maj);

/// Exact rational norms |X_0|..|X_7| for a real rational D: every
/// coefficient is then purely real or purely imaginary, so the norms are
/// rational. Throws if some coefficient is not axis-aligned.
std::vector<Rational> exact_norm_seed(const PsiSeries& series, const Rational& d_value);

/// Independent oracle: 1 / (smallest-modulus root of the discriminant of
/// the generating-function quadratic), using the seed-derived correction
/// polynomial c_0..c_7. The discriminant has a near-degenerate pair of
/// real roots at the radius (separation ~1e-10 relative), far below what
/// binary64 evaluation can resolve, so root isolation runs in exact
/// rational arithmetic (Sturm chain) with an exact minimum search as the
/// fallback when seed rounding lifts the pair off the axis.
double k2_discriminant(const std::vector<double>& seed_x0_to_x7);
double k2_discriminant_exact(const std::vector<Rational>& seed_x0_to_x7);

/// All roots of a complex-coefficient polynomial (Aberth-Ehrlich); used to
/// cross-check the discriminant route.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs);
/// The discriminant polynomial itself, ascending coefficients.
std::vector<double> discriminant_polynomial(const std::vector<double>& seed_x0_to_x7);

struct ConvergenceEstimate {
    double k2 = 0.0;
    double k1 = 0.0;
    double r = 0.0;
    std::complex<double> c_used;
    GaussianRational d_used;
    std::string method;  // "root_test" or "discriminant"
};

/// Largest r with r < 1/K2 and r(|log r| + pi + |C|) < 1/K2, by bisection,
/// times a 0.99 safety factor so both inequalities hold strictly.
double radius_estimate(double k2, std::complex<double> c);

/// K1 = max_m x_m / K2^m from the majorant (so |X_m| <= K1 K2^m holds for
/// every computed m).
double k1_from_majorant(const MajorantSequence& maj, double k2);

ConvergenceEstimate estimate_convergence(int norm_m, int majorant_m, Family family,
                                         const GaussianRational& d_value,
                                         std::complex<double> c);

struct EtaRectangle {
    int branch = 0;
    double re_max = 0.0;
    double im_min = 0.0, im_max = 0.0;  // (-pi + 2 pi b, pi + 2 pi b]
    double r_branch = 0.0;
};

/// Per-branch semi-infinite rectangles of the eta-plane convergence domain:
/// branch b uses the radius at C + 2 pi i b.
std::vector<EtaRectangle> eta_domain(double k2, std::complex<double> c, int branch_min,
                                     int branch_max);

}  // namespace lorenzpsi
