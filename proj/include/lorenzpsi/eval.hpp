#pragma once

#include <complex>

#include "lorenzpsi/convergence.hpp"
#include "lorenzpsi/series.hpp"

namespace lorenzpsi {

using Cplx = std::complex<double>;

/// Where and how a truncated series is evaluated: center t0, branch factor
/// b with |b| = 1 (the cut is the ray {t0 - conj(b) p : p >= 0}), the two
/// undetermined constants, and the family. Points within cut_sleeve
/// radians of the cut are rejected as out of domain.
struct BranchSpec {
    Cplx t0;
    Cplx b{0.0, -1.0};
    Cplx c{0.0, 0.0};
    Cplx d{0.0, 0.0};
    Family family = Family::Plus;
    double cut_sleeve = 1e-3;
};

/// b defaults to -i for Im(t0) < 0 and +i otherwise, keeping the cut off
/// the real axis.
BranchSpec default_branch(Cplx t0, Family family = Family::Plus);

struct EvalPoint {
    Cplx t;
    Cplx eta;
    bool in_domain = false;
};

EvalPoint make_eval_point(const BranchSpec& spec, Cplx t);

struct EvalTriple {
    Cplx x, y, z;
};

/// Exact series coefficients flattened to binary64 once, so grid
/// evaluations do not touch GMP.
class CompiledSeries {
public:
    explicit CompiledSeries(const PsiSeries& series);

    int max_m() const { return max_m_; }
    Family family() const { return family_; }

    /// Partial sums over powers (t-t0)^m for m <= n_trunc.
    EvalTriple eval_t(const BranchSpec& spec, Cplx t, int n_trunc) const;

    /// Same sums parametrized by eta (no branch cut): (t-t0) = conj(b) e^eta.
    EvalTriple eval_eta(const BranchSpec& spec, Cplx eta, int n_trunc) const;

    struct Residual {
        Cplx r1, r2, r3;      // raw residuals of the three equations
        double norm_raw = 0;  // max |r_i|
        double norm = 0;      // max |r_i| / (1 + sum of |term| in equation i)
    };
    /// How well the truncation satisfies the system at t, using the exact
    /// term-wise derivative d/dt [P_m(eta) w^m] = (P_m' + m P_m) w^{m-1}.
    Residual ode_residual(const BranchSpec& spec, Cplx t, int n_trunc) const;

    /// Shared core: w = t - t0 (or conj(b) e^eta), u = eta + C.
    EvalTriple eval_core(Cplx u, Cplx w, Cplx d, int n_trunc, bool derivative) const;

private:
    struct Term {
        uint32_t u_pow, d_pow;
        Cplx coeff;
    };
    struct Comp {
        std::vector<Term> val;
        std::vector<Term> diff;  // d/du
    };
    Family family_;
    int max_m_;
    uint32_t max_u_ = 0, max_d_ = 0;
    std::vector<std::array<Comp, 3>> entries_;  // index m + 2
};

/// Upper bound on the dropped tail sum_{m > N} from the geometric-with-log
/// majorant; requires |t - t0| < est.r.
double tail_bound(const ConvergenceEstimate& est, const BranchSpec& spec, Cplx t, int n_trunc);
/// Matching bound for the term-wise derivative series.
double tail_bound_derivative(const ConvergenceEstimate& est, const BranchSpec& spec, Cplx t,
                             int n_trunc);

/// Root-test growth rate of the actual |X_m| norms over the tail third;
/// 1/rate is the empirical convergence radius of the series itself (the
/// certified radius from the majorant is far smaller).
double empirical_growth_rate(const NormSequence& norms);

}  // namespace lorenzpsi
