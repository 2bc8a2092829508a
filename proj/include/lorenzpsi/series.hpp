#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lorenzpsi/mat3.hpp"
#include "lorenzpsi/poly.hpp"

namespace lorenzpsi {

/// The two formal solution families, related by the Lorenz symmetry
/// (x, y, z) -> (-x, -y, z): the minus family negates every P and Q
/// while leaving the Rs unchanged.
enum class Family { Plus, Minus };

inline const char* family_name(Family f) { return f == Family::Plus ? "plus" : "minus"; }

/// One rung of the recursion: X_m = (P_{m+1}, Q_m, R_m).
template <class Ring>
struct CoeffTripleT {
    int m = 0;
    PolyT<Ring> P, Q, R;  // P is P_{m+1}

    int deg_u() const { return std::max({P.deg_u(), Q.deg_u(), R.deg_u()}); }
    int deg_d() const { return std::max({P.deg_d(), Q.deg_d(), R.deg_d()}); }
};

using CoeffTriple = CoeffTripleT<GaussianRational>;

/// Exact building blocks of the recursion (independent of the ring the
/// series is generated over).

/// Leading coefficients: X_{-2} = (P_{-1}, Q_{-2}, R_{-2}) and
/// X_{-1} = (P_0, Q_{-1}, R_{-1}).
std::pair<CoeffTriple, CoeffTriple> leading_coefficients(Family family);

/// The recursion matrix A_m. For the plus family the rows are exactly
/// [-m-1, 10, 0; 1/5, -m, -2i; -i/5, 2i, -m]; the minus family flips the
/// signs of the off-diagonal entries built from P_{-1} and Q_{-2}.
Mat3 build_A(int m, Family family = Family::Plus);

/// Matrix of eigenvectors of A_m (independent of m since A_m = A_0 - mI),
/// columns ordered to match eigenvalues (2-m, -m, -3-m).
Mat3 eigenvector_matrix(Family family = Family::Plus);

/// Solves xi' = alpha*xi + f for the unique polynomial solution, alpha != 0.
/// D passes through as an inert second variable. The alpha = 0 branch (an
/// antiderivative with a free constant) is deliberately not taken here:
/// callers at m = 0 and m = 2 own that logic, anyone else gets an error.
PsiPoly solve_scalar_poly_ode(const GaussianRational& alpha, const PsiPoly& f);

struct GenerateOptions {
    bool check_residual = true;  // exact rings: assert X' - A X - F == 0 per m
    bool keep_F = true;
    double m2_cancellation_tol = 1e-9;  // inexact rings, relative to |F_2|
};

/// Per-step diagnostics. residual_rel is 0 for exact rings (they assert);
/// for the binary64 shadow it records max residual coefficient relative to
/// the largest coefficient of F_m.
struct StepRecord {
    int m = 0;
    int deg_u = -1;
    int deg_d = -1;
    bool deg_bound_holds = true;   // deg_u <= floor((m+2)/2), m >= 0
    bool deg_bound_equality = false;
    double residual_rel = 0.0;
};

/// A generated psi-series coefficient table over a ring. Index i of
/// coeffs() holds X_{i-2}; generation is sequential in m. Immutable after
/// generate().
template <class Ring>
class SeriesT {
public:
    using Poly = PolyT<Ring>;
    using Triple = CoeffTripleT<Ring>;
    using Vec3 = std::array<Poly, 3>;

    /// d_value empty means D stays symbolic (second exponent of the
    /// polynomials); otherwise D is substituted at m = 2 and everything
    /// stays univariate in u.
    static SeriesT generate(int max_m, Family family,
                            std::optional<GaussianRational> d_value = std::nullopt,
                            GenerateOptions opt = {});

    Family family() const { return family_; }
    int max_m() const { return max_m_; }
    bool symbolic_d() const { return !d_value_.has_value(); }
    const std::optional<GaussianRational>& d_value() const { return d_value_; }

    const Triple& triple(int m) const { return coeffs_.at(static_cast<size_t>(m + 2)); }
    const std::vector<Triple>& coeffs() const { return coeffs_; }

    /// F_m as used at step m (kept when opt.keep_F); index by m >= 0.
    const Vec3& F(int m) const { return F_.at(static_cast<size_t>(m)); }
    bool has_F() const { return !F_.empty(); }

    const std::vector<StepRecord>& records() const { return records_; }
    const StepRecord& record(int m) const { return records_.at(static_cast<size_t>(m)); }

    /// Convolution right-hand side F_m of the recursion; requires the full
    /// history below m.
    Vec3 build_F(int m) const;

    /// X_m' - A_m X_m - F_m, computed in the ring.
    Vec3 residual(int m) const;

private:
    Family family_ = Family::Plus;
    int max_m_ = -2;
    std::optional<GaussianRational> d_value_;
    std::vector<Triple> coeffs_;
    std::vector<Vec3> F_;
    std::vector<StepRecord> records_;

    Vec3 step(int m, const Vec3& F, const GenerateOptions& opt);
    Vec3 step_zero_eigenvalue(int m, const Vec3& F, const GenerateOptions& opt);
    Vec3 step_general(int m, const Vec3& F) const;
};

using PsiSeries = SeriesT<GaussianRational>;
using ShadowSeries = SeriesT<std::complex<double>>;
using ModularSeries = SeriesT<Zp2>;

/// max(|P_{m+1}|, |Q_m|, |R_m|) with D substituted (exact series).
double triple_norm(const CoeffTriple& t, const GaussianRational& d_val);
double triple_norm(const CoeffTripleT<std::complex<double>>& t);

/// Modular degree probes: u-degree of the image mod each prime separately
/// (a coefficient hidden by one prime is visible to the other).
std::pair<int, int> modular_deg_u(const CoeffTripleT<Zp2>& t);

namespace detail {
template <class Ring>
PolyT<Ring> convert_poly(const PsiPoly& p) {
    PolyT<Ring> r;
    for (const auto& [k, c] : p.terms()) r.set(k.first, k.second, RingTraits<Ring>::from(c));
    return r;
}
}  // namespace detail

}  // namespace lorenzpsi
