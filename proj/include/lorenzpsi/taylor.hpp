#pragma once

#include <complex>
#include <vector>

#include "lorenzpsi/eval.hpp"

namespace lorenzpsi {

/// One point of a trajectory in complex time.
struct State {
    Cplx t;
    Cplx x, y, z;
};

/// Right-hand side of the system at a state.
State lorenz_rhs(const State& s);

/// Truncated Taylor expansion of the solution at a base state, built by
/// Cauchy-product recurrences. The jet doubles as the local analyticity
/// probe: its coefficient growth estimates the distance to the nearest
/// singularity (trust radius).
template <class Real>
struct TaylorJetT {
    using C = std::complex<Real>;
    struct Coeff {
        C x, y, z;
    };
    C t0;
    int order = 0;
    std::vector<Coeff> coeffs;  // coeffs[0] is the base state

    static TaylorJetT build(C t, C x, C y, C z, int order);

    /// Horner evaluation at offset h.
    void eval(C h, C& x, C& y, C& z) const;
    /// Term-wise derivative at offset h.
    void eval_derivative(C h, C& dx, C& dy, C& dz) const;

    Real coeff_mag(int n) const;
    /// Root-test estimate of the radius of convergence at the base point.
    Real trust_radius() const;
    /// Magnitude of the last two retained terms at |h|.
    Real error_estimate(Real abs_h) const;
};

using TaylorJet = TaylorJetT<double>;

TaylorJet taylor_jet(const State& s, int order);

struct PathSpec {
    std::vector<Cplx> waypoints;
    double tolerance = 1e-12;
    double max_step = 0.25;
};

struct PrecisionConfig {
    int mantissa_bits = 53;  // 53 = binary64, 64 = x87 extended
    int taylor_order = 25;
};

struct TraceSample {
    Cplx t;
    Cplx x, y, z;
    double step = 0.0;
    double err_est = 0.0;
};

struct IntegrationResult {
    State end{};
    bool diverged = false;      // structured outcome, consumed by the locator
    size_t steps = 0;
    std::vector<TraceSample> trace;
};

/// Adaptive Taylor integration along the waypoint polyline. Steps are
/// 0.8 x trust radius, further capped by the local-error-per-unit-step
/// tolerance and max_step. Hitting the step floor (suspected blowup)
/// returns diverged = true with the last reachable state.
IntegrationResult integrate_path(const State& s, const PathSpec& path,
                                 const PrecisionConfig& cfg = {}, bool keep_trace = true);

/// A step outcome: either the new state or a rejection (|h| beyond the
/// jet's trust radius).
struct StepResult {
    State state{};
    double err_est = 0.0;
    bool rejected = false;
};
StepResult step(const TaylorJet& jet, Cplx h);

struct GrowthCheck {
    bool holds = true;
    double max_ratio = 0.0;  // max |dQ/dt| / (58 Q)
};

/// Verifies |dQ/dt| <= 58 Q with Q = x^2+y^2+z^2 at every accepted sample
/// of a real-time trace (real data implies the bound; complex samples are
/// rejected).
GrowthCheck growth_check(const std::vector<TraceSample>& trace);

/// |dQ/dt| evaluated through the right-hand side at a real state.
double q_derivative(double x, double y, double z);

}  // namespace lorenzpsi
