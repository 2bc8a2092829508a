#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lorenzpsi/eval.hpp"
#include "lorenzpsi/orbits.hpp"

namespace lorenzpsi {

/// A located complex-time singularity of a real trajectory. The expansion
/// point t_star is real; t0 = t_star + rho e^{-i theta} is the lower
/// half-plane representative of the conjugate pair.
struct SingularityEstimate {
    enum class Stage { Asymptotic, Refined };
    double t_star = 0.0;
    double rho = 0.0;
    double theta = 0.0;  // in (0, pi)
    Cplx t0;
    Stage stage = Stage::Asymptotic;
    double tail_fit_residual = 0.0;  // stage-1 recurrence misfit, relative
};

struct AsymptoticConfig {
    int jet_order = 110;
    int window = 28;
    int n_windows = 4;
    double max_rel_residual = 2e-3;
    double min_theta = 1e-3;
};

/// Conjugate-pair location from the oscillatory tail of the Taylor
/// coefficients of z(t) at a real state: sliding least-squares fits of the
/// two-term linear recurrence a_n ~ p a_{n-1} + q a_{n-2} give the modulus
/// and angle of the pair; Richardson extrapolation in 1/n removes the
/// polynomial-amplitude drift.
SingularityEstimate nearest_singularity_estimate(const State& base, const AsymptoticConfig& cfg = {});

struct RefineConfig {
    double standoff_start_frac = 0.4;
    double standoff_shrink = 0.65;
    double standoff_floor = 2e-4;
    double move_tol = 1e-10;
    int max_iter = 60;
    int order = 30;
    double tolerance = 1e-12;
};

struct RefineResult {
    SingularityEstimate estimate;
    std::vector<TraceSample> approach_trace;  // last standoff path
    double final_standoff = 0.0;
};

/// Leading-order corrector: march toward the estimate along a straight
/// path, repeatedly updating t0 = t - sqrt(-1/(5 z(t))) with the root
/// picked consistently with the previous estimate, until the update
/// movement stalls or the standoff floor is reached.
RefineResult refine_singularity(const SingularityEstimate& est, const State& anchor,
                                const RefineConfig& cfg = {});

struct DivergenceCheck {
    bool holds = false;
    double min_product = 0.0;   // min |t-t0| (|x|+|y|+|z|) over the last decade
    double yz_product_first = 0.0;  // |t-t0|^2 (|y|+|z|) far end of the decade
    double yz_product_last = 0.0;   // ... near end (toward |Q_{-2}|+|R_{-2}|)
    int samples = 0;
};

/// Checks |t-t0| (|x|+|y|+|z|) >= 1/8 over the final approach decade of a
/// trace; requires the trace to come within 1e-3 of t0.
DivergenceCheck check_divergence_bound(const std::vector<TraceSample>& trace, Cplx t0);

struct FitConfig {
    int n_trunc = 20;
    int max_iter = 120;
    double rms_threshold = 1e-3;  // relative, weighted
    std::vector<Cplx> c_starts = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};
};

struct SingularityFit {
    Cplx t0;
    Family family = Family::Plus;
    Cplx c, d;
    double rms_residual = 0.0;      // weighted training rms
    double holdout_residual = 0.0;  // weighted validation rms
    double annulus_inner = 0.0, annulus_outer = 0.0;
    int n_trunc = 0;
    bool converged = false;
};

/// Nonlinear least squares over (t0 correction, C, D) for both families,
/// matching truncated-series values against integrated samples; the family
/// with the lower residual wins. Samples with odd indices are held out for
/// validation.
SingularityFit fit_psi_parameters(const CompiledSeries& plus_series,
                                  const CompiledSeries& minus_series,
                                  const std::vector<State>& samples, Cplx t0_init,
                                  const FitConfig& cfg = {});

/// Integrates from a real anchor state to points of the annulus
/// r_in <= |t - t0| <= r_out around t0, skipping a guard sector around the
/// branch-cut direction -conj(b).
std::vector<State> sample_annulus(const State& anchor, Cplx t0, Cplx b, double r_in,
                                  double r_out, int count, int order = 30,
                                  double tolerance = 1e-12);

struct LocateConfig {
    int scan_per_symbol = 8;
    AsymptoticConfig asymptotic;
    RefineConfig refine;
};

struct LocateResult {
    PeriodicOrbit orbit;
    std::vector<RefineResult> singularities;  // deduped, one period
    double min_abs_im = 0.0;
};

/// Full pipeline for one periodic orbit: scan expansion points over the
/// period, keep stage-1 candidates at local minima of rho, refine each
/// cluster representative, and report the conjugate-pair heights.
LocateResult locate_singularities(const PeriodicOrbit& orbit, const LocateConfig& cfg = {});

}  // namespace lorenzpsi
