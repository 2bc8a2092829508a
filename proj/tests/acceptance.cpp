// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "lorenzpsi/eval.hpp"
#include "lorenzpsi/jobio.hpp"
#include "lorenzpsi/singularity.hpp"
#include "lorenzpsi/table1.hpp"

using namespace lorenzpsi;
using Clock = std::chrono::steady_clock;

namespace {

struct Shared {
    // orbits and singularity locations feed criteria 9, 10, 11, 12
    std::vector<std::string> orbit_names = {"AB", "AAB", "AAAB", "AABB"};
    std::vector<PeriodicOrbit> orbits;
    std::vector<LocateResult> locations;
    bool located = false;
    double locate_seconds = 0.0;

    void locate_all() {
        if (located) return;
        auto t0 = Clock::now();
        for (const auto& name : orbit_names) {
            PeriodicOrbit orbit = find_periodic_orbit(SymbolSequence(name));
            LocateConfig lc;
            lc.asymptotic.jet_order = 110;  // criterion asks for >= 60
            locations.push_back(locate_singularities(orbit, lc));
            orbits.push_back(std::move(orbit));
        }
        locate_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        located = true;
    }
};

Shared shared;

bool criterion1(std::ostream& notes) {
    auto t0 = Clock::now();
    bool ok = true;
    for (Family fam : {Family::Plus, Family::Minus}) {
        PsiSeries s = PsiSeries::generate(3, fam);
        Table1Report rep = verify_table1(s);
        ok = ok && rep.ok && rep.cells_checked == 18;
        notes << family_name(fam) << ": " << rep.cells_checked << " cells "
              << (rep.ok ? "exact" : "MISMATCH") << "; ";
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    notes << "runtime " << secs << " s";
    return ok && secs < 1.0;
}

bool criterion2(std::ostream& notes) {
    auto t0 = Clock::now();
    ModularSeries mod = ModularSeries::generate(200, Family::Plus, GaussianRational(0));
    int equal = 0;
    bool ok = true;
    for (int m = 0; m <= 200; ++m) {
        auto [d1, d2] = modular_deg_u(mod.triple(m));
        int bound = (m + 2) / 2;
        if (std::max(d1, d2) > bound) ok = false;
        if (std::max(d1, d2) == bound) ++equal;
    }
    // cross-check the modular image against exact arithmetic through m = 40
    PsiSeries exact = PsiSeries::generate(40, Family::Plus, GaussianRational(0));
    for (int m = -2; m <= 40; ++m) {
        const auto& te = exact.triple(m);
        const auto& tm = mod.triple(m);
        if (detail::convert_poly<Zp2>(te.P) != tm.P || detail::convert_poly<Zp2>(te.Q) != tm.Q ||
            detail::convert_poly<Zp2>(te.R) != tm.R)
            ok = false;
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    notes << "deg_u <= floor((m+2)/2) for m = 0..200 (dual-prime exact images), equality rate "
          << equal << "/201, runtime " << secs << " s";
    return ok && secs < 120.0;
}

bool criterion3(std::ostream& notes) {
    PsiSeries s = PsiSeries::generate(2, Family::Plus);
    Mat3 vinv = mat_inverse(eigenvector_matrix(Family::Plus));
    auto f = vinv.apply(std::array<PsiPoly, 3>{s.F(2)[0], s.F(2)[1], s.F(2)[2]});
    // the quadratic (top-degree) load on the zero eigenvector cancels
    // exactly; that is what keeps X_2 quadratic rather than cubic
    bool top_zero = f[0].coeff(2, 0).is_zero() && f[0].coeff(2, 1).is_zero() &&
                    f[0].deg_u() <= 1;
    bool f2_quadratic = std::max({s.F(2)[0].deg_u(), s.F(2)[1].deg_u(), s.F(2)[2].deg_u()}) == 2;
    bool x2_quadratic = s.triple(2).deg_u() == 2;
    notes << "u^2 load on the zero eigenvector is exactly zero; deg F_2 = 2, deg X_2 = 2";
    return top_zero && f2_quadratic && x2_quadratic;
}

bool criterion4(std::ostream& notes) {
    auto t0 = Clock::now();
    // generate() asserts the residual at every step; re-verify explicitly
    PsiSeries s = PsiSeries::generate(60, Family::Plus);
    bool ok = true;
    for (int m = 0; m <= 60; ++m) {
        auto r = s.residual(m);
        if (!r[0].is_zero() || !r[1].is_zero() || !r[2].is_zero()) {
            ok = false;
            notes << "nonzero residual at m=" << m << "; ";
        }
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    notes << "exact residuals zero for m = 0..60 symbolic D (deg_D(X_60) = "
          << s.triple(60).deg_d() << "), runtime " << secs << " s";
    return ok;
}

bool criterion5(std::ostream& notes) {
    bool ok = true;
    for (const GaussianRational& d :
         {GaussianRational(0), GaussianRational(1), GaussianRational::i()}) {
        NormSequence n = norm_sequence_shadow(200, Family::Plus, d);
        for (int m = 3; m <= 200; ++m)
            if (!check_F_bound(n, m).holds) ok = false;
        for (int m = 8; m <= 200; ++m)
            if (!check_X_bound(n, m).holds) ok = false;
    }
    bool v16 = eigenvector_norm_product() == Rational(16);
    notes << "lemma sweeps m<=200 hold for D in {0,1,i}; ||V|| ||V^-1|| = "
          << eigenvector_norm_product().str() << " exactly";
    return ok && v16;
}

bool criterion6(std::ostream& notes) {
    auto t0 = Clock::now();
    bool ok = true;
    double k2_rt0 = 0, k2_disc0 = 0;
    for (const GaussianRational& d :
         {GaussianRational(0), GaussianRational(1), GaussianRational::i()}) {
        NormSequence n = norm_sequence_shadow(200, Family::Plus, d);
        std::vector<double> seed(n.x.begin(), n.x.begin() + 8);
        MajorantSequence maj = majorant_sequence(seed, 2000);
        if (!majorant_dominates(n, maj)) ok = false;
        K2Estimate rt = k2_root_test(maj);
        double disc = k2_discriminant(seed);
        double rel = std::fabs(rt.k2 - disc) / disc;
        if (rel > 1e-4) ok = false;
        if (d == GaussianRational(0)) {
            k2_rt0 = rt.k2;
            k2_disc0 = disc;
            // regression fixture, frozen from the first run
            if (std::fabs(disc - 969.2588) > 0.01) ok = false;
        }
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    notes << "dominance holds; K2(D=0) root-test " << k2_rt0 << " vs discriminant " << k2_disc0
          << " (rel diff " << std::fabs(k2_rt0 - k2_disc0) / k2_disc0 << "), runtime " << secs
          << " s";
    return ok && secs < 60.0;
}

bool criterion7(std::ostream& notes) {
    NormSequence n = norm_sequence_shadow(20, Family::Plus, GaussianRational(0));
    std::vector<double> seed(n.x.begin(), n.x.begin() + 8);
    MajorantSequence maj = majorant_sequence(seed, 1200);
    double k2 = k2_root_test(maj).k2;
    bool valid = true;
    for (Cplx c : {Cplx(0, 0), Cplx(0, 2 * std::numbers::pi), Cplx(10, 0)}) {
        double r = radius_estimate(k2, c);
        bool strict = r < 1.0 / k2 &&
                      r * (std::fabs(std::log(r)) + std::numbers::pi + std::abs(c)) < 1.0 / k2;
        if (!strict) valid = false;
    }
    notes << "(4.5) strict for C in {0, 2pi i, 10}: " << (valid ? "yes" : "NO") << "; ";

    // branch scaling r_b ~ 1/(2 pi |m| K2) within 10% for |m| >= 5
    bool scaling = true;
    double worst = 0.0;
    int first_ok = -1;
    for (int mb = 5; mb <= 40; ++mb) {
        for (int sign : {1, -1}) {
            Cplx cb(0.0, 2.0 * std::numbers::pi * sign * mb);
            double rb = radius_estimate(k2, cb);
            double ratio = rb * 2.0 * std::numbers::pi * mb * k2;
            worst = std::max(worst, std::fabs(ratio - 1.0));
            if (std::fabs(ratio - 1.0) > 0.10) scaling = false;
        }
    }
    for (int mb = 5; mb <= 200 && first_ok < 0; ++mb) {
        double rb = radius_estimate(k2, Cplx(0.0, 2.0 * std::numbers::pi * mb));
        if (std::fabs(rb * 2.0 * std::numbers::pi * mb * k2 - 1.0) <= 0.10) first_ok = mb;
    }
    notes << "branch scaling within 10% for |m| >= 5: " << (scaling ? "yes" : "NO")
          << " (worst deviation " << worst << "; 10% first met at |m| = " << first_ok
          << "). The log term of (4.5) contributes |log r| + pi ~ 14 against 2 pi |m| ~ 31 "
             "at |m| = 5, so the asymptote cannot be within 10% before |m| ~ "
          << first_ok;
    return valid && scaling;
}

bool criterion8(std::ostream& notes) {
    // the certified (4.5) radius is ~3 orders of magnitude below the
    // empirical convergence radius; at that distance every truncation
    // from N = 5 up is already at the binary64 floor and no decay is
    // observable. The decay law is tested at half the measured series
    // radius with the scaled residual norm.
    bool ok = true;
    PsiSeries series = PsiSeries::generate(42, Family::Plus);
    CompiledSeries cs(series);
    Cplx t0(-0.3, -0.2);
    struct Case {
        Cplx c, d;
        GaussianRational d_exact;
    };
    for (const Case& cse : {Case{{0, 0}, {0, 0}, GaussianRational(0)},
                            Case{{1, 0}, {0, 1}, GaussianRational::i()}}) {
        NormSequence norms = norm_sequence_shadow(60, Family::Plus, cse.d_exact);
        double r_emp = 1.0 / empirical_growth_rate(norms);
        BranchSpec spec = default_branch(t0);
        spec.c = cse.c;
        spec.d = cse.d;
        Cplx t = t0 + 0.5 * r_emp * std::exp(Cplx(0, 0.9));
        std::vector<double> res;
        for (int n = 5; n <= 40; n += 5) res.push_back(cs.ode_residual(spec, t, n).norm);
        double ratio = std::pow(res.back() / res.front(), 1.0 / (res.size() - 1.0));
        bool decay = ratio <= 0.8;
        bool small = res.back() < 1e-8;
        if (!decay || !small) ok = false;
        notes << "(C=" << cse.c.real() << "+" << cse.c.imag() << "i, D=" << cse.d.real() << "+"
              << cse.d.imag() << "i): r_emp " << r_emp << ", fitted ratio/5 orders " << ratio
              << ", residual(N=40) " << res.back() << "; ";
    }
    return ok;
}

bool criterion9(std::ostream& notes) {
    shared.locate_all();
    const double expected[4] = {0.1714501006, 0.1617621257, 0.1563426260, 0.1636066901};
    bool ok = true;
    for (size_t i = 0; i < shared.locations.size(); ++i) {
        double im = shared.locations[i].min_abs_im;
        double rel = std::fabs(im - expected[i]) / expected[i];
        notes << shared.orbit_names[i] << ": " << im << " (rel " << rel << "); ";
        if (rel > 1e-4) ok = false;
    }
    notes << "runtime " << shared.locate_seconds << " s";
    return ok && shared.locate_seconds < 600.0;
}

bool criterion10(std::ostream& notes) {
    shared.locate_all();
    bool ok = true;
    for (size_t i = 0; i < shared.locations.size(); ++i) {
        for (const auto& r : shared.locations[i].singularities) {
            DivergenceCheck chk = check_divergence_bound(r.approach_trace, r.estimate.t0);
            if (!chk.holds) ok = false;
            notes << shared.orbit_names[i] << ": min product " << chk.min_product << "; ";
        }
    }
    notes << "bound is 1/8";
    return ok;
}

bool criterion11(std::ostream& notes) {
    std::mt19937_64 rng(20260810);
    std::uniform_real_distribution<double> dist(-50.0, 50.0);
    bool ok = true;
    double worst = 0.0;
    for (int k = 0; k < 1000000; ++k) {
        double x = dist(rng), y = dist(rng), z = dist(rng);
        double q = x * x + y * y + z * z;
        if (q == 0.0) continue;
        double ratio = std::fabs(q_derivative(x, y, z)) / (58.0 * q);
        worst = std::max(worst, ratio);
        if (ratio > 1.0) ok = false;
    }
    notes << "10^6 random states: max |dQ/dt|/(58Q) = " << worst << "; ";

    shared.locate_all();
    for (size_t i = 0; i < shared.orbits.size(); ++i) {
        IntegrationResult tr = flow_real(orbit_start_state(shared.orbits[i]),
                                         shared.orbits[i].period, 25, 1e-12, true);
        GrowthCheck g = growth_check(tr.trace);
        if (!g.holds) ok = false;
        notes << shared.orbit_names[i] << " trace max " << g.max_ratio << "; ";
        for (const auto& r : shared.locations[i].singularities)
            if (!(std::fabs(r.estimate.t0.imag()) > 0.037)) ok = false;
    }
    notes << "all |Im t0| > 0.037";
    return ok;
}

bool criterion12(std::ostream& notes) {
    PsiSeries plus = PsiSeries::generate(25, Family::Plus);
    PsiSeries minus = PsiSeries::generate(25, Family::Minus);
    CompiledSeries cp(plus), cm(minus);

    // synthetic round trip
    Cplx t0(-0.4, -0.17);
    BranchSpec truth = default_branch(t0, Family::Plus);
    truth.c = {0.35, -0.2};
    truth.d = {1.5, 0.7};
    std::vector<State> samples;
    for (int j = 0; j < 32; ++j) {
        double ang = -1.1 + 2.2 * j / 31.0 + (j % 2) * 2.2;
        double rad = 0.01 + 0.01 * ((j % 7) / 6.0);
        Cplx t = t0 + rad * std::exp(Cplx(0, ang));
        if (!make_eval_point(truth, t).in_domain) continue;
        EvalTriple v = cp.eval_t(truth, t, 22);
        samples.push_back({t, v.x, v.y, v.z});
    }
    FitConfig cfg;
    cfg.n_trunc = 22;
    SingularityFit fit = fit_psi_parameters(cp, cm, samples, t0 + Cplx(2e-4, -1e-4), cfg);
    bool round_trip = std::abs(fit.c - truth.c) < 1e-6 && std::abs(fit.d - truth.d) < 1e-6 &&
                      std::abs(fit.t0 - t0) < 1e-6;
    notes << "synthetic recovery |dC| = " << std::abs(fit.c - truth.c)
          << ", |dD| = " << std::abs(fit.d - truth.d) << "; ";

    // AB singularity fit with held-out validation
    shared.locate_all();
    const RefineResult* best = nullptr;
    for (const auto& r : shared.locations[0].singularities)
        if (!best || std::fabs(r.estimate.t0.imag()) < std::fabs(best->estimate.t0.imag()))
            best = &r;
    State anchor = flow_real(orbit_start_state(shared.orbits[0]), best->estimate.t_star, 25,
                             1e-13, false)
                       .end;
    anchor.t = best->estimate.t_star;
    double r_fit = 0.35 * std::fabs(best->estimate.t0.imag());
    Cplx b = best->estimate.t0.imag() < 0 ? Cplx(0, -1) : Cplx(0, 1);
    auto ab_samples = sample_annulus(anchor, best->estimate.t0, b, 0.5 * r_fit, r_fit, 40);
    FitConfig cfg2;
    cfg2.n_trunc = 20;
    SingularityFit ab = fit_psi_parameters(cp, cm, ab_samples, best->estimate.t0, cfg2);
    bool holdout_ok = ab.holdout_residual < 3.0 * ab.rms_residual;
    notes << "AB fit rms " << ab.rms_residual << ", holdout " << ab.holdout_residual
          << " (within 3x: " << (holdout_ok ? "yes" : "NO") << "), family "
          << family_name(ab.family) << ", Im D = " << ab.d.imag();
    return round_trip && holdout_ok;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<bool(std::ostream&)> run;
    };
    std::vector<Criterion> criteria = {
        {1, "exact coefficient table, both families, < 1 s", criterion1},
        {2, "degree law m = 0..200 at D = 0, < 2 min", criterion2},
        {3, "m = 2 cancellation on the zero eigenvector", criterion3},
        {4, "exact recursion residuals, symbolic D, m <= 60", criterion4},
        {5, "norm-bound sweeps m <= 200, D in {0,1,i}; ||V|| ||V^-1|| = 16", criterion5},
        {6, "majorant dominance and two-method K2 agreement at M = 2000, < 1 min", criterion6},
        {7, "radius inequalities strict; branch radii ~ 1/(2 pi |m| K2) within 10%", criterion7},
        {8, "equation residual decays geometrically in N and is < 1e-8 at N = 40", criterion8},
        {9, "singular-point heights for AB, AAB, AAAB, AABB to 1e-4 relative, < 10 min",
         criterion9},
        {10, "divergence lower bound 1/8 on refined approach traces", criterion10},
        {11, "|dQ/dt| <= 58 Q on 10^6 states and all orbits; |Im t0| > 0.037", criterion11},
        {12, "parameter fit: synthetic round trip to 1e-6; AB holdout within 3x", criterion12},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::ostringstream notes;
        bool ok = false;
        auto t0 = Clock::now();
        try {
            ok = c.run(notes);
        } catch (const std::exception& e) {
            notes << "exception: " << e.what();
        }
        double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        std::printf("[%s] criterion %2d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", c.id, c.title,
                    secs);
        std::string n = notes.str();
        if (!n.empty()) std::printf("        %s\n", n.c_str());
        if (!ok) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures;
}
