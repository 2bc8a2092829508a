#include "lorenzpsi/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lorenzpsi {

namespace {

struct PairFit {
    double rho = 0.0, theta = 0.0;
    double residual = 0.0;
    bool oscillatory = false;
};

// least-squares (p, q) with a_n ~ p a_{n-1} + q a_{n-2} over [lo, hi]
PairFit fit_recurrence(const std::vector<double>& a, int lo, int hi) {
    double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
    for (int n = lo; n <= hi; ++n) {
        double x1 = a[static_cast<size_t>(n - 1)], x2 = a[static_cast<size_t>(n - 2)];
        double y = a[static_cast<size_t>(n)];
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        b1 += x1 * y;
        b2 += x2 * y;
    }
    double det = s11 * s22 - s12 * s12;
    PairFit f;
    if (std::fabs(det) < 1e-300) return f;
    double p = (b1 * s22 - b2 * s12) / det;
    double q = (s11 * b2 - s12 * b1) / det;
    double disc = p * p + 4.0 * q;
    if (disc >= 0.0) return f;  // roots not a conjugate pair
    f.oscillatory = true;
    f.rho = 1.0 / std::sqrt(-q);
    f.theta = std::atan2(0.5 * std::sqrt(-disc), 0.5 * p);
    double rss = 0, scale = 0;
    for (int n = lo; n <= hi; ++n) {
        double pred = p * a[static_cast<size_t>(n - 1)] + q * a[static_cast<size_t>(n - 2)];
        rss += (a[static_cast<size_t>(n)] - pred) * (a[static_cast<size_t>(n)] - pred);
        scale += a[static_cast<size_t>(n)] * a[static_cast<size_t>(n)];
    }
    f.residual = std::sqrt(rss / std::max(scale, 1e-300));
    return f;
}

// linear extrapolation e(n) = e_inf + c/n over sample points
double richardson(const std::vector<std::pair<double, double>>& pts) {
    double s11 = pts.size(), s12 = 0, s22 = 0, b1 = 0, b2 = 0;
    for (auto [n, e] : pts) {
        double g = 1.0 / n;
        s12 += g;
        s22 += g * g;
        b1 += e;
        b2 += g * e;
    }
    double det = s11 * s22 - s12 * s12;
    if (std::fabs(det) < 1e-300) return pts.back().second;
    return (b1 * s22 - b2 * s12) / det;
}

}  // namespace

SingularityEstimate nearest_singularity_estimate(const State& base,
                                                 const AsymptoticConfig& cfg) {
    if (std::fabs(base.x.imag()) + std::fabs(base.y.imag()) + std::fabs(base.z.imag()) > 1e-12)
        throw std::domain_error("nearest_singularity_estimate: base state must be real");
    TaylorJet jet = taylor_jet(base, cfg.jet_order);
    std::vector<double> a(static_cast<size_t>(cfg.jet_order) + 1);
    for (int n = 0; n <= cfg.jet_order; ++n) a[static_cast<size_t>(n)] = jet.coeffs[static_cast<size_t>(n)].z.real();

    std::vector<std::pair<double, double>> rho_pts, theta_pts;
    double worst_residual = 0.0;
    for (int wnd = 0; wnd < cfg.n_windows; ++wnd) {
        int hi = cfg.jet_order - 4 * wnd;
        int lo = hi - cfg.window + 1;
        if (lo < 8)
            throw std::domain_error("nearest_singularity_estimate: jet order too low");
        PairFit f = fit_recurrence(a, lo, hi);
        if (!f.oscillatory || f.residual > cfg.max_rel_residual)
            throw std::runtime_error(
                "nearest_singularity_estimate: no clean oscillatory tail (expansion point "
                "too far from the dominant pair)");
        double mid = 0.5 * (lo + hi);
        rho_pts.push_back({mid, f.rho});
        theta_pts.push_back({mid, f.theta});
        worst_residual = std::max(worst_residual, f.residual);
    }
    SingularityEstimate est;
    est.t_star = base.t.real();
    est.rho = richardson(rho_pts);
    est.theta = richardson(theta_pts);
    est.tail_fit_residual = worst_residual;
    if (!(est.theta > cfg.min_theta) || est.theta >= std::numbers::pi)
        throw std::runtime_error(
            "nearest_singularity_estimate: angle collapsed toward the real axis");
    est.t0 = Cplx(est.t_star, 0.0) + est.rho * std::exp(Cplx(0.0, -est.theta));
    est.stage = SingularityEstimate::Stage::Asymptotic;
    return est;
}

RefineResult refine_singularity(const SingularityEstimate& est, const State& anchor,
                                const RefineConfig& cfg) {
    RefineResult out;
    Cplx t0 = est.t0;
    double last_move = 1e300;
    int grow_streak = 0;
    double d = est.rho * cfg.standoff_start_frac;
    PrecisionConfig prec;
    prec.taylor_order = cfg.order;
    for (int it = 0; it < cfg.max_iter; ++it) {
        Cplx back = anchor.t - t0;
        Cplx dir = back / std::abs(back);
        Cplx standoff = t0 + d * dir;
        PathSpec path;
        path.waypoints = {anchor.t, standoff};
        path.tolerance = cfg.tolerance;
        IntegrationResult r = integrate_path(anchor, path, prec, true);
        if (r.diverged)
            throw std::runtime_error("refine_singularity: integration diverged before standoff");
        Cplx w = std::sqrt(-1.0 / (5.0 * r.end.z));
        Cplx cand1 = standoff - w, cand2 = standoff + w;
        Cplx next = std::abs(cand1 - t0) <= std::abs(cand2 - t0) ? cand1 : cand2;
        double move = std::abs(next - t0);
        if (move > 2.0 * last_move && ++grow_streak >= 3)
            throw std::runtime_error("refine_singularity: oscillating root selection");
        if (move <= 2.0 * last_move) grow_streak = 0;
        last_move = move;
        t0 = next;
        out.approach_trace = std::move(r.trace);
        out.final_standoff = d;
        bool at_floor = d <= cfg.standoff_floor * 1.0000001;
        if (at_floor && move < cfg.move_tol) break;
        d = std::max(d * cfg.standoff_shrink, cfg.standoff_floor);
    }
    out.estimate = est;
    out.estimate.t0 = t0;
    out.estimate.stage = SingularityEstimate::Stage::Refined;
    out.estimate.rho = std::abs(t0 - Cplx(est.t_star, 0.0));
    out.estimate.theta = std::fabs(std::arg(t0 - Cplx(est.t_star, 0.0)));
    return out;
}

DivergenceCheck check_divergence_bound(const std::vector<TraceSample>& trace, Cplx t0) {
    DivergenceCheck chk;
    double dmin = 1e300;
    for (const auto& ts : trace) dmin = std::min(dmin, std::abs(ts.t - t0));
    if (!(dmin <= 1e-3))
        throw std::domain_error(
            "check_divergence_bound: trace does not approach t0 within 1e-3");
    chk.min_product = 1e300;
    double far_d = 0.0, near_d = 1e300;
    for (const auto& ts : trace) {
        double dist = std::abs(ts.t - t0);
        if (dist > 10.0 * dmin) continue;
        double amp = std::abs(ts.x) + std::abs(ts.y) + std::abs(ts.z);
        chk.min_product = std::min(chk.min_product, dist * amp);
        double yz = dist * dist * (std::abs(ts.y) + std::abs(ts.z));
        if (dist > far_d) {
            far_d = dist;
            chk.yz_product_first = yz;
        }
        if (dist < near_d) {
            near_d = dist;
            chk.yz_product_last = yz;
        }
        ++chk.samples;
    }
    chk.holds = chk.min_product >= 0.125;
    return chk;
}

std::vector<State> sample_annulus(const State& anchor, Cplx t0, Cplx b, double r_in,
                                  double r_out, int count, int order, double tolerance) {
    if (!(r_in > 0.0) || !(r_out > r_in))
        throw std::domain_error("sample_annulus: need 0 < r_in < r_out");
    std::vector<State> samples;
    PrecisionConfig prec;
    prec.taylor_order = order;
    double cut_angle = std::arg(-std::conj(b));
    const double guard = 0.45;
    int placed = 0, attempt = 0;
    while (placed < count && attempt < 4 * count + 32) {
        double frac = static_cast<double>(attempt) / std::max(1, count);
        double ang = -std::numbers::pi + 2.0 * std::numbers::pi * frac;
        double radius = r_in + (r_out - r_in) * ((attempt % 5) / 4.0);
        ++attempt;
        double diff = std::remainder(ang - cut_angle, 2.0 * std::numbers::pi);
        if (std::fabs(diff) < guard) continue;
        Cplx target = t0 + radius * std::exp(Cplx(0.0, ang));
        PathSpec path;
        path.waypoints = {anchor.t, target};
        path.tolerance = tolerance;
        IntegrationResult r = integrate_path(anchor, path, prec, false);
        if (r.diverged) continue;
        samples.push_back(r.end);
        ++placed;
    }
    if (placed < count)
        throw std::runtime_error("sample_annulus: could not reach enough annulus points");
    return samples;
}

namespace {

struct FitProblem {
    const CompiledSeries* series;
    BranchSpec base_spec;
    const std::vector<const State*>* pts;
    int n_trunc;
    std::array<double, 3> weights;

    // params: (Re dt0, Im dt0, Re C, Im C, Re D, Im D)
    std::vector<double> residual(const std::array<double, 6>& p) const {
        BranchSpec spec = base_spec;
        spec.t0 = base_spec.t0 + Cplx(p[0], p[1]);
        spec.c = Cplx(p[2], p[3]);
        spec.d = Cplx(p[4], p[5]);
        std::vector<double> r;
        r.reserve(pts->size() * 6);
        for (const State* s : *pts) {
            EvalTriple v = series->eval_t(spec, s->t, n_trunc);
            Cplx ex = (v.x - s->x) * weights[0];
            Cplx ey = (v.y - s->y) * weights[1];
            Cplx ez = (v.z - s->z) * weights[2];
            r.push_back(ex.real());
            r.push_back(ex.imag());
            r.push_back(ey.real());
            r.push_back(ey.imag());
            r.push_back(ez.real());
            r.push_back(ez.imag());
        }
        return r;
    }
};

double rms(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s / std::max<size_t>(1, v.size()));
}

// plain Levenberg-Marquardt with a forward-difference Jacobian
bool levmar(const FitProblem& prob, std::array<double, 6>& p, double& final_rms, int max_iter) {
    std::vector<double> f = prob.residual(p);
    double cost = rms(f);
    double lambda = 1e-3;
    const int np = 6;
    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<std::vector<double>> jac(f.size(), std::vector<double>(np));
        for (int c = 0; c < np; ++c) {
            double eps = 1e-7 * std::max(1.0, std::fabs(p[static_cast<size_t>(c)]));
            std::array<double, 6> pp = p;
            pp[static_cast<size_t>(c)] += eps;
            std::vector<double> fp = prob.residual(pp);
            for (size_t r = 0; r < f.size(); ++r) jac[r][static_cast<size_t>(c)] = (fp[r] - f[r]) / eps;
        }
        double jtj[6][6] = {}, jtf[6] = {};
        for (size_t r = 0; r < f.size(); ++r)
            for (int i = 0; i < np; ++i) {
                jtf[i] += jac[r][static_cast<size_t>(i)] * f[r];
                for (int j = i; j < np; ++j) jtj[i][j] += jac[r][static_cast<size_t>(i)] * jac[r][static_cast<size_t>(j)];
            }
        for (int i = 0; i < np; ++i)
            for (int j = 0; j < i; ++j) jtj[i][j] = jtj[j][i];

        bool improved = false;
        for (int tries = 0; tries < 12 && !improved; ++tries) {
            double a[6][7];
            for (int i = 0; i < np; ++i) {
                for (int j = 0; j < np; ++j) a[i][j] = jtj[i][j];
                a[i][i] *= (1.0 + lambda);
                a[i][np] = jtf[i];
            }
            // solve the damped normal equations
            bool singular = false;
            for (int col = 0; col < np && !singular; ++col) {
                int piv = col;
                for (int r2 = col + 1; r2 < np; ++r2)
                    if (std::fabs(a[r2][col]) > std::fabs(a[piv][col])) piv = r2;
                for (int c2 = 0; c2 <= np; ++c2) std::swap(a[piv][c2], a[col][c2]);
                if (std::fabs(a[col][col]) < 1e-300) {
                    singular = true;
                    break;
                }
                for (int r2 = 0; r2 < np; ++r2) {
                    if (r2 == col) continue;
                    double fac = a[r2][col] / a[col][col];
                    for (int c2 = col; c2 <= np; ++c2) a[r2][c2] -= fac * a[col][c2];
                }
            }
            if (singular) {
                lambda *= 10;
                continue;
            }
            std::array<double, 6> pn = p;
            for (int i = 0; i < np; ++i) pn[static_cast<size_t>(i)] -= a[i][np] / a[i][i];
            std::vector<double> fn;
            try {
                fn = prob.residual(pn);
            } catch (const std::exception&) {
                lambda *= 10;
                continue;
            }
            double cn = rms(fn);
            if (cn < cost) {
                double step = 0;
                for (int i = 0; i < np; ++i)
                    step = std::max(step, std::fabs(pn[static_cast<size_t>(i)] - p[static_cast<size_t>(i)]));
                p = pn;
                f = std::move(fn);
                double old_cost = cost;
                cost = cn;
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
                if (step < 1e-13 || old_cost - cost < 1e-16 * (1 + cost)) {
                    final_rms = cost;
                    return true;
                }
            } else {
                lambda *= 10;
            }
        }
        if (!improved) {
            // no damping level helps: a local minimum at the truncation
            // floor, which is convergence for this model
            final_rms = cost;
            return true;
        }
    }
    final_rms = cost;
    return true;
}

}  // namespace

SingularityFit fit_psi_parameters(const CompiledSeries& plus_series,
                                  const CompiledSeries& minus_series,
                                  const std::vector<State>& samples, Cplx t0_init,
                                  const FitConfig& cfg) {
    if (samples.size() < 8)
        throw std::domain_error("fit_psi_parameters: need at least 8 samples");
    std::vector<const State*> train, hold;
    for (size_t i = 0; i < samples.size(); ++i)
        (i % 2 ? hold : train).push_back(&samples[i]);

    // balance the three components: y and z blow up faster near t0
    std::array<double, 3> w;
    std::vector<double> mx, my, mz;
    for (const State* s : train) {
        mx.push_back(std::abs(s->x));
        my.push_back(std::abs(s->y));
        mz.push_back(std::abs(s->z));
    }
    auto median = [](std::vector<double> v) {
        std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
        return v[v.size() / 2];
    };
    w = {1.0 / std::max(1e-12, median(mx)), 1.0 / std::max(1e-12, median(my)),
         1.0 / std::max(1e-12, median(mz))};

    // closed-form C initializer: z w^2 = R_{-2} + R_{-1} w + R_0(eta+C) w^2
    // + O(w^3) with R_0(u) = 1385/54 - (988/81) u, so the second-order term
    // of the nearest samples pins eta + C and hence C (R is family-even)
    std::vector<const State*> nearest = train;
    std::sort(nearest.begin(), nearest.end(), [&](const State* a, const State* bb) {
        return std::abs(a->t - t0_init) < std::abs(bb->t - t0_init);
    });
    Cplx b_cut = t0_init.imag() < 0 ? Cplx(0, -1) : Cplx(0, 1);
    Cplx c_est = 0.0;
    int c_cnt = 0;
    for (size_t i = 0; i < nearest.size() / 3 + 1 && i < nearest.size(); ++i) {
        Cplx w_off = nearest[i]->t - t0_init;
        Cplx eta = std::log(b_cut * w_off);
        Cplx g = nearest[i]->z - Cplx(-0.2) / (w_off * w_off) - Cplx(17.0 / 9.0) / w_off;
        Cplx u = (Cplx(1385.0 / 54.0) - g) * (81.0 / 988.0);
        c_est += u - eta;
        ++c_cnt;
    }
    if (c_cnt) c_est /= static_cast<double>(c_cnt);

    std::vector<Cplx> starts = {c_est, c_est + Cplx(0.7, 0), c_est - Cplx(0.7, 0),
                                c_est + Cplx(0, 0.7), c_est - Cplx(0, 0.7)};
    starts.insert(starts.end(), cfg.c_starts.begin(), cfg.c_starts.end());

    SingularityFit best;
    best.rms_residual = 1e300;
    for (Family fam : {Family::Plus, Family::Minus}) {
        const CompiledSeries& cs = fam == Family::Plus ? plus_series : minus_series;
        for (Cplx c0 : starts) {
            FitProblem prob;
            prob.series = &cs;
            prob.base_spec = default_branch(t0_init, fam);
            prob.pts = &train;
            prob.n_trunc = cfg.n_trunc;
            prob.weights = w;
            std::array<double, 6> p = {0, 0, c0.real(), c0.imag(), 0, 0};
            double train_rms = 1e300;
            bool ok;
            try {
                ok = levmar(prob, p, train_rms, cfg.max_iter);
            } catch (const std::exception&) {
                continue;
            }
            if (!ok || train_rms >= best.rms_residual) continue;
            best.rms_residual = train_rms;
            best.family = fam;
            best.t0 = t0_init + Cplx(p[0], p[1]);
            best.c = Cplx(p[2], p[3]);
            best.d = Cplx(p[4], p[5]);
            best.n_trunc = cfg.n_trunc;
            best.converged = true;
            FitProblem hp = prob;
            hp.pts = &hold;
            std::array<double, 6> ph = p;
            best.holdout_residual = rms(hp.residual(ph));
        }
    }
    if (!best.converged)
        throw std::runtime_error("fit_psi_parameters: no start converged");
    double din = 1e300, dout = 0.0;
    for (const auto& s : samples) {
        double dd = std::abs(s.t - best.t0);
        din = std::min(din, dd);
        dout = std::max(dout, dd);
    }
    best.annulus_inner = din;
    best.annulus_outer = dout;
    return best;
}

LocateResult locate_singularities(const PeriodicOrbit& orbit, const LocateConfig& cfg) {
    LocateResult out;
    out.orbit = orbit;
    const int k = static_cast<int>(orbit.symbols.size());
    const int grid = std::max(6, cfg.scan_per_symbol * k);
    const double dt = orbit.period / grid;

    // states along the period, one flow pass
    std::vector<State> states;
    State s = orbit_start_state(orbit);
    for (int j = 0; j < grid; ++j) {
        states.push_back(s);
        IntegrationResult r = flow_real(s, dt, 25, 1e-13, false);
        s = r.end;
        s.t = (j + 1) * dt;
    }

    struct Candidate {
        SingularityEstimate est;
        double score;
    };
    std::vector<Candidate> cands;
    for (const auto& st : states) {
        try {
            SingularityEstimate est = nearest_singularity_estimate(st, cfg.asymptotic);
            cands.push_back({est, est.rho});
        } catch (const std::exception&) {
            // expansion point without a clean dominant pair; skip
        }
    }
    if (cands.empty())
        throw std::runtime_error("locate_singularities: no expansion point produced an estimate");

    // cluster by folded position, refine the best representative of each
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
    std::vector<RefineResult> refined;
    for (const auto& c : cands) {
        if (c.score > 2.5 * cands.front().score) break;  // clearly dominated points
        bool dup = false;
        for (const auto& r : refined) {
            double dre = std::remainder(c.est.t0.real() - r.estimate.t0.real(), orbit.period);
            double dim = c.est.t0.imag() - r.estimate.t0.imag();
            if (std::hypot(dre, dim) < 0.25 * c.est.rho) dup = true;
        }
        if (dup) continue;
        State anchor{Cplx(c.est.t_star, 0.0), 0, 0, 0};
        // recover the anchor state at t_star
        int idx = static_cast<int>(std::lround(c.est.t_star / dt));
        idx = std::clamp(idx, 0, grid - 1);
        anchor = states[static_cast<size_t>(idx)];
        try {
            RefineResult rr = refine_singularity(c.est, anchor, cfg.refine);
            bool dup2 = false;
            for (const auto& r : refined) {
                double dre =
                    std::remainder(rr.estimate.t0.real() - r.estimate.t0.real(), orbit.period);
                double dim = rr.estimate.t0.imag() - r.estimate.t0.imag();
                if (std::hypot(dre, dim) < 0.1 * rr.estimate.rho) dup2 = true;
            }
            if (!dup2) refined.push_back(std::move(rr));
        } catch (const std::exception&) {
            // refinement failures on secondary candidates are tolerated
        }
    }
    if (refined.empty())
        throw std::runtime_error("locate_singularities: refinement failed everywhere");
    out.singularities = std::move(refined);
    out.min_abs_im = 1e300;
    for (const auto& r : out.singularities)
        out.min_abs_im = std::min(out.min_abs_im, std::fabs(r.estimate.t0.imag()));
    return out;
}

}  // namespace lorenzpsi
