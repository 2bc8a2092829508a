#include "lorenzpsi/eval.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lorenzpsi {

BranchSpec default_branch(Cplx t0, Family family) {
    BranchSpec spec;
    spec.t0 = t0;
    spec.b = t0.imag() < 0 ? Cplx(0, -1) : Cplx(0, 1);
    spec.family = family;
    return spec;
}

namespace {

void validate_spec(const BranchSpec& spec) {
    if (std::fabs(std::abs(spec.b) - 1.0) > 1e-12)
        throw std::domain_error("BranchSpec: |b| must be 1");
}

}  // namespace

EvalPoint make_eval_point(const BranchSpec& spec, Cplx t) {
    validate_spec(spec);
    EvalPoint p;
    p.t = t;
    Cplx w = t - spec.t0;
    if (w == Cplx(0.0)) {
        p.in_domain = false;
        p.eta = Cplx(-std::numeric_limits<double>::infinity(), 0.0);
        return p;
    }
    Cplx a = spec.b * w;
    p.eta = std::log(a);
    p.in_domain = std::fabs(std::arg(a)) < std::numbers::pi - spec.cut_sleeve;
    return p;
}

CompiledSeries::CompiledSeries(const PsiSeries& series)
    : family_(series.family()), max_m_(series.max_m()) {
    for (const auto& t : series.coeffs()) {
        std::array<Comp, 3> comp;
        const PsiPoly* polys[3] = {&t.P, &t.Q, &t.R};
        for (int i = 0; i < 3; ++i) {
            for (const auto& [k, c] : polys[i]->terms()) {
                comp[static_cast<size_t>(i)].val.push_back({k.first, k.second, c.to_complex()});
                max_u_ = std::max(max_u_, k.first);
                max_d_ = std::max(max_d_, k.second);
            }
            PsiPoly d = polys[i]->diff_u();
            for (const auto& [k, c] : d.terms())
                comp[static_cast<size_t>(i)].diff.push_back({k.first, k.second, c.to_complex()});
        }
        entries_.push_back(std::move(comp));
    }
}

EvalTriple CompiledSeries::eval_core(Cplx u, Cplx w, Cplx d, int n_trunc,
                                     bool derivative) const {
    if (n_trunc > max_m_)
        throw std::domain_error("eval: truncation order beyond generated series");
    std::vector<Cplx> u_pows(max_u_ + 1), d_pows(max_d_ + 1);
    u_pows[0] = 1.0;
    for (size_t k = 1; k < u_pows.size(); ++k) u_pows[k] = u_pows[k - 1] * u;
    d_pows[0] = 1.0;
    for (size_t k = 1; k < d_pows.size(); ++k) d_pows[k] = d_pows[k - 1] * d;
    auto eval_terms = [&](const std::vector<Term>& terms) {
        Cplx s = 0.0;
        for (const auto& t : terms) s += t.coeff * u_pows[t.u_pow] * d_pows[t.d_pow];
        return s;
    };

    Cplx w_inv = 1.0 / w;
    EvalTriple out{0.0, 0.0, 0.0};
    // storage triple idx holds Q_idx, R_idx (power idx) and P_{idx+1}
    // (power idx+1); the derivative shifts every power down by one
    Cplx pw = w_inv * w_inv;  // w^idx at idx = -2
    if (derivative) pw *= w_inv;
    for (int idx = -2; idx <= n_trunc; ++idx) {
        const auto& e = entries_[static_cast<size_t>(idx + 2)];
        if (!derivative) {
            out.y += eval_terms(e[1].val) * pw;
            out.z += eval_terms(e[2].val) * pw;
            if (idx + 1 <= n_trunc) out.x += eval_terms(e[0].val) * (pw * w);
        } else {
            double mq = idx;
            out.y += (eval_terms(e[1].diff) + mq * eval_terms(e[1].val)) * pw;
            out.z += (eval_terms(e[2].diff) + mq * eval_terms(e[2].val)) * pw;
            if (idx + 1 <= n_trunc)
                out.x += (eval_terms(e[0].diff) + (mq + 1.0) * eval_terms(e[0].val)) * (pw * w);
        }
        pw *= w;
    }
    return out;
}

EvalTriple CompiledSeries::eval_t(const BranchSpec& spec, Cplx t, int n_trunc) const {
    EvalPoint p = make_eval_point(spec, t);
    if (!p.in_domain)
        throw std::domain_error("eval_t: point is at t0 or inside the branch-cut sleeve");
    return eval_core(p.eta + spec.c, t - spec.t0, spec.d, n_trunc, false);
}

EvalTriple CompiledSeries::eval_eta(const BranchSpec& spec, Cplx eta, int n_trunc) const {
    validate_spec(spec);
    Cplx w = std::conj(spec.b) * std::exp(eta);
    return eval_core(eta + spec.c, w, spec.d, n_trunc, false);
}

CompiledSeries::Residual CompiledSeries::ode_residual(const BranchSpec& spec, Cplx t,
                                                      int n_trunc) const {
    EvalPoint p = make_eval_point(spec, t);
    if (!p.in_domain)
        throw std::domain_error("ode_residual: point is at t0 or inside the branch-cut sleeve");
    Cplx u = p.eta + spec.c;
    Cplx w = t - spec.t0;
    EvalTriple v = eval_core(u, w, spec.d, n_trunc, false);
    EvalTriple dv = eval_core(u, w, spec.d, n_trunc, true);
    Residual r;
    r.r1 = dv.x - 10.0 * (v.y - v.x);
    r.r2 = dv.y - (28.0 * v.x - v.y - v.x * v.z);
    r.r3 = dv.z - (-8.0 / 3.0 * v.z + v.x * v.y);
    r.norm_raw = std::max({std::abs(r.r1), std::abs(r.r2), std::abs(r.r3)});
    double s1 = 1.0 + std::abs(dv.x) + 10.0 * std::abs(v.y) + 10.0 * std::abs(v.x);
    double s2 = 1.0 + std::abs(dv.y) + 28.0 * std::abs(v.x) + std::abs(v.y) +
                std::abs(v.x * v.z);
    double s3 = 1.0 + std::abs(dv.z) + 8.0 / 3.0 * std::abs(v.z) + std::abs(v.x * v.y);
    r.norm = std::max({std::abs(r.r1) / s1, std::abs(r.r2) / s2, std::abs(r.r3) / s3});
    return r;
}

namespace {

double tail_q(const ConvergenceEstimate& est, const BranchSpec& spec, Cplx t, double& g_out) {
    Cplx w = t - spec.t0;
    double rho = std::abs(w);
    if (!(rho < est.r))
        throw std::domain_error("tail_bound: |t - t0| must be below the certified radius");
    // envelope of |log b(t-t0) + C| over the disc: |log rho| + pi + |C|
    double g = std::max(1.0, std::fabs(std::log(rho)) + std::numbers::pi + std::abs(spec.c));
    g_out = g;
    return est.k2 * rho * std::sqrt(g);
}

}  // namespace

double tail_bound(const ConvergenceEstimate& est, const BranchSpec& spec, Cplx t,
                  int n_trunc) {
    double g;
    double q = tail_q(est, spec, t, g);
    if (q >= 1.0) throw std::domain_error("tail_bound: majorant ratio >= 1");
    return est.k1 * g * std::pow(q, n_trunc + 1) / (1.0 - q);
}

double tail_bound_derivative(const ConvergenceEstimate& est, const BranchSpec& spec, Cplx t,
                             int n_trunc) {
    double g;
    double q = tail_q(est, spec, t, g);
    if (q >= 1.0) throw std::domain_error("tail_bound: majorant ratio >= 1");
    double rho = std::abs(t - spec.t0);
    // each dropped derivative term is at most 2m K1 K2^m G^{(m+2)/2} rho^{m-1},
    // and sum_{m>N} m q^m = q^{N+1} ((N+1) - N q) / (1-q)^2
    double n = n_trunc;
    double series = std::pow(q, n + 1.0) * ((n + 1.0) - n * q) / ((1.0 - q) * (1.0 - q));
    return 2.0 / rho * est.k1 * g * series;
}

double empirical_growth_rate(const NormSequence& norms) {
    int top = norms.max_m();
    if (top < 12) throw std::domain_error("empirical_growth_rate: sequence too short");
    int lo = top - top / 3;
    double acc = 0.0;
    int cnt = 0;
    for (int m = lo + 1; m <= top; ++m) {
        acc += std::log(norms.x[static_cast<size_t>(m)] / norms.x[static_cast<size_t>(m - 1)]);
        ++cnt;
    }
    return std::exp(acc / cnt);
}

}  // namespace lorenzpsi
