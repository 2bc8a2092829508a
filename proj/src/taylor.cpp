#include "lorenzpsi/taylor.hpp"

#include <cmath>
#include <stdexcept>

namespace lorenzpsi {

State lorenz_rhs(const State& s) {
    State d;
    d.t = 1.0;
    d.x = 10.0 * (s.y - s.x);
    d.y = 28.0 * s.x - s.y - s.x * s.z;
    d.z = -8.0 / 3.0 * s.z + s.x * s.y;
    return d;
}

template <class Real>
TaylorJetT<Real> TaylorJetT<Real>::build(C t, C x, C y, C z, int order) {
    if (order < 1) throw std::domain_error("taylor_jet: order must be >= 1");
    TaylorJetT jet;
    jet.t0 = t;
    jet.order = order;
    jet.coeffs.resize(static_cast<size_t>(order) + 1);
    auto& c = jet.coeffs;
    c[0] = {x, y, z};
    const Real sigma = Real(10), rr = Real(28), beta = Real(8) / Real(3);
    for (int n = 0; n < order; ++n) {
        C conv_xz = 0, conv_xy = 0;
        for (int j = 0; j <= n; ++j) {
            conv_xz += c[static_cast<size_t>(j)].x * c[static_cast<size_t>(n - j)].z;
            conv_xy += c[static_cast<size_t>(j)].x * c[static_cast<size_t>(n - j)].y;
        }
        Real inv = Real(1) / Real(n + 1);
        c[static_cast<size_t>(n) + 1].x = sigma * (c[static_cast<size_t>(n)].y - c[static_cast<size_t>(n)].x) * inv;
        c[static_cast<size_t>(n) + 1].y = (rr * c[static_cast<size_t>(n)].x - c[static_cast<size_t>(n)].y - conv_xz) * inv;
        c[static_cast<size_t>(n) + 1].z = (-beta * c[static_cast<size_t>(n)].z + conv_xy) * inv;
    }
    return jet;
}

template <class Real>
void TaylorJetT<Real>::eval(C h, C& x, C& y, C& z) const {
    x = coeffs.back().x;
    y = coeffs.back().y;
    z = coeffs.back().z;
    for (int n = order - 1; n >= 0; --n) {
        x = x * h + coeffs[static_cast<size_t>(n)].x;
        y = y * h + coeffs[static_cast<size_t>(n)].y;
        z = z * h + coeffs[static_cast<size_t>(n)].z;
    }
}

template <class Real>
void TaylorJetT<Real>::eval_derivative(C h, C& dx, C& dy, C& dz) const {
    dx = Real(order) * coeffs.back().x;
    dy = Real(order) * coeffs.back().y;
    dz = Real(order) * coeffs.back().z;
    for (int n = order - 1; n >= 1; --n) {
        dx = dx * h + Real(n) * coeffs[static_cast<size_t>(n)].x;
        dy = dy * h + Real(n) * coeffs[static_cast<size_t>(n)].y;
        dz = dz * h + Real(n) * coeffs[static_cast<size_t>(n)].z;
    }
}

template <class Real>
Real TaylorJetT<Real>::coeff_mag(int n) const {
    const auto& c = coeffs[static_cast<size_t>(n)];
    using std::abs;
    return std::max({abs(c.x), abs(c.y), abs(c.z)});
}

template <class Real>
Real TaylorJetT<Real>::trust_radius() const {
    // root test over the top half of the jet; equilibrium jets (all higher
    // coefficients zero) get an effectively unbounded radius
    Real best = std::numeric_limits<Real>::infinity();
    bool any = false;
    for (int n = std::max(2, order / 2); n <= order; ++n) {
        Real m = coeff_mag(n);
        if (m <= Real(1e-280)) continue;
        any = true;
        best = std::min(best, std::pow(m, Real(-1) / Real(n)));
    }
    if (!any) return Real(1e6);
    return best;
}

template <class Real>
Real TaylorJetT<Real>::error_estimate(Real abs_h) const {
    Real a = coeff_mag(order - 1) * std::pow(abs_h, Real(order - 1));
    Real b = coeff_mag(order) * std::pow(abs_h, Real(order));
    return a + b;
}

template struct TaylorJetT<double>;
template struct TaylorJetT<long double>;

TaylorJet taylor_jet(const State& s, int order) {
    return TaylorJet::build(s.t, s.x, s.y, s.z, order);
}

StepResult step(const TaylorJet& jet, Cplx h) {
    StepResult r;
    double ah = std::abs(h);
    if (ah > jet.trust_radius()) {
        r.rejected = true;
        return r;
    }
    jet.eval(h, r.state.x, r.state.y, r.state.z);
    r.state.t = jet.t0 + h;
    r.err_est = jet.error_estimate(ah);
    return r;
}

namespace {

template <class Real>
IntegrationResult integrate_path_impl(const State& s, const PathSpec& path,
                                      const PrecisionConfig& cfg, bool keep_trace) {
    using C = std::complex<Real>;
    using Jet = TaylorJetT<Real>;
    if (path.waypoints.size() < 2)
        throw std::domain_error("integrate_path: need at least two waypoints");
    for (size_t i = 1; i < path.waypoints.size(); ++i)
        if (path.waypoints[i] == path.waypoints[i - 1])
            throw std::domain_error("integrate_path: consecutive waypoints must differ");

    IntegrationResult res;
    C t = C(path.waypoints[0].real(), path.waypoints[0].imag());
    C x = C(Real(s.x.real()), Real(s.x.imag()));
    C y = C(Real(s.y.real()), Real(s.y.imag()));
    C z = C(Real(s.z.real()), Real(s.z.imag()));

    const Real floor_h = Real(1e-13);
    const int order = std::max(4, cfg.taylor_order);

    auto emit = [&](Real hstep, Real err) {
        if (!keep_trace) return;
        TraceSample ts;
        ts.t = Cplx(static_cast<double>(t.real()), static_cast<double>(t.imag()));
        ts.x = Cplx(static_cast<double>(x.real()), static_cast<double>(x.imag()));
        ts.y = Cplx(static_cast<double>(y.real()), static_cast<double>(y.imag()));
        ts.z = Cplx(static_cast<double>(z.real()), static_cast<double>(z.imag()));
        ts.step = static_cast<double>(hstep);
        ts.err_est = static_cast<double>(err);
        res.trace.push_back(ts);
    };
    emit(0, 0);

    for (size_t seg = 1; seg < path.waypoints.size(); ++seg) {
        C target(path.waypoints[seg].real(), path.waypoints[seg].imag());
        while (true) {
            C to_go = target - t;
            Real remaining = std::abs(to_go);
            if (remaining <= floor_h) break;
            C dir = to_go / remaining;
            Jet jet = Jet::build(t, x, y, z, order);
            Real trust = jet.trust_radius();
            Real scale = std::max(Real(1), std::max({std::abs(x), std::abs(y), std::abs(z)}));
            Real tol = Real(path.tolerance) * scale;
            // error-per-unit-step control from the last two coefficients
            Real h = Real(0.8) * trust;
            Real m1 = jet.coeff_mag(order - 1), m2 = jet.coeff_mag(order);
            if (m1 > Real(0)) h = std::min(h, std::pow(tol / m1, Real(1) / Real(order - 2)));
            if (m2 > Real(0)) h = std::min(h, std::pow(tol / m2, Real(1) / Real(order - 1)));
            h = std::min({h, Real(path.max_step), remaining});
            Real state_mag = std::max({std::abs(x), std::abs(y), std::abs(z)});
            if (!(h > floor_h) || state_mag > Real(1e10)) {
                res.diverged = true;
                res.end = {Cplx(static_cast<double>(t.real()), static_cast<double>(t.imag())),
                           Cplx(static_cast<double>(x.real()), static_cast<double>(x.imag())),
                           Cplx(static_cast<double>(y.real()), static_cast<double>(y.imag())),
                           Cplx(static_cast<double>(z.real()), static_cast<double>(z.imag()))};
                return res;
            }
            C step_c = dir * h;
            jet.eval(step_c, x, y, z);
            t += step_c;
            ++res.steps;
            emit(h, jet.error_estimate(h));
        }
    }
    res.end = {Cplx(static_cast<double>(t.real()), static_cast<double>(t.imag())),
               Cplx(static_cast<double>(x.real()), static_cast<double>(x.imag())),
               Cplx(static_cast<double>(y.real()), static_cast<double>(y.imag())),
               Cplx(static_cast<double>(z.real()), static_cast<double>(z.imag()))};
    return res;
}

}  // namespace

IntegrationResult integrate_path(const State& s, const PathSpec& path,
                                 const PrecisionConfig& cfg, bool keep_trace) {
    if (cfg.mantissa_bits == 53) return integrate_path_impl<double>(s, path, cfg, keep_trace);
    if (cfg.mantissa_bits == 64)
        return integrate_path_impl<long double>(s, path, cfg, keep_trace);
    throw std::domain_error("integrate_path: mantissa_bits must be 53 or 64");
}

double q_derivative(double x, double y, double z) {
    return 2.0 * (-10.0 * x * x - y * y - 8.0 * z * z / 3.0 + 38.0 * x * y);
}

GrowthCheck growth_check(const std::vector<TraceSample>& trace) {
    GrowthCheck g;
    for (const auto& ts : trace) {
        if (std::fabs(ts.x.imag()) > 1e-9 || std::fabs(ts.y.imag()) > 1e-9 ||
            std::fabs(ts.z.imag()) > 1e-9)
            throw std::domain_error("growth_check: trace is not real");
        double x = ts.x.real(), y = ts.y.real(), z = ts.z.real();
        double q = x * x + y * y + z * z;
        if (q == 0.0) continue;
        double ratio = std::fabs(q_derivative(x, y, z)) / (58.0 * q);
        g.max_ratio = std::max(g.max_ratio, ratio);
        if (ratio > 1.0 + 1e-12) g.holds = false;
    }
    return g;
}

}  // namespace lorenzpsi
