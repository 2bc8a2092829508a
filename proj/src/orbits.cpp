#include "lorenzpsi/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lorenzpsi {

SymbolSequence::SymbolSequence(std::string s) : symbols(std::move(s)) {
    if (symbols.size() < 2)
        throw std::domain_error("SymbolSequence: need at least two symbols");
    bool has_a = false, has_b = false;
    for (char c : symbols) {
        if (c == 'A')
            has_a = true;
        else if (c == 'B')
            has_b = true;
        else
            throw std::domain_error("SymbolSequence: symbols must be A or B");
    }
    if (!has_a || !has_b)
        throw std::domain_error("SymbolSequence: single-wing sequences do not label orbits");
}

namespace {

constexpr double kSectionZ = 27.0;

// real-time stepping with per-step jets, detecting downward z = 27
// crossings inside each step via bisection on the jet
struct CrossingDriver {
    int order;
    double tolerance;
    State s;
    double t = 0.0;

    explicit CrossingDriver(const State& start, int order_, double tol)
        : order(order_), tolerance(tol), s(start) {
        s.t = 0.0;
    }

    template <class OnCrossing>
    void run(double duration, OnCrossing&& on_crossing) {
        while (t < duration) {
            TaylorJet jet = taylor_jet(s, order);
            double trust = jet.trust_radius();
            double scale = std::max(
                1.0, std::max({std::abs(s.x), std::abs(s.y), std::abs(s.z)}));
            double tol = tolerance * scale;
            double h = 0.8 * trust;
            double m1 = jet.coeff_mag(order - 1), m2 = jet.coeff_mag(order);
            if (m1 > 0) h = std::min(h, std::pow(tol / m1, 1.0 / (order - 2)));
            if (m2 > 0) h = std::min(h, std::pow(tol / m2, 1.0 / (order - 1)));
            h = std::min({h, 0.05, duration - t});
            if (h < 1e-13) throw std::runtime_error("section_crossings: step floor reached");

            double z0 = s.z.real() - kSectionZ;
            Cplx xe, ye, ze;
            jet.eval(h, xe, ye, ze);
            double z1 = ze.real() - kSectionZ;
            // rising crossings only: they sit deep on a wing (|x| > 10), so
            // the wing symbol is unambiguous, matching the quadrant labels
            if (z0 < 0.0 && z1 >= 0.0) {
                double lo = 0.0, hi = h;
                for (int it = 0; it < 80; ++it) {
                    double mid = 0.5 * (lo + hi);
                    Cplx xm, ym, zm;
                    jet.eval(mid, xm, ym, zm);
                    if (zm.real() - kSectionZ < 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                double tau = 0.5 * (lo + hi);
                Cplx xc, yc, zc, dxc, dyc, dzc;
                jet.eval(tau, xc, yc, zc);
                jet.eval_derivative(tau, dxc, dyc, dzc);
                if (dzc.real() > 0.0) on_crossing(t + tau, xc.real(), yc.real());
            }
            s.x = xe;
            s.y = ye;
            s.z = ze;
            t += h;
            s.t = t;
        }
    }
};

char wing_symbol(double x) { return x < 0.0 ? 'A' : 'B'; }

}  // namespace

std::vector<SectionCrossing> section_crossings(const State& start, double duration, int order,
                                               double tolerance) {
    std::vector<SectionCrossing> out;
    CrossingDriver drv(start, order, tolerance);
    drv.run(duration, [&](double tc, double xc, double yc) {
        out.push_back({tc, xc, yc, wing_symbol(xc)});
    });
    return out;
}

IntegrationResult flow_real(const State& s, double duration, int order, double tolerance,
                            bool keep_trace) {
    if (duration <= 1e-13) {
        IntegrationResult r;
        r.end = s;
        return r;
    }
    PathSpec path;
    path.waypoints = {s.t, s.t + duration};
    path.tolerance = tolerance;
    path.max_step = 0.05;
    PrecisionConfig cfg;
    cfg.taylor_order = order;
    return integrate_path(s, path, cfg, keep_trace);
}

State orbit_start_state(const PeriodicOrbit& orbit) {
    return State{0.0, orbit.initial_state[0], orbit.initial_state[1], orbit.initial_state[2]};
}

namespace {

struct ShootingProblem {
    int k;  // number of segments
    int order;
    double tolerance;

    // u = (x_0, y_0, tau_0, ..., x_{k-1}, y_{k-1}, tau_{k-1})
    std::vector<double> residual(const std::vector<double>& u) const {
        std::vector<double> f(static_cast<size_t>(3 * k));
        for (int i = 0; i < k; ++i) {
            State si{0.0, u[static_cast<size_t>(3 * i)], u[static_cast<size_t>(3 * i + 1)],
                     kSectionZ};
            double tau = u[static_cast<size_t>(3 * i + 2)];
            IntegrationResult r = flow_real(si, tau, order, tolerance, false);
            if (r.diverged) throw std::runtime_error("shooting: segment flow diverged");
            int j = (i + 1) % k;
            f[static_cast<size_t>(3 * i)] = r.end.x.real() - u[static_cast<size_t>(3 * j)];
            f[static_cast<size_t>(3 * i + 1)] = r.end.y.real() - u[static_cast<size_t>(3 * j + 1)];
            f[static_cast<size_t>(3 * i + 2)] = r.end.z.real() - kSectionZ;
        }
        return f;
    }
};

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

// dense Gaussian elimination with partial pivoting
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
                std::fabs(a[static_cast<size_t>(piv)][static_cast<size_t>(col)]))
                piv = r;
        std::swap(a[static_cast<size_t>(piv)], a[static_cast<size_t>(col)]);
        std::swap(b[static_cast<size_t>(piv)], b[static_cast<size_t>(col)]);
        double d = a[static_cast<size_t>(col)][static_cast<size_t>(col)];
        if (std::fabs(d) < 1e-300) throw std::runtime_error("shooting: singular Jacobian");
        for (int r = col + 1; r < n; ++r) {
            double fac = a[static_cast<size_t>(r)][static_cast<size_t>(col)] / d;
            if (fac == 0.0) continue;
            for (int c = col; c < n; ++c)
                a[static_cast<size_t>(r)][static_cast<size_t>(c)] -=
                    fac * a[static_cast<size_t>(col)][static_cast<size_t>(c)];
            b[static_cast<size_t>(r)] -= fac * b[static_cast<size_t>(col)];
        }
    }
    std::vector<double> x(static_cast<size_t>(n));
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<size_t>(r)];
        for (int c = r + 1; c < n; ++c)
            s -= a[static_cast<size_t>(r)][static_cast<size_t>(c)] * x[static_cast<size_t>(c)];
        x[static_cast<size_t>(r)] = s / a[static_cast<size_t>(r)][static_cast<size_t>(r)];
    }
    return x;
}

// harvested initial guess: section points of a chaotic run whose itinerary
// contains the doubled pattern
struct Harvest {
    std::vector<double> u;  // shooting unknowns
    bool found = false;
};

Harvest harvest_guess(const std::string& pattern, const OrbitSearchConfig& cfg) {
    Harvest h;
    const int k = static_cast<int>(pattern.size());
    State s{0.0, 1.0, 1.0, 1.0};
    IntegrationResult warm = flow_real(s, cfg.harvest_transient, cfg.order, 1e-12, false);
    std::vector<SectionCrossing> cr =
        section_crossings(warm.end, cfg.harvest_max_time, 20, 1e-12);
    std::string itinerary;
    for (const auto& c : cr) itinerary.push_back(c.symbol);

    auto try_window = [&](const std::string& window) -> bool {
        double best_gap = 1e300;
        int best_i = -1;
        for (size_t i = 0; i + window.size() <= itinerary.size(); ++i) {
            if (itinerary.compare(i, window.size(), window) != 0) continue;
            double dx = cr[i + static_cast<size_t>(k)].x - cr[i].x;
            double dy = cr[i + static_cast<size_t>(k)].y - cr[i].y;
            double gap = std::hypot(dx, dy);
            if (gap < best_gap) {
                best_gap = gap;
                best_i = static_cast<int>(i);
            }
        }
        if (best_i < 0) return false;
        for (int j = 0; j < k; ++j) {
            const auto& c = cr[static_cast<size_t>(best_i + j)];
            h.u.push_back(c.x);
            h.u.push_back(c.y);
            h.u.push_back(cr[static_cast<size_t>(best_i + j + 1)].time - c.time);
        }
        h.found = true;
        return true;
    };

    // prefer a shadowing window of two full repeats, fall back to one plus
    // a short lookahead
    if (try_window(pattern + pattern)) return h;
    if (try_window(pattern + pattern.substr(0, std::min<size_t>(2, pattern.size()))))
        return h;
    return h;
}

}  // namespace

PeriodicOrbit find_periodic_orbit(const SymbolSequence& symbols, const OrbitSearchConfig& cfg,
                                  std::optional<std::array<double, 3>> guess) {
    const std::string& pattern = symbols.symbols;
    const int k = static_cast<int>(pattern.size());
    ShootingProblem prob{k, cfg.order, cfg.tolerance};

    std::vector<double> u;
    if (guess.has_value()) {
        // single supplied point: fill the remaining points by crossing
        // detection along the flow from it
        State s{0.0, (*guess)[0], (*guess)[1], kSectionZ};
        auto cr = section_crossings(s, 10.0 * k, cfg.order, cfg.tolerance);
        if (static_cast<int>(cr.size()) < k)
            throw std::runtime_error("find_periodic_orbit: supplied guess yields too few crossings");
        u.push_back((*guess)[0]);
        u.push_back((*guess)[1]);
        u.push_back(cr[0].time);
        for (int j = 1; j < k; ++j) {
            u.push_back(cr[static_cast<size_t>(j - 1)].x);
            u.push_back(cr[static_cast<size_t>(j - 1)].y);
            u.push_back(cr[static_cast<size_t>(j)].time - cr[static_cast<size_t>(j - 1)].time);
        }
    } else {
        Harvest h = harvest_guess(pattern, cfg);
        if (!h.found)
            throw std::runtime_error(
                "find_periodic_orbit: no shadowing window for pattern " + pattern);
        u = std::move(h.u);
    }

    const int n = 3 * k;
    std::vector<double> f = prob.residual(u);
    double fn = inf_norm(f);
    int iter = 0;
    for (; iter < cfg.newton_max_iter && fn > cfg.newton_tol; ++iter) {
        // finite-difference Jacobian, column by column
        std::vector<std::vector<double>> jac(static_cast<size_t>(n),
                                             std::vector<double>(static_cast<size_t>(n)));
        for (int c = 0; c < n; ++c) {
            double eps = 1e-7 * std::max(1.0, std::fabs(u[static_cast<size_t>(c)]));
            std::vector<double> up = u, um = u;
            up[static_cast<size_t>(c)] += eps;
            um[static_cast<size_t>(c)] -= eps;
            std::vector<double> fp = prob.residual(up), fm = prob.residual(um);
            for (int r = 0; r < n; ++r)
                jac[static_cast<size_t>(r)][static_cast<size_t>(c)] =
                    (fp[static_cast<size_t>(r)] - fm[static_cast<size_t>(r)]) / (2 * eps);
        }
        std::vector<double> rhs(f.begin(), f.end());
        std::vector<double> du = solve_dense(std::move(jac), std::move(rhs));
        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half < 10; ++half) {
            std::vector<double> u_new = u;
            for (int c = 0; c < n; ++c)
                u_new[static_cast<size_t>(c)] -= lambda * du[static_cast<size_t>(c)];
            std::vector<double> f_new;
            try {
                f_new = prob.residual(u_new);
            } catch (const std::runtime_error&) {
                lambda *= 0.5;
                continue;
            }
            double fn_new = inf_norm(f_new);
            if (fn_new < fn * (1.0 - 0.25 * lambda) || fn_new < cfg.newton_tol) {
                u = std::move(u_new);
                f = std::move(f_new);
                fn = fn_new;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted)
            throw std::runtime_error("find_periodic_orbit: Newton stagnation at |F| = " +
                                     std::to_string(fn));
    }
    if (fn > cfg.newton_tol)
        throw std::runtime_error("find_periodic_orbit: no convergence, best |F| = " +
                                 std::to_string(fn));

    PeriodicOrbit orbit;
    orbit.symbols = pattern;
    for (int i = 0; i < k; ++i) {
        orbit.section_xy.push_back(
            {u[static_cast<size_t>(3 * i)], u[static_cast<size_t>(3 * i + 1)]});
        orbit.segment_times.push_back(u[static_cast<size_t>(3 * i + 2)]);
        orbit.period += u[static_cast<size_t>(3 * i + 2)];
    }
    orbit.initial_state = {u[0], u[1], kSectionZ};

    // converged symbol itinerary must match the request
    State p0 = orbit_start_state(orbit);
    if (wing_symbol(orbit.initial_state[0]) != pattern[0])
        throw std::runtime_error("find_periodic_orbit: converged orbit starts on wrong wing");
    auto cr = section_crossings(p0, orbit.period - 1e-7, cfg.order, cfg.tolerance);
    std::string observed(1, wing_symbol(orbit.initial_state[0]));
    for (const auto& c : cr)
        if (c.time > 1e-7) observed.push_back(c.symbol);
    if (observed != pattern)
        throw std::runtime_error("find_periodic_orbit: converged itinerary " + observed +
                                 " does not match " + pattern);

    IntegrationResult full = flow_real(p0, orbit.period, cfg.order, cfg.tolerance, false);
    orbit.closure_residual =
        std::max({std::abs(full.end.x - p0.x), std::abs(full.end.y - p0.y),
                  std::abs(full.end.z - p0.z)});
    if (orbit.closure_residual > cfg.closure_tol)
        throw std::runtime_error("find_periodic_orbit: closure residual " +
                                 std::to_string(orbit.closure_residual) + " above tolerance");
    return orbit;
}

}  // namespace lorenzpsi
