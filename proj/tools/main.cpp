// lorenz-psi: command-line driver for the singular-series toolkit.
//
// Subcommands: gen-coeffs, verify-table1, bounds, radius, eval, residual,
// integrate, find-orbit, locate, fit. Exit codes: 0 success, 1 usage,
// 2 computation failure, 3 verification mismatch.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>

#include "lorenzpsi/jobio.hpp"

using namespace lorenzpsi;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string output_dir = "out";
    long seed = 0;
    int jobs = 1;
    std::string job_file;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--output-dir", c.output_dir, "output directory");
    cmd->add_option("--seed", c.seed, "seed for randomized sweeps");
    cmd->add_option("--jobs", c.jobs, "worker cap (recorded; computation is deterministic)");
    cmd->add_option("--job", c.job_file, "TOML job file; flags override file values");
}

Family parse_family(const std::string& s) {
    if (s == "plus") return Family::Plus;
    if (s == "minus") return Family::Minus;
    throw CLI::ValidationError("--family", "must be plus or minus");
}

// "symbolic" or "numeric:<re>[,<im>]" with exact decimal/rational parts
std::optional<GaussianRational> parse_d_mode(const std::string& s) {
    if (s == "symbolic") return std::nullopt;
    if (s.rfind("numeric:", 0) != 0)
        throw CLI::ValidationError("--d", "must be symbolic or numeric:<re>[,<im>]");
    std::string rest = s.substr(8);
    auto comma = rest.find(',');
    std::string re = rest.substr(0, comma);
    std::string im = comma == std::string::npos ? "0" : rest.substr(comma + 1);
    return GaussianRational(Rational::from_string(re), Rational::from_string(im));
}

Cplx parse_complex(const std::string& s) {
    auto comma = s.find(',');
    double re = std::stod(s.substr(0, comma));
    double im = comma == std::string::npos ? 0.0 : std::stod(s.substr(comma + 1));
    return {re, im};
}

json common_params(const CommonOpts& c, json extra) {
    extra["output_dir"] = c.output_dir;
    extra["seed"] = c.seed;
    extra["jobs"] = c.jobs;
    if (!c.job_file.empty()) extra["job_file"] = c.job_file;
    return extra;
}

int run_gen_coeffs(const CommonOpts& c, int max_m, const std::string& family,
                   const std::string& d_mode, const std::string& format) {
    Manifest manifest("gen-coeffs",
                      common_params(c, {{"max_m", max_m},
                                        {"family", family},
                                        {"d", d_mode},
                                        {"format", format}}),
                      c.seed);
    PsiSeries s = PsiSeries::generate(max_m, parse_family(family), parse_d_mode(d_mode));
    fs::create_directories(c.output_dir);
    if (format == "json") {
        write_text_file(fs::path(c.output_dir) / "coefficients.json",
                        series_to_json(s).dump(2) + "\n");
    } else if (format == "latex") {
        write_text_file(fs::path(c.output_dir) / "coefficients.tex", series_to_latex(s));
    } else if (format == "csv") {
        write_text_file(fs::path(c.output_dir) / "coefficients.csv", series_to_csv(s));
    } else {
        throw CLI::ValidationError("--format", "must be json, latex or csv");
    }
    manifest.finish_and_write(c.output_dir);
    return 0;
}

int run_verify_table1(const CommonOpts& c, const std::string& family) {
    Manifest manifest("verify-table1", common_params(c, {{"family", family}}), c.seed);
    bool all_ok = true;
    json report;
    std::vector<Family> fams;
    if (family == "both")
        fams = {Family::Plus, Family::Minus};
    else
        fams = {parse_family(family)};
    for (Family fam : fams) {
        PsiSeries s = PsiSeries::generate(3, fam);
        Table1Report rep = verify_table1(s);
        json jf;
        jf["family"] = family_name(fam);
        jf["cells_checked"] = rep.cells_checked;
        jf["ok"] = rep.ok;
        jf["mismatches"] = json::array();
        for (const auto& mm : rep.mismatches) {
            jf["mismatches"].push_back({{"component", std::string(1, mm.component)},
                                        {"index", mm.index},
                                        {"expected", mm.expected},
                                        {"got", mm.got}});
            std::fprintf(stderr, "MISMATCH %c_%d\n  expected %s\n  got      %s\n",
                         mm.component, mm.index, mm.expected.c_str(), mm.got.c_str());
        }
        all_ok = all_ok && rep.ok;
        report["families"].push_back(jf);
        std::printf("family %s: %d cells, %s\n", family_name(fam), rep.cells_checked,
                    rep.ok ? "all exact" : "MISMATCH");
    }
    report["ok"] = all_ok;
    fs::create_directories(c.output_dir);
    write_text_file(fs::path(c.output_dir) / "table1_report.json", report.dump(2) + "\n");
    manifest.finish_and_write(c.output_dir);
    return all_ok ? 0 : 3;
}

int run_bounds(const CommonOpts& c, int max_m, int majorant_m, const std::string& d_mode,
               const std::string& family) {
    Manifest manifest("bounds",
                      common_params(c, {{"max_m", max_m},
                                        {"majorant_m", majorant_m},
                                        {"d", d_mode},
                                        {"family", family}}),
                      c.seed);
    auto d = parse_d_mode(d_mode);
    if (!d) throw CLI::ValidationError("--d", "bounds needs a numeric D");
    Family fam = parse_family(family);
    NormSequence n = norm_sequence_shadow(std::max(max_m, 8), fam, *d);
    std::vector<double> seed(n.x.begin(), n.x.begin() + 8);
    MajorantSequence maj = majorant_sequence(seed, majorant_m);
    bool lemmas_ok = true;
    for (int m = 3; m <= n.max_m(); ++m) lemmas_ok = lemmas_ok && check_F_bound(n, m).holds;
    for (int m = 8; m <= n.max_m(); ++m) lemmas_ok = lemmas_ok && check_X_bound(n, m).holds;
    bool dominated = majorant_dominates(n, maj);
    K2Estimate rt = k2_root_test(maj);
    double disc = k2_discriminant(seed);
    double agree = std::fabs(rt.k2 - disc) / disc;

    fs::create_directories(c.output_dir);
    write_text_file(fs::path(c.output_dir) / "bounds_sweep.csv", bounds_sweep_csv(n, maj));
    ConvergenceEstimate est;
    est.k2 = rt.k2;
    est.k1 = k1_from_majorant(maj, rt.k2);
    est.method = "root_test";
    est.d_used = *d;
    est.r = radius_estimate(est.k2, {0, 0});
    json j = convergence_estimate_to_json(est);
    j["k2_discriminant"] = disc;
    j["k2_two_method_rel_diff"] = agree;
    j["lemma_sweeps_hold"] = lemmas_ok;
    j["majorant_dominates"] = dominated;
    j["norm_v_product"] = eigenvector_norm_product().str();
    write_text_file(fs::path(c.output_dir) / "convergence_estimate.json", j.dump(2) + "\n");
    manifest.finish_and_write(c.output_dir);
    std::printf("K2 root-test %.10g, discriminant %.10g (rel diff %.2e)\n", rt.k2, disc, agree);
    std::printf("lemma sweeps %s, majorant dominance %s\n", lemmas_ok ? "hold" : "FAIL",
                dominated ? "holds" : "FAIL");
    return (lemmas_ok && dominated) ? 0 : 3;
}

int run_radius(const CommonOpts& c, const std::string& c_str, const std::string& d_mode,
               int branch_min, int branch_max) {
    Manifest manifest("radius",
                      common_params(c, {{"c", c_str},
                                        {"d", d_mode},
                                        {"branch_min", branch_min},
                                        {"branch_max", branch_max}}),
                      c.seed);
    auto d = parse_d_mode(d_mode);
    if (!d) throw CLI::ValidationError("--d", "radius needs a numeric D");
    Cplx cc = parse_complex(c_str);
    ConvergenceEstimate est = estimate_convergence(20, 1200, Family::Plus, *d, cc);
    auto rects = eta_domain(est.k2, cc, branch_min, branch_max);
    fs::create_directories(c.output_dir);
    write_text_file(fs::path(c.output_dir) / "convergence_estimate.json",
                    convergence_estimate_to_json(est).dump(2) + "\n");
    write_text_file(fs::path(c.output_dir) / "eta_domain.csv", eta_domain_csv(rects));
    manifest.finish_and_write(c.output_dir);
    std::printf("K2 %.10g  r(C=%s) %.6e\n", est.k2, c_str.c_str(), est.r);
    return 0;
}

struct SeriesJobOpts {
    int max_m = 40;
    std::string family = "plus";
    std::string t0 = "0,-0.2";
    std::string b;
    std::string c_str = "0,0";
    std::string d_str = "0,0";
    int n_trunc = 30;
};

BranchSpec spec_from_opts(const SeriesJobOpts& o) {
    BranchSpec spec = default_branch(parse_complex(o.t0), parse_family(o.family));
    if (!o.b.empty()) spec.b = parse_complex(o.b);
    spec.c = parse_complex(o.c_str);
    spec.d = parse_complex(o.d_str);
    return spec;
}

int run_eval_or_residual(const CommonOpts& c, SeriesJobOpts o, bool residual_mode,
                         std::string grid_spec) {
    if (!c.job_file.empty()) {
        TomlTable t = parse_toml_file(c.job_file);
        auto pick_str = [&](const char* key, std::string& dst) {
            auto it = t.find(key);
            if (it != t.end()) dst = it->second.as_string();
        };
        auto pick_int = [&](const char* key, int& dst) {
            auto it = t.find(key);
            if (it != t.end()) dst = static_cast<int>(it->second.as_int());
        };
        pick_str("eval.t0", o.t0);
        pick_str("eval.b", o.b);
        pick_str("eval.c", o.c_str);
        pick_str("eval.d", o.d_str);
        pick_str("eval.family", o.family);
        pick_str("eval.grid", grid_spec);
        pick_int("eval.n", o.n_trunc);
        pick_int("eval.max_m", o.max_m);
    }
    Manifest manifest(residual_mode ? "residual" : "eval",
                      common_params(c, {{"max_m", o.max_m},
                                        {"family", o.family},
                                        {"t0", o.t0},
                                        {"c", o.c_str},
                                        {"d", o.d_str},
                                        {"n", o.n_trunc},
                                        {"grid", grid_spec}}),
                      c.seed);
    PsiSeries series = PsiSeries::generate(o.max_m, parse_family(o.family));
    CompiledSeries cs(series);
    BranchSpec spec = spec_from_opts(o);
    ConvergenceEstimate est =
        estimate_convergence(20, 1200, spec.family,
                             GaussianRational(Rational::from_double(spec.d.real()),
                                              Rational::from_double(spec.d.imag())),
                             spec.c);

    double re0 = -0.01, re1 = 0.01, im0 = -0.01, im1 = 0.01;
    int nre = 8, nim = 8;
    if (!grid_spec.empty())
        std::sscanf(grid_spec.c_str(), "%lf,%lf,%d,%lf,%lf,%d", &re0, &re1, &nre, &im0, &im1,
                    &nim);
    std::vector<std::array<double, 12>> rows;
    for (int i = 0; i < nre; ++i) {
        for (int j = 0; j < nim; ++j) {
            Cplx dt(re0 + (re1 - re0) * i / std::max(1, nre - 1),
                    im0 + (im1 - im0) * j / std::max(1, nim - 1));
            Cplx t = spec.t0 + dt;
            std::array<double, 12> row{};
            row[0] = t.real();
            row[1] = t.imag();
            EvalPoint p = make_eval_point(spec, t);
            row[11] = p.in_domain ? 1.0 : 0.0;
            if (p.in_domain) {
                EvalTriple v = cs.eval_t(spec, t, o.n_trunc);
                row[2] = v.x.real();
                row[3] = v.x.imag();
                row[4] = v.y.real();
                row[5] = v.y.imag();
                row[6] = v.z.real();
                row[7] = v.z.imag();
                if (residual_mode) {
                    auto res = cs.ode_residual(spec, t, o.n_trunc);
                    row[8] = res.norm;
                    row[9] = res.norm_raw;
                }
                row[10] = std::abs(dt) < est.r ? tail_bound(est, spec, t, o.n_trunc)
                                               : std::numeric_limits<double>::quiet_NaN();
            }
            rows.push_back(row);
        }
    }
    fs::create_directories(c.output_dir);
    write_text_file(
        fs::path(c.output_dir) / (residual_mode ? "residual_grid.csv" : "eval_grid.csv"),
        eval_grid_csv(rows));
    manifest.finish_and_write(c.output_dir);
    return 0;
}

int run_integrate(const CommonOpts& c, std::vector<double> waypoints_flat, double x0,
                  double y0, double z0, double tol, int order, int bits) {
    if (!c.job_file.empty()) {
        TomlTable t = parse_toml_file(c.job_file);
        auto it = t.find("path.waypoints");
        if (it == t.end()) it = t.find("waypoints");
        if (it != t.end() && waypoints_flat.empty()) {
            for (const auto& point : it->second.as_array()) {
                const auto& pair = point.as_array();
                waypoints_flat.push_back(pair.at(0).as_double());
                waypoints_flat.push_back(pair.at(1).as_double());
            }
        }
        auto pick = [&](const char* key, auto& dst) {
            auto f = t.find(key);
            if (f == t.end()) return;
            using T = std::decay_t<decltype(dst)>;
            if constexpr (std::is_same_v<T, double>)
                dst = f->second.as_double();
            else
                dst = static_cast<T>(f->second.as_int());
        };
        pick("path.tolerance", tol);
        pick("path.order", order);
        pick("path.precision_bits", bits);
        pick("state.x", x0);
        pick("state.y", y0);
        pick("state.z", z0);
    }
    if (waypoints_flat.size() < 4 || waypoints_flat.size() % 2 != 0)
        throw CLI::ValidationError("--waypoints", "need at least two re,im pairs");
    Manifest manifest("integrate",
                      common_params(c, {{"waypoints", waypoints_flat},
                                        {"tol", tol},
                                        {"order", order},
                                        {"precision_bits", bits}}),
                      c.seed);
    PathSpec path;
    for (size_t i = 0; i + 1 < waypoints_flat.size(); i += 2)
        path.waypoints.push_back({waypoints_flat[i], waypoints_flat[i + 1]});
    path.tolerance = tol;
    PrecisionConfig prec;
    prec.taylor_order = order;
    prec.mantissa_bits = bits;
    State s{path.waypoints[0], x0, y0, z0};
    IntegrationResult r = integrate_path(s, path, prec, true);
    fs::create_directories(c.output_dir);
    write_text_file(fs::path(c.output_dir) / "trace.csv", trace_csv(r.trace));
    json j;
    j["diverged"] = r.diverged;
    j["steps"] = r.steps;
    j["end"] = {{"t", {r.end.t.real(), r.end.t.imag()}},
                {"x", {r.end.x.real(), r.end.x.imag()}},
                {"y", {r.end.y.real(), r.end.y.imag()}},
                {"z", {r.end.z.real(), r.end.z.imag()}}};
    write_text_file(fs::path(c.output_dir) / "integrate_result.json", j.dump(2) + "\n");
    manifest.finish_and_write(c.output_dir);
    std::printf("%s after %zu steps\n", r.diverged ? "diverged" : "completed", r.steps);
    return 0;
}

int run_find_orbit(const CommonOpts& c, const std::string& symbols) {
    Manifest manifest("find-orbit", common_params(c, {{"symbols", symbols}}), c.seed);
    PeriodicOrbit orbit = find_periodic_orbit(SymbolSequence(symbols));
    fs::create_directories(c.output_dir);
    write_text_file(fs::path(c.output_dir) / ("orbit_" + symbols + ".json"),
                    orbit_to_json(orbit).dump(2) + "\n");
    manifest.finish_and_write(c.output_dir);
    std::printf("orbit %s: period %.10f, closure %.3e\n", symbols.c_str(), orbit.period,
                orbit.closure_residual);
    return 0;
}

int run_locate(const CommonOpts& c, const std::string& symbols, int order, bool with_fit,
               int fit_n) {
    Manifest manifest(with_fit ? "fit" : "locate",
                      common_params(c, {{"symbols", symbols},
                                        {"order", order},
                                        {"fit_n", fit_n}}),
                      c.seed);
    PeriodicOrbit orbit = find_periodic_orbit(SymbolSequence(symbols));
    LocateConfig lc;
    lc.asymptotic.jet_order = std::max(order, 60);
    LocateResult loc = locate_singularities(orbit, lc);

    const RefineResult* closest = nullptr;
    for (const auto& r : loc.singularities)
        if (!closest ||
            std::fabs(r.estimate.t0.imag()) < std::fabs(closest->estimate.t0.imag()))
            closest = &r;
    DivergenceCheck chk = check_divergence_bound(closest->approach_trace, closest->estimate.t0);

    std::optional<SingularityFit> fit;
    if (with_fit) {
        PsiSeries plus = PsiSeries::generate(std::max(fit_n, 20), Family::Plus);
        PsiSeries minus = PsiSeries::generate(std::max(fit_n, 20), Family::Minus);
        CompiledSeries cp(plus), cm(minus);
        IntegrationResult to_anchor =
            flow_real(orbit_start_state(orbit), closest->estimate.t_star, 25, 1e-13, false);
        State anchor = to_anchor.end;
        anchor.t = Cplx(closest->estimate.t_star, 0.0);
        double r_fit = 0.35 * std::fabs(closest->estimate.t0.imag());
        auto samples = sample_annulus(
            anchor, closest->estimate.t0,
            closest->estimate.t0.imag() < 0 ? Cplx(0, -1) : Cplx(0, 1), 0.5 * r_fit, r_fit, 40);
        FitConfig fc;
        fc.n_trunc = fit_n;
        fit = fit_psi_parameters(cp, cm, samples, closest->estimate.t0, fc);
    }

    fs::create_directories(c.output_dir);
    write_text_file(fs::path(c.output_dir) / ("orbit_" + symbols + ".json"),
                    orbit_to_json(orbit).dump(2) + "\n");
    json j = singularity_report_to_json(symbols, *closest, fit ? &*fit : nullptr);
    j["divergence_bound"] = {{"holds", chk.holds},
                             {"min_product", chk.min_product},
                             {"samples", chk.samples}};
    j["all_im"] = json::array();
    for (const auto& r : loc.singularities) j["all_im"].push_back(r.estimate.t0.imag());
    write_text_file(fs::path(c.output_dir) / ("sing_" + symbols + ".json"), j.dump(2) + "\n");
    manifest.finish_and_write(c.output_dir);
    std::printf("orbit %s: |Im t0| = %.10f (stage refined), divergence bound %s\n",
                symbols.c_str(), std::fabs(closest->estimate.t0.imag()),
                chk.holds ? "holds" : "FAIL");
    if (fit)
        std::printf("fit: family %s, C = %.6g%+.6gi, D = %.6g%+.6gi, rms %.3e\n",
                    family_name(fit->family), fit->c.real(), fit->c.imag(), fit->d.real(),
                    fit->d.imag(), fit->rms_residual);
    return chk.holds ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Singular-series toolkit for the Lorenz system"};
    app.require_subcommand(1);

    CommonOpts common;

    auto* gen = app.add_subcommand("gen-coeffs", "generate series coefficients");
    int gen_max_m = 3;
    std::string gen_family = "plus", gen_d = "symbolic", gen_format = "json";
    gen->add_option("--max-m", gen_max_m);
    gen->add_option("--family", gen_family);
    gen->add_option("--d", gen_d);
    gen->add_option("--format", gen_format);
    add_common(gen, common);

    auto* ver = app.add_subcommand("verify-table1", "check generated coefficients exactly");
    std::string ver_family = "both";
    ver->add_option("--family", ver_family);
    add_common(ver, common);

    auto* bounds = app.add_subcommand("bounds", "norm/majorant sweeps and K2");
    int bounds_max_m = 50, bounds_majorant = 2000;
    std::string bounds_d = "numeric:0", bounds_family = "plus";
    bounds->add_option("--max-m", bounds_max_m);
    bounds->add_option("--majorant-m", bounds_majorant);
    bounds->add_option("--d", bounds_d);
    bounds->add_option("--family", bounds_family);
    add_common(bounds, common);

    auto* radius = app.add_subcommand("radius", "radius estimate and eta-plane domain");
    std::string radius_c = "0,0", radius_d = "numeric:0";
    int branch_min = -8, branch_max = 8;
    radius->add_option("--c", radius_c);
    radius->add_option("--d", radius_d);
    radius->add_option("--branch-min", branch_min);
    radius->add_option("--branch-max", branch_max);
    add_common(radius, common);

    SeriesJobOpts ev;
    std::string grid_spec;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate truncated series on a grid");
    auto* res_cmd = app.add_subcommand("residual", "equation residuals of the truncation");
    for (CLI::App* cmd : {eval_cmd, res_cmd}) {
        cmd->add_option("--max-m", ev.max_m);
        cmd->add_option("--family", ev.family);
        cmd->add_option("--t0", ev.t0);
        cmd->add_option("--b", ev.b);
        cmd->add_option("--c", ev.c_str);
        cmd->add_option("--d", ev.d_str);
        cmd->add_option("--n", ev.n_trunc);
        cmd->add_option("--grid", grid_spec, "re0,re1,nre,im0,im1,nim relative to t0");
        add_common(cmd, common);
    }

    auto* integ = app.add_subcommand("integrate", "Taylor integration along a complex path");
    std::vector<double> waypoints_flat;
    double ix = 1.0, iy = 1.0, iz = 1.0, itol = 1e-12;
    int iorder = 25, ibits = 53;
    integ->add_option("--waypoints", waypoints_flat, "flat re,im pairs");
    integ->add_option("--x", ix);
    integ->add_option("--y", iy);
    integ->add_option("--z", iz);
    integ->add_option("--tol", itol);
    integ->add_option("--order", iorder);
    integ->add_option("--precision-bits", ibits);
    add_common(integ, common);

    std::string symbols = "AB";
    auto* forb = app.add_subcommand("find-orbit", "periodic orbit by multiple shooting");
    forb->add_option("--symbols", symbols);
    add_common(forb, common);
    int loc_order = 110, fit_n = 20;
    auto* loc = app.add_subcommand("locate", "orbit + nearest complex singularities");
    loc->add_option("--symbols", symbols);
    loc->add_option("--order", loc_order);
    add_common(loc, common);
    auto* fit = app.add_subcommand("fit", "locate + series-parameter fit");
    fit->add_option("--symbols", symbols);
    fit->add_option("--order", loc_order);
    fit->add_option("--n", fit_n);
    add_common(fit, common);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return run_gen_coeffs(common, gen_max_m, gen_family, gen_d, gen_format);
        if (ver->parsed()) return run_verify_table1(common, ver_family);
        if (bounds->parsed())
            return run_bounds(common, bounds_max_m, bounds_majorant, bounds_d, bounds_family);
        if (radius->parsed())
            return run_radius(common, radius_c, radius_d, branch_min, branch_max);
        if (eval_cmd->parsed()) return run_eval_or_residual(common, ev, false, grid_spec);
        if (res_cmd->parsed()) return run_eval_or_residual(common, ev, true, grid_spec);
        if (integ->parsed())
            return run_integrate(common, waypoints_flat, ix, iy, iz, itol, iorder, ibits);
        if (forb->parsed()) return run_find_orbit(common, symbols);
        if (loc->parsed()) return run_locate(common, symbols, loc_order, false, fit_n);
        if (fit->parsed()) return run_locate(common, symbols, loc_order, true, fit_n);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
