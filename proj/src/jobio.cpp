#include "lorenzpsi/jobio.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lorenzpsi {

const char* const kVersion = "0.1.0";

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

json psi_poly_to_json(const PsiPoly& p) {
    json arr = json::array();
    for (const auto& [k, c] : p.terms()) {
        arr.push_back({{"u", k.first},
                       {"d", k.second},
                       {"re", c.re.str()},
                       {"im", c.im.str()}});
    }
    return arr;
}

PsiPoly psi_poly_from_json(const json& j) {
    PsiPoly p;
    for (const auto& t : j) {
        p.set(t.at("u").get<uint32_t>(), t.at("d").get<uint32_t>(),
              GaussianRational(Rational::from_string(t.at("re").get<std::string>()),
                               Rational::from_string(t.at("im").get<std::string>())));
    }
    return p;
}

json series_to_json(const PsiSeries& s) {
    json arr = json::array();
    for (const auto& t : s.coeffs()) {
        arr.push_back({{"m", t.m},
                       {"P", psi_poly_to_json(t.P)},
                       {"Q", psi_poly_to_json(t.Q)},
                       {"R", psi_poly_to_json(t.R)}});
    }
    return arr;
}

namespace {

std::string poly_latex(const PsiPoly& p) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : p.terms()) {
        std::string coeff;
        bool negative = false;
        if (c.is_real()) {
            negative = c.re.sign() < 0;
            Rational r = c.re.abs();
            coeff = r.den() == 1 ? r.str() : "\\frac{" + r.num().get_str() + "}{" + r.den().get_str() + "}";
        } else if (c.is_imaginary()) {
            negative = c.im.sign() < 0;
            Rational r = c.im.abs();
            coeff = (r.den() == 1 ? r.str() : "\\frac{" + r.num().get_str() + "}{" + r.den().get_str() + "}");
            coeff += "\\,i";
        } else {
            coeff = "(" + c.str() + ")";
        }
        if (first) {
            if (negative) os << "-";
        } else {
            os << (negative ? " - " : " + ");
        }
        first = false;
        os << coeff;
        if (k.second == 1) os << "\\,D";
        if (k.second > 1) os << "\\,D^{" << k.second << "}";
        if (k.first == 1) os << "\\,(\\eta+C)";
        if (k.first > 1) os << "\\,(\\eta+C)^{" << k.first << "}";
    }
    return os.str();
}

}  // namespace

std::string series_to_latex(const PsiSeries& s) {
    std::ostringstream os;
    os << "\\begin{tabular}{c|c}\n";
    for (const auto& t : s.coeffs()) {
        os << "$P_{" << t.m + 1 << "}$ & $" << poly_latex(t.P) << "$\\\\\\hline\n";
        os << "$Q_{" << t.m << "}$ & $" << poly_latex(t.Q) << "$\\\\\\hline\n";
        os << "$R_{" << t.m << "}$ & $" << poly_latex(t.R) << "$\\\\";
        os << (t.m < s.max_m() ? "\\hline" : "") << "\n";
    }
    os << "\\end{tabular}\n";
    return os.str();
}

std::string series_to_csv(const PsiSeries& s) {
    std::ostringstream os;
    os << "m,component,u_power,d_power,re,im\n";
    for (const auto& t : s.coeffs()) {
        const char* names[3] = {"P", "Q", "R"};
        const PsiPoly* polys[3] = {&t.P, &t.Q, &t.R};
        for (int i = 0; i < 3; ++i)
            for (const auto& [k, c] : polys[i]->terms())
                os << t.m << "," << names[i] << "," << k.first << "," << k.second << ","
                   << c.re.str() << "," << c.im.str() << "\n";
    }
    return os.str();
}

json orbit_to_json(const PeriodicOrbit& o) {
    json j;
    j["symbols"] = o.symbols;
    j["period"] = o.period;
    j["initial_state"] = {o.initial_state[0], o.initial_state[1], o.initial_state[2]};
    j["closure_residual"] = o.closure_residual;
    j["segment_times"] = o.segment_times;
    json pts = json::array();
    for (const auto& p : o.section_xy) pts.push_back({p[0], p[1]});
    j["section_xy"] = pts;
    return j;
}

PeriodicOrbit orbit_from_json(const json& j) {
    PeriodicOrbit o;
    o.symbols = j.at("symbols").get<std::string>();
    o.period = j.at("period").get<double>();
    auto st = j.at("initial_state");
    o.initial_state = {st.at(0).get<double>(), st.at(1).get<double>(), st.at(2).get<double>()};
    o.closure_residual = j.at("closure_residual").get<double>();
    for (const auto& t : j.at("segment_times")) o.segment_times.push_back(t.get<double>());
    for (const auto& p : j.at("section_xy"))
        o.section_xy.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return o;
}

json singularity_report_to_json(const std::string& orbit_symbols, const RefineResult& r,
                                const SingularityFit* fit) {
    json j;
    j["orbit"] = orbit_symbols;
    j["t_star"] = r.estimate.t_star;
    j["rho"] = r.estimate.rho;
    j["theta"] = r.estimate.theta;
    j["t0"] = {r.estimate.t0.real(), r.estimate.t0.imag()};
    j["stage"] =
        r.estimate.stage == SingularityEstimate::Stage::Refined ? "refined" : "asymptotic";
    j["final_standoff"] = r.final_standoff;
    if (fit) {
        j["fit"] = {{"C", {fit->c.real(), fit->c.imag()}},
                    {"D", {fit->d.real(), fit->d.imag()}},
                    {"family", family_name(fit->family)},
                    {"rms", fit->rms_residual},
                    {"holdout_rms", fit->holdout_residual},
                    {"n_trunc", fit->n_trunc},
                    {"annulus", {fit->annulus_inner, fit->annulus_outer}}};
    }
    return j;
}

json convergence_estimate_to_json(const ConvergenceEstimate& est) {
    return {{"K2", est.k2},          {"K1", est.k1},
            {"r", est.r},            {"C", {est.c_used.real(), est.c_used.imag()}},
            {"D_re", est.d_used.re.str()}, {"D_im", est.d_used.im.str()},
            {"method", est.method}};
}

std::string bounds_sweep_csv(const NormSequence& n, const MajorantSequence& maj) {
    std::ostringstream os;
    os << "m,norm_x,norm_f,log_majorant,lemma41_lhs,lemma41_rhs,lemma41_margin,"
          "lemma43_lhs,lemma43_rhs,lemma43_margin\n";
    for (int m = 0; m <= n.max_m(); ++m) {
        os << m << "," << fmt_double(n.x[static_cast<size_t>(m)]) << ","
           << fmt_double(n.f[static_cast<size_t>(m)]) << ",";
        os << (m <= maj.max_m() ? fmt_double(maj.log_values[static_cast<size_t>(m)]) : "");
        if (m >= 3) {
            BoundCheck b = check_F_bound(n, m);
            os << "," << fmt_double(b.lhs) << "," << fmt_double(b.rhs) << ","
               << fmt_double(b.rhs - b.lhs);
        } else {
            os << ",,,";
        }
        if (m >= 8) {
            BoundCheck b = check_X_bound(n, m);
            os << "," << fmt_double(b.lhs) << "," << fmt_double(b.rhs) << ","
               << fmt_double(b.rhs - b.lhs);
        } else {
            os << ",,,";
        }
        os << "\n";
    }
    return os.str();
}

std::string eta_domain_csv(const std::vector<EtaRectangle>& rects) {
    std::ostringstream os;
    os << "branch,re_max,im_min,im_max,r_branch\n";
    for (const auto& r : rects)
        os << r.branch << "," << fmt_double(r.re_max) << "," << fmt_double(r.im_min) << ","
           << fmt_double(r.im_max) << "," << fmt_double(r.r_branch) << "\n";
    return os.str();
}

std::string trace_csv(const std::vector<TraceSample>& trace) {
    std::ostringstream os;
    os << "re_t,im_t,re_x,im_x,re_y,im_y,re_z,im_z,step,err_est\n";
    for (const auto& s : trace)
        os << fmt_double(s.t.real()) << "," << fmt_double(s.t.imag()) << ","
           << fmt_double(s.x.real()) << "," << fmt_double(s.x.imag()) << ","
           << fmt_double(s.y.real()) << "," << fmt_double(s.y.imag()) << ","
           << fmt_double(s.z.real()) << "," << fmt_double(s.z.imag()) << ","
           << fmt_double(s.step) << "," << fmt_double(s.err_est) << "\n";
    return os.str();
}

std::string eval_grid_csv(const std::vector<std::array<double, 12>>& rows) {
    std::ostringstream os;
    os << "re_t,im_t,re_x,im_x,re_y,im_y,re_z,im_z,residual_norm,residual_raw,tail_bound,"
          "in_domain\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt_double(r[i]);
        os << "\n";
    }
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

double TomlValue::as_double() const {
    if (std::holds_alternative<double>(*this)) return std::get<double>(*this);
    if (std::holds_alternative<long>(*this)) return static_cast<double>(std::get<long>(*this));
    throw std::runtime_error("toml: value is not a number");
}
long TomlValue::as_int() const {
    if (std::holds_alternative<long>(*this)) return std::get<long>(*this);
    throw std::runtime_error("toml: value is not an integer");
}
const std::string& TomlValue::as_string() const {
    if (std::holds_alternative<std::string>(*this)) return std::get<std::string>(*this);
    throw std::runtime_error("toml: value is not a string");
}
const TomlArray& TomlValue::as_array() const {
    if (std::holds_alternative<TomlArray>(*this)) return std::get<TomlArray>(*this);
    throw std::runtime_error("toml: value is not an array");
}

namespace {

struct TomlParser {
    const std::string& s;
    size_t pos = 0;

    void skip_ws(bool newlines) {
        while (pos < s.size()) {
            char c = s[pos];
            if (c == '#') {
                while (pos < s.size() && s[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
                ++pos;
            } else {
                break;
            }
        }
    }

    TomlValue parse_value() {
        skip_ws(false);
        if (pos >= s.size()) throw std::runtime_error("toml: unexpected end of input");
        char c = s[pos];
        if (c == '[') {
            ++pos;
            TomlArray arr;
            skip_ws(true);
            if (pos < s.size() && s[pos] == ']') {
                ++pos;
                return arr;
            }
            while (true) {
                arr.push_back(parse_value());
                skip_ws(true);
                if (pos < s.size() && s[pos] == ',') {
                    ++pos;
                    skip_ws(true);
                    if (pos < s.size() && s[pos] == ']') {
                        ++pos;
                        break;
                    }
                    continue;
                }
                if (pos < s.size() && s[pos] == ']') {
                    ++pos;
                    break;
                }
                throw std::runtime_error("toml: malformed array");
            }
            return arr;
        }
        if (c == '"') {
            ++pos;
            std::string out;
            while (pos < s.size() && s[pos] != '"') {
                if (s[pos] == '\\' && pos + 1 < s.size()) ++pos;
                out.push_back(s[pos++]);
            }
            if (pos >= s.size()) throw std::runtime_error("toml: unterminated string");
            ++pos;
            return out;
        }
        size_t start = pos;
        while (pos < s.size() && s[pos] != ',' && s[pos] != ']' && s[pos] != '\n' &&
               s[pos] != '#' && s[pos] != '\r')
            ++pos;
        std::string tok = s.substr(start, pos - start);
        while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.pop_back();
        if (tok == "true") return true;
        if (tok == "false") return false;
        if (tok.find_first_of(".eE") == std::string::npos) {
            try {
                return static_cast<long>(std::stoll(tok));
            } catch (...) {
                throw std::runtime_error("toml: bad integer '" + tok + "'");
            }
        }
        try {
            return std::stod(tok);
        } catch (...) {
            throw std::runtime_error("toml: bad number '" + tok + "'");
        }
    }
};

}  // namespace

TomlTable parse_toml(const std::string& text) {
    TomlTable table;
    TomlParser p{text};
    std::string prefix;
    while (true) {
        p.skip_ws(true);
        if (p.pos >= text.size()) break;
        if (text[p.pos] == '[') {
            size_t end = text.find(']', p.pos);
            if (end == std::string::npos) throw std::runtime_error("toml: unterminated table");
            prefix = text.substr(p.pos + 1, end - p.pos - 1) + ".";
            p.pos = end + 1;
            continue;
        }
        size_t eq = text.find('=', p.pos);
        size_t nl = text.find('\n', p.pos);
        if (eq == std::string::npos || (nl != std::string::npos && nl < eq))
            throw std::runtime_error("toml: expected key = value");
        std::string key = text.substr(p.pos, eq - p.pos);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        p.pos = eq + 1;
        table[prefix + key] = p.parse_value();
    }
    return table;
}

TomlTable parse_toml_file(const std::filesystem::path& path) {
    return parse_toml(read_text_file(path));
}

Manifest::Manifest(std::string subcommand, json params, long seed)
    : start_(std::chrono::steady_clock::now()) {
    data_["tool"] = "lorenz-psi";
    data_["version"] = kVersion;
    data_["subcommand"] = std::move(subcommand);
    data_["params"] = std::move(params);
    data_["seed"] = seed;
    data_["started_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                   std::chrono::system_clock::now().time_since_epoch())
                                   .count();
}

void Manifest::finish_and_write(const std::filesystem::path& output_dir) {
    data_["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start_)
                           .count();
    std::filesystem::create_directories(output_dir);
    write_text_file(output_dir / "manifest.json", data_.dump(2) + "\n");
}

}  // namespace lorenzpsi
