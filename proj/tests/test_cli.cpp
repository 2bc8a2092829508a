#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lorenzpsi/jobio.hpp"

using namespace lorenzpsi;
namespace fs = std::filesystem;

namespace {

std::string binary() {
    const char* env = std::getenv("LORENZ_PSI_BIN");
    REQUIRE_MESSAGE(env != nullptr, "LORENZ_PSI_BIN must point at the CLI binary");
    return env;
}

int run(const std::string& args) {
    std::string cmd = binary() + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("lorenzpsi_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(run("") == 1);
    CHECK(run("gen-coeffs --format nope --output-dir /tmp/lp_bad") == 1);
    CHECK(run("no-such-command") == 1);
}

TEST_CASE("verify-table1 passes and writes a report") {
    fs::path dir = fresh_dir("verify");
    CHECK(run("verify-table1 --output-dir " + dir.string()) == 0);
    json rep = json::parse(read_text_file(dir / "table1_report.json"));
    CHECK(rep.at("ok").get<bool>());
    CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("gen-coeffs writes deterministic JSON") {
    fs::path d1 = fresh_dir("gen1"), d2 = fresh_dir("gen2");
    std::string flags = "gen-coeffs --max-m 6 --family plus --d symbolic --format json";
    CHECK(run(flags + " --output-dir " + d1.string()) == 0);
    CHECK(run(flags + " --output-dir " + d2.string()) == 0);
    CHECK(read_text_file(d1 / "coefficients.json") == read_text_file(d2 / "coefficients.json"));

    // coefficient dump round-trips through the documented schema
    json arr = json::parse(read_text_file(d1 / "coefficients.json"));
    REQUIRE(arr.size() == 9);  // m = -2 .. 6
    PsiSeries s = PsiSeries::generate(6, Family::Plus);
    for (const auto& entry : arr) {
        int m = entry.at("m").get<int>();
        CHECK(psi_poly_from_json(entry.at("P")) == s.triple(m).P);
        CHECK(psi_poly_from_json(entry.at("Q")) == s.triple(m).Q);
        CHECK(psi_poly_from_json(entry.at("R")) == s.triple(m).R);
    }
    // terms are sorted by (u, d) ascending in the dump
    for (const auto& entry : arr) {
        for (const char* comp : {"P", "Q", "R"}) {
            const json& terms = entry.at(comp);
            for (size_t i = 1; i < terms.size(); ++i) {
                auto u0 = terms[i - 1].at("u").get<uint32_t>(), u1 = terms[i].at("u").get<uint32_t>();
                auto d0 = terms[i - 1].at("d").get<uint32_t>(), d1 = terms[i].at("d").get<uint32_t>();
                CHECK((u0 < u1 || (u0 == u1 && d0 < d1)));
            }
        }
    }
}

TEST_CASE("gen-coeffs latex and minimal dumps") {
    fs::path dir = fresh_dir("latex");
    CHECK(run("gen-coeffs --max-m 3 --format latex --output-dir " + dir.string()) == 0);
    std::string tex = read_text_file(dir / "coefficients.tex");
    CHECK(tex.find("\\frac{988}{81}") != std::string::npos);
    CHECK(tex.find("(\\eta+C)^{2}") != std::string::npos);

    fs::path dir2 = fresh_dir("minimal");
    CHECK(run("gen-coeffs --max-m -2 --format json --output-dir " + dir2.string()) == 0);
    json arr = json::parse(read_text_file(dir2 / "coefficients.json"));
    CHECK(arr.size() == 1);
}

TEST_CASE("bounds subcommand emits sweep and estimate") {
    fs::path dir = fresh_dir("bounds");
    CHECK(run("bounds --max-m 40 --majorant-m 400 --d numeric:0 --output-dir " +
              dir.string()) == 0);
    json est = json::parse(read_text_file(dir / "convergence_estimate.json"));
    CHECK(est.at("lemma_sweeps_hold").get<bool>());
    CHECK(est.at("majorant_dominates").get<bool>());
    CHECK(est.at("norm_v_product").get<std::string>() == "16");
    CHECK(fs::exists(dir / "bounds_sweep.csv"));
}

TEST_CASE("radius subcommand orders branch radii") {
    fs::path dir = fresh_dir("radius");
    CHECK(run("radius --c 0,0 --d numeric:0 --branch-min -3 --branch-max 3 --output-dir " +
              dir.string()) == 0);
    std::string csv = read_text_file(dir / "eta_domain.csv");
    CHECK(csv.find("branch,") == 0);
    int lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 8);  // header + 7 branches
}

TEST_CASE("integrate honors TOML job files") {
    fs::path dir = fresh_dir("integrate");
    fs::path job = dir / "job.toml";
    std::ofstream f(job);
    f << "# loop in complex time\n"
      << "[path]\n"
      << "waypoints = [[0.0, 0.0], [0.4, 0.0], [0.4, 0.01], [0.0, 0.0]]\n"
      << "tolerance = 1e-12\n"
      << "order = 25\n"
      << "[state]\n"
      << "x = 2.0\n"
      << "y = 3.0\n"
      << "z = 15.0\n";
    f.close();
    CHECK(run("integrate --job " + job.string() + " --output-dir " + dir.string()) == 0);
    json res = json::parse(read_text_file(dir / "integrate_result.json"));
    CHECK_FALSE(res.at("diverged").get<bool>());
    // closed loop: endpoint returns near the start
    auto end = res.at("end");
    CHECK(std::fabs(end.at("x").at(0).get<double>() - 2.0) < 1e-8);
    CHECK(fs::exists(dir / "trace.csv"));
}

TEST_CASE("residual grid emits CSV with tail bounds") {
    fs::path dir = fresh_dir("resid");
    CHECK(run("residual --max-m 30 --t0 0,-0.2 --n 20 --grid "
              "0.001,0.004,3,0.001,0.004,3 --output-dir " +
              dir.string()) == 0);
    std::string csv = read_text_file(dir / "residual_grid.csv");
    CHECK(csv.find("re_t,im_t") == 0);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 9);
}

TEST_CASE("toml parser round-trips the supported subset") {
    TomlTable t = parse_toml(
        "# comment\ntitle = \"run\"\ncount = 42\nratio = 0.5\nflag = true\n"
        "[nest]\nvals = [1, 2, 3]\npairs = [[1.0, -2.0], [3.5, 4.0]]\n");
    CHECK(t.at("title").as_string() == "run");
    CHECK(t.at("count").as_int() == 42);
    CHECK(t.at("ratio").as_double() == 0.5);
    CHECK(std::get<bool>(t.at("flag")));
    CHECK(t.at("nest.vals").as_array().size() == 3);
    CHECK(t.at("nest.pairs").as_array().at(1).as_array().at(0).as_double() == 3.5);
    CHECK_THROWS(parse_toml("broken ="));
}
