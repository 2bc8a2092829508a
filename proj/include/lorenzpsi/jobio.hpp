#pragma once

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "lorenzpsi/convergence.hpp"
#include "lorenzpsi/orbits.hpp"
#include "lorenzpsi/singularity.hpp"
#include "lorenzpsi/table1.hpp"
#include "lorenzpsi/taylor.hpp"

namespace lorenzpsi {

using nlohmann::json;

/// Serialization contract for coefficient dumps: terms sorted by (u, d),
/// rationals as decimal-free strings.
json psi_poly_to_json(const PsiPoly& p);
PsiPoly psi_poly_from_json(const json& j);

json series_to_json(const PsiSeries& s);
std::string series_to_latex(const PsiSeries& s);
std::string series_to_csv(const PsiSeries& s);

json orbit_to_json(const PeriodicOrbit& o);
PeriodicOrbit orbit_from_json(const json& j);

json singularity_report_to_json(const std::string& orbit_symbols, const RefineResult& r,
                                const SingularityFit* fit);

json convergence_estimate_to_json(const ConvergenceEstimate& est);

std::string bounds_sweep_csv(const NormSequence& n, const MajorantSequence& maj);
std::string eta_domain_csv(const std::vector<EtaRectangle>& rects);
std::string trace_csv(const std::vector<TraceSample>& trace);
std::string eval_grid_csv(const std::vector<std::array<double, 12>>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

/// Restricted TOML reader for job files: top-level and [table] sections,
/// key = value with integers, floats, booleans, quoted strings, and
/// (nested) arrays. Keys are flattened as "table.key".
struct TomlValue;
using TomlArray = std::vector<TomlValue>;
struct TomlValue : std::variant<bool, long, double, std::string, TomlArray> {
    using variant::variant;
    double as_double() const;
    long as_int() const;
    const std::string& as_string() const;
    const TomlArray& as_array() const;
};
using TomlTable = std::map<std::string, TomlValue>;

TomlTable parse_toml(const std::string& text);
TomlTable parse_toml_file(const std::filesystem::path& path);

/// Run manifest written next to every output set: inputs, versions,
/// timings.
class Manifest {
public:
    Manifest(std::string subcommand, json params, long seed);
    void finish_and_write(const std::filesystem::path& output_dir);

private:
    json data_;
    std::chrono::steady_clock::time_point start_;
};

extern const char* const kVersion;

}  // namespace lorenzpsi
