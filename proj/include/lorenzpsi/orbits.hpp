#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lorenzpsi/taylor.hpp"

namespace lorenzpsi {

/// Wing itinerary over {A, B}: one symbol per rising crossing of the
/// z = 27 section, A for x < 0 and B for x > 0. Rising crossings happen
/// once per wing loop at |x| > 10, squarely inside the wing quadrants.
struct SymbolSequence {
    std::string symbols;

    explicit SymbolSequence(std::string s);
    size_t length() const { return symbols.size(); }
};

struct SectionCrossing {
    double time = 0.0;
    double x = 0.0, y = 0.0;
    char symbol = '?';
};

/// Rising (dz/dt > 0) crossings of z = 27 along a real-time trajectory.
std::vector<SectionCrossing> section_crossings(const State& start, double duration,
                                               int order = 20, double tolerance = 1e-12);

struct PeriodicOrbit {
    std::string symbols;
    double period = 0.0;
    std::array<double, 3> initial_state{};  // on the section, z = 27
    double closure_residual = 0.0;
    // per-segment section points and flight times (diagnostics)
    std::vector<std::array<double, 2>> section_xy;
    std::vector<double> segment_times;
};

struct OrbitSearchConfig {
    double harvest_transient = 20.0;
    double harvest_max_time = 2500.0;
    int newton_max_iter = 60;
    double newton_tol = 1e-11;
    double closure_tol = 1e-10;
    int order = 25;
    double tolerance = 1e-13;
};

/// Multiple-shooting Newton on section-to-section maps. The unknowns are
/// the section points (x_i, y_i) and the segment times; pinning every
/// point to z = 27 removes the time-translation freedom, so the system is
/// square. Initial guesses are harvested from a long chaotic trajectory
/// whose crossing itinerary contains the doubled symbol pattern.
PeriodicOrbit find_periodic_orbit(const SymbolSequence& symbols,
                                  const OrbitSearchConfig& cfg = {},
                                  std::optional<std::array<double, 3>> guess = std::nullopt);

/// Real-time flow for a given duration (thin wrapper over integrate_path).
IntegrationResult flow_real(const State& s, double duration, int order = 25,
                            double tolerance = 1e-13, bool keep_trace = false);

State orbit_start_state(const PeriodicOrbit& orbit);

}  // namespace lorenzpsi
