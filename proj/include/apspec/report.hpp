#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "apspec/system.hpp"

namespace apspec {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// Validated experiment description.  Unknown diagnostics and malformed fields
// are rejected up front, before any computation runs.
struct ExperimentConfig {
    nlohmann::json raw; // canonical echo (defaults filled in)

    SystemConfig system;
    bool has_system = false;
    std::vector<std::string> diagnostics;
    std::uint64_t seed = 0;
    std::size_t samples = 100000;
    double grid_extent = 500.0;
    long long spectral_window = 4096;
    std::string observable; // empty: the system's central observable
    std::vector<double> windows;
    std::vector<double> eps_fractions;
    std::string out_dir = "out";

    // diffraction section
    std::string provenance = "LATTICE";
    double L = 1000.0;
    double Z = 50.0;
    double k_lo = 0.0;
    double k_hi = 3.5;
    double rate = 1.0;
    double window_lo = -1.0;
    double window_hi = kGoldenRatio - 1.0;
    bool gamma_check = true;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
};

std::string config_hash(const nlohmann::json& canonical);

// Executes the requested diagnostics, writes report.json plus per-series CSV
// files under out_dir, and returns the report body.  The body contains no
// timestamps; wall-clock goes to the side file report.meta.json.
nlohmann::json run_experiment(const ExperimentConfig& config, bool quiet = false);

struct CompareOptions {
    double se_mult = 6.0; // tolerance multiplier for stderr-covered fields
};

struct CompareResult {
    bool match = true;
    std::vector<std::string> diffs;    // out-of-tolerance values
    std::vector<std::string> sections; // structural mismatches
    std::size_t compared = 0;
    std::size_t within_tolerance = 0;
};

CompareResult compare_reports(const nlohmann::json& a, const nlohmann::json& b,
                              const CompareOptions& opts = {});

} // namespace apspec
