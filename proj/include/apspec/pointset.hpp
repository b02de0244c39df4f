#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "apspec/almost_period.hpp"
#include "apspec/profile.hpp"

namespace apspec {

enum class Provenance { Lattice, FibonacciChain, CutAndProject, Poisson };

std::string to_string(Provenance p);

struct PointSetOptions {
    // Cut-and-project acceptance window in internal space (length phi by
    // default, which reproduces the Fibonacci chain density).
    double window_lo = -1.0;
    double window_hi = kGoldenRatio - 1.0;
    double rate = 1.0; // Poisson intensity
};

// A finite window of a 1-D point configuration.  Algebraic provenances also
// carry exact integer coordinates (a, b) meaning a + b*phi, so displacement
// arithmetic is exact.
struct PointSet {
    std::vector<double> xs; // strictly sorted
    std::vector<std::pair<long long, long long>> alg;
    double L = 0.0;
    Provenance prov = Provenance::Lattice;
    double r_min = 0.0;
    double density_theory = 0.0;
    std::string describe;

    double density() const {
        return static_cast<double>(xs.size()) / (2.0 * L);
    }
    void validate() const;
    void write_txt(std::ostream& os) const; // one coordinate per line
};

PointSet generate_point_set(Provenance prov, double L, std::uint64_t seed,
                            const PointSetOptions& opts = {});

enum class BoundaryMode { Plain, PerPairNormalized };

// Finite-window Patterson sum: atoms at pair displacements, one-sided storage
// (z >= 0; the weight at -z equals the weight at z by construction).
struct AutocorrelationMeasure {
    std::vector<double> z; // ascending, z[0] == 0
    std::vector<double> w;
    double window_L = 0.0;
    double Z = 0.0;
    double bin_width = 0.0;
    BoundaryMode mode = BoundaryMode::Plain;
    bool exact_displacements = false;

    double zero_weight() const { return w.empty() ? 0.0 : w.front(); }
    void write_csv(std::ostream& os) const; // columns z,w (both signs emitted)
};

AutocorrelationMeasure patterson_autocorrelation(const PointSet& ps, double Z,
                                                 double bin_width = 1e-6,
                                                 BoundaryMode mode = BoundaryMode::Plain);

struct DiffractionPeak {
    double k = 0.0;
    double height = 0.0;
    double mass = 0.0; // kernel-corrected integral over the peak lobe
};

struct DiffractionSpectrum {
    std::vector<double> k;
    std::vector<double> intensity; // clipped at 0; pre-clip minimum recorded
    std::vector<DiffractionPeak> peaks;
    double min_before_clip = 0.0;
    double Z = 0.0;
    std::string taper = "bartlett";
    std::vector<std::string> warnings;

    void write_csv(std::ostream& os) const; // columns k,intensity
    nlohmann::json to_json() const;
};

struct DiffractionOptions {
    double k_lo = 0.0;
    double k_hi = 1.5;
    double dk = 0.0;                 // 0: choose <= 1/(8Z)
    double peak_threshold_frac = 0.05; // of the maximum intensity
    double mass_halfwidth = 3.0;     // integrate over +- c/Z around each peak
};

DiffractionSpectrum diffraction(const AutocorrelationMeasure& ac,
                                const DiffractionOptions& opts = {});

struct TestFunction {
    enum class Kind { Triangle, GaussianTruncated, Hat };
    Kind kind = Kind::Triangle;
    double radius = 0.5;

    double eval(double u) const;
    double sup_norm() const { return 1.0; }
    std::string name() const;
};

// N_phi at the translate t of the configuration: sum_x phi(t - x).
double n_map(const TestFunction& phi, const PointSet& ps, double t);

struct GammaCheckOptions {
    double Z = 0.0;        // Patterson cutoff; 0: max|t| + 2 radius + 8
    double bin_width = 1e-6;
    double s_step = 0.01;  // hull average stride over [-L/2, L/2]
    double conv_step = 1e-3; // quadrature step of phi * phi~
};

struct GammaCheck {
    std::vector<double> t;
    std::vector<double> lhs; // (gamma * phi * phi~)(t)
    std::vector<double> rhs; // hull average of conj(V(s)) V(s+t)
    double residual = 0.0;   // max_t |lhs - rhs|
};

GammaCheck gamma_identity_check(const PointSet& ps, const TestFunction& phi,
                                const std::vector<double>& ts,
                                const GammaCheckOptions& opts = {});

// Averaged profiles of the hull observable V(s) = sum_x phi(s - x) under
// uniform translates; the bridge from point sets back to the almost-period
// machinery.
struct HullProfiles {
    Profile autocorrelation; // S_V
    Profile displacement;    // F_V, real with F(0) = 0
    double norm_sq = 0.0;
};

HullProfiles hull_observable_profiles(const PointSet& ps, const TestFunction& phi,
                                      const GroupGrid& grid, std::size_t s_samples,
                                      std::uint64_t seed);

struct TmdsVerdict {
    std::string provenance;
    ApVerdict ap = ApVerdict::Inconclusive;
    std::string label; // DISCRETE_CONSISTENT | NOT_DISCRETE | INCONCLUSIVE
    AlmostPeriodReport scan;
    Profile displacement;

    nlohmann::json to_json() const;
};

struct TmdsVerdictOptions {
    double grid_extent = 60.0;
    double h = 0.05;
    std::vector<double> windows = {15.0, 30.0, 45.0, 60.0};
    std::vector<double> eps_fractions;
    std::size_t s_samples = 20000;
    std::uint64_t seed = 11;
};

TmdsVerdict tmds_spectrum_verdict(const PointSet& ps, const TestFunction& phi,
                                  const TmdsVerdictOptions& opts = {});

} // namespace apspec
