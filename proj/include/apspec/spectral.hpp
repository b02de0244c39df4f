#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "apspec/almost_period.hpp"
#include "apspec/profile.hpp"

namespace apspec {

enum class SpectralClass { PurePointConsistent, ContinuousConsistent, Mixed, Inconclusive };

std::string to_string(SpectralClass c);

// Cesaro averages M_N = (1/(2N+1)) sum_{|n|<=N} |S(n)|^2; M_N converges to the
// total squared atom mass of the spectral measure.
struct WienerCurve {
    std::vector<long long> Ns;
    std::vector<double> M;
    double extrapolated = 0.0; // mean of M over the last decade of N

    nlohmann::json to_json() const;
};

std::vector<long long> default_wiener_windows(long long n_max);

WienerCurve wiener_atom_mass(const Profile& s_profile, const std::vector<long long>& Ns);

struct Atom {
    double freq = 0.0;
    double mass = 0.0;
};

// Atoms of the spectral measure via Fourier-Bohr peaks of S_f.
std::vector<Atom> extract_atoms(const Profile& s_profile, long long n_window,
                                double theta_frac = 0.05);

// Spectral-measure diagnostics for one observable.  The autocorrelation is
// centered (f replaced by f - mean f) so the ever-present eigenvalue at 0
// coming from constants does not mask the classification; the removed mean
// atom is reported separately.
struct SpectralEstimate {
    std::string observable;
    cplx mean_f{0.0, 0.0};
    double s0_raw = 0.0;      // S_f(0) before centering
    double s0 = 0.0;          // centered total mass
    WienerCurve wiener;
    std::vector<Atom> atoms;  // at threshold theta
    double atom_mass_sum = 0.0;
    double mass_remainder = 0.0;   // s0 - sum of masses at the deep (theta/8) scan
    double wiener_residual = 0.0;  // (M_ext - sum m^2 at theta/8)/M_ext, clipped at 0
    SpectralClass cls = SpectralClass::Inconclusive;

    nlohmann::json to_json() const;
};

struct SpectralOptions {
    long long n_window = 4096;
    std::size_t samples = 20000;
    std::uint64_t seed = 7;
    double theta_frac = 0.05;
    bool prefer_exact = true;
    // Relative thresholds of the classification rule.
    double continuous_wiener_frac = 0.01; // M_ext <= frac * s0^2 counts as vanished
    double mixed_mass_frac = 0.1;         // unexplained mass above this => MIXED
};

SpectralEstimate estimate_spectral_measure(const SystemPtr& system, const Observable& f,
                                           const SpectralOptions& opts);

// Classification from already-computed pieces (used by the TMDS bridge too).
SpectralClass classify_spectrum(double s0, double m_ext, double deep_mass,
                                double deep_mass_sq, bool atoms_at_theta,
                                const SpectralOptions& opts);

struct EigenvalueGroupEstimate {
    enum class Source { FromDUnderline, FromObservables };
    Source source = Source::FromDUnderline;
    std::vector<double> generators;
    std::vector<double> elements; // closure under addition (mod 1 on Z), capped
    double resolution = 0.0;
    std::size_t cap = 200;

    nlohmann::json to_json() const;
};

EigenvalueGroupEstimate close_group(std::vector<double> generators, double resolution,
                                    GroupKind kind, std::size_t cap = 200);

struct VerdictOptions {
    double grid_extent = 2000.0; // group units (Z: indices, R: seconds)
    std::vector<double> windows; // empty: per-kind default
    std::vector<double> eps_fractions;
    std::size_t samples = 20000;
    std::uint64_t seed = 7;
    bool with_corroboration = true;
    SpectralOptions spectral;
};

// Main-theorem pipeline: the system has discrete spectrum iff the averaged
// metric is Bohr almost periodic; in the affirmative case the eigenvalue
// group is generated by its frequencies.
struct SystemVerdict {
    std::string system;
    ApVerdict ap = ApVerdict::Inconclusive;
    std::string label; // DISCRETE_CONSISTENT | NOT_DISCRETE | INCONCLUSIVE
    AlmostPeriodReport d_scan;
    Profile d_profile;
    std::optional<double> witness_eps;
    std::optional<EigenvalueGroupEstimate> group;
    std::vector<SpectralEstimate> corroboration;
    SpectralClass aggregate_class = SpectralClass::Inconclusive;

    nlohmann::json to_json() const;
};

SystemVerdict discrete_spectrum_verdict(const SystemPtr& system,
                                        const VerdictOptions& opts);

// One fused pass producing AP verdicts for the averaged metric, every family
// member's e_f / F_f / S_f, and the family aggregates; the lemma demands they
// agree, and the matrix records whether they do.
struct EquivalenceMatrix {
    struct MemberRow {
        std::string observable;
        ApVerdict e_avg = ApVerdict::Inconclusive;
        ApVerdict displacement = ApVerdict::Inconclusive;
        ApVerdict autocorrelation = ApVerdict::Inconclusive;
    };

    std::string system;
    ApVerdict d_avg = ApVerdict::Inconclusive;
    ApVerdict family_e_avg = ApVerdict::Inconclusive;
    ApVerdict family_displacement = ApVerdict::Inconclusive;
    std::vector<MemberRow> members;
    std::string canonical; // central observable name
    bool family_separates = false;
    bool canonical_agreement = false; // the six canonical verdicts coincide
    bool all_members_agree = false;   // every member row matches d_avg
    bool contradiction = false;       // some member is decisively opposite to d_avg
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

struct EquivalenceOptions {
    double grid_extent = 1000.0;
    std::vector<double> windows;
    std::vector<double> eps_fractions;
    std::size_t samples = 10000;
    std::uint64_t seed = 7;
    double delta_sep = 1e-3;
};

EquivalenceMatrix cross_equivalence_suite(const SystemPtr& system,
                                          const WeightedFamily& family,
                                          const EquivalenceOptions& opts);

// Finitely supported test sequence phi: supp in [lo, lo + vals.size()).
struct TestSeq {
    long long lo = 0;
    std::vector<cplx> vals;

    cplx fourier(double beta, double h) const; // hat(phi)(beta), Riemann-scaled by h
    double l1(double h) const;
};

// Consistency of <N^f(phi), N^f(psi)> with the atomic spectral data: the
// residual must be controlled by the continuous remainder for pure-point
// systems.
struct NfResult {
    cplx lhs{0.0, 0.0};
    cplx rhs{0.0, 0.0};
    double residual = 0.0;
    double bound = 0.0;
    bool riemann_flag = false; // sampled-R groups use Riemann sums
};

NfResult nf_consistency(const Profile& s_profile, const SpectralEstimate& est,
                        const TestSeq& phi, const TestSeq& psi, double stat_tol);

} // namespace apspec
