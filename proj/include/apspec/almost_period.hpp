#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "apspec/profile.hpp"

namespace apspec {

enum class ApVerdict { ApConsistent, NotAp, Inconclusive };

std::string to_string(ApVerdict v);

// One epsilon level of the almost-period scan.
struct AlmostPeriodRow {
    double eps = 0.0;
    std::vector<double> windows;   // T values, group units, ascending
    std::vector<double> max_gap;   // largest gap (incl. boundary gaps) per window
    std::vector<long long> period_indices; // grid indices included at the largest window
    bool stable = false;           // gap(T_k) <= growth * gap(T_{k-1}) on the last pair
    bool beyond_zero = false;      // set contains more than {0} at the largest window
    double min_off_zero = 0.0;     // min |F(t)| over t != 0 in the largest window
    bool not_ap_witness = false;   // set == {0} with |F| > 2 eps + 4 se off zero
};

struct AlmostPeriodReport {
    std::string profile_label;
    double growth_threshold = 1.25;
    std::vector<AlmostPeriodRow> rows;
    ApVerdict verdict = ApVerdict::Inconclusive;
    std::optional<double> witness_eps;

    nlohmann::json to_json() const;
    // columns: eps,t,absF,included
    void write_period_csv(std::ostream& os, const Profile& profile) const;
};

std::vector<double> default_eps_fractions(); // {0.2, 0.1, 0.05, 0.02}
std::vector<double> default_eps_grid(const Profile& p);
std::vector<double> default_windows(GroupKind kind);

// Relative denseness scan of the sub-level sets {tau : |F(tau)| <= eps} over
// nested windows.  F must be real with F(0) = 0.
AlmostPeriodReport scan_almost_periods(const Profile& profile,
                                       const std::vector<double>& eps_grid,
                                       const std::vector<double>& windows);

// Bohr instability of an arbitrary (complex) profile:
// D(tau) = max_t |H(t+tau) - H(t)| over the grid overlap.  For profiles that
// induce invariant pseudometrics this reproduces the profile itself; for S_f
// it provides the almost-periodicity surrogate with D(0) = 0.
Profile translation_instability(const Profile& h);

struct FrequencySet {
    std::vector<double> freqs;      // beta, mod 1 for Z; 1/group-unit for sampled R
    std::vector<double> magnitudes; // |c_beta|, sorted descending
    double resolution = 0.0;        // dedup resolution 1/(2N) in group units
    double window = 0.0;            // N in group units
    double threshold = 0.0;
    bool aliasing_flag = false;     // sampled R only: peaks near Nyquist

    nlohmann::json to_json() const;
};

struct FourierBohrOptions {
    double theta_frac = 0.05; // threshold as a fraction of sup |F|
    bool refine = true;
    std::size_t max_freqs = 64;
    // Explicit candidate list; when absent a 1/(4N) FFT scan is used.
    std::optional<std::vector<double>> candidates;
};

// Single averaged coefficient c_beta = mean_{|n|<=N} F(n) e^{-2 pi i beta n}.
cplx fourier_bohr_at(const Profile& p, double beta, long long n_window);

FrequencySet fourier_bohr_coefficients(const Profile& p, long long n_window,
                                       const FourierBohrOptions& opts = {});

struct MtapReport {
    double eps = 0.0;
    GroupGrid grid;
    std::vector<long long> included; // grid indices that are mt eps-almost periods
    std::vector<double> fraction;    // per grid point: empirical m({x: e(x,tx) > eps})
    std::vector<double> binom_se;
};

// Measure-theoretic eps-almost periods: t with m({x : e(x,tx) > eps}) < eps.
MtapReport measure_theoretic_almost_periods(const SystemPtr& system,
                                            const Pseudometric& e, double eps,
                                            const GroupGrid& grid,
                                            const ProfileOptions& opts);

// Quantitative two-way consistency between measure-theoretic almost periods
// and smallness of the e-average, with the Markov constants from the
// equivalence proof: eps1 (||e||inf + 1) < eps forward, e-average < eps^2
// backward.
struct PeriodCrossCheck {
    double eps = 0.0;
    double eps1 = 0.0;
    std::size_t forward_checked = 0;
    std::vector<long long> forward_violations;
    std::size_t backward_checked = 0;
    std::vector<long long> backward_violations;

    bool pass() const {
        return forward_violations.empty() && backward_violations.empty();
    }
};

std::vector<PeriodCrossCheck> cross_check_period_notions(
    const SystemPtr& system, const Pseudometric& e, const std::vector<double>& eps_grid,
    const GroupGrid& grid, const ProfileOptions& opts);

} // namespace apspec
