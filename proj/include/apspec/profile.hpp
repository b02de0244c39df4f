#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "apspec/group.hpp"
#include "apspec/pseudometric.hpp"
#include "apspec/system.hpp"

namespace apspec {

enum class ProfileMethod { MonteCarlo, Quadrature, Birkhoff, ExactRecursion };

std::string to_string(ProfileMethod m);

struct ProfileOptions {
    ProfileMethod method = ProfileMethod::MonteCarlo;
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    // Evaluate only t >= 0 and fill t < 0 by the symmetry/conjugacy extension
    // (exact for the empirical measure; requires a symmetric grid).
    bool symmetric_extension = true;
    bool prefer_exact = true;   // use a closed-form autocorrelation when offered
    double stderr_warn = 1e-3;
};

// A complex function on a group grid with per-point statistical error and
// full sampling provenance.
class Profile {
  public:
    GroupGrid grid;
    std::vector<cplx> values;
    std::vector<double> se;
    ProfileMethod method = ProfileMethod::MonteCarlo;
    std::size_t sample_size = 0;
    std::uint64_t seed = 0;
    bool real_valued = false;
    bool symmetrized = false;
    std::string label;
    std::vector<std::string> warnings;

    std::size_t size() const { return values.size(); }
    const cplx& at_index(long long grid_index) const {
        return values[grid.pos_of(grid_index)];
    }
    double se_at_index(long long grid_index) const {
        return se[grid.pos_of(grid_index)];
    }
    double real_at(std::size_t i) const { return values[i].real(); }
    double max_abs() const;
    double max_se() const;

    void write_csv(std::ostream& os) const; // columns: t, re, im, stderr
    nlohmann::json to_json() const;
};

// All averaged functions attached to one observable, computed from one shared
// sample so that algebraic identities between them hold exactly:
//   autocorrelation  S_f(t) = mean conj(f(x_i)) f(t x_i)
//   displacement     F_f(t) = sqrt(mean |f(x_i) - f(t x_i)|^2)
//   mean_displacement e_f-average(t) = mean |f(x_i) - f(t x_i)|
//   norm_term        nu(t) = (mean |f(x_i)|^2 + mean |f(t x_i)|^2) / 2
// With these definitions F^2 = 2 nu - 2 Re S holds per grid point exactly.
struct ObservableProfiles {
    Profile autocorrelation;
    Profile displacement;
    Profile mean_displacement;
    Profile norm_term;
    double norm_sq = 0.0; // mean |f(x_i)|^2 (= S(0))
};

// e-average profile: t -> mean e(x_i, t x_i).
Profile average_pseudometric(const SystemPtr& system, const Pseudometric& e,
                             const GroupGrid& grid, const ProfileOptions& opts);

// e'(s,t) = e-average(s - t); shares the sampling rule with
// average_pseudometric, so the identity is exact by construction.
double two_variable_profile(const SystemPtr& system, const Pseudometric& e,
                            const GroupElement& s, const GroupElement& t,
                            const ProfileOptions& opts);

ObservableProfiles observable_profiles(const SystemPtr& system, const Observable& f,
                                       const GroupGrid& grid,
                                       const ProfileOptions& opts);

Profile displacement_profile(const SystemPtr& system, const Observable& f,
                             const GroupGrid& grid, const ProfileOptions& opts);

Profile autocorrelation_profile(const SystemPtr& system, const Observable& f,
                                const GroupGrid& grid, const ProfileOptions& opts);

// sum_n c_n F_{f_n} over one shared sample.
Profile summed_displacement(const SystemPtr& system, const WeightedFamily& family,
                            const GroupGrid& grid, const ProfileOptions& opts);

} // namespace apspec
