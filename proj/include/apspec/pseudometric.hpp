#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "apspec/observable.hpp"
#include "apspec/system.hpp"

namespace apspec {

// A continuous pseudometric on the phase space. The system metric d is
// wrapped as one of these too.
struct Pseudometric {
    std::string name;
    std::function<double(const SystemPoint&, const SystemPoint&)> eval;
    double sup_bound = 0.0; // analytic or sampled bound on sup e

    double operator()(const SystemPoint& x, const SystemPoint& y) const {
        return eval(x, y);
    }
};

Pseudometric metric_pseudometric(const SystemPtr& system);

// e_f(x,y) = |f(x) - f(y)|, sup bound 2||f||_inf.
Pseudometric pseudometric_from_observable(const Observable& f);

struct WeightedFamily {
    std::vector<Observable> members;
    std::vector<double> weights;
    double tail_bound = 0.0; // bound on the discarded sum_{n>N} c_n ||f_n||_inf

    void validate() const;
    double total_weight_norm() const; // sum c_n ||f_n||_inf over the kept members
    double tail_fraction() const;
};

// The system's registered default separating family.
WeightedFamily default_weighted_family(const DynamicalSystem& system);

// sum_n c_n e_{f_n}.
Pseudometric weighted_pseudometric(const WeightedFamily& family);

struct SeparationCheck {
    bool separates = false;
    double delta_sep = 1e-3;   // pairs are 'separated' when d(x,y) > delta_sep
    std::size_t pairs = 0;
    std::size_t separated_pairs = 0;
    double min_eval_on_separated = 0.0;
};

// Empirical check that a pseudometric separates points: no sampled pair at
// d-distance above delta_sep may evaluate to (near) zero.
SeparationCheck check_separation(const SystemPtr& system, const Pseudometric& e,
                                 double delta_sep, std::size_t n_pairs,
                                 std::uint64_t seed);

struct DominationReport {
    enum class Verdict { DominatedConsistent, NotDominated };

    std::vector<double> eps;
    std::vector<double> delta_hat; // largest delta with |f|<=delta => |g|<=eps;
                                   // +inf sentinel when no sample violates eps
    Verdict verdict = Verdict::DominatedConsistent;
    std::optional<std::size_t> witness_index; // sample violating some eps at f == 0
    double witness_g = 0.0;
    double witness_f = 0.0;
    std::size_t sample_size = 0;
    std::string g_name;
    std::string f_name;

    bool dominated() const { return verdict == Verdict::DominatedConsistent; }
};

// Empirical domination g ≺ f over sampled phase-space pairs.
DominationReport check_domination(const SystemPtr& system, const Pseudometric& g,
                                  const Pseudometric& f,
                                  const std::vector<double>& eps_grid,
                                  std::size_t n_pairs, std::uint64_t seed);

// Empirical domination between two profiles on the same group grid.
class Profile; // profile.hpp
DominationReport check_domination(const Profile& g, const Profile& f,
                                  const std::vector<double>& eps_grid);

} // namespace apspec
