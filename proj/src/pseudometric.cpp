#include "apspec/pseudometric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "apspec/profile.hpp"
#include "apspec/rng.hpp"

namespace apspec {

namespace {

// Paired draws (x_i, y_i) from two independent sampler streams.
std::pair<std::vector<SystemPoint>, std::vector<SystemPoint>> sample_pairs(
    const SystemPtr& system, std::size_t n_pairs, std::uint64_t seed) {
    auto xs = system->sample(derive_seed(seed, 11), n_pairs);
    auto ys = system->sample(derive_seed(seed, 23), n_pairs);
    return {std::move(xs), std::move(ys)};
}

DominationReport domination_from_values(const std::vector<double>& gv,
                                        const std::vector<double>& fv,
                                        const std::vector<double>& eps_grid,
                                        std::string g_name, std::string f_name) {
    DominationReport rep;
    rep.eps = eps_grid;
    rep.sample_size = gv.size();
    rep.g_name = std::move(g_name);
    rep.f_name = std::move(f_name);
    const double inf = std::numeric_limits<double>::infinity();
    for (double eps : eps_grid) {
        double dh = inf;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < gv.size(); ++i) {
            if (gv[i] > eps && fv[i] < dh) {
                dh = fv[i];
                worst = i;
            }
        }
        rep.delta_hat.push_back(dh);
        if (dh == 0.0 && rep.verdict == DominationReport::Verdict::DominatedConsistent) {
            rep.verdict = DominationReport::Verdict::NotDominated;
            rep.witness_index = worst;
            rep.witness_g = gv[worst];
            rep.witness_f = fv[worst];
        }
    }
    return rep;
}

} // namespace

Pseudometric metric_pseudometric(const SystemPtr& system) {
    // sup bound from a fixed-seed pair sample; analytic bounds are not
    // available for every catalog metric.
    auto [xs, ys] = sample_pairs(system, 512, 0xD157);
    double bound = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        bound = std::max(bound, system->metric(xs[i], ys[i]));
    auto sys = system;
    return Pseudometric{
        "d." + system->name(),
        [sys](const SystemPoint& x, const SystemPoint& y) { return sys->metric(x, y); },
        bound};
}

Pseudometric pseudometric_from_observable(const Observable& f) {
    auto ev = f.eval;
    return Pseudometric{
        "e_" + f.name,
        [ev](const SystemPoint& x, const SystemPoint& y) { return std::abs(ev(x) - ev(y)); },
        2.0 * f.sup_norm};
}

void WeightedFamily::validate() const {
    if (members.empty()) throw EmptyFamily("weighted family has no members");
    if (members.size() != weights.size())
        throw InvalidParameter("weights/members size mismatch");
    for (double w : weights)
        if (!(w > 0.0)) throw InvalidParameter("family weights must be positive");
    if (tail_fraction() >= 1e-6)
        throw InvalidParameter("family truncation tail exceeds 1e-6 of the total");
}

double WeightedFamily::total_weight_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i)
        s += weights[i] * members[i].sup_norm;
    return s;
}

double WeightedFamily::tail_fraction() const {
    double total = total_weight_norm() + tail_bound;
    return total > 0.0 ? tail_bound / total : 0.0;
}

WeightedFamily default_weighted_family(const DynamicalSystem& system) {
    WeightedFamily fam;
    for (const auto& [name, weight] : system.family_spec()) {
        fam.members.push_back(system.observable(name));
        fam.weights.push_back(weight);
    }
    fam.tail_bound = system.family_tail_bound();
    fam.validate();
    return fam;
}

Pseudometric weighted_pseudometric(const WeightedFamily& family) {
    family.validate();
    double sup = 0.0;
    for (std::size_t i = 0; i < family.members.size(); ++i)
        sup += family.weights[i] * 2.0 * family.members[i].sup_norm;
    auto members = family.members;
    auto weights = family.weights;
    return Pseudometric{
        "e_family",
        [members, weights](const SystemPoint& x, const SystemPoint& y) {
            double s = 0.0;
            for (std::size_t i = 0; i < members.size(); ++i)
                s += weights[i] * std::abs(members[i].eval(x) - members[i].eval(y));
            return s;
        },
        sup};
}

SeparationCheck check_separation(const SystemPtr& system, const Pseudometric& e,
                                 double delta_sep, std::size_t n_pairs,
                                 std::uint64_t seed) {
    auto [xs, ys] = sample_pairs(system, n_pairs, seed);
    SeparationCheck chk;
    chk.delta_sep = delta_sep;
    chk.pairs = n_pairs;
    chk.min_eval_on_separated = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_pairs; ++i) {
        if (system->metric(xs[i], ys[i]) <= delta_sep) continue;
        ++chk.separated_pairs;
        chk.min_eval_on_separated = std::min(chk.min_eval_on_separated, e(xs[i], ys[i]));
    }
    if (chk.separated_pairs == 0) {
        chk.min_eval_on_separated = 0.0;
        chk.separates = true; // nothing to separate (e.g. one-point space)
        return chk;
    }
    chk.separates = chk.min_eval_on_separated > 0.0;
    return chk;
}

DominationReport check_domination(const SystemPtr& system, const Pseudometric& g,
                                  const Pseudometric& f,
                                  const std::vector<double>& eps_grid,
                                  std::size_t n_pairs, std::uint64_t seed) {
    if (eps_grid.empty()) throw InvalidParameter("empty eps grid");
    auto [xs, ys] = sample_pairs(system, n_pairs, seed);
    std::vector<double> gv(n_pairs), fv(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        gv[i] = std::abs(g(xs[i], ys[i]));
        fv[i] = std::abs(f(xs[i], ys[i]));
    }
    return domination_from_values(gv, fv, eps_grid, g.name, f.name);
}

DominationReport check_domination(const Profile& g, const Profile& f,
                                  const std::vector<double>& eps_grid) {
    if (eps_grid.empty()) throw InvalidParameter("empty eps grid");
    if (!g.grid.same_layout(f.grid))
        throw DomainMismatch("profiles live on different grids");
    std::vector<double> gv(g.size()), fv(f.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        gv[i] = std::abs(g.values[i]);
        fv[i] = std::abs(f.values[i]);
    }
    return domination_from_values(gv, fv, eps_grid, g.label, f.label);
}

} // namespace apspec
