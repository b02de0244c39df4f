#include "apspec/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

namespace apspec {

namespace {

struct SampleSet {
    std::vector<SystemPoint> pts;
    ProfileMethod method;
    std::uint64_t seed;
};

SampleSet draw_sample(const SystemPtr& system, const ProfileOptions& opts) {
    SampleSet s;
    s.method = opts.method;
    s.seed = opts.seed;
    switch (opts.method) {
        case ProfileMethod::MonteCarlo:
            s.pts = system->sample(opts.seed, opts.samples);
            break;
        case ProfileMethod::Quadrature:
            s.pts = system->quadrature_nodes(opts.samples);
            if (s.pts.empty())
                throw InvalidParameter("quadrature nodes unavailable for " +
                                       system->name());
            break;
        case ProfileMethod::Birkhoff: {
            // Time average along one orbit; appropriate for the uniquely
            // ergodic catalog members.
            auto x0 = system->sample(opts.seed, 1).at(0);
            s.pts.reserve(opts.samples);
            for (std::size_t j = 0; j < opts.samples; ++j)
                s.pts.push_back(system->act(system->group_element(static_cast<long long>(j)), x0));
            break;
        }
        case ProfileMethod::ExactRecursion:
            throw InvalidParameter("exact recursion is not a sampling method");
    }
    if (s.pts.empty()) throw SampleFailure("empty sample");
    return s;
}

// Times to evaluate directly, and whether the rest of the grid is filled by
// the symmetry extension.
struct EvalPlan {
    std::vector<long long> idxs; // grid indices evaluated directly
    bool mirrored = false;
};

EvalPlan make_plan(const SystemPtr& system, const GroupGrid& grid,
                   const ProfileOptions& opts) {
    if (grid.kind != system->group_kind())
        throw GroupMismatch("grid group kind does not match the system");
    if (grid.kind == GroupKind::RealSampled &&
        std::abs(grid.step - system->grid_step()) > 1e-12 * grid.step)
        throw GroupMismatch("grid step does not match the system");
    if (!system->invertible() && grid.lo < 0)
        throw GroupMismatch("negative times on a forward semigroup; use a [0,T] grid");

    EvalPlan plan;
    if (opts.symmetric_extension && grid.symmetric() && grid.hi > 0) {
        plan.mirrored = true;
        for (long long i = 0; i <= grid.hi; ++i) plan.idxs.push_back(i);
    } else {
        for (long long i = grid.lo; i <= grid.hi; ++i) plan.idxs.push_back(i);
    }
    return plan;
}

Profile make_profile(const GroupGrid& grid, const SampleSet& s, bool real_valued,
                     bool mirrored, std::string label, double stderr_warn) {
    Profile p;
    p.grid = grid;
    p.values.assign(grid.size(), cplx(0.0, 0.0));
    p.se.assign(grid.size(), 0.0);
    p.method = s.method;
    p.sample_size = s.pts.size();
    p.seed = s.seed;
    p.real_valued = real_valued;
    p.symmetrized = mirrored;
    p.label = std::move(label);
    (void)stderr_warn;
    return p;
}

void finish_profile(Profile& p, const EvalPlan& plan, double stderr_warn) {
    if (plan.mirrored) {
        for (long long i = 1; i <= p.grid.hi; ++i) {
            const cplx v = p.at_index(i);
            p.values[p.grid.pos_of(-i)] = p.real_valued ? v : std::conj(v);
            p.se[p.grid.pos_of(-i)] = p.se_at_index(i);
        }
    }
    if (p.method == ProfileMethod::Quadrature || p.method == ProfileMethod::ExactRecursion)
        return;
    if (p.max_se() > stderr_warn)
        p.warnings.push_back("max stderr exceeds " + std::to_string(stderr_warn));
}

double sd_of_mean(double sum, double sumsq, std::size_t n) {
    if (n < 2) return 0.0;
    double mean = sum / static_cast<double>(n);
    double var = sumsq / static_cast<double>(n) - mean * mean;
    if (var < 0.0) var = 0.0;
    return std::sqrt(var / static_cast<double>(n));
}

} // namespace

std::string to_string(ProfileMethod m) {
    switch (m) {
        case ProfileMethod::MonteCarlo: return "MONTE_CARLO";
        case ProfileMethod::Quadrature: return "QUADRATURE";
        case ProfileMethod::Birkhoff: return "BIRKHOFF";
        case ProfileMethod::ExactRecursion: return "EXACT_RECURSION";
    }
    return "?";
}

double Profile::max_abs() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
}

double Profile::max_se() const {
    double m = 0.0;
    for (double v : se) m = std::max(m, v);
    return m;
}

void Profile::write_csv(std::ostream& os) const {
    os << "t,re,im,stderr\n";
    char buf[128];
    for (std::size_t i = 0; i < size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", grid.value_at(i),
                      values[i].real(), values[i].imag(), se[i]);
        os << buf;
    }
}

nlohmann::json Profile::to_json() const {
    nlohmann::json j;
    j["label"] = label;
    j["grid"] = {{"kind", apspec::to_string(grid.kind)},
                 {"step", grid.step},
                 {"lo", grid.lo},
                 {"hi", grid.hi}};
    j["method"] = apspec::to_string(method);
    j["sample_size"] = sample_size;
    j["seed"] = seed;
    j["real_valued"] = real_valued;
    j["symmetrized"] = symmetrized;
    std::vector<double> re(size()), im(size());
    for (std::size_t i = 0; i < size(); ++i) {
        re[i] = values[i].real();
        im[i] = values[i].imag();
    }
    j["re"] = re;
    j["im"] = im;
    j["stderr"] = se;
    j["warnings"] = warnings;
    return j;
}

Profile average_pseudometric(const SystemPtr& system, const Pseudometric& e,
                             const GroupGrid& grid, const ProfileOptions& opts) {
    SampleSet s = draw_sample(system, opts);
    EvalPlan plan = make_plan(system, grid, opts);
    Profile p = make_profile(grid, s, true, plan.mirrored, "avg." + e.name,
                             opts.stderr_warn);
    const std::size_t n = s.pts.size();
    for (long long idx : plan.idxs) {
        GroupElement t = system->group_element(idx);
        double sum = 0.0, sumsq = 0.0;
        for (const auto& x : s.pts) {
            double v = e(x, system->act(t, x));
            sum += v;
            sumsq += v * v;
        }
        std::size_t pos = grid.pos_of(idx);
        p.values[pos] = cplx(sum / static_cast<double>(n), 0.0);
        p.se[pos] = opts.method == ProfileMethod::Quadrature ? 0.0 : sd_of_mean(sum, sumsq, n);
    }
    finish_profile(p, plan, opts.stderr_warn);
    return p;
}

double two_variable_profile(const SystemPtr& system, const Pseudometric& e,
                            const GroupElement& s, const GroupElement& t,
                            const ProfileOptions& opts) {
    if (s.kind() != system->group_kind() || t.kind() != system->group_kind())
        throw GroupMismatch("group elements do not match the system");
    GroupElement u = s - t;
    if (!system->invertible() && u.index() < 0) u = -u; // e-average is even
    SampleSet smp = draw_sample(system, opts);
    double sum = 0.0;
    for (const auto& x : smp.pts) sum += e(x, system->act(u, x));
    return sum / static_cast<double>(smp.pts.size());
}

ObservableProfiles observable_profiles(const SystemPtr& system, const Observable& f,
                                       const GroupGrid& grid,
                                       const ProfileOptions& opts) {
    SampleSet s = draw_sample(system, opts);
    EvalPlan plan = make_plan(system, grid, opts);
    ObservableProfiles out;
    out.autocorrelation =
        make_profile(grid, s, false, plan.mirrored, "S." + f.name, opts.stderr_warn);
    out.displacement =
        make_profile(grid, s, true, plan.mirrored, "F." + f.name, opts.stderr_warn);
    out.mean_displacement =
        make_profile(grid, s, true, plan.mirrored, "eavg." + f.name, opts.stderr_warn);
    out.norm_term =
        make_profile(grid, s, true, plan.mirrored, "norm." + f.name, opts.stderr_warn);

    const std::size_t n = s.pts.size();
    std::vector<cplx> fx(n);
    double s0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        fx[i] = f(s.pts[i]);
        s0 += std::norm(fx[i]);
    }
    s0 /= static_cast<double>(n);
    out.norm_sq = s0;

    for (long long idx : plan.idxs) {
        GroupElement t = system->group_element(idx);
        cplx corr_sum(0.0, 0.0);
        double corr_sumsq = 0.0;  // sum |conj(f_i) f_i^t|^2
        double ad_sum = 0.0, ad_sumsq = 0.0;   // |diff|
        double d2_sum = 0.0, d2_sumsq = 0.0;   // |diff|^2
        double y2_sum = 0.0, y2_sumsq = 0.0;   // |f_i^t|^2
        for (std::size_t i = 0; i < n; ++i) {
            cplx fy = f(system->act(t, s.pts[i]));
            cplx z = std::conj(fx[i]) * fy;
            corr_sum += z;
            corr_sumsq += std::norm(z);
            double d2 = std::norm(fx[i] - fy);
            double ad = std::sqrt(d2);
            ad_sum += ad;
            ad_sumsq += d2;
            d2_sum += d2;
            d2_sumsq += d2 * d2;
            double y2 = std::norm(fy);
            y2_sum += y2;
            y2_sumsq += y2 * y2;
        }
        std::size_t pos = grid.pos_of(idx);
        const double dn = static_cast<double>(n);
        bool exact = opts.method == ProfileMethod::Quadrature;

        cplx smean = corr_sum / dn;
        out.autocorrelation.values[pos] = smean;
        double svar = corr_sumsq / dn - std::norm(smean);
        out.autocorrelation.se[pos] =
            exact || n < 2 ? 0.0 : std::sqrt(std::max(0.0, svar) / dn);

        double d2mean = d2_sum / dn;
        double fval = std::sqrt(d2mean);
        out.displacement.values[pos] = cplx(fval, 0.0);
        double d2se = sd_of_mean(d2_sum, d2_sumsq, n);
        out.displacement.se[pos] = exact || fval == 0.0 ? 0.0 : d2se / (2.0 * fval);

        out.mean_displacement.values[pos] = cplx(ad_sum / dn, 0.0);
        out.mean_displacement.se[pos] = exact ? 0.0 : sd_of_mean(ad_sum, ad_sumsq, n);

        out.norm_term.values[pos] = cplx(0.5 * (s0 + y2_sum / dn), 0.0);
        out.norm_term.se[pos] = exact ? 0.0 : 0.5 * sd_of_mean(y2_sum, y2_sumsq, n);
    }
    finish_profile(out.autocorrelation, plan, opts.stderr_warn);
    finish_profile(out.displacement, plan, opts.stderr_warn);
    finish_profile(out.mean_displacement, plan, opts.stderr_warn);
    finish_profile(out.norm_term, plan, opts.stderr_warn);
    return out;
}

Profile displacement_profile(const SystemPtr& system, const Observable& f,
                             const GroupGrid& grid, const ProfileOptions& opts) {
    return observable_profiles(system, f, grid, opts).displacement;
}

Profile autocorrelation_profile(const SystemPtr& system, const Observable& f,
                                const GroupGrid& grid, const ProfileOptions& opts) {
    if (opts.prefer_exact && grid.kind == GroupKind::Integer) {
        auto exact = system->exact_autocorrelation(f.name, grid.hi > -grid.lo ? grid.hi : -grid.lo);
        if (exact) {
            Profile p;
            p.grid = grid;
            p.values.assign(grid.size(), cplx(0.0, 0.0));
            p.se.assign(grid.size(), 0.0);
            p.method = ProfileMethod::ExactRecursion;
            p.sample_size = 0;
            p.seed = opts.seed;
            p.symmetrized = grid.symmetric();
            p.label = "S." + f.name;
            bool real = true;
            for (long long i = grid.lo; i <= grid.hi; ++i) {
                cplx v = i >= 0 ? (*exact)[static_cast<std::size_t>(i)]
                                : std::conj((*exact)[static_cast<std::size_t>(-i)]);
                if (v.imag() != 0.0) real = false;
                p.values[grid.pos_of(i)] = v;
            }
            p.real_valued = real;
            return p;
        }
    }
    return observable_profiles(system, f, grid, opts).autocorrelation;
}

Profile summed_displacement(const SystemPtr& system, const WeightedFamily& family,
                            const GroupGrid& grid, const ProfileOptions& opts) {
    family.validate();
    SampleSet s = draw_sample(system, opts);
    EvalPlan plan = make_plan(system, grid, opts);
    Profile p = make_profile(grid, s, true, plan.mirrored, "Fsum.family",
                             opts.stderr_warn);

    const std::size_t n = s.pts.size();
    const std::size_t m = family.members.size();
    // f_n(x_i) for every member, evaluated once.
    std::vector<std::vector<cplx>> fx(m, std::vector<cplx>(n));
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < n; ++i) fx[k][i] = family.members[k](s.pts[i]);

    std::vector<double> d2_sum(m), d2_sumsq(m);
    for (long long idx : plan.idxs) {
        GroupElement t = system->group_element(idx);
        std::fill(d2_sum.begin(), d2_sum.end(), 0.0);
        std::fill(d2_sumsq.begin(), d2_sumsq.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            SystemPoint y = system->act(t, s.pts[i]);
            for (std::size_t k = 0; k < m; ++k) {
                double d2 = std::norm(fx[k][i] - family.members[k](y));
                d2_sum[k] += d2;
                d2_sumsq[k] += d2 * d2;
            }
        }
        double total = 0.0, se_total = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            double fk = std::sqrt(d2_sum[k] / static_cast<double>(n));
            total += family.weights[k] * fk;
            if (fk > 0.0 && opts.method != ProfileMethod::Quadrature)
                se_total += family.weights[k] * sd_of_mean(d2_sum[k], d2_sumsq[k], n) /
                            (2.0 * fk);
        }
        std::size_t pos = grid.pos_of(idx);
        p.values[pos] = cplx(total, 0.0);
        p.se[pos] = se_total;
    }
    finish_profile(p, plan, opts.stderr_warn);
    return p;
}

} // namespace apspec
