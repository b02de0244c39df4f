#include "apspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "apspec/common.hpp"

namespace apspec {

namespace {

cplx value_extended(const Profile& p, long long idx) {
    if (idx >= p.grid.lo && idx <= p.grid.hi) return p.at_index(idx);
    if (-idx >= p.grid.lo && -idx <= p.grid.hi) {
        cplx v = p.at_index(-idx);
        return p.real_valued ? v : std::conj(v);
    }
    throw WindowTooSmall("profile does not cover the requested window");
}

// Centered autocorrelation bundle over one shared sample: S_g with
// g = f - mean f, plus the raw S_f(0) and the empirical mean.
struct CenteredAutocorrelation {
    Profile s;      // S_g
    cplx mean{0.0, 0.0};
    double s0_raw = 0.0;
};

CenteredAutocorrelation centered_autocorrelation(const SystemPtr& system,
                                                 const Observable& f,
                                                 const GroupGrid& grid,
                                                 const ProfileOptions& opts) {
    CenteredAutocorrelation out;
    if (opts.prefer_exact && grid.kind == GroupKind::Integer) {
        auto exact = system->exact_autocorrelation(f.name, std::max(grid.hi, -grid.lo));
        if (exact) {
            // Catalog exact routes are provided for mean-zero observables.
            out.s = autocorrelation_profile(system, f, grid, opts);
            out.mean = cplx(0.0, 0.0);
            out.s0_raw = out.s.at_index(0).real();
            return out;
        }
    }

    auto pts = system->sample(opts.seed, opts.samples);
    if (pts.empty()) throw SampleFailure("empty sample");
    const std::size_t n = pts.size();
    std::vector<cplx> fx(n);
    cplx mean(0.0, 0.0);
    double s0_raw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        fx[i] = f(pts[i]);
        mean += fx[i];
        s0_raw += std::norm(fx[i]);
    }
    mean /= static_cast<double>(n);
    s0_raw /= static_cast<double>(n);

    if (!system->invertible() && grid.lo < 0)
        throw GroupMismatch("negative times on a forward semigroup; use a [0,T] grid");

    Profile p;
    p.grid = grid;
    p.values.assign(grid.size(), cplx(0.0, 0.0));
    p.se.assign(grid.size(), 0.0);
    p.method = opts.method;
    p.sample_size = n;
    p.seed = opts.seed;
    p.real_valued = false;
    p.label = "Sc." + f.name;

    bool mirror = opts.symmetric_extension && grid.symmetric() && grid.hi > 0;
    p.symmetrized = mirror;
    long long start = mirror ? 0 : grid.lo;
    for (long long idx = start; idx <= grid.hi; ++idx) {
        GroupElement t = system->group_element(idx);
        cplx acc(0.0, 0.0);
        double accsq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx gy = f(system->act(t, pts[i])) - mean;
            cplx z = std::conj(fx[i] - mean) * gy;
            acc += z;
            accsq += std::norm(z);
        }
        cplx m = acc / static_cast<double>(n);
        std::size_t pos = grid.pos_of(idx);
        p.values[pos] = m;
        double var = std::max(0.0, accsq / static_cast<double>(n) - std::norm(m));
        p.se[pos] = std::sqrt(var / static_cast<double>(n));
    }
    if (mirror) {
        for (long long i = 1; i <= grid.hi; ++i) {
            p.values[grid.pos_of(-i)] = std::conj(p.at_index(i));
            p.se[grid.pos_of(-i)] = p.se_at_index(i);
        }
    }
    out.s = std::move(p);
    out.mean = mean;
    out.s0_raw = s0_raw;
    return out;
}

} // namespace

std::string to_string(SpectralClass c) {
    switch (c) {
        case SpectralClass::PurePointConsistent: return "PURE_POINT_CONSISTENT";
        case SpectralClass::ContinuousConsistent: return "CONTINUOUS_CONSISTENT";
        case SpectralClass::Mixed: return "MIXED";
        default: return "INCONCLUSIVE";
    }
}

std::vector<long long> default_wiener_windows(long long n_max) {
    std::vector<long long> Ns;
    for (long long n = 1; n < n_max; n *= 2) Ns.push_back(n);
    // Dense coverage of the last decade for the extrapolation average.
    for (int j = 1; j <= 10; ++j) {
        long long n = n_max / 10 * j;
        if (n >= 1) Ns.push_back(n);
    }
    Ns.push_back(n_max);
    std::sort(Ns.begin(), Ns.end());
    Ns.erase(std::unique(Ns.begin(), Ns.end()), Ns.end());
    return Ns;
}

WienerCurve wiener_atom_mass(const Profile& s_profile, const std::vector<long long>& Ns) {
    if (Ns.empty()) throw InvalidParameter("no Wiener windows given");
    std::vector<long long> sorted = Ns;
    std::sort(sorted.begin(), sorted.end());
    long long n_max = sorted.back();
    value_extended(s_profile, n_max); // window check
    value_extended(s_profile, -n_max);

    WienerCurve out;
    out.Ns = sorted;
    double cum = std::norm(value_extended(s_profile, 0));
    long long n = 0;
    for (long long target : sorted) {
        while (n < target) {
            ++n;
            cum += std::norm(value_extended(s_profile, n)) +
                   std::norm(value_extended(s_profile, -n));
        }
        out.M.push_back(cum / static_cast<double>(2 * n + 1));
    }
    double acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] * 10 >= n_max) {
            acc += out.M[i];
            ++cnt;
        }
    }
    out.extrapolated = cnt > 0 ? acc / static_cast<double>(cnt) : out.M.back();
    return out;
}

nlohmann::json WienerCurve::to_json() const {
    return nlohmann::json{{"N", Ns}, {"M", M}, {"extrapolated", extrapolated}};
}

std::vector<Atom> extract_atoms(const Profile& s_profile, long long n_window,
                                double theta_frac) {
    FourierBohrOptions fopts;
    fopts.theta_frac = theta_frac;
    FrequencySet fs = fourier_bohr_coefficients(s_profile, n_window, fopts);
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < fs.freqs.size(); ++i)
        atoms.push_back(Atom{fs.freqs[i], fs.magnitudes[i]});
    return atoms;
}

SpectralClass classify_spectrum(double s0, double m_ext, double deep_mass,
                                double deep_mass_sq, bool atoms_at_theta,
                                const SpectralOptions& opts) {
    if (s0 <= 0.0) return SpectralClass::Inconclusive;
    if (!atoms_at_theta) {
        if (m_ext <= std::max(opts.continuous_wiener_frac * s0 * s0, 1e-12))
            return SpectralClass::ContinuousConsistent;
        return SpectralClass::Inconclusive;
    }
    double mass_remainder = std::max(0.0, s0 - deep_mass);
    (void)deep_mass_sq;
    if (mass_remainder <= opts.mixed_mass_frac * s0)
        return SpectralClass::PurePointConsistent;
    return SpectralClass::Mixed;
}

SpectralEstimate estimate_spectral_measure(const SystemPtr& system, const Observable& f,
                                           const SpectralOptions& opts) {
    GroupGrid grid = system->invertible() || system->group_kind() == GroupKind::RealSampled
                         ? GroupGrid::integers_symmetric(opts.n_window)
                         : GroupGrid::integers(0, opts.n_window);
    if (system->group_kind() == GroupKind::RealSampled)
        grid = GroupGrid::reals(-opts.n_window, opts.n_window, system->grid_step());

    ProfileOptions popts;
    popts.samples = opts.samples;
    popts.seed = opts.seed;
    popts.prefer_exact = opts.prefer_exact;

    CenteredAutocorrelation ca = centered_autocorrelation(system, f, grid, popts);

    SpectralEstimate est;
    est.observable = f.name;
    est.mean_f = ca.mean;
    est.s0_raw = ca.s0_raw;
    est.s0 = ca.s.at_index(0).real();
    est.wiener = wiener_atom_mass(ca.s, default_wiener_windows(opts.n_window));
    est.atoms = extract_atoms(ca.s, opts.n_window, opts.theta_frac);
    for (const auto& a : est.atoms) est.atom_mass_sum += a.mass;

    // Deep scan at theta/8: separates an undetected pure-point tail from a
    // genuine continuous component in the mass accounting.
    std::vector<Atom> deep = extract_atoms(ca.s, opts.n_window, opts.theta_frac / 8.0);
    double deep_mass = 0.0, deep_mass_sq = 0.0;
    for (const auto& a : deep) {
        deep_mass += a.mass;
        deep_mass_sq += a.mass * a.mass;
    }
    est.mass_remainder = std::max(0.0, est.s0 - deep_mass);
    double m_ext = est.wiener.extrapolated;
    est.wiener_residual =
        m_ext > 0.0 ? std::max(0.0, m_ext - deep_mass_sq) / m_ext : 0.0;
    est.cls = classify_spectrum(est.s0, m_ext, deep_mass, deep_mass_sq,
                                !est.atoms.empty(), opts);
    return est;
}

nlohmann::json SpectralEstimate::to_json() const {
    nlohmann::json atoms_j = nlohmann::json::array();
    for (const auto& a : atoms) atoms_j.push_back({{"freq", a.freq}, {"mass", a.mass}});
    return nlohmann::json{{"observable", observable},
                          {"mean_re", mean_f.real()},
                          {"mean_im", mean_f.imag()},
                          {"s0_raw", s0_raw},
                          {"s0", s0},
                          {"wiener", wiener.to_json()},
                          {"atoms", atoms_j},
                          {"atom_mass_sum", atom_mass_sum},
                          {"mass_remainder", mass_remainder},
                          {"wiener_residual", wiener_residual},
                          {"class", apspec::to_string(cls)}};
}

EigenvalueGroupEstimate close_group(std::vector<double> generators, double resolution,
                                    GroupKind kind, std::size_t cap) {
    EigenvalueGroupEstimate g;
    g.generators = generators;
    g.resolution = resolution;
    g.cap = cap;

    auto canon = [&](double x) {
        if (kind == GroupKind::Integer) {
            x -= std::floor(x);
            if (x > 1.0 - resolution) x = 0.0; // wrap-around dedup
        }
        return x;
    };
    auto close_to = [&](const std::vector<double>& xs, double v) {
        for (double x : xs) {
            double diff = std::abs(x - v);
            if (kind == GroupKind::Integer) diff = std::min(diff, 1.0 - diff);
            if (diff < resolution) return true;
        }
        return false;
    };

    double band = 0.0;
    for (double gen : generators) band = std::max(band, std::abs(gen));
    band = kind == GroupKind::Integer ? 1.0 : 16.0 * std::max(band, resolution);

    g.elements.push_back(0.0);
    // Negation closure is kept structurally: elements enter as {v, -v} pairs.
    auto negate = [&](double v) {
        if (kind == GroupKind::Integer) return v == 0.0 ? 0.0 : canon(1.0 - v);
        return -v;
    };
    bool grew = true;
    bool room = true;
    while (grew && room) {
        grew = false;
        for (double gen : generators) {
            std::vector<double> snapshot = g.elements;
            for (double x : snapshot) {
                double v = canon(x + gen);
                if (std::abs(v) > band + resolution) continue;
                if (close_to(g.elements, v)) continue;
                double nv = negate(v);
                bool pair = !close_to(g.elements, nv) &&
                            std::abs(nv - v) >= resolution;
                if (g.elements.size() + (pair ? 2 : 1) > cap) {
                    room = false;
                    break;
                }
                g.elements.push_back(v);
                if (pair) g.elements.push_back(nv);
                grew = true;
            }
            if (!room) break;
        }
    }
    std::sort(g.elements.begin(), g.elements.end());
    return g;
}

nlohmann::json EigenvalueGroupEstimate::to_json() const {
    return nlohmann::json{
        {"source", source == Source::FromDUnderline ? "FROM_D_UNDERLINE" : "FROM_OBSERVABLES"},
        {"generators", generators},
        {"elements", elements},
        {"resolution", resolution},
        {"cap", cap}};
}

SystemVerdict discrete_spectrum_verdict(const SystemPtr& system,
                                        const VerdictOptions& opts) {
    SystemVerdict v;
    v.system = system->name();

    GroupGrid grid;
    if (system->group_kind() == GroupKind::Integer) {
        long long T = static_cast<long long>(opts.grid_extent);
        grid = system->invertible() ? GroupGrid::integers_symmetric(T)
                                    : GroupGrid::integers(0, T);
    } else {
        grid = GroupGrid::reals_symmetric(opts.grid_extent, system->grid_step());
    }

    ProfileOptions popts;
    popts.samples = opts.samples;
    popts.seed = opts.seed;

    Pseudometric d = metric_pseudometric(system);
    v.d_profile = average_pseudometric(system, d, grid, popts);

    std::vector<double> windows =
        opts.windows.empty() ? default_windows(system->group_kind()) : opts.windows;
    std::vector<double> eps = opts.eps_fractions.empty()
                                  ? default_eps_grid(v.d_profile)
                                  : [&] {
                                        std::vector<double> e;
                                        double s = v.d_profile.max_abs();
                                        for (double f : opts.eps_fractions)
                                            e.push_back(f * (s > 0 ? s : 1.0));
                                        return e;
                                    }();
    v.d_scan = scan_almost_periods(v.d_profile, eps, windows);
    v.ap = v.d_scan.verdict;
    v.witness_eps = v.d_scan.witness_eps;
    switch (v.ap) {
        case ApVerdict::ApConsistent: v.label = "DISCRETE_CONSISTENT"; break;
        case ApVerdict::NotAp: v.label = "NOT_DISCRETE"; break;
        default: v.label = "INCONCLUSIVE"; break;
    }

    if (v.ap == ApVerdict::ApConsistent) {
        // Degenerate zero profile (one-point system): group is {0}.
        if (v.d_profile.max_abs() <= 1e-12) {
            EigenvalueGroupEstimate g;
            g.resolution = 1.0 / (2.0 * opts.grid_extent);
            g.elements = {0.0};
            v.group = g;
        } else {
            long long N = grid.hi;
            FourierBohrOptions fopts;
            FrequencySet fs = fourier_bohr_coefficients(v.d_profile, N, fopts);
            std::vector<double> gens;
            for (double b : fs.freqs) {
                double dist = system->group_kind() == GroupKind::Integer
                                  ? std::min(b, 1.0 - b)
                                  : std::abs(b);
                if (dist > fs.resolution) gens.push_back(b);
            }
            v.group = close_group(gens, fs.resolution, system->group_kind());
        }
    }

    if (opts.with_corroboration) {
        std::vector<std::string> names{system->central_observable_name()};
        for (const auto& obs : system->observables())
            if (obs.name == "pairmatch") names.push_back(obs.name);
        SpectralOptions sopts = opts.spectral;
        sopts.seed = opts.seed;
        for (const auto& nm : names)
            v.corroboration.push_back(
                estimate_spectral_measure(system, system->observable(nm), sopts));

        bool any_pp = false, any_cont = false, any_mixed = false, any_inc = false;
        for (const auto& est : v.corroboration) {
            any_pp |= est.cls == SpectralClass::PurePointConsistent;
            any_cont |= est.cls == SpectralClass::ContinuousConsistent;
            any_mixed |= est.cls == SpectralClass::Mixed;
            any_inc |= est.cls == SpectralClass::Inconclusive;
        }
        if (any_mixed || (any_pp && any_cont))
            v.aggregate_class = SpectralClass::Mixed;
        else if (any_pp && !any_cont && !any_inc)
            v.aggregate_class = SpectralClass::PurePointConsistent;
        else if (any_cont && !any_pp && !any_inc)
            v.aggregate_class = SpectralClass::ContinuousConsistent;
        else
            v.aggregate_class = SpectralClass::Inconclusive;
    }
    return v;
}

nlohmann::json SystemVerdict::to_json() const {
    nlohmann::json j{{"system", system},
                     {"ap", apspec::to_string(ap)},
                     {"label", label},
                     {"d_scan", d_scan.to_json()},
                     {"aggregate_class", apspec::to_string(aggregate_class)}};
    if (witness_eps) j["witness_eps"] = *witness_eps;
    if (group) j["eigenvalue_group"] = group->to_json();
    nlohmann::json cj = nlohmann::json::array();
    for (const auto& est : corroboration) cj.push_back(est.to_json());
    j["corroboration"] = cj;
    return j;
}

EquivalenceMatrix cross_equivalence_suite(const SystemPtr& system,
                                          const WeightedFamily& family,
                                          const EquivalenceOptions& opts) {
    family.validate();
    EquivalenceMatrix mat;
    mat.system = system->name();
    mat.canonical = system->central_observable_name();

    Pseudometric e_fam = weighted_pseudometric(family);
    SeparationCheck sep =
        check_separation(system, e_fam, opts.delta_sep, 2000, opts.seed);
    mat.family_separates = sep.separates;
    if (!sep.separates)
        mat.warnings.push_back("NonSeparatingFamily: family failed the empirical "
                               "separation check; matrix still produced");

    GroupGrid grid;
    if (system->group_kind() == GroupKind::Integer) {
        long long T = static_cast<long long>(opts.grid_extent);
        grid = system->invertible() ? GroupGrid::integers_symmetric(T)
                                    : GroupGrid::integers(0, T);
    } else {
        grid = GroupGrid::reals_symmetric(opts.grid_extent, system->grid_step());
    }

    // One fused pass: d plus every family member, all on one shared sample.
    auto pts = system->sample(opts.seed, opts.samples);
    if (pts.empty()) throw SampleFailure("empty sample");
    const std::size_t n = pts.size();
    const std::size_t m = family.members.size();

    std::vector<std::vector<cplx>> fx(m, std::vector<cplx>(n));
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < n; ++i) fx[k][i] = family.members[k](pts[i]);

    bool mirror = grid.symmetric() && grid.hi > 0;
    long long start = mirror ? 0 : grid.lo;
    std::size_t cols = grid.size();

    auto blank = [&](std::string label, bool real) {
        Profile p;
        p.grid = grid;
        p.values.assign(cols, cplx(0.0, 0.0));
        p.se.assign(cols, 0.0);
        p.method = ProfileMethod::MonteCarlo;
        p.sample_size = n;
        p.seed = opts.seed;
        p.real_valued = real;
        p.symmetrized = mirror;
        p.label = std::move(label);
        return p;
    };

    Profile d_prof = blank("avg.d", true);
    std::vector<Profile> e_prof, f_prof;
    std::vector<Profile> s_prof;
    for (std::size_t k = 0; k < m; ++k) {
        const std::string& nm = family.members[k].name;
        e_prof.push_back(blank("eavg." + nm, true));
        f_prof.push_back(blank("F." + nm, true));
        s_prof.push_back(blank("S." + nm, false));
    }

    const double dn = static_cast<double>(n);
    for (long long idx = start; idx <= grid.hi; ++idx) {
        GroupElement t = system->group_element(idx);
        double dsum = 0.0, dsumsq = 0.0;
        std::vector<double> ad(m, 0.0), adsq(m, 0.0), d2(m, 0.0), d2sq(m, 0.0);
        std::vector<cplx> corr(m, cplx(0.0, 0.0));
        std::vector<double> corrsq(m, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            SystemPoint y = system->act(t, pts[i]);
            double dv = system->metric(pts[i], y);
            dsum += dv;
            dsumsq += dv * dv;
            for (std::size_t k = 0; k < m; ++k) {
                cplx fy = family.members[k](y);
                double dd2 = std::norm(fx[k][i] - fy);
                double add = std::sqrt(dd2);
                ad[k] += add;
                adsq[k] += dd2;
                d2[k] += dd2;
                d2sq[k] += dd2 * dd2;
                cplx z = std::conj(fx[k][i]) * fy;
                corr[k] += z;
                corrsq[k] += std::norm(z);
            }
        }
        std::size_t pos = grid.pos_of(idx);
        auto sdm = [&](double sum, double sumsq) {
            double mean = sum / dn;
            double var = std::max(0.0, sumsq / dn - mean * mean);
            return std::sqrt(var / dn);
        };
        d_prof.values[pos] = cplx(dsum / dn, 0.0);
        d_prof.se[pos] = sdm(dsum, dsumsq);
        for (std::size_t k = 0; k < m; ++k) {
            e_prof[k].values[pos] = cplx(ad[k] / dn, 0.0);
            e_prof[k].se[pos] = sdm(ad[k], adsq[k]);
            double fv = std::sqrt(d2[k] / dn);
            f_prof[k].values[pos] = cplx(fv, 0.0);
            f_prof[k].se[pos] = fv > 0 ? sdm(d2[k], d2sq[k]) / (2.0 * fv) : 0.0;
            cplx sm = corr[k] / dn;
            s_prof[k].values[pos] = sm;
            double var = std::max(0.0, corrsq[k] / dn - std::norm(sm));
            s_prof[k].se[pos] = std::sqrt(var / dn);
        }
    }
    if (mirror) {
        auto reflect = [&](Profile& p, bool conj) {
            for (long long i = 1; i <= grid.hi; ++i) {
                cplx v = p.at_index(i);
                p.values[grid.pos_of(-i)] = conj ? std::conj(v) : v;
                p.se[grid.pos_of(-i)] = p.se_at_index(i);
            }
        };
        reflect(d_prof, false);
        for (std::size_t k = 0; k < m; ++k) {
            reflect(e_prof[k], false);
            reflect(f_prof[k], false);
            reflect(s_prof[k], true);
        }
    }

    // Family aggregates are weighted sums of the member profiles (both are
    // defined as sums, so this is exact, not an approximation).
    Profile efam = blank("eavg.family", true);
    Profile ffam = blank("Fsum.family", true);
    for (std::size_t pos = 0; pos < cols; ++pos) {
        double ev = 0.0, ese = 0.0, fv = 0.0, fse = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            ev += family.weights[k] * e_prof[k].values[pos].real();
            ese += family.weights[k] * e_prof[k].se[pos];
            fv += family.weights[k] * f_prof[k].values[pos].real();
            fse += family.weights[k] * f_prof[k].se[pos];
        }
        efam.values[pos] = cplx(ev, 0.0);
        efam.se[pos] = ese;
        ffam.values[pos] = cplx(fv, 0.0);
        ffam.se[pos] = fse;
    }

    std::vector<double> windows =
        opts.windows.empty() ? default_windows(system->group_kind()) : opts.windows;
    auto eps_for = [&](const Profile& p) {
        if (opts.eps_fractions.empty()) return default_eps_grid(p);
        std::vector<double> e;
        double s = p.max_abs();
        for (double f : opts.eps_fractions) e.push_back(f * (s > 0 ? s : 1.0));
        return e;
    };
    auto verdict_of = [&](const Profile& p) {
        return scan_almost_periods(p, eps_for(p), windows).verdict;
    };

    mat.d_avg = verdict_of(d_prof);
    mat.family_e_avg = verdict_of(efam);
    mat.family_displacement = verdict_of(ffam);
    mat.all_members_agree = true;
    auto opposite = [](ApVerdict a, ApVerdict b) {
        return (a == ApVerdict::ApConsistent && b == ApVerdict::NotAp) ||
               (a == ApVerdict::NotAp && b == ApVerdict::ApConsistent);
    };
    for (std::size_t k = 0; k < m; ++k) {
        EquivalenceMatrix::MemberRow row;
        row.observable = family.members[k].name;
        row.e_avg = verdict_of(e_prof[k]);
        row.displacement = verdict_of(f_prof[k]);
        Profile inst = translation_instability(s_prof[k]);
        row.autocorrelation = verdict_of(inst);
        if (row.e_avg != mat.d_avg || row.displacement != mat.d_avg ||
            row.autocorrelation != mat.d_avg)
            mat.all_members_agree = false;
        if (opposite(row.e_avg, mat.d_avg) || opposite(row.displacement, mat.d_avg) ||
            opposite(row.autocorrelation, mat.d_avg))
            mat.contradiction = true;
        mat.members.push_back(std::move(row));
    }

    // Canonical agreement across the six lemma items, evaluated on the
    // central observable (falls back to the first member).
    const EquivalenceMatrix::MemberRow* canonical_row = nullptr;
    for (const auto& r : mat.members)
        if (r.observable == mat.canonical) canonical_row = &r;
    if (!canonical_row && !mat.members.empty()) {
        canonical_row = &mat.members.front();
        mat.canonical = mat.members.front().observable;
    }
    if (canonical_row) {
        mat.canonical_agreement = mat.d_avg == mat.family_e_avg &&
                                  mat.d_avg == mat.family_displacement &&
                                  mat.d_avg == canonical_row->e_avg &&
                                  mat.d_avg == canonical_row->displacement &&
                                  mat.d_avg == canonical_row->autocorrelation;
    }
    return mat;
}

nlohmann::json EquivalenceMatrix::to_json() const {
    nlohmann::json members_j = nlohmann::json::array();
    for (const auto& r : members) {
        members_j.push_back({{"observable", r.observable},
                             {"e_avg", apspec::to_string(r.e_avg)},
                             {"displacement", apspec::to_string(r.displacement)},
                             {"autocorrelation", apspec::to_string(r.autocorrelation)}});
    }
    return nlohmann::json{{"system", system},
                          {"d_avg", apspec::to_string(d_avg)},
                          {"family_e_avg", apspec::to_string(family_e_avg)},
                          {"family_displacement", apspec::to_string(family_displacement)},
                          {"members", members_j},
                          {"canonical", canonical},
                          {"family_separates", family_separates},
                          {"canonical_agreement", canonical_agreement},
                          {"all_members_agree", all_members_agree},
                          {"contradiction", contradiction},
                          {"warnings", warnings}};
}

cplx TestSeq::fourier(double beta, double h) const {
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < vals.size(); ++i) {
        double t = static_cast<double>(lo + static_cast<long long>(i)) * h;
        acc += vals[i] * std::polar(1.0, -kTwoPi * beta * t);
    }
    return acc * h;
}

double TestSeq::l1(double h) const {
    double s = 0.0;
    for (const auto& v : vals) s += std::abs(v);
    return s * h;
}

NfResult nf_consistency(const Profile& s_profile, const SpectralEstimate& est,
                        const TestSeq& phi, const TestSeq& psi, double stat_tol) {
    NfResult out;
    const double h =
        s_profile.grid.kind == GroupKind::Integer ? 1.0 : s_profile.grid.step;
    out.riemann_flag = s_profile.grid.kind == GroupKind::RealSampled;

    // <N^f(phi), N^f(psi)> = sum_{a,b} conj(phi(a)) psi(b) S(a-b)
    // (substituting s=-a, t=-b in the defining double integral).
    for (std::size_t i = 0; i < phi.vals.size(); ++i) {
        for (std::size_t j = 0; j < psi.vals.size(); ++j) {
            long long a = phi.lo + static_cast<long long>(i);
            long long b = psi.lo + static_cast<long long>(j);
            out.lhs += std::conj(phi.vals[i]) * psi.vals[j] * value_extended(s_profile, a - b);
        }
    }
    out.lhs *= h * h;

    for (const auto& atom : est.atoms)
        out.rhs += atom.mass * std::conj(phi.fourier(atom.freq, h)) *
                   psi.fourier(atom.freq, h);

    out.residual = std::abs(out.lhs - out.rhs);
    out.bound = est.mass_remainder * phi.l1(h) * psi.l1(h) + stat_tol;
    return out;
}

} // namespace apspec
