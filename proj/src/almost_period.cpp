#include "apspec/almost_period.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "apspec/common.hpp"
#include "apspec/fourier.hpp"

namespace apspec {

namespace {

void require_scannable(const Profile& p) {
    if (!p.real_valued) throw NonRealProfile("almost-period scan needs a real profile");
    double v0 = std::abs(p.at_index(0));
    double tol = std::max(1e-9, 4.0 * p.se_at_index(0));
    if (v0 > tol)
        throw MissingZero("profile does not vanish at t=0 (got " + std::to_string(v0) + ")");
}

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

// Profile accessor with the conjugate extension for one-sided grids.
cplx value_extended(const Profile& p, long long idx) {
    if (idx >= p.grid.lo && idx <= p.grid.hi) return p.at_index(idx);
    if (-idx >= p.grid.lo && -idx <= p.grid.hi) {
        cplx v = p.at_index(-idx);
        return p.real_valued ? v : std::conj(v);
    }
    throw WindowTooSmall("profile does not cover the requested window");
}

} // namespace

std::string to_string(ApVerdict v) {
    switch (v) {
        case ApVerdict::ApConsistent: return "AP_CONSISTENT";
        case ApVerdict::NotAp: return "NOT_AP";
        default: return "INCONCLUSIVE";
    }
}

std::vector<double> default_eps_fractions() { return {0.2, 0.1, 0.05, 0.02}; }

std::vector<double> default_eps_grid(const Profile& p) {
    double scale = p.max_abs();
    if (scale <= 0.0) scale = 1.0;
    std::vector<double> eps;
    for (double f : default_eps_fractions()) eps.push_back(f * scale);
    return eps;
}

std::vector<double> default_windows(GroupKind kind) {
    if (kind == GroupKind::Integer) return {250.0, 500.0, 1000.0, 2000.0};
    return {25.0, 50.0, 100.0, 200.0};
}

AlmostPeriodReport scan_almost_periods(const Profile& profile,
                                       const std::vector<double>& eps_grid,
                                       const std::vector<double>& windows) {
    require_scannable(profile);
    if (eps_grid.empty()) throw InvalidParameter("empty eps grid");
    if (windows.size() < 2) throw InvalidParameter("need at least two nested windows");
    std::vector<double> ws = windows;
    std::sort(ws.begin(), ws.end());
    double grid_span = std::max(std::abs(profile.grid.value_at(0)),
                                std::abs(profile.grid.value_at(profile.size() - 1)));
    if (ws.back() > grid_span + 1e-9)
        throw WindowTooSmall("largest window exceeds the profile grid");

    AlmostPeriodReport rep;
    rep.profile_label = profile.label;

    const double max_se = profile.max_se();
    for (double eps : eps_grid) {
        AlmostPeriodRow row;
        row.eps = eps;
        row.windows = ws;
        for (double T : ws) {
            // Included values within [-T, T] intersected with the grid.
            std::vector<double> vals;
            double lo_v = std::max(-T, profile.grid.value_at(0));
            double hi_v = std::min(T, profile.grid.value_at(profile.size() - 1));
            for (std::size_t i = 0; i < profile.size(); ++i) {
                double t = profile.grid.value_at(i);
                if (t < lo_v - 1e-9 || t > hi_v + 1e-9) continue;
                if (std::abs(profile.values[i]) <= eps) vals.push_back(t);
            }
            double gap;
            if (vals.size() < 2) {
                gap = hi_v - lo_v;
            } else {
                gap = 0.0;
                gap = std::max(gap, vals.front() - lo_v);
                gap = std::max(gap, hi_v - vals.back());
                for (std::size_t i = 1; i < vals.size(); ++i)
                    gap = std::max(gap, vals[i] - vals[i - 1]);
            }
            row.max_gap.push_back(gap);
        }
        // Membership at the largest window; the "absent" test uses a small
        // ball around 0 (continuity pins a cluster there on sampled-R grids).
        double T = ws.back();
        double ball = std::max(0.05 * T, 0.5 * profile.grid.step);
        bool confined = true;
        double min_off = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < profile.size(); ++i) {
            double t = profile.grid.value_at(i);
            if (std::abs(t) > T + 1e-9) continue;
            if (std::abs(profile.values[i]) <= eps) {
                row.period_indices.push_back(profile.grid.index_at(i));
                if (std::abs(t) > ball) confined = false;
            }
            if (std::abs(t) > ball)
                min_off = std::min(min_off, std::abs(profile.values[i]));
        }
        row.min_off_zero = std::isfinite(min_off) ? min_off : 0.0;
        row.beyond_zero = false;
        for (long long idx : row.period_indices)
            if (idx != 0) row.beyond_zero = true;
        std::size_t k = row.max_gap.size();
        row.stable = row.max_gap[k - 1] <= rep.growth_threshold * row.max_gap[k - 2] + 1e-12;
        row.not_ap_witness = confined && row.min_off_zero > 2.0 * eps + 4.0 * max_se;
        rep.rows.push_back(std::move(row));
    }

    bool all_ok = true;
    for (const auto& row : rep.rows) {
        if (row.not_ap_witness && !rep.witness_eps) {
            rep.verdict = ApVerdict::NotAp;
            rep.witness_eps = row.eps;
        }
        if (!(row.stable && row.beyond_zero)) all_ok = false;
    }
    if (!rep.witness_eps)
        rep.verdict = all_ok ? ApVerdict::ApConsistent : ApVerdict::Inconclusive;
    return rep;
}

nlohmann::json AlmostPeriodReport::to_json() const {
    nlohmann::json rows_j = nlohmann::json::array();
    for (const auto& r : rows) {
        rows_j.push_back({{"eps", r.eps},
                          {"windows", r.windows},
                          {"max_gap", r.max_gap},
                          {"n_periods", r.period_indices.size()},
                          {"stable", r.stable},
                          {"beyond_zero", r.beyond_zero},
                          {"min_off_zero", r.min_off_zero},
                          {"not_ap_witness", r.not_ap_witness}});
    }
    nlohmann::json j{{"profile", profile_label},
                     {"growth_threshold", growth_threshold},
                     {"rows", rows_j},
                     {"verdict", apspec::to_string(verdict)}};
    if (witness_eps) j["witness_eps"] = *witness_eps;
    return j;
}

void AlmostPeriodReport::write_period_csv(std::ostream& os, const Profile& profile) const {
    os << "eps,t,absF,included\n";
    char buf[160];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < profile.size(); ++i) {
            double a = std::abs(profile.values[i]);
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d\n", row.eps,
                          profile.grid.value_at(i), a, a <= row.eps ? 1 : 0);
            os << buf;
        }
    }
}

Profile translation_instability(const Profile& h) {
    Profile d;
    d.grid = h.grid;
    d.values.assign(h.size(), cplx(0.0, 0.0));
    d.se.assign(h.size(), 2.0 * h.max_se());
    d.method = h.method;
    d.sample_size = h.sample_size;
    d.seed = h.seed;
    d.real_valued = true;
    d.symmetrized = h.grid.symmetric();
    d.label = "instab." + h.label;

    const long long lo = h.grid.lo, hi = h.grid.hi;
    for (long long tau = 0; tau <= hi; ++tau) {
        double m = 0.0;
        for (long long t = lo; t + tau <= hi; ++t)
            m = std::max(m, std::abs(h.at_index(t + tau) - h.at_index(t)));
        d.values[d.grid.pos_of(tau)] = cplx(m, 0.0);
        if (-tau >= lo) d.values[d.grid.pos_of(-tau)] = cplx(m, 0.0);
    }
    d.se[d.grid.pos_of(0)] = 0.0;
    return d;
}

cplx fourier_bohr_at(const Profile& p, double beta, long long n_window) {
    if (n_window < 1) throw WindowTooSmall("window must be positive");
    cplx acc(0.0, 0.0);
    const double h = p.grid.kind == GroupKind::Integer ? 1.0 : p.grid.step;
    for (long long n = -n_window; n <= n_window; ++n)
        acc += value_extended(p, n) *
               std::polar(1.0, -kTwoPi * beta * static_cast<double>(n) * h);
    return acc / static_cast<double>(2 * n_window + 1);
}

FrequencySet fourier_bohr_coefficients(const Profile& p, long long n_window,
                                       const FourierBohrOptions& opts) {
    if (n_window < 1) throw WindowTooSmall("window must be positive");
    value_extended(p, n_window); // throws WindowTooSmall if not covered
    value_extended(p, -n_window);

    const double h = p.grid.kind == GroupKind::Integer ? 1.0 : p.grid.step;
    const double sup = p.max_abs();
    const double theta = opts.theta_frac * (sup > 0.0 ? sup : 1.0);

    FrequencySet fs;
    fs.window = static_cast<double>(n_window) * h;
    fs.resolution = 1.0 / (2.0 * static_cast<double>(n_window) * h);
    fs.threshold = theta;

    struct Cand {
        double beta;
        double mag;
    };
    std::vector<Cand> cands;

    if (opts.candidates) {
        for (double b : *opts.candidates) {
            double mag = std::abs(fourier_bohr_at(p, b, n_window));
            if (mag >= theta) cands.push_back({b, mag});
        }
    } else {
        // Coarse scan at resolution <= 1/(4N) via a zero-padded FFT, then local
        // refinement of each peak.
        const std::size_t count = static_cast<std::size_t>(2 * n_window + 1);
        const std::size_t m = next_pow2(4 * count);
        std::vector<cplx> buf(m, cplx(0.0, 0.0));
        for (long long n = -n_window; n <= n_window; ++n)
            buf[static_cast<std::size_t>(n + n_window)] = value_extended(p, n);
        std::vector<cplx> spec = fft_forward(buf);
        // c(beta_k) with beta_k = k/(m h); undo the index shift by +N.
        std::vector<double> mag(m);
        for (std::size_t k = 0; k < m; ++k) {
            double phase = kTwoPi * static_cast<double>(k) *
                           static_cast<double>(n_window) / static_cast<double>(m);
            mag[k] = std::abs(spec[k] * std::polar(1.0, phase)) /
                     static_cast<double>(count);
        }
        const bool circular = p.grid.kind == GroupKind::Integer;
        for (std::size_t k = 0; k < m; ++k) {
            double prev = mag[(k + m - 1) % m];
            double next = mag[(k + 1) % m];
            if (!circular && (k == 0 || k + 1 == m)) continue;
            if (mag[k] < theta || mag[k] < prev || mag[k] <= next) continue;
            double beta = static_cast<double>(k) / (static_cast<double>(m) * h);
            if (p.grid.kind == GroupKind::RealSampled && beta > 0.5 / h)
                beta -= 1.0 / h; // fold to (-Nyquist, Nyquist]
            cands.push_back({beta, mag[k]});
        }
        if (opts.refine) {
            const double half = 1.0 / (static_cast<double>(m) * h);
            const double gr = 0.6180339887498949;
            for (auto& c : cands) {
                double a = c.beta - half, b = c.beta + half;
                double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
                double f1 = std::abs(fourier_bohr_at(p, x1, n_window));
                double f2 = std::abs(fourier_bohr_at(p, x2, n_window));
                for (int it = 0; it < 48 && (b - a) > 1e-13; ++it) {
                    if (f1 < f2) {
                        a = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = a + gr * (b - a);
                        f2 = std::abs(fourier_bohr_at(p, x2, n_window));
                    } else {
                        b = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = b - gr * (b - a);
                        f1 = std::abs(fourier_bohr_at(p, x1, n_window));
                    }
                }
                c.beta = 0.5 * (a + b);
                c.mag = std::abs(fourier_bohr_at(p, c.beta, n_window));
            }
        }
    }

    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& b) { return a.mag > b.mag; });
    // Dirichlet-kernel envelope of a unit line at circular distance diff
    // (group-value units); candidates under the sidelobe skirt of an accepted
    // line are leakage, not frequencies.
    const double count = static_cast<double>(2 * n_window + 1);
    auto envelope = [&](double diff) {
        double u = diff * h; // cycles per sample
        if (p.grid.kind == GroupKind::Integer) u = std::min(u, 1.0 - u);
        double s = std::abs(std::sin(kPi * u));
        if (s < 1e-15) return 1.0;
        return std::min(1.0, 1.0 / (count * s));
    };
    for (const auto& c : cands) {
        if (fs.freqs.size() >= opts.max_freqs) break;
        if (c.mag < theta) continue;
        double beta = c.beta;
        if (p.grid.kind == GroupKind::Integer) {
            beta -= std::floor(beta); // frequencies live mod 1
            // refinement jitter around 0 can land at 1 - tiny; fold back
            if (beta > 1.0 - fs.resolution) beta = std::abs(beta - 1.0);
        }
        bool reject = false;
        for (std::size_t i = 0; i < fs.freqs.size() && !reject; ++i) {
            double diff = std::abs(fs.freqs[i] - beta);
            if (p.grid.kind == GroupKind::Integer)
                diff = std::min(diff, 1.0 - diff);
            if (diff < fs.resolution) reject = true; // duplicate within resolution
            else if (c.mag <= 1.5 * fs.magnitudes[i] * envelope(diff))
                reject = true; // sidelobe of a stronger accepted line
        }
        if (reject) continue;
        fs.freqs.push_back(beta);
        fs.magnitudes.push_back(c.mag);
        if (p.grid.kind == GroupKind::RealSampled && std::abs(c.beta) > 0.45 / h)
            fs.aliasing_flag = true;
    }
    return fs;
}

nlohmann::json FrequencySet::to_json() const {
    return nlohmann::json{{"freqs", freqs},         {"magnitudes", magnitudes},
                          {"resolution", resolution}, {"window", window},
                          {"threshold", threshold},   {"aliasing", aliasing_flag}};
}

MtapReport measure_theoretic_almost_periods(const SystemPtr& system,
                                            const Pseudometric& e, double eps,
                                            const GroupGrid& grid,
                                            const ProfileOptions& opts) {
    if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
    if (!system->invertible() && grid.lo < 0)
        throw GroupMismatch("negative times on a forward semigroup; use a [0,T] grid");
    auto pts = system->sample(opts.seed, opts.samples);
    if (pts.empty()) throw SampleFailure("empty sample");
    MtapReport rep;
    rep.eps = eps;
    rep.grid = grid;
    rep.fraction.assign(grid.size(), 0.0);
    rep.binom_se.assign(grid.size(), 0.0);
    const double dn = static_cast<double>(pts.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        GroupElement t = grid.element_at(i);
        std::size_t exceed = 0;
        for (const auto& x : pts)
            if (e(x, system->act(t, x)) > eps) ++exceed;
        double frac = static_cast<double>(exceed) / dn;
        rep.fraction[i] = frac;
        rep.binom_se[i] = std::sqrt(std::max(0.0, frac * (1.0 - frac) / dn));
        if (frac < eps) rep.included.push_back(grid.index_at(i));
    }
    return rep;
}

std::vector<PeriodCrossCheck> cross_check_period_notions(
    const SystemPtr& system, const Pseudometric& e, const std::vector<double>& eps_grid,
    const GroupGrid& grid, const ProfileOptions& opts) {
    if (eps_grid.empty()) throw InvalidParameter("empty eps grid");
    if (!system->invertible() && grid.lo < 0)
        throw GroupMismatch("negative times on a forward semigroup; use a [0,T] grid");
    auto pts = system->sample(opts.seed, opts.samples);
    if (pts.empty()) throw SampleFailure("empty sample");
    const double dn = static_cast<double>(pts.size());
    const double sup_e = e.sup_bound;

    std::vector<PeriodCrossCheck> checks;
    checks.reserve(eps_grid.size());
    for (double eps : eps_grid) {
        PeriodCrossCheck c;
        c.eps = eps;
        c.eps1 = 0.99 * eps / (sup_e + 1.0); // eps1 (||e||inf + 1) < eps
        checks.push_back(c);
    }

    std::vector<double> ev(pts.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        GroupElement t = grid.element_at(i);
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            ev[j] = e(pts[j], system->act(t, pts[j]));
            sum += ev[j];
            sumsq += ev[j] * ev[j];
        }
        double mean = sum / dn;
        double var = std::max(0.0, sumsq / dn - mean * mean);
        double se = std::sqrt(var / dn);
        for (auto& c : checks) {
            std::size_t exceed1 = 0, exceed = 0;
            for (double v : ev) {
                if (v > c.eps1) ++exceed1;
                if (v > c.eps) ++exceed;
            }
            double frac1 = static_cast<double>(exceed1) / dn;
            double frac = static_cast<double>(exceed) / dn;
            if (frac1 < c.eps1) { // t is a measure-theoretic eps1-almost period
                ++c.forward_checked;
                if (!(mean < c.eps + 4.0 * se))
                    c.forward_violations.push_back(grid.index_at(i));
            }
            if (mean < c.eps * c.eps) { // Markov direction
                ++c.backward_checked;
                if (!(frac < c.eps)) c.backward_violations.push_back(grid.index_at(i));
            }
        }
    }
    return checks;
}

} // namespace apspec
