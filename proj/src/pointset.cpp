#include "apspec/pointset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "apspec/rng.hpp"
#include "apspec/symbols.hpp"

namespace apspec {

namespace {

double alg_value(long long a, long long b) {
    return static_cast<double>(a) + static_cast<double>(b) * kGoldenRatio;
}

// Bartlett taper and the mass fraction of its transform captured within
// +-c mainlobe widths.
double bartlett(double u) { return u <= 1.0 ? 1.0 - u : 0.0; }

double bartlett_mass_fraction(double c) {
    // integral_{-c}^{c} (sin(pi u)/(pi u))^2 du by Simpson.
    const int n = 4000;
    double hstep = 2.0 * c / n;
    auto f = [](double u) {
        if (std::abs(u) < 1e-12) return 1.0;
        double s = std::sin(kPi * u) / (kPi * u);
        return s * s;
    };
    double acc = f(-c) + f(c);
    for (int i = 1; i < n; ++i) acc += f(-c + i * hstep) * (i % 2 ? 4.0 : 2.0);
    return acc * hstep / 3.0;
}

} // namespace

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Lattice: return "LATTICE";
        case Provenance::FibonacciChain: return "FIBONACCI_CHAIN";
        case Provenance::CutAndProject: return "CUT_AND_PROJECT";
        default: return "POISSON";
    }
}

void PointSet::validate() const {
    if (xs.empty()) throw InvalidWindow("point set is empty");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw InvalidWindow("coordinates are not strictly increasing");
    if (prov != Provenance::Poisson && r_min <= 0.0)
        throw InvalidWindow("Delone lower bound violated");
    if (density_theory > 0.0) {
        double rel = std::abs(density() - density_theory) / density_theory;
        if (rel > 0.10)
            throw InvalidWindow("density deviates more than 10% from provenance");
    }
}

void PointSet::write_txt(std::ostream& os) const {
    char buf[64];
    for (double x : xs) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", x);
        os << buf;
    }
}

PointSet generate_point_set(Provenance prov, double L, std::uint64_t seed,
                            const PointSetOptions& opts) {
    if (!(L > 0.0)) throw InvalidWindow("window half-length must be positive");
    PointSet ps;
    ps.L = L;
    ps.prov = prov;

    switch (prov) {
        case Provenance::Lattice: {
            long long n = static_cast<long long>(std::floor(L));
            for (long long k = -n; k <= n; ++k) {
                ps.xs.push_back(static_cast<double>(k));
                ps.alg.emplace_back(k, 0);
            }
            ps.density_theory = 1.0;
            ps.describe = "integer lattice";
            break;
        }
        case Provenance::FibonacciChain: {
            // Tile lengths phi (symbol a) and 1 (symbol b) along the two-sided
            // substitution fixed point, a point anchored at 0.
            long long need = static_cast<long long>(L / 1.2) + 16;
            FixedPointSource fp(fibonacci_rule(), need, need);
            std::vector<std::pair<long long, long long>> alg;
            long long a = 0, b = 0; // current position = a + b phi
            long long k = 0;
            while (alg_value(a, b) <= L) {
                alg.emplace_back(a, b);
                if (fp.symbol(k) == 0)
                    ++b; // tile phi
                else
                    ++a; // tile 1
                ++k;
            }
            long long a2 = 0, b2 = 0;
            k = -1;
            std::vector<std::pair<long long, long long>> neg;
            while (true) {
                if (fp.symbol(k) == 0)
                    --b2;
                else
                    --a2;
                if (alg_value(a2, b2) < -L) break;
                neg.emplace_back(a2, b2);
                --k;
            }
            std::reverse(neg.begin(), neg.end());
            for (const auto& mn : neg) ps.alg.push_back(mn);
            for (const auto& mn : alg) ps.alg.push_back(mn);
            for (const auto& [am, bn] : ps.alg) ps.xs.push_back(alg_value(am, bn));
            ps.density_theory = kGoldenRatio / kSqrt5;
            ps.describe = "Fibonacci chain, tiles phi/1";
            break;
        }
        case Provenance::CutAndProject: {
            // x = a + b phi accepted when x* = a - b/phi lies in the window.
            double wlo = opts.window_lo, whi = opts.window_hi;
            if (!(whi > wlo)) throw InvalidWindow("empty acceptance window");
            long long b_lo = static_cast<long long>(std::floor((-L - whi) / kSqrt5)) - 1;
            long long b_hi = static_cast<long long>(std::ceil((L - wlo) / kSqrt5)) + 1;
            for (long long b = b_lo; b <= b_hi; ++b) {
                double lo = std::max(-L - b * kGoldenRatio, wlo + b / kGoldenRatio);
                double hi = std::min(L - b * kGoldenRatio, whi + b / kGoldenRatio);
                for (long long a = static_cast<long long>(std::ceil(lo)); a <= hi; ++a) {
                    double star = static_cast<double>(a) - b / kGoldenRatio;
                    if (star < wlo || star >= whi) continue;
                    double x = alg_value(a, b);
                    if (x < -L || x > L) continue;
                    ps.alg.emplace_back(a, b);
                }
            }
            std::sort(ps.alg.begin(), ps.alg.end(),
                      [](const auto& p, const auto& q) {
                          return alg_value(p.first, p.second) < alg_value(q.first, q.second);
                      });
            for (const auto& [am, bn] : ps.alg) ps.xs.push_back(alg_value(am, bn));
            ps.density_theory = (whi - wlo) / kSqrt5;
            ps.describe = "cut-and-project, window [" + std::to_string(wlo) + "," +
                          std::to_string(whi) + ")";
            break;
        }
        case Provenance::Poisson: {
            Rng rng(derive_seed(seed, 0x9015));
            double x = -L;
            while (true) {
                x += rng.exponential(opts.rate);
                if (x > L) break;
                ps.xs.push_back(x);
            }
            if (ps.xs.empty()) throw InvalidWindow("empty Poisson draw; increase L");
            ps.density_theory = opts.rate;
            ps.describe = "Poisson, rate " + std::to_string(opts.rate);
            break;
        }
    }

    ps.r_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < ps.xs.size(); ++i)
        ps.r_min = std::min(ps.r_min, ps.xs[i] - ps.xs[i - 1]);
    if (ps.xs.size() < 2) ps.r_min = 2.0 * L;
    ps.validate();
    return ps;
}

AutocorrelationMeasure patterson_autocorrelation(const PointSet& ps, double Z,
                                                 double bin_width, BoundaryMode mode) {
    if (!(Z > 0.0) || Z > ps.L / 2.0)
        throw WindowTooSmall("need 0 < Z <= L/2 for the Patterson sum");
    AutocorrelationMeasure ac;
    ac.window_L = ps.L;
    ac.Z = Z;
    ac.bin_width = bin_width;
    ac.mode = mode;
    ac.exact_displacements = !ps.alg.empty();

    const double norm_plain = 1.0 / (2.0 * ps.L);
    const std::size_t n = ps.xs.size();

    if (ac.exact_displacements) {
        std::map<std::pair<long long, long long>, double> acc;
        acc[{0, 0}] = static_cast<double>(n) * norm_plain; // self pairs
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double z = ps.xs[j] - ps.xs[i];
                if (z > Z) break;
                double wgt = mode == BoundaryMode::Plain
                                 ? norm_plain
                                 : 1.0 / (2.0 * ps.L - z);
                acc[{ps.alg[j].first - ps.alg[i].first,
                     ps.alg[j].second - ps.alg[i].second}] += wgt;
            }
        }
        std::vector<std::pair<double, double>> atoms;
        for (const auto& [key, wgt] : acc)
            atoms.emplace_back(alg_value(key.first, key.second), wgt);
        std::sort(atoms.begin(), atoms.end());
        for (const auto& [z, wgt] : atoms) {
            ac.z.push_back(z);
            ac.w.push_back(wgt);
        }
        if (mode == BoundaryMode::PerPairNormalized)
            ac.w[0] = static_cast<double>(n) / (2.0 * ps.L);
        return ac;
    }

    // Binned route: cluster consecutive occupied bins into atoms at weighted
    // centroids.
    std::map<long long, std::pair<double, double>> bins; // key -> (weight, weight*z)
    bins[0] = {static_cast<double>(n) * norm_plain, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double z = ps.xs[j] - ps.xs[i];
            if (z > Z) break;
            double wgt =
                mode == BoundaryMode::Plain ? norm_plain : 1.0 / (2.0 * ps.L - z);
            long long key = static_cast<long long>(std::llround(z / bin_width));
            auto& cell = bins[key];
            cell.first += wgt;
            cell.second += wgt * z;
        }
    }
    long long prev_key = std::numeric_limits<long long>::min();
    double cw = 0.0, cwz = 0.0;
    auto flush = [&]() {
        if (cw <= 0.0) return;
        ac.z.push_back(cwz / cw);
        ac.w.push_back(cw);
        cw = cwz = 0.0;
    };
    for (const auto& [key, cell] : bins) {
        if (key != prev_key + 1 && prev_key != std::numeric_limits<long long>::min())
            flush();
        cw += cell.first;
        cwz += cell.second;
        prev_key = key;
    }
    flush();
    return ac;
}

void AutocorrelationMeasure::write_csv(std::ostream& os) const {
    os << "z,w\n";
    char buf[96];
    for (std::size_t i = z.size(); i-- > 1;) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", -z[i], w[i]);
        os << buf;
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", z[i], w[i]);
        os << buf;
    }
}

DiffractionSpectrum diffraction(const AutocorrelationMeasure& ac,
                                const DiffractionOptions& opts) {
    DiffractionSpectrum sp;
    sp.Z = ac.Z;
    double dk = opts.dk > 0.0 ? opts.dk : 1.0 / (8.0 * ac.Z);
    std::size_t nk = static_cast<std::size_t>((opts.k_hi - opts.k_lo) / dk) + 1;

    // Taper weights once per atom.
    std::vector<double> tw(ac.z.size());
    for (std::size_t i = 0; i < ac.z.size(); ++i)
        tw[i] = ac.w[i] * bartlett(ac.z[i] / ac.Z);

    sp.k.resize(nk);
    sp.intensity.resize(nk);
    double minI = 0.0;
    for (std::size_t j = 0; j < nk; ++j) {
        double k = opts.k_lo + static_cast<double>(j) * dk;
        double acc = tw[0]; // z = 0
        for (std::size_t i = 1; i < ac.z.size(); ++i)
            acc += 2.0 * tw[i] * std::cos(kTwoPi * k * ac.z[i]);
        sp.k[j] = k;
        minI = std::min(minI, acc);
        sp.intensity[j] = std::max(acc, 0.0);
    }
    sp.min_before_clip = minI;
    double i0 = *std::max_element(sp.intensity.begin(), sp.intensity.end());
    if (minI < -0.01 * i0)
        sp.warnings.push_back("negative diffraction mass beyond tolerance before clipping");

    // Peaks: local maxima above the threshold; masses by kernel-corrected
    // integration over +- c/Z.
    double thresh = opts.peak_threshold_frac * i0;
    double frac = bartlett_mass_fraction(opts.mass_halfwidth);
    long long half = static_cast<long long>(std::llround(opts.mass_halfwidth / (ac.Z * dk)));
    for (std::size_t j = 1; j + 1 < nk; ++j) {
        if (sp.intensity[j] < thresh) continue;
        if (!(sp.intensity[j] >= sp.intensity[j - 1] && sp.intensity[j] > sp.intensity[j + 1]))
            continue;
        DiffractionPeak pk;
        pk.k = sp.k[j];
        pk.height = sp.intensity[j];
        long long lo = std::max<long long>(0, static_cast<long long>(j) - half);
        long long hi = std::min<long long>(static_cast<long long>(nk) - 1,
                                           static_cast<long long>(j) + half);
        double mass = 0.0;
        for (long long i = lo; i < hi; ++i)
            mass += 0.5 * (sp.intensity[static_cast<std::size_t>(i)] +
                           sp.intensity[static_cast<std::size_t>(i + 1)]) * dk;
        pk.mass = mass / frac;
        sp.peaks.push_back(pk);
    }
    std::sort(sp.peaks.begin(), sp.peaks.end(),
              [](const DiffractionPeak& a, const DiffractionPeak& b) {
                  return a.mass > b.mass;
              });
    return sp;
}

void DiffractionSpectrum::write_csv(std::ostream& os) const {
    os << "k,intensity\n";
    char buf[96];
    for (std::size_t i = 0; i < k.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", k[i], intensity[i]);
        os << buf;
    }
}

nlohmann::json DiffractionSpectrum::to_json() const {
    nlohmann::json peaks_j = nlohmann::json::array();
    for (const auto& p : peaks)
        peaks_j.push_back({{"k", p.k}, {"height", p.height}, {"mass", p.mass}});
    return nlohmann::json{{"Z", Z},
                          {"taper", taper},
                          {"min_before_clip", min_before_clip},
                          {"peaks", peaks_j},
                          {"warnings", warnings}};
}

double TestFunction::eval(double u) const {
    double a = std::abs(u);
    if (a >= radius) return 0.0;
    switch (kind) {
        case Kind::Triangle: return 1.0 - a / radius;
        case Kind::GaussianTruncated: {
            double sig = radius / 3.0;
            double floor_v = std::exp(-4.5);
            return (std::exp(-0.5 * (u / sig) * (u / sig)) - floor_v) / (1.0 - floor_v);
        }
        case Kind::Hat: return 0.5 * (1.0 + std::cos(kPi * u / radius));
    }
    return 0.0;
}

std::string TestFunction::name() const {
    switch (kind) {
        case Kind::Triangle: return "triangle";
        case Kind::GaussianTruncated: return "gaussian_truncated";
        case Kind::Hat: return "hat";
    }
    return "?";
}

double n_map(const TestFunction& phi, const PointSet& ps, double t) {
    if (t - phi.radius < -ps.L || t + phi.radius > ps.L)
        throw SupportOutOfWindow("translate support leaves the point-set window");
    auto lo = std::lower_bound(ps.xs.begin(), ps.xs.end(), t - phi.radius);
    double acc = 0.0;
    for (auto it = lo; it != ps.xs.end() && *it < t + phi.radius; ++it)
        acc += phi.eval(t - *it);
    return acc;
}

namespace {

// phi * phi~ sampled on a uniform grid over [-2r, 2r] (trapezoid quadrature);
// linear interpolation in between.
struct AutoConvolution {
    double radius;
    double step;
    std::vector<double> samples;

    AutoConvolution(const TestFunction& phi, double conv_step)
        : radius(2.0 * phi.radius), step(conv_step) {
        std::size_t m = static_cast<std::size_t>(std::ceil(2.0 * radius / step)) + 1;
        samples.resize(m);
        std::size_t inner = static_cast<std::size_t>(std::ceil(2.0 * phi.radius / step)) + 1;
        for (std::size_t i = 0; i < m; ++i) {
            double u = -radius + static_cast<double>(i) * step;
            double acc = 0.0;
            for (std::size_t j = 0; j < inner; ++j) {
                double v = -phi.radius + static_cast<double>(j) * step;
                double a = phi.eval(v);
                if (a == 0.0) continue;
                double b = phi.eval(v - u);
                double wgt = (j == 0 || j + 1 == inner) ? 0.5 : 1.0;
                acc += wgt * a * b;
            }
            samples[i] = acc * step;
        }
    }

    double eval(double u) const {
        double a = std::abs(u);
        if (a >= radius) return 0.0;
        double x = (u + radius) / step;
        std::size_t i = static_cast<std::size_t>(x);
        if (i + 1 >= samples.size()) return samples.back();
        double frac = x - static_cast<double>(i);
        return samples[i] * (1.0 - frac) + samples[i + 1] * frac;
    }
};

} // namespace

GammaCheck gamma_identity_check(const PointSet& ps, const TestFunction& phi,
                                const std::vector<double>& ts,
                                const GammaCheckOptions& opts) {
    if (ts.empty()) throw InvalidParameter("no evaluation times");
    double tmax = 0.0;
    for (double t : ts) tmax = std::max(tmax, std::abs(t));
    double Z = opts.Z > 0.0 ? opts.Z : tmax + 2.0 * phi.radius + 8.0;
    AutocorrelationMeasure ac = patterson_autocorrelation(ps, Z, opts.bin_width);
    AutoConvolution conv(phi, opts.conv_step);

    GammaCheck chk;
    chk.t = ts;
    chk.lhs.reserve(ts.size());
    chk.rhs.reserve(ts.size());

    for (double t : ts) {
        double acc = 0.0;
        for (std::size_t i = 0; i < ac.z.size(); ++i) {
            acc += ac.w[i] * conv.eval(t - ac.z[i]);
            if (ac.z[i] > 0.0) acc += ac.w[i] * conv.eval(t + ac.z[i]);
        }
        chk.lhs.push_back(acc);
    }

    double s_lo = -ps.L / 2.0, s_hi = ps.L / 2.0;
    if (s_hi - phi.radius - tmax < s_lo)
        throw SupportOutOfWindow("window too small for the requested translates");
    std::size_t ns = static_cast<std::size_t>((s_hi - s_lo) / opts.s_step);
    std::vector<double> vs(ns);
    for (std::size_t i = 0; i < ns; ++i)
        vs[i] = n_map(phi, ps, s_lo + static_cast<double>(i) * opts.s_step);
    for (double t : ts) {
        double acc = 0.0;
        std::size_t cnt = 0;
        long long shift = static_cast<long long>(std::llround(t / opts.s_step));
        for (std::size_t i = 0; i < ns; ++i) {
            long long j = static_cast<long long>(i) + shift;
            if (j < 0 || j >= static_cast<long long>(ns)) continue;
            acc += vs[i] * vs[static_cast<std::size_t>(j)];
            ++cnt;
        }
        chk.rhs.push_back(cnt > 0 ? acc / static_cast<double>(cnt) : 0.0);
    }

    for (std::size_t i = 0; i < ts.size(); ++i)
        chk.residual = std::max(chk.residual, std::abs(chk.lhs[i] - chk.rhs[i]));
    return chk;
}

HullProfiles hull_observable_profiles(const PointSet& ps, const TestFunction& phi,
                                      const GroupGrid& grid, std::size_t s_samples,
                                      std::uint64_t seed) {
    if (grid.kind != GroupKind::RealSampled)
        throw GroupMismatch("hull profiles use a sampled real grid");
    double tmax = std::max(std::abs(grid.value_at(0)), grid.value_at(grid.size() - 1));
    if (ps.L / 2.0 + tmax + phi.radius > ps.L)
        throw SupportOutOfWindow("grid extent too large for the point-set window");

    Rng rng(derive_seed(seed, 0x47711));
    std::vector<double> s(s_samples);
    for (auto& v : s) v = rng.uniform(-ps.L / 2.0, ps.L / 2.0);
    std::vector<double> v0(s_samples);
    for (std::size_t i = 0; i < s_samples; ++i) v0[i] = n_map(phi, ps, s[i]);

    HullProfiles out;
    auto blank = [&](std::string label, bool real) {
        Profile p;
        p.grid = grid;
        p.values.assign(grid.size(), cplx(0.0, 0.0));
        p.se.assign(grid.size(), 0.0);
        p.method = ProfileMethod::MonteCarlo;
        p.sample_size = s_samples;
        p.seed = seed;
        p.real_valued = real;
        p.symmetrized = grid.symmetric();
        p.label = std::move(label);
        return p;
    };
    out.autocorrelation = blank("S.hull." + phi.name(), true);
    out.displacement = blank("F.hull." + phi.name(), true);

    double s0 = 0.0;
    for (double v : v0) s0 += v * v;
    s0 /= static_cast<double>(s_samples);
    out.norm_sq = s0;

    const double dn = static_cast<double>(s_samples);
    long long start = grid.symmetric() ? 0 : grid.lo;
    for (long long idx = start; idx <= grid.hi; ++idx) {
        double t = static_cast<double>(idx) * grid.step;
        double corr = 0.0, corrsq = 0.0, d2s = 0.0, d2sq = 0.0;
        for (std::size_t i = 0; i < s_samples; ++i) {
            double vt = n_map(phi, ps, s[i] + t);
            double z = v0[i] * vt;
            corr += z;
            corrsq += z * z;
            double d2 = (v0[i] - vt) * (v0[i] - vt);
            d2s += d2;
            d2sq += d2 * d2;
        }
        std::size_t pos = grid.pos_of(idx);
        double sm = corr / dn;
        out.autocorrelation.values[pos] = cplx(sm, 0.0);
        out.autocorrelation.se[pos] =
            std::sqrt(std::max(0.0, corrsq / dn - sm * sm) / dn);
        double fv = std::sqrt(d2s / dn);
        out.displacement.values[pos] = cplx(fv, 0.0);
        double mean_d2 = d2s / dn;
        double sd = std::sqrt(std::max(0.0, d2sq / dn - mean_d2 * mean_d2) / dn);
        out.displacement.se[pos] = fv > 0 ? sd / (2.0 * fv) : 0.0;
    }
    if (grid.symmetric()) {
        for (long long i = 1; i <= grid.hi; ++i) {
            for (Profile* p : {&out.autocorrelation, &out.displacement}) {
                p->values[grid.pos_of(-i)] = p->at_index(i);
                p->se[grid.pos_of(-i)] = p->se_at_index(i);
            }
        }
    }
    return out;
}

TmdsVerdict tmds_spectrum_verdict(const PointSet& ps, const TestFunction& phi,
                                  const TmdsVerdictOptions& opts) {
    GroupGrid grid = GroupGrid::reals_symmetric(opts.grid_extent, opts.h);
    HullProfiles hp = hull_observable_profiles(ps, phi, grid, opts.s_samples, opts.seed);

    TmdsVerdict v;
    v.provenance = to_string(ps.prov);
    v.displacement = hp.displacement;
    std::vector<double> eps;
    if (opts.eps_fractions.empty()) {
        eps = default_eps_grid(hp.displacement);
    } else {
        double sc = hp.displacement.max_abs();
        for (double f : opts.eps_fractions) eps.push_back(f * (sc > 0 ? sc : 1.0));
    }
    v.scan = scan_almost_periods(hp.displacement, eps, opts.windows);
    v.ap = v.scan.verdict;
    switch (v.ap) {
        case ApVerdict::ApConsistent: v.label = "DISCRETE_CONSISTENT"; break;
        case ApVerdict::NotAp: v.label = "NOT_DISCRETE"; break;
        default: v.label = "INCONCLUSIVE"; break;
    }
    return v;
}

nlohmann::json TmdsVerdict::to_json() const {
    return nlohmann::json{{"provenance", provenance},
                          {"ap", apspec::to_string(ap)},
                          {"label", label},
                          {"scan", scan.to_json()}};
}

} // namespace apspec
