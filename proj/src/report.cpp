#include "apspec/report.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "apspec/almost_period.hpp"
#include "apspec/pointset.hpp"
#include "apspec/profile.hpp"
#include "apspec/spectral.hpp"

namespace apspec {

namespace {

const std::set<std::string> kKnownDiagnostics = {
    "profile", "ap-scan", "spectrum", "verdict", "equiv-suite", "diffraction"};

void require(bool ok, const std::string& path, const std::string& msg) {
    if (!ok) throw ConfigInvalid(msg + " (at " + path + ")");
}

double positive_number(const nlohmann::json& j, const std::string& path,
                       const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    require(j.at(key).is_number(), path + "/" + key, "expected a number");
    double v = j.at(key).get<double>();
    require(v > 0.0, path + "/" + key, "must be positive");
    return v;
}

Provenance provenance_from(const std::string& s) {
    if (s == "LATTICE") return Provenance::Lattice;
    if (s == "FIBONACCI_CHAIN") return Provenance::FibonacciChain;
    if (s == "CUT_AND_PROJECT") return Provenance::CutAndProject;
    if (s == "POISSON") return Provenance::Poisson;
    throw ConfigInvalid("unknown provenance '" + s + "' (at /diffraction/provenance)");
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw SampleFailure("cannot open " + p.string() + " for writing");
    os << content;
}

template <typename Writer>
void write_csv_file(const std::filesystem::path& p, Writer&& w) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw SampleFailure("cannot open " + p.string() + " for writing");
    w(os);
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    require(j.is_object(), "/", "config must be a JSON object");
    ExperimentConfig c;

    require(j.contains("seed"), "/seed", "seed is mandatory");
    require(j.at("seed").is_number_unsigned() || j.at("seed").is_number_integer(),
            "/seed", "seed must be an unsigned integer");
    c.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("diagnostics")) {
        require(j.at("diagnostics").is_array(), "/diagnostics", "expected an array");
        for (const auto& d : j.at("diagnostics")) {
            require(d.is_string(), "/diagnostics", "entries must be strings");
            std::string name = d.get<std::string>();
            require(kKnownDiagnostics.count(name) > 0, "/diagnostics",
                    "unknown diagnostic '" + name + "'");
            c.diagnostics.push_back(name);
        }
    }

    if (j.contains("system")) {
        try {
            c.system = SystemConfig::from_json(j.at("system"));
        } catch (const ConfigInvalid& e) {
            throw ConfigInvalid(std::string(e.what()) + " (at /system)");
        }
        c.has_system = true;
    }
    for (const auto& d : c.diagnostics)
        if (d != "diffraction")
            require(c.has_system, "/system", "diagnostic '" + d + "' needs a system");

    c.samples = static_cast<std::size_t>(
        positive_number(j, "", "samples", static_cast<double>(c.samples)));
    c.grid_extent = positive_number(j, "", "grid_extent", c.grid_extent);
    c.spectral_window = static_cast<long long>(
        positive_number(j, "", "spectral_window", static_cast<double>(c.spectral_window)));
    if (j.contains("observable")) {
        require(j.at("observable").is_string(), "/observable", "expected a string");
        c.observable = j.at("observable").get<std::string>();
    }
    if (j.contains("out")) {
        require(j.at("out").is_string(), "/out", "expected a string");
        c.out_dir = j.at("out").get<std::string>();
    }
    if (j.contains("windows")) {
        require(j.at("windows").is_array(), "/windows", "expected an array");
        for (const auto& w : j.at("windows")) {
            require(w.is_number() && w.get<double>() > 0, "/windows",
                    "entries must be positive numbers");
            c.windows.push_back(w.get<double>());
        }
    }
    if (j.contains("eps_fractions")) {
        require(j.at("eps_fractions").is_array(), "/eps_fractions", "expected an array");
        for (const auto& w : j.at("eps_fractions")) {
            require(w.is_number() && w.get<double>() > 0, "/eps_fractions",
                    "entries must be positive numbers");
            c.eps_fractions.push_back(w.get<double>());
        }
    }

    if (j.contains("diffraction")) {
        const auto& dj = j.at("diffraction");
        require(dj.is_object(), "/diffraction", "expected an object");
        if (dj.contains("provenance")) {
            require(dj.at("provenance").is_string(), "/diffraction/provenance",
                    "expected a string");
            c.provenance = dj.at("provenance").get<std::string>();
            provenance_from(c.provenance); // validates
        }
        c.L = positive_number(dj, "/diffraction", "L", c.L);
        c.Z = positive_number(dj, "/diffraction", "Z", c.Z);
        c.k_hi = positive_number(dj, "/diffraction", "k_hi", c.k_hi);
        if (dj.contains("k_lo")) c.k_lo = dj.at("k_lo").get<double>();
        c.rate = positive_number(dj, "/diffraction", "rate", c.rate);
        if (dj.contains("window_lo")) c.window_lo = dj.at("window_lo").get<double>();
        if (dj.contains("window_hi")) c.window_hi = dj.at("window_hi").get<double>();
        if (dj.contains("gamma_check")) {
            require(dj.at("gamma_check").is_boolean(), "/diffraction/gamma_check",
                    "expected a boolean");
            c.gamma_check = dj.at("gamma_check").get<bool>();
        }
    }

    // Canonical echo with defaults materialised.
    nlohmann::json raw;
    raw["schema_version"] = kSchemaVersion;
    raw["seed"] = c.seed;
    raw["diagnostics"] = c.diagnostics;
    if (c.has_system) raw["system"] = c.system.to_json();
    raw["samples"] = c.samples;
    raw["grid_extent"] = c.grid_extent;
    raw["spectral_window"] = c.spectral_window;
    if (!c.observable.empty()) raw["observable"] = c.observable;
    if (!c.windows.empty()) raw["windows"] = c.windows;
    if (!c.eps_fractions.empty()) raw["eps_fractions"] = c.eps_fractions;
    raw["out"] = c.out_dir;
    bool wants_diffraction = false;
    for (const auto& d : c.diagnostics) wants_diffraction |= d == "diffraction";
    if (wants_diffraction)
        raw["diffraction"] = {{"provenance", c.provenance}, {"L", c.L},
                              {"Z", c.Z},                   {"k_lo", c.k_lo},
                              {"k_hi", c.k_hi},             {"rate", c.rate},
                              {"window_lo", c.window_lo},   {"window_hi", c.window_hi},
                              {"gamma_check", c.gamma_check}};
    c.raw = raw;
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigInvalid("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid("config is not valid JSON: " + std::string(e.what()));
    }
    return from_json(j);
}

std::string config_hash(const nlohmann::json& canonical) {
    std::string s = canonical.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json run_experiment(const ExperimentConfig& config, bool quiet) {
    namespace fs = std::filesystem;
    auto start = std::chrono::steady_clock::now();
    fs::path out(config.out_dir);
    fs::create_directories(out);

    nlohmann::json report;
    report["artifact"] = {{"name", "apspec"},
                          {"version", kArtifactVersion},
                          {"schema_version", kSchemaVersion}};
    report["config"] = config.raw;
    report["config_hash"] = config_hash(config.raw);
    nlohmann::json results = nlohmann::json::object();

    SystemPtr system;
    if (config.has_system) system = build_system(config.system);

    auto pick_observable = [&]() -> const Observable& {
        return config.observable.empty() ? system->central_observable()
                                         : system->observable(config.observable);
    };

    auto make_grid = [&]() {
        if (system->group_kind() == GroupKind::Integer) {
            long long T = static_cast<long long>(config.grid_extent);
            return system->invertible() ? GroupGrid::integers_symmetric(T)
                                        : GroupGrid::integers(0, T);
        }
        return GroupGrid::reals_symmetric(config.grid_extent, system->grid_step());
    };

    for (const std::string& diag : config.diagnostics) {
        if (!quiet) std::cerr << "[apspec] running " << diag << "\n";
        if (diag == "profile") {
            ProfileOptions popts;
            popts.samples = config.samples;
            popts.seed = config.seed;
            GroupGrid grid = make_grid();
            Pseudometric d = metric_pseudometric(system);
            Profile dprof = average_pseudometric(system, d, grid, popts);
            write_csv_file(out / "profile_d.csv",
                           [&](std::ostream& os) { dprof.write_csv(os); });
            ObservableProfiles bundle =
                observable_profiles(system, pick_observable(), grid, popts);
            write_csv_file(out / "profile_S.csv", [&](std::ostream& os) {
                bundle.autocorrelation.write_csv(os);
            });
            write_csv_file(out / "profile_F.csv", [&](std::ostream& os) {
                bundle.displacement.write_csv(os);
            });
            write_csv_file(out / "profile_eavg.csv", [&](std::ostream& os) {
                bundle.mean_displacement.write_csv(os);
            });
            results["profile"] = {{"d", dprof.to_json()},
                                  {"S", bundle.autocorrelation.to_json()},
                                  {"F", bundle.displacement.to_json()},
                                  {"e_avg", bundle.mean_displacement.to_json()},
                                  {"norm_sq", bundle.norm_sq}};
        } else if (diag == "ap-scan") {
            ProfileOptions popts;
            popts.samples = config.samples;
            popts.seed = config.seed;
            GroupGrid grid = make_grid();
            Pseudometric d = metric_pseudometric(system);
            Profile dprof = average_pseudometric(system, d, grid, popts);
            std::vector<double> windows = config.windows.empty()
                                              ? default_windows(system->group_kind())
                                              : config.windows;
            std::vector<double> eps;
            double sc = dprof.max_abs();
            for (double f : config.eps_fractions.empty() ? default_eps_fractions()
                                                         : config.eps_fractions)
                eps.push_back(f * (sc > 0 ? sc : 1.0));
            AlmostPeriodReport scan = scan_almost_periods(dprof, eps, windows);
            write_csv_file(out / "ap_periods.csv",
                           [&](std::ostream& os) { scan.write_period_csv(os, dprof); });
            results["ap_scan"] = scan.to_json();
        } else if (diag == "spectrum") {
            SpectralOptions sopts;
            sopts.n_window = config.spectral_window;
            sopts.samples = config.samples;
            sopts.seed = config.seed;
            SpectralEstimate est =
                estimate_spectral_measure(system, pick_observable(), sopts);
            write_csv_file(out / "atoms.csv", [&](std::ostream& os) {
                os << "beta,mass,stderr\n";
                for (const auto& a : est.atoms)
                    os << a.freq << "," << a.mass << ",0\n";
            });
            results["spectrum"] = est.to_json();
        } else if (diag == "verdict") {
            VerdictOptions vopts;
            vopts.grid_extent = config.grid_extent;
            vopts.windows = config.windows;
            vopts.eps_fractions = config.eps_fractions;
            vopts.samples = config.samples;
            vopts.seed = config.seed;
            vopts.spectral.n_window = config.spectral_window;
            vopts.spectral.samples = config.samples;
            SystemVerdict v = discrete_spectrum_verdict(system, vopts);
            results["verdict"] = v.to_json();
        } else if (diag == "equiv-suite") {
            EquivalenceOptions eopts;
            eopts.grid_extent = config.grid_extent;
            eopts.windows = config.windows;
            eopts.eps_fractions = config.eps_fractions;
            eopts.samples = config.samples;
            eopts.seed = config.seed;
            WeightedFamily fam = default_weighted_family(*system);
            EquivalenceMatrix mat = cross_equivalence_suite(system, fam, eopts);
            results["equiv_suite"] = mat.to_json();
        } else if (diag == "diffraction") {
            PointSetOptions popts;
            popts.rate = config.rate;
            popts.window_lo = config.window_lo;
            popts.window_hi = config.window_hi;
            PointSet ps = generate_point_set(provenance_from(config.provenance),
                                             config.L, config.seed, popts);
            write_csv_file(out / "pointset.txt",
                           [&](std::ostream& os) { ps.write_txt(os); });
            AutocorrelationMeasure ac = patterson_autocorrelation(ps, config.Z);
            write_csv_file(out / "autocorrelation.csv",
                           [&](std::ostream& os) { ac.write_csv(os); });
            DiffractionOptions dopts;
            dopts.k_lo = config.k_lo;
            dopts.k_hi = config.k_hi;
            DiffractionSpectrum sp = diffraction(ac, dopts);
            write_csv_file(out / "diffraction.csv",
                           [&](std::ostream& os) { sp.write_csv(os); });
            nlohmann::json dsec;
            dsec["pointset"] = {{"provenance", to_string(ps.prov)},
                                {"n_points", ps.xs.size()},
                                {"density", ps.density()},
                                {"density_theory", ps.density_theory},
                                {"r_min", ps.r_min}};
            dsec["autocorrelation"] = {{"atoms", ac.z.size()},
                                       {"zero_weight", ac.zero_weight()},
                                       {"Z", ac.Z}};
            dsec["spectrum"] = sp.to_json();
            if (config.gamma_check &&
                (ps.prov == Provenance::Lattice || ps.prov == Provenance::FibonacciChain)) {
                std::vector<double> ts;
                for (double t = -3.0; t <= 3.0 + 1e-9; t += 0.25) ts.push_back(t);
                GammaCheckOptions gopts;
                GammaCheck chk = gamma_identity_check(
                    ps, TestFunction{TestFunction::Kind::Triangle, 0.5}, ts, gopts);
                dsec["gamma_identity"] = {{"residual", chk.residual},
                                          {"n_times", chk.t.size()}};
            }
            results["diffraction"] = dsec;
        }
    }

    report["results"] = results;
    write_file(out / "report.json", report.dump(2) + "\n");

    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    nlohmann::json meta{{"wall_clock_ms", elapsed}};
    write_file(out / "report.meta.json", meta.dump(2) + "\n");
    if (!quiet) std::cerr << "[apspec] wrote " << (out / "report.json").string() << "\n";
    return report;
}

namespace {

void compare_walk(const nlohmann::json& a, const nlohmann::json& b,
                  const std::string& path, const CompareOptions& opts,
                  CompareResult& res) {
    static const std::set<std::string> ignored = {"seed", "warnings", "stderr"};

    if (a.is_object() && b.is_object()) {
        for (auto it = a.begin(); it != a.end(); ++it) {
            const std::string& key = it.key();
            if (ignored.count(key)) continue;
            if (!b.contains(key)) {
                res.sections.push_back("missing in B: " + path + "/" + key);
                res.match = false;
                continue;
            }
            // stderr-covered arrays get the statistical tolerance.
            if ((key == "re" || key == "im" || key == "M") && it->is_array() &&
                a.contains("stderr") && b.contains("stderr")) {
                const auto& av = *it;
                const auto& bv = b.at(key);
                const auto& as = a.at("stderr");
                const auto& bs = b.at("stderr");
                if (av.size() != bv.size()) {
                    res.sections.push_back("array size mismatch: " + path + "/" + key);
                    res.match = false;
                    continue;
                }
                for (std::size_t i = 0; i < av.size(); ++i) {
                    double x = av[i].get<double>(), y = bv[i].get<double>();
                    double sa = i < as.size() ? as[i].get<double>() : 0.0;
                    double sb = i < bs.size() ? bs[i].get<double>() : 0.0;
                    double tol = opts.se_mult * std::max(sa, sb) + 1e-12;
                    ++res.compared;
                    if (std::abs(x - y) <= tol) {
                        ++res.within_tolerance;
                    } else {
                        res.diffs.push_back(path + "/" + key + "[" + std::to_string(i) +
                                            "]: " + std::to_string(x) + " vs " +
                                            std::to_string(y) + " (tol " +
                                            std::to_string(tol) + ")");
                        res.match = false;
                    }
                }
                continue;
            }
            compare_walk(*it, b.at(key), path + "/" + key, opts, res);
        }
        for (auto it = b.begin(); it != b.end(); ++it) {
            if (ignored.count(it.key())) continue;
            if (!a.contains(it.key())) {
                res.sections.push_back("missing in A: " + path + "/" + it.key());
                res.match = false;
            }
        }
        return;
    }
    if (a.is_array() && b.is_array()) {
        if (a.size() != b.size()) {
            res.sections.push_back("array size mismatch: " + path);
            res.match = false;
            return;
        }
        for (std::size_t i = 0; i < a.size(); ++i)
            compare_walk(a[i], b[i], path + "[" + std::to_string(i) + "]", opts, res);
        return;
    }
    ++res.compared;
    if (a == b) {
        ++res.within_tolerance;
        return;
    }
    if (a.is_number() && b.is_number()) {
        res.diffs.push_back(path + ": " + a.dump() + " vs " + b.dump());
    } else {
        res.diffs.push_back(path + ": " + a.dump() + " vs " + b.dump());
    }
    res.match = false;
}

} // namespace

CompareResult compare_reports(const nlohmann::json& a, const nlohmann::json& b,
                              const CompareOptions& opts) {
    CompareResult res;
    int va = a.value("artifact", nlohmann::json::object()).value("schema_version", -1);
    int vb = b.value("artifact", nlohmann::json::object()).value("schema_version", -1);
    if (va != vb || va < 0)
        throw SchemaMismatch("reports carry different or missing schema versions");
    const nlohmann::json& ra = a.value("results", nlohmann::json::object());
    const nlohmann::json& rb = b.value("results", nlohmann::json::object());
    compare_walk(ra, rb, "results", opts, res);
    return res;
}

} // namespace apspec
