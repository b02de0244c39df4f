#include "apspec/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "apspec/common.hpp"
#include "apspec/rng.hpp"

namespace apspec {

namespace {

constexpr int kCylinderRadius = 64;       // symbol window of the cylinder metric
constexpr long long kDefaultHorizon = 32832; // default orbit horizon (2^15 + 64)
constexpr int kFamilyDepth = 21;          // truncation depth of default families

// True when alpha is within 1e-12 of a rational with denominator <= qmax
// (continued-fraction convergents).
bool nearly_rational(double alpha, long long qmax) {
    long long p0 = 1, q0 = 0;
    long long p1 = static_cast<long long>(std::floor(alpha)), q1 = 1;
    double x = alpha - std::floor(alpha);
    for (int i = 0; i < 40 && q1 <= qmax; ++i) {
        if (std::abs(alpha - static_cast<double>(p1) / static_cast<double>(q1)) < 1e-12)
            return true;
        if (x < 1e-15) return false;
        x = 1.0 / x;
        long long a = static_cast<long long>(std::floor(x));
        x -= std::floor(x);
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    return false;
}

double coordinate_of(const SystemPoint& p) {
    const auto& s = p.symbolic();
    const auto* src = dynamic_cast<const BitCoordSource*>(s.source.get());
    if (!src) throw DomainMismatch("point does not carry a digit-stream source");
    return src->coordinate(s.offset);
}

Observable toral_exp(int k, int coord, const std::string& name) {
    return Observable{
        name,
        [k, coord](const SystemPoint& p) {
            return std::polar(1.0, kTwoPi * k * p.toral().c[static_cast<std::size_t>(coord)]);
        },
        1.0};
}

Observable digit_exp(int k, const std::string& name) {
    return Observable{
        name,
        [k](const SystemPoint& p) { return std::polar(1.0, kTwoPi * k * coordinate_of(p)); },
        1.0};
}

Observable symbol_obs(long long k, const std::string& name) {
    return Observable{
        name,
        [k](const SystemPoint& p) {
            return cplx(static_cast<double>(p.symbolic().at(k)), 0.0);
        },
        1.0};
}

// +-1 valued spin of the symbol at the origin.
Observable spin_obs(const std::string& name) {
    return Observable{
        name,
        [](const SystemPoint& p) {
            return cplx(p.symbolic().at(0) == 0 ? 1.0 : -1.0, 0.0);
        },
        1.0};
}

class CircleRotationSystem final : public DynamicalSystem {
  public:
    explicit CircleRotationSystem(double alpha)
        : DynamicalSystem("CircleRotation", GroupKind::Integer, 1.0, true,
                          SpectralType::Discrete),
          alpha_(alpha) {
        if (!std::isfinite(alpha)) throw InvalidParameter("alpha must be finite");
        if (nearly_rational(alpha, 10000))
            warnings_.push_back("rotation number is (nearly) rational; spectrum is "
                                "still discrete but eigenvalues are periodic");
        for (int k = 1; k <= kFamilyDepth; ++k) {
            std::string nm = "exp" + std::to_string(k);
            observables_.push_back(toral_exp(k, 0, nm));
            family_.emplace_back(nm, std::ldexp(1.0, -k));
        }
        family_tail_ = std::ldexp(1.0, -kFamilyDepth);
        central_ = "exp1";
    }

    SystemPoint act(const GroupElement& t, const SystemPoint& x) const override {
        if (t.kind() != GroupKind::Integer) throw GroupMismatch("Z action expected");
        ToralCoords c = x.toral();
        c.c[0] = wrap_unit(c.c[0] + static_cast<double>(t.index()) * alpha_);
        return SystemPoint(c);
    }

    double metric(const SystemPoint& a, const SystemPoint& b) const override {
        return torus_distance(a.toral().c[0], b.toral().c[0]);
    }

    std::vector<SystemPoint> sample(std::uint64_t seed, std::size_t n) const override {
        Rng rng(derive_seed(seed, 0xC1C1E));
        std::vector<SystemPoint> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            ToralCoords c;
            c.dim = 1;
            c.c[0] = rng.uniform();
            out.push_back(SystemPoint(c));
        }
        return out;
    }

    std::vector<SystemPoint> quadrature_nodes(std::size_t n) const override {
        std::vector<SystemPoint> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            ToralCoords c;
            c.dim = 1;
            c.c[0] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
            out.push_back(SystemPoint(c));
        }
        return out;
    }

    double alpha() const { return alpha_; }

  private:
    double alpha_;
};

class TorusTranslationSystem final : public DynamicalSystem {
  public:
    TorusTranslationSystem(std::vector<double> alphas, double h)
        : DynamicalSystem("TorusTranslation", GroupKind::RealSampled, h, true,
                          SpectralType::Discrete),
          alphas_(std::move(alphas)) {
        if (alphas_.empty() || alphas_.size() > 4)
            throw InvalidParameter("torus dimension must be 1..4");
        if (!(h > 0.0)) throw InvalidParameter("grid step must be positive");
        dim_ = static_cast<int>(alphas_.size());
        for (int k = 1; k <= kFamilyDepth; ++k) {
            for (int c = 0; c < dim_; ++c) {
                std::string nm = "exp" + std::to_string(k) + "_c" + std::to_string(c);
                observables_.push_back(toral_exp(k, c, nm));
                family_.emplace_back(nm, std::ldexp(1.0, -k) / dim_);
            }
        }
        family_tail_ = std::ldexp(1.0, -kFamilyDepth);
        central_ = "exp1_c0";
    }

    SystemPoint act(const GroupElement& t, const SystemPoint& x) const override {
        if (t.kind() != GroupKind::RealSampled)
            throw GroupMismatch("sampled R action expected");
        ToralCoords c = x.toral();
        double tv = t.value();
        for (int i = 0; i < dim_; ++i)
            c.c[static_cast<std::size_t>(i)] =
                wrap_unit(c.c[static_cast<std::size_t>(i)] + tv * alphas_[static_cast<std::size_t>(i)]);
        return SystemPoint(c);
    }

    double metric(const SystemPoint& a, const SystemPoint& b) const override {
        double d = 0.0;
        for (int i = 0; i < dim_; ++i)
            d = std::max(d, torus_distance(a.toral().c[static_cast<std::size_t>(i)],
                                           b.toral().c[static_cast<std::size_t>(i)]));
        return d;
    }

    std::vector<SystemPoint> sample(std::uint64_t seed, std::size_t n) const override {
        Rng rng(derive_seed(seed, 0x70235));
        std::vector<SystemPoint> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            ToralCoords c;
            c.dim = dim_;
            for (int j = 0; j < dim_; ++j) c.c[static_cast<std::size_t>(j)] = rng.uniform();
            out.push_back(SystemPoint(c));
        }
        return out;
    }

    std::vector<SystemPoint> quadrature_nodes(std::size_t n) const override {
        if (dim_ != 1) return {};
        std::vector<SystemPoint> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            ToralCoords c;
            c.dim = 1;
            c.c[0] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
            out.push_back(SystemPoint(c));
        }
        return out;
    }

  private:
    std::vector<double> alphas_;
    int dim_;
};

class DoublingSystem final : public DynamicalSystem {
  public:
    DoublingSystem()
        : DynamicalSystem("DoublingMap", GroupKind::Integer, 1.0, false,
                          SpectralType::Continuous) {
        for (int k = 1; k <= kFamilyDepth; ++k) {
            std::string nm = "exp" + std::to_string(k);
            observables_.push_back(digit_exp(k, nm));
            family_.emplace_back(nm, std::ldexp(1.0, -k));
        }
        family_tail_ = std::ldexp(1.0, -kFamilyDepth);
        central_ = "exp1";
    }

    SystemPoint act(const GroupElement& t, const SystemPoint& x) const override {
        if (t.kind() != GroupKind::Integer) throw GroupMismatch("Z action expected");
        if (t.index() < 0)
            throw GroupMismatch("DoublingMap is a forward semigroup; t >= 0 required");
        SymbolicPoint s = x.symbolic();
        s.offset += t.index();
        return SystemPoint(s);
    }

    double metric(const SystemPoint& a, const SystemPoint& b) const override {
        return torus_distance(coordinate_of(a), coordinate_of(b));
    }

    std::vector<SystemPoint> sample(std::uint64_t seed, std::size_t n) const override {
        std::vector<SystemPoint> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            SymbolicPoint s;
            s.source = std::make_shared<BitCoordSource>(derive_seed(seed, i));
            s.offset = 0;
            out.push_back(SystemPoint(s));
        }
        return out;
    }
};

class BernoulliSystem final : public DynamicalSystem {
  public:
    explicit BernoulliSystem(double p)
        : DynamicalSystem("BernoulliShift", GroupKind::Integer, 1.0, true,
                          SpectralType::Continuous),
          p_(p) {
        if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("p must lie in (0,1)");
        observables_.push_back(spin_obs("spin0"));
        central_ = "spin0";
        register_symbol_family();
    }

    SystemPoint act(const GroupElement& t, const SystemPoint& x) const override {
        if (t.kind() != GroupKind::Integer) throw GroupMismatch("Z action expected");
        SymbolicPoint s = x.symbolic();
        s.offset += t.index();
        return SystemPoint(s);
    }

    double metric(const SystemPoint& a, const SystemPoint& b) const override {
        return cylinder_distance(a.symbolic(), b.symbolic(), kCylinderRadius);
    }

    std::vector<SystemPoint> sample(std::uint64_t seed, std::size_t n) const override {
        std::vector<SystemPoint> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            SymbolicPoint s;
            s.source = std::make_shared<HashBernoulliSource>(derive_seed(seed, i), p_);
            s.offset = 0;
            out.push_back(SystemPoint(s));
        }
        return out;
    }

  private:
    void register_symbol_family() {
        observables_.push_back(symbol_obs(0, "sym0"));
        family_.emplace_back("sym0", 1.0);
        for (long long k = 1; k <= kFamilyDepth; ++k) {
            std::string np = "sym+" + std::to_string(k);
            std::string nm = "sym-" + std::to_string(k);
            observables_.push_back(symbol_obs(k, np));
            observables_.push_back(symbol_obs(-k, nm));
            family_.emplace_back(np, std::ldexp(1.0, -static_cast<int>(k)));
            family_.emplace_back(nm, std::ldexp(1.0, -static_cast<int>(k)));
        }
        family_tail_ = 2.0 * std::ldexp(1.0, -kFamilyDepth);
    }

    double p_;
};

class SubstitutionSystem final : public DynamicalSystem {
  public:
    SubstitutionSystem(const SubstitutionRule& rule, int level, long long shift_horizon)
        : DynamicalSystem("SubstitutionSubshift." + rule.name, GroupKind::Integer, 1.0,
                          true,
                          rule.name == "THUE_MORSE" ? SpectralType::Mixed
                                                    : SpectralType::Discrete),
          rule_(rule) {
        supertile_len_ = rule_.supertile_length(rule_.right_seed, level);
        if (supertile_len_ < 1000)
            throw InvalidParameter("supertile level too small for sampling");
        long long pad = kCylinderRadius + 8;
        source_ = std::make_shared<FixedPointSource>(
            rule_, shift_horizon + pad, supertile_len_ + shift_horizon + pad);

        observables_.push_back(spin_obs("spin0"));
        central_ = "spin0";
        if (rule_.name == "THUE_MORSE") {
            // Factor observable of the period-doubling factor: +1 when the two
            // symbols at the origin agree.
            observables_.push_back(Observable{
                "pairmatch",
                [](const SystemPoint& p) {
                    const auto& s = p.symbolic();
                    return cplx(s.at(0) == s.at(1) ? 1.0 : -1.0, 0.0);
                },
                1.0});
        }
        register_symbol_family();
    }

    SystemPoint act(const GroupElement& t, const SystemPoint& x) const override {
        if (t.kind() != GroupKind::Integer) throw GroupMismatch("Z action expected");
        SymbolicPoint s = x.symbolic();
        s.offset += t.index();
        return SystemPoint(s);
    }

    double metric(const SystemPoint& a, const SystemPoint& b) const override {
        return cylinder_distance(a.symbolic(), b.symbolic(), kCylinderRadius);
    }

    // Uniform position in a level-N supertile of the fixed point; unique
    // ergodicity makes this an m-sampler.
    std::vector<SystemPoint> sample(std::uint64_t seed, std::size_t n) const override {
        Rng rng(derive_seed(seed, 0x5085));
        std::vector<SystemPoint> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            SymbolicPoint s;
            s.source = source_;
            s.offset = static_cast<long long>(rng.uniform() * static_cast<double>(supertile_len_));
            out.push_back(SystemPoint(s));
        }
        return out;
    }

    std::optional<std::vector<cplx>> exact_autocorrelation(
        const std::string& observable, long long n_max) const override {
        if (rule_.name != "THUE_MORSE" || observable != "spin0") return std::nullopt;
        // eta(0)=1, eta(2n)=eta(n), eta(2n+1) = -(eta(n)+eta(n+1))/2 for the
        // +-1 sequence under the unique shift-invariant measure.
        std::vector<double> eta(static_cast<std::size_t>(n_max + 2), 0.0);
        eta[0] = 1.0;
        if (n_max >= 1) eta[1] = -1.0 / 3.0;
        for (long long n = 1; 2 * n <= n_max + 1; ++n) {
            if (2 * n <= n_max + 1) eta[static_cast<std::size_t>(2 * n)] = eta[static_cast<std::size_t>(n)];
            if (2 * n + 1 <= n_max + 1)
                eta[static_cast<std::size_t>(2 * n + 1)] =
                    -(eta[static_cast<std::size_t>(n)] + eta[static_cast<std::size_t>(n + 1)]) / 2.0;
        }
        std::vector<cplx> out(static_cast<std::size_t>(n_max + 1));
        for (long long n = 0; n <= n_max; ++n)
            out[static_cast<std::size_t>(n)] = cplx(eta[static_cast<std::size_t>(n)], 0.0);
        return out;
    }

    const SubstitutionRule& rule() const { return rule_; }
    long long supertile_length() const { return supertile_len_; }
    std::shared_ptr<const SymbolSource> source() const { return source_; }

  private:
    void register_symbol_family() {
        observables_.push_back(symbol_obs(0, "sym0"));
        family_.emplace_back("sym0", 1.0);
        for (long long k = 1; k <= kFamilyDepth; ++k) {
            std::string np = "sym+" + std::to_string(k);
            std::string nm = "sym-" + std::to_string(k);
            observables_.push_back(symbol_obs(k, np));
            observables_.push_back(symbol_obs(-k, nm));
            family_.emplace_back(np, std::ldexp(1.0, -static_cast<int>(k)));
            family_.emplace_back(nm, std::ldexp(1.0, -static_cast<int>(k)));
        }
        family_tail_ = 2.0 * std::ldexp(1.0, -kFamilyDepth);
    }

    SubstitutionRule rule_;
    long long supertile_len_;
    std::shared_ptr<const FixedPointSource> source_;
};

class OnePointSystem final : public DynamicalSystem {
  public:
    OnePointSystem()
        : DynamicalSystem("OnePoint", GroupKind::Integer, 1.0, true,
                          SpectralType::Discrete) {
        observables_.push_back(Observable{
            "one", [](const SystemPoint&) { return cplx(1.0, 0.0); }, 1.0});
        central_ = "one";
        family_.emplace_back("one", 1.0);
    }

    SystemPoint act(const GroupElement&, const SystemPoint& x) const override { return x; }
    double metric(const SystemPoint&, const SystemPoint&) const override { return 0.0; }

    std::vector<SystemPoint> sample(std::uint64_t, std::size_t n) const override {
        ToralCoords c;
        c.dim = 0;
        return std::vector<SystemPoint>(n, SystemPoint(c));
    }
};

class ProductSystemImpl final : public DynamicalSystem {
  public:
    ProductSystemImpl(SystemPtr left, SystemPtr right)
        : DynamicalSystem("ProductSystem(" + left->name() + "," + right->name() + ")",
                          left->group_kind(), left->grid_step(),
                          left->invertible() && right->invertible(),
                          combine(left->known_spectral_type(), right->known_spectral_type())),
          left_(std::move(left)), right_(std::move(right)) {
        if (left_->group_kind() != right_->group_kind())
            throw GroupMismatch("product factors act under different groups");
        if (left_->group_kind() == GroupKind::RealSampled &&
            std::abs(left_->grid_step() - right_->grid_step()) > 1e-12 * left_->grid_step())
            throw GroupMismatch("product factors use different grid steps");

        lift_all(*left_, true);
        lift_all(*right_, false);
        central_ = "L." + left_->central_observable_name();
        // Tensor of the two central observables; its eigenvalue (when both
        // factors are eigen-observables) is the sum of the factors'.
        const Observable& lc = left_->central_observable();
        const Observable& rc = right_->central_observable();
        auto le = lc.eval;
        auto re = rc.eval;
        observables_.push_back(Observable{
            "tensor." + lc.name + "." + rc.name,
            [le, re](const SystemPoint& p) {
                const auto& pr = p.parts();
                return le(pr.first) * re(pr.second);
            },
            lc.sup_norm * rc.sup_norm});
        family_tail_ = 0.5 * (left_->family_tail_bound() + right_->family_tail_bound());
    }

    SystemPoint act(const GroupElement& t, const SystemPoint& x) const override {
        const auto& pr = x.parts();
        return SystemPoint::product(left_->act(t, pr.first), right_->act(t, pr.second));
    }

    double metric(const SystemPoint& a, const SystemPoint& b) const override {
        const auto& pa = a.parts();
        const auto& pb = b.parts();
        return left_->metric(pa.first, pb.first) + right_->metric(pa.second, pb.second);
    }

    std::vector<SystemPoint> sample(std::uint64_t seed, std::size_t n) const override {
        auto ls = left_->sample(derive_seed(seed, 101), n);
        auto rs = right_->sample(derive_seed(seed, 202), n);
        std::vector<SystemPoint> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(SystemPoint::product(std::move(ls[i]), std::move(rs[i])));
        return out;
    }

  private:
    static SpectralType combine(SpectralType a, SpectralType b) {
        if (a == SpectralType::Unknown || b == SpectralType::Unknown)
            return SpectralType::Unknown;
        if (a == SpectralType::Discrete && b == SpectralType::Discrete)
            return SpectralType::Discrete;
        if (a == SpectralType::Continuous && b == SpectralType::Continuous)
            return SpectralType::Continuous;
        return SpectralType::Mixed;
    }

    void lift_all(const DynamicalSystem& sub, bool is_left) {
        std::string prefix = is_left ? "L." : "R.";
        for (const Observable& f : sub.observables()) {
            auto ev = f.eval;
            observables_.push_back(Observable{
                prefix + f.name,
                [ev, is_left](const SystemPoint& p) {
                    const auto& pr = p.parts();
                    return ev(is_left ? pr.first : pr.second);
                },
                f.sup_norm});
        }
        for (const auto& [nm, w] : sub.family_spec())
            family_.emplace_back(prefix + nm, 0.5 * w);
    }

    SystemPtr left_;
    SystemPtr right_;
};

} // namespace

std::string to_string(SpectralType t) {
    switch (t) {
        case SpectralType::Discrete: return "DISCRETE";
        case SpectralType::Mixed: return "MIXED";
        case SpectralType::Continuous: return "CONTINUOUS";
        default: return "UNKNOWN";
    }
}

SystemConfig SystemConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("name") || !j.at("name").is_string())
        throw ConfigInvalid("system config requires a string field 'name'");
    SystemConfig c;
    c.name = j.at("name").get<std::string>();
    c.params = j.value("params", nlohmann::json::object());
    if (!c.params.is_object())
        throw ConfigInvalid("system 'params' must be an object");
    return c;
}

nlohmann::json SystemConfig::to_json() const {
    return nlohmann::json{{"name", name}, {"params", params}};
}

const Observable& DynamicalSystem::observable(const std::string& nm) const {
    for (const auto& f : observables_)
        if (f.name == nm) return f;
    throw InvalidParameter("unknown observable '" + nm + "' on system " + name_);
}

SystemPtr build_system(const SystemConfig& config) {
    const nlohmann::json& p = config.params;
    try {
        if (config.name == "CircleRotation") {
            double alpha = p.value("alpha", kGoldenMean);
            return std::make_shared<CircleRotationSystem>(alpha);
        }
        if (config.name == "TorusTranslation") {
            std::vector<double> alphas =
                p.value("alphas", std::vector<double>{1.0, kGoldenRatio});
            if (p.contains("dim")) {
                auto d = p.at("dim").get<std::size_t>();
                if (d != alphas.size())
                    throw InvalidParameter("dim does not match alphas length");
            }
            double h = p.value("h", 0.01);
            return std::make_shared<TorusTranslationSystem>(alphas, h);
        }
        if (config.name == "DoublingMap") {
            return std::make_shared<DoublingSystem>();
        }
        if (config.name == "BernoulliShift") {
            double prob = p.value("p", 0.5);
            return std::make_shared<BernoulliSystem>(prob);
        }
        if (config.name == "SubstitutionSubshift") {
            std::string rule_name = p.value("rule", std::string("FIBONACCI"));
            SubstitutionRule rule;
            int level;
            if (rule_name == "FIBONACCI") {
                rule = fibonacci_rule();
                level = p.value("level", 25); // |sigma^25(a)| = 121393 symbols
            } else if (rule_name == "THUE_MORSE") {
                rule = thue_morse_rule();
                level = p.value("level", 17); // 131072 symbols
            } else if (rule_name == "PERIOD_DOUBLING") {
                rule = period_doubling_rule();
                level = p.value("level", 17);
            } else {
                throw InvalidParameter("unknown substitution rule '" + rule_name + "'");
            }
            long long horizon = p.value("shift_horizon", kDefaultHorizon);
            return std::make_shared<SubstitutionSystem>(rule, level, horizon);
        }
        if (config.name == "ProductSystem") {
            if (!p.contains("left") || !p.contains("right"))
                throw InvalidParameter("ProductSystem requires 'left' and 'right'");
            auto left = build_system(SystemConfig::from_json(p.at("left")));
            auto right = build_system(SystemConfig::from_json(p.at("right")));
            return std::make_shared<ProductSystemImpl>(left, right);
        }
        if (config.name == "OnePoint") {
            return std::make_shared<OnePointSystem>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParameter(std::string("bad parameters for ") + config.name + ": " +
                               e.what());
    }
    throw UnknownSystem(config.name);
}

std::vector<CatalogEntry> catalog_entries() {
    return {
        {"CircleRotation", "alpha (default (sqrt5-1)/2)",
         "irrational rotation on the circle; discrete spectrum"},
        {"TorusTranslation", "alphas (default [1, phi]), h (default 0.01)",
         "sampled-time translation flow on a torus; discrete spectrum"},
        {"DoublingMap", "(none)",
         "x -> 2x mod 1; forward N-action, continuous spectrum beyond constants"},
        {"BernoulliShift", "p (default 0.5)",
         "i.i.d. two-sided binary shift; continuous spectrum beyond constants"},
        {"SubstitutionSubshift", "rule: FIBONACCI | THUE_MORSE | PERIOD_DOUBLING",
         "primitive substitution subshifts with cylinder metric"},
        {"ProductSystem", "left/right system configs",
         "direct product with sum metric and independent sampling"},
        {"OnePoint", "(none)", "trivial single-point system"},
    };
}

std::vector<SystemPoint> orbit(const DynamicalSystem& system, const SystemPoint& x0,
                               const std::vector<GroupElement>& ts) {
    std::vector<SystemPoint> out;
    out.reserve(ts.size());
    for (const auto& t : ts) {
        if (t.kind() != system.group_kind())
            throw GroupMismatch("orbit time of the wrong group kind for " + system.name());
        out.push_back(system.act(t, x0));
    }
    return out;
}

} // namespace apspec
