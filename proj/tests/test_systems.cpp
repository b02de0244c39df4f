#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "apspec/common.hpp"
#include "apspec/rng.hpp"
#include "apspec/system.hpp"
#include "oracles.hpp"

using namespace apspec;

namespace {

SystemPtr make(const std::string& name, const std::string& params_json = "{}") {
    SystemConfig cfg;
    cfg.name = name;
    cfg.params = nlohmann::json::parse(params_json);
    return build_system(cfg);
}

std::vector<SystemPtr> full_catalog() {
    return {
        make("CircleRotation"),
        make("TorusTranslation"),
        make("DoublingMap"),
        make("BernoulliShift"),
        make("SubstitutionSubshift", R"({"rule":"FIBONACCI"})"),
        make("SubstitutionSubshift", R"({"rule":"THUE_MORSE"})"),
        make("SubstitutionSubshift", R"({"rule":"PERIOD_DOUBLING"})"),
        make("ProductSystem",
             R"({"left":{"name":"CircleRotation"},
                 "right":{"name":"CircleRotation","params":{"alpha":0.41421356237309515}}})"),
        make("OnePoint"),
    };
}

// Scalar probe for distribution comparisons: toral coordinate, or a dyadic
// embedding of the symbol window.
double probe(const DynamicalSystem& sys, const SystemPoint& p) {
    if (std::holds_alternative<ToralCoords>(p.rep)) {
        const auto& t = p.toral();
        return t.dim > 0 ? t.c[0] : 0.0;
    }
    if (std::holds_alternative<SymbolicPoint>(p.rep)) {
        const auto& s = p.symbolic();
        if (const auto* bits = dynamic_cast<const BitCoordSource*>(s.source.get()))
            return bits->coordinate(s.offset);
        double acc = 0.0;
        for (int k = 0; k < 24; ++k)
            acc += static_cast<double>(s.at(k)) * std::ldexp(1.0, -(k + 1));
        return acc;
    }
    const auto& pr = p.parts();
    return 0.5 * (probe(sys, pr.first) + probe(sys, pr.second));
}

// Two-sample KS statistic; ties (atoms of discrete probes) are consumed from
// both sides before the CDF gap is measured.
double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        double v;
        if (i < a.size() && j < b.size())
            v = std::min(a[i], b[j]);
        else
            v = i < a.size() ? a[i] : b[j];
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        double fa = static_cast<double>(i) / a.size();
        double fb = static_cast<double>(j) / b.size();
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

} // namespace

TEST_CASE("catalog construction and errors") {
    CHECK_THROWS_AS(make("NoSuchSystem"), UnknownSystem);
    CHECK_THROWS_AS(make("BernoulliShift", R"({"p":1.5})"), InvalidParameter);
    CHECK_THROWS_AS(make("SubstitutionSubshift", R"({"rule":"TRIBONACCI"})"), InvalidParameter);
    CHECK_THROWS_AS(make("ProductSystem"), InvalidParameter);

    // Rational rotation numbers are flagged, not rejected.
    auto rat = make("CircleRotation", R"({"alpha":0.25})");
    CHECK(!rat->warnings().empty());
    auto irr = make("CircleRotation");
    CHECK(irr->warnings().empty());

    for (const auto& sys : full_catalog()) {
        CHECK(!sys->observables().empty());
        CHECK(sys->central_observable().name == sys->central_observable_name());
    }
}

TEST_CASE("orbit examples") {
    auto rot = make("CircleRotation"); // alpha = golden mean
    SystemPoint x0{ToralCoords{1, {0.0, 0, 0, 0}}};
    auto ts = std::vector<GroupElement>{GroupElement::integer(0), GroupElement::integer(1),
                                        GroupElement::integer(2)};
    auto orb = orbit(*rot, x0, ts);
    CHECK(orb[0].toral().c[0] == doctest::Approx(0.0));
    CHECK(orb[1].toral().c[0] == doctest::Approx(kGoldenMean));
    CHECK(orb[2].toral().c[0] == doctest::Approx(2.0 * kGoldenMean - 1.0));

    // DoublingMap: 1/3 -> 2/3 -> 1/3 via the repeating digit pattern 01.
    auto dbl = make("DoublingMap");
    SystemPoint third{SymbolicPoint{std::make_shared<BitCoordSource>(std::vector<int>{0, 1}), 0}};
    SystemPoint two_thirds{SymbolicPoint{std::make_shared<BitCoordSource>(std::vector<int>{1, 0}), 0}};
    CHECK(dbl->metric(third, two_thirds) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    auto t1 = dbl->act(GroupElement::integer(1), third);
    auto t2 = dbl->act(GroupElement::integer(2), third);
    CHECK(dbl->metric(t1, two_thirds) == doctest::Approx(0.0));
    CHECK(dbl->metric(t2, third) == doctest::Approx(0.0));
    CHECK_THROWS_AS(dbl->act(GroupElement::integer(-1), third), GroupMismatch);

    // identity action for every system
    for (const auto& sys : full_catalog()) {
        auto zero = sys->group_element(0);
        auto smp = sys->sample(3, 3);
        for (const auto& p : smp)
            CHECK(sys->metric(p, sys->act(zero, p)) == 0.0);
    }

    auto bern = make("BernoulliShift");
    CHECK_THROWS_AS(orbit(*bern, bern->sample(1, 1)[0],
                          {GroupElement::real(1, 0.01)}),
                    GroupMismatch);
}

TEST_CASE("doubling map digit coordinates stay nondegenerate far out") {
    // Plain double iteration of x -> 2x mod 1 collapses to 0 after ~53 steps;
    // the digit stream must not.
    auto dbl = make("DoublingMap");
    auto pts = dbl->sample(99, 8);
    for (const auto& p : pts) {
        const auto* src = dynamic_cast<const BitCoordSource*>(p.symbolic().source.get());
        REQUIRE(src != nullptr);
        int nontrivial = 0;
        for (long long n : {60LL, 200LL, 4000LL, 30000LL}) {
            double c = src->coordinate(n);
            CHECK(c >= 0.0);
            CHECK(c < 1.0);
            if (c > 1e-6 && c < 1.0 - 1e-6) ++nontrivial;
            // halving relation between consecutive offsets: c(n) = (b + c(n+1))/2
            double cn1 = src->coordinate(n + 1);
            double b = static_cast<double>(src->symbol(n + 1));
            CHECK(c == doctest::Approx((b + cn1) / 2.0).epsilon(1e-14));
        }
        CHECK(nontrivial >= 3);
    }
}

TEST_CASE("action group law on random (s,t,x)") {
    Rng rng(2024);
    for (const auto& sys : full_catalog()) {
        const bool fwd = !sys->invertible();
        auto pts = sys->sample(11, 100);
        int checks = 0;
        for (int rep = 0; rep < 1000 && checks < 1000; ++rep) {
            long long s = static_cast<long long>(rng.uniform() * 200) - (fwd ? 0 : 100);
            long long t = static_cast<long long>(rng.uniform() * 200) - (fwd ? 0 : 100);
            const auto& x = pts[static_cast<std::size_t>(rng.uniform() * pts.size())];
            auto st = sys->act(sys->group_element(s), sys->act(sys->group_element(t), x));
            auto sum = sys->act(sys->group_element(s + t), x);
            CHECK(sys->metric(st, sum) < 1e-10);
            ++checks;
        }
    }
}

TEST_CASE("metric axioms on sampled triples") {
    for (const auto& sys : full_catalog()) {
        auto a = sys->sample(21, 2000);
        auto b = sys->sample(22, 2000);
        auto c = sys->sample(23, 2000);
        for (std::size_t i = 0; i < a.size(); ++i) {
            double dxy = sys->metric(a[i], b[i]);
            double dyx = sys->metric(b[i], a[i]);
            double dxz = sys->metric(a[i], c[i]);
            double dzy = sys->metric(c[i], b[i]);
            CHECK(dxy >= 0.0);
            CHECK(std::abs(dxy - dyx) < 1e-12);
            CHECK(dxy <= dxz + dzy + 1e-12);
            CHECK(sys->metric(a[i], a[i]) == 0.0);
        }
    }
}

TEST_CASE("sampler invariance under the action (KS two-sample at 1%)") {
    // c(0.01) * sqrt((n+m)/(n m)) with n = m.
    const std::size_t n = 100000;
    const double crit = 1.628 * std::sqrt(2.0 / static_cast<double>(n));
    for (const auto& sys : full_catalog()) {
        if (sys->name() == "OnePoint") continue;
        auto base = sys->sample(31, n);
        std::vector<double> raw(n);
        for (std::size_t i = 0; i < n; ++i) raw[i] = probe(*sys, base[i]);

        std::vector<long long> shifts =
            sys->invertible() ? std::vector<long long>{1, 7, -3} : std::vector<long long>{1, 7, 3};
        for (long long t : shifts) {
            auto moved = sys->sample(32, n); // independent draw, then pushforward
            std::vector<double> push(n);
            auto ge = sys->group_element(t);
            for (std::size_t i = 0; i < n; ++i)
                push[i] = probe(*sys, sys->act(ge, moved[i]));
            double d = ks_two_sample(raw, push);
            INFO(sys->name(), " shift ", t, " KS=", d, " crit=", crit);
            CHECK(d < crit);
        }
    }
}

TEST_CASE("substitution fixed points are genuine fixed points") {
    for (auto rule : {fibonacci_rule(), thue_morse_rule(), period_doubling_rule()}) {
        FixedPointSource src(rule, 3000, 3000);
        // sigma^2(w)[i] over a window must reproduce the stored word: check by
        // regenerating through the public interface at two scales.
        // Level lengths follow the substitution matrix.
        CHECK(rule.supertile_length(rule.right_seed, 0) == 1);
        long long l1 = rule.supertile_length(rule.right_seed, 1);
        CHECK(l1 == static_cast<long long>(rule.images[static_cast<std::size_t>(rule.right_seed)].size()));

        // The word is invariant under the square substitution: expand the
        // symbols at positions [0, 40) and compare with the stored expansion.
        std::vector<int> w;
        for (long long i = 0; i < 40; ++i) w.push_back(src.symbol(i));
        std::vector<int> expanded = rule.square_apply(w);
        for (std::size_t i = 0; i < expanded.size() && i < 100; ++i)
            CHECK(expanded[i] == src.symbol(static_cast<long long>(i)));
    }
}

TEST_CASE("fibonacci word prefix matches the direct expansion oracle") {
    auto fib = make("SubstitutionSubshift", R"({"rule":"FIBONACCI"})");
    auto pts = fib->sample(77, 1);
    const auto& sp = pts[0].symbolic();
    auto w = oracles::fibonacci_word(12);
    // The sampler picks an offset inside a supertile; compare the source
    // itself at offset 0 by shifting back.
    SymbolicPoint origin{sp.source, 0};
    for (std::size_t i = 0; i < w.size() && i < 200; ++i)
        CHECK(origin.at(static_cast<long long>(i)) == w[i]);
}

TEST_CASE("thue-morse exact autocorrelation hook matches direct counting") {
    auto tm = make("SubstitutionSubshift", R"({"rule":"THUE_MORSE"})");
    auto curve = tm->exact_autocorrelation("spin0", 512);
    REQUIRE(curve.has_value());
    const long long L = 1 << 20;
    for (long long n : {0LL, 1LL, 2LL, 3LL, 5LL, 17LL, 64LL, 255LL, 511LL}) {
        double direct = oracles::thue_morse_correlation_direct(n, L);
        CHECK((*curve)[static_cast<std::size_t>(n)].real() ==
              doctest::Approx(direct).epsilon(0.01));
    }
    CHECK((*curve)[1].real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(!tm->exact_autocorrelation("sym0", 16).has_value());
}

TEST_CASE("product system structure") {
    auto prod = make("ProductSystem",
                     R"({"left":{"name":"CircleRotation"},"right":{"name":"DoublingMap"}})");
    CHECK(prod->known_spectral_type() == SpectralType::Mixed);
    CHECK(!prod->invertible());
    auto pts = prod->sample(4, 8);
    auto moved = prod->act(prod->group_element(3), pts[0]);
    CHECK(prod->metric(pts[0], moved) >= 0.0);

    const std::string mixed_groups =
        R"({"left":{"name":"CircleRotation"},"right":{"name":"TorusTranslation"}})";
    CHECK_THROWS_AS(make("ProductSystem", mixed_groups), GroupMismatch);
}
