#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "apspec/common.hpp"
#include "apspec/profile.hpp"
#include "apspec/pseudometric.hpp"
#include "apspec/system.hpp"

using namespace apspec;

namespace {

SystemPtr make(const std::string& name, const std::string& params_json = "{}") {
    SystemConfig cfg;
    cfg.name = name;
    cfg.params = nlohmann::json::parse(params_json);
    return build_system(cfg);
}

void check_pseudometric_axioms(const SystemPtr& sys, const Pseudometric& e,
                               std::size_t n_triples, std::uint64_t seed) {
    auto a = sys->sample(seed + 1, n_triples);
    auto b = sys->sample(seed + 2, n_triples);
    auto c = sys->sample(seed + 3, n_triples);
    for (std::size_t i = 0; i < n_triples; ++i) {
        CHECK(e(a[i], a[i]) == 0.0);
        double xy = e(a[i], b[i]);
        CHECK(xy >= 0.0);
        CHECK(std::abs(xy - e(b[i], a[i])) <= 1e-12);
        CHECK(xy <= e(a[i], c[i]) + e(c[i], b[i]) + 1e-12);
    }
}

} // namespace

TEST_CASE("e_f axioms hold for every catalog observable pseudometric") {
    for (const auto& name : {"CircleRotation", "DoublingMap", "BernoulliShift"}) {
        auto sys = make(name);
        auto e = pseudometric_from_observable(sys->central_observable());
        check_pseudometric_axioms(sys, e, 10000, 17);
        CHECK(e.sup_bound == 2.0 * sys->central_observable().sup_norm);
    }
    auto fib = make("SubstitutionSubshift", R"({"rule":"FIBONACCI"})");
    check_pseudometric_axioms(fib, pseudometric_from_observable(fib->observable("sym0")),
                              10000, 19);
}

TEST_CASE("e_f examples") {
    auto rot = make("CircleRotation");
    auto e = pseudometric_from_observable(rot->observable("exp1"));
    SystemPoint x{ToralCoords{1, {0.0, 0, 0, 0}}};
    SystemPoint y{ToralCoords{1, {0.5, 0, 0, 0}}};
    CHECK(e(x, y) == doctest::Approx(2.0).epsilon(1e-12)); // |1 - (-1)|
    CHECK(e(x, x) == 0.0);

    Observable constant{"const", [](const SystemPoint&) { return cplx(3.0, -1.0); }, 3.2};
    auto ec = pseudometric_from_observable(constant);
    CHECK(ec(x, y) == 0.0);
}

TEST_CASE("weighted family validation and scaling") {
    auto rot = make("CircleRotation");
    WeightedFamily fam = default_weighted_family(*rot);
    CHECK(fam.members.size() == 21);
    CHECK(fam.tail_fraction() < 1e-6);
    fam.validate();

    WeightedFamily empty;
    CHECK_THROWS_AS(weighted_pseudometric(empty), EmptyFamily);

    WeightedFamily bad = fam;
    bad.weights[0] = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);

    // single (f, c=1) family reproduces e_f
    WeightedFamily single;
    single.members = {rot->observable("exp1")};
    single.weights = {1.0};
    auto e1 = weighted_pseudometric(single);
    auto ef = pseudometric_from_observable(rot->observable("exp1"));
    auto xs = rot->sample(5, 200);
    auto ys = rot->sample(6, 200);
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(e1(xs[i], ys[i]) == doctest::Approx(ef(xs[i], ys[i])).epsilon(1e-12));

    // scaling the weights scales the pseudometric
    WeightedFamily scaled = single;
    scaled.weights = {2.5};
    auto e2 = weighted_pseudometric(scaled);
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(e2(xs[i], ys[i]) == doctest::Approx(2.5 * e1(xs[i], ys[i])).epsilon(1e-12));
}

TEST_CASE("family separation check") {
    auto rot = make("CircleRotation");
    auto fam = default_weighted_family(*rot);
    auto e = weighted_pseudometric(fam);
    auto sep = check_separation(rot, e, 1e-3, 5000, 101);
    CHECK(sep.separates);
    CHECK(sep.min_eval_on_separated > 0.0);

    // constants separate nothing
    Observable constant{"const", [](const SystemPoint&) { return cplx(1.0, 0.0); }, 1.0};
    WeightedFamily cf;
    cf.members = {constant};
    cf.weights = {1.0};
    auto sep2 = check_separation(rot, weighted_pseudometric(cf), 1e-3, 5000, 102);
    CHECK(!sep2.separates);
}

TEST_CASE("domination basics: zero, reflexivity, witness") {
    auto rot = make("CircleRotation");
    Pseudometric zero{"zero", [](const SystemPoint&, const SystemPoint&) { return 0.0; }, 0.0};
    auto d = metric_pseudometric(rot);
    std::vector<double> eps{0.2, 0.1, 0.05};

    auto rep = check_domination(rot, zero, d, eps, 4000, 7);
    CHECK(rep.dominated());
    for (double dh : rep.delta_hat) CHECK(std::isinf(dh));

    auto self = check_domination(rot, d, d, eps, 4000, 7);
    CHECK(self.dominated());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        CHECK(self.delta_hat[i] >= eps[i]);
        CHECK(self.delta_hat[i] <= eps[i] * 1.2); // min sample above eps sits near eps
    }

    // d is not dominated by a constant-observable pseudometric (which is 0).
    Observable constant{"const", [](const SystemPoint&) { return cplx(1.0, 0.0); }, 1.0};
    auto econst = pseudometric_from_observable(constant);
    auto bad = check_domination(rot, d, econst, eps, 4000, 7);
    CHECK(!bad.dominated());
    CHECK(bad.witness_index.has_value());
    CHECK(bad.witness_f == 0.0);
    CHECK(bad.witness_g > eps[2]);
}

TEST_CASE("continuity of e_f against the metric (domination e_f < d)") {
    for (const auto& name : {"CircleRotation", "BernoulliShift"}) {
        auto sys = make(name);
        auto d = metric_pseudometric(sys);
        auto ef = pseudometric_from_observable(sys->central_observable());
        auto rep = check_domination(sys, ef, d, {0.5, 0.2, 0.1, 0.05}, 10000, 23);
        CHECK(rep.dominated());
    }
}

TEST_CASE("cylinder metric and the weighted symbol family dominate each other") {
    for (const auto* rule : {R"({"rule":"FIBONACCI"})", R"({"rule":"THUE_MORSE"})"}) {
        auto sys = make("SubstitutionSubshift", rule);
        auto d = metric_pseudometric(sys);
        auto efam = weighted_pseudometric(default_weighted_family(*sys));
        std::vector<double> eps{0.3, 0.1, 0.03};
        auto fwd = check_domination(sys, efam, d, eps, 10000, 31);
        auto bwd = check_domination(sys, d, efam, eps, 10000, 32);
        CHECK(fwd.dominated());
        CHECK(bwd.dominated());
    }
}

TEST_CASE("averaging transports domination (profile-level check)") {
    // e1 < e2 on pairs implies avg(e1) < avg(e2) on the group grid; five
    // pseudometric pairs per system, small grids.
    for (const auto& name : {"CircleRotation", "BernoulliShift"}) {
        auto sys = make(name);
        auto d = metric_pseudometric(sys);
        auto e1 = pseudometric_from_observable(sys->central_observable());
        auto fam = default_weighted_family(*sys);
        auto efam = weighted_pseudometric(fam);
        Pseudometric half{"half_e1",
                          [e1](const SystemPoint& x, const SystemPoint& y) {
                              return 0.5 * e1.eval(x, y);
                          },
                          0.5 * e1.sup_bound};
        Pseudometric sum{"e1_plus_fam",
                         [e1, efam](const SystemPoint& x, const SystemPoint& y) {
                             return e1.eval(x, y) + efam.eval(x, y);
                         },
                         e1.sup_bound + efam.sup_bound};

        std::vector<std::pair<Pseudometric, Pseudometric>> pairs = {
            {e1, d}, {efam, d}, {half, e1}, {e1, sum}, {half, sum}};

        GroupGrid grid = GroupGrid::integers_symmetric(60);
        ProfileOptions opts;
        opts.samples = 4000;
        opts.seed = 55;
        std::vector<double> eps{0.3, 0.15, 0.08};
        for (auto& [g, f] : pairs) {
            auto pair_rep = check_domination(sys, g, f, eps, 8000, 77);
            REQUIRE(pair_rep.dominated());
            Profile pg = average_pseudometric(sys, g, grid, opts);
            Profile pf = average_pseudometric(sys, f, grid, opts);
            auto prof_rep = check_domination(pg, pf, eps);
            CHECK(prof_rep.dominated());
        }
    }
}

TEST_CASE("profile domination requires a common grid") {
    auto rot = make("CircleRotation");
    auto d = metric_pseudometric(rot);
    ProfileOptions opts;
    opts.samples = 500;
    Profile a = average_pseudometric(rot, d, GroupGrid::integers_symmetric(10), opts);
    Profile b = average_pseudometric(rot, d, GroupGrid::integers_symmetric(12), opts);
    CHECK_THROWS_AS(check_domination(a, b, {0.1}), DomainMismatch);
}
