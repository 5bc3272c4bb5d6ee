#include <catch2/catch_amalgamated.hpp>

#include <osrep/root_lattice.hpp>

#include "support/oracles.hpp"

using namespace osrep;

namespace {

GVec random_vec(Rng& rng, int n, long long lo, long long hi) {
    GVec x(n);
    for (auto& v : x)
        v = lo + static_cast<long long>(rng.uniform() * static_cast<double>(hi - lo + 1));
    return x;
}

std::vector<Quiver> all_catalog_graphs() {
    return {build_catalog_quiver(GraphFamily::A, 2),      build_catalog_quiver(GraphFamily::A, 5),
            build_catalog_quiver(GraphFamily::D, 4),      build_catalog_quiver(GraphFamily::D, 6),
            build_catalog_quiver(GraphFamily::E6),        build_catalog_quiver(GraphFamily::E7),
            build_catalog_quiver(GraphFamily::E8),        build_catalog_quiver(GraphFamily::A_ext, 4),
            build_catalog_quiver(GraphFamily::A_ext, 6),  build_catalog_quiver(GraphFamily::D_ext, 4),
            build_catalog_quiver(GraphFamily::D_ext, 5),  build_catalog_quiver(GraphFamily::D_ext, 7),
            build_catalog_quiver(GraphFamily::E6_ext),    build_catalog_quiver(GraphFamily::E7_ext),
            build_catalog_quiver(GraphFamily::E8_ext)};
}

std::vector<Quiver> extended_graphs() {
    std::vector<Quiver> out;
    for (Quiver& q : all_catalog_graphs())
        if (q.has_delta()) out.push_back(std::move(q));
    return out;
}

GVec scaled_delta(const Quiver& q, long long k) {
    GVec b = q.delta;
    for (auto& v : b) v *= k;
    return b;
}

ErrorCode thrown_code(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    throw std::logic_error("expected an osrep::Error");
}

}  // namespace

TEST_CASE("tits form values on D~(4)") {
    Quiver q = build_catalog_quiver(GraphFamily::D_ext, 4);
    int z = q.index_of("z");
    CHECK(tits_form(q, unit_vector(q, z)) == 1);
    CHECK(tits_form(q, {1, 1, 1, 1, 2}) == 0);
    CHECK(tits_form(q, {2, 2, 1, 1, 3}) == 1);
    CHECK(tits_form(q, {1, 1, 1, 1, 1}) == 1);
    CHECK_THROWS_AS(tits_form(q, {1, 1, 1}), Error);
}

TEST_CASE("tits form vanishes exactly on catalog delta") {
    for (const Quiver& q : extended_graphs()) {
        INFO(q.name);
        CHECK(tits_form(q, q.delta) == 0);
        CHECK(linear_form_L(q, q.delta) == 0);
        // No proper sub-multiple or perturbation of delta is radical: check
        // that delta restricted to any proper connected piece fails q = 0.
        for (int drop = 0; drop < q.size(); ++drop) {
            GVec x = q.delta;
            x[drop] = 0;
            if (vec_is_positive(x)) CHECK(tits_form(q, x) != 0);
        }
    }
}

TEST_CASE("simple reflections") {
    Quiver q = build_catalog_quiver(GraphFamily::D_ext, 4);
    int z = q.index_of("z");
    SECTION("examples") {
        GVec ez = unit_vector(q, z);
        GVec r = simple_reflection(q, z, ez);
        CHECK(r == GVec{0, 0, 0, 0, -1});
        CHECK(simple_reflection(q, z, q.delta) == q.delta);
    }
    SECTION("involution and form invariance on random vectors") {
        Rng rng(11);
        for (const Quiver& g : all_catalog_graphs()) {
            INFO(g.name);
            for (int rep = 0; rep < 50; ++rep) {
                GVec x = random_vec(rng, g.size(), -5, 5);
                long long qx = tits_form(g, x);
                for (int k = 0; k < g.size(); ++k) {
                    GVec y = simple_reflection(g, k, x);
                    CHECK(simple_reflection(g, k, y) == x);
                    CHECK(tits_form(g, y) == qx);
                }
            }
        }
    }
}

TEST_CASE("parity sweeps") {
    Quiver q = build_catalog_quiver(GraphFamily::D_ext, 4);
    SECTION("examples") {
        CHECK(coxeter_sweep(q, Parity::Even, {1, 1, 1, 1, 1}) == GVec{0, 0, 0, 0, 1});
        CHECK(coxeter_sweep(q, Parity::Odd, {0, 0, 0, 0, 1}) == GVec{0, 0, 0, 0, -1});
    }
    SECTION("delta is fixed by both sweeps") {
        for (const Quiver& g : extended_graphs()) {
            INFO(g.name);
            CHECK(coxeter_sweep(g, Parity::Even, g.delta) == g.delta);
            CHECK(coxeter_sweep(g, Parity::Odd, g.delta) == g.delta);
        }
    }
    SECTION("sweeps are involutions and equal any per-vertex ordering") {
        Rng rng(12);
        for (const Quiver& g : all_catalog_graphs()) {
            INFO(g.name);
            for (int rep = 0; rep < 30; ++rep) {
                GVec x = random_vec(rng, g.size(), -4, 4);
                for (Parity p : {Parity::Even, Parity::Odd}) {
                    GVec s = coxeter_sweep(g, p, x);
                    CHECK(coxeter_sweep(g, p, s) == x);
                    GVec asc = x, desc = x;
                    for (int v = 0; v < g.size(); ++v)
                        if (g.parity[v] == p) asc = simple_reflection(g, v, asc);
                    for (int v = g.size() - 1; v >= 0; --v)
                        if (g.parity[v] == p) desc = simple_reflection(g, v, desc);
                    CHECK(asc == s);
                    CHECK(desc == s);
                }
            }
        }
    }
}

TEST_CASE("coxeter transform") {
    Quiver q = build_catalog_quiver(GraphFamily::D_ext, 4);
    int z = q.index_of("z");
    GVec ez = unit_vector(q, z);
    CHECK(coxeter_transform(q, ez, 0) == ez);
    CHECK(coxeter_transform(q, ez, 1) ==
          coxeter_sweep(q, Parity::Even, coxeter_sweep(q, Parity::Odd, ez)));
    Rng rng(13);
    for (const Quiver& g : all_catalog_graphs()) {
        INFO(g.name);
        for (int rep = 0; rep < 10; ++rep) {
            GVec x = random_vec(rng, g.size(), -5, 5);
            for (long long t : {1, 2, 5}) {
                CHECK(coxeter_transform(g, coxeter_transform(g, x, t), -t) == x);
                CHECK(tits_form(g, coxeter_transform(g, x, t)) == tits_form(g, x));
            }
        }
    }
}

TEST_CASE("linear form L") {
    Quiver q = build_catalog_quiver(GraphFamily::D_ext, 4);
    int z = q.index_of("z");
    CHECK(linear_form_L(q, q.delta) == 0);
    CHECK(linear_form_L(q, unit_vector(q, z)) == 2);
    CHECK(linear_form_L(q, {2, 2, 1, 1, 3}) == 0);
    CHECK(linear_form_L(q, {1, 1, 1, 1, 1}) == -2);
    CHECK(thrown_code([] {
              Quiver d4 = build_catalog_quiver(GraphFamily::D, 4);
              linear_form_L(d4, {1, 0, 0, 0});
          }) == ErrorCode::NoDelta);
}

TEST_CASE("L changes sign under one sweep, so the full transform preserves it") {
    Rng rng(14);
    for (const Quiver& g : extended_graphs()) {
        INFO(g.name);
        for (int rep = 0; rep < 60; ++rep) {
            GVec x = random_vec(rng, g.size(), -5, 5);
            long long l = linear_form_L(g, x);
            CHECK(linear_form_L(g, coxeter_sweep(g, Parity::Even, x)) == -l);
            CHECK(linear_form_L(g, coxeter_sweep(g, Parity::Odd, x)) == -l);
            CHECK(linear_form_L(g, coxeter_transform(g, x, 1)) == l);
        }
    }
}

TEST_CASE("vector classification") {
    Quiver q = build_catalog_quiver(GraphFamily::D_ext, 4);
    SECTION("examples") {
        RootClass rc = classify_vector(q, q.delta);
        CHECK(rc.tag == RootTag::Imaginary);
        CHECK(rc.q_value == 0);
        CHECK(rc.l_value == 0);

        rc = classify_vector(q, {1, 1, 1, 1, 1});
        CHECK(rc.tag == RootTag::RealSingular);
        CHECK(rc.q_value == 1);
        CHECK(rc.l_value == -2);

        rc = classify_vector(q, {2, 2, 1, 1, 3});
        CHECK(rc.tag == RootTag::RealRegular);

        rc = classify_vector(q, {2, 0, 0, 0, 1});
        CHECK(rc.tag == RootTag::NotRoot);
        CHECK(rc.q_value == 3);

        CHECK(classify_vector(q, {2, 2, 2, 2, 4}).tag == RootTag::Imaginary);
    }
    SECTION("positivity is required") {
        CHECK(thrown_code([&] { classify_vector(q, {0, 0, 0, 0, 0}); }) == ErrorCode::NotPositive);
        CHECK(thrown_code([&] { classify_vector(q, {1, 1, -1, 1, 1}); }) == ErrorCode::NotPositive);
    }
    SECTION("finite Dynkin roots are all singular") {
        Quiver d4 = build_catalog_quiver(GraphFamily::D, 4);
        for (const auto& [x, rc] : enumerate_positive_roots(d4, {2, 2, 2, 2})) {
            CHECK(rc.tag == RootTag::RealSingular);
            CHECK_FALSE(rc.l_known);
        }
    }
}

TEST_CASE("root enumeration matches the exhaustive scan oracle") {
    struct Case {
        Quiver q;
        GVec bound;
        size_t expect;  // oracle count, frozen
    };
    std::vector<Case> cases;
    cases.push_back({build_catalog_quiver(GraphFamily::A, 2), {2, 2}, 3});
    cases.push_back({build_catalog_quiver(GraphFamily::A, 3), {2, 2, 2}, 6});
    cases.push_back({build_catalog_quiver(GraphFamily::D, 4), {2, 2, 2, 2}, 12});
    {
        Quiver q = build_catalog_quiver(GraphFamily::D_ext, 4);
        cases.push_back({q, q.delta, 25});
    }
    for (auto& c : cases) {
        INFO(c.q.name);
        auto got = enumerate_positive_roots(c.q, c.bound);
        auto want = oracle::scan_positive_roots(c.q, c.bound);
        REQUIRE(got.size() == want.size());
        CHECK(got.size() == c.expect);
        for (size_t i = 0; i < got.size(); ++i) CHECK(got[i].first == want[i]);
    }

    SECTION("wider boxes and more graphs agree with the oracle") {
        std::vector<std::pair<Quiver, GVec>> more;
        more.emplace_back(build_catalog_quiver(GraphFamily::A_ext, 4), GVec{2, 2, 2, 2});
        {
            Quiver q = build_catalog_quiver(GraphFamily::D_ext, 4);
            more.emplace_back(q, scaled_delta(q, 2));
        }
        {
            Quiver q = build_catalog_quiver(GraphFamily::D_ext, 5);
            more.emplace_back(q, q.delta);
        }
        {
            Quiver q = build_catalog_quiver(GraphFamily::E6_ext);
            more.emplace_back(q, q.delta);
        }
        for (const auto& [q, bound] : more) {
            INFO(q.name);
            auto got = enumerate_positive_roots(q, bound);
            auto want = oracle::scan_positive_roots(q, bound);
            REQUIRE(got.size() == want.size());
            for (size_t i = 0; i < got.size(); ++i) CHECK(got[i].first == want[i]);
        }
    }

    SECTION("classification breakdown inside the D~(4) delta box") {
        Quiver q = build_catalog_quiver(GraphFamily::D_ext, 4);
        int singular = 0, regular = 0, imaginary = 0;
        for (const auto& [x, rc] : enumerate_positive_roots(q, q.delta)) {
            if (rc.tag == RootTag::RealSingular) ++singular;
            if (rc.tag == RootTag::RealRegular) ++regular;
            if (rc.tag == RootTag::Imaginary) ++imaginary;
        }
        CHECK(singular == 18);
        CHECK(regular == 6);
        CHECK(imaginary == 1);
    }

    SECTION("bound validation") {
        Quiver q = build_catalog_quiver(GraphFamily::D_ext, 4);
        CHECK(thrown_code([&] { enumerate_positive_roots(q, {0, 0, 0, 0, 0}); }) ==
              ErrorCode::NotPositive);
        Quiver e8 = build_catalog_quiver(GraphFamily::E8_ext);
        CHECK(thrown_code([&] { enumerate_positive_roots(e8, GVec(9, 100)); }) ==
              ErrorCode::BoundTooLarge);
    }
}

TEST_CASE("singular reduction paths") {
    Quiver q = build_catalog_quiver(GraphFamily::D_ext, 4);
    int z = q.index_of("z");
    SECTION("examples") {
        ReflectionPath p = singular_reduction_path(q, unit_vector(q, z));
        CHECK(p.steps.empty());
        CHECK(p.terminal == unit_vector(q, z));

        p = singular_reduction_path(q, {1, 1, 1, 1, 1});
        REQUIRE(p.steps.size() == 1);
        CHECK(p.steps[0] == Parity::Even);
        CHECK(p.terminal == unit_vector(q, z));
        CHECK(apply_path(q, p) == GVec{1, 1, 1, 1, 1});

        CHECK(thrown_code([&] { singular_reduction_path(q, q.delta); }) == ErrorCode::NotSingular);
        CHECK(thrown_code([&] { singular_reduction_path(q, {2, 2, 1, 1, 3}); }) ==
              ErrorCode::NotSingular);
    }
    SECTION("every singular root within 2*delta reduces and replays") {
        for (const Quiver& g : {build_catalog_quiver(GraphFamily::A_ext, 4),
                                build_catalog_quiver(GraphFamily::D_ext, 4),
                                build_catalog_quiver(GraphFamily::D_ext, 5),
                                build_catalog_quiver(GraphFamily::E6_ext)}) {
            INFO(g.name);
            for (const auto& [d, rc] : enumerate_positive_roots(g, scaled_delta(g, 2))) {
                if (rc.tag != RootTag::RealSingular) continue;
                ReflectionPath p = singular_reduction_path(g, d);
                CHECK(simple_root_vertex(p.terminal) >= 0);
                CHECK(apply_path(g, p) == d);
                for (size_t i = 0; i + 1 < p.steps.size(); ++i)
                    CHECK(p.steps[i] != p.steps[i + 1]);
            }
        }
    }
}

TEST_CASE("faithful reduction paths") {
    SECTION("D~(4) example") {
        Quiver q = build_catalog_quiver(GraphFamily::D_ext, 4);
        ReflectionPath p = faithful_reduction_path(q, {1, 1, 1, 1, 1});
        REQUIRE(p.steps.size() == 1);
        CHECK(p.steps[0] == Parity::Even);
        CHECK(p.terminal == GVec{0, 0, 0, 0, 1});
        CHECK(apply_path(q, p) == GVec{1, 1, 1, 1, 1});
    }
    SECTION("A~ admits no faithful root below delta") {
        Quiver q = build_catalog_quiver(GraphFamily::A_ext, 4);
        CHECK(thrown_code([&] { faithful_reduction_path(q, {1, 1, 1, 1}); }) ==
              ErrorCode::NotApplicable);  // the all-ones vector is delta itself
        CHECK(thrown_code([&] { faithful_reduction_path(q, {1, 1, 1, 0}); }) ==
              ErrorCode::NotApplicable);  // not faithful
    }
    SECTION("precondition violations") {
        Quiver q = build_catalog_quiver(GraphFamily::D_ext, 4);
        CHECK(thrown_code([&] { faithful_reduction_path(q, q.delta); }) ==
              ErrorCode::NotApplicable);
        CHECK(thrown_code([&] { faithful_reduction_path(q, {1, 1, 1, 1, 2}); }) ==
              ErrorCode::NotApplicable);
        CHECK(thrown_code([&] { faithful_reduction_path(q, {0, 1, 1, 1, 1}); }) ==
              ErrorCode::NotApplicable);
        Quiver d4 = build_catalog_quiver(GraphFamily::D, 4);
        CHECK(thrown_code([&] { faithful_reduction_path(d4, {1, 1, 1, 1}); }) ==
              ErrorCode::NotApplicable);
    }
    SECTION("every faithful root below delta on E6~ and D~(6) reduces to a zero coordinate") {
        for (const Quiver& g :
             {build_catalog_quiver(GraphFamily::E6_ext), build_catalog_quiver(GraphFamily::D_ext, 6)}) {
            INFO(g.name);
            int found = 0;
            for (const auto& [d, rc] : enumerate_positive_roots(g, g.delta)) {
                if (rc.q_value != 1) continue;
                bool faithful = std::all_of(d.begin(), d.end(), [](long long v) { return v > 0; });
                if (!faithful) continue;
                ++found;
                ReflectionPath p = faithful_reduction_path(g, d);
                CHECK(std::any_of(p.terminal.begin(), p.terminal.end(),
                                  [](long long v) { return v == 0; }));
                CHECK(vec_is_positive(p.terminal));
                CHECK(apply_path(g, p) == d);
            }
            CHECK(found > 0);
        }
    }
}

TEST_CASE("gvector and path JSON") {
    Quiver q = build_catalog_quiver(GraphFamily::D_ext, 4);
    GVec x{2, 2, 1, 1, 3};
    nlohmann::json j = gvec_to_json(q, x);
    CHECK(j["graph"] == "D~(4)");
    CHECK(j["entries"]["z"] == 3);
    CHECK(gvec_from_json(q, j) == x);

    ReflectionPath p = singular_reduction_path(q, {1, 1, 1, 1, 1});
    nlohmann::json jp = path_to_json(q, p);
    CHECK(jp["steps"] == nlohmann::json::array({"even"}));
    CHECK(jp["terminal"]["entries"]["z"] == 1);
}
