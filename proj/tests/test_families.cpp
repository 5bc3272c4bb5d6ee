#include <catch2/catch_amalgamated.hpp>

#include <osrep/equivalence.hpp>
#include <osrep/families.hpp>

using namespace osrep;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::NumericalFailure;
}

double chi_at(const Representation& t, const std::string& v) {
    return orthoscalarity_report(t).character.values[t.quiver.index_of(v)];
}

bool dims_are_delta(const Representation& t) {
    for (int v = 0; v < t.quiver.size(); ++v)
        if (t.dims[v] != static_cast<int>(t.quiver.delta[v])) return false;
    return true;
}

}  // namespace

TEST_CASE("free parameter count is one more than the vertex count") {
    CHECK(count_free_parameters("A~4") == 5);
    CHECK(count_free_parameters("A~6") == 7);
    CHECK(count_free_parameters("D~4") == 6);
    CHECK(count_free_parameters("D~6") == 8);
    CHECK(count_free_parameters("E6~") == 8);
    CHECK(count_free_parameters("E7~") == 9);
    CHECK(count_free_parameters("E8~") == 10);
    CHECK(code_of([] { count_free_parameters("D4"); }) == ErrorCode::NoDelta);
    CHECK(code_of([] { count_free_parameters("X9"); }) == ErrorCode::UnknownGraph);
}

TEST_CASE("cycle family with unit moduli has constant character two") {
    Quiver q = parse_graph_name("A~4");
    Representation t = construct_A_family(q, {1, 1, 1}, 1, 1.0);
    OrthoReport rep = orthoscalarity_report(t);
    CHECK(rep.defect == 0.0);
    for (double c : rep.character.values) CHECK(c == Catch::Approx(2.0));
    CHECK(is_schur(t));
}

TEST_CASE("cycle phase separates classes and is read modulo two pi") {
    Quiver q = parse_graph_name("A~4");
    Representation base = construct_A_family(q, {1, 1, 1}, 1, 1.0);
    CHECK_FALSE(unitary_equivalent(base, construct_A_family(q, {1, 1, 1}, 1, 2.0)).equivalent);
    CHECK(unitary_equivalent(base, construct_A_family(q, {1, 1, 1}, 1, 1.0 + 2 * M_PI))
              .equivalent);
}

TEST_CASE("cycle family input validation") {
    Quiver q = parse_graph_name("A~4");
    CHECK(code_of([&] { construct_A_family(q, {1, 1, 0}, 1, 0.5); }) ==
          ErrorCode::NonPositiveModulus);
    CHECK(code_of([&] { construct_A_family(q, {1, 1, 1}, -2, 0.5); }) ==
          ErrorCode::NonPositiveModulus);
    CHECK(code_of([&] { construct_A_family(q, {1, 1}, 1, 0.5); }) == ErrorCode::InvalidSize);
    Quiver d4 = parse_graph_name("D~4");
    CHECK(code_of([&] { construct_A_family(d4, {1, 1, 1, 1}, 1, 0.5); }) ==
          ErrorCode::InvalidSize);
}

TEST_CASE("two-strand fork on the four-vertex star matches the worked character") {
    Quiver q = parse_graph_name("D~4");
    DFamilyParams p;
    p.x = {1, 2};
    p.y0 = 2;
    p.phi1 = M_PI / 4;
    p.phi2 = M_PI / 4;
    p.theta = 0.7;
    Representation t = construct_D_family(q, p);
    CHECK(orthoscalarity_report(t).defect < 1e-12);
    CHECK(chi_at(t, "z") == Catch::Approx(5.0));
    for (const char* leaf : {"a1", "a2", "b1", "b2"})
        CHECK(chi_at(t, leaf) == Catch::Approx(2.5));
    CHECK(is_schur(t));
    CHECK(dims_are_delta(t));
}

TEST_CASE("second strand recurrence reports the first failing index") {
    Quiver q = parse_graph_name("D~5");
    DFamilyParams p;
    p.x = {3, 1, 1};
    p.y0 = 1;
    p.phi1 = 0.5;
    p.phi2 = 0.5;
    p.theta = 0.5;
    try {
        construct_D_family(q, p);
        FAIL("expected RecurrenceNegative");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RecurrenceNegative);
        CHECK(std::string(e.what()).find("index 2") != std::string::npos);
    }
}

TEST_CASE("matched strand moduli take the degenerate route") {
    Quiver q = parse_graph_name("D~6");
    DFamilyParams p;
    p.x = {1, 1.3, 0.8, 1.1};
    p.y0 = 1;  // equal to x0: the recurrence is skipped entirely
    p.phi1 = 0.6;
    p.phi2 = 0.9;
    p.theta = 1.2;
    CHECK(d_family_is_degenerate(p));
    Representation t = construct_D_family(q, p);
    CHECK(orthoscalarity_report(t).defect < 1e-12);
    CHECK(dims_are_delta(t));

    p.y0 = 1.2;
    CHECK_FALSE(d_family_is_degenerate(p));
}

TEST_CASE("chain characters are consecutive squared-moduli sums") {
    Quiver q = parse_graph_name("D~7");
    DFamilyParams p;
    p.x = {1.0, 1.2, 0.9, 1.3, 1.1};
    p.y0 = 1.25;
    p.phi1 = 0.7;
    p.phi2 = 1.0;
    p.theta = 2.0;
    Representation t = construct_D_family(q, p);
    CHECK(orthoscalarity_report(t).defect < 1e-10);
    for (size_t i = 0; i + 1 < p.x.size(); ++i) {
        double want = p.x[i] * p.x[i] + p.x[i + 1] * p.x[i + 1];
        CHECK(chi_at(t, "c" + std::to_string(i + 1)) == Catch::Approx(want).margin(1e-10));
    }
    CHECK(is_schur(t));
}

TEST_CASE("odd star size places row blocks on the far fork") {
    Quiver q = parse_graph_name("D~5");
    DFamilyParams p;
    p.x = {1.0, 1.1, 0.95};
    p.y0 = 1.2;
    p.phi1 = 0.8;
    p.phi2 = 0.6;
    p.theta = 1.0;
    Representation t = construct_D_family(q, p);
    CHECK(orthoscalarity_report(t).defect < 1e-12);
    CHECK(dims_are_delta(t));
    CHECK(is_schur(t));
}

TEST_CASE("parameter point JSON round-trips and accepts the moduli shorthand") {
    ParameterPoint pt{"E6~", {{"phi1", 0.5}, {"psi2", 1.25}}};
    ParameterPoint back = parameter_point_from_json(parameter_point_to_json(pt));
    CHECK(back.family == "E6~");
    CHECK(back.at("phi1") == 0.5);
    CHECK(back.at("psi2") == 1.25);
    CHECK(code_of([&] { back.at("psi3"); }) == ErrorCode::ParseError);

    nlohmann::json shorthand = {{"moduli", {1.0, 2.0, 0.5, 1.5}}, {"phase", 1.0}};
    ParameterPoint cyc = parameter_point_from_json(shorthand);
    CHECK(cyc.at("m1") == 1.0);
    CHECK(cyc.at("m4") == 1.5);
    CHECK(cyc.at("phase") == 1.0);
}

TEST_CASE("arm closing quadratic splits into roots of opposite sign") {
    auto [p, m] = arm_quadratic_split(0.0, 1.0);
    CHECK(p == Catch::Approx(1.0));
    CHECK(m == Catch::Approx(1.0));
    auto [p2, m2] = arm_quadratic_split(3.0, 4.0);
    CHECK(p2 == Catch::Approx(4.0));
    CHECK(m2 == Catch::Approx(1.0));
    CHECK(code_of([] { arm_quadratic_split(1.0, -0.5); }) == ErrorCode::CompletionInfeasible);
}

TEST_CASE("six-vertex band construction validates its inputs") {
    E6Params p;
    p.phi1 = 0.4;
    p.phi2 = 0.9;
    p.phi3 = 0.7;
    p.psi1 = 0.8;
    p.psi2 = 0.0;  // kills the band support
    p.psi3 = 0.6;
    p.psi4 = 0.5;
    CHECK(code_of([&] { construct_E6_basis(p); }) == ErrorCode::DegenerateParameters);

    p.psi2 = 0.6;
    p.theta2 = 0.3;  // phases that do not close the rows
    p.theta3 = 0.4;
    CHECK(code_of([&] { construct_E6_basis(p); }) == ErrorCode::ConstraintViolated);
}

TEST_CASE("solved band points have vanishing constraint residual") {
    for (const char* fam : {"E6~", "E7~", "E8~"}) {
        FamilySample s = construct_family_seeded(fam, 17);
        CHECK(family_constraint_residual(s.point) <= 1e-12);
        ParameterPoint off = s.point;
        off.params["theta2"] += 0.2;
        CHECK(family_constraint_residual(off) > 1e-3);
    }
}

TEST_CASE("solving the same free parameters twice is bit-identical") {
    FamilySample s = construct_family_seeded("E8~", 23);
    std::map<std::string, double> free_params;
    for (const char* k :
         {"phi1", "phi4", "phi5", "psi1", "psi2", "psi4", "psi5", "psi6", "scale"})
        free_params[k] = s.point.at(k);
    ParameterPoint a = solve_family_constraint("E8~", free_params);
    ParameterPoint b = solve_family_constraint("E8~", free_params);
    REQUIRE(a.params.size() == b.params.size());
    for (const auto& [k, v] : a.params) {
        CHECK(v == b.params.at(k));
        if (k.rfind("theta", 0) == 0) {
            CHECK(v >= 0.0);
            CHECK(v < 2 * M_PI);
        }
    }
}

TEST_CASE("gauge angle on the six-vertex band never changes the class") {
    FamilySample s = construct_family_seeded("E6~", 5);
    ParameterPoint shifted = s.point;
    shifted.params["theta1"] = 1.3;
    Representation other = construct_delta_family(shifted);
    CHECK(unitary_equivalent(s.rep, other).equivalent);
}

TEST_CASE("six-vertex character relation holds on sampled members") {
    Quiver q = parse_graph_name("E6~");
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        FamilySample s = construct_family_seeded("E6~", seed);
        OrthoReport rep = orthoscalarity_report(s.rep);
        auto chi = [&](const char* v) { return rep.character.values[q.index_of(v)]; };
        double lhs = chi("a1") + chi("b1") + chi("c1") + 3 * chi("z");
        double rhs = 2 * (chi("a2") + chi("b2") + chi("c2"));
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("seven-vertex band anchors the arm at the top singular value") {
    Quiver q = parse_graph_name("E7~");
    FamilySample s = construct_family_seeded("E7~", 3);
    Representation norm = scale_blocks(s.rep, 1.0 / s.point.at("scale"));
    Mat a3_band = norm.blocks[q.arrow_between(q.index_of("a3"), q.index_of("z"))];
    Eigen::JacobiSVD<Mat> svd(a3_band);
    double x = svd.singularValues()(0);
    CHECK(chi_at(norm, "a3") == Catch::Approx(x * x).margin(1e-9));
}

TEST_CASE("seven-vertex band rejects unbalanced far-arm columns") {
    E7Params p;
    p.phi1 = 0.6;
    p.phi2 = 0.8;
    p.phi3 = 0.5;
    p.phi4 = 1.2;  // not the balancing value
    p.psi1 = 1.1;
    p.psi2 = 0.4;
    p.psi3 = 0.7;
    p.psi4 = 0.8;
    p.psi5 = 1.0;
    CHECK(code_of([&] { construct_E7_basis(p); }) == ErrorCode::ConstraintViolated);
}

TEST_CASE("closing the seven-vertex rows with a vanishing last angle needs a degenerate band") {
    // With psi5 = 0 the far-arm length balance loses its phi4 dial, so solving
    // is only possible on a degenerate locus; away from it there is no solution.
    std::map<std::string, double> f = {{"phi1", 0.6}, {"phi2", 0.8},  {"phi3", 0.5},
                                       {"psi1", 1.1}, {"psi2", 0.35}, {"psi3", 0.7},
                                       {"psi4", 0.8}, {"psi5", 0.0}};
    CHECK(code_of([&] { solve_family_constraint("E7~", f); }) == ErrorCode::NoSolution);
}

TEST_CASE("sampled family members sit in dimension delta, scalar and Schur") {
    for (const char* fam : {"A~4", "A~6", "D~4", "D~5", "D~6", "E6~", "E7~", "E8~"}) {
        std::vector<Representation> reps;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            FamilySample s = construct_family_seeded(fam, seed);
            CHECK(dims_are_delta(s.rep));
            CHECK(orthoscalarity_report(s.rep).defect <= 1e-9);
            CHECK(is_schur(s.rep));
            reps.push_back(std::move(s.rep));
        }
        for (size_t i = 0; i < reps.size(); ++i)
            for (size_t j = i + 1; j < reps.size(); ++j)
                CHECK_FALSE(unitary_equivalent(reps[i], reps[j]).equivalent);
    }
}

TEST_CASE("separating one free coordinate separates the classes") {
    struct Pick {
        const char* family;
        const char* coord;
    };
    const Pick picks[] = {{"A~4", "m2"},  {"A~6", "phase"}, {"D~4", "x0"},   {"D~6", "theta"},
                          {"E6~", "phi1"}, {"E7~", "psi3"},  {"E8~", "psi4"}, {"E6~", "psi2"},
                          {"E7~", "phi2"}, {"E8~", "phi5"}};
    int done = 0;
    for (const Pick& pick : picks) {
        for (std::uint64_t seed = 40;; ++seed) {
            REQUIRE(seed < 60);
            FamilySample s = construct_family_seeded(pick.family, seed);
            std::map<std::string, double> f;
            Quiver q = parse_graph_name(pick.family);
            if (q.name.rfind("A~", 0) == 0) {
                for (int k = 1; k <= q.size(); ++k)
                    f["m" + std::to_string(k)] = s.point.at("m" + std::to_string(k));
                f["phase"] = s.point.at("phase");
            } else if (q.name.rfind("D~", 0) == 0) {
                for (int k = 0; k <= q.size() - 4; ++k)
                    f["x" + std::to_string(k)] = s.point.at("x" + std::to_string(k));
                for (const char* k : {"y0", "phi1", "phi2", "theta"}) f[k] = s.point.at(k);
            } else {
                for (const auto& [k, v] : s.point.params)
                    if (k.rfind("theta", 0) != 0 || q.name == "E6~") f[k] = v;
                if (q.name == "E6~") {
                    f.erase("theta2");
                    f.erase("theta3");
                } else if (q.name == "E7~") {
                    f.erase("phi4");
                } else {
                    f.erase("phi2");
                    f.erase("psi3");
                    f.erase("phi3");
                    f.erase("phi6");
                }
            }
            f[pick.coord] += 0.05;
            try {
                ParameterPoint moved = solve_family_constraint(pick.family, f);
                Representation other = construct_delta_family(moved);
                CHECK_FALSE(unitary_equivalent(s.rep, other).equivalent);
                ++done;
                break;
            } catch (const Error&) {
                continue;  // the shifted point fell off the family; resample
            }
        }
    }
    CHECK(done == 10);
}

TEST_CASE("the central band determines the whole representation") {
    for (const char* fam : {"E6~", "E7~", "E8~"}) {
        Quiver q = parse_graph_name(fam);
        FamilySample s = construct_family_seeded(fam, 7);
        Representation norm = scale_blocks(s.rep, 1.0 / s.point.at("scale"));
        Mat band = z_band(norm);
        Representation back;
        if (q.name == "E6~")
            back = complete_E6(q, band);
        else if (q.name == "E7~")
            back = complete_E7(q, band);
        else
            back = complete_E8(q, band);
        EquivalenceResult eq = unitary_equivalent(norm, back);
        CHECK(eq.equivalent);
        CHECK(eq.residual < 1e-8);
    }
}

TEST_CASE("completion rejects a band whose near arm cannot close") {
    Quiver q = parse_graph_name("E6~");
    FamilySample s = construct_family_seeded("E6~", 9);
    Mat band = z_band(scale_blocks(s.rep, 1.0 / s.point.at("scale")));
    Mat swapped = band;
    swapped.col(0) = band.col(1);  // the short column may not come first
    swapped.col(1) = band.col(0);
    try {
        complete_E6(q, swapped);
        FAIL("expected CompletionInfeasible");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CompletionInfeasible);
        CHECK(std::string(e.what()).find("x0^2") != std::string::npos);
    }
}

TEST_CASE("completion rejects a band with an underdetermined closing block") {
    Quiver q = parse_graph_name("E6~");
    double s = 0.6, c = 0.8, a = 0.6, p = 0.6, f = std::sqrt(1 - 0.72);
    Mat band = Mat::Zero(3, 6);
    band(0, 0) = s;
    band(1, 1) = a;
    band(1, 2) = p;
    band(0, 3) = c;
    band(1, 4) = f;
    band(2, 5) = 1;
    CHECK(code_of([&] { complete_E6(q, band); }) == ErrorCode::CompletionInfeasible);
}

TEST_CASE("eight-vertex band with mismatched Gram spectra cannot close") {
    Quiver q = parse_graph_name("E8~");
    FamilySample s = construct_family_seeded("E8~", 13);
    ParameterPoint skewed = s.point;
    // phi2 only enters squared in the row identities, so the band stays valid
    // while the two Gram blocks drift apart.
    skewed.params["phi2"] += 0.1;
    E8Params p;
    p.phi1 = skewed.at("phi1");
    p.phi2 = skewed.at("phi2");
    p.phi3 = skewed.at("phi3");
    p.phi4 = skewed.at("phi4");
    p.phi5 = skewed.at("phi5");
    p.phi6 = skewed.at("phi6");
    p.psi1 = skewed.at("psi1");
    p.psi2 = skewed.at("psi2");
    p.psi3 = skewed.at("psi3");
    p.psi4 = skewed.at("psi4");
    p.psi5 = skewed.at("psi5");
    p.psi6 = skewed.at("psi6");
    p.theta1 = skewed.at("theta1");
    p.theta2 = skewed.at("theta2");
    Mat band = construct_E8_basis(p);
    CHECK(code_of([&] { complete_E8(q, band); }) == ErrorCode::CompletionInfeasible);
}

TEST_CASE("eight-vertex members balance the far-arm column lengths") {
    Quiver q = parse_graph_name("E8~");
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        FamilySample s = construct_family_seeded("E8~", seed);
        const Mat& c_band = s.rep.blocks[q.arrow_between(q.index_of("z"), q.index_of("c1"))];
        double len0 = c_band.col(0).squaredNorm();
        CHECK(std::abs(c_band.col(1).squaredNorm() - len0) < 1e-10);
        CHECK(std::abs(c_band.col(2).squaredNorm() - len0) < 1e-10);
    }
}

TEST_CASE("family dispatcher validates names and scaling") {
    CHECK(code_of([] {
              construct_delta_family(ParameterPoint{"X9", {}});
          }) == ErrorCode::UnknownGraph);
    CHECK(code_of([] {
              construct_delta_family(ParameterPoint{"E6", {}});
          }) == ErrorCode::NoDelta);
    FamilySample s = construct_family_seeded("E6~", 2);
    ParameterPoint bad = s.point;
    bad.params["scale"] = -1.0;
    CHECK(code_of([&] { construct_delta_family(bad); }) == ErrorCode::NotPositive);

    ParameterPoint doubled = s.point;
    doubled.params["scale"] = 2.0 * s.point.at("scale");
    Representation big = construct_delta_family(doubled);
    OrthoReport small_rep = orthoscalarity_report(s.rep);
    OrthoReport big_rep = orthoscalarity_report(big);
    for (int v = 0; v < big.quiver.size(); ++v)
        CHECK(big_rep.character.values[v] ==
              Catch::Approx(4.0 * small_rep.character.values[v]));
}

TEST_CASE("cycle members build from the JSON shorthand") {
    nlohmann::json j = {{"family", "A~4"}, {"params", {{"moduli", {1, 1, 1, 1}}, {"phase", 1.0}}}};
    ParameterPoint pt = parameter_point_from_json(j);
    Representation t = construct_delta_family(pt);
    for (double c : orthoscalarity_report(t).character.values) CHECK(c == Catch::Approx(2.0));
}
