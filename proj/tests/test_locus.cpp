#include "doctest.h"

#include <set>

#include "transverse/locus.hpp"

using namespace transverse;
using gf::FieldElement;
using gf::make_field;

namespace {

Hypersurface hyp(const FieldPtr& F, int n, const char* s) { return Hypersurface(parse_form(s, F, n + 1)); }

ProjectivePoint pt(const FieldPtr& F, std::vector<std::int64_t> v) {
    std::vector<Elem> c;
    for (auto x : v) c.push_back(F->from_int(x));
    return make_point(F, c);
}

bool vanishes(const SchemeSpec& S, const ProjectivePoint& P) {
    for (const auto& f : S.forms)
        if (form_eval(f, P.coords, P.field).code != 0) return false;
    return true;
}

bool on(const Hypersurface& X, const ProjectivePoint& P) { return form_eval(X.form(), P.coords, P.field).code == 0; }

} // namespace

TEST_CASE("Gauss map") {
    auto F5 = make_field(5, 1);
    auto conic = hyp(F5, 2, "x0*x2 - x1^2");
    auto g = gauss_image(conic, pt(F5, {0, 0, 1}));
    REQUIRE(g);
    CHECK(*g == pt(F5, {1, 0, 0}));

    auto F3 = make_field(3, 1);
    auto fermat = hyp(F3, 2, "x0^3 + x1^3 + x2^3");
    for (const auto& P : enumerate_points(2, F3))
        if (on(fermat, P)) CHECK_FALSE(gauss_image(fermat, P));

    auto F7 = make_field(7, 1);
    auto quad = hyp(F7, 3, "x0^2 + x1^2 + 3*x2^2 + x3^2");
    std::set<ProjectivePoint> images;
    std::size_t count = 0;
    for (const auto& P : enumerate_points(3, F7)) {
        if (!on(quad, P)) continue;
        ++count;
        auto im = gauss_image(quad, P);
        REQUIRE(im);
        images.insert(*im);
    }
    CHECK(count > 0);
    CHECK(images.size() == count);
}

TEST_CASE("singular schemes") {
    auto F5 = make_field(5, 1);
    auto fermat = hyp(F5, 2, "x0^3 + x1^3 + x2^3");
    const SchemeSpec S = singular_scheme(fermat);
    CHECK(S.forms.size() == 4);
    for (int k = 1; k <= 4; ++k)
        for (const auto& P : enumerate_points(2, F5->extension(k))) CHECK_FALSE(vanishes(S, P));

    auto dbl = singular_scheme(hyp(F5, 2, "x0^2*x1"));
    for (std::int64_t a = 0; a < 5; ++a) CHECK(vanishes(dbl, pt(F5, {0, 1, a})));

    auto cusp = singular_scheme(hyp(F5, 2, "x1^2*x2 - x0^3"));
    std::vector<ProjectivePoint> sing;
    for (const auto& P : enumerate_points(2, F5))
        if (vanishes(cusp, P)) sing.push_back(P);
    REQUIRE(sing.size() == 1);
    CHECK(sing[0] == pt(F5, {0, 0, 1}));
}

TEST_CASE("D_ij forms") {
    auto F5 = make_field(5, 1);
    auto X = hyp(F5, 2, "x0^2 + x1^2 + x2^2");
    CHECK(build_D_ij(X, 0, 1) == parse_form("4*x0*x1^5 - 4*x0^5*x1", F5, 3));
    auto F3 = make_field(3, 1);
    CHECK(build_D_ij(hyp(F3, 2, "x0^2*x1 + x2^3 + x0*x1*x2"), 0, 2).degree() == 8);
    CHECK(build_D_ij(hyp(F3, 2, "x0^3 + x1^3 + x2^3"), 0, 1).is_zero());

    // An irreducible conic has a point off some D_ij.
    auto conic = hyp(F5, 2, "x0*x2 - x1^2");
    bool witnessed = false;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const Form D = build_D_ij(conic, i, j);
            for (const auto& P : enumerate_points(2, F5->extension(2)))
                if (on(conic, P) && form_eval(D, P.coords, P.field).code != 0) witnessed = true;
        }
    CHECK(witnessed);
}

TEST_CASE("Z_X membership") {
    auto F5 = make_field(5, 1);
    auto conic = hyp(F5, 2, "x0*x2 - x1^2");
    for (const auto& P : enumerate_points(2, F5))
        if (on(conic, P)) CHECK(in_Z_X(conic, P));
    auto F25 = F5->extension(2);
    int on_curve = 0, outside = 0;
    for (const auto& P : enumerate_points(2, F25)) {
        if (!on(conic, P)) continue;
        ++on_curve;
        bool rational = true;
        for (auto c : P.coords) rational &= in_subfield(FieldElement(F25, c), 1);
        if (!rational) {
            CHECK_FALSE(in_Z_X(conic, P));
            ++outside;
        }
    }
    CHECK(on_curve == 26);
    CHECK(outside == 20);

    auto F7 = make_field(7, 1);
    CHECK(in_Z_X(hyp(F7, 2, "x1^2*x2 - x0^3"), pt(F7, {0, 0, 1})));

    // Membership matches "singular or rational tangent direction" on random surfaces.
    Rng rng(0x2e);
    for (auto F : {make_field(2, 1), make_field(3, 1), make_field(5, 1)}) {
        for (int trial = 0; trial < 6; ++trial) {
            const int n = 2 + static_cast<int>(rng() % 2);
            const int d = 2 + static_cast<int>(rng() % 2);
            std::vector<std::pair<std::vector<int>, Elem>> terms;
            for (int k = 0; k < 6; ++k) {
                std::vector<int> e(n + 1, 0);
                for (int j = 0; j < d; ++j) ++e[rng() % (n + 1)];
                terms.emplace_back(e, F->random(rng));
            }
            Form f = Form::from_terms(F, n + 1, d, terms);
            if (f.is_zero()) continue;
            Hypersurface X(f);
            for (int k = 1; k <= (n == 2 ? 3 : 2); ++k) {
                auto E = F->extension(k);
                for (const auto& P : enumerate_points(n, E)) {
                    if (!on(X, P)) continue;
                    auto g = gauss_image(X, P);
                    bool expected = !g;
                    if (g) {
                        expected = true;
                        for (auto c : g->coords) expected &= in_subfield(FieldElement(E, c), 1);
                    }
                    CHECK(in_Z_X(X, P) == expected);
                }
            }
        }
    }
}

TEST_CASE("Z_r membership") {
    auto F3 = make_field(3, 1);
    auto H0 = parse_subspace("1,0,0", F3, 2);
    for (const auto& P : enumerate_points(2, F3)) CHECK(in_Z_r(H0, P));
    auto F9 = F3->extension(2);
    const Elem one = F9->one();
    CHECK(in_Z_r(H0, make_point(F9, {one, F9->zero(), F9->zero()})));
    for (std::uint64_t i = 0; i < 9; ++i) {
        const Elem t = F9->element(i);
        const bool rational = in_subfield(FieldElement(F9, t), 1);
        CHECK(in_Z_r(H0, make_point(F9, {F9->zero(), t, one})) == rational);
    }

    // Every F_q-line through H0 lies in Z_1, including its points over F_{q^2}.
    for (const auto& L : enumerate_superspaces(H0, 1)) {
        const Matrix rows = embed_matrix(L.rows(), F3, F9);
        for (const auto& u : enumerate_points(1, F9)) {
            std::vector<Elem> x(3, F9->zero());
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 3; ++j) x[j] = F9->add(x[j], F9->mul(u.coords[i], rows[i][j]));
            CHECK(in_Z_r(H0, make_point(F9, x)));
        }
    }

    // Rational lines through a point meeting a smooth conic: at most 2(q+1).
    for (std::uint64_t q : {3, 5}) {
        auto F = make_field(q, 1);
        auto conic = hyp(F, 2, "x0*x2 - x1^2");
        auto E = F->extension(2);
        auto P0 = parse_subspace("0,1,0", F, 2);
        std::set<LinearSubspace> lines;
        for (const auto& P : enumerate_points(2, E)) {
            if (!on(conic, P) || !in_Z_r(P0, P)) continue;
            for (const auto& L : enumerate_superspaces(P0, 1))
                if (subspace_contains(L, P)) lines.insert(L);
        }
        CHECK(lines.size() <= 2 * (q + 1));
    }
}

TEST_CASE("tangency loci") {
    auto F5 = make_field(5, 1);
    auto cusp = hyp(F5, 2, "x1^2*x2 - x0^3");
    auto whole = tangency_locus(cusp, LinearSubspace::whole_space(F5, 2));
    auto sing = singular_scheme(cusp);
    for (const auto& P : enumerate_points(2, F5)) CHECK(vanishes(whole, P) == vanishes(sing, P));

    auto Q = hyp(F5, 3, "x0*x1 - x2*x3 + x0^2");
    auto P0 = parse_subspace("0,0,1,1", F5, 3);
    auto locus = tangency_locus(Q, P0);
    CHECK(locus.forms.size() == 2);
    std::uint64_t pts = 0;
    for (const auto& P : enumerate_points(3, F5)) pts += vanishes(locus, P);
    CHECK(pts >= 1);
    CHECK(pts <= 2 * (5 + 1));
}
