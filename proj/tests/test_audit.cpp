#include "doctest.h"

#include <json.hpp>

#include "transverse/audit.hpp"

using namespace transverse;
using namespace transverse::audit;
using gf::make_field;

namespace {

Form P(const FieldPtr& F, int nv, const char* s) { return parse_form(s, F, nv); }

// Mod-p univariate helpers, low degree first.
using Poly = std::vector<std::int64_t>;

std::int64_t inv_mod(std::int64_t a, std::int64_t p) {
    std::int64_t r = 1, e = p - 2;
    a %= p;
    while (e) {
        if (e & 1) r = r * a % p;
        a = a * a % p;
        e >>= 1;
    }
    return r;
}

void trim(Poly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

Poly rem(Poly a, const Poly& b, std::int64_t p) {
    trim(a);
    const std::int64_t lead = inv_mod(b.back(), p);
    while (a.size() >= b.size()) {
        const std::int64_t c = a.back() * lead % p;
        const std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = ((a[shift + i] - c * b[i]) % p + p) % p;
        trim(a);
    }
    return a;
}

std::size_t gcd_degree(Poly a, Poly b, std::int64_t p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a.size() - 1;
}

// Binary restriction f(s*u + v) as a polynomial in s, by interpolation at s = 0..d.
Poly restrict_interp(const Form& f, const std::vector<Elem>& u, const std::vector<Elem>& v, std::int64_t p) {
    const int d = f.degree();
    const FieldPtr& F = f.field();
    std::vector<std::int64_t> ys;
    for (int s = 0; s <= d; ++s) {
        std::vector<Elem> pt(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) pt[i] = F->add(F->mul(F->from_int(s), u[i]), v[i]);
        ys.push_back(static_cast<std::int64_t>(form_eval(f, pt, F).code));
    }
    Poly out(d + 1, 0);
    for (int j = 0; j <= d; ++j) {
        Poly basis{1};
        std::int64_t den = 1;
        for (int k = 0; k <= d; ++k) {
            if (k == j) continue;
            Poly next(basis.size() + 1, 0);
            for (std::size_t i = 0; i < basis.size(); ++i) {
                next[i] = ((next[i] - k * basis[i]) % p + p) % p;
                next[i + 1] = (next[i + 1] + basis[i]) % p;
            }
            basis = next;
            den = den * (((j - k) % p + p) % p) % p;
        }
        const std::int64_t c = ys[j] * inv_mod(den, p) % p;
        for (std::size_t i = 0; i < basis.size(); ++i) out[i] = (out[i] + c * basis[i]) % p;
    }
    return out;
}

// Non-transverse lines of a plane curve over a prime field F_p with p > d.
std::uint64_t tangent_lines_oracle(const Form& f, std::int64_t p) {
    const FieldPtr& F = f.field();
    const int d = f.degree();
    std::uint64_t bad = 0;
    for (const auto& L : enumerate_points(2, F)) {
        // Two spanning points u, v of the line with dual coordinates L.
        Matrix m{L.coords};
        Matrix ns = nullspace(*F, m, 3);
        Poly g = restrict_interp(f, ns[0], ns[1], p);
        trim(g);
        // Multiple root at v (s = infinity) when the degree drops by two or more.
        bool multiple = g.empty() || static_cast<int>(g.size()) - 1 < d - 1;
        if (!multiple && static_cast<int>(g.size()) - 1 >= 1) {
            Poly dg(g.size() - 1);
            for (std::size_t i = 1; i < g.size(); ++i) dg[i - 1] = static_cast<std::int64_t>(i) % p * g[i] % p;
            trim(dg);
            multiple = !dg.empty() && gcd_degree(g, dg, p) > 0;
            if (dg.empty()) multiple = true;
        }
        bad += multiple;
    }
    return bad;
}

} // namespace

TEST_CASE("bound expressions") {
    const Expr n = Expr::var("n"), q = Expr::var("q");
    const Expr e = (pow(q, n + Expr::num(1)) - Expr::num(1)) / (q - Expr::num(1));
    CHECK(e.eval({{"n", 2}, {"q", 3}}) == 13);
    CHECK(e.to_string() == "(q^(n + 1) - 1)/(q - 1)");
    CHECK((Expr::num(3) / Expr::num(2)).eval({}) == Rational(3, 2));
    CHECK_THROWS_AS(e.eval({{"n", 2}}), std::out_of_range);
    CHECK_THROWS_AS((Expr::num(1) / (q - q)).eval({{"q", 4}}), std::domain_error);

    CHECK(nontransverse_lines_bound().formula.eval({{"d", 2}, {"q", 5}}) == 18);
    CHECK(irreducible_curve_bound().formula.eval({{"d", 3}, {"q", 7}}) == 56);
    CHECK(bound_bad_hyperplanes(2, 2, 5) == 7);
    CHECK(bound_bad_hyperplanes(3, 0, 4) == 151);
    CHECK(tangent_superspaces_bound().formula.eval({{"n", 3}, {"d", 3}, {"r", 1}, {"q", 13}}) == 84);
    CHECK(dual_contained_bound().formula.eval({{"n", 3}, {"d", 3}}) == 12);
    for (int d = 1; d <= 8; ++d) {
        Rational best = 0;
        for (int t = 0; t <= d; ++t) best = std::max(best, phi_bound().formula.eval({{"d", d}, {"t", t}}));
        CHECK(best == d * (d - 1));
    }
}

TEST_CASE("non-transverse lines to plane curves") {
    auto F5 = make_field(5, 1);
    auto conic = count_nontransverse_lines({"conic", F5, {P(F5, 3, "x0*x2 - x1^2")}});
    REQUIRE(conic.size() == 2);
    CHECK(conic[0].observed == 6);
    CHECK(*conic[0].bound == 18);
    CHECK(conic[0].observed == tangent_lines_oracle(P(F5, 3, "x0*x2 - x1^2"), 5));
    CHECK(conic[1].experiment.find("irreducible") != std::string::npos);

    auto F7 = make_field(7, 1);
    const Form cusp = P(F7, 3, "x1^2*x2 - x0^3");
    auto c = count_nontransverse_lines({"cusp", F7, {cusp}}, {.jobs = 3});
    CHECK(c[0].observed == tangent_lines_oracle(cusp, 7));
    CHECK(c[1].observed <= 56);
    CHECK(c[1].passed());

    CurveFixture three{"three", F7, {P(F7, 3, "x0"), P(F7, 3, "x1"), P(F7, 3, "x0 + x1")}};
    auto t = count_nontransverse_lines(three);
    REQUIRE(t.size() == 1);
    CHECK(t[0].observed == 8);
    CHECK(t[0].observed == tangent_lines_oracle(three.form(), 7));
    CHECK(*t[0].bound == 72);
    CHECK(t[0].params.t == 3);

    CurveFixture twice{"twice", F7, {P(F7, 3, "x0"), P(F7, 3, "3*x0")}};
    CHECK_THROWS_AS(twice.validate(), GeometryError);
}

TEST_CASE("bad hyperplanes") {
    for (std::uint64_t p : {3, 5, 7}) {
        auto F = make_field(p, 1);
        auto rep = count_bad_hyperplanes(Hypersurface(P(F, 4, "x0*x1")), 2);
        CHECK(rep.observed == p + 1);
        CHECK(*rep.bound == p + 2);
        CHECK(rep.details["not_proper"] == 2);
        CHECK(rep.details["non_reduced"] == static_cast<std::int64_t>(p - 1));
        CHECK(rep.details["phi_max"] == 2);
        CHECK(rep.passed());
    }
    auto F5 = make_field(5, 1);
    auto quadric = count_bad_hyperplanes(Hypersurface(P(F5, 4, "x0*x1 - x2*x3 + x0^2")), 0);
    // Sections of a smooth quadric surface are conics, never double lines.
    CHECK(quadric.observed == 0);
    CHECK(quadric.details["tangent"] == 36);
    CHECK(quadric.details["phi_max"] == 2);

    auto F3 = make_field(3, 1);
    auto quartic = count_bad_hyperplanes(Hypersurface(P(F3, 4, "x0^4 + x1^4 + x2^4 + x0*x1*x2*x3")), 0);
    CHECK(quartic.details["phi_max"] == 12);
    CHECK(quartic.details["pool"] == 40);
    CHECK_THROWS_AS(count_bad_hyperplanes(Hypersurface(P(F3, 4, "x0*x1")), 3), std::invalid_argument);
}

TEST_CASE("bad superspaces") {
    auto F13 = make_field(13, 1);
    auto S = Hypersurface(P(F13, 4, "x0^3 + x1^3 + x2^3 + x3^3"));
    auto flag = find_very_transverse_flag(S, 1);
    REQUIRE(flag.complete);
    auto reps = count_bad_superspaces(S, flag.steps[0].H, 1);
    REQUIRE(reps.size() == 3);
    CHECK(reps[0].observed <= 84);
    CHECK(*reps[0].bound == 84);
    CHECK(reps[0].details["tangency_mismatch"] == 0);
    CHECK(reps[1].observed <= 12);
    CHECK(reps[2].observed == reps[0].observed + reps[1].observed);
    CHECK(reps[2].details["pool"] == 183);
    for (const auto& r : reps) CHECK(r.passed());

    // Lines through a point off a smooth plane cubic: tangent count against a direct scan.
    auto F7 = make_field(7, 1);
    const Form cubic = P(F7, 3, "x0^3 + x1^3 + x2^3");
    Hypersurface C(cubic);
    auto pt = LinearSubspace::from_rows(F7, {{F7->one(), F7->one(), F7->one()}});
    auto lines = count_bad_superspaces(C, pt, 1);
    std::uint64_t expected = 0;
    for (std::uint64_t i = 0; i < 8; ++i) expected += !is_transverse(C, SuperspaceEnumerator(pt, 1).at(i));
    CHECK(lines[0].observed == expected);
    CHECK(lines[1].observed == 0);
    CHECK(lines[0].observed <= 6);

    CHECK_THROWS_AS(count_bad_superspaces(Hypersurface(P(F7, 3, "x0*x1*x2")), pt, 1), NotSmooth);
}

TEST_CASE("space filling") {
    auto reps = audit_space_filling(2, 2, 2);
    REQUIRE(reps.size() == 3);
    CHECK(reps[0].details["forms_checked"] == 7);
    CHECK(reps[1].details["forms_checked"] == 63);
    CHECK(reps[0].observed == 0);
    CHECK(reps[1].observed == 0);
    CHECK(reps[2].observed == 7);
    CHECK(*reps[2].bound == 7);
    for (const auto& r : reps) CHECK(r.passed());

    auto line = audit_space_filling(1, 3, 5);
    REQUIRE(line.size() == 4);
    CHECK(line[2].params.d == 3);
    CHECK(line[3].observed == 4);

    CHECK_THROWS_AS(audit_space_filling(2, 6, 2), std::invalid_argument);
}

TEST_CASE("separation and inequalities") {
    auto quad = separation_search({.n = 3, .d = 2, .p = 5, .m = 1, .r = 1, .samples = 2});
    CHECK(quad.observed == 0);
    CHECK(quad.verdict == "observational");
    CHECK(quad.details["subspaces_checked"] == 2 * 806);
    CHECK_FALSE(quad.bound);

    auto ineq = inequality_report(5, 4);
    CHECK(ineq.observed == 0);
    CHECK(ineq.passed());
    CHECK(ineq.details.size() >= 10);
}

TEST_CASE("report serialization") {
    auto F5 = make_field(5, 1);
    auto a = count_nontransverse_lines({"conic", F5, {P(F5, 3, "x0*x2 - x1^2")}}, {.jobs = 1});
    auto b = count_nontransverse_lines({"conic", F5, {P(F5, 3, "x0*x2 - x1^2")}}, {.jobs = 4});
    a.push_back(inequality_report(3, 3));
    b.push_back(inequality_report(3, 3, {.jobs = 4}));
    CHECK(to_json(a) == to_json(b));
    CHECK(to_csv(a) == to_csv(b));

    auto j = nlohmann::json::parse(to_json(a));
    REQUIRE(j.size() == 3);
    CHECK(j[0]["observed"] == 6);
    CHECK(j[0]["bound"] == 18);
    CHECK(j[0]["params"]["q"] == 5);
    CHECK(j[0]["params"]["r"].is_null());
    CHECK(j[0]["runtime_ms"].is_null());
    CHECK(j[0]["bound_formula"] == "3/2*d*(d - 1)*(q + 1)");

    AuditReport half;
    half.experiment = "x,y";
    half.bound = Rational(7, 2);
    half.verdict = "pass";
    const std::string csv = to_csv({half});
    CHECK(csv.find("\"x,y\",,,,,,0,7/2,") != std::string::npos);
    CHECK(nlohmann::json::parse(to_json({half}))[0]["bound"] == "7/2");

    auto timed = inequality_report(3, 3, {.timing = true});
    CHECK(timed.runtime_ms.has_value());
}
