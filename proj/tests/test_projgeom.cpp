#include "doctest.h"

#include <set>

#include "transverse/projgeom.hpp"

using namespace transverse;
using gf::make_field;
using gf::Rng;

namespace {

Row row(const FieldPtr& F, std::vector<std::int64_t> v) {
    Row r;
    for (auto x : v) r.push_back(F->from_int(x));
    return r;
}

// Every point of H over E by enumerating coefficient vectors against its rows.
std::set<std::vector<std::uint64_t>> points_of(const LinearSubspace& H, const FieldPtr& E) {
    std::set<std::vector<std::uint64_t>> out;
    const Matrix rows = embed_matrix(H.rows(), H.field(), E);
    for (const auto& u : enumerate_points(H.dim(), E)) {
        std::vector<Elem> x(H.ambient() + 1, E->zero());
        for (int i = 0; i <= H.dim(); ++i)
            for (int j = 0; j <= H.ambient(); ++j) x[j] = E->add(x[j], E->mul(u.coords[i], rows[i][j]));
        std::vector<std::uint64_t> codes;
        for (auto e : make_point(E, x).coords) codes.push_back(e.code);
        out.insert(codes);
    }
    return out;
}

} // namespace

TEST_CASE("point enumeration") {
    CHECK(enumerate_points(2, make_field(2, 1)).size() == 7);
    CHECK(enumerate_points(1, make_field(2, 2)).size() == 5);
    auto pts = enumerate_points(3, make_field(3, 1));
    CHECK(pts.size() == 40);
    std::set<ProjectivePoint> distinct(pts.begin(), pts.end());
    CHECK(distinct.size() == 40);
    for (const auto& p : pts) CHECK(make_point(p.field, p.coords) == p);

    PointEnumerator en(2, make_field(3, 1));
    CHECK(to_string(en.at(0)) == "[0:0:1]");
    std::vector<Elem> c;
    for (std::uint64_t i = 0; i < en.count(); ++i) {
        en.coords_at(i, c);
        CHECK(c == en.at(i).coords);
    }
    CHECK(projective_count(2, 3) == 13);
    CHECK_THROWS(make_point(make_field(3, 1), {make_field(3, 1)->zero(), make_field(3, 1)->zero()}));
}

TEST_CASE("subspaces from rows") {
    auto F5 = make_field(5, 1);
    auto H = subspace_from_rows(F5, {row(F5, {0, 1, 0}), row(F5, {1, 0, 0})});
    CHECK(H.rows() == Matrix{row(F5, {1, 0, 0}), row(F5, {0, 1, 0})});
    auto P = subspace_from_rows(F5, {row(F5, {1, 1, 0}), row(F5, {2, 2, 0})});
    CHECK(P.dim() == 0);
    CHECK(P.rows() == Matrix{row(F5, {1, 1, 0})});
    CHECK(to_string(parse_subspace("1,0,0,2; 0,1,0,1", F5, 3)) == "1,0,0,2; 0,1,0,1");

    auto F3 = make_field(3, 1);
    Rng rng(0x5b5);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix m(2, Row(4));
        for (auto& r : m)
            for (auto& x : r) x = F3->random(rng);
        if (rank(*F3, m) == 0) continue;
        auto S = subspace_from_rows(F3, m);
        for (int k = 0; k < 100; ++k) {
            const Elem a = F3->random(rng), b = F3->random(rng);
            Row v(4);
            for (int j = 0; j < 4; ++j) v[j] = F3->add(F3->mul(a, m[0][j]), F3->mul(b, m[1][j]));
            if (std::all_of(v.begin(), v.end(), [](Elem e) { return e.code == 0; })) continue;
            CHECK(subspace_contains(S, make_point(F3, v)));
        }
    }
}

TEST_CASE("superspaces") {
    auto F2 = make_field(2, 1);
    auto pt = parse_subspace("1,0,0,0", F2, 3);
    CHECK(enumerate_superspaces(pt, 1).size() == 7);
    auto F5 = make_field(5, 1);
    CHECK(enumerate_superspaces(parse_subspace("0,1,0", F5, 2), 1).size() == 6);
    auto F3 = make_field(3, 1);
    auto line = parse_subspace("1,0,0,0; 0,1,0,0", F3, 3);
    auto planes = enumerate_superspaces(line, 2);
    CHECK(planes.size() == 4);
    std::set<LinearSubspace> distinct(planes.begin(), planes.end());
    CHECK(distinct.size() == 4);
    for (const auto& K : planes) {
        CHECK(K.dim() == 2);
        CHECK(subspace_contains(K, line));
    }

    // Pool size sum_{i=0}^{n-r} q^i, over random H in small spaces.
    Rng rng(0x5e9);
    for (auto F : {make_field(2, 1), make_field(3, 1), make_field(2, 2), make_field(5, 1), make_field(7, 1), make_field(3, 2)}) {
        const std::uint64_t q = F->order();
        for (int n = 1; n <= 4; ++n)
            for (int r = 1; r <= n; ++r) {
                Matrix m;
                for (int i = 0; i < r; ++i) {
                    Row v(n + 1, F->zero());
                    v[i] = F->one();
                    for (int j = r; j <= n; ++j) v[j] = F->random(rng);
                    m.push_back(v);
                }
                auto H = LinearSubspace::from_rows(F, m);
                std::uint64_t expect = 0, qi = 1;
                for (int i = 0; i <= n - r; ++i, qi *= q) expect += qi;
                SuperspaceEnumerator en(H, r);
                CHECK(en.count() == expect);
                if (expect <= 400) {
                    std::set<LinearSubspace> seen;
                    for (std::uint64_t i = 0; i < en.count(); ++i) {
                        auto K = en.at(i);
                        CHECK(subspace_contains(K, H));
                        seen.insert(K);
                    }
                    CHECK(seen.size() == expect);
                }
            }
    }
}

TEST_CASE("lines of P^3") {
    for (std::uint64_t q : {2, 3, 5}) {
        auto F = make_field(q, 1);
        std::set<LinearSubspace> lines;
        for (const auto& p : enumerate_points(3, F))
            for (const auto& L : enumerate_superspaces(LinearSubspace::from_rows(F, {p.coords}), 1)) lines.insert(L);
        CHECK(lines.size() == (q * q + 1) * (q * q + q + 1));
        std::uint64_t via = 0;
        for_each_subspace(3, 1, F, [&](const LinearSubspace&) { ++via; });
        CHECK(via == lines.size());
        CHECK(grassmannian_count(3, 1, q) == lines.size());
    }
}

TEST_CASE("duality") {
    auto F3 = make_field(3, 1);
    auto H = parse_subspace("0,1,0,0; 0,0,1,0; 0,0,0,1", F3, 3);
    CHECK(dual(H) == parse_subspace("1,0,0,0", F3, 3));

    Rng rng(0xd0a1);
    for (int trial = 0; trial < 100; ++trial) {
        // Nested pair H in K.
        Matrix m(4, Row(5));
        for (auto& r : m)
            for (auto& x : r) x = F3->random(rng);
        const int a = 1 + static_cast<int>(rng() % 2);
        Matrix small(m.begin(), m.begin() + a);
        if (rank(*F3, small) == 0 || rank(*F3, m) == 0) continue;
        auto Hs = LinearSubspace::from_rows(F3, small);
        auto K = LinearSubspace::from_rows(F3, m);
        CHECK(dual(dual(K)) == K);
        CHECK(subspace_contains(K, Hs));
        CHECK(subspace_contains(dual(Hs), dual(K)));
        CHECK(Hs.dim() + dual(Hs).dim() == 3);
    }
}

TEST_CASE("containment over extensions") {
    auto F2 = make_field(2, 1);
    auto H = parse_subspace("1,0,1,0; 0,1,1,1", F2, 3);
    for (const auto& r : H.rows()) CHECK(subspace_contains(H, make_point(F2, r)));
    CHECK_FALSE(subspace_contains(H, make_point(F2, row(F2, {0, 0, 1, 0}))));

    for (int k : {1, 2, 3}) {
        auto E = F2->extension(k);
        const auto inside = points_of(H, E);
        std::uint64_t hits = 0;
        for (const auto& p : enumerate_points(3, E)) {
            std::vector<std::uint64_t> codes;
            for (auto e : p.coords) codes.push_back(e.code);
            const bool c = subspace_contains(H, p);
            CHECK(c == inside.count(codes));
            hits += c;
        }
        CHECK(hits == E->order() + 1);
        auto coords = subspace_coordinates(H, *enumerate_points(3, E).begin());
        (void)coords;
    }
}
