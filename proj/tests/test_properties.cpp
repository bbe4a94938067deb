// Randomized invariants; every suite runs at least 1000 cases from a fixed seed.

#include "doctest.h"

#include "transverse/poly.hpp"
#include "transverse/projgeom.hpp"

using namespace transverse;
using gf::FieldElement;
using gf::make_field;

namespace {

constexpr int kCases = 1000;

std::vector<FieldPtr> small_fields() {
    return {make_field(2, 1), make_field(3, 1), make_field(5, 1), make_field(7, 1),
            make_field(2, 2), make_field(3, 2), make_field(2, 3), make_field(5, 2)};
}

Form random_form(const FieldPtr& F, int nv, int d, Rng& rng, int terms) {
    std::vector<std::pair<std::vector<int>, Elem>> t;
    for (int k = 0; k < terms; ++k) {
        std::vector<int> e(nv, 0);
        for (int j = 0; j < d; ++j) ++e[rng() % nv];
        t.emplace_back(e, F->random(rng));
    }
    return Form::from_terms(F, nv, d, t);
}

Matrix random_matrix(const FieldPtr& F, int rows, int cols, Rng& rng) {
    Matrix m(rows, Row(cols));
    for (auto& r : m)
        for (auto& x : r) x = F->random(rng);
    return m;
}

Elem dot(const Field& F, const Row& a, const Row& b) {
    Elem s = F.zero();
    for (std::size_t i = 0; i < a.size(); ++i) s = F.add(s, F.mul(a[i], b[i]));
    return s;
}

// a^e by repeated multiplication of digit vectors mod the field's modulus.
std::vector<std::uint64_t> naive_pow(std::vector<std::uint64_t> a, std::uint64_t e, const std::vector<std::uint64_t>& g,
                                     std::uint64_t p) {
    const std::size_t m = g.size() - 1;
    auto mulmod = [&](const std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>& y) {
        std::vector<std::uint64_t> r(2 * m, 0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) r[i + j] = (r[i + j] + x[i] * y[j]) % p;
        for (std::size_t i = 2 * m - 1; i >= m; --i) {
            const auto c = r[i];
            r[i] = 0;
            for (std::size_t j = 0; j < m; ++j) r[i - m + j] = (r[i - m + j] + (p - g[j]) * c) % p;
        }
        r.resize(m);
        return r;
    };
    std::vector<std::uint64_t> r(m, 0);
    r[0] = 1;
    a.resize(m, 0);
    while (e) {
        if (e & 1) r = mulmod(r, a);
        a = mulmod(a, a);
        e >>= 1;
    }
    return r;
}

} // namespace

TEST_CASE("Euler relation") {
    Rng rng(0xe17e4);
    const auto fields = small_fields();
    int cases = 0;
    for (int c = 0; c < kCases; ++c) {
        const FieldPtr& F = fields[c % fields.size()];
        const int nv = 2 + static_cast<int>(rng() % 3);
        const int d = 1 + static_cast<int>(rng() % 5);
        const Form f = random_form(F, nv, d, rng, 1 + static_cast<int>(rng() % 6));
        Form lhs(F, nv, d);
        for (int i = 0; i < nv; ++i) lhs = lhs + Form::variable(F, nv, i) * partial(f, i);
        CHECK(lhs == scale(f, F->from_int(d)));
        // Same identity through values at a random point.
        std::vector<Elem> x(nv);
        for (auto& v : x) v = F->random(rng);
        Elem s = F->zero();
        for (int i = 0; i < nv; ++i) s = F->add(s, F->mul(x[i], form_eval(partial(f, i), x, F)));
        CHECK(s == F->mul(F->from_int(d), form_eval(f, x, F)));
        ++cases;
    }
    CHECK(cases >= kCases);
}

TEST_CASE("Frobenius fixes exactly the subfield") {
    Rng rng(0xf40b);
    struct Tower {
        std::uint64_t p;
        int m;
        int k;
    };
    const std::vector<Tower> towers{{2, 1, 4}, {3, 1, 2}, {2, 2, 2}, {5, 1, 3}, {3, 2, 2}, {2, 1, 6}, {7, 1, 2}};
    int cases = 0;
    for (int c = 0; c < kCases; ++c) {
        const auto& t = towers[c % towers.size()];
        const FieldPtr base = make_field(t.p, t.m);
        const FieldPtr E = base->extension(t.k);
        const std::uint64_t q = base->order();
        const FieldElement a(E, E->random(rng)), b(E, E->random(rng));

        // Frobenius is the q-th power and a ring map.
        const FieldElement fa = frobenius_q(a, q);
        CHECK(fa.coeffs() == naive_pow(a.coeffs(), q, E->modulus(), t.p));
        CHECK(frobenius_q(a * b, q) == fa * frobenius_q(b, q));
        CHECK(frobenius_q(a + b, q) == fa + frobenius_q(b, q));

        // Fixed by the j-fold power exactly when it lies in F_{q^j}.
        for (int j = 1; j <= t.k; ++j) {
            if (t.k % j) continue;
            FieldElement it = a;
            for (int s = 0; s < j; ++s) it = frobenius_q(it, q);
            CHECK(in_subfield(a, j) == (it == a));
        }
        // Images of subfield elements are fixed.
        const FieldElement s(base, base->random(rng));
        CHECK(in_subfield(embed(s, E), 1));
        CHECK(frobenius_q(embed(s, E), q) == embed(s, E));
        ++cases;
    }
    CHECK(cases >= kCases);
}

TEST_CASE("duality is an involution") {
    Rng rng(0xd0a1);
    const auto fields = small_fields();
    int cases = 0;
    while (cases < kCases) {
        const FieldPtr& F = fields[cases % fields.size()];
        const int n = 1 + static_cast<int>(rng() % 5);
        const int k = 1 + static_cast<int>(rng() % (n + 1));
        Matrix m = random_matrix(F, k, n + 1, rng);
        if (rank(*F, m) == 0) continue;
        const LinearSubspace H = LinearSubspace::from_rows(F, m);
        const LinearSubspace D = dual(H);
        CHECK(D.dim() == n - 1 - H.dim());
        CHECK(dual(D) == H);
        for (const auto& u : D.rows())
            for (const auto& v : m) CHECK(dot(*F, u, v) == F->zero());
        ++cases;
    }
}

TEST_CASE("RREF is canonical") {
    Rng rng(0x44ef);
    const auto fields = small_fields();
    int cases = 0;
    while (cases < kCases) {
        const FieldPtr& F = fields[cases % fields.size()];
        const int cols = 2 + static_cast<int>(rng() % 5);
        const int k = 1 + static_cast<int>(rng() % cols);
        Matrix m = random_matrix(F, k, cols, rng);
        if (rank(*F, m) == 0) continue;

        // Row operations that keep the span: swaps, nonzero scalings, row additions,
        // and appended combinations.
        Matrix w = m;
        for (int op = 0; op < 8; ++op) {
            const std::size_t i = rng() % w.size(), j = rng() % w.size();
            switch (rng() % 3) {
            case 0: std::swap(w[i], w[j]); break;
            case 1: {
                const Elem c = F->random_nonzero(rng);
                for (auto& x : w[i]) x = F->mul(x, c);
                break;
            }
            default:
                if (i != j) {
                    const Elem c = F->random(rng);
                    for (int t = 0; t < cols; ++t) w[i][t] = F->add(w[i][t], F->mul(c, w[j][t]));
                }
            }
        }
        Row extra(cols, F->zero());
        for (const auto& r : m) {
            const Elem c = F->random(rng);
            for (int t = 0; t < cols; ++t) extra[t] = F->add(extra[t], F->mul(c, r[t]));
        }
        w.push_back(extra);

        CHECK(LinearSubspace::from_rows(F, w) == LinearSubspace::from_rows(F, m));

        Matrix r = m;
        const auto piv = rref(*F, r);
        CHECK(static_cast<int>(r.size()) == rank(*F, m));
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) CHECK(piv[i] > piv[i - 1]);
            for (std::size_t j = 0; j < r.size(); ++j) CHECK(r[j][piv[i]] == (i == j ? F->one() : F->zero()));
            for (int t = 0; t < piv[i]; ++t) CHECK(r[i][t] == F->zero());
        }
        Matrix again = r;
        rref(*F, again);
        CHECK(again == r);
        ++cases;
    }
}

TEST_CASE("restriction commutes with evaluation") {
    Rng rng(0x4e57);
    const auto fields = small_fields();
    int cases = 0;
    for (int c = 0; c < kCases; ++c) {
        const FieldPtr& F = fields[c % fields.size()];
        // Rows over F itself or over a quadratic extension.
        const FieldPtr E = (c % 3 == 0) ? F->extension(2) : F;
        const int nv = 2 + static_cast<int>(rng() % 4);
        const int d = 1 + static_cast<int>(rng() % 4);
        const int k = 1 + static_cast<int>(rng() % nv);
        const Form f = random_form(F, nv, d, rng, 1 + static_cast<int>(rng() % 8));
        const Matrix rows = random_matrix(E, k, nv, rng);
        const Form g = restrict_form(f, rows, E);
        CHECK(g.nvars() == k);
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<Elem> u(k);
            for (auto& x : u) x = E->random(rng);
            std::vector<Elem> x(nv, E->zero());
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < nv; ++j) x[j] = E->add(x[j], E->mul(u[i], rows[i][j]));
            CHECK(form_eval(g, u, E) == form_eval(f, x, E));
        }
        ++cases;
    }
    CHECK(cases >= kCases);
}
