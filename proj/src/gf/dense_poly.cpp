#include "transverse/dense_poly.hpp"

#include <algorithm>

namespace transverse::gf::dense {

void trim(Coeffs& f) {
    while (!f.empty() && f.back().code == 0) f.pop_back();
}

Coeffs add(const Field& F, const Coeffs& a, const Coeffs& b) {
    Coeffs r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
        Elem x = i < a.size() ? a[i] : F.zero();
        Elem y = i < b.size() ? b[i] : F.zero();
        r[i] = F.add(x, y);
    }
    trim(r);
    return r;
}

Coeffs sub(const Field& F, const Coeffs& a, const Coeffs& b) {
    Coeffs r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
        Elem x = i < a.size() ? a[i] : F.zero();
        Elem y = i < b.size() ? b[i] : F.zero();
        r[i] = F.sub(x, y);
    }
    trim(r);
    return r;
}

Coeffs mul(const Field& F, const Coeffs& a, const Coeffs& b) {
    if (a.empty() || b.empty()) return {};
    Coeffs r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].code == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j].code == 0) continue;
            r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
        }
    }
    trim(r);
    return r;
}

Coeffs scale(const Field& F, const Coeffs& a, Elem c) {
    if (c.code == 0) return {};
    Coeffs r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = F.mul(a[i], c);
    trim(r);
    return r;
}

void divmod(const Field& F, const Coeffs& a, const Coeffs& b, Coeffs& quot, Coeffs& rem) {
    if (b.empty()) throw FieldError("polynomial division by zero");
    rem = a;
    trim(rem);
    const int db = degree(b);
    if (degree(rem) < db) {
        quot.clear();
        return;
    }
    quot.assign(rem.size() - b.size() + 1, F.zero());
    const Elem lead_inv = F.inv(b.back());
    for (int i = degree(rem); i >= db; --i) {
        Elem c = rem[i];
        if (c.code == 0) continue;
        c = F.mul(c, lead_inv);
        quot[i - db] = c;
        for (int j = 0; j <= db; ++j) {
            if (b[j].code == 0) continue;
            rem[i - db + j] = F.sub(rem[i - db + j], F.mul(c, b[j]));
        }
    }
    trim(rem);
    trim(quot);
}

Coeffs mod(const Field& F, const Coeffs& a, const Coeffs& b) {
    if (b.empty()) throw FieldError("polynomial division by zero");
    Coeffs rem = a;
    trim(rem);
    const int db = degree(b);
    if (degree(rem) < db) return rem;
    const Elem lead_inv = F.inv(b.back());
    for (int i = degree(rem); i >= db; --i) {
        Elem c = rem[i];
        if (c.code == 0) continue;
        c = F.mul(c, lead_inv);
        for (int j = 0; j <= db; ++j) {
            if (b[j].code == 0) continue;
            rem[i - db + j] = F.sub(rem[i - db + j], F.mul(c, b[j]));
        }
    }
    trim(rem);
    return rem;
}

Coeffs monic(const Field& F, const Coeffs& a) {
    if (a.empty()) return a;
    return scale(F, a, F.inv(a.back()));
}

Coeffs gcd(const Field& F, Coeffs a, Coeffs b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Coeffs r = mod(F, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(F, a);
}

Coeffs derivative(const Field& F, const Coeffs& a) {
    if (a.size() <= 1) return {};
    Coeffs r(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) {
        r[i - 1] = F.mul(a[i], F.from_int(static_cast<std::int64_t>(i % F.characteristic())));
    }
    trim(r);
    return r;
}

Elem eval(const Field& F, const Coeffs& a, Elem x) {
    Elem acc = F.zero();
    for (auto it = a.rbegin(); it != a.rend(); ++it) acc = F.add(F.mul(acc, x), *it);
    return acc;
}

Coeffs mulmod(const Field& F, const Coeffs& a, const Coeffs& b, const Coeffs& m) {
    return mod(F, mul(F, a, b), m);
}

Coeffs powmod(const Field& F, const Coeffs& base, std::uint64_t e, const Coeffs& m) {
    Coeffs result = mod(F, Coeffs{F.one()}, m);
    Coeffs b = mod(F, base, m);
    while (e > 0) {
        if (e & 1) result = mulmod(F, result, b, m);
        e >>= 1;
        if (e) b = mulmod(F, b, b, m);
    }
    return result;
}

namespace {

void split_rec(const Field& F, const Coeffs& f, Rng& rng, std::vector<Elem>& out) {
    const int d = degree(f);
    if (d <= 0) return;
    if (d == 1) {
        // f = x + c with f monic
        out.push_back(F.neg(f[0]));
        return;
    }
    const std::uint64_t Q = F.order();
    for (int attempt = 0; attempt < 256; ++attempt) {
        Coeffs g;
        if (F.characteristic() == 2) {
            // Absolute trace of a*x splits the roots into two halves.
            Coeffs ax = {F.zero(), F.random_nonzero(rng)};
            Coeffs term = mod(F, ax, f);
            Coeffs tr = term;
            for (int i = 1; i < F.prime_degree(); ++i) {
                term = mulmod(F, term, term, f);
                tr = add(F, tr, term);
            }
            g = gcd(F, f, tr);
        } else {
            Coeffs lin = {F.random(rng), F.one()};
            Coeffs h = powmod(F, lin, (Q - 1) / 2, f);
            h = sub(F, h, Coeffs{F.one()});
            g = gcd(F, f, h);
        }
        const int dg = degree(g);
        if (dg > 0 && dg < d) {
            Coeffs q, r;
            divmod(F, f, g, q, r);
            split_rec(F, g, rng, out);
            split_rec(F, monic(F, q), rng, out);
            return;
        }
    }
    throw FieldError("equal-degree splitting failed; input is not a product of distinct linear factors");
}

} // namespace

std::vector<Elem> split_linear(const Field& F, const Coeffs& f) {
    Rng rng(0x5eed5eedULL ^ static_cast<std::uint64_t>(f.size()));
    std::vector<Elem> out;
    split_rec(F, monic(F, f), rng, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Elem> roots(const Field& F, const Coeffs& f) {
    if (f.empty()) throw FieldError("roots of the zero polynomial");
    Coeffs fm = monic(F, f);
    if (degree(fm) <= 0) return {};
    Coeffs x = {F.zero(), F.one()};
    Coeffs xq = powmod(F, x, F.order(), fm);
    Coeffs h = gcd(F, fm, sub(F, xq, x));
    return split_linear(F, h);
}

} // namespace transverse::gf::dense
