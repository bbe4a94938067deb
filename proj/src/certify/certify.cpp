#include "transverse/certify.hpp"

#include <algorithm>
#include <unordered_map>

namespace transverse {

namespace dense = gf::dense;

std::string to_string(Emptiness e) {
    switch (e) {
    case Emptiness::Empty: return "empty";
    case Emptiness::Nonempty: return "nonempty";
    case Emptiness::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::string to_string(VtVerdict v) {
    switch (v) {
    case VtVerdict::VeryTransverse: return "very-transverse";
    case VtVerdict::NotTransverse: return "not-transverse";
    case VtVerdict::DualContained: return "dual-contained";
    case VtVerdict::Undetermined: return "undetermined";
    }
    return "?";
}

namespace {

// Largest Macaulay matrix (columns) the rank test will build.
constexpr std::uint64_t kMaxMacaulayColumns = 40000;
// Assignments tried by one run of the point enumerator.
constexpr std::uint64_t kMaxPointWork = std::uint64_t{1} << 24;
// Emptiness tests allowed inside one exact dimension check.
constexpr std::uint64_t kMaxExactDimCalls = 200000;

// A scheme with its linear generators eliminated: forms live on P^ambient with
// coordinates u, and x = u * basis recovers the original coordinates.
struct Reduced {
    bool empty = false;
    int ambient = 0;
    FieldPtr field;
    std::vector<Form> forms;
    Matrix basis;  // empty means the identity
};

Reduced reduce_linear(const SchemeSpec& S) {
    Reduced R;
    R.field = S.field;
    R.ambient = S.ambient;
    const Field& F = *S.field;
    Matrix linear;
    std::vector<const Form*> rest;
    for (const auto& f : S.forms) {
        if (f.nvars() != S.ambient + 1) throw GeometryError("generator has the wrong number of variables");
        if (!(*f.field() == F)) throw GeometryError("generator over a different field");
        if (f.is_zero()) continue;
        if (f.degree() == 0) {
            R.empty = true;
            return R;
        }
        if (f.degree() == 1) {
            Row row(S.ambient + 1, F.zero());
            for (std::size_t t = 0; t < f.num_terms(); ++t) {
                auto ex = f.exponents(t);
                for (int v = 0; v <= S.ambient; ++v)
                    if (ex[v]) row[v] = f.coeff(t);
            }
            linear.push_back(std::move(row));
        } else {
            rest.push_back(&f);
        }
    }
    if (linear.empty()) {
        for (auto* f : rest) R.forms.push_back(*f);
        return R;
    }
    Matrix ns = nullspace(F, linear, S.ambient + 1);
    if (ns.empty()) {
        R.empty = true;
        return R;
    }
    R.ambient = static_cast<int>(ns.size()) - 1;
    for (auto* f : rest) {
        Form g = restrict_form(*f, ns, S.field);
        if (!g.is_zero()) R.forms.push_back(std::move(g));
    }
    R.basis = std::move(ns);
    return R;
}

std::uint64_t pack_exps(const std::vector<int>& e) {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < e.size(); ++i) k |= static_cast<std::uint64_t>(e[i]) << (8 * i);
    return k;
}

void monomials_of_degree(int k, int N, std::vector<std::vector<int>>& out) {
    std::vector<int> e(k, 0);
    // Enumerate compositions of N into k parts.
    std::function<void(int, int)> rec = [&](int var, int left) {
        if (var == k - 1) {
            e[var] = left;
            out.push_back(e);
            return;
        }
        for (int a = left; a >= 0; --a) {
            e[var] = a;
            rec(var + 1, left - a);
        }
    };
    rec(0, N);
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (r > (static_cast<unsigned __int128>(1) << 62)) return std::uint64_t{1} << 62;
    }
    return static_cast<std::uint64_t>(r);
}

// Whether the degree-N part of the ideal generated by `forms` (in k variables)
// is the full space of degree-N forms.
bool macaulay_full(const Field& F, int k, const std::vector<Form>& forms, int N) {
    if (k > 8 || N > 255) throw gf::CapExceeded("Macaulay matrix shape outside the supported range");
    const std::uint64_t C = binomial(N + k - 1, k - 1);
    if (C > kMaxMacaulayColumns) throw gf::CapExceeded("Macaulay matrix exceeds the configured size");
    std::vector<std::vector<int>> cols;
    monomials_of_degree(k, N, cols);
    std::unordered_map<std::uint64_t, int> index;
    index.reserve(cols.size() * 2);
    for (std::size_t i = 0; i < cols.size(); ++i) index[pack_exps(cols[i])] = static_cast<int>(i);

    const int ncols = static_cast<int>(cols.size());
    std::vector<Row> pivot_row(ncols);
    std::vector<bool> has_pivot(ncols, false);
    int rank = 0;
    Row row(ncols);
    std::vector<int> e(k);
    // Generators of larger degree first: they have fewer multipliers.
    std::vector<const Form*> order;
    for (const auto& f : forms) order.push_back(&f);
    std::stable_sort(order.begin(), order.end(), [](const Form* a, const Form* b) { return a->degree() > b->degree(); });
    for (const Form* g : order) {
        if (g->degree() > N) continue;
        std::vector<std::vector<int>> mults;
        monomials_of_degree(k, N - g->degree(), mults);
        for (const auto& m : mults) {
            std::fill(row.begin(), row.end(), F.zero());
            for (std::size_t t = 0; t < g->num_terms(); ++t) {
                auto ex = g->exponents(t);
                for (int v = 0; v < k; ++v) e[v] = ex[v] + m[v];
                row[index.at(pack_exps(e))] = g->coeff(t);
            }
            for (int c = 0; c < ncols; ++c) {
                if (row[c].code == 0) continue;
                if (!has_pivot[c]) {
                    const Elem inv = F.inv(row[c]);
                    for (int j = c; j < ncols; ++j)
                        if (row[j].code) row[j] = F.mul(row[j], inv);
                    pivot_row[c] = row;
                    has_pivot[c] = true;
                    ++rank;
                    break;
                }
                const Elem f = row[c];
                const Row& pr = pivot_row[c];
                for (int j = c; j < ncols; ++j)
                    if (pr[j].code) row[j] = F.sub(row[j], F.mul(f, pr[j]));
            }
            if (rank == ncols) return true;
        }
    }
    return rank == ncols;
}

struct RankDecision {
    Emptiness verdict;
    int N;
};

RankDecision decide_reduced(const Reduced& R) {
    if (R.empty) return {Emptiness::Empty, -1};
    const int r = R.ambient;
    const int s = static_cast<int>(R.forms.size());
    if (s <= r) return {Emptiness::Nonempty, -1};
    std::vector<int> degs;
    for (const auto& f : R.forms) degs.push_back(f.degree());
    std::sort(degs.rbegin(), degs.rend());
    int N = -r;
    for (int i = 0; i <= r; ++i) N += degs[i];
    const bool full = macaulay_full(*R.field, r + 1, R.forms, N);
    return {full ? Emptiness::Empty : Emptiness::Nonempty, N};
}

std::vector<int> prime_divisors(int k) {
    std::vector<int> out;
    for (int d = 2; d <= k; ++d) {
        if (k % d) continue;
        out.push_back(d);
        while (k % d == 0) k /= d;
    }
    return out;
}

bool has_exact_level(const Field& base, const Field& E, int k, const std::vector<Elem>& coords) {
    const std::uint64_t Q0 = base.order();
    for (int l : prime_divisors(k)) {
        const int j = k / l;
        std::uint64_t e = 1;
        for (int i = 0; i < j; ++i) e *= Q0;
        bool inside = true;
        for (auto c : coords) {
            if (E.pow(c, e) != c) {
                inside = false;
                break;
            }
        }
        if (inside) return false;
    }
    return true;
}

// Points (as coordinate vectors over E = level k over R.field) of the reduced
// system, exact residue degree k.
std::vector<std::vector<Elem>> reduced_points_at_level(const Reduced& R, int k) {
    std::vector<std::vector<Elem>> out;
    if (R.empty) return out;
    const FieldPtr E = R.field->extension(k);
    const Field& e = *E;
    const int r = R.ambient;
    const int nv = r + 1;
    const std::uint64_t Q = e.order();

    std::vector<Form> forms;
    for (const auto& f : R.forms) forms.push_back(embed_form(f, E));

    auto accept = [&](std::vector<Elem> pt) {
        if (has_exact_level(*R.field, e, k, pt)) out.push_back(std::move(pt));
    };

    std::uint64_t work = 0;
    for (int i = 0; i <= r; ++i) {
        if (i == r) {
            std::vector<Elem> pt(nv, e.zero());
            pt[r] = e.one();
            bool all = true;
            for (const auto& f : forms)
                if (form_eval(f, pt, E).code) {
                    all = false;
                    break;
                }
            if (all) accept(std::move(pt));
            continue;
        }
        // Terms surviving x_0 = ... = x_{i-1} = 0, grouped by the exponent of x_r.
        struct Term {
            Elem c;
            std::vector<int> mid;  // exponents of x_{i+1} .. x_{r-1}
            int last;
            int lead;              // exponent of x_i (irrelevant since x_i = 1)
        };
        std::vector<std::vector<Term>> terms(forms.size());
        std::vector<int> max_last(forms.size(), 0);
        const int nmid = r - 1 - i;
        std::vector<int> max_mid(std::max(nmid, 0), 0);
        for (std::size_t g = 0; g < forms.size(); ++g) {
            const Form& f = forms[g];
            for (std::size_t t = 0; t < f.num_terms(); ++t) {
                auto ex = f.exponents(t);
                bool killed = false;
                for (int j = 0; j < i; ++j)
                    if (ex[j]) killed = true;
                if (killed) continue;
                Term term{f.coeff(t), {}, ex[r], ex[i]};
                for (int j = i + 1; j < r; ++j) {
                    term.mid.push_back(ex[j]);
                    max_mid[j - i - 1] = std::max(max_mid[j - i - 1], ex[j]);
                }
                max_last[g] = std::max(max_last[g], ex[r]);
                terms[g].push_back(std::move(term));
            }
        }
        std::uint64_t combos = 1;
        for (int j = 0; j < nmid; ++j) {
            if (combos > kMaxPointWork / Q) throw gf::CapExceeded("point enumeration exceeds the configured budget");
            combos *= Q;
        }
        work += combos;
        if (work > kMaxPointWork) throw gf::CapExceeded("point enumeration exceeds the configured budget");

        std::vector<Elem> mid(nmid, e.zero());
        std::vector<std::vector<Elem>> pw(nmid);
        for (std::uint64_t idx = 0; idx < combos; ++idx) {
            std::uint64_t rest = idx;
            for (int j = nmid - 1; j >= 0; --j) {
                mid[j] = Elem{rest % Q};
                rest /= Q;
            }
            for (int j = 0; j < nmid; ++j) {
                pw[j].resize(max_mid[j] + 1);
                pw[j][0] = e.one();
                for (int a = 1; a <= max_mid[j]; ++a) pw[j][a] = e.mul(pw[j][a - 1], mid[j]);
            }
            dense::Coeffs h;
            bool have = false;
            bool constant = false;
            for (std::size_t g = 0; g < forms.size() && !constant; ++g) {
                dense::Coeffs u(max_last[g] + 1, e.zero());
                for (const auto& term : terms[g]) {
                    Elem v = term.c;
                    for (int j = 0; j < nmid && v.code; ++j)
                        if (term.mid[j]) v = e.mul(v, pw[j][term.mid[j]]);
                    u[term.last] = e.add(u[term.last], v);
                }
                dense::trim(u);
                if (u.empty()) continue;
                h = have ? dense::gcd(e, h, u) : dense::monic(e, u);
                have = true;
                if (dense::degree(h) == 0) constant = true;
            }
            if (constant) continue;
            std::vector<Elem> base(nv, e.zero());
            base[i] = e.one();
            for (int j = 0; j < nmid; ++j) base[i + 1 + j] = mid[j];
            if (!have) {
                // Every value of the last coordinate works.
                if (Q > kMaxPointWork) throw gf::CapExceeded("point enumeration exceeds the configured budget");
                for (std::uint64_t c = 0; c < Q; ++c) {
                    base[r] = Elem{c};
                    accept(base);
                }
                continue;
            }
            for (Elem root : dense::roots(e, h)) {
                base[r] = root;
                accept(base);
            }
        }
    }
    return out;
}

std::vector<ProjectivePoint> lift_points(const Reduced& R, int k, std::vector<std::vector<Elem>> pts) {
    const FieldPtr E = R.field->extension(k);
    std::vector<ProjectivePoint> out;
    out.reserve(pts.size());
    if (R.basis.empty()) {
        for (auto& p : pts) out.push_back(make_point(E, std::move(p)));
    } else {
        const Matrix B = embed_matrix(R.basis, R.field, E);
        const Field& e = *E;
        for (const auto& u : pts) {
            std::vector<Elem> x(B[0].size(), e.zero());
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (u[i].code == 0) continue;
                for (std::size_t c = 0; c < x.size(); ++c)
                    if (B[i][c].code) x[c] = e.add(x[c], e.mul(u[i], B[i][c]));
            }
            out.push_back(make_point(E, std::move(x)));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

FieldPtr extension_at_least(const FieldPtr& F, std::uint64_t size) {
    int k = 1;
    unsigned __int128 order = F->order();
    while (order < size) {
        order *= F->order();
        ++k;
    }
    return F->extension(k);
}

SchemeSpec with_forms(const Reduced& R) { return SchemeSpec{R.ambient, R.field, R.forms}; }

} // namespace

EmptinessCertificate is_empty_projective(const SchemeSpec& S, const EmptinessOptions& opts) {
    if (S.forms.empty()) throw GeometryError("a scheme needs at least one generator");
    const Reduced R = reduce_linear(S);
    const RankDecision d = decide_reduced(R);
    EmptinessCertificate cert;
    cert.verdict = d.verdict;
    cert.degree_N = d.N;
    if (d.verdict != Emptiness::Nonempty || !opts.find_witness) return cert;
    try {
        for (int k = 1; k <= opts.max_witness_level; ++k) {
            auto pts = reduced_points_at_level(R, k);
            if (!pts.empty()) {
                cert.witness = lift_points(R, k, {pts.front()}).front();
                return cert;
            }
        }
    } catch (const gf::CapExceeded&) {
    }
    cert.verdict = Emptiness::Inconclusive;
    return cert;
}

bool certify_empty(const SchemeSpec& S) {
    return is_empty_projective(S, {.find_witness = false}).verdict == Emptiness::Empty;
}

std::vector<ProjectivePoint> scheme_points_upto(const SchemeSpec& S, int kmax) {
    const Reduced R = reduce_linear(S);
    std::vector<ProjectivePoint> out;
    for (int k = 1; k <= kmax; ++k) {
        auto lifted = lift_points(R, k, reduced_points_at_level(R, k));
        out.insert(out.end(), lifted.begin(), lifted.end());
    }
    return out;
}

DimensionCertificate dim_upper_bound(const SchemeSpec& S, int t, int retries, Rng& rng) {
    if (t < -1) throw GeometryError("dimension bound must be at least -1");
    DimensionCertificate cert;
    cert.bound = t;
    if (t >= S.ambient) {
        cert.at_most = true;
        return cert;
    }
    if (t == -1) {
        cert.retries_used = 1;
        cert.at_most = certify_empty(S);
        return cert;
    }
    const FieldPtr E = extension_at_least(S.field, kMinSliceField);
    const SchemeSpec SE = embed_scheme(S, E);
    for (int attempt = 0; attempt < retries; ++attempt) {
        const std::uint64_t seed = rng();
        Rng local(seed);
        SchemeSpec sliced = SE;
        std::vector<Form> slices;
        for (int i = 0; i <= t; ++i) {
            std::vector<Elem> c(S.ambient + 1);
            bool nonzero = false;
            while (!nonzero) {
                for (auto& x : c) {
                    x = E->random(local);
                    nonzero = nonzero || x.code;
                }
            }
            slices.push_back(Form::linear(E, c));
        }
        sliced.forms.insert(sliced.forms.end(), slices.begin(), slices.end());
        cert.slice_seeds.push_back(seed);
        cert.retries_used = attempt + 1;
        if (certify_empty(sliced)) {
            cert.at_most = true;
            cert.slices = std::move(slices);
            return cert;
        }
    }
    return cert;
}

namespace {

bool exact_rec(const SchemeSpec& S, int t, std::uint64_t& calls) {
    if (++calls > kMaxExactDimCalls) throw gf::CapExceeded("exact dimension check exceeds its budget");
    const Reduced R = reduce_linear(S);
    if (R.empty) return true;
    const int r = R.ambient;
    if (t >= r) return true;
    if (t < 0) return decide_reduced(R).verdict == Emptiness::Empty;
    // Heintz-Bezout: the components of the zero set have total degree at most the
    // product of the generator degrees, and a hyperplane sum c^i x_i contains a
    // given component for at most r values of c.
    unsigned __int128 D = 1;
    for (const auto& f : R.forms) {
        D *= static_cast<unsigned>(f.degree());
        if (D > (static_cast<unsigned __int128>(1) << 40)) throw gf::CapExceeded("degree bound too large");
    }
    const std::uint64_t candidates = static_cast<std::uint64_t>(D) * static_cast<std::uint64_t>(r) + 1;
    const FieldPtr E = extension_at_least(R.field, candidates);
    SchemeSpec base = embed_scheme(with_forms(R), E);
    for (std::uint64_t idx = 0; idx < candidates; ++idx) {
        const Elem c = E->element(idx);
        std::vector<Elem> coeffs(r + 1);
        Elem pw = E->one();
        for (int i = 0; i <= r; ++i) {
            coeffs[i] = pw;
            pw = E->mul(pw, c);
        }
        SchemeSpec sliced = base;
        sliced.forms.push_back(Form::linear(E, coeffs));
        if (exact_rec(sliced, t - 1, calls)) return true;
    }
    return false;
}

} // namespace

bool exact_dim_at_most(const SchemeSpec& S, int t) {
    if (t < -1) throw GeometryError("dimension bound must be at least -1");
    std::uint64_t calls = 0;
    return exact_rec(S, t, calls);
}

// ---------------------------------------------------------------------------
// Predicates

bool is_smooth(const Hypersurface& X) {
    if (auto c = X.cached_smooth()) return *c;
    const bool smooth = certify_empty(singular_scheme(X));
    X.set_cached_smooth(smooth);
    return smooth;
}

namespace {

Form section(const Hypersurface& X, const LinearSubspace& H) {
    if (H.ambient() != X.ambient()) throw GeometryError("ambient dimension mismatch");
    if (!(*H.field() == *X.field())) throw GeometryError("subspace and hypersurface fields differ");
    if (H.dim() < 0) throw GeometryError("section by the empty subspace");
    Form G = restrict_form(X.form(), H.rows(), H.field());
    if (G.is_zero()) throw NotProper();
    return G;
}

SchemeSpec jacobian_scheme(const Form& G) {
    SchemeSpec S{G.nvars() - 1, G.field(), {G}};
    for (int i = 0; i < G.nvars(); ++i) S.forms.push_back(partial(G, i));
    return S;
}

} // namespace

bool is_smooth_section(const Hypersurface& X, const LinearSubspace& H) {
    const Form G = section(X, H);
    const int r = H.dim();
    if (r == 0) return true;
    if (r == 1) return binary_squarefree(G);
    return certify_empty(jacobian_scheme(G));
}

bool is_reduced_section(const Hypersurface& X, const LinearSubspace& H) {
    const Form G = section(X, H);
    const int r = H.dim();
    if (r == 0) return true;
    bool all_zero = true;
    for (int i = 0; i < G.nvars(); ++i)
        if (!partial(G, i).is_zero()) all_zero = false;
    // Every exponent divisible by p: G is a p-th power.
    if (all_zero) return false;
    if (r == 1) return binary_squarefree(G);
    // A squarefree restriction to some line proves G squarefree.
    const FieldPtr E = extension_at_least(G.field(), kMinSliceField);
    Rng rng(0x7265647563656400ULL ^ static_cast<std::uint64_t>(r));
    for (int attempt = 0; attempt < 4; ++attempt) {
        Matrix rows(2, Row(r + 1));
        for (auto& row : rows)
            for (auto& x : row) x = E->random(rng);
        const Form GL = restrict_form(G, rows, E);
        if (!GL.is_zero() && binary_squarefree(GL)) return true;
    }
    // Reduced iff the singular locus of the section has codimension >= 2 in it.
    return exact_dim_at_most(jacobian_scheme(G), r - 2);
}

bool is_transverse(const Hypersurface& X, const LinearSubspace& H) {
    if (!is_smooth(X)) {
        SchemeSpec S = singular_scheme(X);
        const LinearSubspace eqs = dual(H);
        for (const auto& row : eqs.rows()) S.forms.push_back(Form::linear(X.field(), row));
        if (!certify_empty(S)) return false;
    }
    try {
        return is_smooth_section(X, H);
    } catch (const NotProper&) {
        return false;
    }
}

VtVerdict very_transverse_check(const Hypersurface& X, const LinearSubspace& H, const VtOptions& opts) {
    if (!is_smooth(X)) throw NotSmooth();
    if (!is_transverse(X, H)) return VtVerdict::NotTransverse;
    const int n = X.ambient();
    const int r = H.dim();
    if (r >= n - 1) return VtVerdict::VeryTransverse;
    const SchemeSpec Y = tangency_locus(X, H);
    const int t = n - r - 2;
    if (opts.mode == DimensionMode::Exact)
        return exact_dim_at_most(Y, t) ? VtVerdict::VeryTransverse : VtVerdict::DualContained;
    Rng rng(opts.seed);
    const auto cert = dim_upper_bound(Y, t, opts.retries, rng);
    return cert.at_most ? VtVerdict::VeryTransverse : VtVerdict::Undetermined;
}

bool is_very_transverse(const Hypersurface& X, const LinearSubspace& H, const VtOptions& opts) {
    return very_transverse_check(X, H, opts) == VtVerdict::VeryTransverse;
}

} // namespace transverse
