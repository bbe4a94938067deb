#include "transverse/poly.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <unordered_map>

namespace transverse {

namespace dense = gf::dense;

// ---------------------------------------------------------------------------
// Univariate

UniPoly::UniPoly(FieldPtr field, dense::Coeffs coeffs) : field_(std::move(field)), coeffs_(std::move(coeffs)) {
    dense::trim(coeffs_);
}

UniPoly upoly_gcd(const UniPoly& f, const UniPoly& g) {
    if (!(*f.field() == *g.field())) throw PolyError("field mismatch in gcd");
    return UniPoly(f.field(), dense::gcd(*f.field(), f.coeffs(), g.coeffs()));
}

bool upoly_squarefree(const UniPoly& f) {
    if (f.is_zero()) throw PolyError("squarefree test of the zero polynomial");
    if (f.degree() <= 0) return true;
    const Field& F = *f.field();
    auto df = dense::derivative(F, f.coeffs());
    // f' = 0 means f = g(x^p) = h^p over a perfect field, so f is a p-th power.
    if (df.empty()) return false;
    return dense::degree(dense::gcd(F, f.coeffs(), df)) == 0;
}

std::vector<std::pair<Elem, int>> upoly_roots_in_extension(const UniPoly& f, int k) {
    if (f.is_zero()) throw PolyError("roots of the zero polynomial");
    auto E = f.field()->extension(k);
    const gf::Tower& T = f.field()->tower();
    const int from = f.field()->level();
    dense::Coeffs fe;
    fe.reserve(f.coeffs().size());
    for (auto c : f.coeffs()) fe.push_back(T.embed(c, from, E->level()));
    std::vector<std::pair<Elem, int>> out;
    for (Elem r : dense::roots(*E, fe)) {
        int mult = 0;
        dense::Coeffs cur = fe, q, rem;
        const dense::Coeffs lin = {E->neg(r), E->one()};
        while (true) {
            dense::divmod(*E, cur, lin, q, rem);
            if (!rem.empty()) break;
            ++mult;
            cur = q;
        }
        out.emplace_back(r, mult);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Forms

Form::Form(FieldPtr field, int nvars, int degree) : field_(std::move(field)), nvars_(nvars), degree_(degree) {
    if (nvars < 1) throw PolyError("a form needs at least one variable");
    if (degree < 0) throw PolyError("negative degree");
}

int Form::max_exponent(int var) const {
    int m = 0;
    for (std::size_t t = 0; t < coeffs_.size(); ++t) m = std::max(m, exps_[t * nvars_ + var]);
    return m;
}

bool operator==(const Form& a, const Form& b) {
    return *a.field_ == *b.field_ && a.nvars_ == b.nvars_ && a.degree_ == b.degree_ && a.exps_ == b.exps_ &&
           a.coeffs_ == b.coeffs_;
}

FormBuilder::FormBuilder(FieldPtr field, int nvars, int degree)
    : field_(std::move(field)), nvars_(nvars), degree_(degree) {}

void FormBuilder::add(std::span<const int> exps, Elem c) {
    if (static_cast<int>(exps.size()) != nvars_) throw PolyError("exponent vector has the wrong length");
    int sum = 0;
    for (int e : exps) {
        if (e < 0) throw PolyError("negative exponent");
        sum += e;
    }
    if (sum != degree_) throw PolyError("inhomogeneous term");
    if (c.code == 0) return;
    terms_.emplace_back(std::vector<int>(exps.begin(), exps.end()), c);
}

Form FormBuilder::build() && {
    Form f(field_, nvars_, degree_);
    std::sort(terms_.begin(), terms_.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const Field& F = *field_;
    for (std::size_t i = 0; i < terms_.size();) {
        std::size_t j = i;
        Elem acc = F.zero();
        while (j < terms_.size() && terms_[j].first == terms_[i].first) acc = F.add(acc, terms_[j++].second);
        if (acc.code != 0) {
            f.exps_.insert(f.exps_.end(), terms_[i].first.begin(), terms_[i].first.end());
            f.coeffs_.push_back(acc);
        }
        i = j;
    }
    return f;
}

Form Form::from_terms(FieldPtr field, int nvars, int degree,
                      const std::vector<std::pair<std::vector<int>, Elem>>& terms) {
    FormBuilder b(std::move(field), nvars, degree);
    for (const auto& [e, c] : terms) b.add(e, c);
    return std::move(b).build();
}

Form Form::variable(FieldPtr field, int nvars, int i) {
    std::vector<int> e(nvars, 0);
    e.at(i) = 1;
    auto one = field->one();
    return from_terms(std::move(field), nvars, 1, {{e, one}});
}

Form Form::linear(FieldPtr field, std::span<const Elem> coeffs) {
    const int n = static_cast<int>(coeffs.size());
    FormBuilder b(field, n, 1);
    std::vector<int> e(n, 0);
    for (int i = 0; i < n; ++i) {
        e[i] = 1;
        b.add(e, coeffs[i]);
        e[i] = 0;
    }
    return std::move(b).build();
}

Form Form::constant(FieldPtr field, int nvars, Elem c) {
    FormBuilder b(std::move(field), nvars, 0);
    b.add(std::vector<int>(nvars, 0), c);
    return std::move(b).build();
}

namespace {

void check_compatible(const Form& a, const Form& b) {
    if (!(*a.field() == *b.field())) throw PolyError("field mismatch");
    if (a.nvars() != b.nvars()) throw PolyError("variable count mismatch");
}

Form add_scaled(const Form& a, const Form& b, bool subtract) {
    check_compatible(a, b);
    if (a.degree() != b.degree()) {
        if (a.is_zero()) return subtract ? -b : b;
        if (b.is_zero()) return a;
        throw PolyError("sum of forms of different degrees");
    }
    const Field& F = *a.field();
    FormBuilder out(a.field(), a.nvars(), a.degree());
    for (std::size_t t = 0; t < a.num_terms(); ++t) out.add(a.exponents(t), a.coeff(t));
    for (std::size_t t = 0; t < b.num_terms(); ++t) out.add(b.exponents(t), subtract ? F.neg(b.coeff(t)) : b.coeff(t));
    return std::move(out).build();
}

// Packed exponent keys for fast products when the shape allows it.
bool packable(int nvars, int degree) { return nvars <= 8 && degree <= 255; }

std::uint64_t pack(std::span<const int> e) {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < e.size(); ++i) k |= static_cast<std::uint64_t>(e[i]) << (8 * i);
    return k;
}

void unpack(std::uint64_t k, int nvars, std::vector<int>& e) {
    e.resize(nvars);
    for (int i = 0; i < nvars; ++i) e[i] = static_cast<int>((k >> (8 * i)) & 0xff);
}

Form multiply(const Form& a, const Form& b) {
    check_compatible(a, b);
    const Field& F = *a.field();
    const int n = a.nvars();
    const int deg = a.degree() + b.degree();
    if (a.is_zero() || b.is_zero()) return Form(a.field(), n, deg);
    FormBuilder out(a.field(), n, deg);
    std::vector<int> e(n);
    if (packable(n, deg)) {
        std::unordered_map<std::uint64_t, Elem> acc;
        acc.reserve(a.num_terms() * b.num_terms());
        for (std::size_t i = 0; i < a.num_terms(); ++i) {
            const auto ka = pack(a.exponents(i));
            for (std::size_t j = 0; j < b.num_terms(); ++j) {
                auto& slot = acc[ka + pack(b.exponents(j))];
                slot = F.add(slot, F.mul(a.coeff(i), b.coeff(j)));
            }
        }
        for (const auto& [k, c] : acc) {
            unpack(k, n, e);
            out.add(e, c);
        }
        return std::move(out).build();
    }
    for (std::size_t i = 0; i < a.num_terms(); ++i) {
        for (std::size_t j = 0; j < b.num_terms(); ++j) {
            for (int v = 0; v < n; ++v) e[v] = a.exponents(i)[v] + b.exponents(j)[v];
            out.add(e, F.mul(a.coeff(i), b.coeff(j)));
        }
    }
    return std::move(out).build();
}

} // namespace

Form operator+(const Form& a, const Form& b) { return add_scaled(a, b, false); }
Form operator-(const Form& a, const Form& b) { return add_scaled(a, b, true); }
Form operator*(const Form& a, const Form& b) { return multiply(a, b); }

Form operator-(const Form& a) { return scale(a, a.field()->neg(a.field()->one())); }

Form scale(const Form& a, Elem c) {
    const Field& F = *a.field();
    FormBuilder out(a.field(), a.nvars(), a.degree());
    for (std::size_t t = 0; t < a.num_terms(); ++t) out.add(a.exponents(t), F.mul(a.coeff(t), c));
    return std::move(out).build();
}

Form partial(const Form& f, int i) {
    if (i < 0 || i >= f.nvars()) throw PolyError("partial derivative index out of range");
    const Field& F = *f.field();
    const int deg = std::max(f.degree() - 1, 0);
    FormBuilder out(f.field(), f.nvars(), deg);
    if (f.degree() == 0) return std::move(out).build();
    std::vector<int> e;
    for (std::size_t t = 0; t < f.num_terms(); ++t) {
        auto ex = f.exponents(t);
        if (ex[i] == 0) continue;
        const Elem mult = F.from_int(ex[i]);
        if (mult.code == 0) continue;
        e.assign(ex.begin(), ex.end());
        --e[i];
        out.add(e, F.mul(f.coeff(t), mult));
    }
    return std::move(out).build();
}

std::vector<Form> form_partials(const Form& f) {
    std::vector<Form> out;
    out.reserve(f.nvars());
    for (int i = 0; i < f.nvars(); ++i) out.push_back(partial(f, i));
    return out;
}

namespace {

// Frobenius x -> x^{p^k} applied to a whole form (freshman's dream in char p).
Form frobenius_power(const Form& f, int k) {
    const Field& F = *f.field();
    std::uint64_t pk = 1;
    for (int i = 0; i < k; ++i) pk *= F.characteristic();
    const int deg = f.degree() * static_cast<int>(pk);
    FormBuilder out(f.field(), f.nvars(), deg);
    std::vector<int> e(f.nvars());
    for (std::size_t t = 0; t < f.num_terms(); ++t) {
        auto ex = f.exponents(t);
        for (int v = 0; v < f.nvars(); ++v) e[v] = ex[v] * static_cast<int>(pk);
        out.add(e, F.pow(f.coeff(t), pk));
    }
    return std::move(out).build();
}

} // namespace

Form form_pow(const Form& f, std::uint64_t e) {
    if (e == 0) throw PolyError("form_pow exponent must be positive");
    if (static_cast<unsigned __int128>(f.degree()) * e > kMaxFormDegree)
        throw PolyError("form_pow result degree exceeds the configured cap");
    if (e == 1) return f;
    const std::uint64_t p = f.field()->characteristic();
    int k = 0;
    std::uint64_t rest = e;
    while (rest % p == 0) {
        rest /= p;
        ++k;
    }
    Form base = f;
    Form acc = Form::constant(f.field(), f.nvars(), f.field()->one());
    while (rest) {
        if (rest & 1) acc = acc * base;
        rest >>= 1;
        if (rest) base = base * base;
    }
    return k ? frobenius_power(acc, k) : acc;
}

Form embed_form(const Form& f, const FieldPtr& E) {
    if (*f.field() == *E) return f;
    const gf::Tower& T = f.field()->tower();
    if (!f.field()->same_tower(*E)) throw PolyError("field tower mismatch");
    FormBuilder out(E, f.nvars(), f.degree());
    for (std::size_t t = 0; t < f.num_terms(); ++t)
        out.add(f.exponents(t), T.embed(f.coeff(t), f.field()->level(), E->level()));
    return std::move(out).build();
}

Form restrict_form(const Form& f, const std::vector<std::vector<Elem>>& rows, const FieldPtr& E) {
    const int k = static_cast<int>(rows.size());
    if (k == 0) throw PolyError("restriction to an empty subspace");
    for (const auto& r : rows)
        if (static_cast<int>(r.size()) != f.nvars()) throw PolyError("dimension mismatch in restriction");
    const Form g = embed_form(f, E);
    const Field& F = *E;
    const int n = f.nvars();
    const int d = f.degree();
    if (g.is_zero()) return Form(E, k, d);

    if (packable(k, d)) {
        // Dense-ish expansion with packed keys: powers of each substituted variable.
        using Poly = std::unordered_map<std::uint64_t, Elem>;
        std::vector<std::vector<Poly>> powers(n);
        for (int j = 0; j < n; ++j) {
            const int m = g.max_exponent(j);
            powers[j].resize(m + 1);
            powers[j][0][0] = F.one();
            Poly lin;
            for (int i = 0; i < k; ++i)
                if (rows[i][j].code) lin[std::uint64_t{1} << (8 * i)] = rows[i][j];
            for (int e = 1; e <= m; ++e) {
                Poly next;
                for (const auto& [ka, ca] : powers[j][e - 1])
                    for (const auto& [kb, cb] : lin) {
                        auto& s = next[ka + kb];
                        s = F.add(s, F.mul(ca, cb));
                    }
                powers[j][e] = std::move(next);
            }
        }
        Poly acc;
        for (std::size_t t = 0; t < g.num_terms(); ++t) {
            Poly cur;
            cur[0] = g.coeff(t);
            auto ex = g.exponents(t);
            for (int j = 0; j < n && !cur.empty(); ++j) {
                if (ex[j] == 0) continue;
                const Poly& pw = powers[j][ex[j]];
                Poly next;
                for (const auto& [ka, ca] : cur)
                    for (const auto& [kb, cb] : pw) {
                        auto& s = next[ka + kb];
                        s = F.add(s, F.mul(ca, cb));
                    }
                cur = std::move(next);
            }
            for (const auto& [key, c] : cur) {
                auto& s = acc[key];
                s = F.add(s, c);
            }
        }
        FormBuilder out(E, k, d);
        std::vector<int> e;
        for (const auto& [key, c] : acc) {
            unpack(key, k, e);
            out.add(e, c);
        }
        return std::move(out).build();
    }

    std::vector<Form> lin;
    for (int j = 0; j < n; ++j) {
        std::vector<Elem> c(k);
        for (int i = 0; i < k; ++i) c[i] = rows[i][j];
        lin.push_back(Form::linear(E, c));
    }
    Form acc(E, k, d);
    for (std::size_t t = 0; t < g.num_terms(); ++t) {
        Form cur = Form::constant(E, k, g.coeff(t));
        auto ex = g.exponents(t);
        for (int j = 0; j < n; ++j)
            for (int e = 0; e < ex[j]; ++e) cur = cur * lin[j];
        acc = acc + cur;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Evaluation

FormEvaluator::FormEvaluator(const Form& f, FieldPtr E) : E_(std::move(E)), nvars_(f.nvars()) {
    const Form g = embed_form(f, E_);
    exps_.reserve(g.num_terms() * nvars_);
    for (std::size_t t = 0; t < g.num_terms(); ++t) {
        auto ex = g.exponents(t);
        exps_.insert(exps_.end(), ex.begin(), ex.end());
        coeffs_.push_back(g.coeff(t));
    }
    max_exp_.resize(nvars_);
    for (int j = 0; j < nvars_; ++j) max_exp_[j] = g.max_exponent(j);
}

Elem FormEvaluator::operator()(std::span<const Elem> point) const {
    if (static_cast<int>(point.size()) != nvars_) throw PolyError("evaluation point has the wrong dimension");
    const Field& F = *E_;
    // Small power tables per variable.
    thread_local std::vector<Elem> table;
    std::vector<std::size_t> offset(nvars_ + 1, 0);
    for (int j = 0; j < nvars_; ++j) offset[j + 1] = offset[j] + max_exp_[j] + 1;
    table.resize(offset[nvars_]);
    for (int j = 0; j < nvars_; ++j) {
        Elem* row = table.data() + offset[j];
        row[0] = F.one();
        for (int e = 1; e <= max_exp_[j]; ++e) row[e] = F.mul(row[e - 1], point[j]);
    }
    Elem acc = F.zero();
    for (std::size_t t = 0; t < coeffs_.size(); ++t) {
        Elem term = coeffs_[t];
        const int* ex = exps_.data() + t * nvars_;
        for (int j = 0; j < nvars_ && term.code; ++j)
            if (ex[j]) term = F.mul(term, table[offset[j] + ex[j]]);
        acc = F.add(acc, term);
    }
    return acc;
}

Elem form_eval(const Form& f, std::span<const Elem> point, const FieldPtr& E) { return FormEvaluator(f, E)(point); }

// ---------------------------------------------------------------------------
// Binary forms

UniPoly dehomogenize_binary(const Form& g) {
    if (g.nvars() != 2) throw PolyError("binary form expected");
    dense::Coeffs c(g.degree() + 1, g.field()->zero());
    for (std::size_t t = 0; t < g.num_terms(); ++t) c[g.exponents(t)[1]] = g.coeff(t);
    return UniPoly(g.field(), std::move(c));
}

bool binary_squarefree(const Form& g) {
    if (g.is_zero()) return false;
    UniPoly f = dehomogenize_binary(g);
    // Multiplicity of the root at infinity [0:1] is the drop in degree.
    if (g.degree() - f.degree() > 1) return false;
    return upoly_squarefree(f);
}

// ---------------------------------------------------------------------------
// Text

namespace {

std::string coeff_text(const Field& F, Elem c) {
    std::string s = F.to_string(c);
    const bool bare = std::all_of(s.begin(), s.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
    return bare ? s : "(" + s + ")";
}

} // namespace

std::string to_string(const Form& f) {
    if (f.is_zero()) return "0";
    const Field& F = *f.field();
    std::string out;
    for (std::size_t t = 0; t < f.num_terms(); ++t) {
        if (t) out += " + ";
        std::string mono;
        auto ex = f.exponents(t);
        for (int v = 0; v < f.nvars(); ++v) {
            if (ex[v] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += "x" + std::to_string(v);
            if (ex[v] > 1) mono += "^" + std::to_string(ex[v]);
        }
        const Elem c = f.coeff(t);
        if (mono.empty()) {
            out += coeff_text(F, c);
        } else if (c == F.one()) {
            out += mono;
        } else {
            out += coeff_text(F, c) + "*" + mono;
        }
    }
    return out;
}

namespace {

class FormParser {
public:
    FormParser(std::string_view text, const FieldPtr& field, int nvars, int first_line)
        : s_(text), field_(field), nvars_(nvars), line_(first_line) {}

    Form parse() {
        skip_ws();
        if (at_end()) fail("empty polynomial");
        bool first = true;
        while (true) {
            skip_ws();
            if (at_end()) break;
            bool negative = false;
            const int term_line = line_, term_col = col_;
            if (peek() == '+' || peek() == '-') {
                negative = peek() == '-';
                advance();
                skip_ws();
            } else if (!first) {
                fail("expected '+' or '-'");
            }
            first = false;
            Elem c = field_->one();
            std::vector<int> e(nvars_, 0);
            bool have_coeff = false;
            if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '(' || peek() == 't') {
                c = parse_coeff();
                have_coeff = true;
                skip_ws();
                if (!at_end() && peek() == '*') {
                    advance();
                    skip_ws();
                    parse_monomial(e);
                } else if (!at_end() && peek() == 'x') {
                    parse_monomial(e);
                }
            } else if (peek() == 'x') {
                parse_monomial(e);
            } else {
                fail(std::string("unexpected character '") + peek() + "'");
            }
            (void)have_coeff;
            int deg = 0;
            for (int x : e) deg += x;
            if (degree_ < 0) {
                degree_ = deg;
            } else if (deg != degree_) {
                throw ParseError("inhomogeneous form: term of degree " + std::to_string(deg) + " in a form of degree " +
                                     std::to_string(degree_),
                                 term_line, term_col);
            }
            if (negative) c = field_->neg(c);
            terms_.emplace_back(std::move(e), c);
        }
        FormBuilder b(field_, nvars_, degree_);
        for (const auto& [e, c] : terms_) b.add(e, c);
        return std::move(b).build();
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return at_end() ? '\0' : s_[pos_]; }
    void advance() {
        if (s_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
    }

    std::uint64_t parse_uint() {
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected an integer");
        std::uint64_t v = 0;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
            if (v > (1ULL << 58)) fail("integer too large");
            v = v * 10 + static_cast<std::uint64_t>(peek() - '0');
            advance();
        }
        return v;
    }

    Elem parse_coeff() {
        const int l = line_, c = col_;
        if (peek() == '(') {
            advance();
            const std::size_t start = pos_;
            int depth = 1;
            while (!at_end() && depth > 0) {
                if (peek() == '(') ++depth;
                if (peek() == ')') --depth;
                if (depth > 0) advance();
            }
            if (at_end()) throw ParseError("unbalanced parenthesis", l, c);
            std::string_view inner = s_.substr(start, pos_ - start);
            advance();
            try {
                return field_->parse(inner);
            } catch (const gf::FieldError& e) {
                throw ParseError(e.what(), l, c);
            }
        }
        if (peek() == 't') {
            const std::size_t start = pos_;
            advance();
            if (peek() == '^') {
                advance();
                parse_uint();
            }
            try {
                return field_->parse(s_.substr(start, pos_ - start));
            } catch (const gf::FieldError& e) {
                throw ParseError(e.what(), l, c);
            }
        }
        const std::uint64_t v = parse_uint();
        return field_->from_int(static_cast<std::int64_t>(v % field_->characteristic()));
    }

    void parse_monomial(std::vector<int>& e) {
        while (true) {
            skip_ws();
            if (peek() != 'x') fail("expected a variable x<i>");
            const int l = line_, c = col_;
            advance();
            const std::uint64_t idx = parse_uint();
            if (idx >= static_cast<std::uint64_t>(nvars_))
                throw ParseError("variable x" + std::to_string(idx) + " outside the ambient space", l, c);
            std::uint64_t pw = 1;
            skip_ws();
            if (peek() == '^') {
                advance();
                skip_ws();
                pw = parse_uint();
                if (pw > static_cast<std::uint64_t>(kMaxFormDegree)) fail("exponent too large");
            }
            e[idx] += static_cast<int>(pw);
            skip_ws();
            if (peek() == 'x') continue;
            if (peek() == '*' && pos_ + 1 < s_.size()) {
                // Only continue when the next factor is a variable.
                std::size_t look = pos_ + 1;
                while (look < s_.size() && std::isspace(static_cast<unsigned char>(s_[look]))) ++look;
                if (look < s_.size() && s_[look] == 'x') {
                    advance();
                    continue;
                }
                fail("coefficients must precede the monomial");
            }
            return;
        }
    }

    std::string_view s_;
    const FieldPtr& field_;
    int nvars_;
    std::size_t pos_ = 0;
    int line_;
    int col_ = 1;
    int degree_ = -1;
    std::vector<std::pair<std::vector<int>, Elem>> terms_;
};

} // namespace

Form parse_form(std::string_view text, const FieldPtr& field, int nvars, int first_line) {
    return FormParser(text, field, nvars, first_line).parse();
}

} // namespace transverse
