#include "transverse/gf.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "transverse/dense_poly.hpp"

namespace transverse::gf {

namespace {

std::atomic<int> g_max_field_bits{kDefaultMaxFieldBits};

constexpr std::uint64_t kTableThreshold = 1ULL << 20;

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, p);
        a = mulmod_u64(a, a, p);
        e >>= 1;
    }
    return r;
}

std::uint64_t inv_mod_p(std::uint64_t a, std::uint64_t p) { return powmod_u64(a, p - 2, p); }

// p^e if it fits under 2^bits, otherwise nullopt.
std::optional<std::uint64_t> checked_power(std::uint64_t p, int e, int bits) {
    const unsigned __int128 limit = static_cast<unsigned __int128>(1) << bits;
    unsigned __int128 v = 1;
    for (int i = 0; i < e; ++i) {
        v *= p;
        if (v > limit) return std::nullopt;
    }
    return static_cast<std::uint64_t>(v);
}

// Polynomials over F_p as digit vectors, low degree first.
using PP = std::vector<std::uint64_t>;

void pp_trim(PP& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

PP pp_mod(PP a, const PP& m, std::uint64_t p) {
    pp_trim(a);
    const std::size_t dm = m.size() - 1;
    const std::uint64_t lead_inv = inv_mod_p(m.back(), p);
    while (a.size() > dm) {
        const std::uint64_t c = mulmod_u64(a.back(), lead_inv, p);
        const std::size_t shift = a.size() - 1 - dm;
        for (std::size_t j = 0; j <= dm; ++j) {
            a[shift + j] = (a[shift + j] + p - mulmod_u64(c, m[j], p)) % p;
        }
        pp_trim(a);
    }
    return a;
}

PP pp_mulmod(const PP& a, const PP& b, const PP& m, std::uint64_t p) {
    if (a.empty() || b.empty()) return {};
    PP r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod_u64(a[i], b[j], p)) % p;
    return pp_mod(std::move(r), m, p);
}

PP pp_powmod(PP base, std::uint64_t e, const PP& m, std::uint64_t p) {
    PP r = pp_mod(PP{1}, m, p);
    base = pp_mod(std::move(base), m, p);
    while (e) {
        if (e & 1) r = pp_mulmod(r, base, m, p);
        e >>= 1;
        if (e) base = pp_mulmod(base, base, m, p);
    }
    return r;
}

PP pp_gcd(PP a, PP b, std::uint64_t p) {
    pp_trim(a);
    pp_trim(b);
    while (!b.empty()) {
        PP r = pp_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> f;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            f.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) f.push_back(n);
    return f;
}

} // namespace

int max_field_bits() { return g_max_field_bits.load(); }

void set_max_field_bits(int bits) {
    if (bits < 1 || bits > 62) throw FieldError("max field bits must lie in [1, 62]");
    g_max_field_bits.store(bits);
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

bool is_irreducible_mod_p(std::uint64_t p, const std::vector<std::uint64_t>& poly) {
    PP g = poly;
    pp_trim(g);
    const int m = static_cast<int>(g.size()) - 1;
    if (m < 1) return false;
    if (m == 1) return true;
    // Ben-Or: no factor of degree i <= m/2, i.e. gcd(g, t^{p^i} - t) = 1.
    PP t = {0, 1};
    PP h = pp_mod(t, g, p);
    for (int i = 1; i <= m / 2; ++i) {
        h = pp_powmod(h, p, g, p);
        PP diff = h;
        if (diff.size() < 2) diff.resize(2, 0);
        diff[1] = (diff[1] + p - 1) % p;
        pp_trim(diff);
        PP d = pp_gcd(g, diff, p);
        if (d.size() != 1) return false;
    }
    return true;
}

std::vector<std::uint64_t> smallest_irreducible(std::uint64_t p, int m) {
    if (m < 1) throw FieldError("extension degree must be positive");
    if (m == 1) return {0, 1};
    const auto count = checked_power(p, m, 62);
    if (!count) throw CapExceeded("modulus search space too large");
    for (std::uint64_t n = 0; n < *count; ++n) {
        std::vector<std::uint64_t> c(m + 1, 0);
        std::uint64_t v = n;
        for (int i = 0; i < m; ++i) {
            c[i] = v % p;
            v /= p;
        }
        c[m] = 1;
        if (c[0] == 0) continue;
        if (is_irreducible_mod_p(p, c)) return c;
    }
    throw FieldError("no irreducible polynomial found");
}

// ---------------------------------------------------------------------------
// Field

Field::Field(const Tower* tower, std::uint64_t p, int level, std::vector<std::uint64_t> modulus)
    : tower_(tower), p_(p), degree_(static_cast<int>(modulus.size()) - 1), level_(level),
      modulus_(std::move(modulus)) {
    const auto order = checked_power(p_, degree_, max_field_bits());
    if (!order) {
        throw CapExceeded("field of order " + std::to_string(p_) + "^" + std::to_string(degree_) +
                          " exceeds the configured cap of 2^" + std::to_string(max_field_bits()));
    }
    order_ = *order;
    pow_p_.resize(degree_ + 1);
    pow_p_[0] = 1;
    for (int i = 1; i <= degree_; ++i) pow_p_[i] = pow_p_[i - 1] * p_;
    use_tables_ = order_ <= kTableThreshold;
}

std::uint64_t Field::base_order() const { return tower_->base_order(); }

FieldPtr Field::self() const { return tower_->level(level_); }
FieldPtr Field::extension(int k) const {
    if (k < 1) throw FieldError("extension degree must be positive");
    return tower_->level(level_ * k);
}
FieldPtr Field::base() const { return tower_->level(1); }

void Field::decode(std::uint64_t code, std::uint64_t* out) const {
    if (p_ == 2) {
        for (int i = 0; i < degree_; ++i) out[i] = (code >> i) & 1;
        return;
    }
    for (int i = 0; i < degree_; ++i) {
        out[i] = code % p_;
        code /= p_;
    }
}

std::uint64_t Field::encode(const std::uint64_t* d) const {
    std::uint64_t c = 0;
    for (int i = degree_ - 1; i >= 0; --i) c = c * p_ + d[i];
    return c;
}

Elem Field::generator() const {
    if (degree_ == 1) return {0};
    return {p_};
}

Elem Field::from_int(std::int64_t v) const {
    const std::int64_t p = static_cast<std::int64_t>(p_);
    std::int64_t r = v % p;
    if (r < 0) r += p;
    return {static_cast<std::uint64_t>(r)};
}

Elem Field::from_digits(std::span<const std::uint64_t> digits) const {
    PP d(digits.begin(), digits.end());
    for (auto& x : d) x %= p_;
    d = pp_mod(std::move(d), modulus_, p_);
    d.resize(degree_, 0);
    return {encode(d.data())};
}

std::vector<std::uint64_t> Field::digits(Elem a) const {
    std::vector<std::uint64_t> d(degree_);
    decode(a.code, d.data());
    return d;
}

Elem Field::element(std::uint64_t index) const {
    if (index >= order_) throw FieldError("element index out of range");
    return {index};
}

Elem Field::add(Elem a, Elem b) const {
    if (degree_ == 1) {
        std::uint64_t s = a.code + b.code;
        if (s >= p_) s -= p_;
        return {s};
    }
    if (p_ == 2) return {a.code ^ b.code};
    std::uint64_t x = a.code, y = b.code, r = 0, mult = 1;
    while (x | y) {
        std::uint64_t s = x % p_ + y % p_;
        if (s >= p_) s -= p_;
        r += s * mult;
        mult *= p_;
        x /= p_;
        y /= p_;
    }
    return {r};
}

Elem Field::neg(Elem a) const {
    if (a.code == 0 || p_ == 2) return a;
    if (degree_ == 1) return {p_ - a.code};
    std::uint64_t x = a.code, r = 0, mult = 1;
    while (x) {
        const std::uint64_t d = x % p_;
        r += (d ? p_ - d : 0) * mult;
        mult *= p_;
        x /= p_;
    }
    return {r};
}

Elem Field::sub(Elem a, Elem b) const {
    if (degree_ == 1) return {a.code >= b.code ? a.code - b.code : a.code + p_ - b.code};
    if (p_ == 2) return {a.code ^ b.code};
    return add(a, neg(b));
}

Elem Field::mul_slow(Elem a, Elem b) const {
    if (degree_ == 1) return {mulmod_u64(a.code, b.code, p_)};
    std::uint64_t da[64], db[64], prod[128] = {};
    decode(a.code, da);
    decode(b.code, db);
    // p <= 2^20 whenever degree >= 2 under a 2^62 cap, so products fit comfortably.
    for (int i = 0; i < degree_; ++i) {
        if (!da[i]) continue;
        for (int j = 0; j < degree_; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
    }
    for (int i = 2 * degree_ - 2; i >= degree_; --i) {
        const std::uint64_t c = prod[i];
        if (!c) continue;
        prod[i] = 0;
        for (int j = 0; j < degree_; ++j) {
            // t^degree = -sum modulus[j] t^j
            prod[i - degree_ + j] = (prod[i - degree_ + j] + (p_ - modulus_[j]) % p_ * c) % p_;
        }
    }
    return {encode(prod)};
}

Elem Field::pow_slow(Elem a, std::uint64_t e) const {
    Elem r = one();
    while (e) {
        if (e & 1) r = mul_slow(r, a);
        e >>= 1;
        if (e) a = mul_slow(a, a);
    }
    return r;
}

void Field::ensure_tables() const {
    std::call_once(tables_once_, [this] {
        const std::uint64_t n = order_ - 1;
        const auto factors = prime_factors(n);
        Elem g{0};
        for (std::uint64_t c = 1; c < order_; ++c) {
            bool primitive = true;
            for (auto l : factors) {
                if (pow_slow({c}, n / l) == one()) {
                    primitive = false;
                    break;
                }
            }
            if (primitive) {
                g = {c};
                break;
            }
        }
        exp_.assign(2 * n, 0);
        log_.assign(order_, 0);
        Elem x = one();
        for (std::uint64_t i = 0; i < n; ++i) {
            exp_[i] = static_cast<std::uint32_t>(x.code);
            exp_[i + n] = static_cast<std::uint32_t>(x.code);
            log_[x.code] = static_cast<std::uint32_t>(i);
            x = mul_slow(x, g);
        }
    });
}

Elem Field::mul(Elem a, Elem b) const {
    if (a.code == 0 || b.code == 0) return zero();
    if (degree_ == 1 && p_ < (1ULL << 32)) return {(a.code * b.code) % p_};
    if (use_tables_) {
        ensure_tables();
        return {exp_[log_[a.code] + log_[b.code]]};
    }
    return mul_slow(a, b);
}

Elem Field::inv(Elem a) const {
    if (a.code == 0) throw FieldError("inverse of zero");
    if (use_tables_) {
        ensure_tables();
        const std::uint64_t n = order_ - 1;
        return {exp_[(n - log_[a.code]) % n]};
    }
    if (degree_ == 1) return {inv_mod_p(a.code, p_)};
    return pow_slow(a, order_ - 2);
}

Elem Field::pow(Elem a, std::uint64_t e) const {
    if (e == 0) return one();
    if (a.code == 0) return zero();
    if (use_tables_) {
        ensure_tables();
        const std::uint64_t n = order_ - 1;
        const std::uint64_t k = mulmod_u64(log_[a.code], e % n, n);
        return {exp_[k]};
    }
    if (degree_ == 1) return {powmod_u64(a.code, e, p_)};
    return pow_slow(a, e);
}

Elem Field::frobenius(Elem a, std::uint64_t q) const {
    std::uint64_t v = q;
    if (v < p_) throw FieldError("Frobenius exponent must be a power of the characteristic");
    while (v % p_ == 0) v /= p_;
    if (v != 1) throw FieldError("Frobenius exponent must be a power of the characteristic");
    return pow(a, q);
}

std::string Field::to_string(Elem a) const {
    if (degree_ == 1) return std::to_string(a.code);
    const auto d = digits(a);
    std::string out;
    for (int i = degree_ - 1; i >= 0; --i) {
        if (d[i] == 0) continue;
        if (!out.empty()) out += "+";
        if (i == 0) {
            out += std::to_string(d[i]);
            continue;
        }
        if (d[i] != 1) out += std::to_string(d[i]) + "*";
        out += "t";
        if (i > 1) out += "^" + std::to_string(i);
    }
    return out.empty() ? "0" : out;
}

Elem Field::parse(std::string_view text) const {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    while (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
    if (s.empty()) throw FieldError("empty field element");

    std::size_t pos = 0;
    auto read_int = [&](std::uint64_t& out) {
        const std::size_t start = pos;
        out = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            out = (out * 10 + static_cast<std::uint64_t>(s[pos] - '0')) % p_;
            ++pos;
        }
        return pos > start;
    };

    PP acc;
    bool first = true;
    while (pos < s.size()) {
        bool negative = false;
        if (s[pos] == '+' || s[pos] == '-') {
            negative = s[pos] == '-';
            ++pos;
        } else if (!first) {
            throw FieldError("malformed field element '" + std::string(text) + "'");
        }
        first = false;
        std::uint64_t coeff = 1;
        std::uint64_t parsed = 0;
        const bool have_coeff = read_int(parsed);
        if (have_coeff) coeff = parsed;
        int exponent = 0;
        if (have_coeff && pos < s.size() && s[pos] == '*') ++pos;
        if (pos < s.size() && s[pos] == 't') {
            if (degree_ == 1) throw FieldError("coefficient outside field: 't' used in a prime field");
            ++pos;
            exponent = 1;
            if (pos < s.size() && s[pos] == '^') {
                ++pos;
                std::uint64_t e = 0;
                const std::size_t start = pos;
                e = 0;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                    e = e * 10 + static_cast<std::uint64_t>(s[pos] - '0');
                    ++pos;
                }
                if (pos == start || e > 4096) throw FieldError("bad exponent in '" + std::string(text) + "'");
                exponent = static_cast<int>(e);
            }
        } else if (!have_coeff) {
            throw FieldError("malformed field element '" + std::string(text) + "'");
        }
        if (acc.size() <= static_cast<std::size_t>(exponent)) acc.resize(exponent + 1, 0);
        const std::uint64_t c = negative ? (p_ - coeff) % p_ : coeff;
        acc[exponent] = (acc[exponent] + c) % p_;
    }
    return from_digits(acc);
}

// ---------------------------------------------------------------------------
// Tower

namespace {
std::mutex g_registry_mutex;
std::map<std::pair<std::uint64_t, std::vector<std::uint64_t>>, std::shared_ptr<Tower>>& registry() {
    static std::map<std::pair<std::uint64_t, std::vector<std::uint64_t>>, std::shared_ptr<Tower>> r;
    return r;
}
} // namespace

Tower::Tower(std::uint64_t p, std::vector<std::uint64_t> modulus)
    : p_(p), m_(static_cast<int>(modulus.size()) - 1), base_modulus_(std::move(modulus)) {
    q_ = 1;
    for (int i = 0; i < m_; ++i) q_ *= p_;
}

std::shared_ptr<const Tower> Tower::get(std::uint64_t p, std::vector<std::uint64_t> modulus) {
    std::lock_guard lock(g_registry_mutex);
    auto key = std::make_pair(p, modulus);
    auto& reg = registry();
    auto it = reg.find(key);
    if (it != reg.end()) return it->second;
    auto tower = std::make_shared<Tower>(p, std::move(modulus));
    reg.emplace(std::move(key), tower);
    return tower;
}

FieldPtr Tower::level(int k) const {
    if (k < 1) throw FieldError("tower level must be positive");
    std::lock_guard lock(levels_mutex_);
    auto it = levels_.find(k);
    if (it == levels_.end()) {
        const int deg = m_ * k;
        if (!checked_power(p_, deg, max_field_bits())) {
            throw CapExceeded("field of order " + std::to_string(p_) + "^" + std::to_string(deg) +
                              " exceeds the configured cap of 2^" + std::to_string(max_field_bits()));
        }
        auto modulus = k == 1 ? base_modulus_ : smallest_irreducible(p_, deg);
        it = levels_.emplace(k, std::unique_ptr<Field>(new Field(this, p_, k, std::move(modulus)))).first;
    }
    return FieldPtr(shared_from_this(), it->second.get());
}

const Embedding& Tower::embedding(int from, int to) const {
    if (from < 1 || to % from != 0) throw FieldError("embedding requires the source level to divide the target level");
    std::lock_guard lock(embed_mutex_);
    auto key = std::make_pair(from, to);
    auto it = embeddings_.find(key);
    if (it != embeddings_.end()) return *it->second;
    auto built = build_embedding(from, to);
    return *embeddings_.emplace(key, std::move(built)).first->second;
}

std::unique_ptr<Embedding> Tower::build_embedding(int from, int to) const {
    auto src = level(from);
    auto dst = level(to);
    const Field& T = *dst;
    auto e = std::make_unique<Embedding>();
    e->from = from;
    e->to = to;
    const int ds = src->prime_degree();

    Elem root = T.zero();
    if (from == to) {
        root = T.generator();
    } else if (ds > 1) {
        dense::Coeffs g;
        for (auto c : src->modulus()) g.push_back(T.from_int(static_cast<std::int64_t>(c)));
        auto candidates = dense::roots(T, g);
        if (static_cast<int>(candidates.size()) != ds) {
            throw FieldError("modulus corruption: source modulus does not split in the target level");
        }
        bool found = false;
        for (Elem rho : candidates) {
            auto map_into_target = [&](Elem x_in_src) {
                const auto d = src->digits(x_in_src);
                Elem acc = T.zero();
                Elem pw = T.one();
                for (int j = 0; j < ds; ++j) {
                    acc = T.add(acc, T.mul(T.from_int(static_cast<std::int64_t>(d[j])), pw));
                    pw = T.mul(pw, rho);
                }
                return acc;
            };
            bool compatible = true;
            for (int i = 1; i < from && compatible; ++i) {
                if (from % i != 0) continue;
                const Embedding& lo_src = embedding(i, from);
                const Embedding& lo_dst = embedding(i, to);
                for (std::size_t l = 0; l < lo_src.basis_images.size(); ++l) {
                    if (map_into_target(lo_src.basis_images[l]) != lo_dst.basis_images[l]) {
                        compatible = false;
                        break;
                    }
                }
            }
            if (compatible) {
                root = rho;
                found = true;
                break;
            }
        }
        if (!found) throw FieldError("no compatible embedding found (modulus corruption)");
    }

    e->basis_images.resize(ds);
    Elem pw = T.one();
    for (int j = 0; j < ds; ++j) {
        e->basis_images[j] = pw;
        pw = T.mul(pw, root);
    }

    // Row-reduce the images over F_p so descend() can solve for coordinates.
    const int dt = T.prime_degree();
    const std::uint64_t p = p_;
    std::vector<std::vector<std::uint64_t>> rows, coords;
    for (int j = 0; j < ds; ++j) {
        rows.push_back(T.digits(e->basis_images[j]));
        std::vector<std::uint64_t> unit(ds, 0);
        unit[j] = 1;
        coords.push_back(std::move(unit));
    }
    std::vector<int> pivots;
    int r = 0;
    for (int col = 0; col < dt && r < ds; ++col) {
        int piv = -1;
        for (int i = r; i < ds; ++i)
            if (rows[i][col] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(rows[r], rows[piv]);
        std::swap(coords[r], coords[piv]);
        const std::uint64_t inv = inv_mod_p(rows[r][col], p);
        for (auto& x : rows[r]) x = mulmod_u64(x, inv, p);
        for (auto& x : coords[r]) x = mulmod_u64(x, inv, p);
        for (int i = 0; i < ds; ++i) {
            if (i == r || rows[i][col] == 0) continue;
            const std::uint64_t f = rows[i][col];
            for (int c = 0; c < dt; ++c) rows[i][c] = (rows[i][c] + p - mulmod_u64(f, rows[r][c], p)) % p;
            for (int c = 0; c < ds; ++c) coords[i][c] = (coords[i][c] + p - mulmod_u64(f, coords[r][c], p)) % p;
        }
        pivots.push_back(col);
        ++r;
    }
    if (r != ds) throw FieldError("embedding images are not independent (modulus corruption)");
    e->reduced_rows = std::move(rows);
    e->reduced_coords = std::move(coords);
    e->pivots = std::move(pivots);
    return e;
}

Elem Tower::embed(Elem a, int from, int to) const {
    if (from == to) return a;
    const Embedding& e = embedding(from, to);
    auto src = level(from);
    auto dst = level(to);
    const auto d = src->digits(a);
    Elem acc = dst->zero();
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (d[j] == 0) continue;
        acc = dst->add(acc, dst->mul(dst->from_int(static_cast<std::int64_t>(d[j])), e.basis_images[j]));
    }
    return acc;
}

std::optional<Elem> Tower::descend(Elem a, int from, int to) const {
    // a lives in level `from`; `to` divides `from`.
    if (from == to) return a;
    const Embedding& e = embedding(to, from);
    auto big = level(from);
    auto small = level(to);
    auto v = big->digits(a);
    const std::uint64_t p = p_;
    std::vector<std::uint64_t> out(small->prime_degree(), 0);
    for (std::size_t i = 0; i < e.pivots.size(); ++i) {
        const std::uint64_t f = v[e.pivots[i]];
        if (f == 0) continue;
        for (std::size_t c = 0; c < v.size(); ++c) v[c] = (v[c] + p - mulmod_u64(f, e.reduced_rows[i][c], p)) % p;
        for (std::size_t c = 0; c < out.size(); ++c) out[c] = (out[c] + mulmod_u64(f, e.reduced_coords[i][c], p)) % p;
    }
    for (auto x : v)
        if (x != 0) return std::nullopt;
    return small->from_digits(out);
}

FieldPtr make_field(std::uint64_t p, int m, std::optional<std::vector<std::uint64_t>> modulus) {
    if (!is_prime(p)) throw FieldError(std::to_string(p) + " is not prime");
    if (m < 1) throw FieldError("extension degree must be positive");
    if (!checked_power(p, m, max_field_bits())) {
        throw CapExceeded("field of order " + std::to_string(p) + "^" + std::to_string(m) + " exceeds the configured cap");
    }
    std::vector<std::uint64_t> g;
    if (modulus) {
        g = *modulus;
        if (static_cast<int>(g.size()) != m + 1 || g.back() != 1)
            throw FieldError("modulus must be monic of degree " + std::to_string(m));
        for (auto c : g)
            if (c >= p) throw FieldError("modulus coefficients must be reduced mod p");
        if (m > 1 && !is_irreducible_mod_p(p, g)) throw FieldError("modulus is reducible over F_" + std::to_string(p));
    } else {
        g = smallest_irreducible(p, m);
    }
    return Tower::get(p, std::move(g))->level(1);
}

// ---------------------------------------------------------------------------
// FieldElement

void FieldElement::check_same(const FieldElement& o) const {
    if (!(*field_ == *o.field_)) throw FieldError("field mismatch");
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
    check_same(o);
    return {field_, field_->add(value_, o.value_)};
}
FieldElement FieldElement::operator-(const FieldElement& o) const {
    check_same(o);
    return {field_, field_->sub(value_, o.value_)};
}
FieldElement FieldElement::operator*(const FieldElement& o) const {
    check_same(o);
    return {field_, field_->mul(value_, o.value_)};
}
FieldElement FieldElement::operator/(const FieldElement& o) const {
    check_same(o);
    return {field_, field_->div(value_, o.value_)};
}

FieldElement frobenius_q(const FieldElement& a, std::uint64_t q) {
    return {a.field(), a.field()->frobenius(a.value(), q)};
}

bool in_subfield(const FieldElement& a, int j) {
    const Field& F = *a.field();
    if (j < 1 || F.level() % j != 0) throw FieldError("subfield degree must divide the extension degree");
    const std::uint64_t q = F.base_order();
    Elem x = a.value();
    for (int i = 0; i < j; ++i) x = F.pow(x, q);
    return x == a.value();
}

FieldElement embed(const FieldElement& a, const FieldPtr& target) {
    const Field& S = *a.field();
    if (!S.same_tower(*target)) throw FieldError("field tower mismatch");
    if (target->level() % S.level() != 0) throw FieldError("source degree does not divide target degree");
    return {target, S.tower().embed(a.value(), S.level(), target->level())};
}

} // namespace transverse::gf
