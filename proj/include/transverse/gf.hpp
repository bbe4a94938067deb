#pragma once

// Finite field arithmetic for F_q = F_p[t]/(g) and its extensions F_{q^k}.
//
// Every field belongs to a Tower rooted at a base field F_q. Level k of the
// tower is F_{q^k}, stored as F_p[t]/(g_k) with deg g_k = m*k (a single-level
// representation, no nested quotients). Embeddings between levels j | k are
// chosen once, compatibly, and cached.
//
// Elements are plain codes (sum of digit_i * p^i over the basis 1, t, ...).
// Arithmetic always goes through the owning Field.

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace transverse::gf {

class FieldError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when an operation would need a field larger than the configured cap.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Elem {
    std::uint64_t code = 0;

    friend constexpr bool operator==(Elem, Elem) = default;
    friend constexpr auto operator<=>(Elem, Elem) = default;
};

inline constexpr int kDefaultMaxFieldBits = 40;

/// Upper bound on log2 of any field order the process will construct.
int max_field_bits();
void set_max_field_bits(int bits);

class Field;
class Tower;
using FieldPtr = std::shared_ptr<const Field>;
using Rng = std::mt19937_64;

bool is_prime(std::uint64_t n);

class Field {
public:
    Field(const Field&) = delete;
    Field& operator=(const Field&) = delete;

    std::uint64_t characteristic() const { return p_; }
    /// Degree over the prime field.
    int prime_degree() const { return degree_; }
    /// k such that this field is F_{q^k} over the tower base F_q.
    int level() const { return level_; }
    std::uint64_t order() const { return order_; }
    /// Order of the tower base field F_q.
    std::uint64_t base_order() const;
    /// Monic modulus over F_p, low degree first (size prime_degree()+1).
    const std::vector<std::uint64_t>& modulus() const { return modulus_; }

    const Tower& tower() const { return *tower_; }
    FieldPtr self() const;
    /// F_{|this|^k}, i.e. tower level level()*k.
    FieldPtr extension(int k) const;
    /// Tower level 1 (the base F_q).
    FieldPtr base() const;
    bool same_tower(const Field& other) const { return tower_ == other.tower_; }

    Elem zero() const { return {0}; }
    Elem one() const { return {1}; }
    /// The class of t (only meaningful when prime_degree() > 1).
    Elem generator() const;
    Elem from_int(std::int64_t v) const;
    /// Digits over F_p in the basis 1, t, t^2, ...; reduced mod the modulus.
    Elem from_digits(std::span<const std::uint64_t> digits) const;
    std::vector<std::uint64_t> digits(Elem a) const;
    /// The element with the given code (0 <= index < order()).
    Elem element(std::uint64_t index) const;
    Elem random(Rng& rng) const { return {rng() % order_}; }
    Elem random_nonzero(Rng& rng) const { return {1 + rng() % (order_ - 1)}; }

    bool is_zero(Elem a) const { return a.code == 0; }
    Elem add(Elem a, Elem b) const;
    Elem sub(Elem a, Elem b) const;
    Elem neg(Elem a) const;
    Elem mul(Elem a, Elem b) const;
    Elem inv(Elem a) const;
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
    Elem pow(Elem a, std::uint64_t e) const;
    /// a^q; q must be a power of the characteristic.
    Elem frobenius(Elem a, std::uint64_t q) const;

    /// Element text: integers for F_p, otherwise polynomials in t like `2*t+1`.
    std::string to_string(Elem a) const;
    Elem parse(std::string_view text) const;

    friend bool operator==(const Field& a, const Field& b) {
        return a.p_ == b.p_ && a.degree_ == b.degree_ && a.modulus_ == b.modulus_;
    }

private:
    friend class Tower;
    Field(const Tower* tower, std::uint64_t p, int level, std::vector<std::uint64_t> modulus);

    void ensure_tables() const;
    Elem mul_slow(Elem a, Elem b) const;
    Elem pow_slow(Elem a, std::uint64_t e) const;
    void decode(std::uint64_t code, std::uint64_t* out) const;
    std::uint64_t encode(const std::uint64_t* d) const;

    const Tower* tower_;
    std::uint64_t p_;
    int degree_;
    int level_;
    std::uint64_t order_;
    std::vector<std::uint64_t> modulus_;
    std::vector<std::uint64_t> pow_p_;

    bool use_tables_;
    mutable std::once_flag tables_once_;
    mutable std::vector<std::uint32_t> exp_;
    mutable std::vector<std::uint32_t> log_;
};

/// An embedding of tower level `from` into level `to` (from | to).
struct Embedding {
    int from = 0;
    int to = 0;
    /// Images of t^0, ..., t^{deg-1} of the source field.
    std::vector<Elem> basis_images;
    /// Row-reduced copy of basis_images as F_p digit vectors, for descending.
    std::vector<std::vector<std::uint64_t>> reduced_rows;
    std::vector<std::vector<std::uint64_t>> reduced_coords;
    std::vector<int> pivots;
};

class Tower : public std::enable_shared_from_this<Tower> {
public:
    /// Interned tower for base (p, modulus). Equal parameters give the same tower.
    static std::shared_ptr<const Tower> get(std::uint64_t p, std::vector<std::uint64_t> modulus);

    std::uint64_t characteristic() const { return p_; }
    int base_degree() const { return m_; }
    std::uint64_t base_order() const { return q_; }

    FieldPtr level(int k) const;
    const Embedding& embedding(int from, int to) const;

    Elem embed(Elem a, int from, int to) const;
    /// Preimage of a (in level `from`) inside level `to`, if a lies in that subfield.
    std::optional<Elem> descend(Elem a, int from, int to) const;

    Tower(std::uint64_t p, std::vector<std::uint64_t> modulus);

private:
    std::uint64_t p_;
    int m_;
    std::uint64_t q_;
    std::vector<std::uint64_t> base_modulus_;

    mutable std::mutex levels_mutex_;
    mutable std::map<int, std::unique_ptr<Field>> levels_;
    mutable std::recursive_mutex embed_mutex_;
    mutable std::map<std::pair<int, int>, std::unique_ptr<Embedding>> embeddings_;

    std::unique_ptr<Embedding> build_embedding(int from, int to) const;
};

/// Base field F_q with q = p^m. Without a modulus the lexicographically smallest
/// monic irreducible of degree m is used.
FieldPtr make_field(std::uint64_t p, int m, std::optional<std::vector<std::uint64_t>> modulus = std::nullopt);

/// Lexicographically smallest monic irreducible of degree m over F_p (low first).
std::vector<std::uint64_t> smallest_irreducible(std::uint64_t p, int m);
bool is_irreducible_mod_p(std::uint64_t p, const std::vector<std::uint64_t>& poly);

/// Owning element value type used at API boundaries.
class FieldElement {
public:
    FieldElement(FieldPtr field, Elem value) : field_(std::move(field)), value_(value) {}

    const FieldPtr& field() const { return field_; }
    Elem value() const { return value_; }
    std::vector<std::uint64_t> coeffs() const { return field_->digits(value_); }
    bool is_zero() const { return value_.code == 0; }

    FieldElement operator+(const FieldElement& o) const;
    FieldElement operator-(const FieldElement& o) const;
    FieldElement operator*(const FieldElement& o) const;
    FieldElement operator/(const FieldElement& o) const;
    FieldElement operator-() const { return {field_, field_->neg(value_)}; }
    FieldElement pow(std::uint64_t e) const { return {field_, field_->pow(value_, e)}; }
    FieldElement inverse() const { return {field_, field_->inv(value_)}; }
    std::string to_string() const { return field_->to_string(value_); }

    friend bool operator==(const FieldElement& a, const FieldElement& b) {
        return *a.field_ == *b.field_ && a.value_ == b.value_;
    }

private:
    void check_same(const FieldElement& o) const;

    FieldPtr field_;
    Elem value_;
};

/// a^q for a in an extension of F_q.
FieldElement frobenius_q(const FieldElement& a, std::uint64_t q);
/// True iff a^{q^j} = a, where q is the tower base order and j | level.
bool in_subfield(const FieldElement& a, int j);
/// Image of a under the cached embedding into `target` (same tower, level divides).
FieldElement embed(const FieldElement& a, const FieldPtr& target);

} // namespace transverse::gf
