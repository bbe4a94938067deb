#pragma once

// Counting experiments checked against closed-form bounds. Bounds are kept as
// small expression trees so the printed formula and the value always agree.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "transverse/search.hpp"

namespace transverse::audit {

using Rational = boost::multiprecision::cpp_rational;

class Expr {
public:
    static Expr num(long v);
    static Expr var(std::string name);
    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr pow(const Expr& base, const Expr& e);

    /// Throws std::out_of_range on an unbound variable.
    Rational eval(const std::map<std::string, Rational>& env) const;
    std::string to_string() const;

    struct Node;

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct Bound {
    std::string name;
    Expr formula;
    std::string citation;
};

const Bound& nontransverse_lines_bound();   // 3/2 d(d-1)(q+1)
const Bound& irreducible_curve_bound();     // 1/2 (d-1)(3d-2)(q+1)
const Bound& bad_hyperplanes_bound();       // (d-t)(d-1)(q+1)^2 + 1/2 t(t-1)(q+1) + 1
const Bound& phi_bound();                   // (d-t)(d-1) + 1/2 t(t-1)
const Bound& tangent_superspaces_bound();   // d(d-1)^r (q+1)^(n-r-1)
const Bound& dual_contained_bound();        // d(d-1)^(n-1)

Rational bound_bad_hyperplanes(int d, int t, std::uint64_t q);

struct Params {
    std::optional<int> n, d, r, t;
    std::optional<std::uint64_t> q;
};

struct AuditReport {
    std::string experiment;
    Params params;
    std::uint64_t observed = 0;
    /// Empty for observational experiments.
    std::optional<Rational> bound;
    std::string bound_formula;
    std::string citation;
    /// "pass", "fail" or "observational".
    std::string verdict;
    std::optional<double> runtime_ms;
    std::uint64_t seed = 0;
    /// Experiment-specific counts, kept out of the CSV mirror.
    std::map<std::string, std::int64_t> details;

    bool passed() const { return verdict != "fail"; }
};

struct AuditOptions {
    std::uint64_t seed = kDefaultSeed;
    int jobs = 1;
    /// Record wall-clock runtimes (reports are then no longer byte-stable).
    bool timing = false;
};

/// A plane curve given by its factors over F_q, each geometrically irreducible;
/// `linear_factors` of them have degree 1.
struct CurveFixture {
    std::string name;
    FieldPtr field;
    std::vector<Form> factors;

    Form form() const;
    int degree() const;
    int linear_factors() const;
    /// Throws GeometryError when two factors are proportional.
    void validate() const;
};

/// Lines bound, plus the single-component bound when the curve is irreducible.
std::vector<AuditReport> count_nontransverse_lines(const CurveFixture& C, const AuditOptions& opts = {});
/// Hyperplanes with a non-proper or non-reduced section, against the bound with
/// the given number t of hyperplane components.
AuditReport count_bad_hyperplanes(const Hypersurface& X, int t, const AuditOptions& opts = {});
/// r-planes through H_prev split into tangent and dual-contained ones.
std::vector<AuditReport> count_bad_superspaces(const Hypersurface& X, const LinearSubspace& H_prev, int r,
                                               const AuditOptions& opts = {});
/// Every form of degree <= min(dmax, q) in P^n misses a point; plus the degree
/// q+1 witness that vanishes everywhere.
std::vector<AuditReport> audit_space_filling(int n, std::uint64_t q, int dmax, const AuditOptions& opts = {});

struct SeparationParams {
    int n = 3;
    int d = 3;
    std::uint64_t p = 2;
    int m = 1;
    int r = 1;
    int samples = 20;
};
/// Transverse but not very transverse r-planes on random smooth hypersurfaces.
AuditReport separation_search(const SeparationParams& params, const AuditOptions& opts = {});
AuditReport inequality_report(int nmax, int dmax, const AuditOptions& opts = {});

/// The standard fixture set used by `audit all`.
std::vector<AuditReport> run_all(const AuditOptions& opts = {});

std::string to_json(const std::vector<AuditReport>& reports);
std::string to_csv(const std::vector<AuditReport>& reports);

} // namespace transverse::audit
