#pragma once

// Univariate polynomials over a finite field and sparse homogeneous forms.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "transverse/dense_poly.hpp"
#include "transverse/gf.hpp"

namespace transverse {

using gf::Elem;
using gf::Field;
using gf::FieldPtr;
using gf::Rng;

class PolyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public std::invalid_argument {
public:
    ParseError(const std::string& what, int line, int column)
        : std::invalid_argument(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// ---------------------------------------------------------------------------
// Univariate

class UniPoly {
public:
    UniPoly(FieldPtr field, gf::dense::Coeffs coeffs);

    const FieldPtr& field() const { return field_; }
    const gf::dense::Coeffs& coeffs() const { return coeffs_; }
    int degree() const { return gf::dense::degree(coeffs_); }
    bool is_zero() const { return coeffs_.empty(); }

    friend bool operator==(const UniPoly& a, const UniPoly& b) {
        return *a.field_ == *b.field_ && a.coeffs_ == b.coeffs_;
    }

private:
    FieldPtr field_;
    gf::dense::Coeffs coeffs_;
};

UniPoly upoly_gcd(const UniPoly& f, const UniPoly& g);
/// No repeated root over the algebraic closure. Throws on the zero polynomial.
bool upoly_squarefree(const UniPoly& f);
/// Roots of f in F_{q^k} (q = |f.field()|) with multiplicities, sorted by code.
/// Roots are elements of f.field()->extension(k).
std::vector<std::pair<Elem, int>> upoly_roots_in_extension(const UniPoly& f, int k);

// ---------------------------------------------------------------------------
// Forms

class Form {
public:
    /// The zero form of the given degree.
    Form(FieldPtr field, int nvars, int degree);

    /// Terms may repeat (they are summed); zero coefficients are dropped.
    /// Every exponent vector must sum to `degree`.
    static Form from_terms(FieldPtr field, int nvars, int degree,
                           const std::vector<std::pair<std::vector<int>, Elem>>& terms);
    static Form variable(FieldPtr field, int nvars, int i);
    static Form linear(FieldPtr field, std::span<const Elem> coeffs);
    static Form constant(FieldPtr field, int nvars, Elem c);

    const FieldPtr& field() const { return field_; }
    int nvars() const { return nvars_; }
    int degree() const { return degree_; }
    std::size_t num_terms() const { return coeffs_.size(); }
    bool is_zero() const { return coeffs_.empty(); }
    std::span<const int> exponents(std::size_t term) const {
        return {exps_.data() + term * nvars_, static_cast<std::size_t>(nvars_)};
    }
    Elem coeff(std::size_t term) const { return coeffs_[term]; }
    int max_exponent(int var) const;

    friend bool operator==(const Form& a, const Form& b);

private:
    friend class FormBuilder;
    FieldPtr field_;
    int nvars_;
    int degree_;
    std::vector<int> exps_;
    std::vector<Elem> coeffs_;
};

/// Accumulates terms of one degree; build() sorts them in descending lex order.
class FormBuilder {
public:
    FormBuilder(FieldPtr field, int nvars, int degree);
    void add(std::span<const int> exps, Elem c);
    Form build() &&;

private:
    FieldPtr field_;
    int nvars_;
    int degree_;
    std::vector<std::pair<std::vector<int>, Elem>> terms_;
};

Form operator+(const Form& a, const Form& b);
Form operator-(const Form& a, const Form& b);
Form operator*(const Form& a, const Form& b);
Form operator-(const Form& a);
Form scale(const Form& a, Elem c);

/// Degree cap for form_pow results.
inline constexpr int kMaxFormDegree = 4096;

Form partial(const Form& f, int i);
std::vector<Form> form_partials(const Form& f);
Form form_pow(const Form& f, std::uint64_t e);
/// Same form with coefficients embedded into an extension E of its field.
Form embed_form(const Form& f, const FieldPtr& E);
/// Substitutes x = u * rows (rows: r+1 vectors of length nvars over f's field
/// or an extension of it). Result has r+1 variables and lives over the rows' field.
Form restrict_form(const Form& f, const std::vector<std::vector<Elem>>& rows, const FieldPtr& rows_field);

/// Evaluates a form at points over an extension E of its field.
class FormEvaluator {
public:
    FormEvaluator(const Form& f, FieldPtr E);
    Elem operator()(std::span<const Elem> point) const;
    const FieldPtr& field() const { return E_; }

private:
    FieldPtr E_;
    int nvars_;
    std::vector<int> exps_;
    std::vector<int> max_exp_;
    std::vector<Elem> coeffs_;
};

Elem form_eval(const Form& f, std::span<const Elem> point, const FieldPtr& E);

/// Binary form (2 variables) without repeated factors over the algebraic closure.
/// The zero form is not squarefree.
bool binary_squarefree(const Form& g);
/// g(1, x) as a univariate polynomial.
UniPoly dehomogenize_binary(const Form& g);

/// Text form, e.g. `x0^3 + 2*x1^2*x2 + (t+1)*x2^3`.
std::string to_string(const Form& f);
/// Parses the polynomial grammar. line/column of errors are reported relative to
/// the given starting line. Inhomogeneous input is an error.
Form parse_form(std::string_view text, const FieldPtr& field, int nvars, int first_line = 1);

} // namespace transverse
