#pragma once

// Dense univariate polynomial kernels over a gf::Field. Coefficients are stored
// low degree first and kept trimmed (the zero polynomial is the empty vector).

#include <vector>

#include "transverse/gf.hpp"

namespace transverse::gf::dense {

using Coeffs = std::vector<Elem>;

void trim(Coeffs& f);
inline int degree(const Coeffs& f) { return static_cast<int>(f.size()) - 1; }

Coeffs add(const Field& F, const Coeffs& a, const Coeffs& b);
Coeffs sub(const Field& F, const Coeffs& a, const Coeffs& b);
Coeffs mul(const Field& F, const Coeffs& a, const Coeffs& b);
Coeffs scale(const Field& F, const Coeffs& a, Elem c);
/// Quotient and remainder; b must be nonzero.
void divmod(const Field& F, const Coeffs& a, const Coeffs& b, Coeffs& quot, Coeffs& rem);
Coeffs mod(const Field& F, const Coeffs& a, const Coeffs& b);
Coeffs monic(const Field& F, const Coeffs& a);
/// Monic gcd (zero if both are zero).
Coeffs gcd(const Field& F, Coeffs a, Coeffs b);
Coeffs derivative(const Field& F, const Coeffs& a);
Elem eval(const Field& F, const Coeffs& a, Elem x);
Coeffs mulmod(const Field& F, const Coeffs& a, const Coeffs& b, const Coeffs& m);
Coeffs powmod(const Field& F, const Coeffs& base, std::uint64_t e, const Coeffs& m);

/// Roots in F of a monic squarefree f that splits into linear factors over F
/// (Cantor-Zassenhaus equal-degree splitting, deterministic seed). Sorted by code.
std::vector<Elem> split_linear(const Field& F, const Coeffs& f);
/// Distinct roots of f lying in F, sorted by code. f must be nonzero.
std::vector<Elem> roots(const Field& F, const Coeffs& f);

} // namespace transverse::gf::dense
