#pragma once

// Projective points, canonical linear subspaces and their enumeration.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "transverse/gf.hpp"

namespace transverse {

using gf::Elem;
using gf::Field;
using gf::FieldPtr;

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Row = std::vector<Elem>;
using Matrix = std::vector<Row>;

// ---------------------------------------------------------------------------
// Linear algebra over a Field

/// In-place reduced row echelon form; zero rows are removed. Returns pivot columns.
std::vector<int> rref(const Field& F, Matrix& m);
int rank(const Field& F, Matrix m);
/// Basis (as rows, in RREF) of {v : m v^T = 0} for vectors of length ncols.
Matrix nullspace(const Field& F, const Matrix& m, int ncols);
Matrix embed_matrix(const Matrix& m, const FieldPtr& from, const FieldPtr& to);

// ---------------------------------------------------------------------------
// Points

struct ProjectivePoint {
    FieldPtr field;
    std::vector<Elem> coords;

    int ambient() const { return static_cast<int>(coords.size()) - 1; }
    friend bool operator==(const ProjectivePoint& a, const ProjectivePoint& b) {
        return *a.field == *b.field && a.coords == b.coords;
    }
    friend bool operator<(const ProjectivePoint& a, const ProjectivePoint& b) { return a.coords < b.coords; }
};

/// Scales so the first nonzero coordinate is 1. Throws on the zero vector.
ProjectivePoint make_point(FieldPtr field, std::vector<Elem> coords);
std::string to_string(const ProjectivePoint& p);

/// (Q^{n+1}-1)/(Q-1) for Q = |E|, or nullopt on overflow.
std::optional<std::uint64_t> projective_count(int n, std::uint64_t Q);

/// Index-addressable enumeration of P^n(E) in lexicographic order of the
/// normalized coordinate codes ([0:...:0:1] first).
class PointEnumerator {
public:
    PointEnumerator(int n, FieldPtr E);
    std::uint64_t count() const { return count_; }
    ProjectivePoint at(std::uint64_t index) const;
    void coords_at(std::uint64_t index, std::vector<Elem>& out) const;
    const FieldPtr& field() const { return E_; }

private:
    int n_;
    FieldPtr E_;
    std::uint64_t count_;
    std::vector<std::uint64_t> block_start_;  // by pivot position
};

/// Upper bound on the size of any materialized enumeration.
inline constexpr std::uint64_t kMaxEnumeration = std::uint64_t{1} << 26;

std::vector<ProjectivePoint> enumerate_points(int n, const FieldPtr& E);

// ---------------------------------------------------------------------------
// Subspaces

class LinearSubspace {
public:
    /// Canonical form of the row span. The span must be nonzero.
    static LinearSubspace from_rows(FieldPtr field, Matrix rows);
    static LinearSubspace whole_space(FieldPtr field, int n);
    /// The empty subspace (dimension -1) of P^n.
    static LinearSubspace empty(FieldPtr field, int n);

    const FieldPtr& field() const { return field_; }
    int ambient() const { return n_; }
    int dim() const { return static_cast<int>(rows_.size()) - 1; }
    const Matrix& rows() const { return rows_; }
    const std::vector<int>& pivots() const { return pivots_; }

    friend bool operator==(const LinearSubspace& a, const LinearSubspace& b) {
        return a.n_ == b.n_ && *a.field_ == *b.field_ && a.rows_ == b.rows_;
    }
    friend bool operator<(const LinearSubspace& a, const LinearSubspace& b) {
        return a.rows_.size() != b.rows_.size() ? a.rows_.size() < b.rows_.size() : a.rows_ < b.rows_;
    }

private:
    LinearSubspace(FieldPtr field, int n, Matrix rows, std::vector<int> pivots)
        : field_(std::move(field)), n_(n), rows_(std::move(rows)), pivots_(std::move(pivots)) {}

    FieldPtr field_;
    int n_;
    Matrix rows_;
    std::vector<int> pivots_;
};

LinearSubspace subspace_from_rows(FieldPtr field, Matrix rows);
/// Annihilator in the dual space; dim(H) + dim(dual(H)) = n - 1.
LinearSubspace dual(const LinearSubspace& H);
/// Whether P (over any extension of H's field) lies in the span of H.
bool subspace_contains(const LinearSubspace& H, const ProjectivePoint& P);
bool subspace_contains(const LinearSubspace& H, const LinearSubspace& K);
/// Coordinates u with P = u * rows(H), when P lies in H (P normalized over its field).
std::optional<std::vector<Elem>> subspace_coordinates(const LinearSubspace& H, const ProjectivePoint& P);
/// Image of a subspace given in the coordinates of H (rows of length dim H + 1).
LinearSubspace pushforward(const LinearSubspace& H, const LinearSubspace& local);

/// Semicolon-separated rows of comma-separated elements, e.g. `1,0,0,2; 0,1,0,1`.
std::string to_string(const LinearSubspace& H);
LinearSubspace parse_subspace(const std::string& text, const FieldPtr& field, int n);

/// The r-planes containing H (dim H = r - 1), index-addressable in a fixed order.
class SuperspaceEnumerator {
public:
    SuperspaceEnumerator(const LinearSubspace& H, int r);
    std::uint64_t count() const { return points_.count(); }
    LinearSubspace at(std::uint64_t index) const;

private:
    LinearSubspace H_;
    std::vector<int> complement_;
    PointEnumerator points_;
};

std::vector<LinearSubspace> enumerate_superspaces(const LinearSubspace& H, int r);

/// Hyperplanes of P^n(F) in the order of their dual points.
class HyperplaneEnumerator {
public:
    HyperplaneEnumerator(int n, FieldPtr F) : points_(n, std::move(F)) {}
    std::uint64_t count() const { return points_.count(); }
    LinearSubspace at(std::uint64_t index) const;

private:
    PointEnumerator points_;
};

/// Number of r-planes in P^n(F_q) (Gaussian binomial), or nullopt on overflow.
std::optional<std::uint64_t> grassmannian_count(int n, int r, std::uint64_t q);
/// Every r-plane of P^n(F), via RREF Schubert cells.
void for_each_subspace(int n, int r, const FieldPtr& F, const std::function<void(const LinearSubspace&)>& fn);

} // namespace transverse
