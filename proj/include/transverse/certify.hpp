#pragma once

// Decision procedures over the algebraic closure: projective emptiness by a
// Macaulay rank test, enumeration of points over small extensions, dimension
// bounds by slicing, and the transversality predicates built on them.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "transverse/locus.hpp"

namespace transverse {

class NotProper : public std::runtime_error {
public:
    NotProper() : std::runtime_error("section is not proper: the subspace lies inside the hypersurface") {}
};

class NotSmooth : public std::runtime_error {
public:
    NotSmooth() : std::runtime_error("hypersurface is not smooth") {}
};

enum class Emptiness { Empty, Nonempty, Inconclusive };
std::string to_string(Emptiness e);

struct EmptinessCertificate {
    Emptiness verdict = Emptiness::Inconclusive;
    /// Degree at which the rank test ran (-1 when decided without it).
    int degree_N = -1;
    std::optional<ProjectivePoint> witness;
};

struct EmptinessOptions {
    bool find_witness = true;
    /// Escalation limit for the witness search.
    int max_witness_level = 8;
};

EmptinessCertificate is_empty_projective(const SchemeSpec& S, const EmptinessOptions& opts = {});
/// Shorthand for is_empty_projective without witness search.
bool certify_empty(const SchemeSpec& S);

/// All points of S over F_{Q^k}, 1 <= k <= kmax (Q = |S.field|), each listed once
/// at its exact residue degree; conjugate points are listed individually.
std::vector<ProjectivePoint> scheme_points_upto(const SchemeSpec& S, int kmax);

struct DimensionCertificate {
    int bound = 0;
    bool at_most = false;
    int retries_used = 0;
    std::vector<std::uint64_t> slice_seeds;
    /// The t+1 slicing forms that made the scheme empty (when at_most).
    std::vector<Form> slices;
};

inline constexpr int kDefaultRetries = 8;
inline constexpr std::uint64_t kMinSliceField = 64;

/// One-sided: at_most is returned only when t+1 random linear slices over an
/// extension of size >= 64 are certified to cut S down to the empty set.
DimensionCertificate dim_upper_bound(const SchemeSpec& S, int t, int retries, Rng& rng);
/// Deterministic version: slices along the moment curve sum c^i x_i for enough
/// distinct c to dodge every component (degree bound from the generators).
bool exact_dim_at_most(const SchemeSpec& S, int t);

/// Jacobian criterion for X itself, cached on the hypersurface.
bool is_smooth(const Hypersurface& X);
/// Throws NotProper when H lies in X.
bool is_smooth_section(const Hypersurface& X, const LinearSubspace& H);
bool is_reduced_section(const Hypersurface& X, const LinearSubspace& H);
bool is_transverse(const Hypersurface& X, const LinearSubspace& H);

enum class VtVerdict { VeryTransverse, NotTransverse, DualContained, Undetermined };
std::string to_string(VtVerdict v);

enum class DimensionMode { LasVegas, Exact };

struct VtOptions {
    DimensionMode mode = DimensionMode::LasVegas;
    int retries = kDefaultRetries;
    std::uint64_t seed = 0x7472616e73ULL;
};

/// Requires X smooth (throws NotSmooth otherwise).
VtVerdict very_transverse_check(const Hypersurface& X, const LinearSubspace& H, const VtOptions& opts = {});
bool is_very_transverse(const Hypersurface& X, const LinearSubspace& H, const VtOptions& opts = {});

} // namespace transverse
