#pragma once

// Constructive existence searches: q-thresholds, a rational point off X,
// reduced hyperplane sections and their chains, transverse lines to reduced
// hypersurfaces and very transverse flags. Scans are deterministic first-hit.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "transverse/certify.hpp"

namespace transverse {

class SearchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class QMode { VeryTransverse, ReducedLine, ReducedHyperplane };
std::string to_string(QMode m);

struct Threshold {
    std::uint64_t q = 0;
    /// Set for very-transverse mode with d <= 2, outside the d >= 3 hypothesis.
    bool outside_hypothesis = false;
};

/// Sufficient q from the existence theorems. Throws SearchError on bad params.
Threshold required_q(int n, int d, int r, QMode mode);

struct GateStatus {
    std::uint64_t q = 0;
    std::uint64_t threshold = 0;
    bool satisfied = false;
    bool outside_hypothesis = false;
};

struct Rejections {
    std::uint64_t on_hypersurface = 0;  // point candidates lying on X
    std::uint64_t not_proper = 0;
    std::uint64_t not_reduced = 0;
    std::uint64_t not_transverse = 0;
    std::uint64_t dual_contained = 0;
    std::uint64_t undetermined = 0;
    std::uint64_t total() const {
        return on_hypersurface + not_proper + not_reduced + not_transverse + dual_contained + undetermined;
    }
};

inline constexpr std::uint64_t kDefaultSeed = 0x5eed0f7a5e5ULL;

struct SearchOptions {
    std::uint64_t seed = kDefaultSeed;
    /// Worker threads for candidate scans; results do not depend on it.
    int jobs = 1;
    int retries = kDefaultRetries;
};

struct PointSearch {
    std::optional<ProjectivePoint> point;
    std::uint64_t tested = 0;
    bool violation = false;
    std::string note;
};

struct SubspaceSearch {
    std::optional<LinearSubspace> found;
    std::uint64_t found_index = 0;
    std::uint64_t tested = 0;
    Rejections rejections;
    GateStatus gate;
    bool violation = false;
    std::string note;
    /// For chains: the hyperplane sections taken, outermost first, in ambient coordinates.
    std::vector<LinearSubspace> chain;
};

struct FlagStep {
    LinearSubspace H;
    std::uint64_t index = 0;
    std::uint64_t pool = 0;
    std::uint64_t tested = 0;
    Rejections rejections;
    VtVerdict certificate = VtVerdict::Undetermined;
    /// Candidates rescued by the exact retry sweep after Las Vegas rejections.
    bool exact_retry = false;
    GateStatus gate;
};

struct FlagSearch {
    std::vector<FlagStep> steps;
    bool complete = false;
    bool violation = false;
    int failed_step = -1;
    Rejections failed_rejections;
    std::uint64_t seed = 0;
    std::string note;
};

std::uint64_t splitmix64(std::uint64_t x);

/// First rational point off X in enumeration order.
PointSearch find_point_off_X(const Hypersurface& X, const SearchOptions& opts = {});
/// First hyperplane with a proper, reduced section. Requires X reduced and d >= 2.
SubspaceSearch find_reduced_hyperplane(const Hypersurface& X, const SearchOptions& opts = {});
/// An r-plane T (2 <= r <= n-1) with X cap T proper and reduced, via successive hyperplanes.
SubspaceSearch find_reduced_plane_section_chain(const Hypersurface& X, int r, const SearchOptions& opts = {});
/// A line transverse to a reduced X, re-verified against X directly.
SubspaceSearch find_transverse_line_reduced(const Hypersurface& X, const SearchOptions& opts = {});
/// H_0 in H_1 in ... in H_r, each very transverse to the smooth X.
FlagSearch find_very_transverse_flag(const Hypersurface& X, int r, const SearchOptions& opts = {});

struct InequalityFailure {
    std::string lemma;
    int n, d, r;
    std::uint64_t q;
};

struct InequalityReport {
    struct Tally {
        std::string lemma;
        std::uint64_t checked = 0;
        std::uint64_t failed = 0;
    };
    std::vector<Tally> tallies;
    std::vector<InequalityFailure> failures;
    bool passed() const { return failures.empty(); }
};

/// Exact integer check of the threshold inequalities over n <= nmax, d <= dmax,
/// 0 <= r <= n-1 and q in {gate, gate+1, gate+7}.
InequalityReport check_inequality_lemmas(int nmax, int dmax);

} // namespace transverse
