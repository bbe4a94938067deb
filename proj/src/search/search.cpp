#include "transverse/search.hpp"

#include <atomic>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>

namespace transverse {

std::string to_string(QMode m) {
    switch (m) {
    case QMode::VeryTransverse: return "very-transverse";
    case QMode::ReducedLine: return "reduced-line";
    case QMode::ReducedHyperplane: return "reduced-hyperplane";
    }
    return "?";
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
    if (r > (static_cast<unsigned __int128>(1) << 62)) throw SearchError("threshold does not fit in 62 bits");
    return static_cast<std::uint64_t>(r);
}

} // namespace

Threshold required_q(int n, int d, int r, QMode mode) {
    if (n < 1) throw SearchError("ambient dimension must be at least 1");
    if (d < 1) throw SearchError("degree must be at least 1");
    switch (mode) {
    case QMode::VeryTransverse: {
        if (r < 0 || r > n - 1) throw SearchError("need 0 <= r <= n-1");
        // The quadric case reduces to q >= 2; hyperplanes need nothing.
        if (d <= 2) return {2, true};
        std::uint64_t v = static_cast<std::uint64_t>(n - r) * static_cast<std::uint64_t>(d);
        for (int i = 0; i < r; ++i) v = checked_mul(v, static_cast<std::uint64_t>(d - 1));
        return {v, false};
    }
    case QMode::ReducedLine: {
        const std::uint64_t num = 3 * static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(d - 1);
        return {(num + 1) / 2, false};
    }
    case QMode::ReducedHyperplane: {
        if (n < 3) throw SearchError("reduced-hyperplane threshold needs n >= 3");
        if (d < 2) throw SearchError("reduced-hyperplane threshold needs d >= 2");
        const std::uint64_t dd = static_cast<std::uint64_t>(d);
        return {n == 3 ? dd * (dd - 1) + 1 : dd, false};
    }
    }
    throw SearchError("unknown mode");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

enum class Outcome : std::uint8_t {
    Pending,
    Accept,
    OnX,
    NotProper,
    NotReduced,
    NotTransverse,
    DualContained,
    Undetermined,
};

Outcome from_verdict(VtVerdict v) {
    switch (v) {
    case VtVerdict::VeryTransverse: return Outcome::Accept;
    case VtVerdict::NotTransverse: return Outcome::NotTransverse;
    case VtVerdict::DualContained: return Outcome::DualContained;
    case VtVerdict::Undetermined: return Outcome::Undetermined;
    }
    return Outcome::Undetermined;
}

void tally(Rejections& r, Outcome o) {
    switch (o) {
    case Outcome::OnX: ++r.on_hypersurface; break;
    case Outcome::NotProper: ++r.not_proper; break;
    case Outcome::NotReduced: ++r.not_reduced; break;
    case Outcome::NotTransverse: ++r.not_transverse; break;
    case Outcome::DualContained: ++r.dual_contained; break;
    case Outcome::Undetermined: ++r.undetermined; break;
    default: break;
    }
}

struct Scan {
    std::optional<std::uint64_t> hit;
    std::uint64_t tested = 0;
    std::vector<Outcome> outcomes;  // valid below `tested`
    Rejections rejections;
};

// Evaluates candidates 0..count-1 and returns the smallest accepted index.
// Workers take interleaved indices in increasing order and stop past the best
// hit so far, so every index below the final hit is evaluated exactly once.
Scan first_hit(std::uint64_t count, int jobs, const std::function<Outcome(std::uint64_t)>& eval) {
    Scan s;
    s.outcomes.assign(count, Outcome::Pending);
    std::atomic<std::uint64_t> best{count};
    std::mutex err_mutex;
    std::exception_ptr err;
    std::uint64_t err_index = count;

    auto worker = [&](std::uint64_t start, std::uint64_t stride) {
        for (std::uint64_t i = start; i < count; i += stride) {
            if (i > best.load(std::memory_order_relaxed)) return;
            try {
                const Outcome o = eval(i);
                s.outcomes[i] = o;
                if (o == Outcome::Accept) {
                    std::uint64_t cur = best.load();
                    while (i < cur && !best.compare_exchange_weak(cur, i)) {
                    }
                    return;
                }
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (i < err_index) {
                    err_index = i;
                    err = std::current_exception();
                }
                return;
            }
        }
    };

    const std::uint64_t nworkers = std::max<std::uint64_t>(1, std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(jobs, 1)), count));
    if (nworkers <= 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::uint64_t w = 0; w < nworkers; ++w) pool.emplace_back(worker, w, nworkers);
        for (auto& t : pool) t.join();
    }
    const std::uint64_t b = best.load();
    if (err && err_index < b) std::rethrow_exception(err);
    if (b < count) s.hit = b;
    s.tested = b < count ? b + 1 : count;
    for (std::uint64_t i = 0; i < s.tested; ++i) tally(s.rejections, s.outcomes[i]);
    return s;
}

GateStatus make_gate(std::uint64_t q, const Threshold& t) {
    return {q, t.q, q >= t.q, t.outside_hypothesis};
}

Outcome reduced_outcome(const Hypersurface& X, const LinearSubspace& H) {
    try {
        return is_reduced_section(X, H) ? Outcome::Accept : Outcome::NotReduced;
    } catch (const NotProper&) {
        return Outcome::NotProper;
    }
}

bool is_reduced(const Hypersurface& X) {
    return is_reduced_section(X, LinearSubspace::whole_space(X.field(), X.ambient()));
}

} // namespace

PointSearch find_point_off_X(const Hypersurface& X, const SearchOptions& opts) {
    const FieldPtr& F = X.field();
    PointEnumerator points(X.ambient(), F);
    FormEvaluator ev(X.form(), F);
    auto scan = first_hit(points.count(), opts.jobs, [&](std::uint64_t i) {
        std::vector<Elem> c;
        points.coords_at(i, c);
        return ev(c).code ? Outcome::Accept : Outcome::OnX;
    });
    PointSearch out;
    out.tested = scan.tested;
    if (scan.hit) {
        out.point = points.at(*scan.hit);
        return out;
    }
    // X is space-filling, which needs degree at least q+1.
    if (static_cast<std::uint64_t>(X.degree()) <= F->order()) {
        out.violation = true;
        out.note = "space-filling hypersurface of degree <= q";
    } else {
        out.note = "space-filling (degree >= q+1)";
    }
    return out;
}

SubspaceSearch find_reduced_hyperplane(const Hypersurface& X, const SearchOptions& opts) {
    if (X.degree() < 2) throw SearchError("reduced hyperplane search needs degree >= 2");
    if (!is_reduced(X)) throw SearchError("hypersurface is not reduced");
    const FieldPtr& F = X.field();
    const int n = X.ambient();
    SubspaceSearch out;
    if (n >= 3) {
        out.gate = make_gate(F->order(), required_q(n, X.degree(), n - 1, QMode::ReducedHyperplane));
    } else {
        out.gate = {F->order(), 0, false, true};
    }
    HyperplaneEnumerator hyper(n, F);
    auto scan = first_hit(hyper.count(), opts.jobs, [&](std::uint64_t i) { return reduced_outcome(X, hyper.at(i)); });
    out.tested = scan.tested;
    out.rejections = scan.rejections;
    if (scan.hit) {
        out.found = hyper.at(*scan.hit);
        out.found_index = *scan.hit;
    } else if (out.gate.satisfied) {
        out.violation = true;
        out.note = "no reduced hyperplane section although q meets the threshold";
    } else {
        out.note = "no reduced hyperplane section (below threshold)";
    }
    return out;
}

SubspaceSearch find_reduced_plane_section_chain(const Hypersurface& X, int r, const SearchOptions& opts) {
    const int n = X.ambient();
    if (r < 2 || r > n - 1) throw SearchError("chain target needs 2 <= r <= n-1");
    if (X.degree() < 2) throw SearchError("reduced plane chain needs degree >= 2");
    const FieldPtr& F = X.field();
    SubspaceSearch out;
    out.gate = make_gate(F->order(), required_q(n, X.degree(), r, QMode::ReducedLine));
    LinearSubspace T = LinearSubspace::whole_space(F, n);
    Hypersurface cur = X;
    for (int m = n; m > r; --m) {
        SubspaceSearch step = find_reduced_hyperplane(cur, opts);
        out.tested += step.tested;
        out.rejections.not_proper += step.rejections.not_proper;
        out.rejections.not_reduced += step.rejections.not_reduced;
        if (!step.found) {
            out.violation = step.violation || out.gate.satisfied;
            out.note = "chain stopped in dimension " + std::to_string(m) + ": " + step.note;
            return out;
        }
        T = pushforward(T, *step.found);
        out.chain.push_back(T);
        cur = Hypersurface(restrict_form(cur.form(), step.found->rows(), F));
    }
    if (!is_reduced_section(X, T)) {
        out.violation = true;
        out.note = "chain result fails direct re-verification";
        return out;
    }
    out.found = T;
    return out;
}

SubspaceSearch find_transverse_line_reduced(const Hypersurface& X, const SearchOptions& opts) {
    const int n = X.ambient();
    const int d = X.degree();
    const FieldPtr& F = X.field();
    if (!is_reduced(X)) throw SearchError("hypersurface is not reduced");
    SubspaceSearch out;
    out.gate = make_gate(F->order(), required_q(n, d, 1, QMode::ReducedLine));

    auto finish = [&](const Scan& scan, const std::function<LinearSubspace(std::uint64_t)>& at) {
        out.tested += scan.tested;
        out.rejections.not_transverse += scan.rejections.not_transverse;
        if (scan.hit) {
            out.found = at(*scan.hit);
            out.found_index = *scan.hit;
            if (!is_transverse(X, *out.found)) {
                out.found.reset();
                out.violation = true;
                out.note = "returned line fails direct re-verification";
            }
        } else if (out.gate.satisfied) {
            out.violation = true;
            out.note = "no transverse line although q meets the threshold";
        } else {
            out.note = "no transverse line (below threshold)";
        }
    };

    if (n == 1) {
        auto whole = LinearSubspace::whole_space(F, 1);
        Scan s = first_hit(1, 1, [&](std::uint64_t) {
            return is_transverse(X, whole) ? Outcome::Accept : Outcome::NotTransverse;
        });
        finish(s, [&](std::uint64_t) { return whole; });
        return out;
    }
    if (d == 1) {
        // Any line through a point off the hyperplane meets it once.
        auto off = find_point_off_X(X, opts);
        if (!off.point) throw SearchError("hyperplane contains every rational point");
        PointEnumerator points(n, F);
        const auto other = points.at(points.at(0) == *off.point ? 1 : 0);
        auto L = LinearSubspace::from_rows(F, {off.point->coords, other.coords});
        Scan s = first_hit(1, 1, [&](std::uint64_t) {
            return is_transverse(X, L) ? Outcome::Accept : Outcome::NotTransverse;
        });
        finish(s, [&](std::uint64_t) { return L; });
        return out;
    }
    if (n == 2) {
        HyperplaneEnumerator lines(2, F);
        auto s = first_hit(lines.count(), opts.jobs, [&](std::uint64_t i) {
            return is_transverse(X, lines.at(i)) ? Outcome::Accept : Outcome::NotTransverse;
        });
        finish(s, [&](std::uint64_t i) { return lines.at(i); });
        return out;
    }
    SubspaceSearch plane = find_reduced_plane_section_chain(X, 2, opts);
    out.chain = plane.chain;
    out.tested = plane.tested;
    out.rejections = plane.rejections;
    if (!plane.found) {
        out.violation = plane.violation;
        out.note = plane.note;
        return out;
    }
    const LinearSubspace T = *plane.found;
    HyperplaneEnumerator local(2, F);
    auto line_at = [&](std::uint64_t i) { return pushforward(T, local.at(i)); };
    auto s = first_hit(local.count(), opts.jobs, [&](std::uint64_t i) {
        return is_transverse(X, line_at(i)) ? Outcome::Accept : Outcome::NotTransverse;
    });
    finish(s, line_at);
    return out;
}

FlagSearch find_very_transverse_flag(const Hypersurface& X, int r, const SearchOptions& opts) {
    if (!is_smooth(X)) throw NotSmooth();
    const int n = X.ambient();
    const int d = X.degree();
    if (r < 0 || r > n - 1) throw SearchError("flag target needs 0 <= r <= n-1");
    const FieldPtr& F = X.field();
    FlagSearch out;
    out.seed = opts.seed;

    for (int s = 0; s <= r; ++s) {
        FlagStep step{LinearSubspace::empty(F, n), 0, 0, 0, {}, VtVerdict::Undetermined, false, {}};
        step.gate = make_gate(F->order(), required_q(n, d, s, QMode::VeryTransverse));
        std::function<LinearSubspace(std::uint64_t)> candidate;
        std::uint64_t pool = 0;
        std::optional<PointEnumerator> points;
        std::optional<SuperspaceEnumerator> supers;
        if (s == 0) {
            points.emplace(n, F);
            pool = points->count();
            candidate = [&](std::uint64_t i) { return LinearSubspace::from_rows(F, {points->at(i).coords}); };
        } else {
            supers.emplace(out.steps.back().H, s);
            pool = supers->count();
            candidate = [&](std::uint64_t i) { return supers->at(i); };
        }
        step.pool = pool;
        auto seed_for = [&](std::uint64_t i) {
            return splitmix64(opts.seed ^ (static_cast<std::uint64_t>(s) << 48) ^ i);
        };
        auto eval = [&](std::uint64_t i, DimensionMode mode) {
            const LinearSubspace H = candidate(i);
            if (s == n - 1) return is_transverse(X, H) ? Outcome::Accept : Outcome::NotTransverse;
            return from_verdict(very_transverse_check(X, H, {mode, opts.retries, seed_for(i)}));
        };
        FormEvaluator ev(X.form(), F);
        auto scan = first_hit(pool, opts.jobs, [&](std::uint64_t i) {
            if (s == 0) {
                std::vector<Elem> c;
                points->coords_at(i, c);
                if (ev(c).code == 0) return Outcome::OnX;
            }
            return eval(i, DimensionMode::LasVegas);
        });
        step.tested = scan.tested;
        step.rejections = scan.rejections;
        std::optional<std::uint64_t> hit = scan.hit;
        if (!hit && scan.rejections.undetermined > 0) {
            // Settle Las Vegas rejections exactly before giving up.
            for (std::uint64_t i = 0; i < pool && !hit; ++i) {
                if (scan.outcomes[i] != Outcome::Undetermined) continue;
                const Outcome o = eval(i, DimensionMode::Exact);
                if (o == Outcome::Accept) {
                    hit = i;
                    step.exact_retry = true;
                } else {
                    --step.rejections.undetermined;
                    tally(step.rejections, o);
                }
            }
        }
        if (!hit) {
            out.failed_step = s;
            out.failed_rejections = step.rejections;
            out.violation = step.gate.satisfied && !step.gate.outside_hypothesis;
            out.note = "no very transverse " + std::to_string(s) + "-plane through the previous level" +
                       (out.violation ? " although q meets the threshold" : "");
            return out;
        }
        step.index = *hit;
        step.H = candidate(*hit);
        step.certificate = VtVerdict::VeryTransverse;
        out.steps.push_back(std::move(step));
    }
    out.complete = true;
    return out;
}

// ---------------------------------------------------------------------------
// Threshold inequalities

namespace {

using Big = boost::multiprecision::cpp_int;

Big bpow(const Big& b, int e) {
    Big r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

struct Checker {
    InequalityReport report;
    std::map<std::string, std::size_t> index;

    void record(const std::string& lemma, bool holds, int n, int d, int r, const Big& q) {
        auto it = index.find(lemma);
        if (it == index.end()) {
            it = index.emplace(lemma, report.tallies.size()).first;
            report.tallies.push_back({lemma});
        }
        auto& t = report.tallies[it->second];
        ++t.checked;
        if (!holds) {
            ++t.failed;
            report.failures.push_back({lemma, n, d, r, static_cast<std::uint64_t>(q)});
        }
    }
};

} // namespace

InequalityReport check_inequality_lemmas(int nmax, int dmax) {
    if (nmax < 1 || dmax < 1) throw SearchError("grid bounds must be positive");
    Checker c;
    const int offsets[] = {0, 1, 7};
    for (int n = 1; n <= nmax; ++n) {
        for (int d = 1; d <= dmax; ++d) {
            const Big D = d;
            const Big D1 = d - 1;
            // Very transverse thresholds (d >= 3).
            for (int r = 0; d >= 3 && r <= n - 1; ++r) {
                const Big gate = Big(n - r) * D * bpow(D1, r);
                for (int off : offsets) {
                    const Big q = gate + off;
                    if (r == 0) c.record("q >= nd implies d < q+1 (no space-filling X)", q >= Big(n) * D && D < q + 1, n, d, r, q);
                    if (r >= 1)
                        c.record("gate at r implies gate at r-1", q >= Big(n - r + 1) * D * bpow(D1, r - 1), n, d, r, q);
                    if (r >= 1 && r <= n - 2) {
                        c.record("q^(n-r) > d(d-1)^r (q+1)^(n-r-1)",
                                 bpow(q, n - r) > D * bpow(D1, r) * bpow(q + 1, n - r - 1), n, d, r, q);
                        Big pool = 0;
                        for (int i = 0; i <= n - r; ++i) pool += bpow(q, i);
                        c.record("sum q^i > d(d-1)^r (q+1)^(n-r-1) + d(d-1)^(n-1)",
                                 pool > D * bpow(D1, r) * bpow(q + 1, n - r - 1) + D * bpow(D1, n - 1), n, d, r, q);
                    }
                    if (r >= 1 && r <= n - 3)
                        c.record("q^(n-r-1) > d(d-1)^(n-1)", bpow(q, n - r - 1) > D * bpow(D1, n - 1), n, d, r, q);
                    if (r >= 1 && r == n - 2)
                        c.record("q^2+q+1 > d(d-1)^(n-2)(q+d)", q * q + q + 1 > D * bpow(D1, n - 2) * (q + D), n, d, r, q);
                    if (r == n - 1) c.record("q+1 > d(d-1)^(n-1)", q + 1 > D * bpow(D1, n - 1), n, d, r, q);
                }
            }
            if (d < 2) continue;
            // Reduced sections.
            const Big line_gate = (Big(3) * D * D1 + 1) / 2;
            for (int off : offsets) {
                const Big q = line_gate + off;
                if (n == 2)
                    c.record("q^2+q+1 > (3/2)d(d-1)(q+1)", 2 * (q * q + q + 1) > Big(3) * D * D1 * (q + 1), n, d, 0, q);
                if (n >= 3)
                    c.record("reduced-line gate implies reduced-hyperplane gate",
                             q >= (n == 3 ? D * D1 + 1 : D), n, d, 0, q);
            }
            if (n >= 3) {
                const Big hyp_gate = n == 3 ? D * D1 + 1 : D;
                for (int off : offsets) {
                    const Big q = hyp_gate + off;
                    c.record("q^(n-3)(q-1) >= d(d-1)", bpow(q, n - 3) * (q - 1) >= D * D1, n, d, n - 1, q);
                    Big lhs = 0;
                    for (int j = 1; j <= n; ++j) lhs += bpow(q, j);
                    c.record("sum_{j>=1} q^j > d(d-1)(q+1)^2", lhs > D * D1 * (q + 1) * (q + 1), n, d, n - 1, q);
                }
            }
            if (n == 1)
                for (int t = 0; t <= d; ++t)
                    c.record("phi(t) <= d(d-1)", 2 * (D - t) * D1 + Big(t) * (t - 1) <= 2 * D * D1, n, d, t, 0);
        }
    }
    return c.report;
}

} // namespace transverse
