#include "transverse/projgeom.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace transverse {

// ---------------------------------------------------------------------------
// Linear algebra

std::vector<int> rref(const Field& F, Matrix& m) {
    std::vector<int> pivots;
    if (m.empty()) return pivots;
    const int ncols = static_cast<int>(m[0].size());
    std::size_t r = 0;
    for (int col = 0; col < ncols && r < m.size(); ++col) {
        std::size_t piv = r;
        while (piv < m.size() && m[piv][col].code == 0) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[r], m[piv]);
        const Elem inv = F.inv(m[r][col]);
        for (auto& x : m[r]) x = F.mul(x, inv);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][col].code == 0) continue;
            const Elem f = m[i][col];
            for (int c = col; c < ncols; ++c)
                if (m[r][c].code) m[i][c] = F.sub(m[i][c], F.mul(f, m[r][c]));
        }
        pivots.push_back(col);
        ++r;
    }
    m.resize(r);
    return pivots;
}

int rank(const Field& F, Matrix m) { return static_cast<int>(rref(F, m).size()); }

Matrix nullspace(const Field& F, const Matrix& m, int ncols) {
    Matrix a = m;
    auto piv = rref(F, a);
    std::vector<bool> is_pivot(ncols, false);
    for (int p : piv) is_pivot[p] = true;
    Matrix basis;
    for (int free = 0; free < ncols; ++free) {
        if (is_pivot[free]) continue;
        Row v(ncols, F.zero());
        v[free] = F.one();
        for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = F.neg(a[i][free]);
        basis.push_back(std::move(v));
    }
    rref(F, basis);
    return basis;
}

Matrix embed_matrix(const Matrix& m, const FieldPtr& from, const FieldPtr& to) {
    if (*from == *to) return m;
    const gf::Tower& T = from->tower();
    Matrix out = m;
    for (auto& row : out)
        for (auto& x : row) x = T.embed(x, from->level(), to->level());
    return out;
}

// ---------------------------------------------------------------------------
// Points

ProjectivePoint make_point(FieldPtr field, std::vector<Elem> coords) {
    auto it = std::find_if(coords.begin(), coords.end(), [](Elem e) { return e.code != 0; });
    if (it == coords.end()) throw GeometryError("the zero vector is not a projective point");
    if (*it != field->one()) {
        const Elem inv = field->inv(*it);
        for (auto& x : coords) x = field->mul(x, inv);
    }
    return {std::move(field), std::move(coords)};
}

std::string to_string(const ProjectivePoint& p) {
    std::string s = "[";
    for (std::size_t i = 0; i < p.coords.size(); ++i) {
        if (i) s += ":";
        s += p.field->to_string(p.coords[i]);
    }
    return s + "]";
}

std::optional<std::uint64_t> projective_count(int n, std::uint64_t Q) {
    unsigned __int128 total = 0, pw = 1;
    for (int i = 0; i <= n; ++i) {
        total += pw;
        pw *= Q;
        if (total > (static_cast<unsigned __int128>(1) << 62)) return std::nullopt;
    }
    return static_cast<std::uint64_t>(total);
}

PointEnumerator::PointEnumerator(int n, FieldPtr E) : n_(n), E_(std::move(E)) {
    if (n < 0) throw GeometryError("negative ambient dimension");
    auto c = projective_count(n, E_->order());
    if (!c) throw gf::CapExceeded("projective space too large to enumerate");
    count_ = *c;
    // Pivot position i has Q^{n-i} points; blocks ordered by pivot descending.
    block_start_.assign(n_ + 2, 0);
    std::uint64_t start = 0, size = 1;
    for (int i = n_; i >= 0; --i) {
        block_start_[i] = start;
        start += size;
        if (i > 0) size *= E_->order();
    }
    block_start_[n_ + 1] = 0;
}

void PointEnumerator::coords_at(std::uint64_t index, std::vector<Elem>& out) const {
    if (index >= count_) throw GeometryError("point index out of range");
    out.assign(n_ + 1, Elem{0});
    int pivot = n_;
    while (pivot > 0 && index >= block_start_[pivot - 1]) --pivot;
    std::uint64_t rest = index - block_start_[pivot];
    out[pivot] = E_->one();
    const std::uint64_t Q = E_->order();
    for (int j = n_; j > pivot; --j) {
        out[j] = Elem{rest % Q};
        rest /= Q;
    }
}

ProjectivePoint PointEnumerator::at(std::uint64_t index) const {
    ProjectivePoint p{E_, {}};
    coords_at(index, p.coords);
    return p;
}

std::vector<ProjectivePoint> enumerate_points(int n, const FieldPtr& E) {
    PointEnumerator en(n, E);
    if (en.count() > kMaxEnumeration) throw gf::CapExceeded("point enumeration exceeds the configured cap");
    std::vector<ProjectivePoint> out;
    out.reserve(en.count());
    for (std::uint64_t i = 0; i < en.count(); ++i) out.push_back(en.at(i));
    return out;
}

// ---------------------------------------------------------------------------
// Subspaces

LinearSubspace LinearSubspace::from_rows(FieldPtr field, Matrix rows) {
    if (rows.empty()) throw GeometryError("a subspace needs at least one row");
    const int ncols = static_cast<int>(rows[0].size());
    for (const auto& r : rows)
        if (static_cast<int>(r.size()) != ncols) throw GeometryError("rows of different lengths");
    auto piv = rref(*field, rows);
    if (rows.empty()) throw GeometryError("rows span the zero space");
    return LinearSubspace(std::move(field), ncols - 1, std::move(rows), std::move(piv));
}

LinearSubspace LinearSubspace::whole_space(FieldPtr field, int n) {
    Matrix rows(n + 1, Row(n + 1, field->zero()));
    std::vector<int> piv(n + 1);
    for (int i = 0; i <= n; ++i) {
        rows[i][i] = field->one();
        piv[i] = i;
    }
    return LinearSubspace(std::move(field), n, std::move(rows), std::move(piv));
}

LinearSubspace LinearSubspace::empty(FieldPtr field, int n) { return LinearSubspace(std::move(field), n, {}, {}); }

LinearSubspace subspace_from_rows(FieldPtr field, Matrix rows) {
    return LinearSubspace::from_rows(std::move(field), std::move(rows));
}

LinearSubspace dual(const LinearSubspace& H) {
    const int n = H.ambient();
    if (H.dim() < 0) return LinearSubspace::whole_space(H.field(), n);
    Matrix ns = nullspace(*H.field(), H.rows(), n + 1);
    if (ns.empty()) return LinearSubspace::empty(H.field(), n);
    return LinearSubspace::from_rows(H.field(), std::move(ns));
}

namespace {

// Reduce v against the RREF rows of H (over field E). Returns the coefficients
// used and leaves the residue in v.
std::vector<Elem> reduce_against(const Field& E, const Matrix& rows, const std::vector<int>& pivots, Row& v) {
    std::vector<Elem> coeffs(rows.size(), E.zero());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Elem f = v[pivots[i]];
        if (f.code == 0) continue;
        coeffs[i] = f;
        for (std::size_t c = 0; c < v.size(); ++c)
            if (rows[i][c].code) v[c] = E.sub(v[c], E.mul(f, rows[i][c]));
    }
    return coeffs;
}

} // namespace

std::optional<std::vector<Elem>> subspace_coordinates(const LinearSubspace& H, const ProjectivePoint& P) {
    if (P.ambient() != H.ambient()) throw GeometryError("ambient dimension mismatch");
    if (!H.field()->same_tower(*P.field) || P.field->level() % H.field()->level() != 0)
        throw GeometryError("field tower mismatch");
    const Field& E = *P.field;
    Matrix rows = embed_matrix(H.rows(), H.field(), P.field);
    Row v = P.coords;
    auto coeffs = reduce_against(E, rows, H.pivots(), v);
    for (auto x : v)
        if (x.code) return std::nullopt;
    return coeffs;
}

bool subspace_contains(const LinearSubspace& H, const ProjectivePoint& P) {
    return subspace_coordinates(H, P).has_value();
}

bool subspace_contains(const LinearSubspace& H, const LinearSubspace& K) {
    if (!(*H.field() == *K.field()) || H.ambient() != K.ambient()) throw GeometryError("subspace mismatch");
    for (const auto& row : K.rows()) {
        Row v = row;
        reduce_against(*H.field(), H.rows(), H.pivots(), v);
        for (auto x : v)
            if (x.code) return false;
    }
    return true;
}

LinearSubspace pushforward(const LinearSubspace& H, const LinearSubspace& local) {
    if (local.ambient() != H.dim()) throw GeometryError("local subspace has the wrong ambient dimension");
    const Field& F = *H.field();
    Matrix out;
    for (const auto& u : local.rows()) {
        Row v(H.ambient() + 1, F.zero());
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u[i].code == 0) continue;
            for (std::size_t c = 0; c < v.size(); ++c) v[c] = F.add(v[c], F.mul(u[i], H.rows()[i][c]));
        }
        out.push_back(std::move(v));
    }
    return LinearSubspace::from_rows(H.field(), std::move(out));
}

std::string to_string(const LinearSubspace& H) {
    if (H.dim() < 0) return "";
    std::string s;
    for (std::size_t i = 0; i < H.rows().size(); ++i) {
        if (i) s += "; ";
        for (std::size_t j = 0; j < H.rows()[i].size(); ++j) {
            if (j) s += ",";
            s += H.field()->to_string(H.rows()[i][j]);
        }
    }
    return s;
}

LinearSubspace parse_subspace(const std::string& text, const FieldPtr& field, int n) {
    Matrix rows;
    std::stringstream rs(text);
    std::string row_text;
    while (std::getline(rs, row_text, ';')) {
        Row row;
        std::stringstream es(row_text);
        std::string item;
        while (std::getline(es, item, ',')) row.push_back(field->parse(item));
        if (static_cast<int>(row.size()) != n + 1) throw GeometryError("subspace row has the wrong length");
        rows.push_back(std::move(row));
    }
    return LinearSubspace::from_rows(field, std::move(rows));
}

SuperspaceEnumerator::SuperspaceEnumerator(const LinearSubspace& H, int r)
    : H_(H), points_(H.ambient() - H.dim() - 1, H.field()) {
    if (r != H.dim() + 1 || r > H.ambient() || r < 0) throw GeometryError("superspace dimension out of range");
    std::vector<bool> piv(H.ambient() + 1, false);
    for (int p : H.pivots()) piv[p] = true;
    for (int c = 0; c <= H.ambient(); ++c)
        if (!piv[c]) complement_.push_back(c);
}

LinearSubspace SuperspaceEnumerator::at(std::uint64_t index) const {
    const Field& F = *H_.field();
    std::vector<Elem> dir;
    points_.coords_at(index, dir);
    Row v(H_.ambient() + 1, F.zero());
    for (std::size_t i = 0; i < complement_.size(); ++i) v[complement_[i]] = dir[i];
    Matrix rows = H_.rows();
    rows.push_back(std::move(v));
    return LinearSubspace::from_rows(H_.field(), std::move(rows));
}

std::vector<LinearSubspace> enumerate_superspaces(const LinearSubspace& H, int r) {
    SuperspaceEnumerator en(H, r);
    if (en.count() > kMaxEnumeration) throw gf::CapExceeded("superspace enumeration exceeds the configured cap");
    std::vector<LinearSubspace> out;
    out.reserve(en.count());
    for (std::uint64_t i = 0; i < en.count(); ++i) out.push_back(en.at(i));
    return out;
}

LinearSubspace HyperplaneEnumerator::at(std::uint64_t index) const {
    auto p = points_.at(index);
    return dual(LinearSubspace::from_rows(p.field, {p.coords}));
}

std::optional<std::uint64_t> grassmannian_count(int n, int r, std::uint64_t q) {
    // [n+1 choose r+1]_q
    const int N = n + 1, K = r + 1;
    if (K < 0 || K > N) return 0;
    unsigned __int128 num = 1, den = 1;
    for (int i = 0; i < K; ++i) {
        unsigned __int128 a = 1, b = 1;
        for (int j = 0; j < N - i; ++j) a *= q;
        for (int j = 0; j < i + 1; ++j) b *= q;
        num *= (a - 1);
        den *= (b - 1);
        if (num > (static_cast<unsigned __int128>(1) << 120)) return std::nullopt;
    }
    const unsigned __int128 v = num / den;
    if (v > (static_cast<unsigned __int128>(1) << 62)) return std::nullopt;
    return static_cast<std::uint64_t>(v);
}

void for_each_subspace(int n, int r, const FieldPtr& F, const std::function<void(const LinearSubspace&)>& fn) {
    const int k = r + 1;
    if (k < 1 || k > n + 1) throw GeometryError("subspace dimension out of range");
    auto total = grassmannian_count(n, r, F->order());
    if (!total || *total > kMaxEnumeration) throw gf::CapExceeded("subspace enumeration exceeds the configured cap");
    std::vector<int> piv(k);
    for (int i = 0; i < k; ++i) piv[i] = i;
    const std::uint64_t Q = F->order();
    while (true) {
        // Free entries: row i, columns after piv[i] that are not pivots.
        std::vector<std::pair<int, int>> free;
        for (int i = 0; i < k; ++i)
            for (int c = piv[i] + 1; c <= n; ++c)
                if (std::find(piv.begin(), piv.end(), c) == piv.end()) free.emplace_back(i, c);
        std::vector<std::uint64_t> digits(free.size(), 0);
        while (true) {
            Matrix rows(k, Row(n + 1, F->zero()));
            for (int i = 0; i < k; ++i) rows[i][piv[i]] = F->one();
            for (std::size_t f = 0; f < free.size(); ++f) rows[free[f].first][free[f].second] = Elem{digits[f]};
            fn(LinearSubspace::from_rows(F, std::move(rows)));
            std::size_t pos = 0;
            while (pos < digits.size() && ++digits[pos] == Q) digits[pos++] = 0;
            if (pos == digits.size()) break;
        }
        int i = k - 1;
        while (i >= 0 && piv[i] == n - (k - 1 - i)) --i;
        if (i < 0) break;
        ++piv[i];
        for (int j = i + 1; j < k; ++j) piv[j] = piv[j - 1] + 1;
    }
}

} // namespace transverse
