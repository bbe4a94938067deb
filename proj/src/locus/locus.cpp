#include "transverse/locus.hpp"

namespace transverse {

SchemeSpec embed_scheme(const SchemeSpec& S, const FieldPtr& E) {
    SchemeSpec out{S.ambient, E, {}};
    out.forms.reserve(S.forms.size());
    for (const auto& f : S.forms) out.forms.push_back(embed_form(f, E));
    return out;
}

Hypersurface::Hypersurface(Form F) : form_(std::move(F)), cache_(std::make_shared<Cache>()) {
    if (form_.is_zero()) throw PolyError("a hypersurface needs a nonzero form");
    if (form_.degree() < 1) throw PolyError("a hypersurface needs positive degree");
    partials_ = form_partials(form_);
}

std::optional<bool> Hypersurface::cached_smooth() const {
    std::lock_guard lock(cache_->mutex);
    return cache_->smooth;
}

void Hypersurface::set_cached_smooth(bool smooth) const {
    std::lock_guard lock(cache_->mutex);
    cache_->smooth = smooth;
}

namespace {

std::vector<Elem> gradient_at(const Hypersurface& X, const ProjectivePoint& P) {
    if (P.ambient() != X.ambient()) throw GeometryError("ambient dimension mismatch");
    std::vector<Elem> g;
    g.reserve(X.partials().size());
    for (const auto& Fi : X.partials()) g.push_back(form_eval(Fi, P.coords, P.field));
    return g;
}

} // namespace

std::optional<ProjectivePoint> gauss_image(const Hypersurface& X, const ProjectivePoint& P) {
    auto g = gradient_at(X, P);
    for (auto x : g)
        if (x.code) return make_point(P.field, std::move(g));
    return std::nullopt;
}

SchemeSpec singular_scheme(const Hypersurface& X) {
    SchemeSpec S{X.ambient(), X.field(), {X.form()}};
    for (const auto& f : X.partials()) S.forms.push_back(f);
    return S;
}

Form build_D_ij(const Hypersurface& X, int i, int j) {
    const int n = X.ambient();
    if (i < 0 || j > n || i >= j) throw GeometryError("D_ij needs 0 <= i < j <= n");
    const std::uint64_t q = X.field()->order();
    const Form& Fi = X.partials()[i];
    const Form& Fj = X.partials()[j];
    const int deg = (X.degree() - 1) * static_cast<int>(q + 1);
    if (Fi.is_zero() || Fj.is_zero()) return Form(X.field(), n + 1, deg);
    return Fi * form_pow(Fj, q) - form_pow(Fi, q) * Fj;
}

bool in_Z_X(const Hypersurface& X, const ProjectivePoint& P) {
    auto g = gradient_at(X, P);
    const Field& E = *P.field;
    const std::uint64_t q = X.field()->order();
    std::vector<Elem> gq(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) gq[i] = E.pow(g[i], q);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i + 1; j < g.size(); ++j)
            if (E.sub(E.mul(g[i], gq[j]), E.mul(gq[i], g[j])).code) return false;
    return true;
}

bool in_Z_r(const LinearSubspace& H_prev, const ProjectivePoint& P) {
    if (P.ambient() != H_prev.ambient()) throw GeometryError("ambient dimension mismatch");
    const Field& E = *P.field;
    const std::uint64_t q = H_prev.field()->order();
    Matrix m = embed_matrix(H_prev.rows(), H_prev.field(), P.field);
    const int base_rows = static_cast<int>(m.size());
    m.push_back(P.coords);
    Row frob(P.coords.size());
    for (std::size_t i = 0; i < frob.size(); ++i) frob[i] = E.pow(P.coords[i], q);
    m.push_back(std::move(frob));
    return rank(E, std::move(m)) <= base_rows + 1;
}

SchemeSpec tangency_locus(const Hypersurface& X, const LinearSubspace& H) {
    if (H.ambient() != X.ambient()) throw GeometryError("ambient dimension mismatch");
    if (!(*H.field() == *X.field())) throw GeometryError("subspace and hypersurface fields differ");
    SchemeSpec S{X.ambient(), X.field(), {X.form()}};
    for (const auto& v : H.rows()) {
        Form acc(X.field(), X.ambient() + 1, X.degree() - 1);
        for (int j = 0; j <= X.ambient(); ++j)
            if (v[j].code && !X.partials()[j].is_zero()) acc = acc + scale(X.partials()[j], v[j]);
        S.forms.push_back(std::move(acc));
    }
    return S;
}

} // namespace transverse
