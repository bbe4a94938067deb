#pragma once

// Hypersurfaces and the loci built from them: singular scheme, D_ij, Z_X,
// Z_r membership and tangency loci.

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "transverse/poly.hpp"
#include "transverse/projgeom.hpp"

namespace transverse {

/// A finite list of homogeneous forms in P^ambient over a common field.
struct SchemeSpec {
    int ambient = 0;
    FieldPtr field;
    std::vector<Form> forms;
};

/// Re-express every generator over an extension E (same tower).
SchemeSpec embed_scheme(const SchemeSpec& S, const FieldPtr& E);

class Hypersurface {
public:
    explicit Hypersurface(Form F);

    int ambient() const { return form_.nvars() - 1; }
    int degree() const { return form_.degree(); }
    const Form& form() const { return form_; }
    const FieldPtr& field() const { return form_.field(); }
    const std::vector<Form>& partials() const { return partials_; }

    /// Smoothness verdict cached by the certify module.
    std::optional<bool> cached_smooth() const;
    void set_cached_smooth(bool smooth) const;

private:
    struct Cache {
        std::mutex mutex;
        std::optional<bool> smooth;
    };
    Form form_;
    std::vector<Form> partials_;
    std::shared_ptr<Cache> cache_;
};

/// Normalized gradient at P as a dual point, or nullopt when P is singular
/// (all partials vanish at P).
std::optional<ProjectivePoint> gauss_image(const Hypersurface& X, const ProjectivePoint& P);
/// Generators {F, F_0, ..., F_n}.
SchemeSpec singular_scheme(const Hypersurface& X);
/// F_i F_j^q - F_i^q F_j with q = |field of X|.
Form build_D_ij(const Hypersurface& X, int i, int j);
/// All D_ij vanish at P (evaluated through the gradient values).
bool in_Z_X(const Hypersurface& X, const ProjectivePoint& P);
/// P lies on an F_q r-plane through H_prev (dim H_prev = r - 1): the matrix
/// with rows H_prev, P, P^(q) has rank at most r + 1.
bool in_Z_r(const LinearSubspace& H_prev, const ProjectivePoint& P);
/// Generators {F} and the contractions sum_j v_j F_j over the rows v of H.
SchemeSpec tangency_locus(const Hypersurface& X, const LinearSubspace& H);

} // namespace transverse
