#pragma once

// Exact-as-possible kernels for the two supported matrix Lie groups, SO(3)
// and SL(2,R): brackets, closed-form exp/log with branch classification,
// adjoint and coadjoint actions, the duality pairing and the orbit
// symplectic form. Everything here is a pure function of immutable values.

#include <array>
#include <cmath>
#include <string>

#include "liefloq/errors.hpp"
#include "liefloq/linalg.hpp"

namespace liefloq {

enum class GroupId { SO3, SL2R };

inline const char* group_name(GroupId g) { return g == GroupId::SO3 ? "SO3" : "SL2R"; }

inline int matrix_dim(GroupId g) { return g == GroupId::SO3 ? 3 : 2; }

namespace detail {

inline Mat so3_hat(const Vec3& w) {
    Mat m(3);
    m(0, 1) = -w.z;
    m(0, 2) = w.y;
    m(1, 0) = w.z;
    m(1, 2) = -w.x;
    m(2, 0) = -w.y;
    m(2, 1) = w.x;
    return m;
}

// sl(2,R) is identified with R^3 through w = (2a1, -a2-a3, a2-a3) for the
// matrix [[a1, a2], [a3, -a1]]; in these coordinates the adjoint action is
// the linear Lorentz action and det = (w3^2 - w1^2 - w2^2)/4.
inline Mat sl2_mat(const Vec3& w) {
    Mat m(2);
    m(0, 0) = 0.5 * w.x;
    m(0, 1) = 0.5 * (w.z - w.y);
    m(1, 0) = -0.5 * (w.y + w.z);
    m(1, 1) = -0.5 * w.x;
    return m;
}

inline Vec3 sl2_coords(const Mat& m) {
    // Remove any numerical trace before reading off the entries.
    const double a1 = 0.5 * (m(0, 0) - m(1, 1));
    const double a2 = m(0, 1);
    const double a3 = m(1, 0);
    return {2.0 * a1, -a2 - a3, a2 - a3};
}

inline Vec3 so3_coords(const Mat& m) {
    // Skew part first; symmetric contamination is pure roundoff.
    return {0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)),
            0.5 * (m(1, 0) - m(0, 1))};
}

}  // namespace detail

/// Fixed description of one of the two supported groups: basis matrices of
/// the algebra and the structure-constant tensor c[i][j][k] with
/// [e_i, e_j] = sum_k c[i][j][k] e_k.
struct LieContext {
    GroupId group_id;
    int dim = 3;
    std::array<Mat, 3> basis;
    double structure_constants[3][3][3] = {};

    static const LieContext& so3() {
        static const LieContext ctx = make(GroupId::SO3);
        return ctx;
    }
    static const LieContext& sl2r() {
        static const LieContext ctx = make(GroupId::SL2R);
        return ctx;
    }
    static const LieContext& get(GroupId g) { return g == GroupId::SO3 ? so3() : sl2r(); }

  private:
    static LieContext make(GroupId g) {
        LieContext ctx;
        ctx.group_id = g;
        for (int i = 0; i < 3; ++i) {
            Vec3 e;
            e[i] = 1.0;
            ctx.basis[static_cast<size_t>(i)] =
                g == GroupId::SO3 ? detail::so3_hat(e) : detail::sl2_mat(e);
        }
        if (g == GroupId::SO3) {
            // [e_i, e_j] = eps_ijk e_k
            ctx.structure_constants[0][1][2] = 1.0;
            ctx.structure_constants[1][0][2] = -1.0;
            ctx.structure_constants[1][2][0] = 1.0;
            ctx.structure_constants[2][1][0] = -1.0;
            ctx.structure_constants[2][0][1] = 1.0;
            ctx.structure_constants[0][2][1] = -1.0;
        } else {
            // so(2,1) signature: [e1,e2] = -e3, [e2,e3] = e1, [e3,e1] = e2
            ctx.structure_constants[0][1][2] = -1.0;
            ctx.structure_constants[1][0][2] = 1.0;
            ctx.structure_constants[1][2][0] = 1.0;
            ctx.structure_constants[2][1][0] = -1.0;
            ctx.structure_constants[2][0][1] = 1.0;
            ctx.structure_constants[0][2][1] = -1.0;
        }
        return ctx;
    }
};

/// Algebra element: coordinates in the fixed basis plus the cached matrix.
struct AlgebraElement {
    GroupId group;
    Vec3 coords;
    Mat matrix;

    AlgebraElement() : group(GroupId::SO3), matrix(3) {}
    AlgebraElement(GroupId g, const Vec3& w)
        : group(g), coords(w),
          matrix(g == GroupId::SO3 ? detail::so3_hat(w) : detail::sl2_mat(w)) {}

    static AlgebraElement zero(GroupId g) { return AlgebraElement(g, Vec3{}); }

    /// Project a raw matrix onto the algebra (skew part for so(3), traceless
    /// part for sl(2,R)) and rebuild the cached matrix from the coordinates.
    static AlgebraElement from_matrix(GroupId g, const Mat& m) {
        const Vec3 w = g == GroupId::SO3 ? detail::so3_coords(m) : detail::sl2_coords(m);
        return AlgebraElement(g, w);
    }

    double norm() const { return coords.norm(); }

    AlgebraElement operator+(const AlgebraElement& o) const {
        return AlgebraElement(group, coords + o.coords);
    }
    AlgebraElement operator-(const AlgebraElement& o) const {
        return AlgebraElement(group, coords - o.coords);
    }
    AlgebraElement operator*(double c) const { return AlgebraElement(group, coords * c); }
    AlgebraElement operator-() const { return AlgebraElement(group, -coords); }
};

/// Group element: a 3x3 rotation or a 2x2 unimodular matrix.
struct GroupElement {
    GroupId group;
    Mat matrix;

    GroupElement() : group(GroupId::SO3), matrix(Mat::identity(3)) {}
    GroupElement(GroupId g, const Mat& m) : group(g), matrix(m) {}

    static GroupElement identity(GroupId g) {
        return GroupElement(g, Mat::identity(matrix_dim(g)));
    }

    GroupElement operator*(const GroupElement& o) const {
        if (group != o.group) throw ContextError("group element product across contexts");
        return GroupElement(group, matrix * o.matrix);
    }

    GroupElement inverse() const {
        if (group == GroupId::SO3) return GroupElement(group, matrix.transpose());
        return GroupElement(group, matrix.inverse());
    }
};

/// Covector: coordinates in the dual basis; the pairing with e_i reads off
/// the i-th coordinate.
struct CoalgebraElement {
    GroupId group;
    Vec3 coords;

    CoalgebraElement() : group(GroupId::SO3) {}
    CoalgebraElement(GroupId g, const Vec3& w) : group(g), coords(w) {}

    double norm() const { return coords.norm(); }
};

/// Deviation of a matrix from the group manifold: ||g^T g - I|| + |det-1|
/// for SO(3), |det-1| for SL(2,R).
inline double manifold_residual(const GroupElement& g) {
    const double det_err = std::abs(g.matrix.det() - 1.0);
    if (g.group == GroupId::SL2R) return det_err;
    const Mat gtg = g.matrix.transpose() * g.matrix;
    return frobenius_distance(gtg, Mat::identity(3)) + det_err;
}

inline void require_same_context(GroupId a, GroupId b, const char* op) {
    if (a != b) throw ContextError(std::string(op) + ": mixed group contexts");
}

// ---------------------------------------------------------------------------
// Bracket, pairing, adjoint machinery
// ---------------------------------------------------------------------------

/// Lie bracket [x, y]. In coordinates this is the cross product for so(3)
/// and diag(1,1,-1) times the cross product for sl(2,R).
inline AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
    require_same_context(x.group, y.group, "bracket");
    Vec3 c = cross(x.coords, y.coords);
    if (x.group == GroupId::SL2R) c.z = -c.z;
    return AlgebraElement(x.group, c);
}

/// Coordinate pairing between a covector and a vector.
inline double pairing(const CoalgebraElement& mu, const AlgebraElement& x) {
    require_same_context(mu.group, x.group, "pairing");
    return dot(mu.coords, x.coords);
}

/// Matrix of ad_x acting on coordinates.
inline CoordMat ad_matrix(const AlgebraElement& x) {
    CoordMat m;
    const double s = x.group == GroupId::SL2R ? -1.0 : 1.0;
    // cross-product matrix, with the third row flipped for sl(2,R)
    m(0, 1) = -x.coords.z;
    m(0, 2) = x.coords.y;
    m(1, 0) = x.coords.z;
    m(1, 2) = -x.coords.x;
    m(2, 0) = -s * x.coords.y;
    m(2, 1) = s * x.coords.x;
    return m;
}

/// Matrix of Ad_g acting on coordinates; columns are the coordinates of
/// g e_i g^{-1}.
inline CoordMat adjoint_matrix(const GroupElement& g) {
    const LieContext& ctx = LieContext::get(g.group);
    const Mat ginv = g.inverse().matrix;
    CoordMat m;
    for (int i = 0; i < 3; ++i) {
        const Mat conj = g.matrix * ctx.basis[static_cast<size_t>(i)] * ginv;
        const Vec3 w = g.group == GroupId::SO3 ? detail::so3_coords(conj)
                                               : detail::sl2_coords(conj);
        m(0, i) = w.x;
        m(1, i) = w.y;
        m(2, i) = w.z;
    }
    return m;
}

/// Adjoint action Ad_g x = g x g^{-1}.
inline AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& x) {
    require_same_context(g.group, x.group, "adjoint");
    const Mat conj = g.matrix * x.matrix * g.inverse().matrix;
    return AlgebraElement::from_matrix(g.group, conj);
}

/// Infinitesimal coadjoint action: <ad*_x mu, y> = <mu, [x, y]>, i.e. the
/// transpose of the ad matrix applied to the dual coordinates.
inline CoalgebraElement ad_star(const AlgebraElement& x, const CoalgebraElement& mu) {
    require_same_context(x.group, mu.group, "ad_star");
    return CoalgebraElement(x.group, ad_matrix(x).transpose() * mu.coords);
}

/// Coadjoint action of the group, Phi_g = Ad*_{g^{-1}}: the left action on
/// the coalgebra satisfying <coadjoint(g, mu), x> = <mu, Ad_{g^{-1}} x>.
inline CoalgebraElement coadjoint(const GroupElement& g, const CoalgebraElement& mu) {
    require_same_context(g.group, mu.group, "coadjoint");
    return CoalgebraElement(g.group, adjoint_matrix(g.inverse()).transpose() * mu.coords);
}

/// Kirillov symplectic form on the coadjoint orbit through eta, evaluated on
/// the tangent vectors ad*_x eta and ad*_y eta: omega = <eta, [x, y]>.
inline double kirillov(const CoalgebraElement& eta, const AlgebraElement& x,
                       const AlgebraElement& y) {
    return pairing(eta, bracket(x, y));
}

// ---------------------------------------------------------------------------
// Exponential map
// ---------------------------------------------------------------------------

namespace detail {

// cos(sqrt(d)) and sin(sqrt(d))/sqrt(d), analytic across d = 0. Negative d
// gives the hyperbolic pair. The series window avoids cancellation at the
// removable singularity.
inline void cos_sinc_pair(double d, double& c, double& s) {
    if (d > 1e-8) {
        const double w = std::sqrt(d);
        c = std::cos(w);
        s = std::sin(w) / w;
    } else if (d < -1e-8) {
        const double w = std::sqrt(-d);
        c = std::cosh(w);
        s = std::sinh(w) / w;
    } else {
        c = 1.0 - d / 2.0 + d * d / 24.0;
        s = 1.0 - d / 6.0 + d * d / 120.0;
    }
}

inline Mat so3_exp(const Vec3& w) {
    const double th2 = dot(w, w);
    const double th = std::sqrt(th2);
    double a, b;  // sin(th)/th and (1-cos(th))/th^2
    if (th > 1e-4) {
        a = std::sin(th) / th;
        b = (1.0 - std::cos(th)) / th2;
    } else {
        a = 1.0 - th2 / 6.0 + th2 * th2 / 120.0;
        b = 0.5 - th2 / 24.0 + th2 * th2 / 720.0;
    }
    const Mat k = so3_hat(w);
    return Mat::identity(3) + k * a + (k * k) * b;
}

inline Mat sl2_exp(const Mat& x) {
    double c, s;
    cos_sinc_pair(x.det(), c, s);
    return Mat::identity(2) * c + x * s;
}

}  // namespace detail

/// Group exponential, closed form everywhere: Rodrigues for SO(3) and the
/// trace classification (elliptic / parabolic / hyperbolic) for SL(2,R),
/// with series evaluation of the scalar coefficients near their removable
/// singularities.
inline GroupElement exp_group(const AlgebraElement& x) {
    if (x.group == GroupId::SO3) return GroupElement(x.group, detail::so3_exp(x.coords));
    return GroupElement(x.group, detail::sl2_exp(x.matrix));
}

// ---------------------------------------------------------------------------
// Logarithm with branch classification
// ---------------------------------------------------------------------------

enum class LogStatus {
    Unique,        ///< single principal log in the algebra
    BranchFamily,  ///< principal log plus a nontrivial family (angle-pi cases)
    NotInImage,    ///< not in the exp image; center decomposition populated
    CenterTimesExp ///< result expressed as center_factor * exp(principal)
};

inline const char* log_status_name(LogStatus s) {
    switch (s) {
        case LogStatus::Unique: return "Unique";
        case LogStatus::BranchFamily: return "BranchFamily";
        case LogStatus::NotInImage: return "NotInImage";
        case LogStatus::CenterTimesExp: return "CenterTimesExp";
    }
    return "?";
}

struct LogResult {
    LogStatus status = LogStatus::Unique;
    AlgebraElement principal;
    /// Populated for NotInImage / CenterTimesExp: the central factor (-I for
    /// SL(2,R)) with center_factor * exp(principal) equal to the input.
    GroupElement center_factor;
    bool has_center_factor = false;
    std::string branch_rule;

    bool in_exp_image() const {
        return status == LogStatus::Unique || status == LogStatus::BranchFamily;
    }
};

namespace detail {

inline LogResult so3_log(const GroupElement& g) {
    const Mat& r = g.matrix;
    LogResult out;
    out.branch_rule = "axis-angle: angle shifts by 2*pi*n along the same axis";
    const Vec3 v = so3_coords(r);  // = sin(theta) * axis
    const double sth = v.norm();
    const double cth = 0.5 * (r.trace() - 1.0);
    const double th = std::atan2(sth, cth);  // in [0, pi], well conditioned

    if (th < 1e-4) {
        // theta/sin(theta) ~ 1 + th^2/6 + 7 th^4/360
        const double f = 1.0 + th * th / 6.0 + 7.0 * th * th * th * th / 360.0;
        out.principal = AlgebraElement(g.group, v * f);
        out.status = LogStatus::Unique;
        return out;
    }
    if (M_PI - th > 1e-4) {
        out.principal = AlgebraElement(g.group, v * (th / sth));
        out.status = LogStatus::Unique;
        return out;
    }
    // Near angle pi the skew part degenerates; recover the axis from the
    // symmetric part: (R + R^T)/2 = I + (1-cos th)(a a^T - I).
    const double one_minus_c = 1.0 - cth;
    Vec3 a;
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < 3; ++i) {
        const double aii = (r(i, i) - cth) / one_minus_c;
        if (aii > best) {
            best = aii;
            imax = i;
        }
    }
    const double amax = std::sqrt(std::max(best, 0.0));
    for (int j = 0; j < 3; ++j) {
        if (j == imax) {
            a[j] = amax;
        } else {
            a[j] = 0.5 * (r(imax, j) + r(j, imax)) / one_minus_c / amax;
        }
    }
    a = a / a.norm();
    if (sth > 1e-8) {
        // Axis sign still visible in the skew part.
        if (dot(a, v) < 0.0) a = -a;
        out.principal = AlgebraElement(g.group, a * th);
        out.status = LogStatus::Unique;
    } else {
        // Rotation by pi: both +-pi*a exponentiate to g. Fix the sign
        // deterministically by the first nonzero coordinate.
        if (a.x < 0.0 || (a.x == 0.0 && (a.y < 0.0 || (a.y == 0.0 && a.z < 0.0)))) a = -a;
        out.principal = AlgebraElement(g.group, a * M_PI);
        out.status = LogStatus::BranchFamily;
        out.branch_rule = "rotation by pi: both axis signs are valid branches";
    }
    return out;
}

// Principal log of an SL(2,R) element that lies in the exp image
// (trace > -2, or -I which is handled by the caller).
inline AlgebraElement sl2_log_in_image(const GroupElement& g, LogStatus& status,
                                       std::string& rule) {
    const Mat& m = g.matrix;
    const double c = 0.5 * m.trace();
    Mat m0 = m;  // traceless part
    m0(0, 0) -= c;
    m0(1, 1) -= c;
    status = LogStatus::Unique;
    double f;
    if (c > 1.0 + 1e-8) {
        const double lam = std::acosh(c);
        f = lam / std::sqrt(c * c - 1.0);
        rule = "hyperbolic: unique log";
    } else if (c >= 1.0 - 1e-8) {
        f = 1.0 - (c - 1.0) / 3.0;  // analytic across the parabolic case
        rule = "parabolic: unique log";
    } else {
        const double s = std::sqrt((1.0 - c) * (1.0 + c));
        const double om = (c > 0.0) ? std::asin(s) : M_PI - std::asin(s);
        f = om / s;
        rule = "elliptic: rotation angle shifts by 2*pi*n";
    }
    return AlgebraElement::from_matrix(g.group, m0 * f);
}

inline LogResult sl2_log(const GroupElement& g) {
    LogResult out;
    const double tr = g.matrix.trace();
    const double dist_minus_i = frobenius_distance(g.matrix, Mat::identity(2) * -1.0);

    if (dist_minus_i <= 1e-12) {
        // -I = exp(pi J) for every elliptic direction of unit rotation rate.
        Mat j(2);
        j(0, 1) = M_PI;
        j(1, 0) = -M_PI;
        out.principal = AlgebraElement::from_matrix(g.group, j);
        out.status = LogStatus::BranchFamily;
        out.branch_rule = "-I: exp(pi * J) for any elliptic direction J with det J = 1";
        return out;
    }
    if (tr > -2.0) {
        out.principal = sl2_log_in_image(g, out.status, out.branch_rule);
        return out;
    }
    // trace <= -2 and g != -I: outside the exp image, but -g is inside, so
    // g = (-I) * exp(k) always decomposes.
    GroupElement neg(g.group, g.matrix * -1.0);
    LogStatus st;
    std::string rule;
    out.principal = sl2_log_in_image(neg, st, rule);
    out.status = LogStatus::NotInImage;
    out.center_factor = GroupElement(g.group, Mat::identity(2) * -1.0);
    out.has_center_factor = true;
    out.branch_rule = "center decomposition: g = (-I) * exp(k), " + rule;
    return out;
}

}  // namespace detail

/// Group logarithm with branch classification. SO(3) elements always have a
/// log (BranchFamily at rotation angle pi); SL(2,R) elements with trace
/// <= -2 other than -I are NotInImage and carry the center decomposition
/// g = (-I) exp(k). Throws InvalidGroupElement if the input is off the
/// manifold by more than `manifold_tol`.
inline LogResult log_group(const GroupElement& g, double manifold_tol = 1e-6) {
    if (manifold_residual(g) > manifold_tol)
        throw InvalidGroupElement(std::string(group_name(g.group)) +
                                  " log: input violates manifold invariants");
    return g.group == GroupId::SO3 ? detail::so3_log(g) : detail::sl2_log(g);
}

// ---------------------------------------------------------------------------
// Right-trivialized differential of exp (used by homotopy construction)
// ---------------------------------------------------------------------------

/// dexp^R_q(v): the right logarithmic derivative of t -> exp(q(t)) equals
/// dexp^R_{q}(dq/dt). Evaluated by argument halving plus the commutator
/// series sum_n ad_q^n(v)/(n+1)!, accurate to machine precision.
inline AlgebraElement dexp_right(const AlgebraElement& q, const AlgebraElement& v) {
    require_same_context(q.group, v.group, "dexp_right");
    int halvings = 0;
    AlgebraElement qs = q;
    while (qs.norm() > 0.5 && halvings < 40) {
        qs = qs * 0.5;
        ++halvings;
    }
    AlgebraElement term = v;
    Vec3 acc = term.coords;
    for (int n = 1; n < 30; ++n) {
        term = bracket(qs, term) * (1.0 / (n + 1));
        acc += term.coords;
        if (term.norm() <= 1e-18 * (1.0 + v.norm())) break;
    }
    AlgebraElement out(q.group, acc);
    // dexp^R_{2q}(v) = (I + Ad_{exp q}) dexp^R_q(v) / 2
    for (int i = 0; i < halvings; ++i) {
        out = (out + adjoint(exp_group(qs), out)) * 0.5;
        qs = qs * 2.0;
    }
    return out;
}

}  // namespace liefloq
