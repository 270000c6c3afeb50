#pragma once

#include <cmath>
#include <string>

#include "mss/errors.hpp"

namespace mss {

/// Vector in the Lorentz-Minkowski plane. Coordinate u0 carries the minus
/// sign of the pseudo-scalar product, u1 the plus sign.
struct MinkVec {
    double u0 = 0.0;
    double u1 = 0.0;

    MinkVec operator+(MinkVec o) const { return {u0 + o.u0, u1 + o.u1}; }
    MinkVec operator-(MinkVec o) const { return {u0 - o.u0, u1 - o.u1}; }
    MinkVec operator*(double s) const { return {u0 * s, u1 * s}; }
    MinkVec operator/(double s) const { return {u0 / s, u1 / s}; }
    bool operator==(const MinkVec&) const = default;
};

inline MinkVec operator*(double s, MinkVec v) { return v * s; }

/// <u,v> = -u0*v0 + u1*v1.
inline double pseudo_dot(MinkVec u, MinkVec v) {
    return -u.u0 * v.u0 + u.u1 * v.u1;
}

/// perp(u) = (u1, u0). Satisfies <u, perp(u)> = 0 exactly; lightlike vectors
/// are parallel to their own perp.
inline MinkVec perp(MinkVec u) { return {u.u1, u.u0}; }

/// Euclidean norm, used only for scale normalization.
inline double euclid_norm(MinkVec u) { return std::hypot(u.u0, u.u1); }

inline double euclid_dist(MinkVec a, MinkVec b) { return euclid_norm(a - b); }

/// Minkowski pseudo-norm sqrt(|<u,u>|).
inline double pseudo_norm(MinkVec u) {
    return std::sqrt(std::fabs(pseudo_dot(u, u)));
}

enum class CausalType { Timelike, Spacelike, Lightlike };

inline const char* to_string(CausalType c) {
    switch (c) {
        case CausalType::Timelike: return "timelike";
        case CausalType::Spacelike: return "spacelike";
        default: return "lightlike";
    }
}

/// Classify by the sign of <u,u> with a relative lightlike band:
/// |<u,u>| <= eps_rel * max(1, |u|_E^2).
inline CausalType causal_type(MinkVec u, double eps_rel = 1e-12) {
    double q = pseudo_dot(u, u);
    double e2 = u.u0 * u.u0 + u.u1 * u.u1;
    double band = eps_rel * std::fmax(1.0, e2);
    if (std::fabs(q) <= band) return CausalType::Lightlike;
    return q < 0.0 ? CausalType::Timelike : CausalType::Spacelike;
}

enum class CircleKind { H, S, LC };

enum class Branch { Plus, Minus };

inline const char* to_string(CircleKind k) {
    switch (k) {
        case CircleKind::H: return "H";
        case CircleKind::S: return "S";
        default: return "LC";
    }
}

inline const char* to_string(Branch b) {
    return b == Branch::Plus ? "plus" : "minus";
}

/// Pseudo-circle {p : <p - center, p - center> = r2}. Kind H has r2 < 0 and
/// two branches opening left/right with spacelike tangents, kind S has
/// r2 > 0 and branches opening up/down with timelike tangents, kind LC is
/// the lightcone r2 == 0 (two lines through the center, minus the vertex).
struct PseudoCircle {
    CircleKind kind = CircleKind::H;
    MinkVec center;
    double r2 = -1.0;

    double radius() const { return std::sqrt(std::fabs(r2)); }

    /// The two lightcone directions; only meaningful for kind LC.
    static constexpr MinkVec lc_dir_a() { return {1.0, 1.0}; }
    static constexpr MinkVec lc_dir_b() { return {1.0, -1.0}; }
};

/// Build the circle of given signed r2 around a center. The kind follows the
/// sign of r2; |r2| <= eps_rel * max(1, scale^2) collapses to LC.
inline PseudoCircle make_circle(MinkVec center, double r2,
                                double eps_rel = 1e-12, double scale = 1.0) {
    double band = eps_rel * std::fmax(1.0, scale * scale);
    if (std::fabs(r2) <= band) return {CircleKind::LC, center, 0.0};
    return {r2 < 0.0 ? CircleKind::H : CircleKind::S, center, r2};
}

/// Point on a pseudo-circle branch at hyperbolic angle theta.
/// H-plus:  center + r (cosh, sinh);  H-minus: center + r (-cosh, sinh)
/// S-plus:  center + r (sinh, cosh);  S-minus: center + r (sinh, -cosh)
inline MinkVec pseudo_circle_point(const PseudoCircle& pc, Branch b,
                                   double theta) {
    if (pc.kind == CircleKind::LC)
        throw Error("pseudo_circle_point: lightcone has no branch parametrization");
    double r = pc.radius();
    double s = (b == Branch::Plus) ? 1.0 : -1.0;
    if (pc.kind == CircleKind::H)
        return pc.center + MinkVec{s * r * std::cosh(theta), r * std::sinh(theta)};
    return pc.center + MinkVec{r * std::sinh(theta), s * r * std::cosh(theta)};
}

/// Branch of a point known to lie on an H or S circle. Decided by the sign
/// of the coordinate that carries cosh in the parametrization.
inline Branch branch_of(const PseudoCircle& pc, MinkVec p, double tol = 1e-9) {
    if (pc.kind == CircleKind::LC)
        throw Error("branch_of: lightcone circles have no branches");
    MinkVec w = p - pc.center;
    double q = pseudo_dot(w, w);
    double rel = std::fmax(1.0, std::fabs(pc.r2));
    if (std::fabs(q - pc.r2) > tol * rel)
        throw Error("branch_of: point does not lie on the circle");
    double decide = (pc.kind == CircleKind::H) ? w.u0 : w.u1;
    if (std::fabs(decide) <= tol * std::sqrt(rel))
        throw NumericError("branch_of: deciding coordinate below tolerance");
    return decide > 0.0 ? Branch::Plus : Branch::Minus;
}

/// Hyperbolic angle of a point on an H or S circle branch; inverse of
/// pseudo_circle_point up to the branch sign.
inline double circle_angle(const PseudoCircle& pc, MinkVec p) {
    if (pc.kind == CircleKind::LC)
        throw Error("circle_angle: lightcone circles have no angle");
    MinkVec w = p - pc.center;
    double r = pc.radius();
    double sinh_part = (pc.kind == CircleKind::H) ? w.u1 : w.u0;
    return std::asinh(sinh_part / r);
}

/// Unit tangent at angle theta in the branch-canonical orientation (plus
/// branches by increasing theta, minus branches reversed). With this
/// convention two tangents on the same H branch have pseudo_dot
/// cosh(t1-t2) >= 1 and on opposite H branches -cosh(t1+t2) <= -1; for S
/// circles the signs swap. Spacelike for H circles, timelike for S.
inline MinkVec canonical_tangent(const PseudoCircle& pc, Branch b,
                                 double theta) {
    if (pc.kind == CircleKind::LC)
        throw Error("canonical_tangent: lightcone circles not supported");
    double s = (b == Branch::Plus) ? 1.0 : -1.0;
    if (pc.kind == CircleKind::H)
        return {std::sinh(theta), s * std::cosh(theta)};
    return {s * std::cosh(theta), std::sinh(theta)};
}

} // namespace mss
