#pragma once

#include <array>
#include <optional>

#include "mss/config.hpp"
#include "mss/curve.hpp"
#include "mss/minkowski.hpp"

namespace mss {

/// Distance-squared value f = <gamma - c, gamma - c> and its first five
/// t-derivatives at one parameter.
struct DistDerivs {
    double f = 0.0;
    std::array<double, 5> d{}; // d[j-1] = f^(j)
};

double dist_sq(const CurveFamily& curve, double t, double u, MinkVec c);

/// Needs jet.order >= 5. Leibniz expansion of d^j/dt^j <gamma-c, gamma-c>.
DistDerivs dist_sq_derivs(const Jet& jet, MinkVec c);
DistDerivs dist_sq_derivs(const CurveFamily& curve, double t, double u,
                          MinkVec c);

/// d/du of f^(j) at fixed (t, c); jets must share the evaluation site.
double dist_deriv_du(const Jet& jet, const Jet& ujet, MinkVec c, int j);

enum class ContactKind { NoTangency, Order, Ambiguous };

struct ContactOrderResult {
    ContactKind kind = ContactKind::NoTangency;
    int order = 0; // valid when kind == Order, in 1..4
};

/// Contact order of the pseudo-circle centered at c with value f(t) against
/// the curve at t. Derivative j is "zero" when
/// |f^(j)| <= tol * speed^j * max(1, |f|); the first nonzero derivative must
/// clear gap_factor * tol or the configuration is Ambiguous.
ContactOrderResult contact_order(const Jet& jet, MinkVec c, double tol,
                                 double gap_factor = 10.0);
ContactOrderResult contact_order(const CurveFamily& curve, double t, double u,
                                 MinkVec c, double tol,
                                 double gap_factor = 10.0);

/// Center of the pseudo-circle with at-least-2nd-order contact at t: the
/// unique solution of f' = f'' = 0, linear in c. Defined through lightlike
/// points, where the evolute formula breaks down. Throws SingularSystem.
MinkVec caustic_point(const Jet& jet);
MinkVec caustic_point(const CurveFamily& curve, double t, double u);

/// Non-throwing variant; rel_tol guards the 2x2 determinant relative to the
/// row magnitudes.
std::optional<MinkVec> try_caustic_point(const Jet& jet,
                                         double rel_tol = 1e-12);

} // namespace mss
