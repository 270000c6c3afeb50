#include "mss/contact.hpp"

#include <cmath>

#include "mss/errors.hpp"

namespace mss {

namespace {

// Pascal rows for Leibniz expansions up to the fifth derivative.
constexpr int binom[6][6] = {
    {1, 0, 0, 0, 0, 0},  {1, 1, 0, 0, 0, 0},  {1, 2, 1, 0, 0, 0},
    {1, 3, 3, 1, 0, 0},  {1, 4, 6, 4, 1, 0},  {1, 5, 10, 10, 5, 1},
};

} // namespace

double dist_sq(const CurveFamily& curve, double t, double u, MinkVec c) {
    MinkVec w = curve.point(t, u) - c;
    return pseudo_dot(w, w);
}

DistDerivs dist_sq_derivs(const Jet& jet, MinkVec c) {
    if (jet.order < 5)
        throw NumericError("dist_sq_derivs: jet order below 5");
    MinkVec w = jet.d[0] - c;
    DistDerivs out;
    out.f = pseudo_dot(w, w);
    for (int j = 1; j <= 5; ++j) {
        double acc = 2.0 * pseudo_dot(jet.d[j], w);
        for (int i = 1; i < j; ++i)
            acc += binom[j][i] * pseudo_dot(jet.d[i], jet.d[j - i]);
        out.d[j - 1] = acc;
    }
    return out;
}

DistDerivs dist_sq_derivs(const CurveFamily& curve, double t, double u,
                          MinkVec c) {
    return dist_sq_derivs(curve.jet(t, u, 5), c);
}

double dist_deriv_du(const Jet& jet, const Jet& ujet, MinkVec c, int j) {
    if (j < 0 || j > 5)
        throw NumericError("dist_deriv_du: derivative order out of range");
    if (jet.order < j || ujet.order < j)
        throw NumericError("dist_deriv_du: jet order too low");
    MinkVec w = jet.d[0] - c;
    if (j == 0) return 2.0 * pseudo_dot(ujet.d[0], w);
    double acc = 2.0 * pseudo_dot(ujet.d[j], w) +
                 2.0 * pseudo_dot(jet.d[j], ujet.d[0]);
    for (int i = 1; i < j; ++i)
        acc += binom[j][i] * (pseudo_dot(ujet.d[i], jet.d[j - i]) +
                              pseudo_dot(jet.d[i], ujet.d[j - i]));
    return acc;
}

ContactOrderResult contact_order(const Jet& jet, MinkVec c, double tol,
                                 double gap_factor) {
    DistDerivs dd = dist_sq_derivs(jet, c);
    double speed = euclid_norm(jet.d[1]);
    double base = std::fmax(1.0, std::fabs(dd.f));
    std::array<double, 5> n{};
    double pw = 1.0;
    for (int j = 1; j <= 5; ++j) {
        pw *= speed;
        n[j - 1] = std::fabs(dd.d[j - 1]) / (pw * base);
    }
    int k = 0;
    while (k < 5 && n[k] <= tol) ++k;
    if (k == 5) return {ContactKind::Ambiguous, 0};
    double witness = n[k];
    if (witness <= gap_factor * tol) return {ContactKind::Ambiguous, 0};
    if (k == 0) return {ContactKind::NoTangency, 0};
    return {ContactKind::Order, k};
}

ContactOrderResult contact_order(const CurveFamily& curve, double t, double u,
                                 MinkVec c, double tol, double gap_factor) {
    return contact_order(curve.jet(t, u, 5), c, tol, gap_factor);
}

std::optional<MinkVec> try_caustic_point(const Jet& jet, double rel_tol) {
    // f' = 0:  <gamma', c> = <gamma', gamma>
    // f'' = 0: <gamma'', c> = <gamma'', gamma> + <gamma', gamma'>
    // Both rows are linear in c with the pseudo-metric sign on c0.
    MinkVec p = jet.d[0], d1 = jet.d[1], d2 = jet.d[2];
    double a11 = -d1.u0, a12 = d1.u1, b1 = pseudo_dot(d1, p);
    double a21 = -d2.u0, a22 = d2.u1;
    double b2 = pseudo_dot(d2, p) + pseudo_dot(d1, d1);
    double det = a11 * a22 - a12 * a21;
    double row_scale = euclid_norm(d1) * euclid_norm(d2);
    if (std::fabs(det) <= rel_tol * std::fmax(row_scale, 1e-300))
        return std::nullopt;
    return MinkVec{(b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det};
}

MinkVec caustic_point(const Jet& jet) {
    auto c = try_caustic_point(jet);
    if (!c) throw SingularSystem("caustic_point: normal system is singular");
    return *c;
}

MinkVec caustic_point(const CurveFamily& curve, double t, double u) {
    return caustic_point(curve.jet(t, u, 2));
}

} // namespace mss
