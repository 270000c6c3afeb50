#include "doctest.h"

#include <cmath>
#include <random>

#include "mss/contact.hpp"
#include "mss/curve.hpp"
#include "mss/errors.hpp"

#include "helpers.hpp"

using namespace mss;

TEST_CASE("distance-squared values") {
    CurveFamily circle = th::circle_curve();
    // gamma(0) = (1,0), <(1,0),(1,0)> = -1.
    CHECK(dist_sq(circle, 0.0, 0.0, {0, 0}) == doctest::Approx(-1.0).epsilon(1e-14));
    // Center equal to the curve point.
    CHECK(dist_sq(circle, 0.0, 0.0, {1, 0}) == doctest::Approx(0.0).epsilon(1e-14));
    // Center on the lightcone of the curve point: gamma(0) - c lightlike.
    CHECK(dist_sq(circle, 0.0, 0.0, {0, -1}) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(dist_sq(circle, 0.0, 0.0, {3, 2}) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("distance derivatives match finite differences") {
    std::mt19937_64 rng(211);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    std::uniform_real_distribution<double> T(0.0, th::two_pi);
    for (int i = 0; i < 25; ++i) {
        CurveFamily c = th::random_curve(rng);
        double t = T(rng);
        MinkVec cen{U(rng), U(rng)};
        auto f = [&](double tt) { return dist_sq(c, tt, 0.0, cen); };
        DistDerivs dd = dist_sq_derivs(c, t, 0.0, cen);
        CHECK(dd.f == doctest::Approx(f(t)).epsilon(1e-12));
        for (int k = 1; k <= 4; ++k) {
            double fd = th::fd_deriv(f, t, k, 1e-4 * (k >= 3 ? 30.0 : 1.0));
            double tol = k <= 2 ? 1e-6 : 1e-4;
            CHECK(dd.d[k - 1] ==
                  doctest::Approx(fd).epsilon(tol).scale(std::fmax(1.0, std::fabs(fd))));
        }
    }
}

TEST_CASE("family derivative of the distance function") {
    CurveFamily fam = th::wobbly_curve();
    CurveFamily::Perturbation p;
    p.order = 1;
    p.dx.cos_coeffs = {0.0, 0.3};
    p.dy.sin_coeffs = {0.1};
    fam.perturbations = {p};
    MinkVec cen{0.2, -0.4};
    double t = 1.234, u = 0.27;
    Jet jet = fam.jet(t, u, 5);
    Jet ujet = fam.jet_du(t, u, 5);
    for (int j = 0; j <= 4; ++j) {
        auto fj = [&](double uu) {
            return dist_sq_derivs(fam, t, uu, cen).f;
        };
        auto fdj = [&](double uu) {
            return dist_sq_derivs(fam, t, uu, cen).d[j - 1];
        };
        double fd = j == 0 ? th::fd_deriv(fj, u, 1, 1e-4)
                           : th::fd_deriv(fdj, u, 1, 1e-4);
        CHECK(dist_deriv_du(jet, ujet, cen, j) ==
              doctest::Approx(fd).epsilon(1e-6).scale(std::fmax(1.0, std::fabs(fd))));
    }
}

TEST_CASE("osculating center forces two vanishing derivatives") {
    CurveFamily egg = th::egg_curve();
    double t = 0.6;
    MinkVec c = caustic_point(egg, t, 0.0);
    DistDerivs dd = dist_sq_derivs(egg, t, 0.0, c);
    CHECK(std::fabs(dd.d[0]) < 1e-9);
    CHECK(std::fabs(dd.d[1]) < 1e-9);
    CHECK(std::fabs(dd.d[2]) > 1e-3); // generic point: kappa' != 0

    // A center on the pseudo-normal line but away from the caustic:
    // f' = 0, f'' != 0.
    Frame fr = unit_tangent_normal(egg, t, 0.0);
    MinkVec cn = egg.point(t, 0.0) + fr.N * 0.37;
    DistDerivs dn = dist_sq_derivs(egg, t, 0.0, cn);
    CHECK(std::fabs(dn.d[0]) < 1e-9);
    CHECK(std::fabs(dn.d[1]) > 1e-3);
}

TEST_CASE("contact order detection") {
    CurveFamily egg = th::egg_curve();
    Config cfg;

    // Ambiguous: the curve IS a pseudo-circle arc around c, f constant.
    PseudoCircle pc = make_circle({0.3, 0.1}, -1.44);
    Jet jet = th::circle_jet(pc, Branch::Plus, 0.4);
    auto res = contact_order(jet, pc.center, cfg.tol);
    CHECK(res.kind == ContactKind::Ambiguous);

    // k = 2 at an osculating center with kappa' != 0.
    double t = 0.6;
    MinkVec c = caustic_point(egg, t, 0.0);
    auto r2 = contact_order(egg, t, 0.0, c, cfg.tol);
    CHECK(r2.kind == ContactKind::Order);
    CHECK(r2.order == 2);

    // Normal-line center, not osculating: k = 1.
    Frame fr = unit_tangent_normal(egg, t, 0.0);
    auto r1 = contact_order(egg, t, 0.0, egg.point(t, 0.0) + fr.N * 0.37,
                            cfg.tol);
    CHECK(r1.kind == ContactKind::Order);
    CHECK(r1.order == 1);

    // Center off the normal line: no tangency.
    auto r0 = contact_order(egg, t, 0.0, egg.point(t, 0.0) + fr.T * 0.2,
                            cfg.tol);
    CHECK(r0.kind == ContactKind::NoTangency);
}

TEST_CASE("contact order of a locally fitted polynomial model") {
    // Degree-5 local model: f(t) = sum a_j (t - t0)^j with a_1 = a_2 = 0,
    // a_3 != 0 must read as order 3. Build it from a curve configuration
    // with a known A3 vertex: the ellipse's axis point t = 0 against its
    // caustic center (symmetry kills f' and f''' there; kappa' = 0).
    CurveFamily ell = th::ellipse_curve();
    MinkVec c = caustic_point(ell, 0.0, 0.0);
    auto f = [&](double tt) { return dist_sq(ell, tt, 0.0, c); };
    // Fit the 5 leading Taylor coefficients by finite differences.
    double d1 = th::fd_deriv(f, 0.0, 1, 1e-3);
    double d2 = th::fd_deriv(f, 0.0, 2, 1e-3);
    double d3 = th::fd_deriv(f, 0.0, 3, 1e-3);
    double d4 = th::fd_deriv(f, 0.0, 4, 1e-3);
    CHECK(std::fabs(d1) < 1e-8);
    CHECK(std::fabs(d2) < 1e-8);
    CHECK(std::fabs(d3) < 1e-5);
    CHECK(std::fabs(d4) > 1e-3);
    auto res = contact_order(ell, 0.0, 0.0, c, 1e-6);
    CHECK(res.kind == ContactKind::Order);
    CHECK(res.order == 3);
}

TEST_CASE("caustic point of the Euclidean circle") {
    // Hand solve at t = 0: row one gives c1 = 0, row two 1 + (1 - c0) = 0.
    MinkVec c = caustic_point(th::circle_curve(), 0.0, 0.0);
    CHECK(c.u0 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(c.u1 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("caustic is defined at lightlike parameters and tangent there") {
    std::vector<CurveFamily> curves = {th::ellipse_curve(), th::egg_curve(),
                                       th::wobbly_curve()};
    for (const auto& c : curves) {
        for (double tl : lightlike_points(c, 0.0)) {
            Jet jet = c.jet(tl, 0.0, 5);
            MinkVec cp = caustic_point(jet);
            // The caustic meets the curve at the lightlike point.
            CHECK(euclid_dist(cp, jet.d[0]) < 1e-9);
            // Finite-difference caustic tangent vs the lightlike direction.
            double h = 1e-5;
            MinkVec a = caustic_point(c, tl - h, 0.0);
            MinkVec b = caustic_point(c, tl + h, 0.0);
            MinkVec dir = (b - a) / (2 * h);
            MinkVec tan = jet.d[1];
            double cross = dir.u0 * tan.u1 - dir.u1 * tan.u0;
            double angle = std::fabs(cross) / (euclid_norm(dir) * euclid_norm(tan));
            CHECK(angle < 1e-4);
        }
    }
}

TEST_CASE("parallel-normal configurations have no caustic solution") {
    // For the Euclidean circle, normals at t and t + pi are parallel and
    // the caustic system at a pair degenerates; the single-point caustic is
    // fine but a lightlike-tangent parameter makes the rows align only in
    // the degenerate-speed limit. Use try_caustic_point on a straight-line
    // jet where gamma' is parallel to gamma''.
    Jet line;
    line.order = 5;
    line.d[0] = {0.0, 0.0};
    line.d[1] = {1.0, 0.3};
    line.d[2] = {2.0, 0.6}; // parallel to d[1]
    CHECK(!try_caustic_point(line).has_value());
    CHECK_THROWS_AS(caustic_point(line), SingularSystem);
}
