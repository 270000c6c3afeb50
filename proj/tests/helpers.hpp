#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "mss/curve.hpp"
#include "mss/minkowski.hpp"

namespace th {

constexpr double two_pi = 6.283185307179586476925286766559;
constexpr double pi = 3.1415926535897932384626433832795;

inline double wrap_2pi(double t) {
    double w = std::fmod(t, two_pi);
    return w < 0.0 ? w + two_pi : w;
}

/// Distance on the parameter circle.
inline double tdist(double a, double b) {
    double d = std::fabs(wrap_2pi(a) - wrap_2pi(b));
    return std::fmin(d, two_pi - d);
}

/// Central finite-difference derivative of order k (1..4), 5-point stencils.
inline double fd_deriv(const std::function<double(double)>& f, double x, int k,
                       double h) {
    double m2 = f(x - 2 * h), m1 = f(x - h), p1 = f(x + h), p2 = f(x + 2 * h);
    switch (k) {
        case 1: return (m2 - 8 * m1 + 8 * p1 - p2) / (12 * h);
        case 2: return (-m2 + 16 * m1 - 30 * f(x) + 16 * p1 - p2) / (12 * h * h);
        case 3: return (-m2 + 2 * m1 - 2 * p1 + p2) / (2 * h * h * h);
        default: return (m2 - 4 * m1 + 6 * f(x) - 4 * p1 + p2) / (h * h * h * h);
    }
}

/// Exact jet of the hyperbolic pseudo-circle parametrization at angle theta.
/// Derivatives alternate between the (cosh, sinh) pair and its swap, so all
/// orders are exact to machine precision.
inline mss::Jet circle_jet(const mss::PseudoCircle& pc, mss::Branch b,
                           double theta, int order = 5) {
    double r = pc.radius();
    double s = (b == mss::Branch::Plus) ? 1.0 : -1.0;
    double ch = r * std::cosh(theta), sh = r * std::sinh(theta);
    mss::Jet jet;
    jet.order = order;
    for (int k = 0; k <= order; ++k) {
        bool even = (k % 2 == 0);
        double a = even ? ch : sh; // cosh-slot coordinate of the k-th deriv
        double c = even ? sh : ch;
        if (pc.kind == mss::CircleKind::H)
            jet.d[k] = {s * a, c};
        else
            jet.d[k] = {c, s * a};
    }
    jet.d[0] = jet.d[0] + pc.center;
    return jet;
}

/// Center of the pseudo-circle through three points: quadratic terms cancel,
/// leaving two linear equations in the center.
inline mss::MinkVec fit_center(mss::MinkVec p1, mss::MinkVec p2,
                               mss::MinkVec p3) {
    auto q = [](mss::MinkVec p) { return mss::pseudo_dot(p, p); };
    // <p1 - c, p1 - c> = <p2 - c, p2 - c>  =>  2<p1 - p2, c> = q(p1) - q(p2)
    mss::MinkVec d12 = p1 - p2, d13 = p1 - p3;
    double r1 = 0.5 * (q(p1) - q(p2));
    double r2 = 0.5 * (q(p1) - q(p3));
    // pseudo_dot(d, c) = -d.u0 c0 + d.u1 c1
    double a11 = -d12.u0, a12 = d12.u1;
    double a21 = -d13.u0, a22 = d13.u1;
    double det = a11 * a22 - a12 * a21;
    return {(r1 * a22 - a12 * r2) / det, (a11 * r2 - r1 * a21) / det};
}

/// Random closed curve: unit circle plus decaying Fourier noise. Amplitudes
/// shrink as 1/k^2, keeping the curve regular for amp below ~0.3.
inline mss::CurveFamily random_curve(std::mt19937_64& rng, int harmonics = 3,
                                     double amp = 0.12) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    mss::CurveFamily c;
    c.name = "random";
    c.x.cos_coeffs = {1.0};
    c.y.sin_coeffs = {1.0};
    c.x.cos_coeffs.resize(harmonics + 1, 0.0);
    c.x.sin_coeffs.resize(harmonics + 1, 0.0);
    c.y.cos_coeffs.resize(harmonics + 1, 0.0);
    c.y.sin_coeffs.resize(harmonics + 1, 0.0);
    for (int k = 2; k <= harmonics + 1; ++k) {
        double w = amp / (k * k);
        c.x.cos_coeffs[k - 1] += w * U(rng);
        c.x.sin_coeffs[k - 1] += w * U(rng);
        c.y.cos_coeffs[k - 1] += w * U(rng);
        c.y.sin_coeffs[k - 1] += w * U(rng);
    }
    return c;
}

/// Fixed non-symmetric test curve used across suites.
inline mss::CurveFamily egg_curve() {
    mss::CurveFamily c;
    c.name = "egg";
    c.x.cos_coeffs = {1.0, 0.15};
    c.y.sin_coeffs = {1.1};
    return c;
}

inline mss::CurveFamily ellipse_curve() {
    mss::CurveFamily c;
    c.name = "ellipse";
    c.x.cos_coeffs = {2.0};
    c.y.sin_coeffs = {1.0};
    return c;
}

inline mss::CurveFamily circle_curve() {
    mss::CurveFamily c;
    c.name = "circle";
    c.x.cos_coeffs = {1.0};
    c.y.sin_coeffs = {1.0};
    return c;
}

inline mss::CurveFamily wobbly_curve() {
    mss::CurveFamily c;
    c.name = "wobbly";
    c.x.cos_coeffs = {1.0, 0.22};
    c.x.sin_coeffs = {0.0, 0.0, 0.04};
    c.y.sin_coeffs = {1.0, 0.18};
    return c;
}

} // namespace th
