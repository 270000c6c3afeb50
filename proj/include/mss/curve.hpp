#pragma once

#include <array>
#include <string>
#include <vector>

#include "mss/config.hpp"
#include "mss/minkowski.hpp"

namespace mss {

/// Finite trigonometric polynomial a0 + sum_k (a_k cos(kt) + b_k sin(kt)).
/// Differentiation rotates coefficient pairs, so any derivative order is
/// exact.
struct FourierSeries {
    double constant = 0.0;
    std::vector<double> cos_coeffs; // index k-1 holds the cos(kt) coefficient
    std::vector<double> sin_coeffs;

    std::size_t harmonics() const {
        return std::max(cos_coeffs.size(), sin_coeffs.size());
    }

    /// k-th derivative at t.
    double eval(double t, int deriv = 0) const;
};

/// Jet of a parametrized curve at one parameter: position and t-derivatives.
struct Jet {
    static constexpr int max_order = 6;
    std::array<MinkVec, max_order + 1> d{}; // d[0] = position
    int order = 0;
};

/// Closed plane curve gamma(t, u) = base(t) + sum_m u^m * pert_m(t), with
/// Fourier components per coordinate. u is the family parameter; a curve
/// without perturbations ignores u.
struct CurveFamily {
    std::string name;
    FourierSeries x; // u0 coordinate
    FourierSeries y; // u1 coordinate

    struct Perturbation {
        int order = 1; // power of u, >= 1
        FourierSeries dx, dy;
    };
    std::vector<Perturbation> perturbations;

    /// k-th t-derivative of gamma at (t, u).
    MinkVec derivative(double t, double u, int k) const;

    /// k-th t-derivative of d(gamma)/du at (t, u).
    MinkVec derivative_du(double t, double u, int k) const;

    MinkVec point(double t, double u = 0.0) const { return derivative(t, u, 0); }

    /// Jet of t-derivatives up to max_k. Throws NumericError if the curve is
    /// irregular (vanishing Euclidean speed) at the evaluation site.
    Jet jet(double t, double u, int max_k) const;

    /// Jet of t-derivatives of the u-velocity field, for unfolding terms.
    Jet jet_du(double t, double u, int max_k) const;
};

/// Euclidean bounding-box diagonal of the curve at family parameter u,
/// sampled densely; used to normalize tolerances.
double curve_scale(const CurveFamily& curve, double u);

/// <gamma', gamma'> at (t, u); sign decides the causal type of the tangent.
double tangent_pseudo_sq(const Jet& jet);

bool lightlike_tangent(const Jet& jet, double eps_rel = 1e-12);

/// Minkowski curvature <gamma', perp(gamma'')> / |<gamma',gamma'>|^(3/2).
/// Throws LightlikeTangent within the lightlike band.
double minkowski_curvature(const Jet& jet, double eps_rel = 1e-12);
double minkowski_curvature(const CurveFamily& curve, double t, double u,
                           double eps_rel = 1e-12);

/// d(kappa)/ds with s the Minkowski arclength; invariant under orientation
/// reversal. Needs the 3-jet.
double curvature_arclength_derivative(const Jet& jet, double eps_rel = 1e-12);
double curvature_arclength_derivative(const CurveFamily& curve, double t,
                                      double u, double eps_rel = 1e-12);

struct Frame {
    MinkVec T, N;
};

/// Unit tangent T = gamma'/|gamma'|_M and normal N = sign(<T,T>) perp(T).
/// <N,N> = -<T,T> and the evolute gamma - N/kappa hits pseudo-circle
/// centers, which fixes the sign convention.
Frame unit_tangent_normal(const Jet& jet, double eps_rel = 1e-12);
Frame unit_tangent_normal(const CurveFamily& curve, double t, double u,
                          double eps_rel = 1e-12);

/// Evolute point gamma - N/kappa. Throws LightlikeTangent or
/// VanishingCurvature.
MinkVec evolute_point(const Jet& jet, double eps_rel = 1e-12);
MinkVec evolute_point(const CurveFamily& curve, double t, double u,
                      double eps_rel = 1e-12);

/// All parameters in [0, 2*pi) where the tangent is lightlike, sorted.
/// Bracketing on a uniform grid followed by bisection; tangencies of
/// <gamma',gamma'> without a sign change are not detected.
std::vector<double> lightlike_points(const CurveFamily& curve, double u,
                                     const Config& cfg = {});

} // namespace mss
