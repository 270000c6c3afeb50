#include "mss/curve.hpp"

#include <algorithm>
#include <cmath>

#include "mss/errors.hpp"

namespace mss {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

double wrap_2pi(double t) {
    double w = std::fmod(t, two_pi);
    return w < 0.0 ? w + two_pi : w;
}

} // namespace

double FourierSeries::eval(double t, int deriv) const {
    double acc = (deriv == 0) ? constant : 0.0;
    std::size_t n = harmonics();
    for (std::size_t idx = 0; idx < n; ++idx) {
        double k = static_cast<double>(idx + 1);
        double a = idx < cos_coeffs.size() ? cos_coeffs[idx] : 0.0;
        double b = idx < sin_coeffs.size() ? sin_coeffs[idx] : 0.0;
        // d/dt maps (a, b) -> (k*b, -k*a) for a*cos(kt) + b*sin(kt).
        for (int j = 0; j < deriv; ++j) {
            double na = k * b;
            double nb = -k * a;
            a = na;
            b = nb;
        }
        acc += a * std::cos(k * t) + b * std::sin(k * t);
    }
    return acc;
}

MinkVec CurveFamily::derivative(double t, double u, int k) const {
    MinkVec v{x.eval(t, k), y.eval(t, k)};
    for (const auto& p : perturbations) {
        double w = std::pow(u, p.order);
        if (w == 0.0) continue;
        v = v + MinkVec{p.dx.eval(t, k), p.dy.eval(t, k)} * w;
    }
    return v;
}

MinkVec CurveFamily::derivative_du(double t, double u, int k) const {
    MinkVec v{0.0, 0.0};
    for (const auto& p : perturbations) {
        double w = p.order * std::pow(u, p.order - 1);
        if (w == 0.0) continue;
        v = v + MinkVec{p.dx.eval(t, k), p.dy.eval(t, k)} * w;
    }
    return v;
}

Jet CurveFamily::jet(double t, double u, int max_k) const {
    if (max_k > Jet::max_order)
        throw NumericError("jet: derivative order beyond supported maximum");
    Jet j;
    j.order = max_k;
    for (int k = 0; k <= max_k; ++k) j.d[k] = derivative(t, u, k);
    if (max_k >= 1 && euclid_norm(j.d[1]) < 1e-12)
        throw NumericError("jet: curve is irregular (vanishing speed)");
    return j;
}

Jet CurveFamily::jet_du(double t, double u, int max_k) const {
    if (max_k > Jet::max_order)
        throw NumericError("jet_du: derivative order beyond supported maximum");
    Jet j;
    j.order = max_k;
    for (int k = 0; k <= max_k; ++k) j.d[k] = derivative_du(t, u, k);
    return j;
}

double curve_scale(const CurveFamily& curve, double u) {
    constexpr int samples = 512;
    double lo0 = 1e300, hi0 = -1e300, lo1 = 1e300, hi1 = -1e300;
    for (int i = 0; i < samples; ++i) {
        MinkVec p = curve.point(two_pi * i / samples, u);
        lo0 = std::fmin(lo0, p.u0);
        hi0 = std::fmax(hi0, p.u0);
        lo1 = std::fmin(lo1, p.u1);
        hi1 = std::fmax(hi1, p.u1);
    }
    return std::fmax(std::hypot(hi0 - lo0, hi1 - lo1), 1e-9);
}

double tangent_pseudo_sq(const Jet& jet) { return pseudo_dot(jet.d[1], jet.d[1]); }

bool lightlike_tangent(const Jet& jet, double eps_rel) {
    return causal_type(jet.d[1], eps_rel) == CausalType::Lightlike;
}

double minkowski_curvature(const Jet& jet, double eps_rel) {
    if (lightlike_tangent(jet, eps_rel))
        throw LightlikeTangent("curvature: lightlike tangent");
    double g = tangent_pseudo_sq(jet);
    double num = pseudo_dot(jet.d[1], perp(jet.d[2]));
    return num / std::pow(std::fabs(g), 1.5);
}

double minkowski_curvature(const CurveFamily& curve, double t, double u,
                           double eps_rel) {
    return minkowski_curvature(curve.jet(t, u, 2), eps_rel);
}

double curvature_arclength_derivative(const Jet& jet, double eps_rel) {
    if (lightlike_tangent(jet, eps_rel))
        throw LightlikeTangent("curvature derivative: lightlike tangent");
    double g = tangent_pseudo_sq(jet);
    double sg = g < 0.0 ? -1.0 : 1.0;
    double ag = std::fabs(g);
    double P = pseudo_dot(jet.d[1], perp(jet.d[2]));
    // <gamma'', perp(gamma'')> = 0, so P' has a single term.
    double Pp = pseudo_dot(jet.d[1], perp(jet.d[3]));
    double gp = 2.0 * pseudo_dot(jet.d[1], jet.d[2]);
    double kappa_t = (Pp * ag - 1.5 * P * sg * gp) / std::pow(ag, 2.5);
    return kappa_t / std::sqrt(ag);
}

double curvature_arclength_derivative(const CurveFamily& curve, double t,
                                      double u, double eps_rel) {
    return curvature_arclength_derivative(curve.jet(t, u, 3), eps_rel);
}

Frame unit_tangent_normal(const Jet& jet, double eps_rel) {
    if (lightlike_tangent(jet, eps_rel))
        throw LightlikeTangent("frame: lightlike tangent");
    double g = tangent_pseudo_sq(jet);
    MinkVec T = jet.d[1] / std::sqrt(std::fabs(g));
    MinkVec N = perp(T) * (g < 0.0 ? -1.0 : 1.0);
    return {T, N};
}

Frame unit_tangent_normal(const CurveFamily& curve, double t, double u,
                          double eps_rel) {
    return unit_tangent_normal(curve.jet(t, u, 2), eps_rel);
}

MinkVec evolute_point(const Jet& jet, double eps_rel) {
    double kappa = minkowski_curvature(jet, eps_rel);
    if (std::fabs(kappa) < 1e-12)
        throw VanishingCurvature("evolute: curvature vanishes");
    Frame fr = unit_tangent_normal(jet, eps_rel);
    return jet.d[0] - fr.N / kappa;
}

MinkVec evolute_point(const CurveFamily& curve, double t, double u,
                      double eps_rel) {
    return evolute_point(curve.jet(t, u, 2), eps_rel);
}

std::vector<double> lightlike_points(const CurveFamily& curve, double u,
                                     const Config& cfg) {
    int n = std::max(cfg.lightlike_grid_n, 16);
    auto g = [&](double t) {
        MinkVec d1 = curve.derivative(t, u, 1);
        return pseudo_dot(d1, d1);
    };
    std::vector<double> roots;
    double h = two_pi / n;
    double prev = g(0.0);
    for (int i = 0; i < n; ++i) {
        double t0 = i * h;
        double t1 = (i + 1) * h;
        double next = g(t1);
        if (prev == 0.0) {
            roots.push_back(wrap_2pi(t0));
        } else if ((prev < 0.0) != (next < 0.0)) {
            double lo = t0, hi = t1, glo = prev;
            while (hi - lo > cfg.root_bisect_tol) {
                double mid = 0.5 * (lo + hi);
                double gm = g(mid);
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((glo < 0.0) == (gm < 0.0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(wrap_2pi(0.5 * (lo + hi)));
        }
        prev = next;
    }
    std::sort(roots.begin(), roots.end());
    // Merge duplicates, including across the 0 == 2*pi seam.
    std::vector<double> out;
    for (double r : roots) {
        if (!out.empty() && r - out.back() < 1e-10) continue;
        out.push_back(r);
    }
    if (out.size() > 1 && (two_pi - out.back()) + out.front() < 1e-10)
        out.pop_back();
    return out;
}

} // namespace mss
