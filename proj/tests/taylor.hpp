#pragma once

// Independent derivative oracle for the transition tests. Curve derivatives
// are rebuilt from the raw Fourier coefficients with truncated Taylor-series
// arithmetic, bypassing the library's jet recursion entirely, and a small
// dense damped Newton refines event systems built on top of them.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "mss/curve.hpp"
#include "mss/minkowski.hpp"

namespace th {

constexpr int taylor_n = 6; // coefficients for (t - t0)^0 .. (t - t0)^6

struct Taylor {
    std::array<double, taylor_n + 1> c{};
};

inline Taylor taylor_add(const Taylor& a, const Taylor& b) {
    Taylor r;
    for (int i = 0; i <= taylor_n; ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
}

inline Taylor taylor_sub(const Taylor& a, const Taylor& b) {
    Taylor r;
    for (int i = 0; i <= taylor_n; ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
}

inline Taylor taylor_mul(const Taylor& a, const Taylor& b) {
    Taylor r;
    for (int i = 0; i <= taylor_n; ++i)
        for (int j = 0; i + j <= taylor_n; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

/// Series of coeff * cos(m t) (or sin) about t0: the k-th derivative of
/// cos(m t) is m^k cos(m t + k pi/2), divided by k! for the coefficient.
inline Taylor trig_series(double coeff, int m, double t0, bool is_sin) {
    Taylor r;
    double mk = 1.0, fact = 1.0;
    double phase = m * t0;
    for (int k = 0; k <= taylor_n; ++k) {
        if (k > 0) {
            mk *= m;
            fact *= k;
        }
        double shifted = phase + k * 1.5707963267948966192313216916398;
        double base = is_sin ? std::sin(shifted) : std::cos(shifted);
        r.c[k] = coeff * mk * base / fact;
    }
    return r;
}

/// Effective Fourier coefficients of one coordinate at family parameter u:
/// base plus u^order-weighted perturbation rows.
struct EffSeries {
    double constant = 0.0;
    std::vector<double> cosc, sinc;

    void add(const mss::FourierSeries& s, double w) {
        constant += w * s.constant;
        if (cosc.size() < s.cos_coeffs.size()) cosc.resize(s.cos_coeffs.size());
        if (sinc.size() < s.sin_coeffs.size()) sinc.resize(s.sin_coeffs.size());
        for (std::size_t i = 0; i < s.cos_coeffs.size(); ++i)
            cosc[i] += w * s.cos_coeffs[i];
        for (std::size_t i = 0; i < s.sin_coeffs.size(); ++i)
            sinc[i] += w * s.sin_coeffs[i];
    }

    Taylor series(double t0) const {
        Taylor r;
        r.c[0] = constant;
        for (std::size_t i = 0; i < cosc.size(); ++i)
            if (cosc[i] != 0.0)
                r = taylor_add(r, trig_series(cosc[i], int(i) + 1, t0, false));
        for (std::size_t i = 0; i < sinc.size(); ++i)
            if (sinc[i] != 0.0)
                r = taylor_add(r, trig_series(sinc[i], int(i) + 1, t0, true));
        return r;
    }
};

struct EffCoords {
    EffSeries x, y;
};

inline EffCoords effective_coords(const mss::CurveFamily& fam, double u) {
    EffCoords e;
    e.x.add(fam.x, 1.0);
    e.y.add(fam.y, 1.0);
    for (const auto& p : fam.perturbations) {
        double w = std::pow(u, p.order);
        e.x.add(p.dx, w);
        e.y.add(p.dy, w);
    }
    return e;
}

/// f(t) = <gamma(t) - c, gamma(t) - c> as a Taylor series about t0.
inline Taylor dist_sq_series(const mss::CurveFamily& fam, double t0, double u,
                             mss::MinkVec c) {
    EffCoords e = effective_coords(fam, u);
    Taylor X = e.x.series(t0), Y = e.y.series(t0);
    X.c[0] -= c.u0;
    Y.c[0] -= c.u1;
    return taylor_sub(taylor_mul(Y, Y), taylor_mul(X, X));
}

/// (f, f', ..., f^(5)) at (t0, u, c): k! times the series coefficients.
inline std::array<double, 6> oracle_dist_derivs(const mss::CurveFamily& fam,
                                                double t0, double u,
                                                mss::MinkVec c) {
    Taylor f = dist_sq_series(fam, t0, u, c);
    std::array<double, 6> out{};
    double fact = 1.0;
    for (int k = 0; k < 6; ++k) {
        if (k > 0) fact *= k;
        out[k] = f.c[k] * fact;
    }
    return out;
}

/// Dense Gaussian elimination with partial pivoting; returns false on a
/// pivot below 1e-14 of the column magnitude.
inline bool gauss(std::vector<std::vector<double>> A, std::vector<double> b,
                  std::vector<double>& x) {
    int n = int(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        if (std::fabs(A[piv][col]) < 1e-14) return false;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < n; ++r) {
            double m = A[r][col] / A[col][col];
            for (int cc = col; cc < n; ++cc) A[r][cc] -= m * A[col][cc];
            b[r] -= m * b[col];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int cc = r + 1; cc < n; ++cc) s -= A[r][cc] * x[cc];
        x[r] = s / A[r][r];
    }
    return true;
}

struct NewtonResult {
    bool ok = false;
    std::vector<double> x;
    double resid = 0.0;
    int iters = 0;
};

/// Damped Newton with central-difference Jacobian. Square systems only.
inline NewtonResult newton_solve(
    const std::function<std::vector<double>(const std::vector<double>&)>& F,
    std::vector<double> x0, double tol = 1e-12, int max_iter = 60,
    double fd_h = 1e-7) {
    int n = int(x0.size());
    NewtonResult res;
    res.x = std::move(x0);
    auto max_abs = [](const std::vector<double>& v) {
        double b = 0.0;
        for (double e : v) b = std::fmax(b, std::fabs(e));
        return b;
    };
    std::vector<double> Fx = F(res.x);
    res.resid = max_abs(Fx);
    for (int it = 0; it < max_iter; ++it) {
        res.iters = it;
        if (res.resid <= tol) {
            res.ok = true;
            return res;
        }
        std::vector<std::vector<double>> J(n, std::vector<double>(n));
        for (int j = 0; j < n; ++j) {
            std::vector<double> xp = res.x, xm = res.x;
            xp[j] += fd_h;
            xm[j] -= fd_h;
            std::vector<double> Fp = F(xp), Fm = F(xm);
            for (int i = 0; i < n; ++i) J[i][j] = (Fp[i] - Fm[i]) / (2 * fd_h);
        }
        std::vector<double> rhs(n), step;
        for (int i = 0; i < n; ++i) rhs[i] = -Fx[i];
        if (!gauss(J, rhs, step)) return res;
        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half < 12; ++half) {
            std::vector<double> trial = res.x;
            for (int i = 0; i < n; ++i) trial[i] += lambda * step[i];
            std::vector<double> Ft = F(trial);
            double tr = max_abs(Ft);
            if (tr < res.resid || tr <= tol) {
                res.x = std::move(trial);
                Fx = std::move(Ft);
                res.resid = tr;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) return res;
    }
    res.ok = res.resid <= tol;
    return res;
}

/// Defining systems of the five transition kinds, built on the Taylor
/// oracle. Unknown layouts match the library's seed layout: contact
/// parameters, then center, then u.
inline std::vector<double> event_system(const mss::CurveFamily& fam,
                                        mss::EventKind kind,
                                        const std::vector<double>& x);

} // namespace th

#include "mss/transitions.hpp"

namespace th {

inline std::vector<double> event_system(const mss::CurveFamily& fam,
                                        mss::EventKind kind,
                                        const std::vector<double>& x) {
    using mss::EventKind;
    auto fd = [&](double t, mss::MinkVec c, double u) {
        return oracle_dist_derivs(fam, t, u, c);
    };
    switch (kind) {
        case EventKind::A2_2: {
            mss::MinkVec c{x[2], x[3]};
            auto d1 = fd(x[0], c, x[4]), d2 = fd(x[1], c, x[4]);
            return {d1[1], d1[2], d2[1], d2[2], d1[0] - d2[0]};
        }
        case EventKind::A4: {
            mss::MinkVec c{x[1], x[2]};
            auto d = fd(x[0], c, x[3]);
            return {d[1], d[2], d[3], d[4]};
        }
        case EventKind::A1_2A2: {
            mss::MinkVec c{x[3], x[4]};
            auto d1 = fd(x[0], c, x[5]), d2 = fd(x[1], c, x[5]),
                 d3 = fd(x[2], c, x[5]);
            return {d1[1], d1[2], d2[1], d3[1], d2[0] - d1[0], d3[0] - d1[0]};
        }
        case EventKind::A1A3: {
            mss::MinkVec c{x[2], x[3]};
            auto d1 = fd(x[0], c, x[4]), d2 = fd(x[1], c, x[4]);
            return {d1[1], d1[2], d1[3], d2[1], d2[0] - d1[0]};
        }
        default: { // A1_4
            mss::MinkVec c{x[4], x[5]};
            auto d1 = fd(x[0], c, x[6]), d2 = fd(x[1], c, x[6]),
                 d3 = fd(x[2], c, x[6]), d4 = fd(x[3], c, x[6]);
            return {d1[1], d2[1],          d3[1],
                    d4[1], d1[0] - d4[0], d2[0] - d4[0],
                    d3[0] - d4[0]};
        }
    }
}

/// Refine an event seed against the Taylor-oracle system; returns the
/// converged unknown vector (t..., c0, c1, u).
inline NewtonResult oracle_refine(const mss::CurveFamily& fam,
                                  mss::EventKind kind, std::vector<double> x0,
                                  double tol = 1e-12) {
    return newton_solve(
        [&fam, kind](const std::vector<double>& x) {
            return event_system(fam, kind, x);
        },
        std::move(x0), tol);
}

} // namespace th
