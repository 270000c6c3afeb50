#include "mss/mss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "mss/errors.hpp"

namespace mss {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

double wrap_2pi(double t) {
    double w = std::fmod(t, two_pi);
    return w < 0.0 ? w + two_pi : w;
}

/// Distance on the parameter circle.
double circle_gap(double t1, double t2) {
    double d = std::fabs(wrap_2pi(t2) - wrap_2pi(t1));
    return std::fmin(d, two_pi - d);
}

struct Row2 {
    double a0, a1, b;
};

Row2 normal_row(const Jet& jet) {
    // <gamma - c, gamma'> = 0  ->  -x0'*c0 + x1'*c1 = <gamma', gamma>
    return {-jet.d[1].u0, jet.d[1].u1, pseudo_dot(jet.d[1], jet.d[0])};
}

std::optional<MinkVec> solve_center(const Jet& j1, const Jet& j2,
                                    double parallel_tol, double* det_out) {
    Row2 r1 = normal_row(j1), r2 = normal_row(j2);
    double det = r1.a0 * r2.a1 - r1.a1 * r2.a0;
    if (det_out) *det_out = det;
    double row_scale = euclid_norm(j1.d[1]) * euclid_norm(j2.d[1]);
    if (!(std::fabs(det) > parallel_tol * std::fmax(row_scale, 1e-300)))
        return std::nullopt;
    return MinkVec{(r1.b * r2.a1 - r2.b * r1.a1) / det,
                   (r1.a0 * r2.b - r2.a0 * r1.b) / det};
}

double f_value_at(const Jet& jet, MinkVec c) {
    MinkVec w = jet.d[0] - c;
    return pseudo_dot(w, w);
}

bool near_lightlike_rel(MinkVec d1, double eps_rel) {
    double q = pseudo_dot(d1, d1);
    double e2 = d1.u0 * d1.u0 + d1.u1 * d1.u1;
    return std::fabs(q) <= eps_rel * std::fmax(1.0, e2);
}

/// Short-arc midpoint of a canonical pair t1 < t2.
double pair_midpoint(double t1, double t2) {
    double d = t2 - t1;
    if (d <= two_pi / 2) return t1 + 0.5 * d;
    return wrap_2pi(t2 + 0.5 * (two_pi - d));
}

} // namespace

const char* to_string(LocalLabel l) {
    switch (l) {
        case LocalLabel::A1A1: return "A1A1";
        case LocalLabel::A2A1: return "A2A1";
        case LocalLabel::A3: return "A3";
        case LocalLabel::A1cubed: return "A1cubed";
        case LocalLabel::NearLightlike: return "NearLightlike";
        default: return "NearDiagonal";
    }
}

std::optional<MinkVec> try_normal_center(const CurveFamily& curve, double t1,
                                         double t2, double u,
                                         const Config& cfg) {
    Jet j1 = curve.jet(t1, u, 1), j2 = curve.jet(t2, u, 1);
    return solve_center(j1, j2, cfg.parallel_tol, nullptr);
}

MinkVec normal_center(const CurveFamily& curve, double t1, double t2,
                      double u, const Config& cfg) {
    auto c = try_normal_center(curve, t1, t2, u, cfg);
    if (!c) throw ParallelNormals("normal_center: normal lines are parallel");
    return *c;
}

std::optional<double> try_bitangency_residual(const CurveFamily& curve,
                                              double t1, double t2, double u,
                                              const Config& cfg) {
    Jet j1 = curve.jet(t1, u, 1), j2 = curve.jet(t2, u, 1);
    auto c = solve_center(j1, j2, cfg.parallel_tol, nullptr);
    if (!c) return std::nullopt;
    return f_value_at(j1, *c) - f_value_at(j2, *c);
}

double bitangency_residual(const CurveFamily& curve, double t1, double t2,
                           double u, const Config& cfg) {
    auto g = try_bitangency_residual(curve, t1, t2, u, cfg);
    if (!g) throw ParallelNormals("bitangency_residual: parallel normals");
    return *g;
}

ContactPoint make_contact_point(const CurveFamily& curve, double u, double t,
                                const PseudoCircle& circle, const Config& cfg,
                                double scale,
                                std::vector<std::string>* flags) {
    Jet jet = curve.jet(t, u, 5);
    ContactPoint cp;
    cp.t = wrap_2pi(t);
    cp.point = jet.d[0];
    cp.tangent_type = causal_type(jet.d[1], cfg.eps_light_rel);
    cp.near_lightlike = near_lightlike_rel(jet.d[1], 1e-9);
    auto co = contact_order(jet, circle.center, cfg.tol, cfg.gap_factor);
    cp.order = (co.kind == ContactKind::Order) ? co.order : 0;
    if (!cp.near_lightlike) {
        cp.kappa = minkowski_curvature(jet, cfg.eps_light_rel);
        cp.kappa_prime = curvature_arclength_derivative(jet, cfg.eps_light_rel);
    }
    if (circle.kind != CircleKind::LC) {
        try {
            cp.branch =
                branch_of(circle, cp.point, cfg.tol * std::fmax(1.0, scale));
        } catch (const Error&) {
            if (flags) flags->push_back("BranchUndecided");
        }
    }
    return cp;
}

std::optional<MssPoint> make_mss_point(const CurveFamily& curve, double t1,
                                       double t2, double u, const Config& cfg,
                                       double scale) {
    if (scale <= 0.0) scale = curve_scale(curve, u);
    double w1 = wrap_2pi(t1), w2 = wrap_2pi(t2);
    if (w1 > w2) std::swap(w1, w2);
    Jet j1 = curve.jet(w1, u, 1), j2 = curve.jet(w2, u, 1);
    auto c = solve_center(j1, j2, cfg.parallel_tol, nullptr);
    if (!c) return std::nullopt;

    MssPoint p;
    p.t1 = w1;
    p.t2 = w2;
    p.center = *c;
    double f1 = f_value_at(j1, *c), f2 = f_value_at(j2, *c);
    p.f_value = 0.5 * (f1 + f2);
    p.circle = make_circle(*c, p.f_value, cfg.eps_light_rel, scale);
    p.contacts.push_back(
        make_contact_point(curve, u, w1, p.circle, cfg, scale, &p.flags));
    p.contacts.push_back(
        make_contact_point(curve, u, w2, p.circle, cfg, scale, &p.flags));
    p.medial = medial_flag(p);
    return p;
}

bool medial_flag(const MssPoint& p) {
    if (p.circle.kind == CircleKind::LC) return false;
    if (p.contacts.empty()) return false;
    for (const auto& cp : p.contacts)
        if (!cp.branch) return false;
    for (std::size_t i = 1; i < p.contacts.size(); ++i)
        if (*p.contacts[i].branch != *p.contacts[0].branch) return false;
    return true;
}

std::vector<TangencyRoot> tangency_roots(const CurveFamily& curve, double u,
                                         MinkVec c, int grid_n,
                                         double bisect_tol) {
    auto fprime = [&](double t) {
        MinkVec p = curve.derivative(t, u, 0);
        MinkVec d1 = curve.derivative(t, u, 1);
        return 2.0 * pseudo_dot(d1, p - c);
    };
    std::vector<TangencyRoot> roots;
    int n = std::max(grid_n, 16);
    double h = two_pi / n;
    double prev = fprime(0.0);
    for (int i = 0; i < n; ++i) {
        double next = fprime((i + 1) * h);
        bool hit = prev == 0.0;
        double lo = i * h, hi = (i + 1) * h;
        if (!hit && (prev < 0.0) != (next < 0.0)) {
            double flo = prev;
            while (hi - lo > bisect_tol) {
                double mid = 0.5 * (lo + hi);
                double fm = fprime(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((flo < 0.0) == (fm < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            hit = true;
        } else if (hit) {
            hi = lo;
        }
        if (hit) {
            double t = wrap_2pi(0.5 * (lo + hi));
            Jet jet = curve.jet(t, u, 2);
            MinkVec w = jet.d[0] - c;
            TangencyRoot r;
            r.t = t;
            r.f = pseudo_dot(w, w);
            r.fpp = 2.0 * pseudo_dot(jet.d[1], jet.d[1]) +
                    2.0 * pseudo_dot(jet.d[2], w);
            if (roots.empty() || circle_gap(roots.back().t, r.t) > 1e-9)
                roots.push_back(r);
        }
        prev = next;
    }
    if (roots.size() > 1 && circle_gap(roots.front().t, roots.back().t) < 1e-9)
        roots.pop_back();
    return roots;
}

LocalLabel label_mss_point(const CurveFamily& curve, double u, MssPoint& p,
                           const Config& cfg, double scale) {
    if (scale <= 0.0) scale = curve_scale(curve, u);
    auto set = [&](LocalLabel l) {
        p.label = l;
        return l;
    };
    for (const auto& cp : p.contacts)
        if (cp.near_lightlike) return set(LocalLabel::NearLightlike);

    double h = two_pi / std::max(cfg.grid_n, 64);
    double gap = circle_gap(p.t1, p.t2);
    if (gap < (cfg.diag_cells + 2.0) * h) {
        // Contacts almost merged: A3 when the midpoint carries the contact.
        double mid = pair_midpoint(p.t1, p.t2);
        auto co = contact_order(curve, mid, u, p.center, cfg.tol,
                                cfg.gap_factor);
        if (co.kind == ContactKind::Order && co.order >= 3)
            return set(LocalLabel::A3);
        // Branch endpoint: the short contact interval straddles a curvature
        // vertex, where the merged contact has order 3.
        try {
            double k1 = curvature_arclength_derivative(curve, p.t1, u);
            double k2 = curvature_arclength_derivative(curve, p.t2, u);
            if (k1 == 0.0 || k2 == 0.0 || (k1 < 0.0) != (k2 < 0.0))
                return set(LocalLabel::A3);
        } catch (const Error&) {
        }
        return set(LocalLabel::NearDiagonal);
    }

    bool ambiguous = false;
    for (const auto& cp : p.contacts) {
        if (cp.order >= 3) return set(LocalLabel::A3);
        if (cp.order == 0) ambiguous = true;
    }
    for (const auto& cp : p.contacts)
        if (cp.order == 2) return set(LocalLabel::A2A1);
    if (ambiguous && std::find(p.flags.begin(), p.flags.end(),
                               "NearTransition") == p.flags.end())
        p.flags.push_back("NearTransition");

    // A third tangency with the same value promotes the point to A1cubed.
    auto roots = tangency_roots(curve, u, p.center, cfg.label_grid_n,
                                cfg.root_bisect_tol);
    double f_tol = cfg.tol * std::fmax(scale * scale, std::fabs(p.f_value));
    double t_excl = 2.0 * two_pi / std::max(cfg.label_grid_n, 16);
    for (const auto& r : roots) {
        if (circle_gap(r.t, p.t1) < t_excl || circle_gap(r.t, p.t2) < t_excl)
            continue;
        if (std::fabs(r.f - p.f_value) <= f_tol)
            return set(LocalLabel::A1cubed);
    }
    return set(LocalLabel::A1A1);
}

// ---------------------------------------------------------------------------
// Tracing. Strip coordinates (a, d) with t1 = a, t2 = a + d; a runs around
// the full circle, d in [delta_diag, pi]. The strip hits every unordered
// pair once because d and 2*pi - d describe the same pair set.

namespace {

struct EdgeRef {
    int type; // 0: horizontal (varying a), 1: vertical (varying d)
    int i, j; // lower-left node of the edge
};

long long edge_id(const EdgeRef& e, int n) {
    int iw = (e.i % n + n) % n;
    return (static_cast<long long>(e.j) * n + iw) * 2 + e.type;
}

struct MaskedCell {
    int i, j;
    int reason; // 1 lightlike, 2 parallel, 3 pole
};

/// Cusps of the symmetry set carry f'' = 0 at one contact. Where the sign
/// of f'' at a contact flips between consecutive chain vertices, solve
/// {g(t1,t2) = 0, f''(t_side) = 0} by damped Newton and insert the refined
/// point; it then labels as A2A1 with its center on the caustic.
void insert_cusp_points(const CurveFamily& curve, double u, const Config& cfg,
                        TraceResult& out) {
    double h = two_pi / out.grid_n;
    double s2 = out.scale * out.scale;
    double g_accept = cfg.refine_g_tol * s2;
    double fpp_accept = 1e-8 * s2;
    double drift_lim = 1.25 * h;

    auto fpp_at = [&](double t, const MinkVec& c) {
        Jet jet = curve.jet(t, u, 2);
        MinkVec w = jet.d[0] - c;
        return 2.0 * pseudo_dot(jet.d[1], jet.d[1]) +
               2.0 * pseudo_dot(jet.d[2], w);
    };
    auto side_fpp = [&](const MssPoint& p, int side) {
        return fpp_at(side == 0 ? p.t1 : p.t2, p.center);
    };
    auto eval = [&](double a, double b, int side, double* F) -> bool {
        auto g = try_bitangency_residual(curve, a, b, u, cfg);
        auto c = try_normal_center(curve, a, b, u, cfg);
        if (!g || !c || !std::isfinite(*g)) return false;
        F[0] = *g;
        F[1] = fpp_at(side == 0 ? a : b, *c);
        return std::isfinite(F[1]);
    };

    auto refine = [&](double x0, double y0,
                      int side) -> std::optional<std::pair<double, double>> {
        double x = x0, y = y0;
        double F[2];
        if (!eval(x, y, side, F)) return std::nullopt;
        for (int it = 0; it < 40; ++it) {
            if (std::fabs(F[0]) <= g_accept && std::fabs(F[1]) <= fpp_accept)
                break;
            double hh = 1e-7, Fx[2], Fy[2];
            if (!eval(x + hh, y, side, Fx) || !eval(x, y + hh, side, Fy))
                return std::nullopt;
            double a11 = (Fx[0] - F[0]) / hh, a12 = (Fy[0] - F[0]) / hh;
            double a21 = (Fx[1] - F[1]) / hh, a22 = (Fy[1] - F[1]) / hh;
            double det = a11 * a22 - a12 * a21;
            if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
            double dx = (F[0] * a22 - a12 * F[1]) / det;
            double dy = (a11 * F[1] - F[0] * a21) / det;
            double lam = 1.0;
            bool stepped = false;
            for (int hv = 0; hv < 8 && !stepped; ++hv, lam *= 0.5) {
                double Fn[2];
                if (eval(x - lam * dx, y - lam * dy, side, Fn) &&
                    std::fabs(Fn[0]) + std::fabs(Fn[1]) <
                        std::fabs(F[0]) + std::fabs(F[1])) {
                    x -= lam * dx;
                    y -= lam * dy;
                    F[0] = Fn[0];
                    F[1] = Fn[1];
                    stepped = true;
                }
            }
            if (!stepped) return std::nullopt;
        }
        if (std::fabs(F[0]) > g_accept || std::fabs(F[1]) > fpp_accept)
            return std::nullopt;
        if (circle_gap(x, x0) > drift_lim || circle_gap(y, y0) > drift_lim)
            return std::nullopt;
        return std::make_pair(x, y);
    };

    auto skip_label = [](const MssPoint& p) {
        return p.label == LocalLabel::NearDiagonal ||
               p.label == LocalLabel::NearLightlike;
    };
    auto near_pair = [](const MssPoint& a, const MssPoint& b) {
        return circle_gap(a.t1, b.t1) < 1e-9 && circle_gap(a.t2, b.t2) < 1e-9;
    };

    auto try_edge = [&](const MssPoint& A,
                        const MssPoint& B) -> std::optional<MssPoint> {
        if (skip_label(A) || skip_label(B)) return std::nullopt;
        for (int side = 0; side < 2; ++side) {
            double sa = side_fpp(A, side), sb = side_fpp(B, side);
            if (!std::isfinite(sa) || !std::isfinite(sb)) continue;
            if (sa == 0.0 || sb == 0.0 || (sa < 0.0) == (sb < 0.0)) continue;
            double x0 = A.t1 + 0.5 * std::remainder(B.t1 - A.t1, two_pi);
            double y0 = A.t2 + 0.5 * std::remainder(B.t2 - A.t2, two_pi);
            auto sol = refine(x0, y0, side);
            if (!sol) continue;
            auto p = make_mss_point(curve, sol->first, sol->second, u, cfg,
                                    out.scale);
            if (!p) continue;
            label_mss_point(curve, u, *p, cfg, out.scale);
            if (p->label != LocalLabel::A2A1) continue;
            if (near_pair(*p, A) || near_pair(*p, B)) continue;
            return p;
        }
        return std::nullopt;
    };

    for (auto& br : out.branches) {
        std::vector<MssPoint> withc;
        withc.reserve(br.points.size() + 4);
        for (std::size_t i = 0; i < br.points.size(); ++i) {
            if (i > 0)
                if (auto c = try_edge(br.points[i - 1], br.points[i]))
                    withc.push_back(std::move(*c));
            withc.push_back(br.points[i]);
        }
        if (br.closed && br.points.size() > 2)
            if (auto c = try_edge(br.points.back(), br.points.front()))
                withc.push_back(std::move(*c));
        br.points = std::move(withc);
    }
}

} // namespace

TraceResult trace_mss(const CurveFamily& curve, double u, const Config& cfg) {
    TraceResult out;
    int n = std::max(cfg.grid_n, 64);
    if (n % 2) ++n; // the top row d = pi must align with the grid
    double h = two_pi / n;
    int j_lo = std::max(1, static_cast<int>(std::lround(cfg.diag_cells)));
    int j_hi = n / 2;
    out.grid_n = n;
    out.delta_diag = j_lo * h;
    out.scale = curve_scale(curve, u);
    double g_accept = cfg.refine_g_tol * out.scale * out.scale;

    auto lights = lightlike_points(curve, u, cfg);
    std::vector<char> lmask(n, 0);
    double ll_band = cfg.lightlike_mask_cells * h;
    for (int i = 0; i < n; ++i)
        for (double L : lights)
            if (circle_gap(i * h, L) <= ll_band) {
                lmask[i] = 1;
                break;
            }

    int rows = j_hi - j_lo + 1;
    std::vector<double> G(static_cast<std::size_t>(rows) * n, 0.0);
    std::vector<int> M(G.size(), 0);
    auto idx = [&](int i, int j) {
        return static_cast<std::size_t>(j - j_lo) * n + ((i % n + n) % n);
    };

    for (int j = j_lo; j <= j_hi; ++j) {
        for (int i = 0; i < n; ++i) {
            if (lmask[i] || lmask[(i + j) % n]) {
                M[idx(i, j)] = 1;
                continue;
            }
            auto g = try_bitangency_residual(curve, i * h, (i + j) * h, u, cfg);
            if (!g || !std::isfinite(*g)) {
                M[idx(i, j)] = 2;
                continue;
            }
            G[idx(i, j)] = *g;
        }
    }

    auto g_at = [&](double a, double d) {
        return try_bitangency_residual(curve, a, a + d, u, cfg);
    };

    std::map<long long, int> edge_vertex; // -1 marks a rejected refinement
    std::vector<std::pair<double, double>> verts;

    auto refine_edge = [&](const EdgeRef& e) -> int {
        long long key = edge_id(e, n);
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;

        double a0 = e.i * h, d0 = e.j * h;
        auto eval = [&](double s) {
            return e.type == 0 ? g_at(a0 + s * h, d0) : g_at(a0, d0 + s * h);
        };
        double lo = 0.0, hi = 1.0;
        double glo = G[idx(e.i, e.j)];
        int result = -1;
        bool failed = false;
        while ((hi - lo) * h > cfg.root_bisect_tol) {
            double mid = 0.5 * (lo + hi);
            auto gm = eval(mid);
            if (!gm || !std::isfinite(*gm)) {
                failed = true;
                break;
            }
            if (*gm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((glo < 0.0) == (*gm < 0.0)) {
                lo = mid;
                glo = *gm;
            } else {
                hi = mid;
            }
        }
        if (!failed) {
            double s = 0.5 * (lo + hi);
            auto gv = eval(s);
            if (gv && std::isfinite(*gv) && std::fabs(*gv) <= g_accept) {
                verts.emplace_back(e.type == 0 ? a0 + s * h : a0,
                                   e.type == 0 ? d0 : d0 + s * h);
                result = static_cast<int>(verts.size()) - 1;
            }
        }
        edge_vertex[key] = result;
        return result;
    };

    // Edge ids within a cell: 0 bottom, 1 right, 2 top, 3 left. Rows of the
    // table: two crossing edges per corner-sign code; -2 marks the two
    // saddle codes resolved by the center sample.
    static const int seg_table[16][2] = {
        {-1, -1}, {0, 3}, {0, 1}, {3, 1}, {1, 2}, {-2, -2}, {0, 2}, {3, 2},
        {3, 2},   {0, 2}, {-2, -2}, {1, 2}, {3, 1}, {0, 1}, {0, 3}, {-1, -1}};

    std::vector<MaskedCell> masked_cells;
    std::vector<std::pair<int, int>> segments;

    for (int j = j_lo; j < j_hi; ++j) {
        for (int i = 0; i < n; ++i) {
            int m = std::max(std::max(M[idx(i, j)], M[idx(i + 1, j)]),
                             std::max(M[idx(i, j + 1)], M[idx(i + 1, j + 1)]));
            if (m != 0) {
                masked_cells.push_back({i, j, m});
                continue;
            }
            int code = (G[idx(i, j)] > 0.0 ? 1 : 0) |
                       (G[idx(i + 1, j)] > 0.0 ? 2 : 0) |
                       (G[idx(i + 1, j + 1)] > 0.0 ? 4 : 0) |
                       (G[idx(i, j + 1)] > 0.0 ? 8 : 0);
            if (code == 0 || code == 15) continue;

            int pairs[2][2];
            int n_segs = 1;
            if (seg_table[code][0] == -2) {
                auto gc = g_at((i + 0.5) * h, (j + 0.5) * h);
                if (!gc || !std::isfinite(*gc)) {
                    masked_cells.push_back({i, j, 3});
                    continue;
                }
                bool cpos = *gc > 0.0;
                n_segs = 2;
                if ((code == 5) == cpos) {
                    pairs[0][0] = 0; pairs[0][1] = 1;
                    pairs[1][0] = 2; pairs[1][1] = 3;
                } else {
                    pairs[0][0] = 0; pairs[0][1] = 3;
                    pairs[1][0] = 1; pairs[1][1] = 2;
                }
            } else {
                pairs[0][0] = seg_table[code][0];
                pairs[0][1] = seg_table[code][1];
            }

            auto edge_of = [&](int local) -> EdgeRef {
                switch (local) {
                    case 0: return {0, i, j};
                    case 1: return {1, i + 1, j};
                    case 2: return {0, i, j + 1};
                    default: return {1, i, j};
                }
            };

            bool bad = false;
            std::pair<int, int> cell_segs[2];
            for (int s = 0; s < n_segs; ++s) {
                int va = refine_edge(edge_of(pairs[s][0]));
                int vb = refine_edge(edge_of(pairs[s][1]));
                if (va < 0 || vb < 0) {
                    bad = true;
                    break;
                }
                cell_segs[s] = {va, vb};
            }
            if (bad) {
                masked_cells.push_back({i, j, 3});
                continue;
            }
            for (int s = 0; s < n_segs; ++s) segments.push_back(cell_segs[s]);
        }
    }

    out.masked_cell_count = masked_cells.size();

    // Merge masked cells row-wise into reported boxes.
    std::size_t k = 0;
    while (k < masked_cells.size()) {
        std::size_t e = k;
        while (e + 1 < masked_cells.size() &&
               masked_cells[e + 1].j == masked_cells[k].j &&
               masked_cells[e + 1].i == masked_cells[e].i + 1 &&
               masked_cells[e + 1].reason == masked_cells[k].reason)
            ++e;
        const auto& c0 = masked_cells[k];
        const auto& c1 = masked_cells[e];
        MaskedBox box;
        box.t1_lo = c0.i * h;
        box.t1_hi = (c1.i + 1) * h;
        box.t2_lo = (c0.i + c0.j) * h;
        box.t2_hi = (c1.i + 1 + c1.j + 1) * h;
        box.reason = c0.reason == 1   ? "lightlike"
                     : c0.reason == 2 ? "parallel"
                                      : "pole";
        out.masked_boxes.push_back(box);
        k = e + 1;
    }

    // Chain segments into polylines; every vertex has degree <= 2.
    std::size_t nv = verts.size();
    std::vector<std::array<int, 2>> adj(nv, {-1, -1});
    auto link = [&](int v, int w) {
        if (adj[v][0] == -1) adj[v][0] = w;
        else if (adj[v][1] == -1 && adj[v][0] != w) adj[v][1] = w;
    };
    for (auto& s : segments) {
        if (s.first == s.second) continue;
        link(s.first, s.second);
        link(s.second, s.first);
    }

    std::vector<char> used(nv, 0);
    struct Chain {
        std::vector<int> ids;
        bool closed;
    };
    std::vector<Chain> chains;

    auto walk = [&](int start) {
        Chain chain{{start}, false};
        used[start] = 1;
        int prev = -1, cur = start;
        while (true) {
            int nxt = -1;
            for (int cand : adj[cur])
                if (cand != -1 && cand != prev && !used[cand]) {
                    nxt = cand;
                    break;
                }
            if (nxt == -1) {
                chain.closed = chain.ids.size() > 2 &&
                               (adj[cur][0] == start || adj[cur][1] == start);
                return chain;
            }
            used[nxt] = 1;
            chain.ids.push_back(nxt);
            prev = cur;
            cur = nxt;
        }
    };

    for (std::size_t v = 0; v < nv; ++v) {
        int deg = (adj[v][0] != -1) + (adj[v][1] != -1);
        if (deg == 1 && !used[v]) chains.push_back(walk(static_cast<int>(v)));
    }
    for (std::size_t v = 0; v < nv; ++v) {
        int deg = (adj[v][0] != -1) + (adj[v][1] != -1);
        if (deg == 2 && !used[v]) chains.push_back(walk(static_cast<int>(v)));
    }

    for (auto& chain : chains) {
        std::vector<MssPoint> pts;
        bool closed = chain.closed;
        for (int vid : chain.ids) {
            auto [a, d] = verts[vid];
            auto p = make_mss_point(curve, a, a + d, u, cfg, out.scale);
            if (!p) {
                if (pts.size() >= 2)
                    out.branches.push_back({std::move(pts), false});
                pts.clear();
                closed = false;
                continue;
            }
            label_mss_point(curve, u, *p, cfg, out.scale);
            pts.push_back(std::move(*p));
        }
        if (pts.size() >= 2) out.branches.push_back({std::move(pts), closed});
    }

    insert_cusp_points(curve, u, cfg, out);

    return out;
}

DenseMap oracle_grid(const CurveFamily& curve, double u, int n,
                     const Config& cfg) {
    DenseMap map;
    map.n = n;
    map.diag_band = std::fmax(cfg.diag_cells, 1.0) * two_pi / n;
    double nan = std::numeric_limits<double>::quiet_NaN();
    map.g.assign(static_cast<std::size_t>(n) * n, nan);
    map.det.assign(map.g.size(), nan);

    double h = two_pi / n;
    auto lights = lightlike_points(curve, u, cfg);
    std::vector<char> lmask(n, 0);
    double ll_band = cfg.lightlike_mask_cells * h;
    for (int i = 0; i < n; ++i)
        for (double L : lights)
            if (circle_gap(i * h, L) <= ll_band) {
                lmask[i] = 1;
                break;
            }

    std::vector<Jet> jets;
    jets.reserve(n);
    for (int i = 0; i < n; ++i) jets.push_back(curve.jet(i * h, u, 1));

    for (int i = 0; i < n; ++i) {
        if (lmask[i]) continue;
        for (int j = i + 1; j < n; ++j) {
            if (lmask[j]) continue;
            if (circle_gap(i * h, j * h) < map.diag_band) continue;
            double det = 0.0;
            auto c = solve_center(jets[i], jets[j], cfg.parallel_tol, &det);
            std::size_t id = static_cast<std::size_t>(i) * n + j;
            map.det[id] = det;
            if (!c) continue;
            double g = f_value_at(jets[i], *c) - f_value_at(jets[j], *c);
            if (std::isfinite(g)) map.g[id] = g;
        }
    }
    return map;
}

} // namespace mss
