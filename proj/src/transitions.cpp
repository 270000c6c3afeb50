#include "mss/transitions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "mss/contact.hpp"
#include "mss/errors.hpp"

namespace mss {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;
constexpr double inf = std::numeric_limits<double>::infinity();

double wrap_2pi(double t) {
    double w = std::fmod(t, two_pi);
    return w < 0.0 ? w + two_pi : w;
}

double circle_gap(double t1, double t2) {
    double d = std::fabs(wrap_2pi(t2) - wrap_2pi(t1));
    return std::fmin(d, two_pi - d);
}

int contact_count(EventKind k) {
    switch (k) {
        case EventKind::A1_4: return 4;
        case EventKind::A2_2: return 2;
        case EventKind::A1_2A2: return 3;
        case EventKind::A1A3: return 2;
        default: return 1;
    }
}

/// Defining equations: tangency derivatives per contact plus equal-value
/// constraints against contact 0.
struct SystemShape {
    // (contact index, derivative order) rows, then (i, 0) value rows.
    std::vector<std::pair<int, int>> deriv_eqs;
    std::vector<int> value_eqs; // f(t_i) - f(t_0) = 0
};

SystemShape system_shape(EventKind k) {
    switch (k) {
        case EventKind::A1_4:
            return {{{0, 1}, {1, 1}, {2, 1}, {3, 1}}, {1, 2, 3}};
        case EventKind::A2_2:
            return {{{0, 1}, {0, 2}, {1, 1}, {1, 2}}, {1}};
        case EventKind::A1_2A2:
            return {{{0, 1}, {0, 2}, {1, 1}, {2, 1}}, {1, 2}};
        case EventKind::A1A3:
            return {{{0, 1}, {0, 2}, {0, 3}, {1, 1}}, {1}};
        default: // A4
            return {{{0, 1}, {0, 2}, {0, 3}, {0, 4}}, {}};
    }
}

/// Expected contact order per solved parameter, index-aligned with seeds.
std::vector<int> expected_orders(EventKind k) {
    switch (k) {
        case EventKind::A1_4: return {1, 1, 1, 1};
        case EventKind::A2_2: return {2, 2};
        case EventKind::A1_2A2: return {2, 1, 1};
        case EventKind::A1A3: return {3, 1};
        default: return {4};
    }
}

/// Gaussian elimination with partial pivoting; a is row-major n x n,
/// overwritten. Returns false on a vanishing pivot.
bool gauss_solve(std::vector<double> a, std::vector<double> b, int n,
                 std::vector<double>& x) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col]))
                piv = r;
        if (a[piv * n + col] == 0.0) return false;
        if (piv != col) {
            for (int cc = 0; cc < n; ++cc)
                std::swap(a[col * n + cc], a[piv * n + cc]);
            std::swap(b[col], b[piv]);
        }
        for (int r = col + 1; r < n; ++r) {
            double m = a[r * n + col] / a[col * n + col];
            if (m == 0.0) continue;
            for (int cc = col; cc < n; ++cc) a[r * n + cc] -= m * a[col * n + cc];
            b[r] -= m * b[col];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int cc = r + 1; cc < n; ++cc) s -= a[r * n + cc] * x[cc];
        x[r] = s / (a[r * n + r] + 0.0);
        if (!std::isfinite(x[r])) return false;
    }
    return true;
}

double inf_norm_rows(const std::vector<double>& a, int n) {
    double best = 0.0;
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) s += std::fabs(a[r * n + c]);
        best = std::fmax(best, s);
    }
    return best;
}

/// Condition estimate via the explicit inverse; n <= 7 keeps this cheap.
double condition_estimate(const std::vector<double>& a, int n) {
    std::vector<double> inv(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> col;
    for (int c = 0; c < n; ++c) {
        std::vector<double> e(n, 0.0);
        e[c] = 1.0;
        if (!gauss_solve(a, e, n, col)) return inf;
        for (int r = 0; r < n; ++r) inv[r * n + c] = col[r];
    }
    return inf_norm_rows(a, n) * inf_norm_rows(inv, n);
}

struct SystemEval {
    std::vector<double> F;
    std::vector<double> J; // row-major (m+3)^2
    bool ok = false;
};

SystemEval eval_system(const CurveFamily& curve, EventKind kind,
                       const std::vector<double>& x, bool want_jacobian) {
    SystemShape shape = system_shape(kind);
    int m = contact_count(kind);
    int nn = m + 3;
    SystemEval out;
    out.F.assign(nn, 0.0);
    if (want_jacobian) out.J.assign(static_cast<std::size_t>(nn) * nn, 0.0);

    MinkVec c{x[m], x[m + 1]};
    double u = x[m + 2];
    std::vector<Jet> jets(m), ujets(m);
    std::vector<DistDerivs> dd(m);
    try {
        for (int i = 0; i < m; ++i) {
            jets[i] = curve.jet(x[i], u, 5);
            if (want_jacobian) ujets[i] = curve.jet_du(x[i], u, 5);
            dd[i] = dist_sq_derivs(jets[i], c);
        }
    } catch (const Error&) {
        return out;
    }

    int row = 0;
    for (auto [i, j] : shape.deriv_eqs) {
        out.F[row] = dd[i].d[j - 1];
        if (want_jacobian) {
            double* J = out.J.data() + static_cast<std::size_t>(row) * nn;
            J[i] = dd[i].d[j]; // d f^(j) / d t_i = f^(j+1)
            J[m] = 2.0 * jets[i].d[j].u0;
            J[m + 1] = -2.0 * jets[i].d[j].u1;
            J[m + 2] = dist_deriv_du(jets[i], ujets[i], c, j);
        }
        ++row;
    }
    for (int i : shape.value_eqs) {
        out.F[row] = dd[i].f - dd[0].f;
        if (want_jacobian) {
            double* J = out.J.data() + static_cast<std::size_t>(row) * nn;
            J[i] = dd[i].d[0];
            J[0] -= dd[0].d[0];
            MinkVec wi = jets[i].d[0], w0 = jets[0].d[0];
            J[m] = 2.0 * (wi.u0 - w0.u0);
            J[m + 1] = -2.0 * (wi.u1 - w0.u1);
            J[m + 2] = dist_deriv_du(jets[i], ujets[i], c, 0) -
                       dist_deriv_du(jets[0], ujets[0], c, 0);
        }
        ++row;
    }
    for (double v : out.F)
        if (!std::isfinite(v)) return out;
    out.ok = true;
    return out;
}

double max_abs(const std::vector<double>& v) {
    double b = 0.0;
    for (double x : v) b = std::fmax(b, std::fabs(x));
    return b;
}

int order_rank(EventKind kind, int slot) {
    return expected_orders(kind)[slot];
}

} // namespace

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::A1_4: return "A1_4";
        case EventKind::A2_2: return "A2_2";
        case EventKind::A1_2A2: return "A1_2A2";
        case EventKind::A1A3: return "A1A3";
        default: return "A4";
    }
}

const char* to_string(Subtype s) {
    switch (s) {
        case Subtype::a: return "a";
        case Subtype::b: return "b";
        case Subtype::single: return "single";
        default: return "unclassified";
    }
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::NoConvergence: return "NoConvergence";
        default: return "DegenerateJacobian";
    }
}

SolveResult solve_event(const CurveFamily& family, const EventSeed& seed,
                        const Config& cfg) {
    int m = contact_count(seed.kind);
    if (static_cast<int>(seed.t.size()) != m)
        throw InputError("solve_event: seed has wrong contact count");
    int nn = m + 3;

    double scale = curve_scale(family, seed.u);
    double scale2 = scale * scale;

    std::vector<double> x(seed.t);
    x.push_back(seed.c.u0);
    x.push_back(seed.c.u1);
    x.push_back(seed.u);

    SolveResult res;
    double cur_res = inf;
    SystemEval cur = eval_system(family, seed.kind, x, true);
    if (!cur.ok) return res;
    cur_res = max_abs(cur.F);

    for (int iter = 0; iter < cfg.newton_max_iter; ++iter) {
        res.iterations = iter;
        if (cur_res / scale2 <= cfg.newton_tol) break;

        double cond = condition_estimate(cur.J, nn);
        res.condition = cond;
        if (!std::isfinite(cond) || cond > cfg.cond_limit) {
            res.status = SolveStatus::DegenerateJacobian;
            return res;
        }
        std::vector<double> rhs(cur.F);
        for (double& v : rhs) v = -v;
        std::vector<double> step;
        if (!gauss_solve(cur.J, rhs, nn, step)) {
            res.status = SolveStatus::DegenerateJacobian;
            return res;
        }

        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half <= cfg.newton_max_halvings; ++half) {
            std::vector<double> trial(x);
            for (int k = 0; k < nn; ++k) trial[k] += lambda * step[k];
            SystemEval te = eval_system(family, seed.kind, trial, true);
            if (te.ok) {
                double tr = max_abs(te.F);
                if (tr < cur_res * (1.0 - 0.25 * lambda) ||
                    tr / scale2 <= cfg.newton_tol) {
                    x = std::move(trial);
                    cur = std::move(te);
                    cur_res = tr;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!accepted) return res; // stagnated: NoConvergence
    }
    if (cur_res / scale2 > cfg.newton_tol) return res;

    // Converged: canonicalize and assemble the event.
    std::vector<double> ts(m);
    for (int i = 0; i < m; ++i) ts[i] = wrap_2pi(x[i]);
    // Contacts must stay separated beyond the diagonal exclusion band;
    // collapsed roots are degenerate configurations, not events. A4 has a
    // single contact, so it is exempt by construction.
    double sep_min = cfg.diag_cells * two_pi / std::max(cfg.grid_n, 1);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (circle_gap(ts[i], ts[j]) < sep_min) return res;

    MinkVec c{x[m], x[m + 1]};
    double u_star = x[m + 2];
    double final_scale = curve_scale(family, u_star);

    TransitionEvent ev;
    ev.kind = seed.kind;
    ev.u_star = u_star;
    ev.center = c;

    // Sort parameters, remembering each slot's expected contact order.
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](int a, int b) { return ts[a] < ts[b]; });
    std::vector<int> orders_by_pos(m);
    for (int pos = 0; pos < m; ++pos) {
        ev.t_params.push_back(ts[perm[pos]]);
        orders_by_pos[pos] = order_rank(seed.kind, perm[pos]);
    }

    double fsum = 0.0;
    for (double t : ev.t_params) fsum += dist_sq(family, t, u_star, c);
    ev.f_value = fsum / m;
    ev.circle = make_circle(c, ev.f_value, cfg.eps_light_rel, final_scale);

    for (int pos = 0; pos < m; ++pos) {
        ContactPoint cp = make_contact_point(family, u_star, ev.t_params[pos],
                                             ev.circle, cfg, final_scale,
                                             &ev.flags);
        if (cp.order == 0) {
            if (std::find(ev.flags.begin(), ev.flags.end(),
                          "OrderUncertain") == ev.flags.end())
                ev.flags.push_back("OrderUncertain");
        } else if (cp.order != orders_by_pos[pos]) {
            if (std::find(ev.flags.begin(), ev.flags.end(), "OrderMismatch") ==
                ev.flags.end())
                ev.flags.push_back("OrderMismatch");
        }
        cp.order = orders_by_pos[pos];
        ev.contacts.push_back(std::move(cp));
    }

    // Independently recomputed residual at the reported solution.
    std::vector<double> xf(ev.t_params);
    // Keep slot roles: rebuild in solver order (distinguished contact 0).
    {
        std::vector<double> slot_t(m);
        for (int pos = 0; pos < m; ++pos) slot_t[perm[pos]] = ev.t_params[pos];
        xf = slot_t;
    }
    xf.push_back(c.u0);
    xf.push_back(c.u1);
    xf.push_back(u_star);
    SystemEval fe = eval_system(family, seed.kind, xf, false);
    ev.residual = fe.ok ? max_abs(fe.F) / (final_scale * final_scale) : inf;

    classify_event(ev, cfg);

    res.status = SolveStatus::Converged;
    res.event = std::move(ev);
    return res;
}

// ---------------------------------------------------------------------------
// Classification.

namespace {

Branch contact_branch(TransitionEvent& ev, std::size_t i, double tol) {
    ContactPoint& cp = ev.contacts.at(i);
    cp.branch = branch_of(ev.circle, cp.point, tol);
    return *cp.branch;
}

double branch_tol(const TransitionEvent& ev) {
    return 1e-6 * std::fmax(1.0, std::fabs(ev.f_value));
}

/// Index of the contact expected to carry the distinguished (higher) order.
std::size_t distinguished_index(const TransitionEvent& ev, int order) {
    for (std::size_t i = 0; i < ev.contacts.size(); ++i)
        if (ev.contacts[i].order == order) return i;
    throw NonGeneric("classify: distinguished contact not identified");
}

bool point_in_triangle(MinkVec p, MinkVec a, MinkVec b, MinkVec c) {
    auto cross = [](MinkVec o, MinkVec q, MinkVec r) {
        return (q.u0 - o.u0) * (r.u1 - o.u1) - (q.u1 - o.u1) * (r.u0 - o.u0);
    };
    double d1 = cross(a, b, p), d2 = cross(b, c, p), d3 = cross(c, a, p);
    bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
    bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
    return !(has_neg && has_pos);
}

void require_circle(const TransitionEvent& ev) {
    if (ev.circle.kind == CircleKind::LC)
        throw LightconeCircle("classify: bitangent circle is lightcone");
}

} // namespace

Subtype classify_a14(TransitionEvent& ev, const Config& cfg) {
    (void)cfg;
    require_circle(ev);
    if (ev.contacts.size() != 4)
        throw NonGeneric("classify_a14: need four contacts");
    int plus = 0, minus = 0;
    double tol = branch_tol(ev);
    for (std::size_t i = 0; i < 4; ++i) {
        try {
            (contact_branch(ev, i, tol) == Branch::Plus ? plus : minus)++;
        } catch (const Error&) {
            throw NonGeneric("classify_a14: branch undecidable");
        }
    }
    ev.evidence.branch_counts = {plus, minus};

    // Secondary diagnostic: consecutive-difference determinants and the
    // Euclidean containment of each contact in the others' triangle.
    const auto& P = ev.contacts;
    MinkVec q1 = P[1].point - P[2].point;
    MinkVec q2 = P[2].point - P[3].point;
    MinkVec q3 = P[3].point - P[0].point;
    MinkVec q4 = P[0].point - P[1].point;
    auto det = [](MinkVec a, MinkVec b) { return a.u0 * b.u1 - a.u1 * b.u0; };
    auto sgn = [](double v) { return v > 0 ? 1 : v < 0 ? -1 : 0; };
    Evidence::Quad quad;
    quad.det_signs = {sgn(det(q1, q2)), sgn(det(q2, q3)), sgn(det(q3, q4)),
                      sgn(det(q4, q1))};
    for (int i = 0; i < 4; ++i)
        quad.inside[i] =
            point_in_triangle(P[i].point, P[(i + 1) % 4].point,
                              P[(i + 2) % 4].point, P[(i + 3) % 4].point);
    ev.evidence.quad = quad;

    bool odd = (plus % 2 == 1); // plus odd <=> minus odd, they sum to 4
    Subtype by_parity = odd ? Subtype::a : Subtype::b;
    bool any_inside = quad.inside[0] || quad.inside[1] || quad.inside[2] ||
                      quad.inside[3];
    Subtype by_quad = any_inside ? Subtype::a : Subtype::b;
    if (by_parity != by_quad &&
        std::find(ev.flags.begin(), ev.flags.end(), "CriterionConflict") ==
            ev.flags.end())
        ev.flags.push_back("CriterionConflict");
    ev.subtype = by_parity;
    return ev.subtype;
}

Subtype classify_a22(TransitionEvent& ev, const Config& cfg) {
    (void)cfg;
    require_circle(ev);
    if (ev.contacts.size() != 2)
        throw NonGeneric("classify_a22: need two contacts");
    if (!ev.contacts[0].kappa_prime || !ev.contacts[1].kappa_prime)
        throw NonGeneric("classify_a22: curvature derivative unavailable");
    double k1 = *ev.contacts[0].kappa_prime;
    double k2 = *ev.contacts[1].kappa_prime;
    ev.evidence.kappa_primes = {k1, k2};
    double mag = std::fabs(k1) + std::fabs(k2);
    double ng = 1e-9 * std::fmax(1.0, mag);
    if (std::fabs(k1) <= ng || std::fabs(k2) <= ng)
        throw NonGeneric("classify_a22: vanishing curvature derivative");
    if (std::fabs(k1 + k2) <= 1e-9 * mag)
        throw NonGeneric("classify_a22: kappa1' + kappa2' vanishes");
    ev.subtype = (k1 * k2 > 0.0) ? Subtype::a : Subtype::b;
    return ev.subtype;
}

Subtype classify_a12a2(TransitionEvent& ev, const Config& cfg) {
    (void)cfg;
    require_circle(ev);
    if (ev.contacts.size() != 3)
        throw NonGeneric("classify_a12a2: need three contacts");
    std::size_t a2 = distinguished_index(ev, 2);
    std::vector<std::size_t> a1s;
    for (std::size_t i = 0; i < 3; ++i)
        if (i != a2) a1s.push_back(i);

    double tol = branch_tol(ev);
    Branch b_a2, b1, b2;
    try {
        b_a2 = contact_branch(ev, a2, tol);
        b1 = contact_branch(ev, a1s[0], tol);
        b2 = contact_branch(ev, a1s[1], tol);
    } catch (const Error&) {
        throw NonGeneric("classify_a12a2: branch undecidable");
    }

    auto tangent = [&](std::size_t i, Branch b) {
        double th = circle_angle(ev.circle, ev.contacts[i].point);
        return canonical_tangent(ev.circle, b, th);
    };
    MinkVec T0 = tangent(a2, b_a2), T1 = tangent(a1s[0], b1),
            T2 = tangent(a1s[1], b2);
    ev.evidence.tangent_dots = {pseudo_dot(T0, T1), pseudo_dot(T0, T2),
                                pseudo_dot(T1, T2)};
    ev.subtype = (b1 == b2) ? Subtype::a : Subtype::b;
    return ev.subtype;
}

Subtype classify_a1a3(TransitionEvent& ev, const Config& cfg) {
    (void)cfg;
    require_circle(ev);
    if (ev.contacts.size() != 2)
        throw NonGeneric("classify_a1a3: need two contacts");
    std::size_t a3 = distinguished_index(ev, 3);
    std::size_t a1 = 1 - a3;

    double tol = branch_tol(ev);
    Branch b3, b1;
    try {
        b3 = contact_branch(ev, a3, tol);
        b1 = contact_branch(ev, a1, tol);
    } catch (const Error&) {
        throw NonGeneric("classify_a1a3: branch undecidable");
    }
    auto tangent = [&](std::size_t i, Branch b) {
        double th = circle_angle(ev.circle, ev.contacts[i].point);
        return canonical_tangent(ev.circle, b, th);
    };
    MinkVec T1 = tangent(a3, b3), T2 = tangent(a1, b1);
    ev.evidence.tangent_dots = {pseudo_dot(T1, T2)};
    double sign_f = ev.f_value < 0.0 ? -1.0 : 1.0;
    ev.evidence.a1a3_sign =
        sign_f * (pseudo_dot(T1, T1) - pseudo_dot(T1, T2));
    ev.subtype = (b3 != b1) ? Subtype::a : Subtype::b;
    return ev.subtype;
}

Subtype classify_a4(TransitionEvent& ev, const Config& cfg) {
    (void)cfg;
    require_circle(ev);
    if (ev.contacts.size() != 1)
        throw NonGeneric("classify_a4: need one contact");
    ev.subtype = Subtype::single;
    return ev.subtype;
}

Subtype classify_event(TransitionEvent& ev, const Config& cfg) {
    try {
        switch (ev.kind) {
            case EventKind::A1_4: return classify_a14(ev, cfg);
            case EventKind::A2_2: return classify_a22(ev, cfg);
            case EventKind::A1_2A2: return classify_a12a2(ev, cfg);
            case EventKind::A1A3: return classify_a1a3(ev, cfg);
            default: return classify_a4(ev, cfg);
        }
    } catch (const LightconeCircle&) {
        ev.flags.push_back("LightconeCircle");
    } catch (const NonGeneric&) {
        ev.flags.push_back("NonGeneric");
    }
    ev.subtype = Subtype::unclassified;
    return ev.subtype;
}

// ---------------------------------------------------------------------------
// Family scanning.

namespace {

struct SeedTrack {
    std::vector<double> ind;
    std::vector<EventSeed> seed;
    std::vector<bool> has_seed;

    explicit SeedTrack(int steps)
        : ind(steps, inf), seed(steps), has_seed(steps, false) {}

    void offer(int k, double value, EventSeed s) {
        if (value < ind[k]) {
            ind[k] = value;
            seed[k] = std::move(s);
            has_seed[k] = true;
        }
    }
};

/// Seed tracks keyed by a coarse cell of the parameter pair, so two
/// configurations approaching criticality at different places cannot shadow
/// each other's indicator minima.
struct BinnedTrack {
    static constexpr int nb = 8;
    int steps;
    std::map<int, SeedTrack> bins;

    explicit BinnedTrack(int s) : steps(s) {}

    void offer(double t1, double t2, int k, double value, EventSeed s) {
        double w = two_pi / nb;
        int i = std::clamp(static_cast<int>(wrap_2pi(t1) / w), 0, nb - 1);
        int j = std::clamp(static_cast<int>(wrap_2pi(t2) / w), 0, nb - 1);
        auto it = bins.try_emplace(i * nb + j, steps).first;
        it->second.offer(k, value, std::move(s));
    }
};

/// Curve vertices: parameters where kappa' crosses zero, away from
/// lightlike tangents.
std::vector<double> curvature_vertex_params(const CurveFamily& curve, double u,
                                            const Config& cfg) {
    int n = 1024;
    double h = two_pi / n;
    auto lights = lightlike_points(curve, u, cfg);
    auto near_light = [&](double t) {
        for (double L : lights)
            if (circle_gap(t, L) <= 2.0 * h) return true;
        return false;
    };
    auto kp = [&](double t) {
        return curvature_arclength_derivative(curve, t, u, cfg.eps_light_rel);
    };
    std::vector<double> out;
    double prev = 0.0;
    bool prev_ok = false;
    if (!near_light(0.0)) {
        prev = kp(0.0);
        prev_ok = true;
    }
    for (int i = 0; i < n; ++i) {
        double t1 = (i + 1) * h;
        if (near_light(t1)) {
            prev_ok = false;
            continue;
        }
        double next = kp(t1);
        if (prev_ok && (prev < 0.0) != (next < 0.0)) {
            double lo = i * h, hi = t1, flo = prev;
            while (hi - lo > cfg.root_bisect_tol) {
                double mid = 0.5 * (lo + hi);
                double fm = kp(mid);
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
            out.push_back(wrap_2pi(0.5 * (lo + hi)));
        }
        prev = next;
        prev_ok = true;
    }
    return out;
}

double norm_deriv(double value, double speed, int order, double fbase) {
    return std::fabs(value) / (std::pow(speed, order) * std::fmax(1.0, fbase));
}

} // namespace

ScanResult scan_family(const CurveFamily& family, double u_min, double u_max,
                       int steps, int grid_n, const Config& cfg) {
    if (!(u_min < u_max)) throw InputError("scan_family: need u_min < u_max");
    if (steps < 2) throw InputError("scan_family: need at least two steps");

    Config tcfg = cfg;
    tcfg.grid_n = grid_n;

    ScanResult out;
    out.u_min = u_min;
    out.u_max = u_max;
    out.steps = steps;

    // Pairs closer than this go into separate "near" tracks: close to a
    // swallowtail of the caustic, both second derivatives stay small on a
    // whole stretch of parameters, which would otherwise shadow genuine
    // collision signals from well-separated pairs.
    const double pair_gap_split = 0.5;
    BinnedTrack tr_a22_far(steps), tr_a22_near(steps), tr_a14(steps),
        tr_a12a2_far(steps), tr_a12a2_near(steps), tr_a1a3(steps);
    std::vector<std::vector<double>> vertex_sets(steps);
    std::vector<double> u_at(steps);
    int root_grid = std::max(256, cfg.label_grid_n / 4);
    double sep_min = cfg.diag_cells * two_pi / std::max(cfg.grid_n, 1);
    double t_excl = std::fmax(2.0 * two_pi / root_grid, sep_min);

    for (int k = 0; k < steps; ++k) {
        double u = u_min + (u_max - u_min) * k / (steps - 1);
        u_at[k] = u;
        double scale = curve_scale(family, u);
        double scale2 = scale * scale;

        TraceResult trace = trace_mss(family, u, tcfg);
        for (const auto& branch : trace.branches) {
            for (const auto& p : branch.points) {
                if (p.label == LocalLabel::NearLightlike ||
                    p.label == LocalLabel::NearDiagonal)
                    continue;
                DistDerivs d1 = dist_sq_derivs(family, p.t1, u, p.center);
                DistDerivs d2 = dist_sq_derivs(family, p.t2, u, p.center);
                double sp1 = euclid_norm(family.derivative(p.t1, u, 1));
                double sp2 = euclid_norm(family.derivative(p.t2, u, 1));
                double fb = std::fabs(p.f_value);
                double n1 = norm_deriv(d1.d[1], sp1, 2, fb);
                double n2 = norm_deriv(d2.d[1], sp2, 2, fb);
                bool far = circle_gap(p.t1, p.t2) > pair_gap_split;

                // Double-cusp collision indicator: at a cusp one second
                // derivative vanishes exactly, so the other one measures the
                // distance to a bi-osculating configuration directly.
                (far ? tr_a22_far : tr_a22_near)
                    .offer(p.t1, p.t2, k, std::fmax(n1, n2),
                           {EventKind::A2_2, {p.t1, p.t2}, p.center, u});

                bool cuspish = std::fmin(n1, n2) < cfg.cusp_select_threshold;
                auto roots = tangency_roots(family, u, p.center, root_grid,
                                            1e-10);
                std::vector<std::pair<double, double>> extras; // (|df|, t)
                for (const auto& r : roots) {
                    if (circle_gap(r.t, p.t1) < t_excl ||
                        circle_gap(r.t, p.t2) < t_excl)
                        continue;
                    extras.emplace_back(
                        std::fabs(r.f - p.f_value) / std::fmax(1.0, scale2),
                        r.t);
                }
                std::sort(extras.begin(), extras.end());

                if (cuspish && !extras.empty()) {
                    double t_a2 = n1 < n2 ? p.t1 : p.t2;
                    double t_a1 = n1 < n2 ? p.t2 : p.t1;
                    (far ? tr_a12a2_far : tr_a12a2_near)
                        .offer(p.t1, p.t2, k, extras[0].first,
                               {EventKind::A1_2A2,
                                {t_a2, t_a1, extras[0].second},
                                p.center,
                                u});
                }
                if (extras.size() >= 2) {
                    tr_a14.offer(p.t1, p.t2, k,
                                 std::fmax(extras[0].first, extras[1].first),
                                 {EventKind::A1_4,
                                  {p.t1, p.t2, extras[0].second,
                                   extras[1].second},
                                  p.center,
                                  u});
                }
            }
        }

        vertex_sets[k] = curvature_vertex_params(family, u, cfg);
        for (double tv : vertex_sets[k]) {
            Jet jet;
            try {
                jet = family.jet(tv, u, 5);
            } catch (const Error&) {
                continue;
            }
            auto cv = try_caustic_point(jet);
            if (!cv) continue;
            DistDerivs dd = dist_sq_derivs(jet, *cv);

            auto roots = tangency_roots(family, u, *cv, root_grid, 1e-10);
            for (const auto& r : roots) {
                if (circle_gap(r.t, tv) < t_excl) continue;
                double df = std::fabs(r.f - dd.f) / std::fmax(1.0, scale2);
                tr_a1a3.offer(std::fmin(tv, r.t), std::fmax(tv, r.t), k, df,
                              {EventKind::A1A3, {tv, r.t}, *cv, u});
            }
        }
    }

    std::vector<TransitionEvent> events;
    auto attempt = [&](const EventSeed& s) {
        SolveResult sr = solve_event(family, s, cfg);
        if (sr.status == SolveStatus::Converged) {
            if (sr.event->u_star >= u_min - 1e-12 &&
                sr.event->u_star <= u_max + 1e-12)
                events.push_back(std::move(*sr.event));
        } else {
            out.failed_seeds.push_back({s.kind, s.u, sr.status});
        }
    };

    auto harvest = [&](BinnedTrack& bt, double threshold) {
        for (auto& [bin, tr] : bt.bins) {
            for (int k = 0; k < steps; ++k) {
                if (!tr.has_seed[k] || tr.ind[k] >= threshold) continue;
                bool left_ok = k == 0 || tr.ind[k] <= tr.ind[k - 1];
                bool right_ok = k == steps - 1 || tr.ind[k] <= tr.ind[k + 1];
                if (!left_ok || !right_ok) continue;
                // A flat track carries no localization: require a strict drop
                // on one side, except at window endpoints.
                bool strict = k == 0 || k == steps - 1 ||
                              tr.ind[k] < tr.ind[k - 1] ||
                              tr.ind[k] < tr.ind[k + 1];
                if (!strict) continue;
                attempt(tr.seed[k]);
            }
        }
    };
    // Near a double-cusp collision the indicator decays like the square root
    // of the distance to the critical parameter, so well-separated pairs get
    // a generous threshold; near-diagonal tracks keep the strict one because
    // the degenerate neighborhood of a swallowtail produces small values
    // that only the solver guards can reject.
    harvest(tr_a22_far, std::fmax(1.0, cfg.seed_indicator_threshold));
    harvest(tr_a22_near, cfg.seed_indicator_threshold);
    harvest(tr_a14, cfg.seed_indicator_threshold);
    harvest(tr_a12a2_far, cfg.seed_indicator_threshold);
    harvest(tr_a12a2_near, cfg.seed_indicator_threshold);
    harvest(tr_a1a3, cfg.seed_indicator_threshold);

    // A4: a pair of curvature vertices is born or dies when the caustic
    // sprouts or sheds a swallowtail. Bracket by the vertex count and seed
    // at the midpoint of the closest adjacent pair on the richer side.
    for (int k = 0; k + 1 < steps; ++k) {
        int ca = static_cast<int>(vertex_sets[k].size());
        int cb = static_cast<int>(vertex_sets[k + 1].size());
        if (std::abs(ca - cb) < 2) continue;
        int rich = ca > cb ? k : k + 1;
        const auto& vs = vertex_sets[rich];
        int n = static_cast<int>(vs.size());
        if (n < 2) continue;
        int want = std::abs(ca - cb) / 2;
        std::vector<std::pair<double, int>> gaps;
        for (int i = 0; i < n; ++i)
            gaps.emplace_back(circle_gap(vs[i], vs[(i + 1) % n]), i);
        std::sort(gaps.begin(), gaps.end());
        std::vector<bool> used(n, false);
        int taken = 0;
        for (const auto& [gap, i] : gaps) {
            if (taken == want) break;
            int j = (i + 1) % n;
            if (used[i] || used[j]) continue;
            used[i] = used[j] = true;
            ++taken;
            double d = vs[j] - vs[i];
            if (d < 0) d += two_pi;
            double mid = wrap_2pi(vs[i] + 0.5 * d);
            double uu = u_at[rich];
            Jet jet;
            try {
                jet = family.jet(mid, uu, 5);
            } catch (const Error&) {
                continue;
            }
            auto cv = try_caustic_point(jet);
            if (!cv) continue;
            attempt({EventKind::A4, {mid}, *cv, uu});
        }
    }

    // Deduplicate: same kind, nearby u and center.
    std::sort(events.begin(), events.end(),
              [](const TransitionEvent& a, const TransitionEvent& b) {
                  if (a.u_star != b.u_star) return a.u_star < b.u_star;
                  if (a.kind != b.kind) return a.kind < b.kind;
                  return a.t_params < b.t_params;
              });
    for (const auto& ev : events) {
        bool dup = false;
        for (const auto& kept : out.events) {
            if (kept.kind != ev.kind) continue;
            if (std::fabs(kept.u_star - ev.u_star) > cfg.dedup_u_tol) continue;
            double sc = curve_scale(family, ev.u_star);
            if (euclid_dist(kept.center, ev.center) <=
                cfg.dedup_center_tol * std::fmax(1.0, sc)) {
                dup = true;
                break;
            }
        }
        if (!dup) out.events.push_back(ev);
    }
    return out;
}

} // namespace mss
