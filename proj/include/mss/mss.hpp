#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mss/config.hpp"
#include "mss/contact.hpp"
#include "mss/curve.hpp"
#include "mss/minkowski.hpp"

namespace mss {

/// One tangency of a bitangent pseudo-circle with the curve.
struct ContactPoint {
    double t = 0.0;
    int order = 1; // contact order k; 0 when the order test was Ambiguous
    MinkVec point;
    CausalType tangent_type = CausalType::Spacelike;
    std::optional<double> kappa;       // absent near lightlike tangents
    std::optional<double> kappa_prime;
    std::optional<Branch> branch;      // present iff the circle kind is H or S
    bool near_lightlike = false;
};

enum class LocalLabel {
    A1A1,          // generic bitangency
    A2A1,          // osculating at one contact: symmetry-set cusp
    A3,            // contacts merged at a vertex: branch endpoint
    A1cubed,       // a third tangency with equal value exists
    NearLightlike, // within the masked band around a lightlike parameter
    NearDiagonal,  // within the excluded band around t1 == t2
};

const char* to_string(LocalLabel l);

/// Point of the symmetry set: center of a circle tangent to the curve at two
/// parameters with equal distance-squared values.
struct MssPoint {
    double t1 = 0.0, t2 = 0.0; // canonical: both in [0, 2*pi), t1 < t2
    MinkVec center;
    double f_value = 0.0;
    PseudoCircle circle;
    std::vector<ContactPoint> contacts; // size 2, ordered (t1, t2)
    LocalLabel label = LocalLabel::A1A1;
    bool medial = false;
    std::vector<std::string> flags;
};

struct MssBranch {
    std::vector<MssPoint> points;
    bool closed = false;
};

/// Bounding box of masked trace cells in (t1, t2) = (a, a + d) coordinates;
/// t2 may exceed 2*pi to express wraparound.
struct MaskedBox {
    double t1_lo = 0.0, t1_hi = 0.0, t2_lo = 0.0, t2_hi = 0.0;
    std::string reason;
};

struct TraceResult {
    std::vector<MssBranch> branches;
    std::vector<MaskedBox> masked_boxes;
    std::size_t masked_cell_count = 0;
    double delta_diag = 0.0; // width of the excluded diagonal band
    int grid_n = 0;
    double scale = 1.0;
};

/// Center of the circle pseudo-normal to the curve at both parameters:
/// the 2x2 linear system <gamma(ti) - c, gamma'(ti)> = 0. Throws
/// ParallelNormals when the normal lines are parallel.
MinkVec normal_center(const CurveFamily& curve, double t1, double t2,
                      double u, const Config& cfg = {});
std::optional<MinkVec> try_normal_center(const CurveFamily& curve, double t1,
                                         double t2, double u,
                                         const Config& cfg = {});

/// g(t1, t2) = f(t1, c) - f(t2, c) with c = normal_center(t1, t2). Zeros of
/// g away from the diagonal are exactly the symmetry-set configurations.
double bitangency_residual(const CurveFamily& curve, double t1, double t2,
                           double u, const Config& cfg = {});
std::optional<double> try_bitangency_residual(const CurveFamily& curve,
                                              double t1, double t2, double u,
                                              const Config& cfg = {});

/// Contact record at parameter t against a fixed circle: order, causal
/// type, curvature data, branch. Curvatures are omitted near lightlike
/// tangents, the branch for LC circles or undecidable positions.
ContactPoint make_contact_point(const CurveFamily& curve, double u, double t,
                                const PseudoCircle& circle, const Config& cfg,
                                double scale,
                                std::vector<std::string>* flags = nullptr);

/// Assemble an MssPoint at a parameter pair: center, circle, contact data.
/// The label is filled by label_mss_point. Returns nullopt when the normal
/// center does not exist. Pass the curve scale when known to skip its
/// recomputation.
std::optional<MssPoint> make_mss_point(const CurveFamily& curve, double t1,
                                       double t2, double u,
                                       const Config& cfg = {},
                                       double scale = -1.0);

/// Classify the local singularity of an MssPoint via contact orders plus a
/// global search for further tangencies with equal value.
LocalLabel label_mss_point(const CurveFamily& curve, double u, MssPoint& p,
                           const Config& cfg = {}, double scale = -1.0);

/// Tangency parameter of a fixed center: root of f'(., c) with the f and f''
/// values at the root.
struct TangencyRoot {
    double t = 0.0;
    double f = 0.0;
    double fpp = 0.0;
};

/// All tangency parameters of the circle family centered at c, found by
/// sign-change bracketing of f' on a uniform grid.
std::vector<TangencyRoot> tangency_roots(const CurveFamily& curve, double u,
                                         MinkVec c, int grid_n,
                                         double bisect_tol = 1e-12);

/// True when every contact lies on the same branch of the bitangent circle.
/// False for lightcone circles.
bool medial_flag(const MssPoint& p);

/// March the zero set of g over the cylinder strip (a, d), a in [0, 2*pi)
/// periodic, d in [delta_diag, pi], where (t1, t2) = (a, a + d). The strip
/// is a fundamental domain of the pair-swap symmetry. Cells touching
/// lightlike parameters or parallel-normal poles are masked and reported.
TraceResult trace_mss(const CurveFamily& curve, double u, const Config& cfg = {});

/// Dense sample of g on the n x n grid over [0, 2*pi)^2, upper triangle
/// i < j only; NaN marks masked nodes. det holds the normal-line determinant
/// used to tell genuine zero crossings from pole crossings.
struct DenseMap {
    int n = 0;
    std::vector<double> g;   // size n*n, row-major, node (i, j) at i*n + j
    std::vector<double> det; // same layout
    double diag_band = 0.0;
};

DenseMap oracle_grid(const CurveFamily& curve, double u, int n,
                     const Config& cfg = {});

} // namespace mss
