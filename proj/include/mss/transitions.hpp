#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mss/config.hpp"
#include "mss/curve.hpp"
#include "mss/minkowski.hpp"
#include "mss/mss.hpp"

namespace mss {

/// Codimension-one multi-contact configurations met at isolated family
/// parameters.
enum class EventKind { A1_4, A2_2, A1_2A2, A1A3, A4 };

enum class Subtype { a, b, single, unclassified };

const char* to_string(EventKind k);
const char* to_string(Subtype s);

/// Data backing a subtype decision; which fields are present depends on the
/// event kind.
struct Evidence {
    /// A1_4: contacts on (plus, minus) branches of the bitangent circle.
    std::optional<std::pair<int, int>> branch_counts;
    /// A2_2: curvature arclength derivatives at the two osculating contacts.
    std::optional<std::pair<double, double>> kappa_primes;
    /// A1_2A2 and A1A3: pseudo products of canonical branch tangents,
    /// distinguished contact first.
    std::vector<double> tangent_dots;
    /// A1A3: sign of (-1)^beta * (<T1,T1> - <T1,T2>).
    std::optional<double> a1a3_sign;
    /// A1_4 secondary diagnostic: consecutive-difference determinant signs
    /// and a Euclidean point-in-triangle test of each contact against the
    /// other three.
    struct Quad {
        std::array<int, 4> det_signs{};
        std::array<bool, 4> inside{};
    };
    std::optional<Quad> quad;
};

struct TransitionEvent {
    EventKind kind = EventKind::A2_2;
    Subtype subtype = Subtype::unclassified;
    double u_star = 0.0;
    std::vector<double> t_params; // ascending in [0, 2*pi)
    MinkVec center;
    double f_value = 0.0;
    PseudoCircle circle;
    std::vector<ContactPoint> contacts; // aligned with t_params
    Evidence evidence;
    double residual = 0.0; // scale-normalized, independently recomputed
    std::vector<std::string> flags;
};

struct EventSeed {
    EventKind kind = EventKind::A2_2;
    std::vector<double> t; // contact parameter guesses, kind-specific count
    MinkVec c;
    double u = 0.0;
};

enum class SolveStatus { Converged, NoConvergence, DegenerateJacobian };

const char* to_string(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::NoConvergence;
    std::optional<TransitionEvent> event;
    int iterations = 0;
    double condition = 0.0;
};

/// Damped Newton on the defining equations of the event kind; unknowns are
/// the contact parameters, the center, and u. Converged events carry
/// independently recomputed residuals and classification evidence.
SolveResult solve_event(const CurveFamily& family, const EventSeed& seed,
                        const Config& cfg = {});

struct FailedSeed {
    EventKind kind;
    double u_seed;
    SolveStatus status;
};

struct ScanResult {
    std::vector<TransitionEvent> events; // sorted by u_star
    std::vector<FailedSeed> failed_seeds;
    double u_min = 0.0, u_max = 0.0;
    int steps = 0;
};

/// Sweep the family parameter, watch per-kind degeneracy indicators along
/// the traced symmetry set, seed Newton at indicator minima, deduplicate
/// converged events. Events are only reported inside [u_min, u_max].
ScanResult scan_family(const CurveFamily& family, double u_min, double u_max,
                       int steps, int grid_n, const Config& cfg = {});

/// Subtype from the branch placement of four tangencies: odd/odd split
/// across the branches gives (a), even/even gives (b).
/// Throws LightconeCircle / NonGeneric.
Subtype classify_a14(TransitionEvent& ev, const Config& cfg = {});

/// Subtype from the sign of kappa1' * kappa2': positive (a), negative (b).
/// Degenerate magnitudes or kappa1' + kappa2' near zero are NonGeneric.
Subtype classify_a22(TransitionEvent& ev, const Config& cfg = {});

/// Subtype from whether the two simple tangencies share a circle branch:
/// same (a), opposite (b).
Subtype classify_a12a2(TransitionEvent& ev, const Config& cfg = {});

/// Subtype from whether the two contacts share a circle branch: opposite
/// (a), same (b).
Subtype classify_a1a3(TransitionEvent& ev, const Config& cfg = {});

/// A4 events come in a single flavor.
Subtype classify_a4(TransitionEvent& ev, const Config& cfg = {});

/// Dispatch on ev.kind; records NonGeneric/LightconeCircle as flags instead
/// of throwing.
Subtype classify_event(TransitionEvent& ev, const Config& cfg = {});

} // namespace mss
