#pragma once

namespace mss {

/// Numerical knobs shared across the library. Every tolerance that names a
/// "relative" quantity is multiplied by a scale derived from its operands
/// (squared curve scale for distance-squared values, Euclidean speed for
/// parameter derivatives) before use.
struct Config {
    /// Causal classification: |<u,u>| <= eps_light_rel * max(1, |u|_E^2)
    /// counts as lightlike.
    double eps_light_rel = 1e-12;

    /// Base tolerance for contact-order tests and residual checks.
    double tol = 1e-6;

    /// Contact order needs a clean band: derivatives up to k below tol,
    /// the (k+1)-st above gap_factor * tol, anything between is Ambiguous.
    double gap_factor = 10.0;

    /// Bitangency trace grid: cells per 2*pi in each direction.
    int grid_n = 512;

    /// Gap-band width near the diagonal t1 == t2, in grid cells.
    /// The traced domain starts at gap d = diag_cells * (2*pi/grid_n).
    double diag_cells = 2.0;

    /// Mask trace nodes whose parameters lie within this many cells of a
    /// lightlike parameter.
    double lightlike_mask_cells = 1.0;

    /// Relative threshold on the normal-line 2x2 determinant below which a
    /// parameter pair counts as ParallelNormals.
    double parallel_tol = 1e-10;

    /// Accept a refined trace vertex only if |g| <= refine_g_tol * scale^2.
    double refine_g_tol = 1e-10;

    /// Sample count for bracketing lightlike parameters on [0, 2*pi).
    int lightlike_grid_n = 4096;

    /// Bisection stops when the bracket is shorter than this.
    double root_bisect_tol = 1e-12;

    /// Grid used when enumerating tangency parameters of a fixed center.
    int label_grid_n = 1024;

    /// Newton iteration limits for transition solving.
    int newton_max_iter = 50;
    int newton_max_halvings = 8;

    /// Converged when the scaled residual drops below newton_tol.
    double newton_tol = 1e-10;

    /// Jacobian condition estimate above this aborts with DegenerateJacobian.
    double cond_limit = 1e12;

    /// Events closer than these in (u, center) are merged as duplicates.
    double dedup_u_tol = 1e-6;
    double dedup_center_tol = 1e-6; // times curve scale

    /// Family scan defaults.
    int scan_steps = 200;

    /// Indicator local minima below this (scale-normalized) value spawn
    /// Newton seeds. Deliberately loose: the solver plus residual
    /// verification rejects spurious seeds, a tight threshold would skip
    /// events that fall between scan samples.
    double seed_indicator_threshold = 0.05;

    /// A traced contact counts as cusp-like when its normalized second
    /// distance derivative is below this.
    double cusp_select_threshold = 0.05;

    /// Sample count for the caustic polyline in reports.
    int caustic_samples = 1024;
};

} // namespace mss
