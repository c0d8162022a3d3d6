//! Project-wide tolerance ladder.
//!
//! Checks are graded by how many derivatives of the immersion they
//! consume: table lookups are exact, each differentiation order costs
//! roughly two digits of conditioning.

/// Identities that reduce to multiplication-table lookups.
pub const EXACT: f64 = 0.0;
/// Identities involving first derivatives (metric, tangency).
pub const FIRST_DERIV: f64 = 1e-10;
/// Identities involving second derivatives (h, G, curvature inputs).
pub const SECOND_DERIV: f64 = 1e-8;
/// Identities involving third derivatives (R, nabla h).
pub const THIRD_DERIV: f64 = 1e-7;
/// Identities involving fourth derivatives (nabla^2 h, Ricci identity).
pub const FOURTH_DERIV: f64 = 1e-6;

/// Norm test for membership of a point in the unit sphere.
pub const ON_SPHERE: f64 = 1e-10;
/// Totally-real / Lagrangian residual threshold.
pub const LAGRANGIAN: f64 = 1e-9;
/// Rank cutoff for singular values of the differential.
pub const RANK: f64 = 1e-8;
/// Condition-number bound beyond which a metric counts as degenerate.
pub const METRIC_CONDITION: f64 = 1e10;
