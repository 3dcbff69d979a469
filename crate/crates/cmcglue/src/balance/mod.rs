//! Fluxes, projections onto the approximate kernel and the balancing system.

mod calibrate;
mod flux;
mod projection;
mod system;

pub use calibrate::{calibrate_constants, cap_flux, fit_flux_constants, fit_friction_constant, geodesic_sphere_projection, neck_displacement_slope, BalanceConstants, FLUX_CUT, FLUX_GRID, FRICTION_RADII};
pub use flux::{flux, flux_at_point};
pub use projection::{neck_projection, projections, sphere_projection, tau, Projection, ProjectionOptions};
pub use system::{
    balance_report, initial_guess, leading_residual, solve_balance, sphere_positions, unknown_counts, BalanceOptions, BalanceReport, BalancedSolution, IterationRecord, Monotonicity, RegimeCheck,
    TriangularDiagnostic,
};
