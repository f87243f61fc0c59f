//! Hecke operators applied analytically, error budgets and eigenvalues.

mod budget;
mod eigenvalue;
mod eisenstein;
mod points;

pub use budget::{coarse_floor, coarse_from_estimate, coarse_nonzero_bounds, split_budget, CoarseBounds, ErrorBudget, COARSE_STEPS};
pub use eigenvalue::{apply_hecke, eigenvalue_numerical, fallback_point, round_eigenvalue, FormRoute, HeckeEigenvalue, HeckeSum, Method};
pub use eisenstein::{eisenstein_path_value, EisensteinEvaluator};
pub use points::{hecke_points, hecke_terms, HeckeTerm};
