//! Certified evaluation of modular forms in the upper half plane.

mod evaluate;
mod point;
mod reduce;
mod truncation;

pub use evaluate::{atkin_lehner_sign, evaluate_form, evaluate_truncated, nome, EvalPlan, Evaluation, FormEvaluator};
pub use point::EvalPoint;
pub use reduce::{reduce_point, AtkinLehnerSign, Reduction, MAX_REDUCTION_STEPS};
pub use truncation::{
    choose_truncation, choose_truncation_with, tail_bound, truncation_d, TailModel, Truncation, FALLBACK_TERMS,
};
