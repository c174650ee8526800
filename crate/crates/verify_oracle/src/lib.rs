//! Independent reference implementations. Nothing here calls the specialised
//! entropy formulas of `entropy_core`; states, projectors and conditional
//! entropies are rebuilt from explicit vectors and generic eigensolves.

pub mod explicit;
pub mod gradient;
pub mod sampling;
pub mod search;

pub use explicit::{brute_force_entropy, brute_force_score, ExplicitState};
pub use gradient::{gradient_check, GradientCheck};
pub use sampling::random_strategy;
pub use search::brute_force_minimum;
